use serde::{Deserialize, Serialize};

use super::record::{DerivedFeatures, FuelRecord, Label};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum LabelRule {
    /// R1: running time per day strictly above `hours`.
    RunningTimePerDayAbove { hours: f64 },
    /// R2: daily consumed quantity between visits strictly above the
    /// maximum consumption per day.
    DailyQuantityAboveMaximum,
}

impl LabelRule {
    pub fn fires(&self, record: &FuelRecord, derived: &DerivedFeatures) -> bool {
        match *self {
            LabelRule::RunningTimePerDayAbove { hours } => derived.running_time_per_day > hours,
            LabelRule::DailyQuantityAboveMaximum => {
                derived.daily_consumed_quantity_between_visits > record.maximum_consumption_per_day
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            LabelRule::RunningTimePerDayAbove { hours } => format!("running_time_per_day > {hours}"),
            LabelRule::DailyQuantityAboveMaximum => {
                "daily_consumed_quantity_between_visits > maximum_consumption_per_day".into()
            }
        }
    }
}

/// A row is anomalous iff any rule in the set fires.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelRuleSet {
    pub rules: Vec<LabelRule>,
}

impl Default for LabelRuleSet {
    fn default() -> Self {
        Self {
            rules: vec![
                LabelRule::RunningTimePerDayAbove { hours: 24.0 },
                LabelRule::DailyQuantityAboveMaximum,
            ],
        }
    }
}

impl LabelRuleSet {
    pub fn running_time_only(hours: f64) -> Self {
        Self {
            rules: vec![LabelRule::RunningTimePerDayAbove { hours }],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.rules.is_empty() {
            return Err(Error::Config("label rule set must enable at least one rule".into()));
        }
        for rule in &self.rules {
            if let LabelRule::RunningTimePerDayAbove { hours } = rule {
                if !(*hours > 0.0 && hours.is_finite()) {
                    return Err(Error::Config(format!("running-time threshold {hours} must be positive")));
                }
            }
        }
        Ok(())
    }

    pub fn describe(&self) -> String {
        self.rules.iter().map(LabelRule::describe).collect::<Vec<_>>().join(" OR ")
    }

    pub fn fingerprint(&self) -> String {
        crate::config::fingerprint(self)
    }
}

pub fn label(record: &FuelRecord, derived: &DerivedFeatures, rules: &LabelRuleSet) -> Label {
    if rules.rules.iter().any(|r| r.fires(record, derived)) {
        Label::Anomalous
    } else {
        Label::Normal
    }
}
