use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Normal,
    Anomalous,
}

impl Label {
    pub fn as_u8(self) -> u8 {
        match self {
            Label::Normal => 0,
            Label::Anomalous => 1,
        }
    }

    pub fn from_u8(v: u8) -> Result<Self> {
        match v {
            0 => Ok(Label::Normal),
            1 => Ok(Label::Anomalous),
            other => Err(Error::Argument(format!("label must be 0 or 1, got {other}"))),
        }
    }

    pub fn is_anomalous(self) -> bool {
        self == Label::Anomalous
    }
}

/// Input columns of the raw consumption log.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Field {
    SiteId,
    VisitDate,
    PowerType,
    GeneratorCapacity,
    RunningTime,
    ConsumptionHis,
    NumberOfDays,
    QuantityConsumedBetweenVisits,
    TotalQuantityLeft,
    MaximumConsumptionPerDay,
    ConsumptionRate,
}

impl Field {
    pub const ALL: [Field; 11] = [
        Field::SiteId,
        Field::VisitDate,
        Field::PowerType,
        Field::GeneratorCapacity,
        Field::RunningTime,
        Field::ConsumptionHis,
        Field::NumberOfDays,
        Field::QuantityConsumedBetweenVisits,
        Field::TotalQuantityLeft,
        Field::MaximumConsumptionPerDay,
        Field::ConsumptionRate,
    ];

    /// Header text written by the synthetic generator.
    pub fn default_header(self) -> &'static str {
        match self {
            Field::SiteId => "Site ID",
            Field::VisitDate => "Visit Date",
            Field::PowerType => "Power Type",
            Field::GeneratorCapacity => "Generator Capacity (kVA)",
            Field::RunningTime => "Running Time",
            Field::ConsumptionHis => "Consumption HIS",
            Field::NumberOfDays => "Number of Days",
            Field::QuantityConsumedBetweenVisits => "Quantity Consumed between Visits",
            Field::TotalQuantityLeft => "Total Quantity Left",
            Field::MaximumConsumptionPerDay => "Maximum Consumption per Day",
            Field::ConsumptionRate => "Consumption Rate",
        }
    }

    pub fn is_mandatory(self) -> bool {
        self != Field::PowerType
    }

    pub fn is_numeric(self) -> bool {
        !matches!(self, Field::SiteId | Field::VisitDate | Field::PowerType)
    }
}

/// One parsed log row. Numeric cells are `None` when the cell was empty.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RawRecord {
    /// 1-based line number in the source file.
    pub line: u64,
    pub site_id: Option<String>,
    pub visit_date: Option<NaiveDate>,
    pub power_type: Option<String>,
    pub generator_capacity: Option<f64>,
    pub running_time: Option<f64>,
    pub consumption_his: Option<f64>,
    pub number_of_days: Option<f64>,
    pub quantity_consumed_between_visits: Option<f64>,
    pub total_quantity_left: Option<f64>,
    pub maximum_consumption_per_day: Option<f64>,
    pub consumption_rate: Option<f64>,
}

impl RawRecord {
    pub fn numeric_mut(&mut self, field: Field) -> Option<&mut Option<f64>> {
        Some(match field {
            Field::GeneratorCapacity => &mut self.generator_capacity,
            Field::RunningTime => &mut self.running_time,
            Field::ConsumptionHis => &mut self.consumption_his,
            Field::NumberOfDays => &mut self.number_of_days,
            Field::QuantityConsumedBetweenVisits => &mut self.quantity_consumed_between_visits,
            Field::TotalQuantityLeft => &mut self.total_quantity_left,
            Field::MaximumConsumptionPerDay => &mut self.maximum_consumption_per_day,
            Field::ConsumptionRate => &mut self.consumption_rate,
            Field::SiteId | Field::VisitDate | Field::PowerType => return None,
        })
    }
}

/// A validated consumption record: every mandatory value present, at least
/// one day in the period, and no negative quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuelRecord {
    pub site_id: String,
    pub visit_date: NaiveDate,
    pub power_type: String,
    /// kVA.
    pub generator_capacity: f64,
    /// Hours, cumulative over the period.
    pub running_time: f64,
    /// Liters consumed over the period.
    pub consumption_his: f64,
    pub number_of_days: f64,
    /// Liters.
    pub quantity_consumed_between_visits: f64,
    /// Liters.
    pub total_quantity_left: f64,
    /// Liters per day.
    pub maximum_consumption_per_day: f64,
    /// Liters per hour.
    pub consumption_rate: f64,
}

/// The three per-day ratio features.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedFeatures {
    /// Consumption HIS / days.
    pub daily_consumption_within_period: f64,
    /// Running time / days.
    pub running_time_per_day: f64,
    /// Quantity consumed between visits / days.
    pub daily_consumed_quantity_between_visits: f64,
}

/// Feature columns used for the forest, the GAN and correlation analysis.
pub const FEATURE_NAMES: [&str; 8] = [
    "running_time",
    "consumption_his",
    "quantity_consumed_between_visits",
    "total_quantity_left",
    "maximum_consumption_per_day",
    "daily_consumption_within_period",
    "running_time_per_day",
    "daily_consumed_quantity_between_visits",
];

pub const RUNNING_TIME_PER_DAY: usize = 6;

/// Feature vector in [`FEATURE_NAMES`] order.
pub fn feature_vector(record: &FuelRecord, derived: &DerivedFeatures) -> [f64; 8] {
    [
        record.running_time,
        record.consumption_his,
        record.quantity_consumed_between_visits,
        record.total_quantity_left,
        record.maximum_consumption_per_day,
        derived.daily_consumption_within_period,
        derived.running_time_per_day,
        derived.daily_consumed_quantity_between_visits,
    ]
}
