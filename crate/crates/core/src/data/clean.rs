use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::record::{FuelRecord, RawRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DropReason {
    Missing,
    ZeroDayPeriod,
    Negative,
}

impl DropReason {
    pub fn as_str(self) -> &'static str {
        match self {
            DropReason::Missing => "missing",
            DropReason::ZeroDayPeriod => "zero-day period",
            DropReason::Negative => "negative",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DropTally {
    pub counts: BTreeMap<DropReason, usize>,
    /// `(line, reason)` for each dropped row.
    pub dropped: Vec<(u64, DropReason)>,
}

impl DropTally {
    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn count(&self, reason: DropReason) -> usize {
        self.counts.get(&reason).copied().unwrap_or(0)
    }

    fn add(&mut self, line: u64, reason: DropReason) {
        *self.counts.entry(reason).or_default() += 1;
        self.dropped.push((line, reason));
    }
}

/// First failing check for a row, or the validated record.
pub fn validate(raw: &RawRecord) -> Result<FuelRecord, DropReason> {
    let (
        Some(site_id),
        Some(visit_date),
        Some(generator_capacity),
        Some(running_time),
        Some(consumption_his),
        Some(number_of_days),
        Some(quantity_consumed_between_visits),
        Some(total_quantity_left),
        Some(maximum_consumption_per_day),
        Some(consumption_rate),
    ) = (
        raw.site_id.clone(),
        raw.visit_date,
        raw.generator_capacity,
        raw.running_time,
        raw.consumption_his,
        raw.number_of_days,
        raw.quantity_consumed_between_visits,
        raw.total_quantity_left,
        raw.maximum_consumption_per_day,
        raw.consumption_rate,
    )
    else {
        return Err(DropReason::Missing);
    };
    let quantities = [
        generator_capacity,
        running_time,
        consumption_his,
        number_of_days,
        quantity_consumed_between_visits,
        total_quantity_left,
        maximum_consumption_per_day,
        consumption_rate,
    ];
    if quantities.iter().any(|&q| q < 0.0) {
        return Err(DropReason::Negative);
    }
    if number_of_days < 1.0 {
        return Err(DropReason::ZeroDayPeriod);
    }
    Ok(FuelRecord {
        site_id,
        visit_date,
        power_type: raw.power_type.clone().unwrap_or_default(),
        generator_capacity,
        running_time,
        consumption_his,
        number_of_days,
        quantity_consumed_between_visits,
        total_quantity_left,
        maximum_consumption_per_day,
        consumption_rate,
    })
}

/// Drops rows with missing mandatory values, negative quantities, or fewer
/// than one day in the period. Order of retained rows is preserved.
pub fn clean(records: &[RawRecord]) -> (Vec<FuelRecord>, DropTally) {
    let mut tally = DropTally::default();
    let mut kept = Vec::with_capacity(records.len());
    for raw in records {
        match validate(raw) {
            Ok(r) => kept.push(r),
            Err(reason) => tally.add(raw.line, reason),
        }
    }
    (kept, tally)
}
