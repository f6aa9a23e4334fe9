use super::record::{DerivedFeatures, FuelRecord};
use crate::error::{Error, Result};

/// Divides the period totals by the number of days in the period.
pub fn derive_features(record: &FuelRecord) -> Result<DerivedFeatures> {
    let days = record.number_of_days;
    if days.is_nan() || days < 1.0 {
        return Err(Error::Domain(format!(
            "site {} on {}: number of days {days} < 1; clean records before deriving features",
            record.site_id, record.visit_date
        )));
    }
    Ok(DerivedFeatures {
        daily_consumption_within_period: record.consumption_his / days,
        running_time_per_day: record.running_time / days,
        daily_consumed_quantity_between_visits: record.quantity_consumed_between_visits / days,
    })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use chrono::NaiveDate;

    pub(crate) fn record() -> FuelRecord {
        FuelRecord {
            site_id: "S001".into(),
            visit_date: NaiveDate::from_ymd_opt(2017, 9, 1).unwrap(),
            power_type: "Generator".into(),
            generator_capacity: 20.0,
            running_time: 48.0,
            consumption_his: 100.0,
            number_of_days: 2.0,
            quantity_consumed_between_visits: 63.0,
            total_quantity_left: 400.0,
            maximum_consumption_per_day: 60.0,
            consumption_rate: 2.0,
        }
    }

    #[test]
    fn ratios() {
        let mut r = record();
        assert_eq!(derive_features(&r).unwrap().running_time_per_day, 24.0);
        r.number_of_days = 4.0;
        assert_eq!(derive_features(&r).unwrap().daily_consumption_within_period, 25.0);
        r.number_of_days = 7.0;
        assert_eq!(derive_features(&r).unwrap().daily_consumed_quantity_between_visits, 9.0);
    }

    #[test]
    fn zero_days_is_domain_error() {
        let mut r = record();
        r.number_of_days = 0.0;
        assert!(matches!(derive_features(&r), Err(Error::Domain(_))));
    }
}
