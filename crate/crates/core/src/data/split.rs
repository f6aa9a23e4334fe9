use super::dataset::Split;
use super::record::Label;
use crate::error::{Error, Result};
use crate::rng::Rng;

/// Stratified train/test assignment. Each class sends
/// `round(n_class × test_fraction)` rows (at least one, and never all) to the
/// test split. Classes absent from `labels` are skipped.
pub fn stratified_split(labels: &[Label], test_fraction: f64, seed: u64) -> Result<Vec<Split>> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::Argument(format!("test fraction {test_fraction} must lie in (0, 1)")));
    }
    let mut out = vec![Split::Train; labels.len()];
    for (stream, class) in [Label::Normal, Label::Anomalous].into_iter().enumerate() {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        match members.len() {
            0 => continue,
            1 => {
                return Err(Error::Stratification(format!(
                    "class {class:?} has a single row; stratification needs at least 2"
                )))
            }
            n => {
                let n_test = ((n as f64 * test_fraction).round() as usize).clamp(1, n - 1);
                Rng::substream(seed, stream as u64).shuffle(&mut members);
                for &i in &members[..n_test] {
                    out[i] = Split::Test;
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(normal: usize, anomalous: usize) -> Vec<Label> {
        let mut v = vec![Label::Normal; normal];
        v.extend(vec![Label::Anomalous; anomalous]);
        v
    }

    fn test_counts(labels: &[Label], split: &[Split]) -> (usize, usize) {
        let count = |c| labels.iter().zip(split).filter(|(l, s)| **l == c && **s == Split::Test).count();
        (count(Label::Normal), count(Label::Anomalous))
    }

    #[test]
    fn sixty_five_thirty_five() {
        let l = labels(65, 35);
        let s = stratified_split(&l, 0.2, 1).unwrap();
        assert_eq!(test_counts(&l, &s), (13, 7));
    }

    #[test]
    fn deterministic() {
        let l = labels(50, 20);
        assert_eq!(stratified_split(&l, 0.3, 9).unwrap(), stratified_split(&l, 0.3, 9).unwrap());
    }

    #[test]
    fn smallest_case() {
        let l = labels(2, 2);
        let s = stratified_split(&l, 0.5, 0).unwrap();
        assert_eq!(test_counts(&l, &s), (1, 1));
    }

    #[test]
    fn single_row_class_rejected() {
        assert!(matches!(stratified_split(&labels(5, 1), 0.2, 0), Err(Error::Stratification(_))));
        assert!(stratified_split(&labels(5, 2), 1.0, 0).is_err());
    }

    proptest::proptest! {
        #[test]
        fn per_class_share_within_one_row(normal in 2usize..300, anomalous in 2usize..300, fraction in 0.05f64..0.95, seed in 0u64..1000) {
            let l = labels(normal, anomalous);
            let s = stratified_split(&l, fraction, seed).unwrap();
            let (tn, ta) = test_counts(&l, &s);
            proptest::prop_assert!((tn as f64 - normal as f64 * fraction).abs() <= 1.0);
            proptest::prop_assert!((ta as f64 - anomalous as f64 * fraction).abs() <= 1.0);
        }
    }
}
