use crate::error::{Error, Result};
use crate::linalg::C64;

/// Number of rank positions that earn score.
pub const SCORED_RANKS: usize = 5;

/// Positional distance between two canonically sorted eigenvalue lists,
/// `Σ | |Re eᵢ| − |Re aᵢ| | + Σ | |Im eᵢ| − |Im aᵢ| |`.
///
/// Taking absolute values first makes the metric blind to conjugate and
/// sign flips between otherwise matching entries.
pub fn error_metric(exact: &[C64], approx: &[C64]) -> Result<f64> {
    if exact.len() != approx.len() {
        return Err(Error::dim("error_metric", exact.len(), approx.len()));
    }
    Ok(exact
        .iter()
        .zip(approx)
        .map(|(e, a)| (e.re.abs() - a.re.abs()).abs() + (e.im.abs() - a.im.abs()).abs())
        .sum())
}

/// Competition ranks (1 = smallest error; equal errors share the better
/// rank). NaN errors rank last.
pub fn ranks(errors: &[f64]) -> Vec<usize> {
    let key = |e: f64| if e.is_nan() { f64::INFINITY } else { e };
    errors
        .iter()
        .map(|&e| 1 + errors.iter().filter(|&&o| key(o) < key(e)).count())
        .collect()
}

/// `Σᵢ nᵢ (1 − 0.2(i − 1))` over ranks `i = 1..5`; later ranks score 0.
pub fn score_metric(histogram: &[usize]) -> f64 {
    histogram
        .iter()
        .take(SCORED_RANKS)
        .enumerate()
        .map(|(i, &n)| n as f64 * (1.0 - 0.2 * i as f64))
        .sum()
}

/// Per-method rank counts accumulated over comparison rounds.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RankHistogram {
    counts: Vec<Vec<usize>>,
}

impl RankHistogram {
    pub fn new(methods: usize) -> Self {
        Self {
            counts: vec![vec![0; methods]; methods],
        }
    }

    /// Ranks one round of errors (one per method) and records them.
    pub fn record(&mut self, errors: &[f64]) -> Result<()> {
        if errors.len() != self.counts.len() {
            return Err(Error::dim(
                "RankHistogram::record",
                self.counts.len(),
                errors.len(),
            ));
        }
        for (method, r) in ranks(errors).into_iter().enumerate() {
            self.counts[method][r - 1] += 1;
        }
        Ok(())
    }

    /// `counts[rank − 1]` for one method.
    pub fn counts(&self, method: usize) -> &[usize] {
        &self.counts[method]
    }

    pub fn scores(&self) -> Vec<f64> {
        self.counts.iter().map(|c| score_metric(c)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_lists_have_zero_error() {
        let v = [C64::new(-1.0, 2.0), C64::new(3.0, -4.0)];
        assert_eq!(error_metric(&v, &v).unwrap(), 0.0);
        assert!(error_metric(&v, &v[..1]).is_err());
    }

    #[test]
    fn score_formula() {
        assert_eq!(score_metric(&[10]), 10.0);
        assert!((score_metric(&[3, 2, 0, 0, 0]) - 4.6).abs() < 1e-15);
        assert_eq!(score_metric(&[0, 0, 0, 0, 0, 7]), 0.0);
    }

    #[test]
    fn ties_share_the_better_rank() {
        assert_eq!(ranks(&[0.5, 0.1, 0.5, f64::NAN]), vec![2, 1, 2, 4]);
    }

    #[test]
    fn permutation_round_scores_three() {
        let mut h = RankHistogram::new(6);
        h.record(&[6.0, 5.0, 4.0, 3.0, 2.0, 1.0]).unwrap();
        let total: f64 = h.scores().iter().sum();
        assert!((total - 3.0).abs() < 1e-12);
    }
}
