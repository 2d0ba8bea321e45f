//! Baseline versus pairwise comparison, wins counting and train-test gaps.

use serde::{Deserialize, Serialize};

use super::cv::FoldResult;
use super::stats::{mean, paired_t_test, sem, students_t_test, TTest};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Win,
    Loss,
    Tie,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub n_runs: usize,
    pub base_mean: f64,
    pub base_sem: f64,
    pub pdc_mean: f64,
    pub pdc_sem: f64,
    /// PDC mean minus baseline mean.
    pub delta_f1: f64,
    pub outcome: Outcome,
    pub significant: bool,
    pub t_statistic: f64,
    pub p_value: f64,
    pub alpha: f64,
    pub paired: bool,
}

fn run_test(a: &[f64], b: &[f64], paired: bool) -> Result<TTest> {
    if paired {
        paired_t_test(a, b)
    } else {
        students_t_test(a, b)
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha must lie in (0, 1], got {alpha}"
        )));
    }
    Ok(())
}

/// Compares per-run scores. A win needs a strictly higher PDC mean; a
/// significant result needs `p < alpha` and is never a tie.
pub fn compare_scores(base: &[f64], pdc: &[f64], alpha: f64, paired: bool) -> Result<ComparisonReport> {
    check_alpha(alpha)?;
    if base.len() != pdc.len() {
        return Err(Error::DimensionMismatch {
            expected: base.len(),
            got: pdc.len(),
        });
    }
    let test = run_test(pdc, base, paired)?;
    let (base_mean, pdc_mean) = (mean(base), mean(pdc));
    let outcome = if pdc_mean > base_mean {
        Outcome::Win
    } else if pdc_mean < base_mean {
        Outcome::Loss
    } else {
        Outcome::Tie
    };
    Ok(ComparisonReport {
        n_runs: base.len(),
        base_mean,
        base_sem: sem(base),
        pdc_mean,
        pdc_sem: sem(pdc),
        delta_f1: pdc_mean - base_mean,
        outcome,
        significant: outcome != Outcome::Tie && test.p_value < alpha,
        t_statistic: test.t,
        p_value: test.p_value,
        alpha,
        paired,
    })
}

pub fn test_scores(results: &[FoldResult]) -> Vec<f64> {
    results.iter().map(|r| r.test_macro_f1).collect()
}

pub fn train_scores(results: &[FoldResult]) -> Vec<f64> {
    results.iter().map(|r| r.train_macro_f1).collect()
}

/// Compares test macro-F1 of two result sets produced on the same splits.
pub fn compare(base: &[FoldResult], pdc: &[FoldResult], alpha: f64, paired: bool) -> Result<ComparisonReport> {
    compare_scores(&test_scores(base), &test_scores(pdc), alpha, paired)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WinTally {
    pub wins: usize,
    pub losses: usize,
    pub ties: usize,
    pub significant_wins: usize,
    pub significant_losses: usize,
}

impl WinTally {
    pub fn add(&mut self, r: &ComparisonReport) {
        match r.outcome {
            Outcome::Win => {
                self.wins += 1;
                self.significant_wins += usize::from(r.significant);
            }
            Outcome::Loss => {
                self.losses += 1;
                self.significant_losses += usize::from(r.significant);
            }
            Outcome::Tie => self.ties += 1,
        }
    }

    pub fn from_reports<'a>(reports: impl IntoIterator<Item = &'a ComparisonReport>) -> Self {
        let mut t = WinTally::default();
        for r in reports {
            t.add(r);
        }
        t
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapSide {
    pub train_mean: f64,
    pub test_mean: f64,
    pub gap: f64,
}

impl GapSide {
    fn of(results: &[FoldResult]) -> Self {
        let train_mean = mean(&train_scores(results));
        let test_mean = mean(&test_scores(results));
        GapSide {
            train_mean,
            test_mean,
            gap: train_mean - test_mean,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverfitReport {
    pub base: GapSide,
    pub pdc: GapSide,
    /// PDC gap minus baseline gap; negative means PDC overfits less.
    pub gap_difference: f64,
    pub train_p_value: f64,
    /// Train scores do not differ significantly at `alpha`.
    pub comparable_train: bool,
}

pub fn overfit_report(base: &[FoldResult], pdc: &[FoldResult], alpha: f64) -> Result<OverfitReport> {
    check_alpha(alpha)?;
    let b = GapSide::of(base);
    let p = GapSide::of(pdc);
    let train_p_value = students_t_test(&train_scores(pdc), &train_scores(base))?.p_value;
    Ok(OverfitReport {
        gap_difference: p.gap - b.gap,
        base: b,
        pdc: p,
        train_p_value,
        comparable_train: train_p_value >= alpha,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn fold(train: f64, test: f64) -> FoldResult {
        FoldResult {
            repeat: 0,
            fold: 0,
            n_train: 1,
            n_test: 1,
            train_macro_f1: train,
            test_macro_f1: test,
            per_class_f1: vec![test],
            selected: None,
            fit_seconds: 0.0,
            predict_seconds: 0.0,
        }
    }

    #[test]
    fn win_significant_and_tie_rules() {
        let r = compare_scores(&[0.77, 0.78, 0.79], &[0.80, 0.81, 0.82], 0.05, false).unwrap();
        assert_eq!(r.outcome, Outcome::Win);
        assert!(r.significant);
        assert_abs_diff_eq!(r.delta_f1, 0.03, epsilon = 1e-12);

        let tie = compare_scores(&[0.7, 0.8], &[0.8, 0.7], 0.05, false).unwrap();
        assert_eq!(tie.outcome, Outcome::Tie);
        assert!(!tie.significant);

        let r = compare_scores(&[0.6, 0.8, 0.7], &[0.65, 0.85, 0.7], 0.05, false).unwrap();
        assert_eq!(r.outcome, Outcome::Win);
        assert!(!r.significant && r.p_value > 0.05);
    }

    #[test]
    fn alpha_one_marks_every_non_tie() {
        let r = compare_scores(&[0.6, 0.8, 0.7], &[0.65, 0.85, 0.7], 1.0, false).unwrap();
        assert!(r.significant);
        let tie = compare_scores(&[0.7, 0.8], &[0.8, 0.7], 1.0, false).unwrap();
        assert!(!tie.significant);
    }

    #[test]
    fn tally_counts_ties_as_neither() {
        let reports = [
            compare_scores(&[0.5, 0.6], &[0.7, 0.8], 0.05, false).unwrap(),
            compare_scores(&[0.7, 0.8], &[0.8, 0.7], 0.05, false).unwrap(),
            compare_scores(&[0.7, 0.8], &[0.5, 0.6], 0.05, false).unwrap(),
        ];
        let t = WinTally::from_reports(&reports);
        assert_eq!((t.wins, t.losses, t.ties), (1, 1, 1));
        assert!(t.wins + t.losses <= reports.len());
    }

    #[test]
    fn gap_pattern() {
        let base = vec![fold(0.95, 0.88); 3];
        let pdc = vec![fold(0.955, 0.895); 3];
        let r = overfit_report(&base, &pdc, 0.05).unwrap();
        assert_abs_diff_eq!(r.base.gap, 0.07, epsilon = 1e-12);
        assert_abs_diff_eq!(r.pdc.gap, 0.06, epsilon = 1e-12);
        assert!(r.gap_difference < 0.0);

        let same = overfit_report(&base, &base, 0.05).unwrap();
        assert_eq!(same.gap_difference, 0.0);
        assert!(same.comparable_train);

        // a worse gap is reported as is
        let worse = overfit_report(&pdc, &base, 0.05).unwrap();
        assert!(worse.gap_difference > 0.0);
    }

    #[test]
    fn mismatched_runs_rejected() {
        assert!(compare_scores(&[0.5, 0.6], &[0.5, 0.6, 0.7], 0.05, false).is_err());
        assert!(compare_scores(&[0.5, 0.6], &[0.5, 0.6], 0.0, false).is_err());
    }
}
