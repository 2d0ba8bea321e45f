//! Two-sided Student's t-tests.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTest {
    pub t: f64,
    pub df: f64,
    pub p_value: f64,
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Sample variance (n - 1 denominator).
pub fn sample_variance(v: &[f64]) -> f64 {
    let m = mean(v);
    v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() as f64 - 1.0)
}

/// Standard error of the mean: sample std over sqrt(n). Zero for n < 2.
pub fn sem(v: &[f64]) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    (sample_variance(v) / v.len() as f64).sqrt()
}

fn two_sided(t: f64, df: f64) -> Result<f64> {
    if t.is_infinite() {
        return Ok(0.0);
    }
    let dist = StudentsT::new(0.0, 1.0, df).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    Ok((2.0 * dist.sf(t.abs())).min(1.0))
}

/// Zero spread: identical means give t = 0, otherwise an infinite statistic.
fn degenerate_t(diff: f64) -> f64 {
    if diff == 0.0 {
        0.0
    } else {
        diff.signum() * f64::INFINITY
    }
}

/// Two-sample test with pooled (equal) variance.
pub fn students_t_test(a: &[f64], b: &[f64]) -> Result<TTest> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::InvalidParameter(
            "t-test needs at least 2 values per sample".into(),
        ));
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let df = na + nb - 2.0;
    let pooled = ((na - 1.0) * sample_variance(a) + (nb - 1.0) * sample_variance(b)) / df;
    let diff = mean(a) - mean(b);
    let t = if pooled > 0.0 {
        diff / (pooled * (1.0 / na + 1.0 / nb)).sqrt()
    } else {
        degenerate_t(diff)
    };
    Ok(TTest {
        t,
        df,
        p_value: two_sided(t, df)?,
    })
}

/// Paired test on the differences `a[i] - b[i]`.
pub fn paired_t_test(a: &[f64], b: &[f64]) -> Result<TTest> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    if a.len() < 2 {
        return Err(Error::InvalidParameter("paired t-test needs at least 2 pairs".into()));
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let n = d.len() as f64;
    let var = sample_variance(&d);
    let md = mean(&d);
    let t = if var > 0.0 {
        md / (var / n).sqrt()
    } else {
        degenerate_t(md)
    };
    let df = n - 1.0;
    Ok(TTest {
        t,
        df,
        p_value: two_sided(t, df)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn reference_example() {
        let r = students_t_test(&[0.8, 0.9, 1.0], &[0.5, 0.6, 0.7]).unwrap();
        assert_abs_diff_eq!(r.t, 3.6742346141747686, epsilon = 1e-12);
        assert_eq!(r.df, 4.0);
        assert_abs_diff_eq!(r.p_value, 0.021311641128756696, epsilon = 1e-12);
    }

    #[test]
    fn second_reference_example() {
        let r = students_t_test(&[0.81, 0.79, 0.83, 0.80, 0.82], &[0.78, 0.77, 0.80, 0.79, 0.76]).unwrap();
        assert_abs_diff_eq!(r.t, 3.0, epsilon = 1e-9);
        assert_abs_diff_eq!(r.p_value, 0.017071681233782224, epsilon = 1e-10);
    }

    #[test]
    fn paired_reference_example() {
        let r = paired_t_test(&[0.8, 0.9, 1.0, 0.85], &[0.5, 0.65, 0.7, 0.6]).unwrap();
        assert_abs_diff_eq!(r.t, 19.052558883257635, epsilon = 1e-9);
        assert_abs_diff_eq!(r.p_value, 0.0003157333424171956, epsilon = 1e-12);
    }

    #[test]
    fn identical_samples() {
        let a = [0.7, 0.8, 0.9];
        assert_eq!(students_t_test(&a, &a).unwrap().p_value, 1.0);
        assert_eq!(students_t_test(&[0.5; 4], &[0.5; 4]).unwrap().p_value, 1.0);
        assert_eq!(paired_t_test(&a, &a).unwrap().p_value, 1.0);
        assert_eq!(students_t_test(&[0.5; 4], &[0.6; 4]).unwrap().p_value, 0.0);
    }

    #[test]
    fn far_separated_samples() {
        let lin = |lo: f64, hi: f64| (0..30).map(|i| lo + (hi - lo) * i as f64 / 29.0).collect::<Vec<_>>();
        let r = students_t_test(&lin(0.9, 0.95), &lin(0.1, 0.15)).unwrap();
        assert!(r.p_value < 1e-10);
    }

    #[test]
    fn too_small() {
        assert!(students_t_test(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn sem_is_sample_std_over_root_n() {
        assert_abs_diff_eq!(sem(&[1.0, 2.0, 3.0]), 1.0 / 3f64.sqrt(), epsilon = 1e-15);
    }

    proptest! {
        #[test]
        fn symmetric(
            a in proptest::collection::vec(0.0f64..1.0, 2..20),
            b in proptest::collection::vec(0.0f64..1.0, 2..20),
        ) {
            let ab = students_t_test(&a, &b).unwrap();
            let ba = students_t_test(&b, &a).unwrap();
            prop_assert_eq!(ab.p_value, ba.p_value);
            prop_assert!((0.0..=1.0).contains(&ab.p_value));
        }
    }
}
