use crate::error::{Error, Result};

/// One-vs-rest F1 per class. A class with no true positives, false
/// positives or false negatives scores 0.
pub fn per_class_f1(y_true: &[usize], y_pred: &[usize], n_classes: usize) -> Result<Vec<f64>> {
    if y_true.len() != y_pred.len() {
        return Err(Error::DimensionMismatch {
            expected: y_true.len(),
            got: y_pred.len(),
        });
    }
    if y_true.is_empty() {
        return Err(Error::EmptyData);
    }
    let mut tp = vec![0usize; n_classes];
    let mut fp = vec![0usize; n_classes];
    let mut fn_ = vec![0usize; n_classes];
    for (&t, &p) in y_true.iter().zip(y_pred) {
        if t >= n_classes || p >= n_classes {
            return Err(Error::InvalidParameter(format!(
                "label {} out of range for {n_classes} classes",
                t.max(p)
            )));
        }
        if t == p {
            tp[t] += 1;
        } else {
            fp[p] += 1;
            fn_[t] += 1;
        }
    }
    Ok((0..n_classes)
        .map(|k| {
            let denom = 2 * tp[k] + fp[k] + fn_[k];
            if denom == 0 {
                0.0
            } else {
                (2 * tp[k]) as f64 / denom as f64
            }
        })
        .collect())
}

/// Unweighted mean of [`per_class_f1`] over all `n_classes` classes.
pub fn macro_f1(y_true: &[usize], y_pred: &[usize], n_classes: usize) -> Result<f64> {
    let f = per_class_f1(y_true, y_pred, n_classes)?;
    Ok(mean_of(&f))
}

pub(crate) fn mean_of(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}
