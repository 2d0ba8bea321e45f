//! Standardization, one-hot and ordinal encoding fitted on a training split.
//!
//! Numeric and ordinal columns are centered and scaled with the population
//! standard deviation (a constant column keeps scale 1). Ordinal columns are
//! first mapped to their rank. Nominal columns expand into one indicator per
//! category seen at fit time; an unseen category yields an all-zero block.
//! Missing numeric/ordinal cells are imputed with the training mean, and a
//! missing nominal cell is its own category.

use serde::{Deserialize, Serialize};

use super::raw::{parse_number, ColumnKind, RawDataset};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

const MISSING_CATEGORY: &str = "<missing>";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "encoder", rename_all = "snake_case")]
pub enum FeatureEncoder {
    Numeric {
        name: String,
        mean: f64,
        std: f64,
    },
    Nominal {
        name: String,
        categories: Vec<String>,
    },
    Ordinal {
        name: String,
        categories: Vec<String>,
        mean: f64,
        std: f64,
    },
}

impl FeatureEncoder {
    pub fn name(&self) -> &str {
        match self {
            FeatureEncoder::Numeric { name, .. }
            | FeatureEncoder::Nominal { name, .. }
            | FeatureEncoder::Ordinal { name, .. } => name,
        }
    }

    pub fn width(&self) -> usize {
        match self {
            FeatureEncoder::Nominal { categories, .. } => categories.len(),
            _ => 1,
        }
    }

    fn output_names(&self) -> Vec<String> {
        match self {
            FeatureEncoder::Nominal { name, categories } => categories.iter().map(|c| format!("{name}={c}")).collect(),
            other => vec![other.name().to_string()],
        }
    }

    fn encode(&self, cell: Option<&str>, out: &mut Vec<f64>) -> Result<()> {
        match self {
            FeatureEncoder::Numeric { name, mean, std } => {
                let v = match cell {
                    None => *mean,
                    Some(s) => parse_number(s).ok_or_else(|| Error::SchemaMismatch {
                        column: name.clone(),
                        reason: format!("non-numeric value `{s}`"),
                    })?,
                };
                out.push((v - mean) / std);
            }
            FeatureEncoder::Ordinal {
                name,
                categories,
                mean,
                std,
            } => {
                let v = match cell {
                    None => *mean,
                    Some(s) => ordinal_rank(name, categories, s)?,
                };
                out.push((v - mean) / std);
            }
            FeatureEncoder::Nominal { categories, .. } => {
                let key = cell.unwrap_or(MISSING_CATEGORY);
                out.extend(categories.iter().map(|c| if c == key { 1.0 } else { 0.0 }));
            }
        }
        Ok(())
    }
}

fn ordinal_rank(column: &str, categories: &[String], value: &str) -> Result<f64> {
    categories
        .iter()
        .position(|c| c == value)
        .map(|r| r as f64)
        .ok_or_else(|| Error::UnknownOrdinal {
            column: column.to_string(),
            value: value.to_string(),
        })
}

/// Mean and population standard deviation; a zero spread is reported as 1.
fn location_scale(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 1.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let std = var.sqrt();
    if std > 0.0 {
        (mean, std)
    } else {
        (mean, 1.0)
    }
}

/// Model-ready data: encoded features plus class indices.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessedDataset {
    pub x: Matrix,
    pub y: Vec<usize>,
    pub class_names: Vec<String>,
    pub feature_names: Vec<String>,
}

impl ProcessedDataset {
    pub fn new(x: Matrix, y: Vec<usize>, class_names: Vec<String>) -> Result<Self> {
        if x.rows() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: x.rows(),
                got: y.len(),
            });
        }
        if let Some(&bad) = y.iter().find(|&&l| l >= class_names.len()) {
            return Err(Error::InvalidParameter(format!(
                "label {bad} out of range for {} classes",
                class_names.len()
            )));
        }
        let feature_names = (0..x.cols()).map(|j| format!("x{j}")).collect();
        Ok(ProcessedDataset {
            x,
            y,
            class_names,
            feature_names,
        })
    }

    /// Convenience constructor with classes named by their index.
    pub fn from_labels(x: Matrix, y: Vec<usize>, n_classes: usize) -> Result<Self> {
        let names = (0..n_classes).map(|k| k.to_string()).collect();
        Self::new(x, y, names)
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.x.cols()
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn subset(&self, idx: &[usize]) -> ProcessedDataset {
        ProcessedDataset {
            x: self.x.select_rows(idx),
            y: idx.iter().map(|&i| self.y[i]).collect(),
            class_names: self.class_names.clone(),
            feature_names: self.feature_names.clone(),
        }
    }
}

/// Fitted preprocessing state. Immutable after [`Preprocessor::fit`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Preprocessor {
    pub encoders: Vec<FeatureEncoder>,
    pub target_column: String,
    /// Class names in first-occurrence order of the training labels.
    pub class_names: Vec<String>,
}

impl Preprocessor {
    pub fn fit(train: &RawDataset) -> Result<Self> {
        if train.is_empty() {
            return Err(Error::EmptyData);
        }
        let mut encoders = Vec::new();
        for (j, col) in train.feature_columns() {
            let cells = train.rows.iter().map(|r| r[j].as_deref());
            let enc = match &col.kind {
                ColumnKind::Numeric => {
                    let mut values = Vec::with_capacity(train.len());
                    for c in cells.flatten() {
                        values.push(parse_number(c).ok_or_else(|| Error::SchemaMismatch {
                            column: col.name.clone(),
                            reason: format!("non-numeric value `{c}`"),
                        })?);
                    }
                    let (mean, std) = location_scale(&values);
                    FeatureEncoder::Numeric {
                        name: col.name.clone(),
                        mean,
                        std,
                    }
                }
                ColumnKind::Ordinal { categories } => {
                    let mut ranks = Vec::with_capacity(train.len());
                    for c in cells.flatten() {
                        ranks.push(ordinal_rank(&col.name, categories, c)?);
                    }
                    let (mean, std) = location_scale(&ranks);
                    FeatureEncoder::Ordinal {
                        name: col.name.clone(),
                        categories: categories.clone(),
                        mean,
                        std,
                    }
                }
                ColumnKind::Nominal => {
                    let mut categories: Vec<String> = Vec::new();
                    for c in cells {
                        let key = c.unwrap_or(MISSING_CATEGORY);
                        if !categories.iter().any(|k| k == key) {
                            categories.push(key.to_string());
                        }
                    }
                    FeatureEncoder::Nominal {
                        name: col.name.clone(),
                        categories,
                    }
                }
            };
            encoders.push(enc);
        }

        let mut class_names: Vec<String> = Vec::new();
        for l in train.labels() {
            if !class_names.contains(&l) {
                class_names.push(l);
            }
        }
        Ok(Preprocessor {
            encoders,
            target_column: train.target_column.clone(),
            class_names,
        })
    }

    pub fn n_outputs(&self) -> usize {
        self.encoders.iter().map(FeatureEncoder::width).sum()
    }

    pub fn output_names(&self) -> Vec<String> {
        self.encoders.iter().flat_map(FeatureEncoder::output_names).collect()
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    /// Encodes features only; the target column may be absent.
    pub fn transform_features(&self, data: &RawDataset) -> Result<Matrix> {
        let mut positions = Vec::with_capacity(self.encoders.len());
        for enc in &self.encoders {
            let j = data.column_index(enc.name()).ok_or_else(|| Error::SchemaMismatch {
                column: enc.name().to_string(),
                reason: "column missing from input".into(),
            })?;
            positions.push(j);
        }
        let width = self.n_outputs();
        let mut x = Matrix::with_capacity(width, data.len());
        let mut buf = Vec::with_capacity(width);
        for row in &data.rows {
            buf.clear();
            for (enc, &j) in self.encoders.iter().zip(&positions) {
                enc.encode(row[j].as_deref(), &mut buf)?;
            }
            x.push_row(&buf)?;
        }
        Ok(x)
    }

    /// Encodes features and labels. Labels unseen at fit time are an error.
    pub fn transform(&self, data: &RawDataset) -> Result<ProcessedDataset> {
        let x = self.transform_features(data)?;
        let mut y = Vec::with_capacity(data.len());
        for l in data.labels() {
            let k = self
                .class_names
                .iter()
                .position(|c| *c == l)
                .ok_or(Error::UnseenLabel(l))?;
            y.push(k);
        }
        Ok(ProcessedDataset {
            x,
            y,
            class_names: self.class_names.clone(),
            feature_names: self.output_names(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::raw::{read_csv, SchemaHints};
    use approx::assert_abs_diff_eq;

    fn raw(s: &str, hints: &SchemaHints) -> RawDataset {
        read_csv(s.as_bytes(), None, hints).unwrap()
    }

    #[test]
    fn numeric_stats_use_population_std() {
        let d = raw("v,y\n1,a\n2,b\n3,a\n", &SchemaHints::new());
        let p = Preprocessor::fit(&d).unwrap();
        match &p.encoders[0] {
            FeatureEncoder::Numeric { mean, std, .. } => {
                assert_eq!(*mean, 2.0);
                assert_abs_diff_eq!(*std, 0.816496580927726, epsilon = 1e-12);
            }
            e => panic!("{e:?}"),
        }
        let t = p.transform(&raw("v,y\n3,a\n", &SchemaHints::new())).unwrap();
        assert_abs_diff_eq!(t.x.get(0, 0), 1.224744871391589, epsilon = 1e-12);
    }

    #[test]
    fn constant_column_scale_is_one() {
        let d = raw("v,y\n5,a\n5,b\n5,a\n", &SchemaHints::new());
        let p = Preprocessor::fit(&d).unwrap();
        assert_eq!(
            p.encoders[0],
            FeatureEncoder::Numeric {
                name: "v".into(),
                mean: 5.0,
                std: 1.0
            }
        );
        let t = p.transform(&d).unwrap();
        assert!(t.x.as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn one_hot_width_and_unseen_category() {
        let d = raw("c,y\nred,a\nblue,b\nred,a\n", &SchemaHints::new());
        let p = Preprocessor::fit(&d).unwrap();
        assert_eq!(p.n_outputs(), 2);
        let t = p
            .transform_features(&raw("c,y\nblue,a\ngreen,b\n", &SchemaHints::new()))
            .unwrap();
        assert_eq!(t.row(0), &[0.0, 1.0]);
        assert_eq!(t.row(1), &[0.0, 0.0]);
    }

    #[test]
    fn ordinal_rank_then_standardized() {
        let mut hints = SchemaHints::new();
        hints.insert(
            "size".into(),
            ColumnKind::Ordinal {
                categories: vec!["S".into(), "M".into(), "L".into()],
            },
        );
        let d = raw("size,y\nS,a\nM,b\nL,a\n", &hints);
        let p = Preprocessor::fit(&d).unwrap();
        // ranks 0,1,2 -> mean 1; M sits exactly at the center
        let t = p.transform(&d).unwrap();
        assert_eq!(t.x.get(1, 0), 0.0);
        assert!(t.x.get(0, 0) < 0.0 && t.x.get(2, 0) > 0.0);
        if let FeatureEncoder::Ordinal { categories, .. } = &p.encoders[0] {
            assert_eq!(ordinal_rank("size", categories, "M").unwrap(), 1.0);
        }
    }

    #[test]
    fn missing_cells_are_imputed() {
        let d = raw("v,c,y\n1,r,a\n?,?,b\n3,g,a\n", &SchemaHints::new());
        let p = Preprocessor::fit(&d).unwrap();
        let t = p.transform(&d).unwrap();
        assert_eq!(t.x.get(1, 0), 0.0);
        // categories: r, <missing>, g
        assert_eq!(&t.x.row(1)[1..], &[0.0, 1.0, 0.0]);
    }

    #[test]
    fn labels_follow_first_occurrence_and_reject_unseen() {
        let d = raw("v,y\n1,zeta\n2,alpha\n3,zeta\n", &SchemaHints::new());
        let p = Preprocessor::fit(&d).unwrap();
        assert_eq!(p.class_names, vec!["zeta", "alpha"]);
        assert_eq!(p.transform(&d).unwrap().y, vec![0, 1, 0]);
        let bad = raw("v,y\n1,omega\n", &SchemaHints::new());
        assert!(matches!(p.transform(&bad), Err(Error::UnseenLabel(_))));
        // prediction-only path ignores labels
        assert!(p.transform_features(&bad).is_ok());
    }

    #[test]
    fn schema_mismatch_names_column() {
        let d = raw("v,w,y\n1,2,a\n2,3,b\n", &SchemaHints::new());
        let p = Preprocessor::fit(&d).unwrap();
        let other = raw("v,y\n1,a\n", &SchemaHints::new());
        match p.transform_features(&other) {
            Err(Error::SchemaMismatch { column, .. }) => assert_eq!(column, "w"),
            r => panic!("{r:?}"),
        }
    }

    #[test]
    fn zero_rows_rejected() {
        let d = raw("v,y\n", &SchemaHints::new());
        assert!(matches!(Preprocessor::fit(&d), Err(Error::EmptyData)));
    }
}
