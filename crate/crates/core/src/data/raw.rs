use std::collections::{HashMap, HashSet};
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// How a column is encoded by the preprocessing pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ColumnKind {
    Numeric,
    Nominal,
    /// Categories listed from lowest to highest rank.
    Ordinal {
        categories: Vec<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnSchema {
    pub name: String,
    #[serde(flatten)]
    pub kind: ColumnKind,
}

/// Per-column kind overrides applied while loading a CSV.
pub type SchemaHints = HashMap<String, ColumnKind>;

/// Tabular data as read from disk: one optional text cell per schema column.
///
/// Cells stay textual so a column can be reinterpreted by a fitted
/// preprocessor regardless of how it was auto-typed at load time.
#[derive(Debug, Clone, PartialEq)]
pub struct RawDataset {
    pub schema: Vec<ColumnSchema>,
    pub rows: Vec<Vec<Option<String>>>,
    pub target_column: String,
}

pub(crate) fn is_missing_token(s: &str) -> bool {
    let t = s.trim();
    t.is_empty() || t == "?" || t.eq_ignore_ascii_case("na") || t.eq_ignore_ascii_case("nan")
}

pub(crate) fn parse_number(s: &str) -> Option<f64> {
    s.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

impl RawDataset {
    pub fn new(schema: Vec<ColumnSchema>, rows: Vec<Vec<Option<String>>>, target: &str) -> Result<Self> {
        let mut seen = HashSet::new();
        for c in &schema {
            if !seen.insert(c.name.as_str()) {
                return Err(Error::DuplicateColumn(c.name.clone()));
            }
        }
        if !seen.contains(target) {
            return Err(Error::MissingTarget(target.to_string()));
        }
        for (i, r) in rows.iter().enumerate() {
            if r.len() != schema.len() {
                return Err(Error::RaggedRow {
                    // header is line 1
                    line: i as u64 + 2,
                    expected: schema.len(),
                    found: r.len(),
                });
            }
        }
        Ok(RawDataset {
            schema,
            rows,
            target_column: target.to_string(),
        })
    }

    /// Wraps a numeric feature matrix and textual labels.
    pub fn from_numeric(feature_names: &[String], x: &Matrix, labels: &[String], target: &str) -> Result<Self> {
        if feature_names.len() != x.cols() {
            return Err(Error::DimensionMismatch {
                expected: x.cols(),
                got: feature_names.len(),
            });
        }
        if labels.len() != x.rows() {
            return Err(Error::DimensionMismatch {
                expected: x.rows(),
                got: labels.len(),
            });
        }
        let mut schema: Vec<ColumnSchema> = feature_names
            .iter()
            .map(|n| ColumnSchema {
                name: n.clone(),
                kind: ColumnKind::Numeric,
            })
            .collect();
        schema.push(ColumnSchema {
            name: target.to_string(),
            kind: ColumnKind::Nominal,
        });
        let rows = x
            .iter_rows()
            .zip(labels)
            .map(|(r, l)| {
                let mut cells: Vec<Option<String>> = r.iter().map(|v| Some(v.to_string())).collect();
                cells.push(Some(l.clone()));
                cells
            })
            .collect();
        RawDataset::new(schema, rows, target)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.schema.iter().position(|c| c.name == name)
    }

    pub fn target_index(&self) -> usize {
        self.column_index(&self.target_column)
            .expect("target column validated at construction")
    }

    /// Feature columns: every schema column except the target.
    pub fn feature_columns(&self) -> impl Iterator<Item = (usize, &ColumnSchema)> {
        let t = self.target_index();
        self.schema.iter().enumerate().filter(move |(i, _)| *i != t)
    }

    /// Target values; a missing target cell is reported as an empty label.
    pub fn labels(&self) -> Vec<String> {
        let t = self.target_index();
        self.rows.iter().map(|r| r[t].clone().unwrap_or_default()).collect()
    }

    pub fn subset(&self, idx: &[usize]) -> RawDataset {
        RawDataset {
            schema: self.schema.clone(),
            rows: idx.iter().map(|&i| self.rows[i].clone()).collect(),
            target_column: self.target_column.clone(),
        }
    }
}

/// Loads a headered, comma-delimited file.
///
/// `target` defaults to the last column. Columns without a hint are typed
/// numeric when every non-missing cell parses as a finite number, nominal
/// otherwise.
pub fn load_csv(path: impl AsRef<Path>, target: Option<&str>, hints: &SchemaHints) -> Result<RawDataset> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file, target, hints)
}

pub fn read_csv<R: Read>(reader: R, target: Option<&str>, hints: &SchemaHints) -> Result<RawDataset> {
    let (names, rows) = read_cells(reader)?;
    let target = match target {
        Some(t) => t.to_string(),
        None => names.last().cloned().unwrap_or_default(),
    };
    if !names.contains(&target) {
        return Err(Error::MissingTarget(target));
    }
    typed(names, rows, &target, hints)
}

/// Reads rows to be scored. When the file has no `target` column an empty
/// one is appended, so labels are optional.
pub fn read_csv_unlabeled<R: Read>(reader: R, target: &str, hints: &SchemaHints) -> Result<RawDataset> {
    let (mut names, mut rows) = read_cells(reader)?;
    if !names.iter().any(|n| n == target) {
        names.push(target.to_string());
        rows.iter_mut().for_each(|r| r.push(None));
    }
    typed(names, rows, target, hints)
}

type Cells = Vec<Vec<Option<String>>>;

fn read_cells<R: Read>(reader: R) -> Result<(Vec<String>, Cells)> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut records = rdr.records();
    let header = match records.next() {
        Some(h) => h?,
        None => return Err(Error::EmptyFile),
    };
    let names: Vec<String> = header.iter().map(|s| s.trim().to_string()).collect();
    if names.is_empty() || (names.len() == 1 && names[0].is_empty()) {
        return Err(Error::EmptyFile);
    }

    let mut rows = Vec::new();
    for rec in records {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        // tolerate blank lines
        if rec.len() == 1 && rec[0].trim().is_empty() {
            continue;
        }
        if rec.len() != names.len() {
            return Err(Error::RaggedRow {
                line,
                expected: names.len(),
                found: rec.len(),
            });
        }
        rows.push(
            rec.iter()
                .map(|c| {
                    if is_missing_token(c) {
                        None
                    } else {
                        Some(c.trim().to_string())
                    }
                })
                .collect::<Vec<_>>(),
        );
    }
    Ok((names, rows))
}

fn typed(names: Vec<String>, rows: Cells, target: &str, hints: &SchemaHints) -> Result<RawDataset> {
    let schema = names
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let kind = if let Some(h) = hints.get(name) {
                h.clone()
            } else if name == target {
                ColumnKind::Nominal
            } else if rows
                .iter()
                .all(|r| r[j].as_deref().is_none_or(|s| parse_number(s).is_some()))
            {
                ColumnKind::Numeric
            } else {
                ColumnKind::Nominal
            };
            ColumnSchema {
                name: name.clone(),
                kind,
            }
        })
        .collect();
    RawDataset::new(schema, rows, target)
}
