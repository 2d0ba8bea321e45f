//! Dataset ingestion and the preprocessing pipeline.

mod preprocess;
mod prior;
mod raw;
pub mod synthetic;

pub use preprocess::{FeatureEncoder, Preprocessor, ProcessedDataset};
pub use prior::ClassPrior;
pub use raw::{load_csv, read_csv, read_csv_unlabeled, ColumnKind, ColumnSchema, RawDataset, SchemaHints};
