use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{CliError, CliResult};

/// Fixed nine-decimal rendering used for every probability and score.
pub fn fmt9(v: f64) -> String {
    format!("{v:.9}")
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> CliResult<()> {
    let f = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = BufWriter::new(f);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n").map_err(|e| CliError::io(path, e))?;
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn csv_file(path: &Path) -> CliResult<csv::Writer<File>> {
    let f = File::create(path).map_err(|e| CliError::io(path, e))?;
    Ok(csv::Writer::from_writer(f))
}

pub fn ensure_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

/// `model.json` -> `model.manifest.json`.
pub fn manifest_path_for(out: &Path) -> PathBuf {
    out.with_extension("manifest.json")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_digits_half_even() {
        assert_eq!(fmt9(1.0 / 3.0), "0.333333333");
        assert_eq!(fmt9(0.0), "0.000000000");
        assert_eq!(fmt9(1.0), "1.000000000");
        // exactly representable ties round to even
        assert_eq!(format!("{:.1}", 0.25), "0.2");
        assert_eq!(format!("{:.2}", 0.125), "0.12");
    }

    #[test]
    fn manifest_name() {
        assert_eq!(
            manifest_path_for(Path::new("out/model.json")),
            PathBuf::from("out/model.manifest.json")
        );
    }
}
