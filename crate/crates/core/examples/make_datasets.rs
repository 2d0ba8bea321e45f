//! Regenerates the synthetic part of the bundled benchmark suite.
//!
//! Usage: cargo run -p pdc-core --example make_datasets -- data/benchmark

use std::path::{Path, PathBuf};

use pdc_core::data::synthetic::{self, Synthetic};

fn write(dir: &Path, name: &str, s: &Synthetic) -> std::io::Result<()> {
    let path = dir.join(format!("{name}.csv"));
    let mut w = csv::Writer::from_path(&path)?;
    let mut header: Vec<String> = (0..s.x.cols()).map(|j| format!("x{j}")).collect();
    header.push("label".into());
    w.write_record(&header)?;
    for (row, &y) in s.x.iter_rows().zip(&s.y) {
        let mut rec: Vec<String> = row.iter().map(|v| format!("{v:.6}")).collect();
        rec.push(format!("c{y}"));
        w.write_record(&rec)?;
    }
    w.flush()?;
    println!("{} ({} rows)", path.display(), s.y.len());
    Ok(())
}

fn main() -> std::io::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "data/benchmark".into()));
    std::fs::create_dir_all(&dir)?;
    write(&dir, "synth_moons_low_noise", &synthetic::moons(300, 0.2, 101))?;
    write(&dir, "synth_moons_high_noise", &synthetic::moons(240, 0.4, 102))?;
    write(&dir, "synth_circles_low_noise", &synthetic::circles(300, 0.1, 0.5, 103))?;
    write(
        &dir,
        "synth_circles_high_noise",
        &synthetic::circles(240, 0.2, 0.6, 104),
    )?;
    let centers = [[0.0, 0.0], [2.0, 0.0], [1.0, 1.7]];
    write(&dir, "synth_blobs_three", &synthetic::blobs(300, &centers, 0.9, 105))?;
    write(&dir, "synth_xor", &synthetic::xor(240, 0.1, 106))?;
    Ok(())
}
