use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

use crate::error::{Error, Result};
use crate::solvers::fmt_f64;

fn csv_writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(BufWriter::new(File::create(path)?)))
}

/// Writes a row-major `h × w` grid, one CSV row per grid row, no header.
pub fn write_grid_csv(path: &Path, values: &[f64], h: usize, w: usize) -> Result<()> {
    if values.len() != h * w {
        return Err(Error::DimensionMismatch {
            expected: h * w,
            got: values.len(),
        });
    }
    let mut out = csv_writer(path)?;
    for row in values.chunks(w.max(1)) {
        out.write_record(row.iter().map(|v| fmt_f64(*v)))?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a grid written by [`write_grid_csv`]; returns `(values, h, w)`.
pub fn read_grid_csv(path: &Path) -> Result<(Vec<f64>, usize, usize)> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_path(path)?;
    let mut values = Vec::new();
    let mut h = 0;
    let mut w = 0;
    for rec in rdr.records() {
        let rec = rec?;
        if h == 0 {
            w = rec.len();
        }
        h += 1;
        for field in rec.iter() {
            values.push(
                field.trim().parse::<f64>().map_err(|e| {
                    Error::InvalidParameter(format!("bad grid value {field:?}: {e}"))
                })?,
            );
        }
    }
    if values.len() != h * w {
        return Err(Error::InvalidSize(format!(
            "ragged grid in {}",
            path.display()
        )));
    }
    Ok((values, h, w))
}

/// Reads the `rel_err` column of a trace CSV; empty fields are rejected.
pub fn read_trace_rel_errs(path: &Path) -> Result<Vec<f64>> {
    let mut rdr = csv::Reader::from_path(path)?;
    let col = rdr
        .headers()?
        .iter()
        .position(|h| h == "rel_err")
        .ok_or_else(|| {
            Error::InvalidParameter(format!("{} has no rel_err column", path.display()))
        })?;
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let field = rec.get(col).unwrap_or("").trim();
        if field.is_empty() {
            return Err(Error::InvalidParameter(format!(
                "row {i} of {} has no relative error",
                path.display()
            )));
        }
        out.push(field.parse::<f64>().map_err(|e| {
            Error::InvalidParameter(format!("bad rel_err {field:?} in row {i}: {e}"))
        })?);
    }
    Ok(out)
}

/// Writes `text` to `path`, creating parent directories.
pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, text)?;
    Ok(())
}

/// `x` multiplied by the sign that brings it closest to `truth`.
pub fn align_sign(x: &[f64], truth: &[f64]) -> Vec<f64> {
    let dot: f64 = x.iter().zip(truth).map(|(a, b)| a * b).sum();
    let s = if dot < 0.0 { -1.0 } else { 1.0 };
    x.iter().map(|v| s * v).collect()
}
