//! Dataset CSV files: header `f0,…,f{d-1},label`, one row per point.

use std::io::{Read, Write};
use std::path::Path;

use genresub_core::LabeledDataset;

use crate::AppError;

pub fn write_dataset<W: Write>(ds: &LabeledDataset, out: W) -> Result<(), AppError> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = (0..ds.dim()).map(|k| format!("f{k}")).collect();
    header.push("label".into());
    w.write_record(&header)?;
    for (x, y) in ds.points() {
        let mut row: Vec<String> = x.iter().map(|v| format!("{v:?}")).collect();
        row.push(y.to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_dataset_file(ds: &LabeledDataset, path: &Path) -> Result<(), AppError> {
    let f = std::fs::File::create(path)
        .map_err(|e| AppError::Io(format!("{}: {e}", path.display())))?;
    write_dataset(ds, std::io::BufWriter::new(f))
}

/// Reads a dataset; the class count is `max(min_classes, max label + 1)`.
pub fn read_dataset<R: Read>(input: R, min_classes: usize) -> Result<LabeledDataset, AppError> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    let d = header
        .len()
        .checked_sub(1)
        .filter(|&d| d > 0)
        .ok_or_else(|| AppError::Io("dataset needs at least one feature column".into()))?;
    for (k, name) in header.iter().enumerate() {
        let expected = if k == d {
            "label".to_string()
        } else {
            format!("f{k}")
        };
        if name.trim() != expected {
            return Err(AppError::Io(format!(
                "unexpected column `{name}`, expected `{expected}`"
            )));
        }
    }
    let mut features = Vec::new();
    let mut labels = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let bad = |what: &str| AppError::Io(format!("row {}: invalid {what}", line + 1));
        for v in rec.iter().take(d) {
            features.push(v.trim().parse::<f64>().map_err(|_| bad("feature"))?);
        }
        labels.push(
            rec.get(d)
                .ok_or_else(|| bad("label"))?
                .trim()
                .parse::<usize>()
                .map_err(|_| bad("label"))?,
        );
    }
    let classes = labels
        .iter()
        .max()
        .map_or(0, |m| m + 1)
        .max(min_classes)
        .max(2);
    LabeledDataset::new(d, features, labels, classes).map_err(|e| AppError::Io(e.to_string()))
}

pub fn read_dataset_file(path: &Path, min_classes: usize) -> Result<LabeledDataset, AppError> {
    let f =
        std::fs::File::open(path).map_err(|e| AppError::Io(format!("{}: {e}", path.display())))?;
    read_dataset(std::io::BufReader::new(f), min_classes)
}
