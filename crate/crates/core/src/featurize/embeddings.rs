use std::fs;
use std::path::Path;

use crate::data::FeatureMatrix;
use crate::error::{Error, Result};

/// Load precomputed row vectors from CSV (comma-separated floats) or JSONL
/// (one JSON array per line). The format is chosen by the `.jsonl`/`.json`
/// extension; anything else is read as CSV.
pub fn load_embeddings(path: &Path, expected_rows: usize) -> Result<FeatureMatrix> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let jsonl = matches!(
        path.extension().and_then(|e| e.to_str()),
        Some("jsonl") | Some("json")
    );
    let rows = if jsonl {
        parse_jsonl_rows(&text)?
    } else {
        parse_csv_rows(&text)?
    };
    if rows.len() != expected_rows {
        return Err(Error::Shape(format!(
            "{}: expected {expected_rows} rows, found {}",
            path.display(),
            rows.len()
        )));
    }
    FeatureMatrix::from_rows(&rows)
}

fn check_finite(values: &[f64], line: usize) -> Result<()> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Value(format!("non-finite value on line {line}")));
    }
    Ok(())
}

fn parse_csv_rows(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let values = line
            .split(',')
            .map(|f| {
                f.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Value(format!("line {}: {f:?} is not a number", i + 1)))
            })
            .collect::<Result<Vec<f64>>>()?;
        check_finite(&values, i + 1)?;
        rows.push(values);
    }
    Ok(rows)
}

fn parse_jsonl_rows(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        // serde_json has no NaN literal, so non-numeric entries land here.
        let values: Vec<f64> = serde_json::from_str(line)
            .map_err(|e| Error::Value(format!("line {}: {e}", i + 1)))?;
        check_finite(&values, i + 1)?;
        rows.push(values);
    }
    Ok(rows)
}
