//! CSV ingestion with categorical recoding, and the matching writer.
//!
//! Categorical columns expand to one indicator column per observed level
//! minus a reference level (the lexicographically first). Indicator columns
//! are named `column=level`. Row order is preserved. The response is read as
//! numeric; a response taking only values {0, 1} yields a classification
//! dataset, anything else a regression dataset.

use std::collections::BTreeSet;
use std::path::Path;

use ndarray::{Array1, Array2};

use super::{Dataset, Task};
use crate::error::{Error, Result};

pub fn load_csv(path: impl AsRef<Path>, response: &str, categorical: &[String]) -> Result<Dataset> {
    let path = path.as_ref();
    if !path.exists() {
        return Err(Error::FileNotFound(path.display().to_string()));
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let headers: Vec<String> = reader.headers()?.iter().map(|h| h.to_string()).collect();

    let response_idx = headers
        .iter()
        .position(|h| h == response)
        .ok_or_else(|| Error::MissingColumn(response.to_string()))?;
    for c in categorical {
        if !headers.contains(c) {
            return Err(Error::MissingColumn(c.clone()));
        }
    }
    let is_categorical: Vec<bool> = headers.iter().map(|h| categorical.contains(h)).collect();

    let mut rows: Vec<Vec<String>> = Vec::new();
    for record in reader.records() {
        let record = record?;
        rows.push(record.iter().map(|c| c.to_string()).collect());
    }
    if rows.is_empty() {
        return Err(Error::EmptyData(path.display().to_string()));
    }
    let n = rows.len();

    // Observed level sets for categorical columns, ordered lexicographically.
    let mut levels: Vec<Option<Vec<String>>> = vec![None; headers.len()];
    for (idx, header_levels) in levels.iter_mut().enumerate() {
        if idx == response_idx || !is_categorical[idx] {
            continue;
        }
        let set: BTreeSet<String> = rows.iter().map(|r| r[idx].clone()).collect();
        *header_levels = Some(set.into_iter().collect());
    }

    // Expanded predictor layout: numeric columns keep their name, each
    // categorical contributes |levels|−1 indicators (reference = first).
    let mut column_names: Vec<String> = Vec::new();
    for (idx, header) in headers.iter().enumerate() {
        if idx == response_idx {
            continue;
        }
        match &levels[idx] {
            None => column_names.push(header.clone()),
            Some(lv) => {
                for level in lv.iter().skip(1) {
                    column_names.push(format!("{header}={level}"));
                }
            }
        }
    }
    let p = column_names.len();
    if p == 0 {
        return Err(Error::EmptyData(format!(
            "{}: no predictor columns",
            path.display()
        )));
    }

    let parse_cell = |cell: &str, row: usize, column: &str| -> Result<f64> {
        let v: f64 = cell.parse().map_err(|_| Error::UnparsableCell {
            row,
            column: column.to_string(),
            value: cell.to_string(),
        })?;
        if !v.is_finite() {
            return Err(Error::NonFiniteCell {
                row,
                column: column.to_string(),
            });
        }
        Ok(v)
    };

    let mut x = Array2::<f64>::zeros((n, p));
    let mut y = Array1::<f64>::zeros(n);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != headers.len() {
            return Err(Error::UnparsableCell {
                row: i + 1,
                column: format!("(expected {} fields, found {})", headers.len(), row.len()),
                value: String::new(),
            });
        }
        y[i] = parse_cell(&row[response_idx], i + 1, response)?;
        let mut out_col = 0usize;
        for (idx, header) in headers.iter().enumerate() {
            if idx == response_idx {
                continue;
            }
            match &levels[idx] {
                None => {
                    x[(i, out_col)] = parse_cell(&row[idx], i + 1, header)?;
                    out_col += 1;
                }
                Some(lv) => {
                    for level in lv.iter().skip(1) {
                        x[(i, out_col)] = if &row[idx] == level { 1.0 } else { 0.0 };
                        out_col += 1;
                    }
                }
            }
        }
    }

    let task = if y.iter().all(|&v| v == 0.0 || v == 1.0) {
        Task::Classification
    } else {
        Task::Regression
    };
    Dataset::new(x, y, column_names, response, task)
}

/// Write a dataset back to CSV (predictors, then the response column).
/// Values are written in shortest round-trip form, so load → save → load
/// reproduces the dataset exactly.
pub fn save_csv(d: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut writer = csv::Writer::from_path(path)?;
    let mut header: Vec<String> = d.column_names().to_vec();
    header.push(d.response_name().to_string());
    writer.write_record(&header)?;
    for i in 0..d.n() {
        let mut record: Vec<String> = d.x().row(i).iter().map(|v| format!("{v}")).collect();
        record.push(format!("{}", d.y()[i]));
        writer.write_record(&record)?;
    }
    writer.flush().map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    Ok(())
}
