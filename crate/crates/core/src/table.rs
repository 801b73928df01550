//! Questionnaire tables: one column per item, one row per respondent, `NA` for
//! missing answers.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::rating::{RatingSample, RatingScale};

pub const MISSING: &str = "NA";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatingsTable {
    item_names: Vec<String>,
    rows: Vec<Vec<Option<usize>>>,
    m: usize,
}

impl RatingsTable {
    pub fn new(item_names: Vec<String>, rows: Vec<Vec<Option<usize>>>, m: usize) -> Result<Self> {
        for (i, row) in rows.iter().enumerate() {
            if row.len() != item_names.len() {
                return Err(Error::LengthMismatch {
                    expected: item_names.len(),
                    found: row.len(),
                });
            }
            for (j, v) in row.iter().enumerate() {
                if let Some(r) = *v {
                    if r == 0 || r > m {
                        return Err(Error::CellOutOfRange {
                            row: i + 1,
                            column: j + 1,
                            item: item_names[j].clone(),
                            value: r as i64,
                            m,
                        });
                    }
                }
            }
        }
        Ok(Self { item_names, rows, m })
    }

    /// Builds a table from complete per-item samples of equal length.
    pub fn from_samples(item_names: Vec<String>, samples: &[RatingSample]) -> Result<Self> {
        let first = samples.first().ok_or(Error::NoDataRows)?;
        let n = first.n();
        if let Some(s) = samples.iter().find(|s| s.n() != n) {
            return Err(Error::LengthMismatch {
                expected: n,
                found: s.n(),
            });
        }
        let rows = (0..n)
            .map(|j| samples.iter().map(|s| Some(s.ratings()[j])).collect())
            .collect();
        Self::new(item_names, rows, first.m())
    }

    pub fn from_reader<R: Read>(reader: R, scale: &RatingScale) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let item_names: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
        if item_names.is_empty() || item_names.iter().all(String::is_empty) {
            return Err(Error::NoDataRows);
        }
        let m = scale.m();
        let mut rows = Vec::new();
        for (i, record) in rdr.records().enumerate() {
            let record = record?;
            let row_no = i + 1;
            if record.len() != item_names.len() {
                return Err(Error::MalformedCell {
                    row: row_no,
                    column: record.len().min(item_names.len()) + 1,
                    value: format!("expected {} fields, found {}", item_names.len(), record.len()),
                });
            }
            let row = record
                .iter()
                .enumerate()
                .map(|(j, cell)| parse_cell(cell, row_no, j + 1, &item_names[j], m))
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(Error::NoDataRows);
        }
        Ok(Self { item_names, rows, m })
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(writer);
        w.write_record(&self.item_names)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| match v {
                Some(r) => r.to_string(),
                None => MISSING.to_string(),
            }))?;
        }
        w.flush().map_err(|source| Error::Io {
            path: "<csv output>".into(),
            source,
        })?;
        Ok(())
    }

    pub fn item_names(&self) -> &[String] {
        &self.item_names
    }

    pub fn n_items(&self) -> usize {
        self.item_names.len()
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn rows(&self) -> &[Vec<Option<usize>>] {
        &self.rows
    }

    /// Non-missing ratings of item `k`.
    pub fn item_sample(&self, k: usize) -> Result<RatingSample> {
        let ratings: Vec<usize> = self.rows.iter().filter_map(|row| row[k]).collect();
        if ratings.is_empty() {
            return Err(Error::EmptySample);
        }
        Ok(RatingSample::from_checked(ratings, self.m))
    }

    /// Rows with no missing item (listwise deletion).
    pub fn complete_rows(&self) -> Vec<Vec<usize>> {
        self.rows
            .iter()
            .filter_map(|row| row.iter().copied().collect::<Option<Vec<_>>>())
            .collect()
    }

    /// Reflects every rating (`r -> m - r + 1`).
    pub fn reversed(&self) -> Self {
        let rows = self
            .rows
            .iter()
            .map(|row| row.iter().map(|v| v.map(|r| self.m + 1 - r)).collect())
            .collect();
        Self {
            item_names: self.item_names.clone(),
            rows,
            m: self.m,
        }
    }
}

fn parse_cell(cell: &str, row: usize, column: usize, item: &str, m: usize) -> Result<Option<usize>> {
    if cell == MISSING {
        return Ok(None);
    }
    let value: i64 = cell.parse().map_err(|_| Error::MalformedCell {
        row,
        column,
        value: cell.to_owned(),
    })?;
    if value < 1 || value as usize > m {
        return Err(Error::CellOutOfRange {
            row,
            column,
            item: item.to_owned(),
            value,
            m,
        });
    }
    Ok(Some(value as usize))
}

pub fn ingest_csv(path: impl AsRef<Path>, scale: &RatingScale) -> Result<RatingsTable> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    RatingsTable::from_reader(file, scale)
}
