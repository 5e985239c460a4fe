//! Named binary columns, stored column-major.

use std::collections::{BTreeMap, HashSet};
use std::io::{Read, Write};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryDataset {
    names: Vec<String>,
    columns: Vec<Vec<u8>>,
}

impl BinaryDataset {
    /// Builds a dataset from equally long 0/1 columns with unique names.
    pub fn from_columns(names: Vec<String>, columns: Vec<Vec<u8>>) -> Result<Self> {
        if names.len() != columns.len() {
            return Err(Error::Validation(format!("{} names for {} columns", names.len(), columns.len())));
        }
        let mut seen = HashSet::new();
        for n in &names {
            if !seen.insert(n.as_str()) {
                return Err(Error::Validation(format!("duplicate column name `{n}`")));
            }
        }
        if let Some(first) = columns.first() {
            if columns.iter().any(|c| c.len() != first.len()) {
                return Err(Error::Validation("columns differ in length".into()));
            }
        }
        if columns.iter().flatten().any(|&v| v > 1) {
            return Err(Error::Validation("dataset cells must be 0 or 1".into()));
        }
        Ok(BinaryDataset { names, columns })
    }

    /// Builds a dataset from rows.
    pub fn from_rows(names: Vec<String>, rows: &[Vec<u8>]) -> Result<Self> {
        let mut columns = vec![Vec::with_capacity(rows.len()); names.len()];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != names.len() {
                return Err(Error::Validation(format!("row {i} has {} cells, expected {}", row.len(), names.len())));
            }
            for (c, &v) in row.iter().enumerate() {
                columns[c].push(v);
            }
        }
        BinaryDataset::from_columns(names, columns)
    }

    pub fn n_rows(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn n_columns(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.names.iter().position(|n| n == name).ok_or_else(|| Error::UnknownColumn(name.to_string()))
    }

    pub fn column(&self, i: usize) -> &[u8] {
        &self.columns[i]
    }

    pub fn column_by_name(&self, name: &str) -> Result<&[u8]> {
        Ok(self.column(self.column_index(name)?))
    }

    pub fn row(&self, r: usize) -> Vec<u8> {
        self.columns.iter().map(|c| c[r]).collect()
    }

    /// Every row repeated once: the original block followed by a copy.
    pub fn doubled(&self) -> Self {
        BinaryDataset {
            names: self.names.clone(),
            columns: self.columns.iter().map(|c| [c.as_slice(), c.as_slice()].concat()).collect(),
        }
    }

    /// Compresses rows into distinct bit patterns with multiplicities.
    /// Column `i` is bit `i`.
    pub fn patterns(&self) -> Result<PatternTable> {
        if self.n_columns() > 64 {
            return Err(Error::Validation("pattern tables support at most 64 columns".into()));
        }
        let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
        for r in 0..self.n_rows() {
            let mut p = 0u64;
            for (i, c) in self.columns.iter().enumerate() {
                p |= u64::from(c[r]) << i;
            }
            *counts.entry(p).or_default() += 1;
        }
        Ok(PatternTable { counts: counts.into_iter().collect() })
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(&self.names)?;
        let mut line = Vec::with_capacity(self.n_columns());
        for r in 0..self.n_rows() {
            line.clear();
            line.extend(self.columns.iter().map(|c| if c[r] == 1 { "1" } else { "0" }));
            wtr.write_record(&line)?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("csv output is utf-8")
    }

    /// Reads a header row of column names followed by 0/1 rows; at least one
    /// data row is required.
    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
        let names: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
        let mut columns = vec![Vec::new(); names.len()];
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            for (c, cell) in rec.iter().enumerate() {
                let v = match cell.trim() {
                    "0" => 0,
                    "1" => 1,
                    other => {
                        return Err(Error::Validation(format!(
                            "row {}, column `{}`: expected 0 or 1, got `{other}`",
                            i + 1,
                            names[c]
                        )))
                    }
                };
                columns[c].push(v);
            }
        }
        if columns.first().is_none_or(Vec::is_empty) {
            return Err(Error::Validation("dataset has no rows".into()));
        }
        BinaryDataset::from_columns(names, columns)
    }
}

/// Distinct row patterns with their counts, sorted by pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternTable {
    pub counts: Vec<(u64, u64)>,
}

impl PatternTable {
    pub fn total(&self) -> u64 {
        self.counts.iter().map(|(_, n)| n).sum()
    }
}
