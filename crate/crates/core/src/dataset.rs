//! Named real-valued columns of equal length.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use std::io::Write;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum DatasetError {
    #[error("dataset must have at least one row")]
    Empty,
    #[error("column `{name}` has {got} rows, expected {expected}")]
    LengthMismatch { name: String, got: usize, expected: usize },
    #[error("duplicate column `{0}`")]
    DuplicateColumn(String),
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("row index {index} out of range for {n_rows} rows")]
    RowOutOfRange { index: usize, n_rows: usize },
}

/// A table of named columns, each holding `n_rows` observations.
///
/// The seed the data were generated from is carried along so downstream
/// reports can echo it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    columns: IndexMap<String, Vec<f64>>,
    n_rows: usize,
    seed: u64,
}

impl Dataset {
    pub fn from_columns<S: Into<String>>(columns: impl IntoIterator<Item = (S, Vec<f64>)>, seed: u64) -> Result<Self, DatasetError> {
        let mut map = IndexMap::new();
        let mut n_rows = None;
        for (name, values) in columns {
            let name = name.into();
            let expected = *n_rows.get_or_insert(values.len());
            if values.len() != expected {
                return Err(DatasetError::LengthMismatch { name, got: values.len(), expected });
            }
            if map.contains_key(&name) {
                return Err(DatasetError::DuplicateColumn(name));
            }
            map.insert(name, values);
        }
        match n_rows {
            Some(n) if n > 0 => Ok(Self { columns: map, n_rows: n, seed }),
            _ => Err(DatasetError::Empty),
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.columns.keys().map(String::as_str)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.columns.contains_key(name)
    }

    pub fn column(&self, name: &str) -> Result<&[f64], DatasetError> {
        self.columns.get(name).map(Vec::as_slice).ok_or_else(|| DatasetError::MissingColumn(name.to_string()))
    }

    pub fn add_column(&mut self, name: impl Into<String>, values: Vec<f64>) -> Result<(), DatasetError> {
        let name = name.into();
        if values.len() != self.n_rows {
            return Err(DatasetError::LengthMismatch { name, got: values.len(), expected: self.n_rows });
        }
        if self.columns.contains_key(&name) {
            return Err(DatasetError::DuplicateColumn(name));
        }
        self.columns.insert(name, values);
        Ok(())
    }

    /// New dataset with the given rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Result<Self, DatasetError> {
        if rows.is_empty() {
            return Err(DatasetError::Empty);
        }
        if let Some(&bad) = rows.iter().find(|&&r| r >= self.n_rows) {
            return Err(DatasetError::RowOutOfRange { index: bad, n_rows: self.n_rows });
        }
        let columns = self.columns.iter().map(|(k, v)| (k.clone(), rows.iter().map(|&r| v[r]).collect())).collect();
        Ok(Self { columns, n_rows: rows.len(), seed: self.seed })
    }

    /// Row-major copy of the named columns.
    pub fn row_major<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<f64>, DatasetError> {
        let cols = names.iter().map(|n| self.column(n.as_ref())).collect::<Result<Vec<_>, _>>()?;
        let mut out = Vec::with_capacity(self.n_rows * cols.len());
        for r in 0..self.n_rows {
            out.extend(cols.iter().map(|c| c[r]));
        }
        Ok(out)
    }

    /// Write as CSV with a header row.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(self.columns.keys())?;
        for r in 0..self.n_rows {
            w.write_record(self.columns.values().map(|c| c[r].to_string()))?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_ragged_and_duplicate_columns() {
        let err = Dataset::from_columns([("a", vec![1.0, 2.0]), ("b", vec![1.0])], 0).unwrap_err();
        assert!(matches!(err, DatasetError::LengthMismatch { .. }));
        let err = Dataset::from_columns([("a", vec![1.0]), ("a", vec![2.0])], 0).unwrap_err();
        assert_eq!(err, DatasetError::DuplicateColumn("a".into()));
        let err = Dataset::from_columns([("a", Vec::<f64>::new())], 0).unwrap_err();
        assert_eq!(err, DatasetError::Empty);
    }

    #[test]
    fn row_major_and_selection() {
        let d = Dataset::from_columns([("a", vec![1.0, 2.0, 3.0]), ("b", vec![4.0, 5.0, 6.0])], 9).unwrap();
        assert_eq!(d.row_major(&["b", "a"]).unwrap(), vec![4.0, 1.0, 5.0, 2.0, 6.0, 3.0]);
        let s = d.select_rows(&[2, 0]).unwrap();
        assert_eq!(s.column("a").unwrap(), &[3.0, 1.0]);
        assert_eq!(s.seed(), 9);
        assert!(d.select_rows(&[3]).is_err());
    }

    #[test]
    fn csv_has_header() {
        let d = Dataset::from_columns([("a", vec![1.5]), ("b", vec![-2.0])], 0).unwrap();
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "a,b\n1.5,-2\n");
    }
}
