//! In-memory dataset: a named relation over typed columns. Numeric cells are
//! `f64`, nominal cells are indices into the attribute's declared domain, so
//! rows stay compact and symbol typos are impossible after construction.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DataError {
    #[error("row {row}: expected {expected} values, got {got}")]
    ArityMismatch { row: usize, expected: usize, got: usize },
    #[error("row {row}, attribute {attr:?}: value kind does not match")]
    KindMismatch { row: usize, attr: String },
    #[error("row {row}, attribute {attr:?}: symbol index {index} out of range")]
    SymbolOutOfRange { row: usize, attr: String, index: usize },
    #[error("row {row}, attribute {attr:?}: non-finite numeric value")]
    NonFinite { row: usize, attr: String },
    #[error("duplicate attribute name {0:?}")]
    DuplicateAttr(String),
    #[error("unknown attribute {0:?}")]
    UnknownAttr(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum AttrKind {
    Numeric,
    Nominal(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Attr {
    pub name: String,
    pub kind: AttrKind,
}

impl Attr {
    pub fn numeric(name: impl Into<String>) -> Attr {
        Attr { name: name.into(), kind: AttrKind::Numeric }
    }

    pub fn nominal(name: impl Into<String>, values: &[&str]) -> Attr {
        Attr {
            name: name.into(),
            kind: AttrKind::Nominal(values.iter().map(|v| v.to_string()).collect()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Value {
    Num(f64),
    Sym(usize),
}

impl Value {
    pub fn as_num(self) -> Option<f64> {
        match self {
            Value::Num(x) => Some(x),
            Value::Sym(_) => None,
        }
    }

    pub fn as_sym(self) -> Option<usize> {
        match self {
            Value::Sym(i) => Some(i),
            Value::Num(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub relation: String,
    pub attrs: Vec<Attr>,
    pub rows: Vec<Vec<Value>>,
}

impl Dataset {
    pub fn new(relation: impl Into<String>, attrs: Vec<Attr>) -> Result<Dataset, DataError> {
        for (i, a) in attrs.iter().enumerate() {
            if attrs[..i].iter().any(|b| b.name == a.name) {
                return Err(DataError::DuplicateAttr(a.name.clone()));
            }
        }
        Ok(Dataset { relation: relation.into(), attrs, rows: Vec::new() })
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn attr_index(&self, name: &str) -> Result<usize, DataError> {
        self.attrs
            .iter()
            .position(|a| a.name == name)
            .ok_or_else(|| DataError::UnknownAttr(name.to_string()))
    }

    fn check_row(&self, row_no: usize, row: &[Value]) -> Result<(), DataError> {
        if row.len() != self.attrs.len() {
            return Err(DataError::ArityMismatch {
                row: row_no,
                expected: self.attrs.len(),
                got: row.len(),
            });
        }
        for (attr, value) in self.attrs.iter().zip(row) {
            match (&attr.kind, value) {
                (AttrKind::Numeric, Value::Num(x)) => {
                    if !x.is_finite() {
                        return Err(DataError::NonFinite { row: row_no, attr: attr.name.clone() });
                    }
                }
                (AttrKind::Nominal(domain), Value::Sym(i)) => {
                    if *i >= domain.len() {
                        return Err(DataError::SymbolOutOfRange {
                            row: row_no,
                            attr: attr.name.clone(),
                            index: *i,
                        });
                    }
                }
                _ => {
                    return Err(DataError::KindMismatch { row: row_no, attr: attr.name.clone() })
                }
            }
        }
        Ok(())
    }

    pub fn push_row(&mut self, row: Vec<Value>) -> Result<(), DataError> {
        self.check_row(self.rows.len(), &row)?;
        self.rows.push(row);
        Ok(())
    }

    /// Re-checks every stored row against the schema.
    pub fn validate(&self) -> Result<(), DataError> {
        for (i, row) in self.rows.iter().enumerate() {
            self.check_row(i, row)?;
        }
        Ok(())
    }

    /// A new dataset keeping only the attributes at `keep`, in that order.
    pub fn project(&self, keep: &[usize]) -> Dataset {
        Dataset {
            relation: self.relation.clone(),
            attrs: keep.iter().map(|&j| self.attrs[j].clone()).collect(),
            rows: self
                .rows
                .iter()
                .map(|row| keep.iter().map(|&j| row[j]).collect())
                .collect(),
        }
    }

    pub fn numeric_column(&self, j: usize) -> impl Iterator<Item = f64> + '_ {
        self.rows.iter().filter_map(move |row| row[j].as_num())
    }

    /// Population variance of a numeric column; 0.0 when empty.
    pub fn numeric_variance(&self, j: usize) -> f64 {
        let n = self.rows.len();
        if n == 0 {
            return 0.0;
        }
        let mean = self.numeric_column(j).sum::<f64>() / n as f64;
        self.numeric_column(j).map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64
    }

    /// Occurrence counts per domain value of a nominal column.
    pub fn nominal_counts(&self, j: usize) -> Vec<usize> {
        let size = match &self.attrs[j].kind {
            AttrKind::Nominal(domain) => domain.len(),
            AttrKind::Numeric => 0,
        };
        let mut counts = vec![0usize; size];
        for row in &self.rows {
            if let Value::Sym(i) = row[j] {
                counts[i] += 1;
            }
        }
        counts
    }

    /// Share of rows taken by the most common value of a nominal column;
    /// 0.0 when the dataset is empty.
    pub fn nominal_dominance(&self, j: usize) -> f64 {
        if self.rows.is_empty() {
            return 0.0;
        }
        let top = self.nominal_counts(j).into_iter().max().unwrap_or(0);
        top as f64 / self.rows.len() as f64
    }
}
