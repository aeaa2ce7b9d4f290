//! Row-major sparse matrices with exact entries.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::scalar::{Field, Scalar};

/// A sparse `rows × cols` matrix over ℚ or ℚ(i).
///
/// Each row is a list of `(column, value)` pairs sorted by column. Zero
/// values are never stored and every column index is in bounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseExactMatrix {
    field: Field,
    cols: usize,
    rows: Vec<Vec<(usize, Scalar)>>,
}

impl SparseExactMatrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        SparseExactMatrix {
            field,
            cols,
            rows: vec![Vec::new(); rows],
        }
    }

    pub fn from_dense(field: Field, cols: usize, dense: &[Vec<Scalar>]) -> Result<Self> {
        let mut m = SparseExactMatrix::zeros(field, 0, cols);
        for row in dense {
            if row.len() != cols {
                return Err(Error::MismatchedVectors {
                    expected: cols,
                    found: row.len(),
                });
            }
            m.push_row(row.iter().cloned().enumerate().collect())?;
        }
        Ok(m)
    }

    /// Appends a row given as `(column, value)` pairs in any order. Zeros are
    /// dropped; repeated or out-of-range columns are rejected.
    pub fn push_row(&mut self, mut entries: Vec<(usize, Scalar)>) -> Result<()> {
        entries.retain(|(_, v)| !v.is_zero());
        entries.sort_by_key(|(c, _)| *c);
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::Invariant(format!("repeated column {} in row", w[0].0)));
            }
        }
        if let Some((c, _)) = entries.last() {
            if *c >= self.cols {
                return Err(Error::Invariant(format!(
                    "column {c} out of range for {} columns",
                    self.cols
                )));
            }
        }
        self.rows.push(entries);
        Ok(())
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[(usize, Scalar)] {
        &self.rows[r]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[(usize, Scalar)]> {
        self.rows.iter().map(Vec::as_slice)
    }

    pub fn get(&self, r: usize, c: usize) -> Scalar {
        match self.rows[r].binary_search_by_key(&c, |(k, _)| *k) {
            Ok(k) => self.rows[r][k].1.clone(),
            Err(_) => Scalar::zero(),
        }
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.nnz() == 0
    }

    pub fn transpose(&self) -> Self {
        let mut rows = vec![Vec::new(); self.cols];
        for (r, row) in self.rows.iter().enumerate() {
            for (c, v) in row {
                rows[*c].push((r, v.clone()));
            }
        }
        SparseExactMatrix {
            field: self.field,
            cols: self.rows.len(),
            rows,
        }
    }

    /// Keeps the listed columns, renumbered `0..cols.len()` in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let mut map = vec![None; self.cols];
        for (new, &old) in cols.iter().enumerate() {
            map[old] = Some(new);
        }
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut out: Vec<(usize, Scalar)> = row
                    .iter()
                    .filter_map(|(c, v)| map[*c].map(|n| (n, v.clone())))
                    .collect();
                out.sort_by_key(|(c, _)| *c);
                out
            })
            .collect();
        SparseExactMatrix {
            field: self.field,
            cols: cols.len(),
            rows,
        }
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        SparseExactMatrix {
            field: self.field,
            cols: self.cols,
            rows: rows.iter().map(|&r| self.rows[r].clone()).collect(),
        }
    }

    pub fn scale_row(&mut self, r: usize, by: &Scalar) {
        assert!(!by.is_zero(), "row scaling by zero");
        for (_, v) in &mut self.rows[r] {
            *v = &*v * by;
        }
    }

    pub fn mul(&self, rhs: &SparseExactMatrix) -> Result<SparseExactMatrix> {
        if self.cols != rhs.nrows() {
            return Err(Error::MismatchedVectors {
                expected: self.cols,
                found: rhs.nrows(),
            });
        }
        let field = if self.field == Field::Gaussian || rhs.field == Field::Gaussian {
            Field::Gaussian
        } else {
            Field::Rational
        };
        let mut out = SparseExactMatrix::zeros(field, 0, rhs.ncols());
        for row in &self.rows {
            let mut acc = vec![Scalar::zero(); rhs.ncols()];
            for (k, a) in row {
                for (c, b) in rhs.row(*k) {
                    acc[*c] = &acc[*c] + &(a * b);
                }
            }
            out.push_row(acc.into_iter().enumerate().collect())?;
        }
        Ok(out)
    }

    /// Support size of each row.
    pub fn row_supports(&self) -> Vec<usize> {
        self.rows.iter().map(Vec::len).collect()
    }

    /// Sorted row indices of the nonzero entries of each column.
    pub fn column_supports(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.cols];
        for (r, row) in self.rows.iter().enumerate() {
            for (c, _) in row {
                out[*c].push(r);
            }
        }
        out
    }

    /// Plain-text export: a `m n field` header, then one `row col value` line
    /// per nonzero entry, 0-based indices, row-major.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {} {}\n", self.nrows(), self.ncols(), self.field);
        for (r, row) in self.rows.iter().enumerate() {
            for (c, v) in row {
                let _ = writeln!(s, "{r} {c} {v}");
            }
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Format("empty matrix text".into()))?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        let [m, n, field] = parts[..] else {
            return Err(Error::Format(format!("bad matrix header {header:?}")));
        };
        let parse_idx = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| Error::Format(format!("bad index {s:?}")))
        };
        let (m, n, field) = (parse_idx(m)?, parse_idx(n)?, field.parse::<Field>()?);
        let mut rows: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); m];
        for line in lines {
            let parts: Vec<&str> = line.split_whitespace().collect();
            let [r, c, v] = parts[..] else {
                return Err(Error::Format(format!("bad matrix entry {line:?}")));
            };
            let r = parse_idx(r)?;
            if r >= m {
                return Err(Error::Format(format!("row {r} out of range")));
            }
            rows[r].push((parse_idx(c)?, v.parse()?));
        }
        let mut out = SparseExactMatrix::zeros(field, 0, n);
        for row in rows {
            out.push_row(row)?;
        }
        Ok(out)
    }
}
