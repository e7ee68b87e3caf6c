//! Sample containers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An `n × d` sample of finite reals, stored row-major. Each row is one
/// observation of a (possibly multivariate) variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataMatrix {
    values: Vec<f64>,
    n: usize,
    d: usize,
}

impl DataMatrix {
    /// Build from row-major values. Rejects non-finite entries and `d == 0`.
    pub fn new(values: Vec<f64>, n: usize, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        if values.len() != n * d {
            return Err(Error::LengthMismatch {
                left: values.len(),
                right: n * d,
            });
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / d,
                col: pos % d,
            });
        }
        Ok(Self { values, n, d })
    }

    /// Univariate sample.
    pub fn from_column(values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        Self::new(values, n, 1)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.first().map_or(1, Vec::len);
        let mut values = Vec::with_capacity(rows.len() * d);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != d {
                return Err(Error::Ragged {
                    row: i,
                    got: row.len(),
                    expected: d,
                });
            }
            values.extend_from_slice(row);
        }
        Self::new(values, rows.len(), d)
    }

    /// Column-wise concatenation of samples with equal `n`.
    pub fn hstack(parts: &[DataMatrix]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidParameter("nothing to stack".into()))?;
        let n = first.n;
        let mut d = 0;
        for p in parts {
            if p.n != n {
                return Err(Error::LengthMismatch {
                    left: n,
                    right: p.n,
                });
            }
            d += p.d;
        }
        let mut values = Vec::with_capacity(n * d);
        for i in 0..n {
            for p in parts {
                values.extend_from_slice(p.row(i));
            }
        }
        Ok(Self { values, n, d })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.d..(i + 1) * self.d]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.d + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, j)).collect()
    }

    pub fn columns(&self) -> Vec<Vec<f64>> {
        (0..self.d).map(|j| self.column(j)).collect()
    }

    /// Build from columns of equal length.
    pub fn from_columns(cols: &[Vec<f64>]) -> Result<Self> {
        let d = cols.len();
        let n = cols.first().map_or(0, Vec::len);
        let mut values = vec![0.0; n * d];
        for (j, c) in cols.iter().enumerate() {
            if c.len() != n {
                return Err(Error::LengthMismatch {
                    left: n,
                    right: c.len(),
                });
            }
            for (i, &v) in c.iter().enumerate() {
                values[i * d + j] = v;
            }
        }
        Self::new(values, n, d)
    }

    /// Replace row `i` (must have length `d`).
    pub fn set_row(&mut self, i: usize, row: &[f64]) -> Result<()> {
        if row.len() != self.d {
            return Err(Error::LengthMismatch {
                left: row.len(),
                right: self.d,
            });
        }
        if let Some(col) = row.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: i, col });
        }
        self.values[i * self.d..(i + 1) * self.d].copy_from_slice(row);
        Ok(())
    }

    /// Append one observation.
    pub fn push_row(&mut self, row: &[f64]) -> Result<()> {
        if row.len() != self.d {
            return Err(Error::LengthMismatch {
                left: row.len(),
                right: self.d,
            });
        }
        if let Some(col) = row.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: self.n, col });
        }
        self.values.extend_from_slice(row);
        self.n += 1;
        Ok(())
    }

    /// Rows reordered so that row `i` of the result is row `perm[i]` of `self`.
    pub fn permute_rows(&self, perm: &[usize]) -> Self {
        let mut values = Vec::with_capacity(self.values.len());
        for &p in perm {
            values.extend_from_slice(self.row(p));
        }
        Self {
            values,
            n: perm.len(),
            d: self.d,
        }
    }

    /// Apply `f` to every entry; the result must stay finite.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.values.iter().map(|&v| f(v)).collect(), self.n, self.d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_nan() {
        let err = DataMatrix::new(vec![1.0, f64::NAN, 2.0, 3.0], 2, 2).unwrap_err();
        assert_eq!(err, Error::NonFinite { row: 0, col: 1 });
    }

    #[test]
    fn rejects_infinity_on_push() {
        let mut m = DataMatrix::from_column(vec![1.0, 2.0]).unwrap();
        assert!(m.push_row(&[f64::INFINITY]).is_err());
        assert_eq!(m.n(), 2);
    }

    #[test]
    fn hstack_interleaves_rows() {
        let a = DataMatrix::from_column(vec![1.0, 2.0]).unwrap();
        let b = DataMatrix::from_rows(&[vec![10.0, 11.0], vec![20.0, 21.0]]).unwrap();
        let c = DataMatrix::hstack(&[a, b]).unwrap();
        assert_eq!(c.dim(), 3);
        assert_eq!(c.row(1), &[2.0, 20.0, 21.0]);
    }

    #[test]
    fn columns_round_trip() {
        let m = DataMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]]).unwrap();
        let back = DataMatrix::from_columns(&m.columns()).unwrap();
        assert_eq!(m, back);
    }
}
