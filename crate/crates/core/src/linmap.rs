use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{NormError, Result};

/// A linear map on `R^n`, stored as an `n × n` matrix acting on column vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearMap(DMatrix<f64>);

impl LinearMap {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(NormError::InvalidParameter("empty matrix".into()));
        }
        for r in rows {
            if r.len() != n {
                return Err(NormError::InvalidParameter(format!(
                    "matrix must be square: row of length {} in a {n}-row matrix",
                    r.len()
                )));
            }
            if r.iter().any(|x| !x.is_finite()) {
                return Err(NormError::InvalidParameter(
                    "non-finite matrix entry".into(),
                ));
            }
        }
        Ok(LinearMap(DMatrix::from_fn(n, n, |i, j| rows[i][j])))
    }

    pub fn from_matrix(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() || m.nrows() == 0 {
            return Err(NormError::InvalidParameter("matrix must be square".into()));
        }
        if m.iter().any(|x| !x.is_finite()) {
            return Err(NormError::InvalidParameter(
                "non-finite matrix entry".into(),
            ));
        }
        Ok(LinearMap(m))
    }

    pub fn identity(n: usize) -> Self {
        LinearMap(DMatrix::identity(n, n))
    }

    pub fn diagonal(d: &[f64]) -> Self {
        LinearMap(DMatrix::from_diagonal(&DVector::from_column_slice(d)))
    }

    /// Rotation by `angle` in the plane of coordinates 0 and 1.
    pub fn rotation(n: usize, angle: f64) -> Self {
        let mut m = DMatrix::identity(n, n);
        let (s, c) = angle.sin_cos();
        m[(0, 0)] = c;
        m[(0, 1)] = -s;
        m[(1, 0)] = s;
        m[(1, 1)] = c;
        LinearMap(m)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim())
            .map(|i| self.0.row(i).iter().copied().collect())
            .collect()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut out = vec![0.0; n];
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (j, xj) in x.iter().enumerate() {
                acc += self.0[(i, j)] * xj;
            }
            *o = acc;
        }
        out
    }

    /// `self · other` (apply `other` first).
    pub fn compose(&self, other: &LinearMap) -> LinearMap {
        LinearMap(&self.0 * &other.0)
    }

    pub fn add(&self, other: &LinearMap) -> LinearMap {
        LinearMap(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &LinearMap) -> LinearMap {
        LinearMap(&self.0 - &other.0)
    }

    pub fn scaled(&self, s: f64) -> LinearMap {
        LinearMap(&self.0 * s)
    }

    pub fn frobenius(&self) -> f64 {
        self.0.norm()
    }

    pub fn determinant(&self) -> f64 {
        self.0.determinant()
    }

    /// `|det| > 1e-12 · ‖A‖_F^n`.
    pub fn is_invertible(&self) -> bool {
        let f = self.frobenius();
        f > 0.0 && self.determinant().abs() > 1e-12 * f.powi(self.dim() as i32)
    }

    pub fn inverse(&self) -> Result<LinearMap> {
        if !self.is_invertible() {
            return Err(NormError::SingularMap);
        }
        self.0
            .clone()
            .try_inverse()
            .map(LinearMap)
            .ok_or(NormError::SingularMap)
    }

    /// Largest entrywise difference.
    pub fn max_abs_diff(&self, other: &LinearMap) -> f64 {
        (&self.0 - &other.0).amax()
    }
}

impl Serialize for LinearMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for LinearMap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<f64>> = Vec::deserialize(d)?;
        LinearMap::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compose_and_inverse() {
        let a = LinearMap::from_rows(&[vec![2.0, 1.0], vec![0.0, 1.0]]).unwrap();
        let inv = a.inverse().unwrap();
        assert!(a.compose(&inv).max_abs_diff(&LinearMap::identity(2)) < 1e-15);
        assert_eq!(a.apply(&[1.0, 1.0]), vec![3.0, 1.0]);
        let singular = LinearMap::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert_eq!(singular.inverse().unwrap_err(), NormError::SingularMap);
        assert!(LinearMap::from_rows(&[vec![1.0, 2.0]]).is_err());
    }
}
