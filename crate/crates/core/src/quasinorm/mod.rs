//! Continuous quasinorms on `R^n` as a closed symbolic algebra.
//!
//! A [`NormSpec`] is evaluated either directly ([`NormSpec::eval`]) or in log
//! space ([`NormSpec::log_direction`]). The log path is what every grid
//! computation uses: it is exact for stored profiles and turns the
//! vector-space operations into additions of log-values.

mod diagnostics;
pub mod hull;
mod polytope;
mod profile;

use std::sync::Arc;

pub use diagnostics::{is_norm, polyhedral_approx, quasinorm_constant, ConvexityVerdict};
pub use polytope::{
    extreme_points, is_exposed, minkowski_functional, validate_ball, validate_vertices,
    BallValidationReport, PolytopeBall, MAX_VERTICES,
};
pub use profile::ProfileNorm;

use crate::error::{NormError, Result};
use crate::linalg::{dot, norm2};
use crate::linmap::LinearMap;
use crate::projgrid::ProjectiveGrid;

/// A continuous quasinorm on `R^n`.
#[derive(Debug, Clone, PartialEq)]
pub enum NormSpec {
    Euclidean {
        dim: usize,
    },
    /// `(Σ|x_i|^p)^{1/p}`, with `p = ∞` the max norm and `p < 1` a quasinorm.
    Lp {
        dim: usize,
        p: f64,
    },
    /// `(Σ(w_i|x_i|)^p)^{1/p}`.
    WeightedLp {
        p: f64,
        weights: Vec<f64>,
    },
    Polytope(Arc<PolytopeBall>),
    Profile(Arc<ProfileNorm>),
    /// `x ↦ ‖A x‖_inner`.
    Pullback {
        map: LinearMap,
        inner: Box<NormSpec>,
    },
    /// `‖·‖_left^θ ‖·‖_right^{1−θ}`. Any finite θ gives a quasinorm; θ outside
    /// `[0, 1]` is how scalar multiplication extrapolates.
    Interp {
        left: Box<NormSpec>,
        right: Box<NormSpec>,
        theta: f64,
    },
    /// `‖x‖₂² / ‖x‖_inner`.
    Opposite(Box<NormSpec>),
    Scaled {
        factor: f64,
        inner: Box<NormSpec>,
    },
    MaxOf(Vec<NormSpec>),
}

impl NormSpec {
    pub fn euclidean(dim: usize) -> Self {
        NormSpec::Euclidean { dim }
    }

    pub fn lp(dim: usize, p: f64) -> Result<Self> {
        check_exponent(p)?;
        check_dim(dim)?;
        Ok(NormSpec::Lp { dim, p })
    }

    pub fn weighted_lp(p: f64, weights: Vec<f64>) -> Result<Self> {
        check_exponent(p)?;
        check_dim(weights.len())?;
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(NormError::InvalidParameter(
                "weights must be positive and finite".into(),
            ));
        }
        Ok(NormSpec::WeightedLp { p, weights })
    }

    pub fn polytope(ball: PolytopeBall) -> Self {
        NormSpec::Polytope(Arc::new(ball))
    }

    pub fn polytope_from_vertices(dim: usize, vertices: Vec<Vec<f64>>) -> Result<Self> {
        Ok(NormSpec::polytope(PolytopeBall::from_vertices(
            dim, vertices,
        )?))
    }

    pub fn profile(grid: ProjectiveGrid, logvalues: Vec<f64>) -> Result<Self> {
        Ok(NormSpec::Profile(Arc::new(ProfileNorm::new(
            grid, logvalues,
        )?)))
    }

    pub fn pullback(map: LinearMap, inner: NormSpec) -> Result<Self> {
        if map.dim() != inner.dim() {
            return Err(NormError::DimensionMismatch {
                expected: inner.dim(),
                found: map.dim(),
            });
        }
        if !map.is_invertible() {
            return Err(NormError::SingularMap);
        }
        Ok(NormSpec::Pullback {
            map,
            inner: Box::new(inner),
        })
    }

    pub fn interp(left: NormSpec, right: NormSpec, theta: f64) -> Result<Self> {
        same_dim(&left, &right)?;
        if !theta.is_finite() {
            return Err(NormError::InvalidParameter("θ must be finite".into()));
        }
        Ok(NormSpec::Interp {
            left: Box::new(left),
            right: Box::new(right),
            theta,
        })
    }

    pub fn opposite(inner: NormSpec) -> Self {
        NormSpec::Opposite(Box::new(inner))
    }

    pub fn scaled(factor: f64, inner: NormSpec) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(NormError::InvalidParameter(format!(
                "scale factor must be positive and finite, got {factor}"
            )));
        }
        Ok(NormSpec::Scaled {
            factor,
            inner: Box::new(inner),
        })
    }

    pub fn max_of(specs: Vec<NormSpec>) -> Result<Self> {
        let first = specs
            .first()
            .ok_or_else(|| NormError::InvalidParameter("max of an empty list".into()))?;
        for s in &specs[1..] {
            same_dim(first, s)?;
        }
        Ok(NormSpec::MaxOf(specs))
    }

    /// Ambient dimension `n`.
    pub fn dim(&self) -> usize {
        match self {
            NormSpec::Euclidean { dim } | NormSpec::Lp { dim, .. } => *dim,
            NormSpec::WeightedLp { weights, .. } => weights.len(),
            NormSpec::Polytope(b) => b.dim(),
            NormSpec::Profile(p) => p.dim(),
            NormSpec::Pullback { map, .. } => map.dim(),
            NormSpec::Interp { left, .. } => left.dim(),
            NormSpec::Opposite(inner) | NormSpec::Scaled { inner, .. } => inner.dim(),
            NormSpec::MaxOf(list) => list[0].dim(),
        }
    }

    /// `‖x‖`, checking the dimension.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(NormError::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        Ok(self.value(x))
    }

    /// `‖x‖` by each variant's defining formula; `x` must have length `n`.
    pub fn value(&self, x: &[f64]) -> f64 {
        match self {
            NormSpec::Euclidean { .. } => norm2(x),
            NormSpec::Lp { p, .. } => lp_value(x.iter().copied(), *p),
            NormSpec::WeightedLp { p, weights } => {
                lp_value(x.iter().zip(weights).map(|(c, w)| c * w), *p)
            }
            NormSpec::Polytope(b) => b.gauge(x),
            NormSpec::Profile(p) => {
                if let Some(i) = p.grid().points().iter().position(|q| q.coords() == x) {
                    return p.logvalues()[i].exp();
                }
                let len = norm2(x);
                if len == 0.0 {
                    0.0
                } else {
                    len * p.log_direction(x).exp()
                }
            }
            NormSpec::Pullback { map, inner } => inner.value(&map.apply(x)),
            NormSpec::Interp { left, right, theta } => {
                let l = left.value(x);
                let r = right.value(x);
                if l == 0.0 || r == 0.0 {
                    0.0
                } else if *theta == 0.5 {
                    (l * r).sqrt()
                } else {
                    l.powf(*theta) * r.powf(1.0 - theta)
                }
            }
            NormSpec::Opposite(inner) => {
                let sq = dot(x, x);
                if sq == 0.0 {
                    0.0
                } else {
                    sq / inner.value(x)
                }
            }
            NormSpec::Scaled { factor, inner } => factor * inner.value(x),
            NormSpec::MaxOf(list) => list.iter().map(|s| s.value(x)).fold(0.0, f64::max),
        }
    }

    /// `ln ‖u‖` for a grid direction `u`, whose Euclidean length is taken to
    /// be exactly 1.
    pub fn log_direction(&self, u: &[f64]) -> f64 {
        self.log_at(u, 0.0)
    }

    /// `ln ‖x‖` for nonzero `x`, with `ln |x|₂` computed here.
    pub fn log_value(&self, x: &[f64]) -> f64 {
        self.log_at(x, norm2(x).ln())
    }

    /// `ln ‖x‖` given `ln |x|₂`. Composite variants combine log-values so that
    /// profile arithmetic on a grid is exact up to rounding of the sums.
    fn log_at(&self, x: &[f64], ln_len: f64) -> f64 {
        match self {
            NormSpec::Euclidean { .. } => ln_len,
            NormSpec::Profile(p) => ln_len + p.log_direction(x),
            NormSpec::Pullback { map, inner } => {
                let y = map.apply(x);
                let ln_y = norm2(&y).ln();
                inner.log_at(&y, ln_y)
            }
            NormSpec::Interp { left, right, theta } => {
                theta * left.log_at(x, ln_len) + (1.0 - theta) * right.log_at(x, ln_len)
            }
            NormSpec::Opposite(inner) => 2.0 * ln_len - inner.log_at(x, ln_len),
            NormSpec::Scaled { factor, inner } => factor.ln() + inner.log_at(x, ln_len),
            NormSpec::MaxOf(list) => list
                .iter()
                .map(|s| s.log_at(x, ln_len))
                .fold(f64::NEG_INFINITY, f64::max),
            NormSpec::Lp { .. } | NormSpec::WeightedLp { .. } | NormSpec::Polytope(_) => {
                self.value(x).ln()
            }
        }
    }

    /// Log-values at every grid point.
    pub fn log_profile_values(&self, grid: &ProjectiveGrid) -> Result<Vec<f64>> {
        if grid.dim() != self.dim() {
            return Err(NormError::DimensionMismatch {
                expected: self.dim(),
                found: grid.dim(),
            });
        }
        Ok(grid
            .points()
            .iter()
            .map(|p| self.log_direction(p.coords()))
            .collect())
    }
}

fn lp_value(coords: impl Iterator<Item = f64>, p: f64) -> f64 {
    if p.is_infinite() {
        coords.map(f64::abs).fold(0.0, f64::max)
    } else if p == 1.0 {
        coords.map(f64::abs).sum()
    } else if p == 2.0 {
        coords.map(|c| c * c).sum::<f64>().sqrt()
    } else {
        // Rescale by the largest coordinate so large or small p cannot overflow.
        let v: Vec<f64> = coords.map(f64::abs).collect();
        let m = v.iter().copied().fold(0.0, f64::max);
        if m == 0.0 {
            return 0.0;
        }
        m * v.iter().map(|c| (c / m).powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

fn check_exponent(p: f64) -> Result<()> {
    if p > 0.0 && !p.is_nan() {
        Ok(())
    } else {
        Err(NormError::InvalidParameter(format!(
            "exponent must be in (0, ∞], got {p}"
        )))
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim >= 1 {
        Ok(())
    } else {
        Err(NormError::InvalidParameter(
            "dimension must be positive".into(),
        ))
    }
}

fn same_dim(a: &NormSpec, b: &NormSpec) -> Result<()> {
    if a.dim() == b.dim() {
        Ok(())
    } else {
        Err(NormError::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projgrid::make_grid;

    fn square() -> NormSpec {
        NormSpec::polytope_from_vertices(
            2,
            vec![
                vec![1.0, 1.0],
                vec![1.0, -1.0],
                vec![-1.0, 1.0],
                vec![-1.0, -1.0],
            ],
        )
        .unwrap()
    }

    #[test]
    fn eval_examples() {
        let l1 = NormSpec::lp(2, 1.0).unwrap();
        let linf = NormSpec::lp(2, f64::INFINITY).unwrap();
        assert_eq!(l1.eval(&[1.0, 1.0]).unwrap(), 2.0);
        assert_eq!(square().eval(&[2.0, 0.0]).unwrap(), 2.0);
        let mid = NormSpec::interp(l1, linf, 0.5).unwrap();
        assert!((mid.eval(&[1.0, 1.0]).unwrap() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn eval_rejects_dimension_mismatch_and_bad_parameters() {
        let e = NormSpec::euclidean(3);
        assert_eq!(
            e.eval(&[1.0, 2.0]).unwrap_err(),
            NormError::DimensionMismatch {
                expected: 3,
                found: 2
            }
        );
        assert!(NormSpec::lp(2, 0.0).is_err());
        assert!(NormSpec::lp(2, -1.0).is_err());
        assert!(NormSpec::weighted_lp(1.0, vec![1.0, 0.0]).is_err());
        assert!(NormSpec::interp(NormSpec::euclidean(2), NormSpec::euclidean(3), 0.5).is_err());
        assert!(NormSpec::scaled(0.0, NormSpec::euclidean(2)).is_err());
        let singular = LinearMap::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert_eq!(
            NormSpec::pullback(singular, NormSpec::euclidean(2)).unwrap_err(),
            NormError::SingularMap
        );
    }

    #[test]
    fn zero_and_small_exponents() {
        let half = NormSpec::lp(2, 0.5).unwrap();
        assert_eq!(half.eval(&[1.0, 1.0]).unwrap(), 4.0);
        assert_eq!(half.eval(&[0.0, 0.0]).unwrap(), 0.0);
        let opp = NormSpec::opposite(NormSpec::lp(2, 1.0).unwrap());
        assert_eq!(opp.eval(&[0.0, 0.0]).unwrap(), 0.0);
        let big = NormSpec::lp(3, 400.0).unwrap();
        assert!(
            (big.eval(&[1e200, 1e200, 0.0]).unwrap() / 1e200 - 2f64.powf(1.0 / 400.0)).abs()
                < 1e-12
        );
    }

    #[test]
    fn log_path_agrees_with_value_path() {
        let g = make_grid(2, 36, 0).unwrap();
        let x = NormSpec::weighted_lp(1.0, vec![2.0, 0.5]).unwrap();
        let specs = vec![
            NormSpec::opposite(x.clone()),
            NormSpec::interp(x.clone(), square(), 2.5).unwrap(),
            NormSpec::max_of(vec![x.clone(), NormSpec::euclidean(2)]).unwrap(),
            NormSpec::pullback(LinearMap::rotation(2, 0.3), x.clone()).unwrap(),
            NormSpec::scaled(3.0, x).unwrap(),
        ];
        for s in &specs {
            for p in g.points() {
                let u = p.coords();
                assert!((s.log_direction(u) - s.value(u).ln()).abs() < 1e-12);
                let v: Vec<f64> = u.iter().map(|c| 4.0 * c).collect();
                assert!((s.log_value(&v) - s.value(&v).ln()).abs() < 1e-12);
            }
        }
    }
}
