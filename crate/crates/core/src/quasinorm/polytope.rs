//! Balanced polytope unit balls and their gauges.

use serde::Serialize;

use super::hull::{self, GEOM_TOL};
use crate::error::{BallViolation, NormError, Result};
use crate::linalg::{dot, neg, norm2, rank, sub};

/// Vertex cap for hull construction in dimension ≥ 3 (counted before
/// symmetrization).
pub const MAX_VERTICES: usize = 512;

/// Planar hulls are `O(v log v)`, so the cap there only guards memory.
pub const MAX_VERTICES_PLANAR: usize = 1 << 16;

/// A balanced, full-dimensional polytope `B = {x : ⟨a_j, x⟩ ≤ 1 ∀j}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolytopeBall {
    dim: usize,
    vertices: Vec<Vec<f64>>,
    facets: Vec<Vec<f64>>,
}

/// Radii of the Euclidean sandwich `eps·B₂ ⊆ B ⊆ M·B₂` plus the shape checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BallValidationReport {
    pub eps: f64,
    #[serde(rename = "M")]
    pub m: f64,
    pub balanced: bool,
    pub midpoint_convex: bool,
}

impl PolytopeBall {
    /// Builds the ball `conv(vertices)` after checking it is balanced and
    /// full-dimensional. Interior input points are discarded; boundary points
    /// that are not extreme are kept (see [`extreme_points`]).
    pub fn from_vertices(dim: usize, vertices: Vec<Vec<f64>>) -> Result<Self> {
        let invalid = |v| NormError::InvalidBall(v);
        if vertices.is_empty() {
            return Err(invalid(BallViolation::Empty));
        }
        for v in &vertices {
            if v.len() != dim {
                return Err(NormError::DimensionMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(invalid(BallViolation::NonFinite));
            }
        }
        let cap = if dim == 2 {
            MAX_VERTICES_PLANAR
        } else {
            MAX_VERTICES
        };
        if vertices.len() > cap {
            return Err(NormError::TooManyVertices {
                count: vertices.len(),
                limit: cap,
            });
        }
        let mut given: Vec<Vec<f64>> = Vec::with_capacity(vertices.len());
        for v in vertices {
            if !contains_point(&given, &v) {
                given.push(v);
            }
        }
        if dim < 2 || rank(&given, 1e-10) < dim {
            return Err(invalid(BallViolation::NotFullDimensional));
        }

        let mut symmetric = given.clone();
        for v in &given {
            let m = neg(v);
            if !contains_point(&symmetric, &m) {
                symmetric.push(m);
            }
        }
        let facets = hull::facets(dim, &symmetric)?;
        if facets.len() < dim + 1 {
            return Err(invalid(BallViolation::NotFullDimensional));
        }
        // Each extreme point of conv(V ∪ −V) must already belong to V.
        for w in &symmetric {
            if is_extreme_in(&facets, w, dim) && !contains_point(&given, w) {
                return Err(invalid(BallViolation::NotBalanced));
            }
        }
        let vertices: Vec<Vec<f64>> = given
            .into_iter()
            .filter(|v| gauge_with(&facets, v) >= 1.0 - GEOM_TOL)
            .collect();
        Ok(PolytopeBall {
            dim,
            vertices,
            facets,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Boundary points the ball was built from.
    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    /// Facet normals `a_j` with `⟨a_j, x⟩ ≤ 1` on the ball.
    pub fn facets(&self) -> &[Vec<f64>] {
        &self.facets
    }

    /// The gauge `max_j ⟨a_j, x⟩`.
    #[inline]
    pub fn gauge(&self, x: &[f64]) -> f64 {
        gauge_with(&self.facets, x)
    }
}

#[inline]
fn gauge_with(facets: &[Vec<f64>], x: &[f64]) -> f64 {
    facets.iter().map(|a| dot(a, x)).fold(0.0, f64::max)
}

fn contains_point(set: &[Vec<f64>], p: &[f64]) -> bool {
    set.iter()
        .any(|q| norm2(&sub(q, p)) <= GEOM_TOL * norm2(p).max(1.0))
}

fn active_facets<'a>(facets: &'a [Vec<f64>], v: &[f64]) -> Vec<&'a Vec<f64>> {
    facets
        .iter()
        .filter(|a| (dot(a, v) - 1.0).abs() <= GEOM_TOL)
        .collect()
}

fn is_extreme_in(facets: &[Vec<f64>], v: &[f64], dim: usize) -> bool {
    let active: Vec<Vec<f64>> = active_facets(facets, v).into_iter().cloned().collect();
    active.len() >= dim && rank(&active, 1e-9) == dim
}

/// `inf{λ > 0 : x ∈ λB}`.
pub fn minkowski_functional(ball: &PolytopeBall, x: &[f64]) -> Result<f64> {
    if x.len() != ball.dim {
        return Err(NormError::DimensionMismatch {
            expected: ball.dim,
            found: x.len(),
        });
    }
    Ok(ball.gauge(x))
}

pub fn validate_ball(ball: &PolytopeBall) -> BallValidationReport {
    let max_normal = ball.facets.iter().map(|a| norm2(a)).fold(0.0, f64::max);
    let m = ball.vertices.iter().map(|v| norm2(v)).fold(0.0, f64::max);
    BallValidationReport {
        eps: 1.0 / max_normal,
        m,
        balanced: true,
        midpoint_convex: true,
    }
}

/// Validates a raw vertex list and reports its sandwich radii.
pub fn validate_vertices(dim: usize, vertices: Vec<Vec<f64>>) -> Result<BallValidationReport> {
    PolytopeBall::from_vertices(dim, vertices).map(|b| validate_ball(&b))
}

/// The minimal subset of stored vertices whose hull is the ball.
///
/// A boundary point is extreme exactly when the facets through it have full
/// rank.
pub fn extreme_points(ball: &PolytopeBall) -> Vec<Vec<f64>> {
    ball.vertices
        .iter()
        .filter(|v| is_extreme_in(&ball.facets, v, ball.dim))
        .cloned()
        .collect()
}

/// Whether boundary point `v` is exposed; when it is, returns a functional
/// `f` with `f(v) = 1` and `f(w) < 1` for every other point of the ball.
///
/// The functional is the mean of the facet normals through `v`.
pub fn is_exposed(ball: &PolytopeBall, v: &[f64]) -> Result<(bool, Option<Vec<f64>>)> {
    let g = minkowski_functional(ball, v)?;
    if (g - 1.0).abs() > GEOM_TOL {
        return Err(NormError::NotOnBoundary { gauge: g });
    }
    if !is_extreme_in(&ball.facets, v, ball.dim) {
        return Ok((false, None));
    }
    let active = active_facets(&ball.facets, v);
    let mut f = vec![0.0; ball.dim];
    for a in &active {
        for (fi, ai) in f.iter_mut().zip(a.iter()) {
            *fi += ai;
        }
    }
    let k = active.len() as f64;
    for fi in f.iter_mut() {
        *fi /= k;
    }
    Ok((true, Some(f)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> PolytopeBall {
        PolytopeBall::from_vertices(
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

    fn cross() -> PolytopeBall {
        PolytopeBall::from_vertices(
            2,
            vec![
                vec![1.0, 0.0],
                vec![-1.0, 0.0],
                vec![0.0, 1.0],
                vec![0.0, -1.0],
            ],
        )
        .unwrap()
    }

    #[test]
    fn gauge_examples() {
        assert_eq!(minkowski_functional(&square(), &[2.0, 0.0]).unwrap(), 2.0);
        assert_eq!(minkowski_functional(&square(), &[0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(minkowski_functional(&square(), &[1.0, 0.5]).unwrap(), 1.0);
        assert_eq!(minkowski_functional(&cross(), &[1.0, 1.0]).unwrap(), 2.0);
        assert!(minkowski_functional(&square(), &[1.0]).is_err());
    }

    #[test]
    fn validation_report_and_failures() {
        let r = validate_ball(&square());
        assert!((r.eps - 1.0).abs() < 1e-15);
        assert!((r.m - 2f64.sqrt()).abs() < 1e-15);
        assert!(r.balanced && r.midpoint_convex);

        let err = validate_vertices(2, vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap_err();
        assert_eq!(err, NormError::InvalidBall(BallViolation::NotBalanced));
        assert!(err.to_string().contains("not balanced"));

        let err = validate_vertices(2, vec![vec![1.0, 0.0], vec![-1.0, 0.0]]).unwrap_err();
        assert_eq!(
            err,
            NormError::InvalidBall(BallViolation::NotFullDimensional)
        );
        assert!(err.to_string().contains("not full-dimensional"));
    }

    #[test]
    fn extreme_points_drop_redundant_points() {
        let mut v = square().vertices().to_vec();
        v.push(vec![0.5, 0.5]);
        v.push(vec![1.0, 0.0]);
        v.push(vec![-1.0, 0.0]);
        let b = PolytopeBall::from_vertices(2, v).unwrap();
        assert_eq!(b.vertices().len(), 6);
        let ext = extreme_points(&b);
        assert_eq!(ext.len(), 4);
        assert!(ext.iter().all(|p| p[0].abs() == 1.0 && p[1].abs() == 1.0));
        assert_eq!(extreme_points(&cross()).len(), 4);
    }

    #[test]
    fn hexagon_is_all_extreme() {
        let h = 3f64.sqrt() / 2.0;
        let mut v = vec![vec![1.0, 0.0], vec![0.5, h], vec![-0.5, h]];
        let negs: Vec<Vec<f64>> = v.iter().map(|p| neg(p)).collect();
        v.extend(negs);
        let b = PolytopeBall::from_vertices(2, v).unwrap();
        assert_eq!(extreme_points(&b).len(), 6);
    }

    #[test]
    fn exposed_points() {
        let (yes, f) = is_exposed(&square(), &[1.0, 1.0]).unwrap();
        assert!(yes);
        let f = f.unwrap();
        assert!((f[0] - 0.5).abs() < 1e-15 && (f[1] - 0.5).abs() < 1e-15);

        let b = PolytopeBall::from_vertices(
            2,
            vec![
                vec![1.0, 1.0],
                vec![1.0, -1.0],
                vec![-1.0, 1.0],
                vec![-1.0, -1.0],
                vec![1.0, 0.0],
                vec![-1.0, 0.0],
            ],
        )
        .unwrap();
        assert_eq!(is_exposed(&b, &[1.0, 0.0]).unwrap(), (false, None));

        let (yes, f) = is_exposed(&cross(), &[1.0, 0.0]).unwrap();
        assert!(yes);
        let f = f.unwrap();
        for w in cross().vertices() {
            if w != &vec![1.0, 0.0] {
                assert!(dot(&f, w) < 1.0);
            }
        }
        assert!(matches!(
            is_exposed(&square(), &[0.5, 0.5]),
            Err(NormError::NotOnBoundary { .. })
        ));
    }
}
