//! Autoisometry groups of polytope norms and the eigenstructure every
//! isometry of a quasinorm must have.

use nalgebra::{Complex, DMatrix};
use serde::Serialize;

use crate::error::{NormError, Result};
use crate::linalg::{matrix_from_rows, norm2, rank};
use crate::linmap::LinearMap;
use crate::projgrid::ProjectiveGrid;
use crate::quasinorm::{extreme_points, NormSpec, PolytopeBall};

use super::operator_norm;

/// Extreme-point cap for the combinatorial group search.
pub const MAX_ISOMETRY_VERTICES: usize = 24;
/// Entrywise and gauge tolerance for isometry checks.
pub const ISOMETRY_TOL: f64 = 1e-9;

/// Canonical block of one invariant plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IsometryClass {
    Identity,
    Negation,
    /// Eigenvalues `e^{±iα}` with `α ∈ (0, π)`.
    Rotation {
        angle: f64,
    },
    /// Eigenvalues `1` and `−1` both present.
    Reflection,
    Other,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsometryReport {
    pub order: usize,
    pub elements: Vec<LinearMap>,
    pub classifications: Vec<IsometryClass>,
    /// The group is exactly `{Id, −Id}`.
    pub trivial: bool,
}

fn close(p: &[f64], q: &[f64]) -> bool {
    p.iter()
        .zip(q)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
        <= ISOMETRY_TOL * norm2(q).max(1.0)
}

/// All linear maps sending the extreme points of `ball` onto themselves and
/// preserving the gauge on `grid`.
///
/// A map is fixed by the images of `n` independent extreme points, so the
/// candidates are ordered `n`-tuples of extreme points; tuples are pruned as
/// soon as a pairwise sum or difference changes gauge.
pub fn isometry_group(ball: &PolytopeBall, grid: &ProjectiveGrid) -> Result<IsometryReport> {
    let n = ball.dim();
    if grid.dim() != n {
        return Err(NormError::DimensionMismatch {
            expected: n,
            found: grid.dim(),
        });
    }
    let ext = extreme_points(ball);
    if ext.len() > MAX_ISOMETRY_VERTICES {
        return Err(NormError::TooManyVertices {
            count: ext.len(),
            limit: MAX_ISOMETRY_VERTICES,
        });
    }
    let mut basis: Vec<usize> = Vec::with_capacity(n);
    for i in 0..ext.len() {
        let mut rows: Vec<Vec<f64>> = basis.iter().map(|&j| ext[j].clone()).collect();
        rows.push(ext[i].clone());
        if rank(&rows, 1e-10) == rows.len() {
            basis.push(i);
            if basis.len() == n {
                break;
            }
        }
    }
    if basis.len() < n {
        return Err(NormError::ConstructionFailed(
            "extreme points do not span the space".into(),
        ));
    }
    let b_cols =
        matrix_from_rows(&basis.iter().map(|&i| ext[i].clone()).collect::<Vec<_>>()).transpose();
    let b_inv = b_cols
        .try_inverse()
        .ok_or_else(|| NormError::ConstructionFailed("degenerate extreme basis".into()))?;

    let g = |v: &[f64]| ball.gauge(v);
    let pair_gauges: Vec<Vec<(f64, f64)>> = basis
        .iter()
        .map(|&i| {
            basis
                .iter()
                .map(|&j| {
                    (
                        g(&sum(&ext[i], &ext[j], 1.0)),
                        g(&sum(&ext[i], &ext[j], -1.0)),
                    )
                })
                .collect()
        })
        .collect();

    let mut elements: Vec<LinearMap> = Vec::new();
    let mut images: Vec<usize> = Vec::with_capacity(n);
    let search = |images: &Vec<usize>, elements: &mut Vec<LinearMap>| {
        let c_cols = matrix_from_rows(&images.iter().map(|&i| ext[i].clone()).collect::<Vec<_>>())
            .transpose();
        let Ok(a) = LinearMap::from_matrix(&c_cols * &b_inv) else {
            return;
        };
        let mut hit = vec![false; ext.len()];
        for e in &ext {
            let ae = a.apply(e);
            match ext.iter().position(|q| close(&ae, q)) {
                Some(k) if !hit[k] => hit[k] = true,
                _ => return,
            }
        }
        for p in grid.points() {
            let u = p.coords();
            let gu = g(u);
            if (g(&a.apply(u)) - gu).abs() > ISOMETRY_TOL * gu {
                return;
            }
        }
        if !elements.iter().any(|m| m.max_abs_diff(&a) <= ISOMETRY_TOL) {
            elements.push(a);
        }
    };
    enumerate(&ext, n, &pair_gauges, &g, &mut images, &mut |imgs| {
        search(imgs, &mut elements)
    });

    elements.sort_by(|a, b| {
        a.matrix()
            .transpose()
            .as_slice()
            .iter()
            .zip(b.matrix().transpose().as_slice())
            .map(|(p, q)| p.total_cmp(q))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let spec = NormSpec::polytope(ball.clone());
    let classifications = elements
        .iter()
        .map(|a| classify_isometry(a, &spec, grid))
        .collect::<Result<Vec<_>>>()?;
    let trivial = elements.len() == 2
        && classifications.contains(&IsometryClass::Identity)
        && classifications.contains(&IsometryClass::Negation);
    Ok(IsometryReport {
        order: elements.len(),
        elements,
        classifications,
        trivial,
    })
}

fn sum(a: &[f64], b: &[f64], s: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + s * y).collect()
}

fn enumerate(
    ext: &[Vec<f64>],
    n: usize,
    pair_gauges: &[Vec<(f64, f64)>],
    g: &dyn Fn(&[f64]) -> f64,
    images: &mut Vec<usize>,
    visit: &mut dyn FnMut(&Vec<usize>),
) {
    let k = images.len();
    if k == n {
        visit(images);
        return;
    }
    'cand: for c in 0..ext.len() {
        if images.contains(&c) {
            continue;
        }
        for (j, &img) in images.iter().enumerate() {
            let (plus, minus) = pair_gauges[k][j];
            let tol = ISOMETRY_TOL * plus.max(minus).max(1.0);
            if (g(&sum(&ext[c], &ext[img], 1.0)) - plus).abs() > tol
                || (g(&sum(&ext[c], &ext[img], -1.0)) - minus).abs() > tol
            {
                continue 'cand;
            }
        }
        images.push(c);
        enumerate(ext, n, pair_gauges, g, images, visit);
        images.pop();
    }
}

/// Largest relative change of `‖·‖_X` under `a` on the grid.
fn isometry_deviation(a: &LinearMap, x: &NormSpec, grid: &ProjectiveGrid) -> f64 {
    grid.points()
        .iter()
        .map(|p| {
            let u = p.coords();
            (x.value(&a.apply(u)) / x.value(u) - 1.0).abs()
        })
        .fold(0.0, f64::max)
}

fn complex_rank(m: &DMatrix<Complex<f64>>) -> usize {
    let sv = m.clone().svd(false, false).singular_values;
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    sv.iter().filter(|&&s| s > 1e-7 * smax.max(1.0)).count()
}

/// Checks the eigenstructure of an isometry (all eigenvalues on the unit
/// circle, diagonalizable over `C`), then that `a` preserves `‖·‖_X` on the
/// grid, and names the block of one invariant plane.
pub fn classify_isometry(
    a: &LinearMap,
    x: &NormSpec,
    grid: &ProjectiveGrid,
) -> Result<IsometryClass> {
    let n = a.dim();
    for d in [x.dim(), grid.dim()] {
        if d != n {
            return Err(NormError::DimensionMismatch {
                expected: n,
                found: d,
            });
        }
    }
    let eig: Vec<Complex<f64>> = a.matrix().complex_eigenvalues().iter().copied().collect();
    for l in &eig {
        if (l.norm() - 1.0).abs() > ISOMETRY_TOL {
            return Err(NormError::InvalidIsometryStructure(format!(
                "eigenvalue {:.6}{:+.6}i has modulus {:.6}",
                l.re,
                l.im,
                l.norm()
            )));
        }
    }
    let ac = a.matrix().map(|v| Complex::new(v, 0.0));
    let mut seen: Vec<Complex<f64>> = Vec::new();
    for l in &eig {
        if seen.iter().any(|s| (s - l).norm() <= 1e-6) {
            continue;
        }
        seen.push(*l);
        let mult = eig.iter().filter(|m| (*m - l).norm() <= 1e-6).count();
        let shifted = &ac - DMatrix::<Complex<f64>>::identity(n, n) * *l;
        if complex_rank(&shifted) > n - mult {
            return Err(NormError::InvalidIsometryStructure(format!(
                "eigenvalue {:.6}{:+.6}i is defective, so the powers are unbounded",
                l.re, l.im
            )));
        }
    }
    let deviation = isometry_deviation(a, x, grid);
    if deviation > ISOMETRY_TOL {
        return Err(NormError::NotAnIsometry { deviation });
    }

    let id = LinearMap::identity(n);
    if a.max_abs_diff(&id) <= ISOMETRY_TOL {
        return Ok(IsometryClass::Identity);
    }
    if a.max_abs_diff(&id.scaled(-1.0)) <= ISOMETRY_TOL {
        return Ok(IsometryClass::Negation);
    }
    let angle = eig
        .iter()
        .filter(|l| l.im.abs() > ISOMETRY_TOL)
        .map(|l| l.im.abs().atan2(l.re))
        .fold(f64::INFINITY, f64::min);
    if angle.is_finite() {
        return Ok(IsometryClass::Rotation { angle });
    }
    let has = |v: f64| eig.iter().any(|l| (l.re - v).abs() <= 1e-6);
    if has(1.0) && has(-1.0) {
        return Ok(IsometryClass::Reflection);
    }
    Ok(IsometryClass::Other)
}

/// Whether `‖A^k‖_F ∈ [1/bound, bound]` for `k = 1..=kmax`.
pub fn power_bounded(a: &LinearMap, kmax: usize, bound: f64) -> bool {
    let mut p = a.clone();
    for _ in 0..kmax {
        let f = p.frobenius();
        if !f.is_finite() || f > bound || f < 1.0 / bound {
            return false;
        }
        p = p.compose(a);
    }
    true
}

/// `min(‖F − Id‖_X, ‖F + Id‖_X)` for an isometry `F ≠ ±Id`.
pub fn separation_check(f: &LinearMap, x: &NormSpec, grid: &ProjectiveGrid) -> Result<f64> {
    let n = f.dim();
    let id = LinearMap::identity(n);
    if f.max_abs_diff(&id) <= ISOMETRY_TOL || f.max_abs_diff(&id.scaled(-1.0)) <= ISOMETRY_TOL {
        return Err(NormError::TrivialIsometry);
    }
    if x.dim() != n || grid.dim() != n {
        return Err(NormError::DimensionMismatch {
            expected: n,
            found: x.dim(),
        });
    }
    let deviation = isometry_deviation(f, x, grid);
    if deviation > ISOMETRY_TOL {
        return Err(NormError::NotAnIsometry { deviation });
    }
    let minus = operator_norm(&f.sub(&id), x, x, grid)?;
    let plus = operator_norm(&f.add(&id), x, x, grid)?;
    Ok(minus.min(plus))
}

/// No linear hyperplane contains `n` of the points: every `n`-subset has
/// `|det| > 1e-10 · Π|v_i|`.
pub fn general_position(points: &[Vec<f64>]) -> bool {
    let Some(first) = points.first() else {
        return false;
    };
    let n = first.len();
    if n == 0 || points.len() < n || points.iter().any(|p| p.len() != n) {
        return false;
    }
    let mut idx: Vec<usize> = (0..n).collect();
    loop {
        let rows: Vec<Vec<f64>> = idx.iter().map(|&i| points[i].clone()).collect();
        let scale: f64 = rows.iter().map(|r| norm2(r)).product();
        if !(matrix_from_rows(&rows).determinant().abs() > 1e-10 * scale) {
            return false;
        }
        // next n-combination in lexicographic order
        let mut i = n;
        while i > 0 && idx[i - 1] == points.len() - n + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return true;
        }
        idx[i - 1] += 1;
        for j in i..n {
            idx[j] = idx[j - 1] + 1;
        }
    }
}
