//! Linear maps acting on quasinorms: pullbacks, operator norms, the
//! Banach–Mazur distance, autoisometry groups and a construction that
//! perturbs a polyhedral norm into one with only `±Id` as isometries.

mod isometry;
mod optimize;
mod symmetry;

pub use isometry::{
    classify_isometry, general_position, isometry_group, power_bounded, separation_check,
    IsometryClass, IsometryReport, ISOMETRY_TOL, MAX_ISOMETRY_VERTICES,
};
pub use optimize::{bm_distance, BMResult};
pub use symmetry::{symmetry_break, Bump, SymmetryBreak, MAX_ROUNDS};

use crate::error::{NormError, Result};
use crate::linmap::LinearMap;
use crate::projgrid::ProjectiveGrid;
use crate::qmetric::{climb, initial_step};
use crate::quasinorm::NormSpec;

/// `x ↦ ‖Ax‖_X`.
pub fn pullback(a: &LinearMap, x: &NormSpec) -> Result<NormSpec> {
    NormSpec::pullback(a.clone(), x.clone())
}

/// Lower bound for `sup ‖Au‖_Y / ‖u‖_X` from the grid, polished by compass
/// search. When `X` is a polytope the ratio is also maximized over the
/// boundary points of `B_X`, which is exact whenever `Y` is convex.
pub fn operator_norm(
    a: &LinearMap,
    x: &NormSpec,
    y: &NormSpec,
    grid: &ProjectiveGrid,
) -> Result<f64> {
    let n = x.dim();
    for d in [a.dim(), y.dim(), grid.dim()] {
        if d != n {
            return Err(NormError::DimensionMismatch {
                expected: n,
                found: d,
            });
        }
    }
    let ratio = |u: &[f64]| y.value(&a.apply(u)) / x.value(u);
    let mut best = (f64::NEG_INFINITY, grid.points()[0].coords().to_vec());
    for p in grid.points() {
        let r = ratio(p.coords());
        if r > best.0 {
            best = (r, p.coords().to_vec());
        }
    }
    let (polished, _) = climb(&ratio, best, initial_step(grid), 1.0);
    let mut out = polished;
    if let NormSpec::Polytope(ball) = x {
        for v in ball.vertices() {
            out = out.max(ratio(v));
        }
    }
    Ok(out)
}
