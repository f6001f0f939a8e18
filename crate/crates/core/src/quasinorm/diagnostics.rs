//! Sampling diagnostics: quasinorm constant, convexity refutation and
//! polyhedral approximation.

use serde::Serialize;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{NormSpec, PolytopeBall};
use crate::error::{NormError, Result};
use crate::linalg::{add, scale};
use crate::projgrid::ProjectiveGrid;

/// Grid points used by the exhaustive pair sweep (larger grids are strided).
const SWEEP_POINTS: usize = 1024;

/// Outcome of a convexity scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexityVerdict {
    /// `true` means no violation was found at this sampling, not a proof.
    pub is_norm: bool,
    pub counterexample: Option<(Vec<f64>, Vec<f64>)>,
    /// `max ‖x+y‖ / (‖x‖+‖y‖)` over the sampled pairs.
    pub worst_ratio: f64,
}

struct Worst {
    ratio: f64,
    x: Vec<f64>,
    y: Vec<f64>,
}

/// Scans pairs of points: every pair of unit-sphere points over the (possibly
/// strided) grid, both signs, then `pairs` seeded pairs with random length
/// ratio. Ties keep the earliest pair.
fn scan_pairs(spec: &NormSpec, grid: &ProjectiveGrid, pairs: usize, seed: u64) -> Result<Worst> {
    if grid.dim() != spec.dim() {
        return Err(NormError::DimensionMismatch {
            expected: spec.dim(),
            found: grid.dim(),
        });
    }
    let stride = grid.len().div_ceil(SWEEP_POINTS).max(1);
    let sphere: Vec<Vec<f64>> = grid
        .points()
        .iter()
        .step_by(stride)
        .map(|p| scale(p.coords(), 1.0 / spec.value(p.coords())))
        .collect();
    let mut worst = Worst {
        ratio: f64::NEG_INFINITY,
        x: Vec::new(),
        y: Vec::new(),
    };
    let consider = |x: &[f64], y: &[f64], worst: &mut Worst| {
        let denom = spec.value(x) + spec.value(y);
        let ratio = spec.value(&add(x, y)) / denom;
        if ratio > worst.ratio {
            *worst = Worst {
                ratio,
                x: x.to_vec(),
                y: y.to_vec(),
            };
        }
    };
    for i in 0..sphere.len() {
        for j in i..sphere.len() {
            consider(&sphere[i], &sphere[j], &mut worst);
            if i != j {
                let minus: Vec<f64> = sphere[j].iter().map(|c| -c).collect();
                consider(&sphere[i], &minus, &mut worst);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let all: Vec<Vec<f64>> = grid
        .points()
        .iter()
        .map(|p| scale(p.coords(), 1.0 / spec.value(p.coords())))
        .collect();
    for _ in 0..pairs {
        let i = rng.random_range(0..all.len());
        let j = rng.random_range(0..all.len());
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let t = rng.random_range(-3.0f64..3.0).exp() * sign;
        let y = scale(&all[j], t);
        consider(&all[i], &y, &mut worst);
    }
    Ok(worst)
}

/// Certified lower bound on the optimal constant `k` in
/// `‖x+y‖ ≤ k(‖x‖+‖y‖)`.
pub fn quasinorm_constant(
    spec: &NormSpec,
    grid: &ProjectiveGrid,
    pairs: usize,
    seed: u64,
) -> Result<f64> {
    Ok(scan_pairs(spec, grid, pairs, seed)?.ratio.max(1.0))
}

/// Refutes the triangle inequality on sampled pairs. A `true` verdict is
/// one-sided: no pair violated `‖x+y‖ ≤ ‖x‖+‖y‖` by more than `tol`.
pub fn is_norm(
    spec: &NormSpec,
    grid: &ProjectiveGrid,
    pairs: usize,
    seed: u64,
    tol: f64,
) -> Result<ConvexityVerdict> {
    if !(tol > 0.0) {
        return Err(NormError::InvalidParameter(
            "tolerance must be positive".into(),
        ));
    }
    let w = scan_pairs(spec, grid, pairs, seed)?;
    let excess = spec.value(&add(&w.x, &w.y)) - spec.value(&w.x) - spec.value(&w.y);
    if excess > tol {
        Ok(ConvexityVerdict {
            is_norm: false,
            counterexample: Some((w.x, w.y)),
            worst_ratio: w.ratio,
        })
    } else {
        Ok(ConvexityVerdict {
            is_norm: true,
            counterexample: None,
            worst_ratio: w.ratio,
        })
    }
}

/// Inner polyhedral approximation: the hull of `±u/‖u‖` over the grid.
///
/// The hull lies inside the unit ball of a norm, so the approximating gauge
/// dominates `spec` pointwise.
pub fn polyhedral_approx(spec: &NormSpec, grid: &ProjectiveGrid) -> Result<PolytopeBall> {
    let verdict = is_norm(spec, grid, 0, 0, 1e-9)?;
    if !verdict.is_norm {
        return Err(NormError::NotConvex);
    }
    let mut vertices = Vec::with_capacity(2 * grid.len());
    for p in grid.points() {
        let v = scale(p.coords(), 1.0 / spec.value(p.coords()));
        vertices.push(v.iter().map(|c| -c).collect());
        vertices.push(v);
    }
    PolytopeBall::from_vertices(spec.dim(), vertices)
}
