//! Khare's multiplicative distance between quasinorm classes, the norm
//! `|||X||| = log₂ d(X, ℓ₂)`, and the log-profile model in which the distance
//! becomes the range `max(f − g) − min(f − g)`.

use serde::Serialize;

use crate::error::{NormError, Result};
use crate::linalg::orthogonal_complement;
use crate::projgrid::{canonicalize, Direction, ProjectiveGrid};
use crate::quasinorm::NormSpec;

/// Polishing stops after this many evaluations per witness.
pub const POLISH_MAX_EVALS: usize = 200;
/// Polishing stops once the step falls below this angle.
pub const POLISH_MIN_STEP: f64 = 1e-10;

/// The distance `μ` with the scaling `λ` and the directions where
/// `‖·‖_X ≤ λ‖·‖_Y ≤ μ‖·‖_X` is tight on each side.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricWitness {
    pub mu: f64,
    pub lambda: f64,
    /// `‖u‖_X / ‖u‖_Y = λ` here.
    pub argmax_dir: Direction,
    /// `‖u‖_X / ‖u‖_Y = λ/μ` here.
    pub argmin_dir: Direction,
    pub grid_size: usize,
    pub refined: bool,
}

/// `u ↦ ln ‖u‖_X` on the unit sphere, sampled on a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogProfile {
    pub grid: ProjectiveGrid,
    pub values: Vec<f64>,
    /// Value at `e1` subtracted, so that entry is exactly 0.
    pub normalized: bool,
}

fn check_pair(x: &NormSpec, y: &NormSpec, grid: &ProjectiveGrid) -> Result<()> {
    for d in [y.dim(), grid.dim()] {
        if d != x.dim() {
            return Err(NormError::DimensionMismatch {
                expected: x.dim(),
                found: d,
            });
        }
    }
    Ok(())
}

fn argmax_lowest(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// Multiplicative distance `d(X, Y)` on `grid`, optionally polished.
///
/// On the grid alone `μ` is a lower bound for the true distance; polishing
/// only moves witnesses to directions with a larger (resp. smaller) ratio, so
/// it never decreases `μ`.
pub fn khare_distance(
    x: &NormSpec,
    y: &NormSpec,
    grid: &ProjectiveGrid,
    polish: bool,
) -> Result<MetricWitness> {
    check_pair(x, y, grid)?;
    let ratio = |u: &[f64]| x.log_direction(u) - y.log_direction(u);
    let r: Vec<f64> = grid.points().iter().map(|p| ratio(p.coords())).collect();
    let imax = argmax_lowest(&r);
    let neg: Vec<f64> = r.iter().map(|v| -v).collect();
    let imin = argmax_lowest(&neg);

    let mut top = (r[imax], grid.points()[imax].coords().to_vec());
    let mut bottom = (r[imin], grid.points()[imin].coords().to_vec());
    if polish {
        let step = initial_step(grid);
        top = climb(&ratio, top, step, 1.0);
        let (v, u) = climb(&ratio, (-bottom.0, bottom.1), step, -1.0);
        bottom = (-v, u);
    }
    Ok(MetricWitness {
        mu: (top.0 - bottom.0).exp(),
        lambda: top.0.exp(),
        argmax_dir: canonicalize(&top.1)?,
        argmin_dir: canonicalize(&bottom.1)?,
        grid_size: grid.len(),
        refined: polish,
    })
}

/// Typical spacing of the grid, used as the first polishing step.
pub(crate) fn initial_step(grid: &ProjectiveGrid) -> f64 {
    let n = grid.dim() as f64;
    let per_axis = (grid.len() as f64).powf(1.0 / (n - 1.0)).max(1.0);
    (std::f64::consts::PI / per_axis).min(0.5)
}

/// Compass search on the sphere maximizing `sign · f`. Returns the best
/// `(sign · f, point)`; the input is returned unchanged if nothing improves.
pub(crate) fn climb(
    f: &dyn Fn(&[f64]) -> f64,
    start: (f64, Vec<f64>),
    mut step: f64,
    sign: f64,
) -> (f64, Vec<f64>) {
    let (mut best, mut u) = start;
    let mut evals = 0;
    while step >= POLISH_MIN_STEP && evals < POLISH_MAX_EVALS {
        let tangents = orthogonal_complement(&u);
        let mut moved = false;
        'dirs: for t in &tangents {
            for s in [1.0, -1.0] {
                if evals >= POLISH_MAX_EVALS {
                    break 'dirs;
                }
                let (sn, cs) = (s * step).sin_cos();
                let cand: Vec<f64> = u.iter().zip(t).map(|(a, b)| cs * a + sn * b).collect();
                let v = sign * f(&cand);
                evals += 1;
                if v > best {
                    best = v;
                    u = cand;
                    moved = true;
                    break 'dirs;
                }
            }
        }
        if !moved {
            step /= 2.0;
        }
    }
    (best, u)
}

/// `|||X||| = log₂ d(X, ℓ₂)` on the grid (no polishing, so it is grid-exact).
pub fn triple_norm(x: &NormSpec, grid: &ProjectiveGrid) -> Result<f64> {
    let e = NormSpec::euclidean(x.dim());
    Ok(khare_distance(x, &e, grid, false)?.mu.log2())
}

pub fn to_log_profile(x: &NormSpec, grid: &ProjectiveGrid, normalize: bool) -> Result<LogProfile> {
    let mut values = x.log_profile_values(grid)?;
    if normalize {
        let base = values[grid.e1_index()];
        for v in values.iter_mut() {
            *v -= base;
        }
    }
    Ok(LogProfile {
        grid: grid.clone(),
        values,
        normalized: normalize,
    })
}

pub fn from_log_profile(p: &LogProfile) -> Result<NormSpec> {
    NormSpec::profile(p.grid.clone(), p.values.clone())
}

/// `max(f − g) − min(f − g)`: the Khare distance in log form.
pub fn range_metric(f: &LogProfile, g: &LogProfile) -> Result<f64> {
    if f.grid != g.grid {
        return Err(NormError::GridMismatch);
    }
    let mut hi = f64::NEG_INFINITY;
    let mut lo = f64::INFINITY;
    for (a, b) in f.values.iter().zip(&g.values) {
        let d = a - b;
        hi = hi.max(d);
        lo = lo.min(d);
    }
    Ok(hi - lo)
}

/// Worst deviations from the multiplicative-metric axioms over a spec family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricAxiomsReport {
    pub specs: usize,
    /// `max |d(X,X) − 1|`.
    pub identity_deviation: f64,
    /// `max |d(X,Y) − d(Y,X)|`.
    pub symmetry_deviation: f64,
    /// `min d(X,Z)·d(Z,Y) / d(X,Y)`; at least 1 for a multiplicative metric.
    pub triangle_slack: f64,
    pub passed: bool,
}

/// Axiom tolerance for grid-exact identities.
pub const AXIOM_TOL: f64 = 1e-9;

pub fn metric_axioms_report(
    specs: &[NormSpec],
    grid: &ProjectiveGrid,
) -> Result<MetricAxiomsReport> {
    if specs.len() < 3 {
        return Err(NormError::InvalidParameter(format!(
            "need at least 3 specs, got {}",
            specs.len()
        )));
    }
    let k = specs.len();
    let mut d = vec![vec![1.0; k]; k];
    for i in 0..k {
        for j in 0..k {
            d[i][j] = khare_distance(&specs[i], &specs[j], grid, false)?.mu;
        }
    }
    let mut identity: f64 = 0.0;
    let mut symmetry: f64 = 0.0;
    let mut slack = f64::INFINITY;
    for i in 0..k {
        identity = identity.max((d[i][i] - 1.0).abs());
        for j in 0..k {
            symmetry = symmetry.max((d[i][j] - d[j][i]).abs());
            for z in 0..k {
                slack = slack.min(d[i][z] * d[z][j] / d[i][j]);
            }
        }
    }
    Ok(MetricAxiomsReport {
        specs: k,
        identity_deviation: identity,
        symmetry_deviation: symmetry,
        triangle_slack: slack,
        passed: identity <= AXIOM_TOL && symmetry <= AXIOM_TOL && slack >= 1.0 - AXIOM_TOL,
    })
}
