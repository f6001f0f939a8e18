//! The linear structure on quasinorm classes: the Euclidean class is the
//! origin, the geometric mean is the midpoint, `‖·‖₂²/‖·‖_X` is the opposite.
//!
//! In log-profile coordinates every operation is linear: `add` sums profiles,
//! `scalar_mult(θ, ·)` multiplies them by θ and `opposite` negates them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{NormError, Result};
use crate::projgrid::{Direction, ProjectiveGrid};
use crate::qmetric::{
    khare_distance, range_metric, to_log_profile, triple_norm, LogProfile, AXIOM_TOL,
};
use crate::quasinorm::NormSpec;

/// A class representative, optionally scaled so that `‖e1‖ = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassRep {
    pub spec: NormSpec,
    pub normalized_at_e1: bool,
}

/// `‖·‖_X^θ ‖·‖_Y^{1−θ}` for `θ ∈ [0, 1]`.
pub fn interpolate(x: &NormSpec, y: &NormSpec, theta: f64) -> Result<NormSpec> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(NormError::InvalidParameter(format!(
            "interpolation parameter must lie in [0, 1], got {theta}; use scalar multiplication (`scale`) to extrapolate"
        )));
    }
    NormSpec::interp(x.clone(), y.clone(), theta)
}

/// The midpoint `(X, Y)_{1/2}`.
pub fn mean(x: &NormSpec, y: &NormSpec) -> Result<NormSpec> {
    interpolate(x, y, 0.5)
}

pub fn opposite(x: &NormSpec) -> NormSpec {
    NormSpec::opposite(x.clone())
}

/// `θ ⋆ X = ‖·‖_X^θ ‖·‖₂^{1−θ}`; negative θ goes through the opposite.
pub fn scalar_mult(theta: f64, x: &NormSpec) -> Result<NormSpec> {
    let e = NormSpec::euclidean(x.dim());
    if theta >= 0.0 {
        NormSpec::interp(x.clone(), e, theta)
    } else {
        NormSpec::interp(opposite(x), e, -theta)
    }
}

/// `X ⊕ Y = 2 ⋆ (X, Y)_{1/2}`, which evaluates as `‖x‖_X ‖x‖_Y / ‖x‖₂`.
pub fn add(x: &NormSpec, y: &NormSpec) -> Result<NormSpec> {
    scalar_mult(2.0, &mean(x, y)?)
}

pub fn normalize_class(x: &NormSpec) -> Result<ClassRep> {
    let at_e1 = x.value(Direction::basis(x.dim(), 0).coords());
    let spec = if at_e1 == 1.0 {
        x.clone()
    } else {
        NormSpec::scaled(1.0 / at_e1, x.clone())?
    };
    Ok(ClassRep {
        spec,
        normalized_at_e1: true,
    })
}

/// Pointwise limit of a Cauchy sequence of classes, as a normalized profile.
///
/// The tail starts at the first index from which every consecutive gap is
/// below `tol/2`; every pair inside the tail must then be within `tol`. The
/// last profile is returned as the limit representative.
pub fn limit_of_sequence(seq: &[NormSpec], grid: &ProjectiveGrid, tol: f64) -> Result<LogProfile> {
    if seq.len() < 2 {
        return Err(NormError::InvalidParameter(
            "a sequence needs at least 2 terms".into(),
        ));
    }
    if !(tol > 0.0) {
        return Err(NormError::InvalidParameter(
            "tolerance must be positive".into(),
        ));
    }
    let profiles: Vec<LogProfile> = seq
        .iter()
        .map(|s| to_log_profile(s, grid, true))
        .collect::<Result<_>>()?;
    let gaps: Vec<f64> = profiles
        .windows(2)
        .map(|w| range_metric(&w[0], &w[1]))
        .collect::<Result<_>>()?;
    let mut tail = gaps.len();
    while tail > 0 && gaps[tail - 1] < tol / 2.0 {
        tail -= 1;
    }
    if tail >= gaps.len() {
        return Err(NormError::NotCauchy { tol });
    }
    for j in tail..profiles.len() {
        for k in j + 1..profiles.len() {
            if range_metric(&profiles[j], &profiles[k])? > tol {
                return Err(NormError::NotCauchy { tol });
            }
        }
    }
    let limit = profiles.last().cloned().expect("nonempty");
    debug_assert!(limit.values.iter().all(|v| v.is_finite()));
    Ok(limit)
}

/// Sandwich constants `ε‖·‖₂ ≤ ‖·‖ ≤ M‖·‖₂` of a profile on its grid.
pub fn profile_bounds(p: &LogProfile) -> (f64, f64) {
    let lo = p.values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = p.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (lo.exp(), hi.exp())
}

/// Scalars used for the homogeneity check.
pub const HOMOGENEITY_THETAS: [f64; 7] = [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 3.0];

/// Largest deviation observed for each vector-space identity. Distance-based
/// entries are in log units; pointwise ones are relative.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpaceAxiomsReport {
    pub samples: usize,
    pub homogeneity: f64,
    pub additive_invariance: f64,
    pub mean_contraction: f64,
    pub commutativity: f64,
    pub associativity: f64,
    pub identity_law: f64,
    pub inverse_law: f64,
    pub profile_linearity: f64,
    pub max_deviation: f64,
    pub passed: bool,
}

/// Number of seeded points for the pointwise group laws.
pub const POINTWISE_SAMPLES: usize = 1000;

fn rel(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

fn log_d(x: &NormSpec, y: &NormSpec, grid: &ProjectiveGrid) -> Result<f64> {
    Ok(khare_distance(x, y, grid, false)?.mu.ln())
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn space_axioms_report(
    samples: &[NormSpec],
    grid: &ProjectiveGrid,
    seed: u64,
) -> Result<SpaceAxiomsReport> {
    let k = samples.len();
    if k < 3 {
        return Err(NormError::InvalidParameter(format!(
            "need at least 3 specs, got {k}"
        )));
    }
    let n = grid.dim();
    for s in samples {
        if s.dim() != n {
            return Err(NormError::DimensionMismatch {
                expected: n,
                found: s.dim(),
            });
        }
    }
    let e = NormSpec::euclidean(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<Vec<f64>> = (0..POINTWISE_SAMPLES)
        .map(|_| (0..n).map(|_| rng.random_range(-3.0..3.0)).collect())
        .collect();

    let mut homogeneity: f64 = 0.0;
    for x in samples {
        let base = triple_norm(x, grid)?;
        for theta in HOMOGENEITY_THETAS {
            let t = triple_norm(&scalar_mult(theta, x)?, grid)?;
            homogeneity = homogeneity.max((t - theta.abs() * base).abs());
        }
    }

    let mut additive: f64 = 0.0;
    let mut contraction: f64 = 0.0;
    let mut associativity: f64 = 0.0;
    for (i, x) in samples.iter().enumerate() {
        for (j, y) in samples.iter().enumerate() {
            if i == j {
                continue;
            }
            let dxy = log_d(x, y, grid)?;
            for z in samples {
                let lhs = log_d(&add(x, z)?, &add(y, z)?, grid)?;
                additive = additive.max((lhs - dxy).abs());
                let half = log_d(&mean(x, z)?, &mean(y, z)?, grid)?;
                contraction = contraction.max((half - 0.5 * dxy).abs());
                let left = add(&add(x, y)?, z)?;
                let right = add(x, &add(y, z)?)?;
                for p in points.iter().take(POINTWISE_SAMPLES / k.pow(2)) {
                    associativity = associativity.max(rel(left.value(p), right.value(p)));
                }
            }
        }
    }

    let mut commutativity: f64 = 0.0;
    let mut identity: f64 = 0.0;
    let mut inverse: f64 = 0.0;
    let mut linearity: f64 = 0.0;
    for (i, x) in samples.iter().enumerate() {
        let px = to_log_profile(x, grid, true)?;
        let with_e = add(x, &e)?;
        let with_opp = add(x, &opposite(x))?;
        for p in &points {
            identity = identity.max(rel(with_e.value(p), x.value(p)));
            inverse = inverse.max(rel(with_opp.value(p), e.value(p)));
        }
        for theta in HOMOGENEITY_THETAS {
            let scaled: Vec<f64> = px.values.iter().map(|v| theta * v).collect();
            let got = to_log_profile(&scalar_mult(theta, x)?, grid, true)?;
            linearity = linearity.max(max_abs_diff(&got.values, &scaled));
        }
        let neg: Vec<f64> = px.values.iter().map(|v| -v).collect();
        linearity = linearity.max(max_abs_diff(
            &to_log_profile(&opposite(x), grid, true)?.values,
            &neg,
        ));
        for y in &samples[i + 1..] {
            let xy = add(x, y)?;
            let yx = add(y, x)?;
            for p in &points {
                commutativity = commutativity.max(rel(xy.value(p), yx.value(p)));
            }
            let py = to_log_profile(y, grid, true)?;
            let sum: Vec<f64> = px
                .values
                .iter()
                .zip(&py.values)
                .map(|(a, b)| a + b)
                .collect();
            linearity = linearity.max(max_abs_diff(&to_log_profile(&xy, grid, true)?.values, &sum));
        }
    }

    let max_deviation = [
        homogeneity,
        additive,
        contraction,
        commutativity,
        associativity,
        identity,
        inverse,
        linearity,
    ]
    .into_iter()
    .fold(0.0, f64::max);
    Ok(SpaceAxiomsReport {
        samples: k,
        homogeneity,
        additive_invariance: additive,
        mean_contraction: contraction,
        commutativity,
        associativity,
        identity_law: identity,
        inverse_law: inverse,
        profile_linearity: linearity,
        max_deviation,
        passed: max_deviation <= AXIOM_TOL,
    })
}
