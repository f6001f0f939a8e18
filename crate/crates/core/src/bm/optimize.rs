//! Multi-start Nelder–Mead over `GL(n)` for the Banach–Mazur distance.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{NormError, Result};
use crate::linmap::LinearMap;
use crate::projgrid::ProjectiveGrid;
use crate::qmetric::khare_distance;
use crate::quasinorm::NormSpec;

/// Largest dimension accepted by [`bm_distance`].
pub const MAX_DIM: usize = 4;

/// Objective values closer than this are ties.
const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BMResult {
    /// Upper bound for the Banach–Mazur distance (at grid resolution).
    pub distance: f64,
    pub best_map: LinearMap,
    pub starts_used: usize,
    pub converged: bool,
    pub evaluations: usize,
}

struct StartOutcome {
    value: f64,
    entries: Vec<f64>,
    evaluations: usize,
    descended: bool,
}

/// Minimizes `A ↦ d(X, A*Y)` over invertible `A` from `starts` seeded starts,
/// each limited to `budget` objective evaluations.
///
/// Start 0 is the identity; the others are random orthogonal × diagonal
/// matrices drawn from the ChaCha stream `(seed, start)`. Starts run in
/// parallel and are reduced by lowest objective, then lexicographically
/// smallest entries.
pub fn bm_distance(
    x: &NormSpec,
    y: &NormSpec,
    grid: &ProjectiveGrid,
    starts: usize,
    budget: usize,
    seed: u64,
) -> Result<BMResult> {
    let n = x.dim();
    for d in [y.dim(), grid.dim()] {
        if d != n {
            return Err(NormError::DimensionMismatch {
                expected: n,
                found: d,
            });
        }
    }
    if n > MAX_DIM {
        return Err(NormError::InvalidParameter(format!(
            "Banach–Mazur search supports n ≤ {MAX_DIM}, got {n}"
        )));
    }
    if starts == 0 || budget == 0 {
        return Err(NormError::InvalidParameter(
            "starts and budget must be positive".into(),
        ));
    }
    let objective = |a: &[f64]| phi(x, y, grid, n, a);
    let outcomes: Vec<StartOutcome> = (0..starts)
        .into_par_iter()
        .map(|s| {
            let start = start_matrix(n, seed, s);
            let (entries, value, evaluations, descended) = nelder_mead(&objective, start, budget);
            StartOutcome {
                value,
                entries,
                evaluations,
                descended,
            }
        })
        .collect();

    let mut best = &outcomes[0];
    for o in &outcomes[1..] {
        if better(o, best) {
            best = o;
        }
    }
    let best_map = LinearMap::from_matrix(DMatrix::from_row_slice(n, n, &best.entries))?;
    let descended = outcomes.iter().any(|o| o.descended);
    Ok(BMResult {
        distance: best.value,
        best_map,
        starts_used: starts,
        converged: descended || best.value <= 1.0 + TIE_TOL,
        evaluations: outcomes.iter().map(|o| o.evaluations).sum(),
    })
}

/// Lower objective wins, ties broken by smaller entries; a start reaching
/// the lower bound 1 exactly wins outright.
fn better(a: &StartOutcome, b: &StartOutcome) -> bool {
    if (a.value == 1.0) != (b.value == 1.0) {
        return a.value == 1.0;
    }
    if a.value < b.value - TIE_TOL {
        return true;
    }
    if a.value > b.value + TIE_TOL {
        return false;
    }
    for (p, q) in a.entries.iter().zip(&b.entries) {
        if p != q {
            return p < q;
        }
    }
    false
}

/// `d(X, A*Y)`, with `+∞` for singular or non-finite `A`.
fn phi(x: &NormSpec, y: &NormSpec, grid: &ProjectiveGrid, n: usize, a: &[f64]) -> f64 {
    if a.iter().any(|v| !v.is_finite()) {
        return f64::INFINITY;
    }
    let Ok(map) = LinearMap::from_matrix(DMatrix::from_row_slice(n, n, a)) else {
        return f64::INFINITY;
    };
    let Ok(pulled) = NormSpec::pullback(map, y.clone()) else {
        return f64::INFINITY;
    };
    match khare_distance(x, &pulled, grid, false) {
        Ok(w) if w.mu.is_finite() => w.mu.max(1.0),
        _ => f64::INFINITY,
    }
}

/// Row-major entries of the starting matrix for start `index`.
fn start_matrix(n: usize, seed: u64, index: usize) -> Vec<f64> {
    if index == 0 {
        return DMatrix::<f64>::identity(n, n)
            .transpose()
            .as_slice()
            .to_vec();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let g = DMatrix::<f64>::from_fn(n, n, |_, _| rng.sample(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    let d = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            rng.random_range(-0.5f64..0.5).exp()
        } else {
            0.0
        }
    });
    let a = q * d;
    let a = &a / a.norm();
    a.transpose().as_slice().to_vec()
}

fn unit_frobenius(v: &[f64]) -> Vec<f64> {
    let s = v.iter().map(|c| c * c).sum::<f64>().sqrt();
    if s > 0.0 && s.is_finite() {
        v.iter().map(|c| c / s).collect()
    } else {
        v.to_vec()
    }
}

/// Nelder–Mead with restarts from the incumbent until a restart fails to
/// improve it. Returns `(point, value, evaluations, descended)`.
fn nelder_mead(
    f: &(dyn Fn(&[f64]) -> f64 + Sync),
    x0: Vec<f64>,
    budget: usize,
) -> (Vec<f64>, f64, usize, bool) {
    const STEP: f64 = 0.1;
    let d = x0.len();
    let mut evals = 1;
    let mut best_x = x0;
    let mut best_f = f(&best_x);
    let initial = best_f;

    while evals < budget {
        let base = if evals == 1 {
            best_x.clone()
        } else {
            unit_frobenius(&best_x)
        };
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
        let fb = if base == best_x {
            best_f
        } else {
            evals += 1;
            f(&base)
        };
        simplex.push((base.clone(), fb));
        for k in 0..d {
            if evals >= budget {
                break;
            }
            let mut p = base.clone();
            p[k] += STEP;
            let v = f(&p);
            evals += 1;
            simplex.push((p, v));
        }
        if simplex.len() < d + 1 {
            break;
        }
        let round_start = best_f;
        run_simplex(f, &mut simplex, &mut evals, budget);
        let (x, v) = simplex
            .iter()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .cloned()
            .expect("nonempty simplex");
        if v < best_f {
            best_x = x;
            best_f = v;
        }
        if !(best_f < round_start - TIE_TOL) || best_f <= 1.0 + TIE_TOL {
            break;
        }
    }
    let descended = best_f < initial - TIE_TOL;
    (best_x, best_f, evals, descended)
}

fn run_simplex(
    f: &(dyn Fn(&[f64]) -> f64 + Sync),
    s: &mut [(Vec<f64>, f64)],
    evals: &mut usize,
    budget: usize,
) {
    let d = s.len() - 1;
    let point = |c: &[f64], w: &[f64], t: f64| -> Vec<f64> {
        c.iter().zip(w).map(|(ci, wi)| ci + t * (wi - ci)).collect()
    };
    while *evals < budget {
        s.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = s[d].1 - s[0].1;
        let size = s[1..]
            .iter()
            .map(|(p, _)| {
                p.iter()
                    .zip(&s[0].0)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if (spread.is_finite() && spread <= 1e-14) && size <= 1e-10 || size <= 1e-13 {
            return;
        }
        let mut centroid = vec![0.0; s[0].0.len()];
        for (p, _) in &s[..d] {
            for (c, v) in centroid.iter_mut().zip(p) {
                *c += v / d as f64;
            }
        }
        let worst = s[d].0.clone();
        let xr = point(&centroid, &worst, -1.0);
        let fr = f(&xr);
        *evals += 1;
        if fr < s[0].1 {
            let xe = point(&centroid, &worst, -2.0);
            let fe = f(&xe);
            *evals += 1;
            s[d] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < s[d - 1].1 {
            s[d] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < s[d].1 {
            let xc = point(&centroid, &xr, 0.5);
            let v = f(&xc);
            (xc, v)
        } else {
            let xc = point(&centroid, &worst, 0.5);
            let v = f(&xc);
            (xc, v)
        };
        *evals += 1;
        if fc < s[d].1.min(fr) {
            s[d] = (xc, fc);
            continue;
        }
        let best = s[0].0.clone();
        for item in s[1..].iter_mut() {
            if *evals >= budget {
                return;
            }
            let p = point(&best, &item.0, 0.5);
            let v = f(&p);
            *evals += 1;
            *item = (p, v);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projgrid::make_grid;

    #[test]
    fn identical_norms_stop_at_identity() {
        let g = make_grid(2, 180, 0).unwrap();
        let x = NormSpec::lp(2, 3.0).unwrap();
        let r = bm_distance(&x, &x, &g, 4, 500, 0).unwrap();
        assert_eq!(r.distance, 1.0);
        assert!(r.converged);
    }

    #[test]
    fn starts_are_seeded() {
        assert_eq!(start_matrix(3, 9, 2), start_matrix(3, 9, 2));
        assert_ne!(start_matrix(3, 9, 2), start_matrix(3, 9, 3));
        assert_ne!(start_matrix(3, 9, 2), start_matrix(3, 10, 2));
        let a = start_matrix(3, 9, 2);
        assert!((a.iter().map(|v| v * v).sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_large_dimension() {
        let g = make_grid(5, 20, 0).unwrap();
        let x = NormSpec::euclidean(5);
        assert!(bm_distance(&x, &x, &g, 1, 10, 0).is_err());
    }
}
