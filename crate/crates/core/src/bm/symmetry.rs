//! A nearby norm with only `±Id` as isometries.
//!
//! Starting from a polytope ball `B_X`:
//!
//! 1. pick exposed extreme points `x_1..x_n` forming a basis;
//! 2. enlarge the ball to `B_{X'} = conv(B_X ∪ ±x_{n+1})` with
//!    `x_{n+1} = (1+δ)·s/‖s‖_X`, `s = x_1 + … + x_n`;
//! 3. overlay at each `x_i` a smooth bump `‖·‖_i`, an `ℓ_{2i+2}` norm in a
//!    basis `x_i, u_2, …, u_n` with `u_j ∈ ker f_i` (`f_i` exposing `x_i`):
//!    `‖Σλ_j u_j‖_i = ‖((1+ε_i)λ_1, λ_2/M_i, …, λ_n/M_i)‖_{2i+2}`;
//! 4. return `‖·‖_Y = max(‖·‖_{X'}, ‖·‖_1, …, ‖·‖_{n+1})`.
//!
//! The bump regions `V_i = {‖·‖_i > ‖·‖_{X'}}` must have strictly decreasing
//! diameters, all smaller than the gaps between regions, and representatives
//! in general position. `ε_i` is halved (and `M_i` doubled) per bump until
//! the diameters decrease; a failed check restarts with `δ`, `ε` halved and
//! `M` doubled.

use serde::Serialize;

use crate::error::{NormError, Result};
use crate::linalg::{matrix_from_rows, neg, norm2, orthogonal_complement, scale, sub};
use crate::linmap::LinearMap;
use crate::projgrid::{make_grid, ProjectiveGrid};
use crate::qmetric::khare_distance;
use crate::quasinorm::{extreme_points, is_exposed, polyhedral_approx, NormSpec, PolytopeBall};

use super::isometry::{general_position, isometry_group, IsometryReport, MAX_ISOMETRY_VERTICES};

/// Restarts of the whole construction before giving up.
pub const MAX_ROUNDS: usize = 10;
/// Per-bump halvings of `ε_i` while enforcing decreasing diameters.
const MAX_HALVINGS: usize = 60;
/// Required shrink factor between consecutive diameters during tuning.
const DIAMETER_MARGIN: f64 = 0.75;
/// Representatives per region used for the general-position check.
const MAX_REPRESENTATIVES: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bump {
    pub center: Vec<f64>,
    /// Exposing functional of the center on `B_{X'}`.
    pub functional: Vec<f64>,
    pub exponent: f64,
    pub epsilon: f64,
    #[serde(rename = "M")]
    pub m: f64,
    /// Diameter of the region in `‖·‖_Y`.
    pub diameter: f64,
    /// Center and region boundary points, on the `Y` sphere.
    pub representatives: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetryBreak {
    #[serde(skip)]
    pub spec: NormSpec,
    pub delta: f64,
    pub bumps: Vec<Bump>,
    /// Smallest `‖·‖_Y` gap between two of the regions `±V_i`.
    pub min_separation: f64,
    pub general_position: bool,
    /// Polished Khare distance to the original gauge.
    pub distance: f64,
    /// Group of the polyhedral approximation of `Y` on the verification grid.
    pub group: IsometryReport,
    /// Group order for `X'` on the same verification grid.
    pub control_group_order: usize,
    pub verification_grid_size: usize,
    pub rounds: usize,
}

pub fn symmetry_break(
    ball: &PolytopeBall,
    epsilon_target: f64,
    seed: u64,
) -> Result<SymmetryBreak> {
    if !(epsilon_target > 0.0 && epsilon_target.is_finite()) {
        return Err(NormError::InvalidParameter(format!(
            "epsilon_target must be positive, got {epsilon_target}"
        )));
    }
    let n = ball.dim();
    let basis = exposed_basis(ball)?;
    let check_grid = make_grid(n, if n == 2 { 720 } else { 2000 }, seed)?;
    let delta0 = epsilon_target / 4.0;
    let mut failed = "";
    for round in 0..MAX_ROUNDS {
        let shrink = 0.5f64.powi(round as i32);
        match attempt(ball, &basis, delta0, shrink, epsilon_target, &check_grid)? {
            Ok(mut out) => {
                out.rounds = round + 1;
                return Ok(out);
            }
            Err(check) => failed = check,
        }
    }
    Err(NormError::ConstructionFailed(format!(
        "{failed} check failed after {MAX_ROUNDS} rounds"
    )))
}

/// Exposed extreme points forming a basis, greedily in storage order.
fn exposed_basis(ball: &PolytopeBall) -> Result<Vec<Vec<f64>>> {
    let n = ball.dim();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n);
    for v in extreme_points(ball) {
        let mut rows = basis.clone();
        rows.push(v.clone());
        if crate::linalg::rank(&rows, 1e-10) == rows.len() && is_exposed(ball, &v)?.0 {
            basis.push(v);
            if basis.len() == n {
                return Ok(basis);
            }
        }
    }
    Err(NormError::ConstructionFailed(
        "no basis of exposed extreme points".into(),
    ))
}

/// One pass of the construction. The inner error names the failed check.
fn attempt(
    ball: &PolytopeBall,
    basis: &[Vec<f64>],
    delta0: f64,
    shrink: f64,
    epsilon_target: f64,
    check_grid: &ProjectiveGrid,
) -> Result<std::result::Result<SymmetryBreak, &'static str>> {
    let n = ball.dim();
    let x_spec = NormSpec::polytope(ball.clone());
    let delta = delta0 * shrink;
    let s = basis
        .iter()
        .fold(vec![0.0; n], |acc, v| crate::linalg::add(&acc, v));
    let apex = scale(&s, (1.0 + delta) / x_spec.value(&s));

    let mut verts = extreme_points(ball);
    verts.push(apex.clone());
    verts.push(neg(&apex));
    let enlarged = PolytopeBall::from_vertices(n, verts)?;
    let mut centers: Vec<Vec<f64>> = basis.to_vec();
    centers.push(apex);
    let ext = extreme_points(&enlarged);
    if !centers
        .iter()
        .all(|c| ext.iter().any(|e| norm2(&sub(e, c)) <= 1e-9 * norm2(c)))
    {
        return Ok(Err("extreme points"));
    }
    let xp = NormSpec::polytope(enlarged.clone());

    let mut bump_specs: Vec<NormSpec> = Vec::with_capacity(n + 1);
    let mut params: Vec<(Vec<f64>, f64, f64, f64)> = Vec::with_capacity(n + 1);
    let mut prev = f64::INFINITY;
    for (i, c) in centers.iter().enumerate() {
        let k = (i + 1) as i32;
        let p = f64::from(2 * k + 2);
        let Some(f) = is_exposed(&enlarged, c)?.1 else {
            return Ok(Err("exposed centers"));
        };
        let mut cols = vec![c.clone()];
        for u in orthogonal_complement(&f) {
            cols.push(scale(&u, 1.0 / xp.value(&u)));
        }
        let to_coords = LinearMap::from_matrix(matrix_from_rows(&cols).transpose())?.inverse()?;
        let mut eps = delta0 * shrink / 2f64.powi(k);
        let mut m = 8.0 * 2f64.powi(k) / shrink;
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let mut weights = vec![1.0 / m; n];
            weights[0] = 1.0 + eps;
            let bump = NormSpec::pullback(to_coords.clone(), NormSpec::weighted_lp(p, weights)?)?;
            let dirs = region(&bump, &xp, c, None);
            let diam = diameter(&dirs, &xp);
            if diam < DIAMETER_MARGIN * prev {
                prev = diam;
                accepted = Some(bump);
                break;
            }
            eps /= 2.0;
            m *= 2.0;
        }
        let Some(bump) = accepted else {
            return Ok(Err("decreasing diameters"));
        };
        bump_specs.push(bump);
        params.push((f, p, eps, m));
    }

    let mut parts = vec![xp.clone()];
    parts.extend(bump_specs.iter().cloned());
    let y = NormSpec::max_of(parts)?;

    let mut bumps: Vec<Bump> = Vec::with_capacity(n + 1);
    let mut regions: Vec<Vec<Vec<f64>>> = Vec::with_capacity(n + 1);
    for ((c, bump), (f, p, eps, m)) in centers.iter().zip(&bump_specs).zip(params) {
        let dirs = region(bump, &xp, c, None);
        let diam = diameter(&dirs, &y);
        let on_sphere: Vec<Vec<f64>> = dirs.iter().map(|u| scale(u, 1.0 / y.value(u))).collect();
        regions.push(on_sphere.clone());
        bumps.push(Bump {
            center: c.clone(),
            functional: f,
            exponent: p,
            epsilon: eps,
            m,
            diameter: diam,
            representatives: on_sphere,
        });
    }
    if bumps.windows(2).any(|w| !(w[1].diameter < w[0].diameter)) {
        return Ok(Err("decreasing diameters"));
    }

    let min_separation = separation(&regions, &y);
    let max_diam = bumps.iter().map(|b| b.diameter).fold(0.0, f64::max);
    if !(max_diam < min_separation) {
        return Ok(Err("separation"));
    }
    if !representatives_in_general_position(&regions) {
        return Ok(Err("general position"));
    }

    let distance = khare_distance(&y, &x_spec, check_grid, true)?.mu;
    if distance > 1.0 + epsilon_target {
        return Ok(Err("distance"));
    }

    let Some((vgrid, approx)) = verification_polytope(&y, &bump_specs, &xp, &centers)? else {
        return Ok(Err("verification size"));
    };
    let group = isometry_group(&approx, check_grid)?;
    if !group.trivial {
        return Ok(Err("trivial isometry group"));
    }
    let control = isometry_group(&polyhedral_approx(&xp, &vgrid)?, check_grid)?;

    Ok(Ok(SymmetryBreak {
        spec: y,
        delta,
        bumps,
        min_separation,
        general_position: true,
        distance,
        group,
        control_group_order: control.order,
        verification_grid_size: vgrid.len(),
        rounds: 0,
    }))
}

/// Unit tangent directions at the unit vector `c` used to probe a region.
fn tangents(c: &[f64]) -> Vec<Vec<f64>> {
    let comp = orthogonal_complement(c);
    match comp.len() {
        1 => vec![comp[0].clone(), neg(&comp[0])],
        2 => (0..16)
            .map(|k| {
                let (s, co) = (k as f64 * std::f64::consts::PI / 8.0).sin_cos();
                crate::linalg::add(&scale(&comp[0], co), &scale(&comp[1], s))
            })
            .collect(),
        _ => {
            let mut out = Vec::new();
            for a in 0..comp.len() {
                out.push(comp[a].clone());
                out.push(neg(&comp[a]));
                for b in a + 1..comp.len() {
                    for (sa, sb) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                        let v = crate::linalg::add(&scale(&comp[a], sa), &scale(&comp[b], sb));
                        out.push(scale(&v, 1.0 / norm2(&v)));
                    }
                }
            }
            out
        }
    }
}

/// The center direction of a region followed by one boundary direction per
/// probing tangent. With `fraction`, points that fraction of the way to the
/// boundary are returned instead.
fn region(bump: &NormSpec, xp: &NormSpec, center: &[f64], fraction: Option<f64>) -> Vec<Vec<f64>> {
    let c = scale(center, 1.0 / norm2(center));
    let active = |u: &[f64]| bump.value(u) > xp.value(u);
    let along = |t: &[f64], s: f64| -> Vec<f64> {
        let (sn, cs) = s.sin_cos();
        crate::linalg::add(&scale(&c, cs), &scale(t, sn))
    };
    let mut out = vec![c.clone()];
    for t in tangents(&c) {
        let mut hi = 1e-9;
        while hi < std::f64::consts::FRAC_PI_2 && active(&along(&t, hi)) {
            hi *= 2.0;
        }
        let hi_max = hi.min(std::f64::consts::FRAC_PI_2);
        let mut lo = 0.0;
        let mut hi = hi_max;
        if active(&along(&t, hi)) {
            lo = hi;
        } else {
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if active(&along(&t, mid)) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
        }
        out.push(along(&t, lo * fraction.unwrap_or(1.0)));
    }
    out
}

/// Largest `‖a − b‖_Z` between the points `u/‖u‖_Z`.
fn diameter(dirs: &[Vec<f64>], z: &NormSpec) -> f64 {
    let pts: Vec<Vec<f64>> = dirs.iter().map(|u| scale(u, 1.0 / z.value(u))).collect();
    let mut d: f64 = 0.0;
    for (i, a) in pts.iter().enumerate() {
        for b in &pts[i + 1..] {
            d = d.max(z.value(&sub(a, b)));
        }
    }
    d
}

/// Smallest `‖a − b‖_Y` between sample points of distinct regions among
/// `V_1, −V_1, …, V_{n+1}, −V_{n+1}`.
fn separation(regions: &[Vec<Vec<f64>>], y: &NormSpec) -> f64 {
    let mut all: Vec<Vec<Vec<f64>>> = Vec::with_capacity(2 * regions.len());
    for r in regions {
        all.push(r.clone());
        all.push(r.iter().map(|p| neg(p)).collect());
    }
    let mut best = f64::INFINITY;
    for (i, a) in all.iter().enumerate() {
        for b in &all[i + 1..] {
            for p in a {
                for q in b {
                    best = best.min(y.value(&sub(p, q)));
                }
            }
        }
    }
    best
}

/// Every choice of one representative per region is in general position.
fn representatives_in_general_position(regions: &[Vec<Vec<f64>>]) -> bool {
    let reps: Vec<Vec<Vec<f64>>> = regions
        .iter()
        .map(|r| {
            let stride = r.len().div_ceil(MAX_REPRESENTATIVES).max(1);
            r.iter().step_by(stride).cloned().collect()
        })
        .collect();
    let mut choice = vec![0usize; reps.len()];
    loop {
        let pts: Vec<Vec<f64>> = choice
            .iter()
            .zip(&reps)
            .map(|(&k, r)| r[k].clone())
            .collect();
        if !general_position(&pts) {
            return false;
        }
        let mut i = 0;
        loop {
            if i == reps.len() {
                return true;
            }
            choice[i] += 1;
            if choice[i] < reps[i].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// A sparse grid of directions inside the bump regions (each center plus
/// points halfway to the region boundary) and the polyhedral approximation
/// of `Y` on it, kept within the isometry-search cap.
fn verification_polytope(
    y: &NormSpec,
    bumps: &[NormSpec],
    xp: &NormSpec,
    centers: &[Vec<f64>],
) -> Result<Option<(ProjectiveGrid, PolytopeBall)>> {
    let n = y.dim();
    let per_region = MAX_ISOMETRY_VERTICES / (2 * centers.len());
    for extra in (0..per_region.max(1)).rev() {
        let mut dirs = Vec::new();
        for (bump, c) in bumps.iter().zip(centers) {
            let pts = region(bump, xp, c, Some(0.5));
            dirs.extend(pts.into_iter().take(extra + 1));
        }
        let vgrid = ProjectiveGrid::from_directions(n, &dirs)?;
        let approx = polyhedral_approx(y, &vgrid)?;
        if extreme_points(&approx).len() <= MAX_ISOMETRY_VERTICES {
            return Ok(Some((vgrid, approx)));
        }
    }
    Ok(None)
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

    #[test]
    fn square_loses_its_symmetries() {
        let out = symmetry_break(&square(), 0.05, 0).unwrap();
        assert!(out.distance <= 1.05, "{}", out.distance);
        assert!(out.group.trivial);
        assert_eq!(out.group.order, 2);
        assert_eq!(out.control_group_order, 4);
        assert_eq!(out.bumps.len(), 3);
        assert!(out.bumps.windows(2).all(|w| w[1].diameter < w[0].diameter));
        assert!(out.general_position);
        let exps: Vec<f64> = out.bumps.iter().map(|b| b.exponent).collect();
        assert_eq!(exps, vec![4.0, 6.0, 8.0]);
    }

    #[test]
    fn agrees_with_enlarged_ball_away_from_bumps() {
        let out = symmetry_break(&square(), 0.05, 0).unwrap();
        let NormSpec::MaxOf(parts) = &out.spec else {
            panic!("expected a max of norms")
        };
        let xp = &parts[0];
        let g = make_grid(2, 720, 0).unwrap();
        let mut outside = 0;
        for p in g.points() {
            let u = p.coords();
            if parts[1..].iter().all(|b| b.value(u) <= xp.value(u)) {
                assert_eq!(out.spec.value(u), xp.value(u));
                outside += 1;
            }
        }
        assert!(outside > g.len() / 2);
    }

    #[test]
    fn rejects_bad_target() {
        assert!(symmetry_break(&square(), 0.0, 0).is_err());
        assert!(symmetry_break(&square(), f64::NAN, 0).is_err());
    }
}
