//! Canonical representatives of the projective space `P_{n-1}` and finite
//! sampling grids on it.
//!
//! A direction is a unit vector whose first nonzero coordinate is strictly
//! positive, so `v`, `-v` and `3v` all map to the same representative. Every
//! quasinorm class is a function on these directions.

use serde::{Deserialize, Serialize};

use crate::error::{NormError, Result};
use crate::linalg::{dot, norm2, orthogonal_complement};

/// Geodesic distance below which two directions are the same grid point.
pub const DEDUP_TOL: f64 = 1e-10;

const GOLDEN_ANGLE: f64 = 2.399_963_229_728_653;
const PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// A point of `P_{n-1}`: unit Euclidean length, first nonzero coordinate > 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Direction(Vec<f64>);

impl Direction {
    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// The canonical basis direction `e_k`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = vec![0.0; dim];
        v[k] = 1.0;
        Direction(v)
    }

    /// Distance in `P_{n-1}`: the angle between the lines, in `[0, π/2]`.
    pub fn geodesic(&self, other: &Direction) -> f64 {
        projective_distance(&self.0, &other.0)
    }
}

impl AsRef<[f64]> for Direction {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Angle between the lines spanned by two unit vectors.
///
/// Computed from chord lengths rather than `acos` so that nearby points keep
/// full relative precision.
pub fn projective_distance(u: &[f64], v: &[f64]) -> f64 {
    let mut minus = 0.0;
    let mut plus = 0.0;
    for (a, b) in u.iter().zip(v) {
        minus += (a - b) * (a - b);
        plus += (a + b) * (a + b);
    }
    let chord = minus.min(plus).sqrt();
    2.0 * (chord / 2.0).min(1.0).asin()
}

/// Maps a nonzero vector to its canonical projective representative.
pub fn canonicalize(v: &[f64]) -> Result<Direction> {
    if v.iter().any(|x| !x.is_finite()) {
        return Err(NormError::InvalidParameter("non-finite coordinate".into()));
    }
    let sq = dot(v, v);
    if sq == 0.0 {
        return Err(NormError::NotProjectivePoint);
    }
    // Already-unit input keeps its bits, which makes canonicalization idempotent.
    let mut out: Vec<f64> = if (sq - 1.0).abs() <= 4.0 * f64::EPSILON {
        v.to_vec()
    } else {
        let len = sq.sqrt();
        v.iter().map(|x| x / len).collect()
    };
    let lead = out.iter().copied().find(|x| *x != 0.0).unwrap_or(0.0);
    if lead < 0.0 {
        for x in out.iter_mut() {
            *x = -*x;
        }
    }
    for x in out.iter_mut() {
        if *x == 0.0 {
            *x = 0.0; // normalize -0.0
        }
    }
    Ok(Direction(out))
}

/// A finite, deterministic sample of `P_{n-1}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectiveGrid {
    dim: usize,
    resolution: usize,
    seed: u64,
    points: Vec<Direction>,
}

impl ProjectiveGrid {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn points(&self) -> &[Direction] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Index of `e1`, which every grid contains.
    pub fn e1_index(&self) -> usize {
        let e1 = Direction::basis(self.dim, 0);
        self.points
            .iter()
            .position(|p| *p == e1)
            .expect("grid invariant: contains e1")
    }

    /// Builds a grid from arbitrary directions: canonicalizes, prepends `e1`
    /// and drops duplicates (first occurrence wins).
    pub fn from_directions(dim: usize, dirs: &[Vec<f64>]) -> Result<Self> {
        if dim < 2 {
            return Err(NormError::InvalidParameter(format!(
                "grid dimension must be at least 2, got {dim}"
            )));
        }
        let mut points = vec![Direction::basis(dim, 0)];
        for d in dirs {
            if d.len() != dim {
                return Err(NormError::DimensionMismatch {
                    expected: dim,
                    found: d.len(),
                });
            }
            push_unique(&mut points, canonicalize(d)?);
        }
        let resolution = points.len();
        Ok(ProjectiveGrid {
            dim,
            resolution,
            seed: 0,
            points,
        })
    }

    /// Reassembles a serialized grid, checking that every point is a
    /// canonical representative, that the points are distinct and that `e1`
    /// is present.
    pub fn from_parts(
        dim: usize,
        resolution: usize,
        seed: u64,
        points: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if dim < 2 {
            return Err(NormError::InvalidParameter(format!(
                "grid dimension must be at least 2, got {dim}"
            )));
        }
        let mut out: Vec<Direction> = Vec::with_capacity(points.len());
        for (i, p) in points.into_iter().enumerate() {
            if p.len() != dim {
                return Err(NormError::DimensionMismatch {
                    expected: dim,
                    found: p.len(),
                });
            }
            let c = canonicalize(&p)?;
            if c.coords() != p.as_slice() {
                return Err(NormError::InvalidParameter(format!(
                    "grid point {i} is not a canonical unit representative"
                )));
            }
            if !push_unique(&mut out, c) {
                return Err(NormError::InvalidParameter(format!(
                    "grid point {i} duplicates an earlier point"
                )));
            }
        }
        if !out.contains(&Direction::basis(dim, 0)) {
            return Err(NormError::InvalidParameter("grid must contain e1".into()));
        }
        Ok(ProjectiveGrid {
            dim,
            resolution,
            seed,
            points: out,
        })
    }

    /// Nearest grid point and its projective distance.
    pub fn nearest(&self, u: &[f64]) -> (usize, f64) {
        let mut best = (0, f64::INFINITY);
        for (i, p) in self.points.iter().enumerate() {
            let d = projective_distance(p.coords(), u);
            if d < best.1 {
                best = (i, d);
            }
        }
        best
    }

    /// True when every point of `self` is (up to dedup tolerance) in `other`.
    pub fn is_subset_of(&self, other: &ProjectiveGrid) -> bool {
        self.points
            .iter()
            .all(|p| other.points.iter().any(|q| p.geodesic(q) < DEDUP_TOL))
    }
}

fn push_unique(points: &mut Vec<Direction>, d: Direction) -> bool {
    if points.iter().any(|p| p.geodesic(&d) < DEDUP_TOL) {
        false
    } else {
        points.push(d);
        true
    }
}

/// Deterministic grid on `P_{n-1}` with roughly `m` points.
///
/// * `n = 2`: the angles `kπ/m`, `k = 0..m` (seed ignored).
/// * `n = 3`: `e1` followed by an `m - 1` point Fibonacci lattice on the
///   upper hemisphere, rotated in azimuth by a seed-derived angle.
/// * `n ≥ 4`: `e1` followed by a seed-shifted Halton sequence pushed to the
///   sphere through Box–Muller.
pub fn make_grid(n: usize, m: usize, seed: u64) -> Result<ProjectiveGrid> {
    if n < 2 {
        return Err(NormError::InvalidParameter(format!(
            "grid dimension must be at least 2, got {n}"
        )));
    }
    if m < 4 {
        return Err(NormError::InvalidParameter(format!(
            "grid resolution must be at least 4, got {m}"
        )));
    }
    let points = match n {
        2 => circle_points(m),
        3 => fibonacci_hemisphere(m, seed),
        _ => halton_sphere(n, m, seed),
    };
    Ok(ProjectiveGrid {
        dim: n,
        resolution: m,
        seed: if n == 2 { 0 } else { seed },
        points,
    })
}

fn circle_points(m: usize) -> Vec<Direction> {
    (0..m)
        .map(|k| {
            let angle = k as f64 * std::f64::consts::PI / m as f64;
            let (s, c) = angle.sin_cos();
            let mut v = vec![snap(c), snap(s)];
            if 2 * k == m {
                v = vec![0.0, 1.0];
            }
            canonicalize(&v).expect("unit circle point")
        })
        .collect()
}

fn snap(x: f64) -> f64 {
    if x.abs() < 1e-15 {
        0.0
    } else {
        x
    }
}

fn fibonacci_hemisphere(m: usize, seed: u64) -> Vec<Direction> {
    let mut points = vec![Direction::basis(3, 0)];
    let offset = unit_fraction(seed) * std::f64::consts::TAU;
    let count = m - 1;
    let mut i = 0usize;
    while points.len() < m {
        // Extra indices only come into play if a point collides with e1.
        let z = (i as f64 + 0.5) / (count as f64 + (i / count.max(1)) as f64 * 0.5);
        let z = z.min(1.0 - 1e-12);
        let r = (1.0 - z * z).sqrt();
        let phi = i as f64 * GOLDEN_ANGLE + offset;
        let v = [r * phi.cos(), r * phi.sin(), z];
        push_unique(
            &mut points,
            canonicalize(&v).expect("nonzero lattice point"),
        );
        i += 1;
    }
    points
}

fn halton_sphere(n: usize, m: usize, seed: u64) -> Vec<Direction> {
    let mut points = vec![Direction::basis(n, 0)];
    let pairs = n.div_ceil(2);
    let shift: Vec<f64> = (0..2 * pairs)
        .map(|k| unit_fraction(seed.wrapping_add(k as u64 + 1)))
        .collect();
    let mut index = 1u64;
    while points.len() < m {
        let mut g = Vec::with_capacity(2 * pairs);
        for p in 0..pairs {
            let u1 = (radical_inverse(index, PRIMES[2 * p]) + shift[2 * p]).fract();
            let u2 = (radical_inverse(index, PRIMES[2 * p + 1]) + shift[2 * p + 1]).fract();
            let r = (-2.0 * (1.0 - u1).max(1e-300).ln()).sqrt();
            let t = std::f64::consts::TAU * u2;
            g.push(r * t.cos());
            g.push(r * t.sin());
        }
        g.truncate(n);
        if norm2(&g) > 1e-12 {
            push_unique(&mut points, canonicalize(&g).expect("nonzero gaussian"));
        }
        index += 1;
    }
    points
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    r
}

/// SplitMix64 mapped to `[0, 1)`.
fn unit_fraction(seed: u64) -> f64 {
    let mut z = seed.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    (z >> 11) as f64 / (1u64 << 53) as f64
}

/// Augments `grid` with `count` deterministic directions within projective
/// distance `radius` of `center`.
pub fn refine_near(
    grid: &ProjectiveGrid,
    center: &Direction,
    radius: f64,
    count: usize,
) -> Result<ProjectiveGrid> {
    if !(radius > 0.0 && radius <= std::f64::consts::FRAC_PI_2) {
        return Err(NormError::InvalidParameter(format!(
            "refinement radius must lie in (0, π/2], got {radius}"
        )));
    }
    if count == 0 {
        return Err(NormError::InvalidParameter(
            "refinement count must be ≥ 1".into(),
        ));
    }
    if center.dim() != grid.dim {
        return Err(NormError::DimensionMismatch {
            expected: grid.dim,
            found: center.dim(),
        });
    }
    let mut points = grid.points.clone();
    for v in local_directions(center.coords(), radius, count) {
        push_unique(&mut points, canonicalize(&v)?);
    }
    Ok(ProjectiveGrid {
        dim: grid.dim,
        resolution: grid.resolution,
        seed: grid.seed,
        points,
    })
}

/// Unit vectors at sphere distance at most `radius` from the unit `center`.
pub(crate) fn local_directions(center: &[f64], radius: f64, count: usize) -> Vec<Vec<f64>> {
    let n = center.len();
    let tangents = orthogonal_complement(center);
    let along = |t: &[f64], rho: f64| -> Vec<f64> {
        let (s, c) = rho.sin_cos();
        center.iter().zip(t).map(|(a, b)| c * a + s * b).collect()
    };
    match n {
        2 => {
            let half = count.div_ceil(2) as f64;
            (1..=count)
                .map(|j| {
                    let step = j.div_ceil(2) as f64 / half;
                    let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
                    along(&tangents[0], sign * step * radius)
                })
                .collect()
        }
        3 => (0..count)
            .map(|j| {
                let rho = radius * ((j as f64 + 0.5) / count as f64).sqrt();
                let phi = j as f64 * GOLDEN_ANGLE;
                let t: Vec<f64> = tangents[0]
                    .iter()
                    .zip(&tangents[1])
                    .map(|(a, b)| phi.cos() * a + phi.sin() * b)
                    .collect();
                along(&t, rho)
            })
            .collect(),
        _ => (0..count)
            .map(|j| {
                let idx = j as u64 + 1;
                let mut w = vec![0.0; n];
                for (k, t) in tangents.iter().enumerate() {
                    let u1 = radical_inverse(idx, PRIMES[(2 * k) % PRIMES.len()]);
                    let u2 = radical_inverse(idx, PRIMES[(2 * k + 1) % PRIMES.len()]);
                    let g = (-2.0 * (1.0 - u1).max(1e-300).ln()).sqrt()
                        * (std::f64::consts::TAU * u2).cos();
                    for (wi, ti) in w.iter_mut().zip(t) {
                        *wi += g * ti;
                    }
                }
                let len = norm2(&w);
                let w: Vec<f64> = if len > 1e-12 {
                    w.iter().map(|x| x / len).collect()
                } else {
                    tangents[0].clone()
                };
                let frac = radical_inverse(idx, 59).powf(1.0 / (n - 1) as f64);
                along(&w, radius * frac)
            })
            .collect(),
    }
}
