//! Quasinorms given by sampled log-values on a projective grid.

use crate::error::{NormError, Result};
use crate::linalg::norm2;
use crate::projgrid::{projective_distance, ProjectiveGrid};

/// Distance under which a query direction is treated as the grid point itself.
const HIT_TOL: f64 = 1e-12;

/// `‖x‖ = |x|₂ · exp(f([x]))` with `f` stored on a grid and blended in between.
///
/// Off-grid blending: linear in angle between the two bracketing grid lines
/// for `n = 2`; for `n ≥ 3` the `n` nearest grid points weighted by
/// `(d_{n+1} − d_i)/d_i`, which is continuous both at grid points and where
/// the neighbour set changes.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileNorm {
    grid: ProjectiveGrid,
    logvalues: Vec<f64>,
    /// `(angle in [0, π), grid index)` sorted by angle; planar grids only.
    angles: Vec<(f64, usize)>,
}

impl ProfileNorm {
    pub fn new(grid: ProjectiveGrid, logvalues: Vec<f64>) -> Result<Self> {
        if logvalues.len() != grid.len() {
            return Err(NormError::InvalidParameter(format!(
                "profile has {} values for a grid of {} points",
                logvalues.len(),
                grid.len()
            )));
        }
        if let Some(i) = logvalues.iter().position(|v| !v.is_finite()) {
            return Err(NormError::InvalidParameter(format!(
                "profile value {i} is not finite"
            )));
        }
        let mut angles = Vec::new();
        if grid.dim() == 2 {
            angles = grid
                .points()
                .iter()
                .enumerate()
                .map(|(i, p)| (line_angle(p.coords()), i))
                .collect();
            angles.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        }
        Ok(ProfileNorm {
            grid,
            logvalues,
            angles,
        })
    }

    pub fn grid(&self) -> &ProjectiveGrid {
        &self.grid
    }

    pub fn logvalues(&self) -> &[f64] {
        &self.logvalues
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    /// Blended log-value at the line through nonzero `x`.
    pub fn log_direction(&self, x: &[f64]) -> f64 {
        if let Some(i) = self.grid.points().iter().position(|p| p.coords() == x) {
            return self.logvalues[i];
        }
        let len = norm2(x);
        let u: Vec<f64> = x.iter().map(|c| c / len).collect();
        if self.grid.dim() == 2 {
            self.planar(&u)
        } else {
            self.spherical(&u)
        }
    }

    fn planar(&self, u: &[f64]) -> f64 {
        let theta = line_angle(u);
        let k = self.angles.len();
        if k == 1 {
            return self.logvalues[0];
        }
        // first index with angle > theta
        let hi = self.angles.partition_point(|(a, _)| *a <= theta);
        let (lo_a, lo_i, hi_a, hi_i) = if hi == 0 {
            let (a, i) = self.angles[k - 1];
            (
                a - std::f64::consts::PI,
                i,
                self.angles[0].0,
                self.angles[0].1,
            )
        } else if hi == k {
            let (a, i) = self.angles[k - 1];
            (
                a,
                i,
                self.angles[0].0 + std::f64::consts::PI,
                self.angles[0].1,
            )
        } else {
            let (a, i) = self.angles[hi - 1];
            (a, i, self.angles[hi].0, self.angles[hi].1)
        };
        if theta - lo_a <= HIT_TOL {
            return self.logvalues[lo_i];
        }
        if hi_a - theta <= HIT_TOL {
            return self.logvalues[hi_i];
        }
        let t = (theta - lo_a) / (hi_a - lo_a);
        (1.0 - t) * self.logvalues[lo_i] + t * self.logvalues[hi_i]
    }

    fn spherical(&self, u: &[f64]) -> f64 {
        let k = self.grid.dim().min(self.grid.len());
        let mut d: Vec<(f64, usize)> = self
            .grid
            .points()
            .iter()
            .enumerate()
            .map(|(i, p)| (projective_distance(p.coords(), u), i))
            .collect();
        d.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
        if d[0].0 <= HIT_TOL {
            return self.logvalues[d[0].1];
        }
        let cutoff = d.get(k).map(|x| x.0);
        let mut wsum = 0.0;
        let mut acc = 0.0;
        for &(di, i) in &d[..k] {
            let w = match cutoff {
                Some(c) => (c - di).max(0.0) / di,
                None => 1.0 / di,
            };
            wsum += w;
            acc += w * self.logvalues[i];
        }
        if wsum > 0.0 {
            acc / wsum
        } else {
            d[..k].iter().map(|&(_, i)| self.logvalues[i]).sum::<f64>() / k as f64
        }
    }
}

/// Angle of the line through `u` in `[0, π)`.
fn line_angle(u: &[f64]) -> f64 {
    let mut a = u[1].atan2(u[0]);
    if a < 0.0 {
        a += std::f64::consts::PI;
    }
    if a >= std::f64::consts::PI {
        a -= std::f64::consts::PI;
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projgrid::make_grid;

    #[test]
    fn exact_at_grid_points_and_continuous_between() {
        for n in [2usize, 3] {
            let g = make_grid(n, 60, 1).unwrap();
            let vals: Vec<f64> = (0..g.len()).map(|i| (i as f64 * 0.37).sin()).collect();
            let p = ProfileNorm::new(g.clone(), vals.clone()).unwrap();
            for (i, pt) in g.points().iter().enumerate() {
                assert_eq!(p.log_direction(pt.coords()), vals[i]);
                let scaled: Vec<f64> = pt.coords().iter().map(|c| -2.0 * c).collect();
                assert!((p.log_direction(&scaled) - vals[i]).abs() < 1e-12);
            }
            // small perturbations move the value only slightly
            let base = g.points()[5].coords().to_vec();
            let mut near = base.clone();
            near[1] += 1e-9;
            assert!((p.log_direction(&near) - vals[5]).abs() < 1e-6);
        }
    }

    #[test]
    fn rejects_bad_values() {
        let g = make_grid(2, 4, 0).unwrap();
        assert!(ProfileNorm::new(g.clone(), vec![0.0; 3]).is_err());
        assert!(ProfileNorm::new(g, vec![0.0, f64::NAN, 0.0, 0.0]).is_err());
    }
}
