//! Small dense helpers on plain slices. Anything heavier goes through nalgebra.

use nalgebra::DMatrix;

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn neg(a: &[f64]) -> Vec<f64> {
    a.iter().map(|x| -x).collect()
}

/// Row-major square matrix from a list of rows.
pub fn matrix_from_rows(rows: &[Vec<f64>]) -> DMatrix<f64> {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    DMatrix::from_fn(n, m, |i, j| rows[i][j])
}

/// Solves `rows · a = rhs` for square systems; `None` when singular.
pub fn solve_rows(rows: &[Vec<f64>], rhs: &[f64]) -> Option<Vec<f64>> {
    let m = matrix_from_rows(rows);
    let b = nalgebra::DVector::from_column_slice(rhs);
    let lu = m.lu();
    lu.solve(&b).map(|x| x.iter().copied().collect())
}

/// Numerical rank via singular values, relative to the largest.
pub fn rank(rows: &[Vec<f64>], rel_tol: f64) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let m = matrix_from_rows(rows);
    let sv = m.singular_values();
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * smax).count()
}

/// Orthonormal basis of the orthogonal complement of `v` (v nonzero).
pub fn orthogonal_complement(v: &[f64]) -> Vec<Vec<f64>> {
    let n = v.len();
    let unit = scale(v, 1.0 / norm2(v));
    let mut basis: Vec<Vec<f64>> = vec![unit];
    for k in 0..n {
        let mut e = vec![0.0; n];
        e[k] = 1.0;
        for b in &basis {
            let c = dot(&e, b);
            for (ei, bi) in e.iter_mut().zip(b) {
                *ei -= c * bi;
            }
        }
        let len = norm2(&e);
        if len > 1e-8 {
            basis.push(scale(&e, 1.0 / len));
        }
        if basis.len() == n {
            break;
        }
    }
    basis.remove(0);
    basis
}
