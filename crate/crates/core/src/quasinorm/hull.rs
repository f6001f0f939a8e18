//! Facet enumeration for origin-symmetric point sets.
//!
//! Every facet is returned as a normal `a` with the facet inequality
//! `⟨a, x⟩ ≤ 1`; the origin is assumed to be strictly interior.

use std::collections::HashSet;

use crate::error::{NormError, Result};
use crate::linalg::{dot, norm2, solve_rows, sub};

/// Geometric tolerance for hull predicates.
pub const GEOM_TOL: f64 = 1e-9;

/// Largest number of `n`-subsets the generic enumerator will inspect.
const MAX_SUBSETS: u128 = 4_000_000;

pub fn facets(dim: usize, points: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let raw = match dim {
        2 => planar(points),
        3 => spatial(points)?,
        _ => by_subsets(dim, points)?,
    };
    Ok(dedup_normals(raw))
}

fn dedup_normals(normals: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(normals.len());
    for a in normals {
        let scale = norm2(&a).max(1.0);
        if !out.iter().any(|b| norm2(&sub(&a, b)) <= GEOM_TOL * scale) {
            out.push(a);
        }
    }
    out
}

fn cross2(o: &[f64], a: &[f64], b: &[f64]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Andrew's monotone chain; collinear boundary points are dropped.
fn planar(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut pts: Vec<&Vec<f64>> = points.iter().collect();
    pts.sort_by(|a, b| {
        a[0].partial_cmp(&b[0])
            .unwrap()
            .then(a[1].partial_cmp(&b[1]).unwrap())
    });
    pts.dedup_by(|a, b| norm2(&sub(a, b)) <= GEOM_TOL);
    let mut hull: Vec<&Vec<f64>> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &&Vec<f64>>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for p in iter {
            while hull.len() >= start + 2 {
                let k = hull.len();
                let a = hull[k - 2];
                let b = hull[k - 1];
                let scale = norm2(&sub(b, a)) * norm2(&sub(p, a));
                if cross2(a, b, p) <= GEOM_TOL * scale.max(1e-300) {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        hull.pop();
    }
    let k = hull.len();
    (0..k)
        .filter_map(|i| {
            let p = hull[i];
            let q = hull[(i + 1) % k];
            solve_rows(&[p.clone(), q.clone()], &[1.0, 1.0])
        })
        .collect()
}

#[derive(Clone)]
struct Face {
    v: [usize; 3],
    normal: [f64; 3],
    offset: f64,
}

fn cross3(a: &[f64], b: &[f64]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn make_face(pts: &[Vec<f64>], i: usize, j: usize, k: usize, inside: &[f64]) -> Face {
    let n = cross3(&sub(&pts[j], &pts[i]), &sub(&pts[k], &pts[i]));
    let len = norm2(&n);
    let mut normal = [n[0] / len, n[1] / len, n[2] / len];
    let mut offset = dot(&normal, &pts[i]);
    let mut v = [i, j, k];
    if dot(&normal, inside) > offset {
        normal = [-normal[0], -normal[1], -normal[2]];
        offset = -offset;
        v = [i, k, j];
    }
    Face { v, normal, offset }
}

/// Incremental (beneath–beyond) hull in three dimensions.
fn spatial(points: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let pts = points;
    let scale = pts.iter().map(|p| norm2(p)).fold(0.0, f64::max);
    let eps = 1e-12 * scale.max(1.0);
    let degenerate = || NormError::ConstructionFailed("degenerate point set for 3D hull".into());

    let p0 = (0..pts.len())
        .max_by(|&a, &b| norm2(&pts[a]).partial_cmp(&norm2(&pts[b])).unwrap())
        .ok_or_else(degenerate)?;
    let p1 = (0..pts.len())
        .max_by(|&a, &b| {
            norm2(&sub(&pts[a], &pts[p0]))
                .partial_cmp(&norm2(&sub(&pts[b], &pts[p0])))
                .unwrap()
        })
        .ok_or_else(degenerate)?;
    let line = sub(&pts[p1], &pts[p0]);
    let p2 = (0..pts.len())
        .max_by(|&a, &b| {
            let da = norm2(&cross3(&line, &sub(&pts[a], &pts[p0])));
            let db = norm2(&cross3(&line, &sub(&pts[b], &pts[p0])));
            da.partial_cmp(&db).unwrap()
        })
        .ok_or_else(degenerate)?;
    let plane = cross3(&line, &sub(&pts[p2], &pts[p0]));
    if norm2(&plane) <= eps {
        return Err(degenerate());
    }
    let p3 = (0..pts.len())
        .max_by(|&a, &b| {
            let da = dot(&plane, &sub(&pts[a], &pts[p0])).abs();
            let db = dot(&plane, &sub(&pts[b], &pts[p0])).abs();
            da.partial_cmp(&db).unwrap()
        })
        .ok_or_else(degenerate)?;
    if dot(&plane, &sub(&pts[p3], &pts[p0])).abs() <= eps * norm2(&plane) {
        return Err(degenerate());
    }
    let inside: Vec<f64> = (0..3)
        .map(|c| (pts[p0][c] + pts[p1][c] + pts[p2][c] + pts[p3][c]) / 4.0)
        .collect();
    let mut faces = vec![
        make_face(pts, p0, p1, p2, &inside),
        make_face(pts, p0, p1, p3, &inside),
        make_face(pts, p0, p2, p3, &inside),
        make_face(pts, p1, p2, p3, &inside),
    ];
    let seed = [p0, p1, p2, p3];

    for (idx, p) in pts.iter().enumerate() {
        if seed.contains(&idx) {
            continue;
        }
        let visible: Vec<bool> = faces
            .iter()
            .map(|f| dot(&f.normal, p) - f.offset > eps)
            .collect();
        if !visible.iter().any(|&v| v) {
            continue;
        }
        let mut edges: HashSet<(usize, usize)> = HashSet::new();
        for (f, _) in faces.iter().zip(&visible).filter(|(_, &v)| v) {
            for e in 0..3 {
                edges.insert((f.v[e], f.v[(e + 1) % 3]));
            }
        }
        let mut horizon: Vec<(usize, usize)> = edges
            .iter()
            .filter(|(a, b)| !edges.contains(&(*b, *a)))
            .copied()
            .collect();
        horizon.sort_unstable();
        let mut next: Vec<Face> = faces
            .iter()
            .zip(&visible)
            .filter(|(_, &v)| !v)
            .map(|(f, _)| f.clone())
            .collect();
        for (a, b) in horizon {
            next.push(make_face(pts, a, b, idx, &inside));
        }
        faces = next;
    }

    Ok(faces
        .iter()
        .filter(|f| f.offset > eps)
        .map(|f| f.normal.iter().map(|c| c / f.offset).collect())
        .collect())
}

/// Generic enumeration: every `n`-subset spanning a supporting hyperplane.
fn by_subsets(dim: usize, points: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let count = binomial(points.len() as u128, dim as u128);
    if count > MAX_SUBSETS {
        return Err(NormError::TooManyVertices {
            count: points.len(),
            limit: max_points_for(dim),
        });
    }
    let mut out = Vec::new();
    if points.len() < dim {
        return Ok(out);
    }
    let mut idx: Vec<usize> = (0..dim).collect();
    loop {
        let rows: Vec<Vec<f64>> = idx.iter().map(|&i| points[i].clone()).collect();
        if let Some(a) = solve_rows(&rows, &vec![1.0; dim]) {
            if a.iter().all(|x| x.is_finite())
                && points.iter().all(|v| dot(&a, v) <= 1.0 + GEOM_TOL)
            {
                out.push(a);
            }
        }
        // next combination
        let mut k = dim;
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            if idx[k] < points.len() - dim + k {
                idx[k] += 1;
                for j in k + 1..dim {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

fn max_points_for(dim: usize) -> usize {
    let mut n = dim;
    while binomial(n as u128 + 1, dim as u128) <= MAX_SUBSETS {
        n += 1;
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_gauge(normals: &[Vec<f64>], x: &[f64]) -> f64 {
        normals.iter().map(|a| dot(a, x)).fold(f64::MIN, f64::max)
    }

    #[test]
    fn square_facets() {
        let pts = vec![
            vec![1.0, 1.0],
            vec![-1.0, 1.0],
            vec![1.0, -1.0],
            vec![-1.0, -1.0],
            vec![1.0, 0.0],
            vec![-1.0, 0.0],
        ];
        let f = facets(2, &pts).unwrap();
        assert_eq!(f.len(), 4);
        assert!((max_gauge(&f, &[2.0, 0.0]) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn cube_facets_merge_coplanar_triangles() {
        let mut pts = Vec::new();
        for s in 0..8 {
            pts.push(
                (0..3)
                    .map(|k| if s >> k & 1 == 1 { 1.0 } else { -1.0 })
                    .collect::<Vec<f64>>(),
            );
        }
        pts.push(vec![1.0, 0.0, 0.0]);
        pts.push(vec![-1.0, 0.0, 0.0]);
        let f3 = facets(3, &pts).unwrap();
        assert_eq!(f3.len(), 6);
        let x = [0.3, -2.0, 0.5];
        assert!((max_gauge(&f3, &x) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn cross_polytope_in_four_dimensions() {
        let mut pts = Vec::new();
        for k in 0..4 {
            for s in [1.0, -1.0] {
                let mut v = vec![0.0; 4];
                v[k] = s;
                pts.push(v);
            }
        }
        let f = facets(4, &pts).unwrap();
        assert_eq!(f.len(), 16);
        assert!((max_gauge(&f, &[1.0, -1.0, 1.0, 0.5]) - 3.5).abs() < 1e-12);
    }
}
