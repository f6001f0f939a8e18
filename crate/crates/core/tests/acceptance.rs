//! Acceptance criteria 1–9. Run with `--nocapture` to see one line per
//! criterion; the test fails if any criterion is red.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use normspace::bm::{
    bm_distance, classify_isometry, general_position, isometry_group, power_bounded,
    separation_check, symmetry_break,
};
use normspace::qmetric::{metric_axioms_report, range_metric, to_log_profile};
use normspace::qspace::{limit_of_sequence, mean, space_axioms_report};
use normspace::quasinorm::{is_norm, polyhedral_approx};
use normspace::{khare_distance, make_grid, LinearMap, NormError, NormSpec, PolytopeBall};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

struct Criterion {
    id: u8,
    name: &'static str,
    budget_secs: Option<f64>,
    check: fn() -> Verdict,
}

fn square() -> PolytopeBall {
    PolytopeBall::from_vertices(
        2,
        vec![
            vec![1.0, 1.0],
            vec![-1.0, 1.0],
            vec![-1.0, -1.0],
            vec![1.0, -1.0],
        ],
    )
    .unwrap()
}

fn diamond() -> PolytopeBall {
    PolytopeBall::from_vertices(
        2,
        vec![
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![-1.0, 0.0],
            vec![0.0, -1.0],
        ],
    )
    .unwrap()
}

fn l(p: f64) -> NormSpec {
    NormSpec::lp(2, p).unwrap()
}

fn c1_nonconvex_mean() -> Verdict {
    let x = NormSpec::weighted_lp(1.0, vec![2.0, 0.5]).unwrap();
    let y = NormSpec::weighted_lp(1.0, vec![0.5, 2.0]).unwrap();
    let m = mean(&x, &y).unwrap();
    let a = m.eval(&[1.0, 0.0]).unwrap();
    let b = m.eval(&[0.0, 1.0]).unwrap();
    let c = m.eval(&[1.0, 1.0]).unwrap();
    let values_ok =
        (a - 1.0).abs() <= 1e-12 && (b - 1.0).abs() <= 1e-12 && (c - 2.5).abs() <= 1e-12;

    let grid = make_grid(2, 720, 0).unwrap();
    let v = is_norm(&m, &grid, 0, 0, 1e-9).unwrap();
    let witness_ok = match &v.counterexample {
        Some((p, q)) => {
            let s = [p[0] + q[0], p[1] + q[1]];
            let excess = m.eval(&s).unwrap() - m.eval(p).unwrap() - m.eval(q).unwrap();
            // The scan runs over unit-sphere points, so the triple is a
            // multiple of ((1,0), (0,1), (1,1)) up to sign and order.
            let axis = |u: &[f64]| (u[0].abs() < 1e-12) != (u[1].abs() < 1e-12);
            excess > 0.0 && axis(p) && axis(q) && (s[0].abs() - s[1].abs()).abs() < 1e-12
        }
        None => false,
    };
    verdict(
        values_ok && !v.is_norm && witness_ok,
        format!(
            "‖(1,0)‖={a}, ‖(0,1)‖={b}, ‖(1,1)‖={c}; is_norm={}, witness={:?}",
            v.is_norm, v.counterexample
        ),
    )
}

fn c2_distance_table() -> Verdict {
    let grid = make_grid(2, 720, 0).unwrap();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let has = |u: [f64; 2]| grid.nearest(&u).1 <= 1e-15;
    let grid_ok = has([1.0, 0.0]) && has([0.0, 1.0]) && has([s, s]) && has([s, -s]);

    let mut pass = grid_ok;
    let mut detail = Vec::new();
    for (x, y, want, label) in [
        (l(1.0), l(f64::INFINITY), 2.0, "d(ℓ1,ℓ∞)"),
        (l(2.0), l(1.0), SQRT_2, "d(ℓ2,ℓ1)"),
        (l(2.0), l(f64::INFINITY), SQRT_2, "d(ℓ2,ℓ∞)"),
    ] {
        let w = khare_distance(&x, &y, &grid, false).unwrap();
        let ratio = |u: &[f64]| x.eval(u).unwrap() / y.eval(u).unwrap();
        let touch_max = (ratio(w.argmax_dir.coords()) - w.lambda).abs();
        let touch_min = (ratio(w.argmin_dir.coords()) - w.lambda / w.mu).abs();
        pass &= (w.mu - want).abs() <= 1e-9 && touch_max <= 1e-9 && touch_min <= 1e-9;
        detail.push(format!(
            "{label}={:.12} (touch {touch_max:.1e}/{touch_min:.1e})",
            w.mu
        ));
    }
    detail.push(format!("axes and diagonals on grid: {grid_ok}"));
    verdict(pass, detail.join(", "))
}

fn random_polytope(rng: &mut ChaCha8Rng, n: usize) -> NormSpec {
    loop {
        let count = rng.random_range(n + 1..n + 6);
        let mut vs = Vec::new();
        for _ in 0..count {
            let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            vs.push(v.iter().map(|c| -c).collect());
            vs.push(v);
        }
        if let Ok(b) = PolytopeBall::from_vertices(n, vs) {
            return NormSpec::polytope(b);
        }
    }
}

fn random_map(rng: &mut ChaCha8Rng, n: usize) -> LinearMap {
    loop {
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..n).map(|_| rng.random_range(-2.0..2.0)).collect())
            .collect();
        let a = LinearMap::from_rows(&rows).unwrap();
        if a.determinant().abs() > 0.2 {
            return a;
        }
    }
}

fn random_spec(rng: &mut ChaCha8Rng, n: usize, depth: usize) -> NormSpec {
    let pick = if depth == 0 {
        rng.random_range(0..3)
    } else {
        rng.random_range(0..6)
    };
    let p = if rng.random_bool(0.2) {
        f64::INFINITY
    } else {
        rng.random_range(1.0..6.0)
    };
    match pick {
        0 => NormSpec::lp(n, p).unwrap(),
        1 => {
            NormSpec::weighted_lp(p, (0..n).map(|_| rng.random_range(0.2..4.0)).collect()).unwrap()
        }
        2 => random_polytope(rng, n),
        3 => NormSpec::interp(
            random_spec(rng, n, depth - 1),
            random_spec(rng, n, depth - 1),
            rng.random_range(0.0..1.0),
        )
        .unwrap(),
        4 => NormSpec::opposite(random_spec(rng, n, depth - 1)),
        _ => NormSpec::pullback(random_map(rng, n), random_spec(rng, n, depth - 1)).unwrap(),
    }
}

fn c3_axiom_suite() -> Verdict {
    let grids = [
        make_grid(2, 720, 0).unwrap(),
        make_grid(3, 2000, 0).unwrap(),
    ];
    let mut worst: f64 = 0.0;
    let mut pass = true;
    for t in 0..20u64 {
        let n = 2 + (t % 2) as usize;
        let grid = &grids[n - 2];
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + t);
        let triple: Vec<NormSpec> = (0..3).map(|_| random_spec(&mut rng, n, 2)).collect();
        let metric = metric_axioms_report(&triple, grid).unwrap();
        let space = space_axioms_report(&triple, grid, t).unwrap();
        worst = worst
            .max(metric.identity_deviation)
            .max(metric.symmetry_deviation)
            .max(space.max_deviation);
        pass &= metric.passed && space.passed && metric.triangle_slack >= 1.0 - 1e-9;
    }
    verdict(
        pass && worst <= 1e-9,
        format!("20 triples (10 in R², 10 in R³), worst deviation {worst:.3e}"),
    )
}

fn c4_log_profile_isometry() -> Verdict {
    let grids = [
        make_grid(2, 720, 0).unwrap(),
        make_grid(3, 2000, 0).unwrap(),
    ];
    let mut worst: f64 = 0.0;
    for k in 0..50u64 {
        let n = 2 + (k % 2) as usize;
        let grid = &grids[n - 2];
        let mut rng = ChaCha8Rng::seed_from_u64(5000 + k);
        let x = random_spec(&mut rng, n, 2);
        let y = random_spec(&mut rng, n, 2);
        let f = to_log_profile(&x, grid, true).unwrap();
        let g = to_log_profile(&y, grid, true).unwrap();
        let r = range_metric(&f, &g).unwrap();
        let d = khare_distance(&x, &y, grid, false).unwrap().mu.ln();
        worst = worst.max((r - d).abs());
    }
    verdict(
        worst <= 1e-12,
        format!("50 pairs, max |range − ln d| = {worst:.3e}"),
    )
}

fn c5_completeness() -> Verdict {
    let grid = make_grid(2, 720, 0).unwrap();
    let seq: Vec<NormSpec> = (1..=20).map(|k| l(2.0 + 2f64.powi(-k))).collect();
    let lim = match limit_of_sequence(&seq, &grid, 1e-3) {
        Ok(lim) => lim,
        Err(e) => return verdict(false, format!("ℓ_(2+2^-k) rejected: {e}")),
    };
    let zero = to_log_profile(&NormSpec::euclidean(2), &grid, true).unwrap();
    let gap = range_metric(&lim, &zero).unwrap();
    let alternating: Vec<NormSpec> = (0..20)
        .map(|k| if k % 2 == 0 { l(1.0) } else { l(f64::INFINITY) })
        .collect();
    let rejected = matches!(
        limit_of_sequence(&alternating, &grid, 1e-3),
        Err(NormError::NotCauchy { .. })
    );
    verdict(
        gap <= 1e-3 && rejected,
        format!("limit range to Euclidean {gap:.3e}; alternating ℓ1/ℓ∞ rejected: {rejected}"),
    )
}

/// `min_t d(ℓ2, ‖diag(1,t)·‖_∞)` over a log-spaced `t` grid, with the ratio
/// sampled at 7200 angles. Rotations act trivially on ℓ2 and coordinate
/// swaps preserve ℓ∞, so positive diagonal maps cover the symmetric optimum.
fn diagonal_scaling_oracle() -> f64 {
    let angles: Vec<(f64, f64)> = (0..7200)
        .map(|k| {
            let t = PI * k as f64 / 7200.0;
            (t.cos().abs(), t.sin().abs())
        })
        .collect();
    (0..=2000)
        .map(|i| {
            let t = (-1.0 + i as f64 / 1000.0f64).exp();
            let (lo, hi) = angles
                .iter()
                .fold((f64::INFINITY, 0.0f64), |(lo, hi), &(c, s)| {
                    let r = c.max(t * s);
                    (lo.min(r), hi.max(r))
                });
            hi / lo
        })
        .fold(f64::INFINITY, f64::min)
}

fn c6_banach_mazur() -> Verdict {
    let grid = make_grid(2, 720, 0).unwrap();
    let a = bm_distance(&l(1.0), &l(f64::INFINITY), &grid, 16, 4000, 0).unwrap();
    let b = bm_distance(&l(2.0), &l(f64::INFINITY), &grid, 16, 4000, 0).unwrap();
    let oracle = diagonal_scaling_oracle();
    verdict(
        (a.distance - 1.0).abs() <= 1e-3
            && (b.distance - oracle).abs() <= 1e-2
            && (oracle - SQRT_2).abs() <= 1e-2,
        format!(
            "BM(ℓ1,ℓ∞)={:.6}, BM(ℓ2,ℓ∞)={:.6}, oracle {oracle:.6}",
            a.distance, b.distance
        ),
    )
}

fn unit_modulus(a: &LinearMap) -> bool {
    a.matrix()
        .complex_eigenvalues()
        .iter()
        .all(|z| (z.norm() - 1.0).abs() <= 1e-9)
}

fn c7_isometry_machinery() -> Verdict {
    let grid = make_grid(2, 720, 0).unwrap();
    let mut pass = true;
    let mut orders = Vec::new();
    for ball in [square(), diamond()] {
        let spec = NormSpec::polytope(ball.clone());
        let g = isometry_group(&ball, &grid).unwrap();
        orders.push(g.order);
        pass &= g.order == 8;
        for a in &g.elements {
            pass &= classify_isometry(a, &spec, &grid).is_ok() && unit_modulus(a);
        }
    }
    let shear = LinearMap::from_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
    let shear_rejected = !power_bounded(&shear, 100, 10.0);
    let sep = separation_check(
        &LinearMap::rotation(2, FRAC_PI_2),
        &NormSpec::polytope(square()),
        &grid,
    )
    .unwrap();
    pass &= shear_rejected && (sep - 2.0).abs() <= 1e-9 && sep >= 1.0;
    verdict(
        pass,
        format!("orders {orders:?}, shear rejected: {shear_rejected}, separation {sep:.12}"),
    )
}

fn c8_symmetry_breaking() -> Verdict {
    let r = match symmetry_break(&square(), 0.05, 0) {
        Ok(r) => r,
        Err(e) => return verdict(false, format!("construction failed: {e}")),
    };
    let grid = make_grid(2, 720, 0).unwrap();
    let d = khare_distance(&r.spec, &NormSpec::polytope(square()), &grid, true)
        .unwrap()
        .mu;
    let id = LinearMap::identity(2);
    let pm_id = r.group.order == 2
        && r.group.trivial
        && r.group
            .elements
            .iter()
            .all(|e| e.max_abs_diff(&id) < 1e-9 || e.max_abs_diff(&id.scaled(-1.0)) < 1e-9);
    let diameters: Vec<f64> = r.bumps.iter().map(|b| b.diameter).collect();
    let decreasing = diameters.windows(2).all(|w| w[1] < w[0]);
    let reps: Vec<Vec<f64>> = r
        .bumps
        .iter()
        .flat_map(|b| b.representatives.iter().cloned())
        .collect();
    let in_general_position = general_position(&reps);
    verdict(
        d <= 1.05 && pm_id && decreasing && in_general_position,
        format!(
            "d={d:.6}, group order {}, diameters {diameters:?}, general position: {in_general_position}",
            r.group.order
        ),
    )
}

fn c9_polyhedral_approximation() -> Verdict {
    let e = NormSpec::euclidean(2);
    let mut prev = f64::INFINITY;
    let mut pass = true;
    let mut detail = Vec::new();
    for m in [8usize, 32, 128] {
        let grid = make_grid(2, m, 0).unwrap();
        let ball = polyhedral_approx(&e, &grid).unwrap();
        let fine = make_grid(2, 4 * m, 0).unwrap();
        let d = khare_distance(&NormSpec::polytope(ball), &e, &fine, true)
            .unwrap()
            .mu;
        let want = 1.0 / (PI / (2 * m) as f64).cos();
        pass &= (d - want).abs() <= 1e-9 && d < prev;
        prev = d;
        detail.push(format!("m={m}: {d:.12} (1/cos {want:.12})"));
    }
    verdict(pass, detail.join(", "))
}

#[test]
fn acceptance() {
    let criteria = [
        Criterion {
            id: 1,
            name: "non-convex mean of crossed rhombi",
            budget_secs: Some(1.0),
            check: c1_nonconvex_mean,
        },
        Criterion {
            id: 2,
            name: "multiplicative distance table",
            budget_secs: Some(1.0),
            check: c2_distance_table,
        },
        Criterion {
            id: 3,
            name: "Banach-space axiom suite",
            budget_secs: Some(10.0),
            check: c3_axiom_suite,
        },
        Criterion {
            id: 4,
            name: "log-profile isometry",
            budget_secs: None,
            check: c4_log_profile_isometry,
        },
        Criterion {
            id: 5,
            name: "completeness",
            budget_secs: Some(5.0),
            check: c5_completeness,
        },
        Criterion {
            id: 6,
            name: "Banach–Mazur estimates",
            budget_secs: Some(30.0),
            check: c6_banach_mazur,
        },
        Criterion {
            id: 7,
            name: "isometry machinery",
            budget_secs: None,
            check: c7_isometry_machinery,
        },
        Criterion {
            id: 8,
            name: "symmetry breaking",
            budget_secs: Some(60.0),
            check: c8_symmetry_breaking,
        },
        Criterion {
            id: 9,
            name: "polyhedral approximation",
            budget_secs: None,
            check: c9_polyhedral_approximation,
        },
    ];
    let mut failed = Vec::new();
    for c in &criteria {
        let start = Instant::now();
        let v = (c.check)();
        let secs = start.elapsed().as_secs_f64();
        let in_time = c.budget_secs.is_none_or(|b| secs < b);
        let pass = v.pass && in_time;
        let budget = c
            .budget_secs
            .map(|b| format!(" / {b} s"))
            .unwrap_or_default();
        println!(
            "[{}] {}. {} ({secs:.2} s{budget}): {}",
            if pass { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            v.detail
        );
        if !pass {
            failed.push(c.id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
