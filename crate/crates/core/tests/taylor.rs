use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use solnet::target::{multi_indices, FnTarget, JetTarget, Target};
use solnet::taylor::{
    build_taylor_net, grid_points, monomial_chain, report_complexity, taylor_coeffs, DerivativeMode, TaylorError,
    TaylorGridSpec,
};

/// Polynomial as a list of (coefficient, exponents), differentiated
/// symbolically for the finite-difference oracle.
#[derive(Clone, Debug)]
struct Poly(Vec<(f64, Vec<u32>)>);

impl Poly {
    fn random(rng: &mut ChaCha8Rng, nx: usize, deg: u32) -> Self {
        Poly(multi_indices(nx, deg as usize).into_iter().map(|n| (rng.gen_range(-1.0..1.0), n)).collect())
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.0.iter().map(|(c, n)| c * n.iter().zip(x).map(|(&e, &xi)| xi.powi(e as i32)).product::<f64>()).sum()
    }

    fn derivative(&self, n: &[u32]) -> Poly {
        let mut out = Vec::new();
        for (c, e) in &self.0 {
            let mut c = *c;
            let mut e = e.clone();
            for (ei, &ni) in e.iter_mut().zip(n) {
                for _ in 0..ni {
                    c *= *ei as f64;
                    *ei = ei.saturating_sub(1);
                }
            }
            if c != 0.0 {
                out.push((c, e));
            }
        }
        Poly(out)
    }
}

fn fact(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

#[test]
fn sine_target_meets_tolerance_on_interior_grid() {
    let f = JetTarget::new(2, |x| (&x[0] + &x[1]).sin() * 0.5);
    let spec = TaylorGridSpec::new(2, 3, 0.05).unwrap();
    assert_eq!(spec.grid, 3);
    let net = build_taylor_net::<f64>(&f, &spec).unwrap();
    let err = net.grid_error(&f, 50, true).unwrap();
    assert!(err.sup <= 0.05, "{err:?}");
    assert!(err.sup <= spec.error_bound());
    let r = report_complexity(&net);
    assert!(r.depth <= 6, "{r:?}");
}

#[test]
fn affine_targets_are_reproduced() {
    let f = JetTarget::new(2, |x| &x[0] * 0.7 - &x[1] * 1.3 + 0.2);
    for k in 1..=3 {
        let spec = TaylorGridSpec::new(2, k, 0.1).unwrap().with_grid(2);
        let net = build_taylor_net::<f64>(&f, &spec).unwrap();
        assert!(net.grid_error(&f, 13, true).unwrap().sup <= 1e-8);
    }
}

#[test]
fn centered_quadratic_is_exact_on_one_cell() {
    let f = JetTarget::new(1, |x| {
        let d = &x[0] - 0.5;
        &d * &d
    });
    let spec = TaylorGridSpec::new(1, 2, 0.5).unwrap();
    assert_eq!(spec.grid, 1);
    let net = build_taylor_net::<f64>(&f, &spec).unwrap();
    let err = net.grid_error(&f, 100, true).unwrap();
    assert!(err.sup <= 1e-8, "{err:?}");
}

#[test]
fn low_degree_polynomials_are_exact_with_one_cell() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for nx in 1..=2 {
        for k in 1..=3u32 {
            let p = Poly::random(&mut rng, nx, k);
            let q = p.clone();
            let f = FnTarget::new(nx, move |x| q.eval(x));
            let spec = TaylorGridSpec::new(nx, k as usize, 1.0).unwrap().with_grid(1).finite_differences();
            let net = build_taylor_net::<f64>(&f, &spec).unwrap();
            let err = net.grid_error(&f, 9, true).unwrap();
            assert!(err.sup <= 1e-6, "nx={nx} k={k}: {err:?}");
        }
    }
}

#[test]
fn finite_differences_match_symbolic_derivatives() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let nx = rng.gen_range(1..=3);
        let p = Poly::random(&mut rng, nx, 3);
        let q = p.clone();
        let f = FnTarget::new(nx, move |x| q.eval(x));
        let c: Vec<f64> = (0..nx).map(|_| rng.gen_range(0.0..1.0)).collect();
        let h = solnet::taylor::default_fd_step(0.01);
        let got = taylor_coeffs(&f, &c, 3, DerivativeMode::FiniteDifference { h }).unwrap();
        for (g, n) in got.iter().zip(multi_indices(nx, 3)) {
            let want = p.derivative(&n).eval(&c) / n.iter().map(|&v| fact(v)).product::<f64>();
            assert!((g - want).abs() <= 1e-6, "{n:?}: {g} vs {want}");
        }
    }
}

#[test]
fn finite_differences_agree_with_jets_on_smooth_targets() {
    let f = JetTarget::new(2, |x| (&x[0] * 2.0 - &x[1]).exp() * 0.1 + x[1].cos());
    let h = solnet::taylor::default_fd_step(0.01);
    let a = taylor_coeffs(&f, &[0.3, 0.6], 3, DerivativeMode::Analytic).unwrap();
    let d = taylor_coeffs(&f, &[0.3, 0.6], 3, DerivativeMode::FiniteDifference { h }).unwrap();
    for (x, y) in a.iter().zip(&d) {
        assert!((x - y).abs() <= 1e-6, "{x} vs {y}");
    }
}

#[test]
fn monomials_match_direct_evaluation() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let nx = rng.gen_range(1..=3);
        let idx = multi_indices(nx, 4);
        let n = idx[rng.gen_range(0..idx.len())].clone();
        let grid = rng.gen_range(1..=4);
        let m: Vec<usize> = (0..nx).map(|_| rng.gen_range(0..grid)).collect();
        let net = monomial_chain::<f64>(&m, &n, grid).unwrap();
        let deg: u32 = n.iter().sum();
        assert!(deg < 2 || net.widths().depth <= 2 * (deg as usize - 1));
        for _ in 0..50 {
            let x: Vec<f64> = (0..nx).map(|_| rng.gen_range(0.0..1.0)).collect();
            let want: f64 =
                (0..nx).map(|i| (x[i] - (2 * m[i] + 1) as f64 / (2 * grid) as f64).powi(n[i] as i32)).product();
            worst = worst.max((net.evaluate(&x).unwrap()[0] - want).abs());
        }
    }
    assert!(worst <= 1e-8, "{worst}");
}

#[test]
fn first_layer_counts_match_closed_forms() {
    let f = JetTarget::new(2, |x| &x[0] * &x[1]);
    let spec = TaylorGridSpec::new(2, 2, 1.0).unwrap().with_grid(1);
    let r = report_complexity(&build_taylor_net::<f64>(&f, &spec).unwrap());
    assert_eq!((r.first_layer_constraints, r.first_layer_variables), (18, 7));
    for (nx, k, grid) in [(1, 3, 4), (2, 3, 3), (3, 2, 2)] {
        let f = JetTarget::new(nx, |x| x.iter().skip(1).fold(x[0].sin(), |a, b| a + b));
        let spec = TaylorGridSpec::new(nx, k, 1.0).unwrap().with_grid(grid);
        let r = report_complexity(&build_taylor_net::<f64>(&f, &spec).unwrap());
        assert_eq!((r.first_layer_constraints, r.first_layer_variables), (r.formula_constraints, r.formula_variables));
        let c = (1..=nx).fold(1, |acc, i| acc * (k + i) / i);
        let cells = grid.pow(nx as u32);
        assert_eq!(r.formula_constraints, (2 * nx + 2 + 2 * c) * cells);
        assert_eq!(r.formula_variables, (1 + c) * cells);
        assert!(r.depth <= 2 * k);
    }
}

#[test]
fn indicators_partition_the_interior() {
    let f = JetTarget::new(2, |x| &x[0] + &x[1]);
    let spec = TaylorGridSpec::new(2, 1, 1.0).unwrap().with_grid(3);
    let net = build_taylor_net::<f64>(&f, &spec).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..200 {
        let x = [rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)];
        let trace = net.network.evaluate_nodes(&x).unwrap();
        let total: f64 = net.cells.iter().map(|c| trace.outputs[c.indicator][0]).sum();
        assert_eq!(total, 1.0);
    }
}

#[test]
fn faces_and_centers_are_nudged() {
    let f = JetTarget::new(1, |x| x[0].sin());
    let spec = TaylorGridSpec::new(1, 3, 0.01).unwrap().with_grid(4);
    let net = build_taylor_net::<f64>(&f, &spec).unwrap();
    for x in [0.25, 0.5, 0.125, 0.375, 0.0, 1.0] {
        let (v, moved) = net.evaluate_in(&[x], &mut Default::default()).unwrap();
        assert!((v - f.eval(&[x])).abs() <= spec.error_bound());
        assert_eq!(moved > 0, x != 0.0 && x != 1.0, "{x}");
        let raw = net.network.evaluate(&[x]);
        assert_eq!(matches!(raw, Err(solnet::net::NetError::DomainBoundary { .. })), moved > 0, "{x}");
    }
}

#[test]
fn boundary_grid_includes_box_corners() {
    let f = JetTarget::new(2, |x| (&x[0] * &x[1]).cos());
    let spec = TaylorGridSpec::new(2, 2, 0.05).unwrap();
    let net = build_taylor_net::<f64>(&f, &spec).unwrap();
    let e = net.grid_error(&f, 21, false).unwrap();
    assert_eq!(grid_points(2, 21, false).len(), 441);
    assert!(e.sup <= spec.error_bound(), "{e:?}");
}

#[test]
fn missing_oracle_and_scale_are_reported() {
    let plain = FnTarget::new(1, |x| x[0]);
    let spec = TaylorGridSpec::new(1, 2, 0.1).unwrap();
    assert!(matches!(build_taylor_net::<f64>(&plain, &spec), Err(TaylorError::OracleUnavailable)));
    let f = JetTarget::new(4, |x| x[0].sin());
    let spec = TaylorGridSpec::new(4, 3, 1e-6).unwrap();
    assert!(matches!(build_taylor_net::<f64>(&f, &spec), Err(TaylorError::ScaleExceeded { .. })));
}

#[test]
fn derivative_bound_rescales_coefficients() {
    let f = JetTarget::new(1, |x| (&x[0] * 3.0).sin() * 4.0);
    let spec = TaylorGridSpec::new(1, 3, 0.05).unwrap().with_grid(8).with_derivative_bound(108.0);
    let net = build_taylor_net::<f64>(&f, &spec).unwrap();
    let e = net.grid_error(&f, 200, true).unwrap();
    assert!(e.sup <= spec.error_bound(), "{e:?} vs {}", spec.error_bound());
    assert!(net.cells.iter().all(|c| c.coeffs.iter().all(|v| v.abs() <= 1.0)));
}

#[test]
fn single_precision_network() {
    let f = JetTarget::new(1, |x| x[0].cos());
    let spec = TaylorGridSpec::new(1, 2, 0.05).unwrap();
    let net = build_taylor_net::<f32>(&f, &spec).unwrap();
    let e = net.grid_error(&f, 40, true).unwrap();
    assert!(e.sup <= spec.error_bound() + 1e-5, "{e:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn depth_and_bound_hold_for_random_specs(nx in 1usize..=2, k in 1usize..=3, grid in 1usize..=3, shift in -1.0f64..1.0) {
        let f = JetTarget::new(nx, move |x| (x.iter().skip(1).fold(x[0].clone(), |a, b| a + b) + shift).sin() * (1.0 / nx as f64));
        let spec = TaylorGridSpec::new(nx, k, 1.0).unwrap().with_grid(grid);
        let net = build_taylor_net::<f64>(&f, &spec).unwrap();
        let r = report_complexity(&net);
        prop_assert!(r.depth <= 2 * k);
        prop_assert_eq!((r.first_layer_constraints, r.first_layer_variables), spec.first_layer());
        let e = net.grid_error(&f, 7, true).unwrap();
        prop_assert!(e.sup <= spec.error_bound() + 1e-12);
    }
}
