use std::f64::consts::{FRAC_PI_2, PI};

use proptest::prelude::*;
use transflow_core::{
    build_grid, enforce, eig_sym, extract_profile, osc, speed_estimate, BoundaryPoint, BoundarySpec,
    CheckpointObserver, DomainSpec, Enforcer, Grid, OperatorSpec, Solver, State, StepConfig, SymMatrix,
};

fn disk(n: usize) -> Grid {
    build_grid(&DomainSpec::unit_disk(n)).unwrap()
}

fn rectangle() -> Grid {
    build_grid(&DomainSpec::Rectangle {
        lo: [0.0, -0.5],
        hi: [1.5, 0.5],
        resolution: [31, 21],
    })
    .unwrap()
}

fn operators() -> impl Strategy<Value = OperatorSpec> {
    prop_oneof![
        Just(OperatorSpec::trace()),
        Just(OperatorSpec::tau(0.0).unwrap()),
        (0.05..1.5f64).prop_map(|t| OperatorSpec::tau(t).unwrap()),
        Just(OperatorSpec::tau(FRAC_PI_2).unwrap()),
    ]
}

/// Symmetric 2×2 matrix with spectrum in `[lo, lo + 4]`.
fn admissible(op: &OperatorSpec) -> impl Strategy<Value = SymMatrix> {
    let lb = op.branch().lower_bound();
    let lo = if lb.is_finite() { lb + 0.1 } else { -3.0 };
    (lo..lo + 4.0, lo..lo + 4.0, 0.0..PI).prop_map(|(l1, l2, th)| rotated(l1, l2, th))
}

fn rotated(l1: f64, l2: f64, th: f64) -> SymMatrix {
    let (c, s) = (th.cos(), th.sin());
    let frame = [[c, s, 0.0], [-s, c, 0.0], [0.0, 0.0, 1.0]];
    SymMatrix::from_spectral(&frame, &[l1, l2])
}

fn op_and_matrix(step: f64) -> impl Strategy<Value = (OperatorSpec, SymMatrix, SymMatrix)> {
    operators().prop_flat_map(move |op| {
        let psd = (0.0..step, 0.0..step, 0.0..PI).prop_map(|(a, b, t)| rotated(a, b, t));
        (Just(op), admissible(&op), psd)
    })
}

proptest! {
    #[test]
    fn operator_is_monotone((op, a, p) in op_and_matrix(2.0)) {
        let fa = op.value(&a).unwrap();
        let fb = op.value(&a.add(&p)).unwrap();
        prop_assert!(fb >= fa - 1e-12 * (1.0 + fa.abs()));
    }

    /// Exact up to the five-point quadrature, which is fine for short segments.
    #[test]
    fn frozen_coefficients_integrate_the_difference((op, a, p) in op_and_matrix(0.2)) {
        let b = a.add(&p);
        let frozen = op.frozen_coefficients(&a, &b).unwrap();
        let lhs = op.value(&b).unwrap() - op.value(&a).unwrap();
        let rhs = frozen.frobenius_dot(&p);
        prop_assert!((lhs - rhs).abs() <= 1e-6 * (1.0 + lhs.abs()), "{lhs} vs {rhs}");
        prop_assert!(eig_sym(&frozen).min() >= -1e-14);
    }

    #[test]
    fn eigen_frame_is_orthonormal(entries in prop::array::uniform6(-5.0..5.0f64)) {
        let a = SymMatrix::from_packed(3, entries);
        let e = eig_sym(&a);
        for i in 0..3 {
            for j in 0..3 {
                let d: f64 = (0..3).map(|k| e.vector(i)[k] * e.vector(j)[k]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((d - want).abs() <= 1e-12);
            }
        }
        prop_assert!(e.reconstruct().sub(&a).max_abs() <= 1e-12 * a.max_abs().max(1.0));
        prop_assert!(e.values().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn osc_ignores_constants(values in prop::collection::vec(-10.0..10.0f64, 2..40), c in -100.0..100.0f64) {
        let shifted: Vec<f64> = values.iter().map(|v| v + c).collect();
        let negated: Vec<f64> = values.iter().map(|v| -v).collect();
        prop_assert!((osc(&shifted) - osc(&values)).abs() <= 1e-12 * (1.0 + c.abs()));
        prop_assert_eq!(osc(&negated), osc(&values));
        prop_assert!(osc(&values) >= 0.0);
    }

    #[test]
    fn speed_of_an_exact_translation(c in -5.0..5.0f64, t in 0.0..4.0f64, amp in -1.0..1.0f64) {
        let g = disk(21);
        let t0 = 1.0 / 16.0;
        let a = State::sample(&g, |x| amp * (x[0] * 3.0).sin() + x[1] * x[1]);
        let a = State { t, ..a };
        let b = State { u: a.u.iter().map(|v| v + c * t0).collect(), t: t + t0 };
        let x0 = g.nearest_active(&[0.0; 3]);
        prop_assert!((speed_estimate(&a, &b, x0, t0).unwrap() - c).abs() <= 1e-11 * (1.0 + c.abs()));
    }

    #[test]
    fn profile_ignores_constants(c in -50.0..50.0f64) {
        let g = disk(21);
        let x0 = g.nearest_active(&[0.1, 0.2, 0.0]);
        let a = State::sample(&g, |x| x[0].exp() + x[1]);
        let b = State { u: a.u.iter().map(|v| v + c).collect(), t: a.t };
        let (pa, pb) = (extract_profile(&a, x0), extract_profile(&b, x0));
        prop_assert_eq!(pa[x0], 0.0);
        for (u, v) in pa.iter().zip(&pb).filter(|(u, _)| !u.is_nan()) {
            prop_assert!((u - v).abs() <= 1e-12 * (1.0 + c.abs()));
        }
    }

    #[test]
    fn h_gradient_matches_differences(p in prop::array::uniform2(-2.0..2.0f64), pick in 0usize..200) {
        let g = disk(21);
        let nodes = g.boundary_nodes();
        let at = BoundaryPoint::of(&g, nodes[pick % nodes.len()]).unwrap();
        let p = [p[0], p[1], 0.0];
        for spec in [BoundarySpec::TargetDisk { radius: 1.3 }, BoundarySpec::Neumann { phi: vec![0.4] }] {
            let grad = spec.h_gradient(&p, &at);
            for k in 0..2 {
                let eps = 1e-6;
                let (mut hi, mut lo) = (p, p);
                hi[k] += eps;
                lo[k] -= eps;
                let fd = (spec.h_value(&hi, &at).unwrap() - spec.h_value(&lo, &at).unwrap()) / (2.0 * eps);
                prop_assert!((fd - grad[k]).abs() <= 1e-7, "{} axis {k}: {fd} vs {}", spec.kind_name(), grad[k]);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn target_enforcement_is_idempotent(
        s in 0.8..1.2f64,
        b in prop::array::uniform2(-0.05..0.05f64),
        eps in -0.05..0.05f64,
        k in 1.0..4.0f64,
    ) {
        let g = disk(31);
        let spec = BoundarySpec::TargetDisk { radius: 1.0 };
        let u0 = State::sample(&g, |x| {
            0.5 * s * (x[0] * x[0] + x[1] * x[1]) + b[0] * x[0] + b[1] * x[1] + eps * (k * x[0]).sin() * x[1]
        });
        let once = enforce(&spec, &g, &u0.u).unwrap();
        let twice = enforce(&spec, &g, &once).unwrap();
        let enforcer = Enforcer::new(&spec, &g).unwrap();
        prop_assert!(enforcer.max_residual(&once).unwrap() <= 1e-10);
        for (a, b) in once.iter().zip(&twice).filter(|(a, _)| !a.is_nan()) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
        // interior values are never touched
        for &n in g.interior_nodes() {
            prop_assert_eq!(once[n], u0.u[n]);
        }
    }

    #[test]
    fn neumann_enforcement_is_idempotent(phi in -2.0..2.0f64, amp in -1.0..1.0f64) {
        let g = rectangle();
        let spec = BoundarySpec::Neumann { phi: vec![phi] };
        let u0 = State::sample(&g, |x| amp * (2.0 * x[0]).cos() * x[1] + x[0]);
        let once = enforce(&spec, &g, &u0.u).unwrap();
        let twice = enforce(&spec, &g, &once).unwrap();
        prop_assert!(Enforcer::new(&spec, &g).unwrap().max_residual(&once).unwrap() <= 1e-10);
        for (a, b) in once.iter().zip(&twice) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }
}

/// |Du| ≈ 2 on the unit circle: transverse slopes from interior values
/// already exceed the target radius, so no boundary value can fix them.
#[test]
fn incompatible_target_data_are_reported() {
    let g = disk(31);
    let u0 = State::sample(&g, |x| x[0] * x[0] + x[1] * x[1]);
    let err = enforce(&BoundarySpec::TargetDisk { radius: 1.0 }, &g, &u0.u).unwrap_err();
    assert!(matches!(err, transflow_core::Error::BoundaryEnforcement { .. }), "{err}");
}

/// Quadratic data evolve exactly under the trace flow: u = q + tr(A)·t.
#[test]
fn rectangle_quadratic_translates_exactly() {
    let g = rectangle();
    let (a11, a12, a22, b1, b2) = (0.7, -0.3, 1.1, 0.2, -0.4);
    let q = |x: &[f64; 3]| 0.5 * (a11 * x[0] * x[0] + 2.0 * a12 * x[0] * x[1] + a22 * x[1] * x[1]) + b1 * x[0] + b2 * x[1];
    let phi: Vec<f64> = g
        .boundary_nodes()
        .iter()
        .map(|&n| {
            let x = g.coords(n);
            let nu = g.inward_normal(n).unwrap();
            let grad = [a11 * x[0] + a12 * x[1] + b1, a12 * x[0] + a22 * x[1] + b2];
            grad[0] * nu[0] + grad[1] * nu[1]
        })
        .collect();
    let s = Solver::new(g, OperatorSpec::trace(), &BoundarySpec::Neumann { phi }).unwrap();
    let u0 = State::sample(s.grid(), q);
    let evo = s.evolve(&u0, &StepConfig::new(0.25), &mut NoOp).unwrap();
    let worst = s
        .grid()
        .active_nodes()
        .map(|n| (evo.last.u[n] - q(&s.grid().coords(n)) - (a11 + a22) * 0.25).abs())
        .fold(0.0, f64::max);
    assert!(worst <= 1e-10, "max error {worst:e}");
}

struct NoOp;
impl CheckpointObserver for NoOp {
    fn checkpoint(&mut self, _: &Solver, _: &State, _: &State) -> transflow_core::Result<()> {
        Ok(())
    }
}

#[derive(Default)]
struct Keep(Vec<State>);
impl CheckpointObserver for Keep {
    fn checkpoint(&mut self, _: &Solver, _: &State, s: &State) -> transflow_core::Result<()> {
        self.0.push(s.clone());
        Ok(())
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    /// Ordered data stay ordered under the trace flow.
    #[test]
    fn comparison_principle(c in prop::array::uniform3(0.0..0.05f64), amp in -0.3..0.3f64) {
        let g = build_grid(&DomainSpec::unit_interval(51)).unwrap();
        let s = Solver::new(g, OperatorSpec::trace(), &BoundarySpec::Flux1d { alpha: -0.5, beta: 0.5 }).unwrap();
        let base = move |x: f64| 0.5 * x * x - 0.5 * x + amp * (PI * x).cos();
        let d = move |x: f64| (1..=3).map(|k| c[k - 1] * (1.0 - (2.0 * PI * k as f64 * x).cos())).sum::<f64>();
        let u0 = State::sample(s.grid(), |x| base(x[0]));
        let v0 = State::sample(s.grid(), |x| base(x[0]) + d(x[0]));
        let cfg = StepConfig::new(0.5);
        let (mut ku, mut kv) = (Keep::default(), Keep::default());
        s.evolve(&u0, &cfg, &mut ku).unwrap();
        s.evolve(&v0, &cfg, &mut kv).unwrap();
        for (a, b) in ku.0.iter().zip(&kv.0) {
            for (x, y) in a.u.iter().zip(&b.u) {
                prop_assert!(x <= &(y + 1e-12));
            }
        }
    }
}

/// The backward problem is refused rather than stepped.
#[test]
fn negative_horizon_is_rejected() {
    let g = build_grid(&DomainSpec::unit_interval(21)).unwrap();
    let s = Solver::new(g, OperatorSpec::trace(), &BoundarySpec::Flux1d { alpha: 0.0, beta: 1.0 }).unwrap();
    let u0 = State::sample(s.grid(), |x| 0.5 * x[0] * x[0]);
    assert!(s.evolve(&u0, &StepConfig::new(-1.0), &mut NoOp).is_err());
}

#[test]
#[allow(clippy::excessive_precision)]
fn log_ratio_value_at_identity() {
    // f(1) = ln((1 + √3 − √2)/(1 + √3 + √2)) to 30 digits, counted once per eigenvalue
    let want = 2.0 * -1.146215834780588843900393655674;
    let got = OperatorSpec::tau(PI / 6.0).unwrap().value(&SymMatrix::identity(2)).unwrap();
    assert!((got - want).abs() <= 1e-14, "{got}");
}
