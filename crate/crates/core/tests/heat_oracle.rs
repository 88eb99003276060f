use std::f64::consts::PI;

use transflow_core::{build_grid, DomainSpec, HeatOracle, HeatProblem, State};

fn sample_oracle(alpha: f64, beta: f64) -> HeatOracle {
    let p = HeatProblem::new(alpha, beta);
    let u0 = move |x: f64| p.steady_profile(x) + 0.3 * (PI * x).cos() - 0.2 * (3.0 * PI * x).cos() + x * x * x;
    HeatOracle::new(p, &u0)
}

#[test]
fn linear_excess_coefficients() {
    // u0 − V = x: C0 = 1/2, Cn = 2((−1)ⁿ − 1)/(nπ)²
    let p = HeatProblem::new(0.0, 1.0);
    let o = HeatOracle::new(p, &|x| p.steady_profile(x) + x);
    let c = o.coefficients();
    let want = [0.5, -4.0 / (PI * PI), 0.0, -4.0 / (9.0 * PI * PI)];
    for (got, want) in c.iter().zip(want) {
        assert!((got - want).abs() <= 1e-12, "{got} vs {want}");
    }
}

#[test]
fn parseval_for_trigonometric_data() {
    let p = HeatProblem::new(0.3, -0.7);
    let g = |x: f64| 0.4 * (PI * x).cos() - 0.15 * (5.0 * PI * x).cos() + 0.2;
    let o = HeatOracle::new(p, &|x| p.steady_profile(x) + g(x));
    let c = o.coefficients();
    let energy = c[0] * c[0] + c[1..].iter().map(|v| 0.5 * v * v).sum::<f64>();
    // ∫ g², Simpson on a fine mesh
    let m = 20000;
    let h = 1.0 / m as f64;
    let direct: f64 = (0..=m)
        .map(|i| {
            let w = if i == 0 || i == m { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
            w * g(i as f64 * h).powi(2)
        })
        .sum::<f64>()
        * h
        / 3.0;
    assert!((energy - direct).abs() <= 1e-12, "{energy} vs {direct}");
}

#[test]
fn flux_conditions_hold() {
    let o = sample_oracle(0.25, 1.5);
    for t in [0.01, 0.1, 0.5, 2.0] {
        assert!((o.exact_dx(0.0, t) - 0.25).abs() <= 1e-12);
        assert!((o.exact_dx(1.0, t) - 1.5).abs() <= 1e-12);
    }
}

#[test]
fn transient_decays_like_the_first_mode() {
    let o = sample_oracle(0.0, 1.0);
    let c = o.coefficients();
    let p = o.problem();
    for t in [1.0, 2.0, 3.0] {
        let bound: f64 = c[1..]
            .iter()
            .enumerate()
            .map(|(k, v)| v.abs() * (-((k + 1) as f64 * PI).powi(2) * t).exp())
            .sum();
        for i in 0..=50 {
            let x = i as f64 / 50.0;
            let excess = o.exact(x, t) - p.steady_profile(x) - p.drift(t) - c[0];
            assert!(excess.abs() <= bound + 1e-15);
        }
        assert!(o.tail_bound(t) < 1e-300);
    }
}

#[test]
fn series_satisfies_the_heat_equation() {
    let o = sample_oracle(0.0, 1.0);
    let (t, n) = (0.5, 401);
    let h = 1.0 / (n - 1) as f64;
    let dt = 1e-5;
    let worst = (1..n - 1)
        .map(|i| {
            let x = i as f64 * h;
            let ut = (o.exact(x, t + dt) - o.exact(x, t - dt)) / (2.0 * dt);
            let uxx = (o.exact(x + h, t) - 2.0 * o.exact(x, t) + o.exact(x - h, t)) / (h * h);
            (ut - uxx).abs()
        })
        .fold(0.0, f64::max);
    assert!(worst <= 2e-4, "{worst:e}");
}

#[test]
fn comparing_the_oracle_with_itself_is_exact() {
    let o = sample_oracle(0.0, 1.0);
    let g = build_grid(&DomainSpec::unit_interval(101)).unwrap();
    let s = State { t: 0.75, ..State::sample(&g, |x| o.exact(x[0], 0.75)) };
    assert_eq!(o.compare(&g, &s).unwrap(), 0.0);
}

#[test]
fn oracle_rejects_other_intervals() {
    let o = sample_oracle(0.0, 1.0);
    let g = build_grid(&DomainSpec::Interval { lo: 0.0, hi: 2.0, resolution: 11 }).unwrap();
    let s = State::sample(&g, |x| x[0]);
    assert!(o.compare(&g, &s).is_err());
}
