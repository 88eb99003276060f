//! Convergence diagnostics on checkpoint pairs.
//!
//! With `w(x, t) = u(x, t) − u(x, t + t0)`, the oscillation of `w` decays
//! toward zero as the solution approaches a translator `ũ + C∞·t`. Each
//! checkpoint contributes one [`SeriesRow`]; the final state gives the
//! profile `ũ`, normalized to vanish at the anchor node.

use serde::{Deserialize, Serialize};

use crate::domain::Grid;
use crate::error::{Error, Result};
use crate::operators::eig_sym;
use crate::stepper::{CheckpointObserver, Evolution, Solver, State};

/// max − min over the finite entries of `field` (exterior sentinels are skipped).
pub fn osc(field: &[f64]) -> f64 {
    let (lo, hi) = field
        .iter()
        .filter(|v| !v.is_nan())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    if lo > hi {
        0.0
    } else {
        hi - lo
    }
}

fn check_lag(a: &State, b: &State, t0: f64) -> Result<()> {
    if a.u.len() != b.u.len() {
        return Err(Error::Usage("states live on different grids".into()));
    }
    let gap = b.t - a.t;
    if (gap - t0).abs() > 1e-12 * t0.max(b.t.abs()) {
        return Err(Error::Usage(format!(
            "checkpoint gap {gap} differs from the lag {t0}"
        )));
    }
    Ok(())
}

/// `u(·, t) − u(·, t + t0)` nodewise.
pub fn lagged_difference(at_t: &State, at_t_plus_t0: &State, t0: f64) -> Result<Vec<f64>> {
    check_lag(at_t, at_t_plus_t0, t0)?;
    Ok(at_t
        .u
        .iter()
        .zip(&at_t_plus_t0.u)
        .map(|(a, b)| a - b)
        .collect())
}

/// `(u(x0, t + t0) − u(x0, t)) / t0`.
pub fn speed_estimate(at_t: &State, at_t_plus_t0: &State, x0: usize, t0: f64) -> Result<f64> {
    check_lag(at_t, at_t_plus_t0, t0)?;
    let v = (at_t_plus_t0.u[x0] - at_t.u[x0]) / t0;
    if v.is_nan() {
        return Err(Error::Usage(format!("anchor node {x0} carries no value")));
    }
    Ok(v)
}

/// Domain average of the checkpoint speed over active nodes.
pub fn mean_speed(grid: &Grid, at_t: &State, at_t_plus_t0: &State, t0: f64) -> Result<f64> {
    check_lag(at_t, at_t_plus_t0, t0)?;
    let mut sum = 0.0;
    let mut count = 0usize;
    for n in grid.active_nodes() {
        sum += at_t_plus_t0.u[n] - at_t.u[n];
        count += 1;
    }
    Ok(sum / (count as f64 * t0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MonotoneCheck {
    pub monotone: bool,
    pub first_violation: Option<usize>,
}

/// Nonincrease of `series` within `1e-9·(1 + series[0])`.
pub fn check_monotone_osc(series: &[f64]) -> MonotoneCheck {
    let Some(&first) = series.first() else {
        return MonotoneCheck {
            monotone: true,
            first_violation: None,
        };
    };
    let tol = 1e-9 * (1.0 + first.abs());
    let first_violation = series.windows(2).position(|w| w[1] > w[0] + tol).map(|i| i + 1);
    MonotoneCheck {
        monotone: first_violation.is_none(),
        first_violation,
    }
}

/// `ũ = (u − C∞·t) − (u(x0) − C∞·t)`. The drift cancels, so the result is
/// computed as `u − u(x0)` and vanishes exactly at the anchor.
pub fn extract_profile(last: &State, x0: usize) -> Vec<f64> {
    let base = last.u[x0];
    last.u.iter().map(|v| v - base).collect()
}

/// max |F(D²ũ) − c| over interior nodes at least `margin` inside the domain.
pub fn elliptic_residual(solver: &Solver, profile: &[f64], c: f64, margin: f64) -> Result<f64> {
    let grid = solver.grid();
    let mut worst: f64 = 0.0;
    for (k, &node) in grid.interior_nodes().iter().enumerate() {
        if grid.spec().distance_to_boundary(&grid.coords(node)) < margin {
            continue;
        }
        let eig = eig_sym(&solver.hessian_at(k, profile));
        let (f, _) = solver.operator().evaluate(&eig, Some(node))?;
        worst = worst.max((f - c).abs());
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub tol_osc: f64,
    pub tol_speed: f64,
    pub obliqueness_floor: f64,
    #[serde(default = "Tolerances::default_cap")]
    pub cap_ut: f64,
    #[serde(default = "Tolerances::default_cap")]
    pub cap_grad: f64,
    #[serde(default = "Tolerances::default_cap")]
    pub cap_hess: f64,
}

impl Tolerances {
    pub const DEFAULT_CAP: f64 = 1e6;

    fn default_cap() -> f64 {
        Self::DEFAULT_CAP
    }

    pub fn new(tol_osc: f64, tol_speed: f64, obliqueness_floor: f64) -> Self {
        Tolerances {
            tol_osc,
            tol_speed,
            obliqueness_floor,
            cap_ut: Self::DEFAULT_CAP,
            cap_grad: Self::DEFAULT_CAP,
            cap_hess: Self::DEFAULT_CAP,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("tolerances.tol_osc", self.tol_osc),
            ("tolerances.tol_speed", self.tol_speed),
            ("tolerances.obliqueness_floor", self.obliqueness_floor),
            ("tolerances.cap_ut", self.cap_ut),
            ("tolerances.cap_grad", self.cap_grad),
            ("tolerances.cap_hess", self.cap_hess),
        ];
        for (path, v) in fields {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(path, format!("must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// Diagnostics at one checkpoint `t`, computed from the states at `t − t0` and `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesRow {
    pub t: f64,
    pub osc_w: f64,
    pub speed_estimate: f64,
    pub speed_mean: f64,
    pub sup_ut_minus_speed: f64,
    /// min over the boundary of |β̄·ν| for the linear condition met by `w`
    pub min_obliqueness: f64,
    pub max_boundary_residual: f64,
    pub sup_ut: f64,
    pub max_grad: f64,
    pub max_hess: f64,
    /// smallest eigenvalue of the averaged operator derivative between the two states
    pub min_frozen_ellipticity: f64,
}

impl SeriesRow {
    pub const CSV_HEADER: [&'static str; 9] = [
        "t",
        "osc_w",
        "speed_estimate",
        "sup_ut_minus_speed",
        "min_obliqueness",
        "max_boundary_residual",
        "sup_ut",
        "max_grad",
        "max_hess",
    ];

    pub fn csv_values(&self) -> [f64; 9] {
        [
            self.t,
            self.osc_w,
            self.speed_estimate,
            self.sup_ut_minus_speed,
            self.min_obliqueness,
            self.max_boundary_residual,
            self.sup_ut,
            self.max_grad,
            self.max_hess,
        ]
    }
}

/// Whether the series ends converged: small oscillation and speed spread at
/// the last checkpoint, obliqueness above the floor at every checkpoint.
pub fn convergence_decision(series: &[SeriesRow], tol: &Tolerances) -> bool {
    let Some(last) = series.last() else {
        return false;
    };
    last.osc_w <= tol.tol_osc
        && last.sup_ut_minus_speed <= tol.tol_speed
        && series.iter().all(|r| r.min_obliqueness >= tol.obliqueness_floor)
}

/// Checkpoint observer collecting [`SeriesRow`]s.
#[derive(Debug, Clone)]
pub struct Monitor {
    t0: f64,
    anchor: usize,
    tol: Tolerances,
    rows: Vec<SeriesRow>,
    cap_breach: Option<String>,
}

impl Monitor {
    /// Anchored at the active node nearest the domain centroid.
    pub fn new(grid: &Grid, t0: f64, tol: Tolerances) -> Self {
        let anchor = grid.nearest_active(&grid.spec().centroid());
        Self::with_anchor(anchor, t0, tol)
    }

    pub fn with_anchor(anchor: usize, t0: f64, tol: Tolerances) -> Self {
        Monitor {
            t0,
            anchor,
            tol,
            rows: Vec::new(),
            cap_breach: None,
        }
    }

    pub fn anchor(&self) -> usize {
        self.anchor
    }

    pub fn rows(&self) -> &[SeriesRow] {
        &self.rows
    }

    pub fn cap_breach(&self) -> Option<&str> {
        self.cap_breach.as_deref()
    }

    pub fn row(&self, solver: &Solver, prev: &State, curr: &State) -> Result<SeriesRow> {
        let grid = solver.grid();
        let w = lagged_difference(prev, curr, self.t0)?;
        let speed = speed_estimate(prev, curr, self.anchor, self.t0)?;
        let speed_mean = mean_speed(grid, prev, curr, self.t0)?;
        let mut sup_ut: f64 = 0.0;
        let mut spread: f64 = 0.0;
        for n in grid.active_nodes() {
            let ut = -w[n] / self.t0;
            sup_ut = sup_ut.max(ut.abs());
            spread = spread.max((ut - speed).abs());
        }

        let enforcer = solver.enforcer();
        let mut max_grad: f64 = 0.0;
        for (i, _) in grid.boundary_nodes().iter().enumerate() {
            let p = enforcer.gradient(i, &curr.u);
            max_grad = max_grad.max(norm(&p));
        }
        let op = solver.operator();
        let mut max_hess: f64 = 0.0;
        let mut ellipticity = f64::INFINITY;
        for (k, &node) in grid.interior_nodes().iter().enumerate() {
            let p = solver.stencils().gradient(k, &curr.u);
            max_grad = max_grad.max(norm(&p));
            let a1 = solver.hessian_at(k, &curr.u);
            let e = eig_sym(&a1);
            max_hess = max_hess.max(e.min().abs().max(e.max().abs()));
            let a0 = solver.hessian_at(k, &prev.u);
            let frozen = op.frozen_coefficients(&a0, &a1).map_err(|err| match err {
                Error::Admissibility {
                    branch,
                    value,
                    bound,
                    eigenvalues,
                    ..
                } => Error::Admissibility {
                    node: Some(node),
                    branch,
                    value,
                    bound,
                    eigenvalues,
                },
                other => other,
            })?;
            ellipticity = ellipticity.min(eig_sym(&frozen).min());
        }

        Ok(SeriesRow {
            t: curr.t,
            osc_w: osc(&w),
            speed_estimate: speed,
            speed_mean,
            sup_ut_minus_speed: spread,
            min_obliqueness: enforcer.min_frozen_obliqueness(&prev.u, &curr.u),
            max_boundary_residual: enforcer.max_residual(&curr.u)?,
            sup_ut,
            max_grad,
            max_hess,
            min_frozen_ellipticity: ellipticity,
        })
    }

    /// Assembles the report from the evolution outcome.
    pub fn report(&self, solver: &Solver, outcome: &Result<Evolution>) -> ConvergenceReport {
        let grid = solver.grid();
        let osc_series: Vec<f64> = self.rows.iter().map(|r| r.osc_w).collect();
        let mono = check_monotone_osc(&osc_series);
        let c_inf = self.rows.last().map(|r| r.speed_estimate);
        let mut report = ConvergenceReport {
            converged: false,
            c_inf,
            anchor: self.anchor,
            anchor_coords: grid.coords(self.anchor)[..grid.dim()].to_vec(),
            t_final: self.rows.last().map_or(0.0, |r| r.t),
            steps: 0,
            monotone_osc: mono.monotone,
            first_osc_violation: mono.first_violation,
            cap_breach: self.cap_breach.clone(),
            error: None,
            elliptic_residual: None,
            oracle_error: None,
            series: self.rows.clone(),
            profile: Vec::new(),
        };
        match outcome {
            Ok(evo) => {
                report.steps = evo.steps;
                let profile = extract_profile(&evo.last, self.anchor);
                if let Some(c) = c_inf {
                    let margin = 3.0 * grid.min_spacing() * (1.0 - 1e-9);
                    match elliptic_residual(solver, &profile, c, margin) {
                        Ok(r) => report.elliptic_residual = Some(r),
                        Err(e) => report.error = Some(e.to_string()),
                    }
                }
                report.profile = grid.active_nodes().map(|n| profile[n]).collect();
                report.converged = report.error.is_none()
                    && report.cap_breach.is_none()
                    && convergence_decision(&self.rows, &self.tol);
            }
            Err(e) => report.error = Some(e.to_string()),
        }
        report
    }
}

fn norm(p: &[f64; 3]) -> f64 {
    (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt()
}

impl CheckpointObserver for Monitor {
    fn checkpoint(&mut self, solver: &Solver, prev: &State, curr: &State) -> Result<()> {
        let row = self.row(solver, prev, curr)?;
        if self.cap_breach.is_none() {
            let caps = [
                ("sup_ut", row.sup_ut, self.tol.cap_ut),
                ("max_grad", row.max_grad, self.tol.cap_grad),
                ("max_hess", row.max_hess, self.tol.cap_hess),
            ];
            if let Some((name, v, cap)) = caps.iter().find(|(_, v, cap)| v > cap) {
                self.cap_breach = Some(format!("{name} = {v:e} exceeds cap {cap:e} at t = {}", row.t));
            }
        }
        self.rows.push(row);
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceReport {
    pub converged: bool,
    pub c_inf: Option<f64>,
    pub anchor: usize,
    pub anchor_coords: Vec<f64>,
    pub t_final: f64,
    pub steps: usize,
    pub monotone_osc: bool,
    pub first_osc_violation: Option<usize>,
    pub cap_breach: Option<String>,
    pub error: Option<String>,
    pub elliptic_residual: Option<f64>,
    pub oracle_error: Option<f64>,
    pub series: Vec<SeriesRow>,
    /// ũ on active nodes, in node order
    pub profile: Vec<f64>,
}

impl ConvergenceReport {
    /// Report for a run that failed before its first checkpoint.
    pub fn aborted(error: String) -> Self {
        ConvergenceReport {
            converged: false,
            c_inf: None,
            anchor: 0,
            anchor_coords: Vec::new(),
            t_final: 0.0,
            steps: 0,
            monotone_osc: true,
            first_osc_violation: None,
            cap_breach: None,
            error: Some(error),
            elliptic_residual: None,
            oracle_error: None,
            series: Vec::new(),
            profile: Vec::new(),
        }
    }
}
