//! Closed-form solution of the heat equation on [0, 1] with constant fluxes
//! u_x(0) = α, u_x(1) = β:
//!
//! u(x, t) = (β − α)·t + V(x) + Σₙ Cₙ e^{−n²π²t} cos nπx,  V(x) = (β − α)x²/2 + αx.

use std::f64::consts::PI;

use crate::domain::{DomainSpec, Grid};
use crate::error::{Error, Result};
use crate::stepper::State;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatProblem {
    pub alpha: f64,
    pub beta: f64,
    pub n_modes: usize,
    /// Simpson panels (even) used for the coefficients.
    pub quadrature_intervals: usize,
}

impl HeatProblem {
    pub const DEFAULT_MODES: usize = 64;
    pub const DEFAULT_QUADRATURE: usize = 8192;

    pub fn new(alpha: f64, beta: f64) -> Self {
        HeatProblem {
            alpha,
            beta,
            n_modes: Self::DEFAULT_MODES,
            quadrature_intervals: Self::DEFAULT_QUADRATURE,
        }
    }

    pub fn steady_profile(&self, x: f64) -> f64 {
        0.5 * (self.beta - self.alpha) * x * x + self.alpha * x
    }

    pub fn steady_slope(&self, x: f64) -> f64 {
        (self.beta - self.alpha) * x + self.alpha
    }

    pub fn drift(&self, t: f64) -> f64 {
        (self.beta - self.alpha) * t
    }

    /// C₀ = ∫(u₀ − V), Cₙ = 2∫(u₀ − V) cos nπx for n = 1..=n_modes.
    pub fn fourier_coeffs(&self, u0: &dyn Fn(f64) -> f64) -> Vec<f64> {
        let m = self.quadrature_intervals.max(2).next_multiple_of(2);
        let h = 1.0 / m as f64;
        let samples: Vec<(f64, f64)> = (0..=m)
            .map(|i| {
                let x = i as f64 * h;
                let w = if i == 0 || i == m {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                (x, w * h / 3.0 * (u0(x) - self.steady_profile(x)))
            })
            .collect();
        (0..=self.n_modes)
            .map(|n| {
                let k = n as f64 * PI;
                let s: f64 = samples.iter().map(|(x, g)| g * (k * x).cos()).sum();
                if n == 0 {
                    s
                } else {
                    2.0 * s
                }
            })
            .collect()
    }
}

/// The series solution for a given initial datum.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatOracle {
    problem: HeatProblem,
    coeffs: Vec<f64>,
}

impl HeatOracle {
    pub fn new(problem: HeatProblem, u0: &dyn Fn(f64) -> f64) -> Self {
        let coeffs = problem.fourier_coeffs(u0);
        HeatOracle { problem, coeffs }
    }

    pub fn problem(&self) -> &HeatProblem {
        &self.problem
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn exact(&self, x: f64, t: f64) -> f64 {
        let p = &self.problem;
        let series: f64 = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| {
                let k = n as f64 * PI;
                c * (-k * k * t).exp() * (k * x).cos()
            })
            .sum();
        p.drift(t) + p.steady_profile(x) + series
    }

    /// ∂ₓu, differentiating the truncated series term by term.
    pub fn exact_dx(&self, x: f64, t: f64) -> f64 {
        let series: f64 = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(n, c)| {
                let k = n as f64 * PI;
                -c * k * (-k * k * t).exp() * (k * x).sin()
            })
            .sum();
        self.problem.steady_slope(x) + series
    }

    /// Tail estimate |C_N|·e^{−N²π²t}·N for the truncation at N = n_modes.
    pub fn tail_bound(&self, t: f64) -> f64 {
        let n = self.problem.n_modes as f64;
        let c = self.coeffs.last().copied().unwrap_or(0.0);
        c.abs() * (-n * n * PI * PI * t).exp() * n
    }

    /// max over active nodes of |fd − exact| at the state's time.
    pub fn compare(&self, grid: &Grid, state: &State) -> Result<f64> {
        match grid.spec() {
            DomainSpec::Interval { lo, hi, .. } if *lo == 0.0 && *hi == 1.0 => {}
            other => {
                return Err(Error::Usage(format!(
                    "heat oracle needs the interval [0, 1], got {}",
                    other.kind_name()
                )))
            }
        }
        if state.u.len() != grid.len() {
            return Err(Error::Usage("state does not match the grid".into()));
        }
        Ok(grid
            .active_nodes()
            .map(|n| (state.u[n] - self.exact(grid.coords(n)[0], state.t)).abs())
            .fold(0.0, f64::max))
    }
}
