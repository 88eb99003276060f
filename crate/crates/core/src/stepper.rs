//! Explicit Euler time stepping for u_t = F(D²u) with boundary enforcement.

use serde::{Deserialize, Serialize};

use crate::boundary::{BoundarySpec, Enforcer};
use crate::domain::{Grid, Point};
use crate::error::{Error, Result};
use crate::operators::{eig_sym, OperatorSpec, SymMatrix};
use crate::stencil::{apply_hessian, apply_vector, gradient_row, hessian_row, Stencils};

/// Nodal values at time `t`. Exterior nodes hold NaN and are never read.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub u: Vec<f64>,
    pub t: f64,
}

impl State {
    /// Samples `f` on the active nodes of `grid` at t = 0.
    pub fn sample(grid: &Grid, f: impl Fn(&Point) -> f64) -> State {
        let u = (0..grid.len())
            .map(|n| {
                if grid.is_active(n) {
                    f(&grid.coords(n))
                } else {
                    f64::NAN
                }
            })
            .collect();
        State { u, t: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepConfig {
    #[serde(default = "StepConfig::default_dt_safety")]
    pub dt_safety: f64,
    pub t_end: f64,
    #[serde(default = "StepConfig::default_t0")]
    pub t0: f64,
}

impl StepConfig {
    pub const DEFAULT_DT_SAFETY: f64 = 0.9;
    pub const DEFAULT_T0: f64 = 1.0 / 16.0;

    fn default_dt_safety() -> f64 {
        Self::DEFAULT_DT_SAFETY
    }

    fn default_t0() -> f64 {
        Self::DEFAULT_T0
    }

    pub fn new(t_end: f64) -> Self {
        StepConfig {
            dt_safety: Self::DEFAULT_DT_SAFETY,
            t_end,
            t0: Self::DEFAULT_T0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt_safety > 0.0 && self.dt_safety <= 1.0) {
            return Err(Error::config("time.dt_safety", "must lie in (0, 1]"));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::config("time.t_end", "must be positive"));
        }
        if !(self.t0 > 0.0 && self.t0.is_finite()) {
            return Err(Error::config("time.t0", "must be positive"));
        }
        Ok(())
    }

    /// Number of checkpoint windows, rounding `t_end / t0` to the nearest
    /// integer when it is within roundoff of one.
    pub fn checkpoints(&self) -> usize {
        let r = self.t_end / self.t0;
        let k = r.round();
        if (r - k).abs() <= 1e-9 * r.max(1.0) {
            k as usize
        } else {
            r.ceil() as usize
        }
    }
}

/// Central-difference gradient at an interior node.
pub fn gradient(grid: &Grid, u: &[f64], node: usize) -> Result<[f64; 3]> {
    Ok(apply_vector(&gradient_row(grid, node)?, u))
}

/// Hessian at an interior node.
pub fn hessian(grid: &Grid, u: &[f64], node: usize) -> Result<SymMatrix> {
    Ok(apply_hessian(&hessian_row(grid, node)?, u, grid.dim()))
}

/// A discretized problem: grid, operator, boundary condition and stencils.
#[derive(Debug, Clone)]
pub struct Solver {
    grid: Grid,
    op: OperatorSpec,
    enforcer: Enforcer,
    stencils: Stencils,
}

impl Solver {
    pub fn new(grid: Grid, op: OperatorSpec, boundary: &BoundarySpec) -> Result<Self> {
        let enforcer = Enforcer::new(boundary, &grid)?;
        let stencils = Stencils::build(&grid)?;
        Ok(Solver {
            grid,
            op,
            enforcer,
            stencils,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn operator(&self) -> &OperatorSpec {
        &self.op
    }

    pub fn enforcer(&self) -> &Enforcer {
        &self.enforcer
    }

    pub fn stencils(&self) -> &Stencils {
        &self.stencils
    }

    /// Hessian at the `ordinal`-th interior node.
    pub fn hessian_at(&self, ordinal: usize, u: &[f64]) -> SymMatrix {
        self.stencils.hessian(ordinal, u)
    }

    /// F(D²u) at every interior node (in interior order) and the largest
    /// eigenvalue Λ of the operator derivative over those nodes.
    pub fn rate(&self, u: &[f64], out: &mut [f64]) -> Result<f64> {
        let mut lambda: f64 = 0.0;
        for (k, (&node, slot)) in self.grid.interior_nodes().iter().zip(out.iter_mut()).enumerate() {
            let eig = eig_sym(&self.stencils.hessian(k, u));
            let (f, df) = self.op.evaluate(&eig, Some(node))?;
            *slot = f;
            lambda = lambda.max(df);
        }
        if !lambda.is_finite() {
            return Err(Error::Admissibility {
                node: None,
                branch: self.op.branch().name(),
                value: lambda,
                bound: f64::INFINITY,
                eigenvalues: Vec::new(),
            });
        }
        Ok(lambda)
    }

    fn stability_limit(&self, lambda: f64) -> f64 {
        let h = self.grid.min_spacing();
        if lambda > 0.0 {
            h * h / (2.0 * self.grid.dim() as f64 * lambda)
        } else {
            f64::INFINITY
        }
    }

    /// Step size for the state `u`, shrunk so that `cfg.t0` is an integer
    /// multiple of it.
    pub fn cfl_dt(&self, u: &[f64], cfg: &StepConfig) -> Result<f64> {
        let mut scratch = vec![0.0; self.grid.interior_nodes().len()];
        let lambda = self.rate(u, &mut scratch)?;
        Ok(self.dt_for(lambda, cfg))
    }

    fn dt_for(&self, lambda: f64, cfg: &StepConfig) -> f64 {
        let raw = cfg.dt_safety * self.stability_limit(lambda);
        let m = (cfg.t0 / raw).ceil().max(1.0);
        cfg.t0 / m
    }

    /// Applies the boundary condition to `u` in place.
    pub fn enforce(&self, u: &mut [f64]) -> Result<()> {
        self.enforcer.enforce(u).map(|_| ())
    }

    /// One explicit Euler step of length `dt` followed by enforcement.
    pub fn step(&self, state: &State, dt: f64) -> Result<State> {
        let mut rate = vec![0.0; self.grid.interior_nodes().len()];
        self.rate(&state.u, &mut rate)?;
        let mut next = state.clone();
        self.advance(&mut next, &rate, dt)?;
        Ok(next)
    }

    fn advance(&self, state: &mut State, rate: &[f64], dt: f64) -> Result<()> {
        let t = state.t + dt;
        for (&node, &f) in self.grid.interior_nodes().iter().zip(rate) {
            let v = state.u[node] + dt * f;
            if !v.is_finite() {
                return Err(Error::NonFinite { node, t });
            }
            state.u[node] = v;
        }
        self.enforcer.enforce(&mut state.u)?;
        state.t = t;
        Ok(())
    }

    /// Enforces the boundary condition on `u0`, then steps to `cfg.t_end`,
    /// calling `observer` with the states at consecutive checkpoints
    /// `(k − 1)·t0` and `k·t0`.
    pub fn evolve(
        &self,
        u0: &State,
        cfg: &StepConfig,
        observer: &mut dyn CheckpointObserver,
    ) -> Result<Evolution> {
        cfg.validate()?;
        let mut prev = u0.clone();
        self.enforcer.enforce(&mut prev.u)?;
        observer.start(self, &prev)?;
        let windows = cfg.checkpoints();
        let mut rate = vec![0.0; self.grid.interior_nodes().len()];
        let mut steps = 0;
        for k in 1..=windows {
            let t_target = k as f64 * cfg.t0;
            let mut lambda = self.rate(&prev.u, &mut rate)?;
            let curr = 'window: loop {
                let dt = self.dt_for(lambda, cfg);
                let substeps = (cfg.t0 / dt).round() as usize;
                let mut state = prev.clone();
                for _ in 0..substeps {
                    let l = self.rate(&state.u, &mut rate)?;
                    if dt > self.stability_limit(l) {
                        // Λ grew inside the window: redo it with a smaller step
                        lambda = lambda.max(l);
                        continue 'window;
                    }
                    self.advance(&mut state, &rate, dt)?;
                    steps += 1;
                }
                state.t = t_target;
                break state;
            };
            observer.checkpoint(self, &prev, &curr)?;
            prev = curr;
        }
        Ok(Evolution {
            last: prev,
            steps,
            checkpoints: windows,
        })
    }
}

/// Result of [`Solver::evolve`].
#[derive(Debug, Clone)]
pub struct Evolution {
    pub last: State,
    pub steps: usize,
    pub checkpoints: usize,
}

/// Receives checkpoint pairs during [`Solver::evolve`]; states are read-only.
pub trait CheckpointObserver {
    fn start(&mut self, _solver: &Solver, _initial: &State) -> Result<()> {
        Ok(())
    }

    fn checkpoint(&mut self, solver: &Solver, prev: &State, curr: &State) -> Result<()>;
}

/// Keeps every checkpoint state.
#[derive(Debug, Default, Clone)]
pub struct Recorder {
    pub states: Vec<State>,
}

impl CheckpointObserver for Recorder {
    fn start(&mut self, _: &Solver, initial: &State) -> Result<()> {
        self.states.push(initial.clone());
        Ok(())
    }

    fn checkpoint(&mut self, _: &Solver, _: &State, curr: &State) -> Result<()> {
        self.states.push(curr.clone());
        Ok(())
    }
}
