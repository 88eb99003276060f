//! Wires configuration, solver, monitor and oracle into runs, and persists
//! their reports.

pub mod config;
mod output;
pub mod presets;

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::domain::DomainSpec;
use crate::error::{Error, Result};
use crate::heat::{HeatOracle, HeatProblem};
use crate::monitor::{ConvergenceReport, Monitor};
use crate::stepper::{CheckpointObserver, Solver, State};
use crate::boundary::BoundarySpec;
use crate::operators::Family;

pub use config::{apply_override, parse_config, RunConfig, Setup};
pub use output::{format_float, to_json_string, write_outputs};
pub use presets::{find as find_preset, list_presets, Preset};

pub const EXIT_CONVERGED: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_NOT_CONVERGED: i32 = 2;

/// Contents of `report.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunReport {
    pub preset: Option<String>,
    pub exit_code: i32,
    pub config: RunConfig,
    pub result: ConvergenceReport,
}

/// A finished run: the report plus the coordinates of the profile nodes.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: RunReport,
    /// coordinates of the active nodes, matching `report.result.profile`
    pub profile_coords: Vec<Vec<f64>>,
    /// `(t, max |fd − exact|)` per checkpoint when the heat oracle applies
    pub oracle_series: Vec<(f64, f64)>,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        self.report.exit_code
    }
}

/// The closed-form heat problem matching `cfg`, if there is one.
pub fn heat_oracle_for(cfg: &RunConfig) -> Result<Option<HeatOracle>> {
    let domain = cfg.domain_spec()?;
    let unit = matches!(domain, DomainSpec::Interval { lo, hi, .. } if lo == 0.0 && hi == 1.0);
    let trace = cfg.operator_spec()?.family() == Family::Trace;
    match cfg.boundary_spec()? {
        BoundarySpec::Flux1d { alpha, beta } if unit && trace => {
            let f = cfg.initial_profile(&domain)?;
            let u0 = move |x: f64| f(&[x, 0.0, 0.0]);
            Ok(Some(HeatOracle::new(HeatProblem::new(alpha, beta), &u0)))
        }
        _ => Ok(None),
    }
}

struct Observer<'a> {
    monitor: Monitor,
    oracle: Option<&'a HeatOracle>,
    oracle_series: Vec<(f64, f64)>,
}

impl CheckpointObserver for Observer<'_> {
    fn checkpoint(&mut self, solver: &Solver, prev: &State, curr: &State) -> Result<()> {
        if let Some(o) = self.oracle {
            self.oracle_series.push((curr.t, o.compare(solver.grid(), curr)?));
        }
        self.monitor.checkpoint(solver, prev, curr)
    }
}

/// Executes a validated configuration. Failures during setup or stepping
/// are recorded in the report and give [`EXIT_ERROR`].
pub fn execute(cfg: &RunConfig, preset: Option<&str>) -> RunOutcome {
    let wrap = |result: ConvergenceReport| {
        let exit_code = if result.error.is_some() {
            EXIT_ERROR
        } else if result.converged {
            EXIT_CONVERGED
        } else {
            EXIT_NOT_CONVERGED
        };
        RunReport {
            preset: preset.map(str::to_owned),
            exit_code,
            config: cfg.clone(),
            result,
        }
    };
    let prepared = cfg.setup().and_then(|s| Ok((s, heat_oracle_for(cfg)?)));
    let (setup, oracle) = match prepared {
        Ok(v) => v,
        Err(e) => {
            return RunOutcome {
                report: wrap(ConvergenceReport::aborted(e.to_string())),
                profile_coords: Vec::new(),
                oracle_series: Vec::new(),
            }
        }
    };
    let Setup {
        solver,
        initial,
        time,
        tolerances,
    } = setup;
    let mut obs = Observer {
        monitor: Monitor::new(solver.grid(), time.t0, tolerances),
        oracle: oracle.as_ref(),
        oracle_series: Vec::new(),
    };
    let evolution = solver.evolve(&initial, &time, &mut obs);
    let mut result = obs.monitor.report(&solver, &evolution);
    if let (Some(o), Ok(evo)) = (&oracle, &evolution) {
        match o.compare(solver.grid(), &evo.last) {
            Ok(e) => result.oracle_error = Some(e),
            Err(e) => result.error = Some(e.to_string()),
        }
    }
    let grid = solver.grid();
    let profile_coords = grid
        .active_nodes()
        .map(|n| grid.coords(n)[..grid.dim()].to_vec())
        .collect();
    RunOutcome {
        report: wrap(result),
        profile_coords,
        oracle_series: obs.oracle_series,
    }
}

/// Executes `cfg` and writes its outputs under `out_dir` (default `cfg.output.dir`).
pub fn run(cfg: &RunConfig, preset: Option<&str>, out_dir: Option<&Path>) -> Result<(RunOutcome, Vec<PathBuf>)> {
    let outcome = execute(cfg, preset);
    let dir = out_dir.unwrap_or(&cfg.output.dir);
    let files = write_outputs(&outcome, dir)?;
    Ok((outcome, files))
}

/// Like [`run`], for configurations the heat oracle covers; the per-checkpoint
/// oracle errors are also written to `oracle.csv`.
pub fn oracle_compare(cfg: &RunConfig, out_dir: Option<&Path>) -> Result<(RunOutcome, Vec<PathBuf>)> {
    if heat_oracle_for(cfg)?.is_none() {
        return Err(Error::Usage(
            "oracle comparison needs the trace operator with flux1d data on the interval [0, 1]".into(),
        ));
    }
    let outcome = execute(cfg, None);
    let dir = out_dir.unwrap_or(&cfg.output.dir);
    let mut files = write_outputs(&outcome, dir)?;
    files.push(output::write_oracle_series(&outcome.oracle_series, dir)?);
    Ok((outcome, files))
}
