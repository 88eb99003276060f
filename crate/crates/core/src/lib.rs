//! Explicit finite-difference evolution of fully nonlinear parabolic
//! equations u_t = F(D²u) under oblique boundary conditions h(Du, x) = 0,
//! with diagnostics for convergence to a translating solution ũ + C∞·t.
//!
//! The operator family covers the trace (heat flow) and the τ-family
//! interpolating between ln det D²u and Σ arctan λᵢ. Boundary conditions are
//! constant end fluxes on an interval, Neumann data, and the second boundary
//! condition Du(Ω) = disk of radius R.

pub mod boundary;
pub mod domain;
pub mod error;
pub mod heat;
pub mod monitor;
pub mod operators;
pub mod runner;
pub mod stencil;
pub mod stepper;

pub use boundary::{enforce, BoundaryPoint, BoundarySpec, Enforcer};
pub use domain::{build_grid, DomainSpec, Grid, NodeKind, Point};
pub use error::{Error, Result};
pub use heat::{HeatOracle, HeatProblem};
pub use monitor::{
    check_monotone_osc, convergence_decision, extract_profile, lagged_difference, osc,
    speed_estimate, ConvergenceReport, Monitor, SeriesRow, Tolerances,
};
pub use operators::{eig_sym, parse_tau, Branch, Eigen, Family, OperatorSpec, SymMatrix};
pub use runner::{parse_config, RunConfig, RunReport};
pub use stepper::{CheckpointObserver, Solver, State, StepConfig};
