//! Run configuration: a strict JSON document.
//!
//! ```json
//! {
//!   "domain":     { "kind": "interval", "bounds": [[0, 1]], "resolution": 201 },
//!   "operator":   { "family": "trace" },
//!   "boundary":   { "kind": "flux1d", "alpha": 0, "beta": 1 },
//!   "initial":    { "kind": "cosine", "amplitude": 0.1 },
//!   "time":       { "t_end": 2 },
//!   "tolerances": { "tol_osc": 1e-6, "tol_speed": 1e-5, "obliqueness_floor": 0.5 },
//!   "output":     { "dir": "out/heat-1d" }
//! }
//! ```
//!
//! Unknown keys are rejected everywhere. `time.dt_safety` defaults to 0.9,
//! `time.t0` to 1/16 and the `tolerances.cap_*` norms to 1e6.

use std::f64::consts::PI;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::boundary::BoundarySpec;
use crate::domain::{build_grid, DomainSpec, Point};
use crate::error::{Error, Result};
use crate::monitor::Tolerances;
use crate::operators::{parse_tau, OperatorSpec};
use crate::stepper::{Solver, State, StepConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub domain: DomainConfig,
    pub operator: OperatorConfig,
    pub boundary: BoundaryConfig,
    pub initial: InitialConfig,
    pub time: StepConfig,
    pub tolerances: Tolerances,
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainKind {
    Interval,
    Rectangle,
    Disk,
}

/// One count for every axis, or one per axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Resolution {
    Uniform(usize),
    PerAxis(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    pub kind: DomainKind,
    /// `[lo, hi]` per axis; a disk is inscribed in its square box.
    pub bounds: Vec<[f64; 2]>,
    pub resolution: Resolution,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyConfig {
    Trace,
    Tau,
}

/// τ as a number of radians or one of the literals `0`, `pi/6`, `pi/4`, `pi/3`, `pi/2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TauValue {
    Radians(f64),
    Literal(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorConfig {
    pub family: FamilyConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<TauValue>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryKind {
    Flux1d,
    Neumann,
    TargetDisk,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PhiValue {
    Uniform(f64),
    PerNode(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryConfig {
    pub kind: BoundaryKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<PhiValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialKind {
    /// Initial data copied from a named preset.
    Preset,
    /// The translator profile matching the boundary condition.
    Translator,
    /// translator + A·cos(πx₁)
    Cosine,
    /// translator + A·(1 − r²)·cos(πx₁), r the normalized distance to the center
    BumpCosine,
    /// translator + A·(1 − r²)²·cos(πx₁)
    FlatBumpCosine,
    /// the constant A
    Constant,
    /// Σ_axis Σ_k c[axis][k]·x_axis^k
    Polynomial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    pub kind: InitialKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let cfg: RunConfig = serde_json::from_str(text)?;
    cfg.validate()?;
    Ok(cfg)
}

/// Sets the dotted `key` inside `doc` to `raw`, read as JSON when it parses
/// and as a string otherwise. Missing intermediate objects are created.
pub fn apply_override(doc: &mut Value, key: &str, raw: &str) -> Result<()> {
    let value = serde_json::from_str::<Value>(raw).unwrap_or_else(|_| Value::String(raw.into()));
    let mut parts: Vec<&str> = key.split('.').collect();
    let leaf = parts.pop().filter(|s| !s.is_empty()).ok_or_else(|| {
        Error::config(key, "empty override key")
    })?;
    let mut node = doc;
    for (i, part) in parts.iter().enumerate() {
        let path = parts[..=i].join(".");
        let obj = node
            .as_object_mut()
            .ok_or_else(|| Error::config(&path, "not an object"))?;
        node = obj
            .entry(part.to_string())
            .or_insert_with(|| Value::Object(Default::default()));
    }
    node.as_object_mut()
        .ok_or_else(|| Error::config(key, "parent is not an object"))?
        .insert(leaf.to_string(), value);
    Ok(())
}

fn required(v: Option<f64>, path: &str) -> Result<f64> {
    match v {
        Some(x) if x.is_finite() => Ok(x),
        Some(x) => Err(Error::config(path, format!("non-finite value {x}"))),
        None => Err(Error::config(path, "missing")),
    }
}

fn forbid<T>(v: &Option<T>, path: &str, reason: &str) -> Result<()> {
    match v {
        Some(_) => Err(Error::config(path, reason)),
        None => Ok(()),
    }
}

/// Everything a run needs, built from a validated [`RunConfig`].
#[derive(Debug, Clone)]
pub struct Setup {
    pub solver: Solver,
    pub initial: State,
    pub time: StepConfig,
    pub tolerances: Tolerances,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let domain = self.domain_spec()?;
        self.operator_spec()?;
        self.boundary_spec()?;
        self.initial_profile(&domain).map(|_| ())?;
        self.time.validate()?;
        self.tolerances.validate()?;
        if self.output.dir.as_os_str().is_empty() {
            return Err(Error::config("output.dir", "empty path"));
        }
        Ok(())
    }

    pub fn domain_spec(&self) -> Result<DomainSpec> {
        let d = &self.domain;
        let dim = match d.kind {
            DomainKind::Interval => 1,
            _ => 2,
        };
        if d.bounds.len() != dim {
            return Err(Error::config(
                "domain.bounds",
                format!("expected {dim} [lo, hi] pairs, got {}", d.bounds.len()),
            ));
        }
        let res: Vec<usize> = match &d.resolution {
            Resolution::Uniform(n) => vec![*n; dim],
            Resolution::PerAxis(v) if v.len() == dim => v.clone(),
            Resolution::PerAxis(v) => {
                return Err(Error::config(
                    "domain.resolution",
                    format!("expected {dim} counts, got {}", v.len()),
                ))
            }
        };
        let spec = match d.kind {
            DomainKind::Interval => DomainSpec::Interval {
                lo: d.bounds[0][0],
                hi: d.bounds[0][1],
                resolution: res[0],
            },
            DomainKind::Rectangle => DomainSpec::Rectangle {
                lo: [d.bounds[0][0], d.bounds[1][0]],
                hi: [d.bounds[0][1], d.bounds[1][1]],
                resolution: [res[0], res[1]],
            },
            DomainKind::Disk => {
                let w0 = d.bounds[0][1] - d.bounds[0][0];
                let w1 = d.bounds[1][1] - d.bounds[1][0];
                if (w0 - w1).abs() > 1e-12 * w0.abs().max(1.0) {
                    return Err(Error::config(
                        "domain.bounds",
                        "a disk needs a square bounding box",
                    ));
                }
                DomainSpec::Disk {
                    center: [
                        0.5 * (d.bounds[0][0] + d.bounds[0][1]),
                        0.5 * (d.bounds[1][0] + d.bounds[1][1]),
                    ],
                    radius: 0.5 * w0,
                    resolution: [res[0], res[1]],
                }
            }
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn operator_spec(&self) -> Result<OperatorSpec> {
        match self.operator.family {
            FamilyConfig::Trace => {
                forbid(&self.operator.tau, "operator.tau", "the trace family takes no τ")?;
                Ok(OperatorSpec::trace())
            }
            FamilyConfig::Tau => {
                let tau = match &self.operator.tau {
                    None => return Err(Error::config("operator.tau", "missing")),
                    Some(TauValue::Radians(v)) => *v,
                    Some(TauValue::Literal(s)) => parse_tau(s)?,
                };
                OperatorSpec::tau(tau).map_err(|e| match e {
                    Error::Config { message, .. } => Error::config("operator.tau", message),
                    other => other,
                })
            }
        }
    }

    pub fn boundary_spec(&self) -> Result<BoundarySpec> {
        let b = &self.boundary;
        match b.kind {
            BoundaryKind::Flux1d => {
                forbid(&b.phi, "boundary.phi", "not used by flux1d")?;
                forbid(&b.radius, "boundary.radius", "not used by flux1d")?;
                if self.domain.kind != DomainKind::Interval {
                    return Err(Error::config(
                        "boundary.kind",
                        "flux1d applies only to interval domains",
                    ));
                }
                Ok(BoundarySpec::Flux1d {
                    alpha: required(b.alpha, "boundary.alpha")?,
                    beta: required(b.beta, "boundary.beta")?,
                })
            }
            BoundaryKind::Neumann => {
                forbid(&b.alpha, "boundary.alpha", "not used by neumann")?;
                forbid(&b.beta, "boundary.beta", "not used by neumann")?;
                forbid(&b.radius, "boundary.radius", "not used by neumann")?;
                let phi = match &b.phi {
                    None => return Err(Error::config("boundary.phi", "missing")),
                    Some(PhiValue::Uniform(v)) => vec![*v],
                    Some(PhiValue::PerNode(v)) => v.clone(),
                };
                if phi.iter().any(|v| !v.is_finite()) {
                    return Err(Error::config("boundary.phi", "non-finite value"));
                }
                Ok(BoundarySpec::Neumann { phi })
            }
            BoundaryKind::TargetDisk => {
                forbid(&b.alpha, "boundary.alpha", "not used by target_disk")?;
                forbid(&b.beta, "boundary.beta", "not used by target_disk")?;
                forbid(&b.phi, "boundary.phi", "not used by target_disk")?;
                let radius = required(b.radius, "boundary.radius")?;
                if radius <= 0.0 {
                    return Err(Error::config("boundary.radius", "must be positive"));
                }
                Ok(BoundarySpec::TargetDisk { radius })
            }
        }
    }

    fn resolved_initial(&self) -> Result<InitialConfig> {
        if self.initial.kind != InitialKind::Preset {
            forbid(&self.initial.preset, "initial.preset", "only used with kind \"preset\"")?;
            return Ok(self.initial.clone());
        }
        let name = self
            .initial
            .preset
            .as_deref()
            .ok_or_else(|| Error::config("initial.preset", "missing"))?;
        let preset = super::presets::find(name)
            .ok_or_else(|| Error::config("initial.preset", format!("unknown preset {name:?}")))?;
        Ok(preset.config().initial)
    }

    /// u₀ as a function of position.
    pub fn initial_profile(&self, domain: &DomainSpec) -> Result<Box<dyn Fn(&Point) -> f64>> {
        let init = self.resolved_initial()?;
        let amplitude = || required(init.amplitude, "initial.amplitude");
        let no_amplitude = || forbid(&init.amplitude, "initial.amplitude", "not used by this kind");
        if init.kind != InitialKind::Polynomial {
            forbid(&init.coefficients, "initial.coefficients", "only used by polynomial data")?;
        }
        let center = domain.centroid();
        let half_width = match domain {
            DomainSpec::Interval { lo, hi, .. } => 0.5 * (hi - lo),
            DomainSpec::Rectangle { lo, hi, .. } => 0.5 * (hi[0] - lo[0]).min(hi[1] - lo[1]),
            DomainSpec::Disk { radius, .. } => *radius,
        };
        let dim = domain.dim();
        let r2 = move |x: &Point| -> f64 {
            (0..dim).map(|a| (x[a] - center[a]).powi(2)).sum::<f64>() / (half_width * half_width)
        };

        let translator: Option<Box<dyn Fn(&Point) -> f64>> = match self.boundary_spec()? {
            BoundarySpec::Flux1d { alpha, beta } => {
                Some(Box::new(move |x: &Point| 0.5 * (beta - alpha) * x[0] * x[0] + alpha * x[0]))
            }
            BoundarySpec::TargetDisk { radius } => {
                // Du maps the disk of radius half_width onto the target disk
                let k = radius / half_width;
                Some(Box::new(move |x: &Point| {
                    0.5 * k * (0..dim).map(|a| (x[a] - center[a]).powi(2)).sum::<f64>()
                }))
            }
            BoundarySpec::Neumann { .. } => None,
        };
        let base = |translator: Option<Box<dyn Fn(&Point) -> f64>>| -> Box<dyn Fn(&Point) -> f64> {
            translator.unwrap_or_else(|| Box::new(|_: &Point| 0.0))
        };

        Ok(match init.kind {
            InitialKind::Preset => unreachable!("resolved above"),
            InitialKind::Translator => {
                no_amplitude()?;
                translator.ok_or_else(|| {
                    Error::config("initial.kind", "no translator is known for neumann data")
                })?
            }
            InitialKind::Cosine => {
                let a = amplitude()?;
                let t = base(translator);
                Box::new(move |x| t(x) + a * (PI * x[0]).cos())
            }
            InitialKind::BumpCosine => {
                let a = amplitude()?;
                let t = base(translator);
                Box::new(move |x| t(x) + a * (1.0 - r2(x)) * (PI * x[0]).cos())
            }
            InitialKind::FlatBumpCosine => {
                let a = amplitude()?;
                let t = base(translator);
                Box::new(move |x| t(x) + a * (1.0 - r2(x)).powi(2) * (PI * x[0]).cos())
            }
            InitialKind::Constant => {
                let a = amplitude()?;
                Box::new(move |_| a)
            }
            InitialKind::Polynomial => {
                no_amplitude()?;
                let c = init
                    .coefficients
                    .clone()
                    .ok_or_else(|| Error::config("initial.coefficients", "missing"))?;
                if c.len() != dim {
                    return Err(Error::config(
                        "initial.coefficients",
                        format!("expected {dim} coefficient lists, got {}", c.len()),
                    ));
                }
                if c.iter().flatten().any(|v| !v.is_finite()) {
                    return Err(Error::config("initial.coefficients", "non-finite value"));
                }
                Box::new(move |x| {
                    c.iter()
                        .enumerate()
                        .map(|(a, row)| row.iter().rev().fold(0.0, |acc, ck| acc * x[a] + ck))
                        .sum()
                })
            }
        })
    }

    pub fn setup(&self) -> Result<Setup> {
        self.validate()?;
        let domain = self.domain_spec()?;
        let grid = build_grid(&domain)?;
        let f = self.initial_profile(&domain)?;
        let initial = State::sample(&grid, |x| f(x));
        let solver = Solver::new(grid, self.operator_spec()?, &self.boundary_spec()?)?;
        Ok(Setup {
            solver,
            initial,
            time: self.time,
            tolerances: self.tolerances,
        })
    }
}
