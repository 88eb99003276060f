//! Built-in run configurations.

use serde_json::{json, Value};

use super::config::{parse_config, RunConfig};
use crate::error::Result;

#[derive(Debug, Clone, Copy)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    document: fn() -> Value,
}

impl Preset {
    /// The configuration as a JSON document (the target of `--override`).
    pub fn document(&self) -> Value {
        (self.document)()
    }

    pub fn config(&self) -> RunConfig {
        serde_json::from_value(self.document()).expect("preset documents are valid")
    }

    /// Checks the preset through the same path as a configuration file.
    pub fn parse(&self) -> Result<RunConfig> {
        parse_config(&self.document().to_string())
    }
}

fn heat(name: &str, initial: Value) -> Value {
    json!({
        "domain": { "kind": "interval", "bounds": [[0.0, 1.0]], "resolution": 201 },
        "operator": { "family": "trace" },
        "boundary": { "kind": "flux1d", "alpha": 0.0, "beta": 1.0 },
        "initial": initial,
        "time": { "dt_safety": 0.9, "t_end": 2.0, "t0": 0.0625 },
        "tolerances": {
            "tol_osc": 1e-6, "tol_speed": 1e-5, "obliqueness_floor": 0.5,
            "cap_ut": 100.0, "cap_grad": 100.0, "cap_hess": 100.0
        },
        "output": { "dir": format!("out/{name}") }
    })
}

fn disk(name: &str, operator: Value, initial: Value, t_end: f64) -> Value {
    json!({
        "domain": { "kind": "disk", "bounds": [[-1.0, 1.0], [-1.0, 1.0]], "resolution": 61 },
        "operator": operator,
        "boundary": { "kind": "target_disk", "radius": 1.0 },
        "initial": initial,
        "time": { "dt_safety": 0.9, "t_end": t_end, "t0": 0.0625 },
        "tolerances": {
            "tol_osc": 1e-6, "tol_speed": 1e-5, "obliqueness_floor": 0.5,
            "cap_ut": 100.0, "cap_grad": 100.0, "cap_hess": 100.0
        },
        "output": { "dir": format!("out/{name}") }
    })
}

pub const PRESETS: [Preset; 5] = [
    Preset {
        name: "heat-1d",
        description: "heat flow on [0, 1] with end fluxes 0 and 1 from x²/2 + 0.1·cos πx",
        document: || heat("heat-1d", json!({ "kind": "cosine", "amplitude": 0.1 })),
    },
    Preset {
        name: "heat-1d-mode1",
        description: "heat flow on [0, 1] with end fluxes 0 and 1 from x²/2 + cos πx (a single decaying mode)",
        document: || heat("heat-1d-mode1", json!({ "kind": "cosine", "amplitude": 1.0 })),
    },
    Preset {
        name: "ma-logdet-disk",
        description: "log-determinant flow on the unit disk with gradient image the unit disk",
        document: || {
            disk(
                "ma-logdet-disk",
                json!({ "family": "tau", "tau": "0" }),
                json!({ "kind": "flat_bump_cosine", "amplitude": 0.05 }),
                4.0,
            )
        },
    },
    Preset {
        name: "slag-disk-tau-pi2",
        description: "arctangent (special Lagrangian) flow on the unit disk with gradient image the unit disk",
        document: || {
            disk(
                "slag-disk-tau-pi2",
                json!({ "family": "tau", "tau": "pi/2" }),
                json!({ "kind": "bump_cosine", "amplitude": 0.05 }),
                6.0,
            )
        },
    },
    Preset {
        name: "slag-disk-tau",
        description: "τ-family flow on the unit disk with gradient image the unit disk; τ = π/3, set operator.tau to change it",
        document: || {
            disk(
                "slag-disk-tau",
                json!({ "family": "tau", "tau": "pi/3" }),
                json!({ "kind": "bump_cosine", "amplitude": 0.05 }),
                8.0,
            )
        },
    },
];

pub fn list_presets() -> &'static [Preset] {
    &PRESETS
}

pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}
