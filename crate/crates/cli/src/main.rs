use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand};
use transflow_core::runner::{
    self, apply_override, find_preset, list_presets, parse_config, RunConfig, RunOutcome,
    EXIT_ERROR,
};

/// Translating-solution flows for fully nonlinear parabolic equations.
#[derive(Debug, Parser)]
#[command(name = "transflow", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a configuration file.
    Run {
        config: PathBuf,
        /// Output directory (default: output.dir from the configuration).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a built-in preset.
    Preset {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Replace a configuration value, e.g. `operator.tau=pi/4` or `time.t_end=4`.
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// List the built-in presets.
    Presets,
    /// Run an interval heat configuration and compare against the series solution.
    OracleCompare {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load(path: &Path) -> anyhow::Result<RunConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_config(&text).with_context(|| format!("parsing {}", path.display()))
}

fn summarize(outcome: &RunOutcome, files: &[PathBuf]) {
    let r = &outcome.report.result;
    let status = match (r.converged, &r.error) {
        (_, Some(e)) => format!("error: {e}"),
        (true, None) => "converged".to_string(),
        (false, None) => "not converged".to_string(),
    };
    println!("{status}");
    if let Some(c) = r.c_inf {
        println!("C_inf = {}", runner::format_float(c));
    }
    if let Some(last) = r.series.last() {
        println!(
            "t = {}  osc_w = {:e}  sup|u_t - speed| = {:e}  steps = {}",
            last.t, last.osc_w, last.sup_ut_minus_speed, r.steps
        );
    }
    if let Some(e) = r.oracle_error {
        println!("oracle max error = {e:e}");
    }
    if let Some(c) = &r.cap_breach {
        println!("cap breach: {c}");
    }
    for f in files {
        println!("wrote {}", f.display());
    }
}

fn execute(cli: Cli) -> anyhow::Result<i32> {
    match cli.command {
        Command::Presets => {
            for p in list_presets() {
                println!("{:<20} {}", p.name, p.description);
            }
            Ok(0)
        }
        Command::Run { config, out } => {
            let cfg = load(&config)?;
            let (outcome, files) = runner::run(&cfg, None, out.as_deref())?;
            summarize(&outcome, &files);
            Ok(outcome.exit_code())
        }
        Command::Preset {
            name,
            out,
            overrides,
        } => {
            let preset = find_preset(&name).ok_or_else(|| {
                let names: Vec<_> = list_presets().iter().map(|p| p.name).collect();
                anyhow!("unknown preset {name:?}; available: {}", names.join(", "))
            })?;
            let mut doc = preset.document();
            for o in &overrides {
                let Some((key, value)) = o.split_once('=') else {
                    bail!("override {o:?} is not of the form key=value");
                };
                apply_override(&mut doc, key.trim(), value.trim())?;
            }
            let cfg = parse_config(&doc.to_string()).context("applying overrides")?;
            let (outcome, files) = runner::run(&cfg, Some(preset.name), out.as_deref())?;
            summarize(&outcome, &files);
            Ok(outcome.exit_code())
        }
        Command::OracleCompare { config, out } => {
            let cfg = load(&config)?;
            let (outcome, files) = runner::oracle_compare(&cfg, out.as_deref())?;
            for (t, e) in &outcome.oracle_series {
                println!("t = {t:<10} max |fd - exact| = {e:e}");
            }
            summarize(&outcome, &files);
            Ok(outcome.exit_code())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
