//! Command-line front end: `simulate`, `sweep`, `report` and `validate`.
//!
//! Settings come from an optional JSON file (`--config`, see [`RunConfig`])
//! and are overridden by flags. All rates are in the natural unit of the pulse
//! (`γ` for `exp_decay`, `b_max²` otherwise) and times in its inverse; the
//! pulse is rescaled to unit size before integration.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::control::{self, DelayChoice};
use crate::io::{self, Metadata};
use crate::pulse::{InputPulse, PulseKind, PulseSpec};
use crate::sweep::{self, GridSpec, Spacing};
use crate::{analytic, langevin, validate, CouplingPolicy, DelaySnap, Error, Result, SimConfig};

/// Default integration step of `simulate`.
pub const DEFAULT_DT: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum CommandKind {
    Simulate,
    Sweep,
    Report,
    Validate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

/// `sim` section of the configuration file.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    pub delay: Option<f64>,
    pub kappa_i: Option<f64>,
    pub eps_a: Option<f64>,
    pub stop_time: Option<f64>,
}

/// JSON configuration document. Every field is optional; unknown keys are
/// rejected.
///
/// ```json
/// {
///   "command": "simulate",
///   "pulse": {"kind": "exp_decay", "gamma": 1.0},
///   "policy1": {"kind": "greedy", "kappa_max": 2.0},
///   "policy2": {"kind": "greedy", "kappa_max": 2.0},
///   "sim": {"dt": 1e-4, "kappa_i": 0.0},
///   "output_path": "trajectory.csv",
///   "format": "csv"
/// }
/// ```
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<CommandKind>,
    pub pulse: Option<PulseSpec>,
    pub policy1: Option<CouplingPolicy>,
    /// Absent means single-pass capture.
    pub policy2: Option<CouplingPolicy>,
    #[serde(default)]
    pub sim: SimSection,
    pub grid: Option<GridSpec>,
    pub tau_max: Option<f64>,
    pub output_path: Option<PathBuf>,
    pub format: Option<Format>,
}

impl RunConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidConfig(format!("config: {e}")))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PulseArg {
    Exp,
    Square,
}

#[derive(Debug, Parser)]
#[command(name = "photon-recycler", version, about = "Single- and two-pass cavity photon capture")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate one run and write its trajectory CSV.
    Simulate(CommonArgs),
    /// Compute the two-pass loss landscape and write the heatmap CSV.
    Sweep(SweepArgs),
    /// Evaluate the closed forms and write a JSON report.
    Report(CommonArgs),
    /// Compare closed forms with simulations and print a pass/fail table.
    Validate(ValidateArgs),
}

#[derive(Debug, Default, Args)]
pub struct CommonArgs {
    /// JSON configuration file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub pulse: Option<PulseArg>,
    #[arg(long)]
    pub kappa1_max: Option<f64>,
    /// Cap of the recycling port; omit for single-pass capture.
    #[arg(long)]
    pub kappa2_max: Option<f64>,
    #[arg(long)]
    pub kappa_i: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Delay-line transit time; chosen automatically when omitted.
    #[arg(long)]
    pub delay: Option<f64>,
    /// Decouple both ports from this time on.
    #[arg(long)]
    pub stop_time: Option<f64>,
    /// Integrated coupling for the single-pass bound in `report`.
    #[arg(long)]
    pub tau_max: Option<f64>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Default, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Points per axis.
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub axis_min: Option<f64>,
    #[arg(long)]
    pub axis_max: Option<f64>,
    #[arg(long, value_enum)]
    pub spacing: Option<SpacingArg>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SpacingArg {
    Log,
    Linear,
}

#[derive(Debug, Default, Args)]
pub struct ValidateArgs {
    /// Also write the table as JSON to this file.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Merges a configuration file with flags (flags win).
pub fn merge(args: &CommonArgs, command: CommandKind) -> Result<RunConfig> {
    let mut cfg = match &args.config {
        Some(p) => RunConfig::from_path(p)?,
        None => RunConfig::default(),
    };
    if let Some(c) = cfg.command {
        if c != command {
            return Err(Error::InvalidConfig(format!(
                "config file is for {c:?}, but the {command:?} subcommand was run"
            )));
        }
    }
    cfg.command = Some(command);
    if let Some(p) = args.pulse {
        cfg.pulse = Some(match p {
            PulseArg::Exp => PulseSpec::exp_decay(1.0),
            PulseArg::Square => PulseSpec::square(1.0),
        });
    }
    if let Some(k) = args.kappa1_max {
        cfg.policy1 = Some(with_cap(cfg.policy1.take(), k));
    }
    if let Some(k) = args.kappa2_max {
        cfg.policy2 = Some(with_cap(cfg.policy2.take(), k));
    }
    let sim = &mut cfg.sim;
    for (slot, flag) in [
        (&mut sim.kappa_i, args.kappa_i),
        (&mut sim.dt, args.dt),
        (&mut sim.t_end, args.t_end),
        (&mut sim.delay, args.delay),
        (&mut sim.stop_time, args.stop_time),
    ] {
        if flag.is_some() {
            *slot = flag;
        }
    }
    if args.tau_max.is_some() {
        cfg.tau_max = args.tau_max;
    }
    if args.output.is_some() {
        cfg.output_path = args.output.clone();
    }
    if args.format.is_some() {
        cfg.format = args.format;
    }
    Ok(cfg)
}

/// Keeps the policy kind (greedy by default) and replaces the cap; tabulated
/// schedules are rescaled so their maximum equals the new cap.
fn with_cap(policy: Option<CouplingPolicy>, kappa_max: f64) -> CouplingPolicy {
    match policy {
        Some(CouplingPolicy::Constant { .. }) => CouplingPolicy::constant(kappa_max),
        Some(p @ CouplingPolicy::Tabulated { .. }) if p.kappa_max() > 0.0 => {
            p.scaled(kappa_max / p.kappa_max())
        }
        _ => CouplingPolicy::greedy(kappa_max),
    }
}

/// The same pulse with its natural rate unit set to one.
pub fn natural_units(pulse: &PulseSpec) -> Result<PulseSpec> {
    pulse.validate()?;
    Ok(match pulse {
        PulseSpec::Square { .. } => PulseSpec::square(1.0),
        PulseSpec::ExpDecay { .. } => PulseSpec::exp_decay(1.0),
        PulseSpec::Tabulated { step, samples } => {
            let b = pulse.b_max();
            let u = b * b;
            PulseSpec::Tabulated { step: step * u, samples: samples.iter().map(|s| s / b).collect() }
        }
    })
}

fn kappa1_cap(cfg: &RunConfig) -> Result<CouplingPolicy> {
    let p = cfg
        .policy1
        .clone()
        .ok_or_else(|| Error::InvalidConfig("kappa1_max is required (--kappa1-max or policy1)".into()))?;
    p.validate()?;
    Ok(p)
}

fn output_writer(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            Box::new(BufWriter::new(File::create(p)?))
        }
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    })
}

fn expect_format(cfg: &RunConfig, wanted: Format) -> Result<()> {
    match cfg.format {
        Some(f) if f != wanted => Err(Error::InvalidConfig(format!(
            "{:?} writes {wanted:?} only",
            cfg.command.unwrap_or(CommandKind::Simulate)
        ))),
        _ => Ok(()),
    }
}

fn finish(cfg: &RunConfig, log: Vec<String>) -> Result<()> {
    if let Some(p) = &cfg.output_path {
        io::write_sidecar_log(p, &log)?;
    }
    Ok(())
}

/// `simulate`: one run, trajectory CSV out.
pub fn simulate(cfg: &RunConfig) -> Result<()> {
    expect_format(cfg, Format::Csv)?;
    let original = cfg.pulse.clone().unwrap_or(PulseSpec::exp_decay(1.0));
    let pulse = natural_units(&original)?;
    let p1 = kappa1_cap(cfg)?;
    let p2 = cfg.policy2.clone();
    let dt = cfg.sim.dt.unwrap_or(DEFAULT_DT);
    let kappa_i = cfg.sim.kappa_i.unwrap_or(0.0);
    let mut meta = Metadata::default();
    meta.push("pulse", io::pulse_name(pulse.kind()))
        .push("rate_unit", original.rate_unit())
        .push("kappa1_max", p1.kappa_max())
        .push("policy1", policy_name(&p1));

    let mut sim = SimConfig::new(dt, 0.0)?.with_kappa_i(kappa_i)?.with_stop_time(cfg.sim.stop_time)?;
    if let Some(e) = cfg.sim.eps_a {
        sim = sim.with_eps_a(e)?;
    }
    let support = pulse.duration();
    let default_t_end = |delay: f64| match support {
        Some(d) => (2.0 * d).max(delay + d),
        None => sweep::EXP_HORIZON.max(delay + sweep::EXP_HORIZON / 4.0),
    };

    let traj = match &p2 {
        None => {
            let t_end = cfg.sim.t_end.unwrap_or_else(|| default_t_end(0.0));
            langevin::simulate_single_pass(&pulse, &p1, &sim.with_t_end(t_end)?)?
        }
        Some(p2) => {
            p2.validate()?;
            meta.push("kappa2_max", p2.kappa_max()).push("policy2", policy_name(p2));
            let greedy =
                matches!(p1, CouplingPolicy::Greedy { .. }) && matches!(p2, CouplingPolicy::Greedy { .. });
            let delay = match cfg.sim.delay {
                Some(d) => {
                    meta.push("delay_source", "user");
                    d
                }
                None if greedy && pulse.kind() == PulseKind::ExpDecay => {
                    let p = control::protocol_params_exp(p1.kappa_max(), p2.kappa_max(), kappa_i)?;
                    meta.push("delay_source", "closed_form").push("early_capture", p.early_capture);
                    p.delay
                }
                None if greedy && pulse.kind() == PulseKind::Square => {
                    let choice = control::select_delay_square(&pulse, p1.kappa_max(), p2.kappa_max(), &sim)?;
                    let source = match choice {
                        DelayChoice::Perfect { .. } => "grid_scan_reflectionless",
                        DelayChoice::Residual { .. } => "grid_scan_least_loss",
                    };
                    meta.push("delay_source", source);
                    choice.delay()
                }
                None => return Err(Error::InvalidConfig(
                    "automatic delay selection needs greedy policies and a square or exp pulse; pass --delay"
                        .into(),
                )),
            };
            let t_end = cfg.sim.t_end.unwrap_or_else(|| default_t_end(delay));
            // closed-form delays are rounded up so the second pass stays reflectionless
            let snap = if cfg.sim.delay.is_none() && pulse.kind() == PulseKind::ExpDecay {
                DelaySnap::SnapUp
            } else {
                DelaySnap::SnapToGrid
            };
            let run_cfg = sim.with_t_end(t_end)?.with_delay_snap(snap)?.with_delay(delay)?;
            langevin::simulate_two_pass(&pulse, &p1, p2, &run_cfg)?
        }
    };
    meta.push("final_a_sq", traj.final_a_sq());

    let mut w = output_writer(cfg.output_path.as_deref())?;
    io::write_trajectory_csv(&mut w, &traj, &meta)?;
    w.flush()?;
    finish(cfg, vec![format!("command=simulate"), format!("final_loss={}", traj.final_loss())])
}

fn policy_name(p: &CouplingPolicy) -> &'static str {
    match p {
        CouplingPolicy::Constant { .. } => "constant",
        CouplingPolicy::Greedy { .. } => "greedy",
        CouplingPolicy::Tabulated { .. } => "tabulated",
    }
}

/// `sweep`: loss landscape, heatmap CSV out.
pub fn sweep(cfg: &RunConfig) -> Result<()> {
    expect_format(cfg, Format::Csv)?;
    let kind = cfg.pulse.as_ref().map_or(PulseKind::ExpDecay, PulseSpec::kind);
    let grid = cfg.grid.unwrap_or_default();
    let dt = cfg.sim.dt.unwrap_or(sweep::SWEEP_DT);
    let sim = SimConfig::new(dt, 0.0)?.with_kappa_i(cfg.sim.kappa_i.unwrap_or(0.0))?;
    let g = sweep::loss_grid(kind, &grid, &sim)?;
    let mut w = output_writer(cfg.output_path.as_deref())?;
    io::write_heatmap_csv(&mut w, &g)?;
    w.flush()?;
    let mut log = vec![format!("command=sweep"), format!("threads={}", sweep::thread_count())];
    for f in &g.failures {
        eprintln!("cell ({}, {}) failed: {}", f.i, f.j, f.message);
        log.push(format!("failed_cell={},{}: {}", f.i, f.j, f.message));
    }
    finish(cfg, log)
}

/// `report`: closed forms, JSON out.
pub fn report(cfg: &RunConfig) -> Result<()> {
    expect_format(cfg, Format::Json)?;
    let kind = cfg.pulse.as_ref().map_or(PulseKind::ExpDecay, PulseSpec::kind);
    let k1 = kappa1_cap(cfg)?.kappa_max();
    let k2 = cfg.policy2.as_ref().map_or(k1, CouplingPolicy::kappa_max);
    let r = analytic::report(kind, k1, k2, cfg.sim.kappa_i.unwrap_or(0.0), cfg.tau_max)?;
    let mut w = output_writer(cfg.output_path.as_deref())?;
    io::write_json(&mut w, &r)?;
    w.flush()?;
    finish(cfg, vec![format!("command=report")])
}

/// `validate`: prints the suite table; `Ok(false)` if a check failed.
pub fn run_validate(args: &ValidateArgs) -> Result<bool> {
    let suite = validate::run_suite()?;
    println!("{suite}");
    if let Some(p) = &args.output {
        let mut w = output_writer(Some(p))?;
        io::write_json(&mut w, &suite)?;
        w.flush()?;
    }
    Ok(suite.all_passed())
}

fn apply_sweep_flags(cfg: &mut RunConfig, args: &SweepArgs) {
    let mut grid = cfg.grid.unwrap_or_default();
    for axis in [&mut grid.kappa1, &mut grid.kappa2] {
        if let Some(n) = args.points {
            axis.points = n;
        }
        if let Some(v) = args.axis_min {
            axis.min = v;
        }
        if let Some(v) = args.axis_max {
            axis.max = v;
        }
        if let Some(s) = args.spacing {
            axis.spacing = match s {
                SpacingArg::Log => Spacing::Log,
                SpacingArg::Linear => Spacing::Linear,
            };
        }
    }
    if grid != GridSpec::default() || cfg.grid.is_some() {
        cfg.grid = Some(grid);
    }
}

/// Parses `args` (program name first) and runs; returns the exit code.
pub fn run_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let outcome = match &cli.command {
        Command::Simulate(a) => merge(a, CommandKind::Simulate).and_then(|c| simulate(&c)).map(|_| true),
        Command::Report(a) => merge(a, CommandKind::Report).and_then(|c| report(&c)).map(|_| true),
        Command::Sweep(a) => merge(&a.common, CommandKind::Sweep)
            .map(|mut c| {
                apply_sweep_flags(&mut c, a);
                c
            })
            .and_then(|c| sweep(&c))
            .map(|_| true),
        Command::Validate(a) => run_validate(a),
    };
    match outcome {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_rejects_unknown_keys() {
        let err = RunConfig::from_json_str(r#"{"sim": {"dt": 1e-3, "bogus": 1}}"#).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("bogus") && msg.contains("line 1"), "{msg}");
        assert!(RunConfig::from_json_str(r#"{"nope": 1}"#).is_err());
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(
            &path,
            r#"{"pulse": {"kind": "square", "b_max": 1.0},
                "policy1": {"kind": "constant", "kappa_max": 1.0},
                "sim": {"dt": 0.01, "kappa_i": 0.5}}"#,
        )
        .unwrap();
        let args = CommonArgs {
            config: Some(path),
            kappa1_max: Some(3.0),
            kappa_i: Some(0.0),
            ..Default::default()
        };
        let c = merge(&args, CommandKind::Simulate).unwrap();
        assert_eq!(c.policy1, Some(CouplingPolicy::constant(3.0)));
        assert_eq!(c.sim.kappa_i, Some(0.0));
        assert_eq!(c.sim.dt, Some(0.01));
        assert_eq!(c.pulse, Some(PulseSpec::square(1.0)));
    }

    #[test]
    fn natural_units_rescale() {
        let p = PulseSpec::tabulated_normalized(0.5, vec![0.0, 2.0, 2.0, 0.0]).unwrap();
        let b = p.b_max();
        match natural_units(&p).unwrap() {
            PulseSpec::Tabulated { step, samples } => {
                assert!((step - 0.5 * b * b).abs() < 1e-15);
                assert!((samples[1] - 1.0).abs() < 1e-15);
                assert!((PulseSpec::Tabulated { step, samples }.energy() - 1.0).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(natural_units(&PulseSpec::exp_decay(3.0)).unwrap(), PulseSpec::exp_decay(1.0));
    }
}
