//! Closed forms against the numerical dynamics.
//!
//! [`run_suite`] integrates each configuration on a fine grid and compares the
//! result with the matching closed-form expression. The CLI `validate`
//! subcommand prints the table and exits non-zero if any check fails.

use std::fmt;

use serde::Serialize;

use crate::langevin::{self, energy_ledger, RunSummary};
use crate::pulse::{PulseKind, PulseSpec};
use crate::{analytic, control, CouplingPolicy, DelaySnap, Error, Result, SimConfig};

/// Grid step of validation runs.
pub const VALIDATION_DT: f64 = 1e-4;

/// Single-pass capture is read out here for the lossless exponential pulse.
pub const EXP_READOUT: f64 = 40.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub numeric: f64,
    pub expected: f64,
    pub deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, numeric: f64, expected: f64, tolerance: f64) -> Self {
        let deviation = (numeric - expected).abs();
        Check { name: name.into(), numeric, expected, deviation, tolerance, passed: deviation < tolerance }
    }

    /// Passes when `numeric < bound`.
    pub fn below(name: impl Into<String>, numeric: f64, bound: f64) -> Self {
        Check {
            name: name.into(),
            numeric,
            expected: 0.0,
            deviation: numeric.abs(),
            tolerance: bound,
            passed: numeric < bound,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SuiteReport {
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn max_deviation(&self) -> f64 {
        self.checks.iter().map(|c| c.deviation).fold(0.0, f64::max)
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(5).max(5);
        writeln!(
            f,
            "{:<width$}  {:>16}  {:>16}  {:>10}  {:>8}  result",
            "check", "numeric", "expected", "deviation", "tol"
        )?;
        for c in &self.checks {
            writeln!(
                f,
                "{:<width$}  {:>16.10}  {:>16.10}  {:>10.3e}  {:>8.1e}  {}",
                c.name,
                c.numeric,
                c.expected,
                c.deviation,
                c.tolerance,
                if c.passed { "PASS" } else { "FAIL" }
            )?;
        }
        let passed = self.checks.iter().filter(|c| c.passed).count();
        write!(f, "{passed}/{} checks passed, max deviation {:.3e}", self.checks.len(), self.max_deviation())
    }
}

fn unit_pulse(kind: PulseKind) -> Result<PulseSpec> {
    match kind {
        PulseKind::Square => Ok(PulseSpec::square(1.0)),
        PulseKind::ExpDecay => Ok(PulseSpec::exp_decay(1.0)),
        PulseKind::Tabulated => {
            Err(Error::InvalidArgument("closed forms exist only for the square and exp_decay pulses".into()))
        }
    }
}

/// Time at which single-pass efficiency is read out: end of the square pulse,
/// `40/γ` for the lossless exponential, the optimal stop time `T1` otherwise.
pub fn single_pass_readout(kind: PulseKind, kappa1_max: f64, kappa_i: f64) -> f64 {
    match kind {
        PulseKind::ExpDecay if kappa_i > 0.0 => analytic::noisy_t_stop_single(kappa1_max, kappa_i),
        PulseKind::ExpDecay => EXP_READOUT,
        _ => 1.0,
    }
}

/// Closed-form greedy single-pass efficiency (natural units).
pub fn analytic_single_pass(kind: PulseKind, kappa1_max: f64, kappa_i: f64) -> Result<f64> {
    match kind {
        PulseKind::Square => Ok(analytic::square_metrics_noisy(kappa1_max, kappa_i)?.eff_first_pass),
        PulseKind::ExpDecay if kappa_i > 0.0 => {
            let t1_stop = analytic::noisy_t_stop_single(kappa1_max, kappa_i);
            Ok((-t1_stop).exp() / kappa_i)
        }
        PulseKind::ExpDecay => Ok(analytic::exp_eff_infinity(kappa1_max)),
        PulseKind::Tabulated => unit_pulse(kind).map(|_| f64::NAN),
    }
}

/// Simulated greedy single-pass efficiency at [`single_pass_readout`].
pub fn numeric_single_pass(kind: PulseKind, kappa1_max: f64, kappa_i: f64, dt: f64) -> Result<f64> {
    let pulse = unit_pulse(kind)?;
    let t_end = single_pass_readout(kind, kappa1_max, kappa_i);
    let cfg = SimConfig::new(dt, t_end)?.with_kappa_i(kappa_i)?;
    let mut s = RunSummary::default();
    langevin::run(&pulse, &CouplingPolicy::greedy(kappa1_max), None, &cfg, &mut s)?;
    Ok(s.final_a_sq())
}

/// Simulated greedy two-pass capture of the unit exponential pulse with the
/// closed-form delay, stopped at `T2` (lossy) or read out at `40/γ`.
pub fn numeric_two_pass_exp(kappa1_max: f64, kappa2_max: f64, kappa_i: f64, dt: f64) -> Result<f64> {
    let delay = control::select_delay_exp(kappa1_max, kappa2_max, kappa_i)?;
    let (t_end, stop) = if kappa_i > 0.0 {
        let t2 = analytic::noisy_t_stop_two(kappa_i);
        (t2, Some(t2))
    } else {
        (EXP_READOUT, None)
    };
    let cfg = SimConfig::new(dt, t_end)?
        .with_kappa_i(kappa_i)?
        .with_delay_snap(DelaySnap::SnapUp)?
        .with_delay(delay)?
        .with_stop_time(stop)?;
    let mut s = RunSummary::default();
    let p1 = CouplingPolicy::greedy(kappa1_max);
    let p2 = CouplingPolicy::greedy(kappa2_max);
    langevin::run(&PulseSpec::exp_decay(1.0), &p1, Some(&p2), &cfg, &mut s)?;
    Ok(s.final_a_sq())
}

/// Capture of the optimal growing pulse for `τ_max = κ·t_max`, taking
/// `t_max = 1` and `κ = τ_max` so the end of the pulse lies on the grid.
pub fn numeric_single_pass_bound(tau_max: f64, dt: f64) -> Result<f64> {
    let pulse = analytic::single_pass_optimum(tau_max)?.pulse(tau_max)?;
    let cfg = SimConfig::new(dt, 1.0)?;
    let mut s = RunSummary::default();
    langevin::run(&pulse, &CouplingPolicy::constant(tau_max), None, &cfg, &mut s)?;
    Ok(s.final_a_sq())
}

/// Runs every check.
pub fn run_suite() -> Result<SuiteReport> {
    let dt = VALIDATION_DT;
    let mut checks = Vec::new();

    for tau in [std::f64::consts::LN_2, 2.0, 5.0] {
        checks.push(Check::new(
            format!("single-pass bound tau={tau:.4}"),
            numeric_single_pass_bound(tau, dt)?,
            -(-tau).exp_m1(),
            1e-6,
        ));
    }

    let delay = control::select_delay_exp(2.0, 2.0, 0.0)?;
    checks.push(Check::new("exp delay k1=k2=2", delay, (32.0f64 / 11.0).ln(), 1e-12));
    checks.push(Check::below(
        "exp two-pass loss k1=k2=2",
        1.0 - numeric_two_pass_exp(2.0, 2.0, 0.0, dt)?,
        1e-5,
    ));
    checks.push(Check::new("equal-cap constant k", analytic::solve_k(), 1.2834, 5e-5));

    for kind in [PulseKind::Square, PulseKind::ExpDecay] {
        for kappa_i in [0.0, 1e-3] {
            for k1 in [0.5, 1.5, 2.0, 3.0, 6.0] {
                let name = format!("single-pass {} k1={k1} ki={kappa_i}", crate::io::pulse_name(kind));
                checks.push(Check::new(
                    name,
                    numeric_single_pass(kind, k1, kappa_i, dt)?,
                    analytic_single_pass(kind, k1, kappa_i)?,
                    1e-3,
                ));
            }
        }
    }

    checks.push(Check::new(
        "two-pass ceiling k=1.5 ki=0.001",
        numeric_two_pass_exp(1.5, 1.5, 1e-3, dt)?,
        analytic::noisy_eff_two(1e-3),
        1e-3,
    ));

    // energy bookkeeping on one run of each kind
    let sq = SimConfig::new(dt, 2.0)?.with_delay(1.0)?.with_kappa_i(1e-3)?;
    let g = CouplingPolicy::greedy(2.0);
    let traj = langevin::simulate_two_pass(&PulseSpec::square(1.0), &g, &g, &sq)?;
    checks.push(Check::below("ledger square two-pass", energy_ledger(&traj).max_violation, 1e-6));
    let ex = SimConfig::new(dt, 20.0)?.with_delay(delay)?.with_kappa_i(1e-3)?;
    let traj = langevin::simulate_two_pass(&PulseSpec::exp_decay(1.0), &g, &g, &ex)?;
    checks.push(Check::below("ledger exp two-pass", energy_ledger(&traj).max_violation, 1e-6));

    Ok(SuiteReport { checks })
}
