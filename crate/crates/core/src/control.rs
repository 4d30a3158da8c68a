//! Coupling schedules and protocol parameters: the greedy reflection-cancelling
//! coupling, delay selection for the exponential (closed form) and square
//! (grid scan) pulses, and optimal stop times under intrinsic loss.

use serde::{Deserialize, Serialize};

use crate::analytic;
use crate::langevin::{self, RunSummary};
use crate::pulse::{InputPulse, PulseSpec};
use crate::{CouplingPolicy, Error, Result, SimConfig};

/// Port-2 reflection below which a second pass counts as reflectionless.
pub const REFLECTIONLESS_TOL: f64 = 1e-9;

/// `min(κ_max, (b/a)²)`: cancels the port's reflection when the cap allows,
/// otherwise couples at the cap. An empty cavity (`a ≤ eps_a`) gets the cap.
#[inline]
pub fn greedy_coupling(b: f64, a: f64, kappa_max: f64, eps_a: f64) -> f64 {
    if a <= eps_a {
        return kappa_max;
    }
    let r = b / a;
    (r * r).min(kappa_max)
}

/// Protocol times for the exponential pulse (natural units, `γ = 1`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolParams {
    pub delay: f64,
    pub t1: f64,
    /// Optimal single-pass stop time; infinite without intrinsic loss.
    pub t_stop_single: f64,
    /// Optimal two-pass stop time; infinite without intrinsic loss.
    pub t_stop_two: f64,
    /// The recycled reflection is caught before port 1 leaves its capped regime.
    pub early_capture: bool,
}

/// Delay that makes the second pass of the exponential pulse reflectionless,
/// i.e. `√κ2,max · a(Δt) = e^{-κ_i Δt/2}` on the first-pass trajectory.
pub fn select_delay_exp(kappa1_max: f64, kappa2_max: f64, kappa_i: f64) -> Result<f64> {
    protocol_params_exp(kappa1_max, kappa2_max, kappa_i).map(|p| p.delay)
}

pub fn protocol_params_exp(kappa1_max: f64, kappa2_max: f64, kappa_i: f64) -> Result<ProtocolParams> {
    for (name, v) in [("kappa1_max", kappa1_max), ("kappa2_max", kappa2_max)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
        }
    }
    if !(kappa_i >= 0.0 && kappa_i < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "kappa_i must lie in [0, 1) in units of gamma, got {kappa_i}"
        )));
    }
    let delay = analytic::noisy_delay(kappa1_max, kappa2_max, kappa_i).ok_or_else(|| {
        Error::Infeasible(format!(
            "kappa1_max = {kappa1_max}, kappa2_max = {kappa2_max}, kappa_i = {kappa_i}"
        ))
    })?;
    let t1 =
        if kappa_i == 0.0 { analytic::exp_t1(kappa1_max) } else { analytic::noisy_t1(kappa1_max, kappa_i) };
    let times = stop_times(kappa1_max, kappa2_max, kappa_i)?;
    Ok(ProtocolParams {
        delay,
        t1,
        t_stop_single: times.single,
        t_stop_two: times.two,
        early_capture: delay < t1,
    })
}

/// Optimal decoupling times `(T1, T2)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StopTimes {
    pub single: f64,
    pub two: f64,
}

impl StopTimes {
    /// Without intrinsic loss the cavity should capture forever.
    pub fn is_unbounded(&self) -> bool {
        self.single.is_infinite() && self.two.is_infinite()
    }
}

pub fn stop_times(kappa1_max: f64, _kappa2_max: f64, kappa_i: f64) -> Result<StopTimes> {
    if !(kappa1_max.is_finite() && kappa1_max > 0.0) {
        return Err(Error::InvalidArgument(format!("kappa1_max must be positive, got {kappa1_max}")));
    }
    if kappa_i == 0.0 {
        return Ok(StopTimes { single: f64::INFINITY, two: f64::INFINITY });
    }
    if !(kappa_i > 0.0 && kappa_i < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "kappa_i must lie in [0, 1) in units of gamma, got {kappa_i}"
        )));
    }
    Ok(StopTimes {
        single: analytic::noisy_t_stop_single(kappa1_max, kappa_i),
        two: analytic::noisy_t_stop_two(kappa_i),
    })
}

/// Whether the two-pass stop time falls after the recycled reflection has
/// been absorbed (`T2 > Δt + t1`). `None` when no reflectionless delay exists.
pub fn stop_after_recapture(kappa1_max: f64, kappa2_max: f64, kappa_i: f64) -> Option<bool> {
    let p = protocol_params_exp(kappa1_max, kappa2_max, kappa_i).ok()?;
    Some(p.t_stop_two > p.delay + p.t1)
}

/// Outcome of the square-pulse delay search.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum DelayChoice {
    /// Smallest grid delay with a reflectionless second pass.
    Perfect { delay: f64, loss: f64 },
    /// No reflectionless delay on the grid; the delay with the least final loss.
    Residual { delay: f64, loss: f64 },
}

impl DelayChoice {
    pub fn delay(&self) -> f64 {
        match *self {
            DelayChoice::Perfect { delay, .. } | DelayChoice::Residual { delay, .. } => delay,
        }
    }

    pub fn loss(&self) -> f64 {
        match *self {
            DelayChoice::Perfect { loss, .. } | DelayChoice::Residual { loss, .. } => loss,
        }
    }

    pub fn is_perfect(&self) -> bool {
        matches!(self, DelayChoice::Perfect { .. })
    }
}

/// Searches the delay for greedy two-pass capture of a square pulse inside the
/// window `[0, 2·b_max⁻²]`.
///
/// Candidate delays are the multiples of `dt` in `(0, window - duration]`,
/// tried in increasing order. Port 2 first sees the peak of the reflection
/// (`b_in(0)`, since the cavity starts empty), so a candidate is only
/// simulated if the first-pass amplitude at that time can cancel it. The
/// first simulated candidate whose second pass stays below
/// [`REFLECTIONLESS_TOL`] wins. Otherwise the final loss is minimized over
/// the same grid by a coarse scan followed by integer ternary refinement.
///
/// `config` supplies `dt`, `κ_i` and `eps_a`; its horizon and delay are
/// replaced. Caps are absolute rates.
pub fn select_delay_square(
    pulse: &PulseSpec,
    kappa1_max: f64,
    kappa2_max: f64,
    config: &SimConfig,
) -> Result<DelayChoice> {
    let duration = match pulse {
        PulseSpec::Square { .. } => pulse.duration().unwrap_or(0.0),
        _ => return Err(Error::InvalidPulse("select_delay_square needs a square pulse".into())),
    };
    pulse.validate()?;
    let window = 2.0 * duration;
    let dt = config.dt();
    let base = config.clone().with_t_end(window)?.with_stop_time(None)?;
    let p1 = CouplingPolicy::greedy(kappa1_max);
    let p2 = CouplingPolicy::greedy(kappa2_max);

    let max_steps = ((window - duration) / dt + 1e-9).floor() as usize;
    if max_steps == 0 {
        return Err(Error::InvalidConfig(format!("dt = {dt} leaves no room for a delay")));
    }

    let reference = langevin::simulate_single_pass(pulse, &p1, &base)?;
    let peak = pulse.amplitude(0.0);

    let evaluate = |steps: usize| -> Result<RunSummary> {
        let cfg = base.clone().with_delay(steps as f64 * dt)?;
        let mut summary = RunSummary::default();
        langevin::run(pulse, &p1, Some(&p2), &cfg, &mut summary)?;
        Ok(summary)
    };

    for steps in 1..=max_steps {
        let att = (-0.5 * config.kappa_i() * steps as f64 * dt).exp();
        if att * peak - kappa2_max.sqrt() * reference.a[steps] >= REFLECTIONLESS_TOL {
            continue;
        }
        let s = evaluate(steps)?;
        if s.max_abs_b_out2 < REFLECTIONLESS_TOL {
            return Ok(DelayChoice::Perfect { delay: steps as f64 * dt, loss: s.final_loss() });
        }
    }

    // no reflectionless delay: minimize the residual loss
    let loss_at = |steps: usize| evaluate(steps).map(|s| s.final_loss());
    let (steps, loss) = minimize_on_grid(1, max_steps, loss_at)?;
    Ok(DelayChoice::Residual { delay: steps as f64 * dt, loss })
}

/// Minimizes `f` over the integers in `[lo, hi]`: 33-point coarse scan, then
/// ternary search inside the bracket around the best coarse point.
pub(crate) fn minimize_on_grid<F>(lo: usize, hi: usize, mut f: F) -> Result<(usize, f64)>
where
    F: FnMut(usize) -> Result<f64>,
{
    const COARSE: usize = 32;
    let span = hi - lo;
    let mut pts: Vec<usize> = (0..=COARSE).map(|i| lo + span * i / COARSE).collect();
    pts.dedup();
    let mut best = (pts[0], f64::INFINITY);
    let mut best_i = 0;
    for (i, &p) in pts.iter().enumerate() {
        let v = f(p)?;
        if v < best.1 {
            best = (p, v);
            best_i = i;
        }
    }
    let mut a = pts[best_i.saturating_sub(1)];
    let mut b = pts[(best_i + 1).min(pts.len() - 1)];
    while b - a > 3 {
        let m1 = a + (b - a) / 3;
        let m2 = b - (b - a) / 3;
        let (f1, f2) = (f(m1)?, f(m2)?);
        for (p, v) in [(m1, f1), (m2, f2)] {
            if v < best.1 {
                best = (p, v);
            }
        }
        if f1 <= f2 {
            b = m2;
        } else {
            a = m1;
        }
    }
    for p in a..=b {
        let v = f(p)?;
        if v < best.1 {
            best = (p, v);
        }
    }
    Ok(best)
}
