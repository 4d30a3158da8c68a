//! Closed-form capture efficiencies, time constants and thresholds.
//!
//! Rates are in units of the pulse's natural rate (`b_max²` for the square
//! pulse, `γ` for the exponential decay), times in the inverse unit. Every
//! quantity here has a numerical counterpart in [`crate::langevin`] and the
//! test suites compare the two.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::pulse::{InputPulse, PulseKind};
use crate::roots::bisect;
use crate::{Error, Result};

/// `2 ln 2`: below this cap the greedy schedule never leaves the capped regime
/// on a square pulse, and it is the smallest equal cap for perfect two-pass
/// capture of any bounded pulse.
pub const SQUARE_THRESHOLD: f64 = 2.0 * LN_2;

/// Efficiencies may overshoot `[0, 1]` by this much from rounding before the
/// overshoot is treated as a formula error.
pub const EFFICIENCY_SLACK: f64 = 1e-9;

/// Relative window around removable singularities in which series are used.
const SERIES_WINDOW: f64 = 1e-6;

/// `(1 - e^{-x}) / x`, continuous through `x = 0`.
pub(crate) fn one_minus_exp_over(x: f64) -> f64 {
    if x.abs() < SERIES_WINDOW {
        1.0 - x / 2.0 + x * x / 6.0
    } else {
        -(-x).exp_m1() / x
    }
}

/// `ln(1 + y) / y`, continuous through `y = 0`.
pub(crate) fn ln1p_over(y: f64) -> f64 {
    if y.abs() < SERIES_WINDOW {
        1.0 - y / 2.0 + y * y / 3.0
    } else {
        y.ln_1p() / y
    }
}

pub(crate) fn check_efficiency(quantity: &'static str, value: f64) -> Result<f64> {
    if !(value >= -EFFICIENCY_SLACK && value <= 1.0 + EFFICIENCY_SLACK) {
        return Err(Error::EfficiencyOutOfRange { quantity, value });
    }
    Ok(value.clamp(0.0, 1.0))
}

fn require_positive(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// single-pass optimum

/// Best single-pass capture for a given integrated coupling `τ_max = ∫κ dt`.
///
/// In the rescaled time `τ` the amplitude obeys `da/dτ = -a/2 + β(τ)`; the
/// optimal normalized `β` grows as `e^{τ/2}` and leaves `a = √(1 - e^{-τ_max})`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SinglePassOptimum {
    pub tau_max: f64,
    pub amplitude: f64,
}

impl SinglePassOptimum {
    /// Optimal rescaled pulse on `[0, τ_max]`, zero outside.
    pub fn beta(&self, tau: f64) -> f64 {
        if !(0.0..=self.tau_max).contains(&tau) || self.tau_max == 0.0 {
            return 0.0;
        }
        (0.5 * tau).exp() / self.tau_max.exp_m1().sqrt()
    }

    /// The same optimum in real time for a constant coupling `kappa_max`:
    /// `b_in(t) = √κ_max·β(κ_max t)` on `[0, τ_max/κ_max)`.
    pub fn pulse(&self, kappa_max: f64) -> Result<OptimalGrowthPulse> {
        require_positive("kappa_max", kappa_max)?;
        if !(self.tau_max > 0.0 && self.tau_max.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "optimal pulse needs a finite positive window, got tau_max = {}",
                self.tau_max
            )));
        }
        Ok(OptimalGrowthPulse { opt: *self, kappa_max, t_max: self.tau_max / kappa_max })
    }
}

pub fn single_pass_optimum(tau_max: f64) -> Result<SinglePassOptimum> {
    if !(tau_max >= 0.0) {
        return Err(Error::InvalidArgument(format!("tau_max must be >= 0, got {tau_max}")));
    }
    Ok(SinglePassOptimum { tau_max, amplitude: (-(-tau_max).exp_m1()).sqrt() })
}

/// Exponentially growing pulse that a constant coupling captures optimally.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptimalGrowthPulse {
    opt: SinglePassOptimum,
    pub kappa_max: f64,
    pub t_max: f64,
}

impl InputPulse for OptimalGrowthPulse {
    fn amplitude(&self, t: f64) -> f64 {
        if (0.0..self.t_max).contains(&t) {
            self.kappa_max.sqrt() * self.opt.beta(self.kappa_max * t)
        } else {
            0.0
        }
    }

    fn amplitude_before(&self, t: f64) -> f64 {
        if t > 0.0 && t <= self.t_max {
            self.kappa_max.sqrt() * self.opt.beta(self.kappa_max * t)
        } else {
            0.0
        }
    }

    fn support_end(&self) -> Option<f64> {
        Some(self.t_max)
    }
}

// ---------------------------------------------------------------------------
// square pulse

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SquareMetrics {
    pub kappa1_max: f64,
    pub kappa_i: f64,
    /// End of the capped regime, `None` when the cap never releases within the pulse.
    pub t1: Option<f64>,
    /// `a²` at the end of the pulse after greedy single-pass capture.
    pub eff_first_pass: f64,
    /// Smallest port-2 cap that recaptures the whole reflection.
    pub kappa2_min: f64,
}

/// Greedy single-pass capture of the unit square pulse, no intrinsic loss.
pub fn square_metrics(kappa1_max: f64) -> Result<SquareMetrics> {
    require_positive("kappa1_max", kappa1_max)?;
    let k = kappa1_max;
    let (t1, eff) = if k <= SQUARE_THRESHOLD {
        let c = -(-k / 2.0).exp_m1();
        (None, 4.0 / k * c * c)
    } else {
        (Some(SQUARE_THRESHOLD / k), 1.0 - (SQUARE_THRESHOLD - 1.0) / k)
    };
    let eff = check_efficiency("square eff_first_pass", eff)?;
    Ok(SquareMetrics { kappa1_max: k, kappa_i: 0.0, t1, eff_first_pass: eff, kappa2_min: 1.0 / eff })
}

/// [`square_metrics`] with intrinsic cavity loss `κ_i`.
///
/// Capped regime: `a(t) = 2√κ/(κ+κ_i)·(1 - e^{-(κ+κ_i)t/2})`; the reflection
/// vanishes once `κ a² = 1`, after which `d(a²)/dt = 1 - κ_i a²`. Reduces to
/// the lossless branches at `κ_i = 0`.
pub fn square_metrics_noisy(kappa1_max: f64, kappa_i: f64) -> Result<SquareMetrics> {
    require_positive("kappa1_max", kappa1_max)?;
    if !(kappa_i.is_finite() && kappa_i >= 0.0) {
        return Err(Error::InvalidArgument(format!("kappa_i must be >= 0, got {kappa_i}")));
    }
    if kappa_i == 0.0 {
        return square_metrics(kappa1_max);
    }
    let k = kappa1_max;
    let total = k + kappa_i;
    // 2κ/(κ+κ_i)·(1 - e^{-(κ+κ_i)t1/2}) = 1
    let t1 = if k > kappa_i {
        let t = -2.0 / total * (1.0 - total / (2.0 * k)).ln();
        (t < 1.0).then_some(t)
    } else {
        None
    };
    let eff = match t1 {
        None => {
            let c = -(-total / 2.0).exp_m1();
            4.0 * k / (total * total) * c * c
        }
        Some(t1) => {
            let s = 1.0 - t1;
            (-kappa_i * s).exp() / k + s * one_minus_exp_over(kappa_i * s)
        }
    };
    let eff = check_efficiency("square eff_first_pass", eff)?;
    Ok(SquareMetrics { kappa1_max: k, kappa_i, t1, eff_first_pass: eff, kappa2_min: 1.0 / eff })
}

// ---------------------------------------------------------------------------
// exponential-decay pulse, lossless

/// Greedy single-pass capture of `b_in = e^{-t/2}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpMetrics {
    pub kappa1_max: f64,
    pub t1: f64,
    /// `a²(t → ∞)`.
    pub eff_infinity: f64,
}

impl ExpMetrics {
    /// Cavity amplitude along the greedy single-pass trajectory.
    pub fn amplitude(&self, t: f64) -> f64 {
        let k = self.kappa1_max;
        if t <= 0.0 {
            0.0
        } else if t <= self.t1 {
            capped_amplitude(t, k)
        } else {
            (-0.5 * self.t1).exp() * (1.0 / k - (-(t - self.t1)).exp_m1()).sqrt()
        }
    }

    /// Greedy coupling: the cap until `t1`, then `κ e^{-s}/(1 + κ(1 - e^{-s}))`, `s = t - t1`.
    pub fn coupling(&self, t: f64) -> f64 {
        let k = self.kappa1_max;
        if t <= self.t1 {
            k
        } else {
            let s = t - self.t1;
            k * (-s).exp() / (1.0 - k * (-s).exp_m1())
        }
    }

    pub fn reflection(&self, t: f64) -> f64 {
        if t < 0.0 || t > self.t1 {
            0.0
        } else {
            capped_reflection(t, self.kappa1_max)
        }
    }
}

/// `a(t) = 2√κ e^{-t/2}(1 - e^{-(κ-1)t/2})/(κ-1)` under a constant coupling κ.
pub fn capped_amplitude(t: f64, kappa: f64) -> f64 {
    kappa.sqrt() * (-0.5 * t).exp() * t * one_minus_exp_over(0.5 * (kappa - 1.0) * t)
}

fn capped_reflection(t: f64, kappa: f64) -> f64 {
    (-0.5 * t).exp() * (1.0 - kappa * t * one_minus_exp_over(0.5 * (kappa - 1.0) * t))
}

/// End of the capped regime, `2/(κ-1)·ln(2κ/(κ+1))`.
pub fn exp_t1(kappa1_max: f64) -> f64 {
    let k = kappa1_max;
    2.0 / (k + 1.0) * ln1p_over((k - 1.0) / (k + 1.0))
}

/// `((1 + 1/κ)^{κ+1}/4)^{1/(κ-1)}`.
///
/// The exponent is rearranged as `(κ+1)[L(ε/2)/2 - L(ε)] + ln 2` with
/// `ε = κ - 1` and `L(y) = ln(1+y)/y`, which is regular at `κ = 1` where the
/// efficiency tends to `2/e`.
pub fn exp_eff_infinity(kappa1_max: f64) -> f64 {
    let k = kappa1_max;
    let eps = k - 1.0;
    let log_eff = (k + 1.0) * (0.5 * ln1p_over(0.5 * eps) - ln1p_over(eps)) + LN_2;
    log_eff.exp()
}

pub fn exp_metrics(kappa1_max: f64) -> Result<ExpMetrics> {
    require_positive("kappa1_max", kappa1_max)?;
    let eff = check_efficiency("exp eff_infinity", exp_eff_infinity(kappa1_max))?;
    Ok(ExpMetrics { kappa1_max, t1: exp_t1(kappa1_max), eff_infinity: eff })
}

/// First-pass reflection of the exponential pulse,
/// `2κ/(κ-1)·e^{-κt/2} - (κ+1)/(κ-1)·e^{-t/2}` for `t ≤ t1`, zero afterwards.
pub fn exp_reflection(t: f64, kappa1_max: f64) -> Result<f64> {
    require_positive("kappa1_max", kappa1_max)?;
    if t < 0.0 {
        return Err(Error::InvalidArgument(format!("t must be >= 0, got {t}")));
    }
    if t > exp_t1(kappa1_max) {
        return Ok(0.0);
    }
    Ok(capped_reflection(t, kappa1_max))
}

/// Root in `(1, 2)` of `(k+1)^{k+1} = 4k²`: the smallest equal cap for which
/// the exponential pulse can be captured perfectly in two passes.
pub fn solve_k() -> f64 {
    solve_k_in(1.01, 2.0).expect("(k+1)^(k+1) - 4k^2 changes sign on [1.01, 2]")
}

pub(crate) fn solve_k_in(lo: f64, hi: f64) -> Result<f64> {
    bisect(|k| (k + 1.0).powf(k + 1.0) - 4.0 * k * k, lo, hi, 1e-15)
}

/// Lossless two-pass feasibility for the exponential pulse:
/// `κ2,max · a²(∞) > 1` (equality counts as infeasible).
pub fn exp_two_pass_feasible(kappa1_max: f64, kappa2_max: f64) -> bool {
    kappa2_max * exp_eff_infinity(kappa1_max) > 1.0
}

// ---------------------------------------------------------------------------
// exponential-decay pulse with intrinsic loss

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoisyMetrics {
    pub kappa1_max: f64,
    pub kappa2_max: f64,
    pub kappa_i: f64,
    /// `(1 - κ_i)/κ1,max`.
    pub alpha: f64,
    pub t1: f64,
    /// Optimal single-pass stop time.
    pub t_stop_single: f64,
    pub eff_single: f64,
    pub delay: Option<f64>,
    /// Optimal two-pass stop time.
    pub t_stop_two: Option<f64>,
    pub eff_two: Option<f64>,
    /// Largest κ_i for which the two-pass stop time falls after the recaptured
    /// reflection, with α following κ_i.
    pub kappa_i_threshold: Option<f64>,
}

fn check_noisy_args(kappa1_max: f64, kappa2_max: f64, kappa_i: f64) -> Result<()> {
    require_positive("kappa1_max", kappa1_max)?;
    require_positive("kappa2_max", kappa2_max)?;
    if !(kappa_i > 0.0 && kappa_i < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "kappa_i must lie in (0, 1) in units of gamma, got {kappa_i}"
        )));
    }
    Ok(())
}

/// End of the capped regime with loss, `2/((1-α)κ1)·ln(2/(1+α))`.
pub fn noisy_t1(kappa1_max: f64, kappa_i: f64) -> f64 {
    let alpha = (1.0 - kappa_i) / kappa1_max;
    let y = (1.0 - alpha) / (1.0 + alpha);
    2.0 / ((1.0 + alpha) * kappa1_max) * ln1p_over(y)
}

/// Optimal single-pass stop time `T1 = t1 - ln(κ_i(1+α))/(ακ1)`.
pub fn noisy_t_stop_single(kappa1_max: f64, kappa_i: f64) -> f64 {
    let alpha = (1.0 - kappa_i) / kappa1_max;
    noisy_t1(kappa1_max, kappa_i) - (kappa_i * (1.0 + alpha)).ln() / (1.0 - kappa_i)
}

/// Optimal two-pass stop time `T2 = -ln κ_i/(ακ1)`.
pub fn noisy_t_stop_two(kappa_i: f64) -> f64 {
    -kappa_i.ln() / (1.0 - kappa_i)
}

/// Argument of the logarithm in the delay formula; positive iff a
/// reflectionless recapture exists.
fn noisy_delay_argument(kappa1_max: f64, kappa2_max: f64, kappa_i: f64) -> f64 {
    let alpha = (1.0 - kappa_i) / kappa1_max;
    let ak = 1.0 - kappa_i;
    1.0 + alpha - alpha * kappa1_max / kappa2_max * (ak * noisy_t1(kappa1_max, kappa_i)).exp()
}

/// `Δt = t1 + (ακ1)⁻¹ ln(1/(1 + α - ακ1/κ2·e^{ακ1 t1}))`; lossless when `κ_i = 0`.
pub fn noisy_delay(kappa1_max: f64, kappa2_max: f64, kappa_i: f64) -> Option<f64> {
    let arg = noisy_delay_argument(kappa1_max, kappa2_max, kappa_i);
    if !(arg > 0.0) {
        return None;
    }
    let d = noisy_t1(kappa1_max, kappa_i) - arg.ln() / (1.0 - kappa_i);
    Some(d.max(0.0))
}

/// `κ_i^{κ_i/(1-κ_i)}`.
pub fn noisy_eff_two(kappa_i: f64) -> f64 {
    (kappa_i / (1.0 - kappa_i) * kappa_i.ln()).exp()
}

/// Right-hand side of the `T2 > Δt + t1` condition written as a bound on κ_i.
pub fn stop_window_bound(kappa1_max: f64, kappa2_max: f64, kappa_i: f64) -> f64 {
    let alpha = (1.0 - kappa_i) / kappa1_max;
    let h = 0.5 * (1.0 + alpha);
    (1.0 + alpha) * h.powf(4.0 * alpha / (1.0 - alpha))
        - alpha * kappa1_max / kappa2_max * h.powf(2.0 * alpha / (1.0 - alpha))
}

/// Largest κ_i with `κ_i ≤ bound(κ_i)` (α tracks κ_i), scanning up from 0 and
/// bisecting the first sign change. `None` if the bound never holds or never fails.
pub fn kappa_i_threshold(kappa1_max: f64, kappa2_max: f64) -> Option<f64> {
    let g = |x: f64| -> Option<f64> {
        let alpha = (1.0 - x) / kappa1_max;
        if !(alpha < 1.0) || noisy_delay_argument(kappa1_max, kappa2_max, x) <= 0.0 {
            return None;
        }
        Some(stop_window_bound(kappa1_max, kappa2_max, x) - x)
    };
    const N: usize = 1000;
    let mut prev: Option<(f64, f64)> = None;
    for i in 1..N {
        let x = i as f64 / N as f64;
        match (g(x), prev) {
            (Some(v), Some((px, pv))) if pv > 0.0 && v <= 0.0 => {
                return bisect(|y| g(y).unwrap_or(-1.0), px, x, 1e-14).ok();
            }
            (Some(v), _) => prev = Some((x, v)),
            (None, Some((px, pv))) if pv > 0.0 => {
                // the condition stops being defined before it fails
                let edge = bisect(|y| if g(y).is_some() { 1.0 } else { -1.0 }, px, x, 1e-14).ok()?;
                return Some(edge);
            }
            (None, _) => {}
        }
    }
    None
}

pub fn noisy_metrics(kappa1_max: f64, kappa2_max: f64, kappa_i: f64) -> Result<NoisyMetrics> {
    check_noisy_args(kappa1_max, kappa2_max, kappa_i)?;
    let alpha = (1.0 - kappa_i) / kappa1_max;
    let t1 = noisy_t1(kappa1_max, kappa_i);
    let t_stop_single = noisy_t_stop_single(kappa1_max, kappa_i);
    // at T1: d(a²)/dt = e^{-t} - κ_i a² = 0
    let eff_single = check_efficiency("eff_single", (-t_stop_single).exp() / kappa_i)?;
    let delay = noisy_delay(kappa1_max, kappa2_max, kappa_i);
    let (t_stop_two, eff_two) = match delay {
        Some(_) => {
            (Some(noisy_t_stop_two(kappa_i)), Some(check_efficiency("eff_two", noisy_eff_two(kappa_i))?))
        }
        None => (None, None),
    };
    Ok(NoisyMetrics {
        kappa1_max,
        kappa2_max,
        kappa_i,
        alpha,
        t1,
        t_stop_single,
        eff_single,
        delay,
        t_stop_two,
        eff_two,
        kappa_i_threshold: kappa_i_threshold(kappa1_max, kappa2_max),
    })
}

/// Ratio of single- to two-pass amplitudes at their optimal stop times.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImprovementFactor {
    /// `(2^{-1/(1-α)}(1+α)^{1/(1-α) + 1/(2α)})^{1/κ1}`.
    pub exact: f64,
    /// `1 - ln(2/√e)/κ1`, valid for small α.
    pub small_alpha: f64,
}

pub fn improvement_factor(kappa1_max: f64, kappa_i: f64) -> Result<ImprovementFactor> {
    check_noisy_args(kappa1_max, kappa1_max, kappa_i)?;
    let alpha = (1.0 - kappa_i) / kappa1_max;
    if (1.0 - alpha).abs() < 1e-9 {
        return Err(Error::InvalidArgument("improvement factor is singular at alpha = 1".into()));
    }
    let log_ratio =
        (-LN_2 / (1.0 - alpha) + (1.0 / (1.0 - alpha) + 0.5 / alpha) * alpha.ln_1p()) / kappa1_max;
    Ok(ImprovementFactor { exact: log_ratio.exp(), small_alpha: 1.0 - (LN_2 - 0.5) / kappa1_max })
}

// ---------------------------------------------------------------------------
// report

/// Everything the closed forms say about one parameter point.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AnalyticReport {
    pub pulse: Option<PulseKind>,
    pub kappa1_max: f64,
    pub kappa2_max: f64,
    pub kappa_i: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub single_pass_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delay: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub early_capture: Option<bool>,
    #[serde(rename = "T1", skip_serializing_if = "Option::is_none")]
    pub t_stop_single: Option<f64>,
    #[serde(rename = "T2", skip_serializing_if = "Option::is_none")]
    pub t_stop_two: Option<f64>,
    pub eff_single: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eff_infinity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eff_two: Option<f64>,
    pub kappa2_min: f64,
    pub k_const: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa_i_threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub improvement_factor: Option<ImprovementFactor>,
}

/// Assembles an [`AnalyticReport`]; rates in the pulse's natural unit.
pub fn report(
    pulse: PulseKind,
    kappa1_max: f64,
    kappa2_max: f64,
    kappa_i: f64,
    tau_max: Option<f64>,
) -> Result<AnalyticReport> {
    let mut r = AnalyticReport {
        pulse: Some(pulse),
        kappa1_max,
        kappa2_max,
        kappa_i,
        k_const: solve_k(),
        ..Default::default()
    };
    if let Some(tau) = tau_max {
        r.tau_max = Some(tau);
        r.single_pass_bound = Some(single_pass_optimum(tau)?.amplitude.powi(2));
    }
    match pulse {
        PulseKind::Square => {
            let m = square_metrics_noisy(kappa1_max, kappa_i)?;
            r.t1 = m.t1;
            r.eff_single = m.eff_first_pass;
            r.kappa2_min = m.kappa2_min;
            if kappa_i == 0.0 && kappa2_max >= m.kappa2_min {
                r.eff_two = Some(1.0);
            }
        }
        PulseKind::ExpDecay if kappa_i == 0.0 => {
            let m = exp_metrics(kappa1_max)?;
            r.t1 = Some(m.t1);
            r.eff_single = m.eff_infinity;
            r.eff_infinity = Some(m.eff_infinity);
            r.kappa2_min = 1.0 / m.eff_infinity;
            if let Ok(p) = crate::control::protocol_params_exp(kappa1_max, kappa2_max, 0.0) {
                r.delay = Some(p.delay);
                r.early_capture = Some(p.early_capture);
                r.eff_two = Some(1.0);
            }
        }
        PulseKind::ExpDecay => {
            let m = noisy_metrics(kappa1_max, kappa2_max, kappa_i)?;
            r.alpha = Some(m.alpha);
            r.t1 = Some(m.t1);
            r.t_stop_single = Some(m.t_stop_single);
            r.eff_single = m.eff_single;
            r.delay = m.delay;
            r.early_capture = m.delay.map(|d| d < m.t1);
            r.t_stop_two = m.t_stop_two;
            r.eff_two = m.eff_two;
            r.kappa_i_threshold = m.kappa_i_threshold;
            // lossless asymptote for reference
            r.eff_infinity = Some(exp_eff_infinity(kappa1_max));
            r.kappa2_min = 1.0 / exp_eff_infinity(kappa1_max);
            r.improvement_factor = improvement_factor(kappa1_max, kappa_i).ok();
        }
        PulseKind::Tabulated => {
            return Err(Error::InvalidArgument(
                "closed forms exist only for the square and exp_decay pulses".into(),
            ))
        }
    }
    Ok(r)
}
