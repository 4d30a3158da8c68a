//! Input wavepackets `b_in(t)`.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Tolerance on `∫ b_in² dt = 1` accepted by [`PulseSpec::validate`].
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// A real, non-negative input amplitude that the integrator can sample.
///
/// `amplitude` is the right-continuous value used at the start of a step and
/// `amplitude_before` the left limit used at the end of a step, so that a
/// pulse edge falling on a grid point is resolved without smearing.
pub trait InputPulse: Sync {
    fn amplitude(&self, t: f64) -> f64;

    fn amplitude_before(&self, t: f64) -> f64 {
        self.amplitude(t)
    }

    /// Time after which the pulse is identically zero, `None` if unbounded.
    fn support_end(&self) -> Option<f64> {
        None
    }

    fn validate(&self) -> Result<()> {
        Ok(())
    }
}

impl<P: InputPulse + ?Sized> InputPulse for &P {
    fn amplitude(&self, t: f64) -> f64 {
        (**self).amplitude(t)
    }
    fn amplitude_before(&self, t: f64) -> f64 {
        (**self).amplitude_before(t)
    }
    fn support_end(&self) -> Option<f64> {
        (**self).support_end()
    }
    fn validate(&self) -> Result<()> {
        (**self).validate()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PulseKind {
    Square,
    ExpDecay,
    Tabulated,
}

/// The normalized pulses the crate knows how to describe in configuration.
///
/// * `Square`: `b_max` on `[0, b_max⁻²)`.
/// * `ExpDecay`: `√γ·e^{-γt/2}` for `t ≥ 0`; its peak is `√γ`.
/// * `Tabulated`: piecewise-linear interpolation of `samples` on the grid
///   `k·step`, zero from the last sample on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PulseSpec {
    Square { b_max: f64 },
    ExpDecay { gamma: f64 },
    Tabulated { step: f64, samples: Vec<f64> },
}

impl PulseSpec {
    pub fn square(b_max: f64) -> Self {
        PulseSpec::Square { b_max }
    }

    pub fn exp_decay(gamma: f64) -> Self {
        PulseSpec::ExpDecay { gamma }
    }

    /// Builds a tabulated pulse and checks its normalization.
    pub fn tabulated(step: f64, samples: Vec<f64>) -> Result<Self> {
        let p = PulseSpec::Tabulated { step, samples };
        p.validate()?;
        Ok(p)
    }

    /// Builds a tabulated pulse after rescaling `samples` so that the
    /// interpolant carries unit energy.
    pub fn tabulated_normalized(step: f64, mut samples: Vec<f64>) -> Result<Self> {
        check_table(step, &samples)?;
        let e = interpolant_energy(step, &samples);
        if !(e > 0.0) {
            return Err(Error::InvalidPulse("tabulated pulse has zero energy".into()));
        }
        let scale = e.sqrt().recip();
        samples.iter_mut().for_each(|s| *s *= scale);
        Self::tabulated(step, samples)
    }

    pub fn kind(&self) -> PulseKind {
        match self {
            PulseSpec::Square { .. } => PulseKind::Square,
            PulseSpec::ExpDecay { .. } => PulseKind::ExpDecay,
            PulseSpec::Tabulated { .. } => PulseKind::Tabulated,
        }
    }

    /// Largest value the amplitude takes.
    pub fn b_max(&self) -> f64 {
        match self {
            PulseSpec::Square { b_max } => *b_max,
            PulseSpec::ExpDecay { gamma } => gamma.sqrt(),
            PulseSpec::Tabulated { samples, .. } => samples.iter().copied().fold(0.0, f64::max),
        }
    }

    /// Length of the support for finite pulses.
    pub fn duration(&self) -> Option<f64> {
        match self {
            PulseSpec::Square { b_max } => Some(1.0 / (b_max * b_max)),
            PulseSpec::ExpDecay { .. } => None,
            PulseSpec::Tabulated { step, samples } => Some(step * (samples.len() - 1) as f64),
        }
    }

    /// The natural rate unit of the pulse: `γ` for the exponential, `b_max²`
    /// otherwise. Analytic formulas are written with this unit set to one.
    pub fn rate_unit(&self) -> f64 {
        match self {
            PulseSpec::ExpDecay { gamma } => *gamma,
            _ => {
                let b = self.b_max();
                b * b
            }
        }
    }

    /// `∫ b_in² dt` over the whole support (exact for every kind).
    pub fn energy(&self) -> f64 {
        match self {
            PulseSpec::Square { b_max } => b_max * b_max * (1.0 / (b_max * b_max)),
            PulseSpec::ExpDecay { .. } => 1.0,
            PulseSpec::Tabulated { step, samples } => interpolant_energy(*step, samples),
        }
    }
}

fn check_table(step: f64, samples: &[f64]) -> Result<()> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::InvalidPulse(format!("table step must be positive, got {step}")));
    }
    if samples.len() < 2 {
        return Err(Error::InvalidPulse("table needs at least two samples".into()));
    }
    if let Some((i, v)) = samples.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v >= 0.0)) {
        return Err(Error::InvalidPulse(format!("sample {i} = {v} is not a finite non-negative amplitude")));
    }
    Ok(())
}

/// Exact `∫ p(t)² dt` of the piecewise-linear interpolant `p`.
fn interpolant_energy(step: f64, samples: &[f64]) -> f64 {
    samples.windows(2).map(|w| (w[0] * w[0] + w[0] * w[1] + w[1] * w[1]) * step / 3.0).sum()
}

fn interpolate(step: f64, samples: &[f64], t: f64) -> f64 {
    let x = t / step;
    let i = x.floor() as usize;
    if i + 1 >= samples.len() {
        return samples[samples.len() - 1];
    }
    let frac = x - i as f64;
    samples[i] + (samples[i + 1] - samples[i]) * frac
}

impl InputPulse for PulseSpec {
    fn amplitude(&self, t: f64) -> f64 {
        match self {
            PulseSpec::Square { b_max } => {
                if (0.0..1.0 / (b_max * b_max)).contains(&t) {
                    *b_max
                } else {
                    0.0
                }
            }
            PulseSpec::ExpDecay { gamma } => {
                if t >= 0.0 {
                    gamma.sqrt() * (-0.5 * gamma * t).exp()
                } else {
                    0.0
                }
            }
            PulseSpec::Tabulated { step, samples } => {
                let end = step * (samples.len() - 1) as f64;
                if t < 0.0 || t >= end {
                    0.0
                } else {
                    interpolate(*step, samples, t)
                }
            }
        }
    }

    fn amplitude_before(&self, t: f64) -> f64 {
        match self {
            PulseSpec::Square { b_max } => {
                if t > 0.0 && t <= 1.0 / (b_max * b_max) {
                    *b_max
                } else {
                    0.0
                }
            }
            PulseSpec::ExpDecay { .. } => {
                if t > 0.0 {
                    self.amplitude(t)
                } else {
                    0.0
                }
            }
            PulseSpec::Tabulated { step, samples } => {
                let end = step * (samples.len() - 1) as f64;
                if t <= 0.0 || t > end {
                    0.0
                } else {
                    interpolate(*step, samples, t)
                }
            }
        }
    }

    fn support_end(&self) -> Option<f64> {
        self.duration()
    }

    fn validate(&self) -> Result<()> {
        match self {
            PulseSpec::Square { b_max } => {
                if !(b_max.is_finite() && *b_max > 0.0) {
                    return Err(Error::InvalidPulse(format!("b_max must be positive, got {b_max}")));
                }
            }
            PulseSpec::ExpDecay { gamma } => {
                if !(gamma.is_finite() && *gamma > 0.0) {
                    return Err(Error::InvalidPulse(format!("gamma must be positive, got {gamma}")));
                }
            }
            PulseSpec::Tabulated { step, samples } => {
                check_table(*step, samples)?;
                let e = interpolant_energy(*step, samples);
                if (e - 1.0).abs() > NORMALIZATION_TOL {
                    return Err(Error::InvalidPulse(format!(
                        "tabulated pulse energy is {e}, expected 1 within {NORMALIZATION_TOL}"
                    )));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_edges_are_half_open() {
        let p = PulseSpec::square(2.0);
        assert_eq!(p.duration(), Some(0.25));
        assert_eq!(p.amplitude(0.0), 2.0);
        assert_eq!(p.amplitude(0.25), 0.0);
        assert_eq!(p.amplitude_before(0.25), 2.0);
        assert_eq!(p.amplitude_before(0.0), 0.0);
        assert_eq!(p.energy(), 1.0);
    }

    #[test]
    fn exp_decay_tail_below_tolerance() {
        let p = PulseSpec::exp_decay(1.0);
        assert_eq!(p.amplitude(0.0), 1.0);
        assert!((p.amplitude(2.0) - (-1.0f64).exp()).abs() < 1e-16);
        // energy beyond the default 40/γ horizon
        let tail = (-40.0f64).exp();
        assert!(tail < 1e-17);
        assert_eq!(p.b_max(), 1.0);
    }

    #[test]
    fn tabulated_normalization() {
        let samples: Vec<f64> = (0..=100).map(|i| (i as f64 * 0.01 * std::f64::consts::PI).sin()).collect();
        assert!(PulseSpec::tabulated(0.01, samples.clone()).is_err());
        let p = PulseSpec::tabulated_normalized(0.01, samples).unwrap();
        assert!((p.energy() - 1.0).abs() < 1e-12);
        assert_eq!(p.amplitude(1.0), 0.0);
        assert!(p.amplitude_before(1.0) < 1e-12);
        let mid = p.amplitude(0.505);
        let expected = 0.5 * (p.amplitude(0.50) + p.amplitude(0.51));
        assert!((mid - expected).abs() < 1e-12);
    }

    #[test]
    fn rejects_negative_or_bad_samples() {
        assert!(PulseSpec::tabulated_normalized(0.1, vec![1.0, -0.1, 0.5]).is_err());
        assert!(PulseSpec::tabulated_normalized(0.0, vec![1.0, 1.0]).is_err());
        assert!(PulseSpec::tabulated_normalized(0.1, vec![1.0]).is_err());
        assert!(PulseSpec::square(-1.0).validate().is_err());
        assert!(PulseSpec::exp_decay(0.0).validate().is_err());
    }

    #[test]
    fn json_shape() {
        let p: PulseSpec = serde_json::from_str(r#"{"kind":"exp_decay","gamma":1.0}"#).unwrap();
        assert_eq!(p, PulseSpec::exp_decay(1.0));
        assert!(serde_json::from_str::<PulseSpec>(r#"{"kind":"square","b_max":1.0,"x":1}"#).is_err());
    }
}
