use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Default amplitude below which the greedy schedule treats the cavity as empty.
pub const DEFAULT_EPS_A: f64 = 1e-12;

/// How a requested delay is mapped onto the integration grid.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DelaySnap {
    /// Round to the nearest integer multiple of `dt`.
    #[default]
    SnapToGrid,
    /// Round up to the next multiple of `dt`. A reflectionless delay computed
    /// in closed form stays reflectionless when rounded up, because the
    /// first-pass amplitude only grows while the recycled reflection decays.
    SnapUp,
}

/// Grid, horizon, delay line and loss settings for one run.
///
/// The delay stored here is always an exact multiple of `dt`; the value that
/// was asked for is kept in `delay_requested`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    dt: f64,
    t_end: f64,
    delay: f64,
    delay_requested: f64,
    kappa_i: f64,
    eps_a: f64,
    delay_snap: DelaySnap,
    stop_time: Option<f64>,
}

impl SimConfig {
    pub fn new(dt: f64, t_end: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidConfig(format!("dt must be positive, got {dt}")));
        }
        if !(t_end.is_finite() && t_end >= 0.0) {
            return Err(Error::InvalidConfig(format!("t_end must be >= 0, got {t_end}")));
        }
        Ok(SimConfig {
            dt,
            t_end,
            delay: 0.0,
            delay_requested: 0.0,
            kappa_i: 0.0,
            eps_a: DEFAULT_EPS_A,
            delay_snap: DelaySnap::SnapToGrid,
            stop_time: None,
        })
    }

    pub fn with_delay(mut self, delay: f64) -> Result<Self> {
        if !(delay.is_finite() && delay >= 0.0) {
            return Err(Error::InvalidConfig(format!("delay must be >= 0, got {delay}")));
        }
        self.delay_requested = delay;
        self.delay = match self.delay_snap {
            DelaySnap::SnapToGrid => (delay / self.dt).round() * self.dt,
            // the small offset keeps exact multiples from moving up a slot
            DelaySnap::SnapUp => (delay / self.dt - 1e-9).ceil().max(0.0) * self.dt,
        };
        Ok(self)
    }

    /// Changes the snapping rule and re-snaps the requested delay.
    pub fn with_delay_snap(mut self, snap: DelaySnap) -> Result<Self> {
        self.delay_snap = snap;
        let requested = self.delay_requested;
        self.with_delay(requested)
    }

    pub fn with_kappa_i(mut self, kappa_i: f64) -> Result<Self> {
        if !(kappa_i.is_finite() && kappa_i >= 0.0) {
            return Err(Error::InvalidConfig(format!("kappa_i must be >= 0, got {kappa_i}")));
        }
        self.kappa_i = kappa_i;
        Ok(self)
    }

    pub fn with_eps_a(mut self, eps_a: f64) -> Result<Self> {
        if !(eps_a.is_finite() && eps_a > 0.0) {
            return Err(Error::InvalidConfig(format!("eps_a must be positive, got {eps_a}")));
        }
        self.eps_a = eps_a;
        Ok(self)
    }

    /// Decouple both ports from `stop_time` on; only intrinsic loss acts after it.
    pub fn with_stop_time(mut self, stop_time: Option<f64>) -> Result<Self> {
        if let Some(t) = stop_time {
            if !(t.is_finite() && t >= 0.0) {
                return Err(Error::InvalidConfig(format!("stop_time must be >= 0, got {t}")));
            }
        }
        self.stop_time = stop_time;
        Ok(self)
    }

    pub fn with_t_end(mut self, t_end: f64) -> Result<Self> {
        if !(t_end.is_finite() && t_end >= 0.0) {
            return Err(Error::InvalidConfig(format!("t_end must be >= 0, got {t_end}")));
        }
        self.t_end = t_end;
        Ok(self)
    }

    /// Same settings on a different grid; the requested delay is re-snapped.
    pub fn with_dt(&self, dt: f64) -> Result<Self> {
        let base = SimConfig::new(dt, self.t_end)?
            .with_kappa_i(self.kappa_i)?
            .with_eps_a(self.eps_a)?
            .with_stop_time(self.stop_time)?
            .with_delay_snap(self.delay_snap)?;
        base.with_delay(self.delay_requested)
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }
    pub fn t_end(&self) -> f64 {
        self.t_end
    }
    pub fn delay(&self) -> f64 {
        self.delay
    }
    pub fn delay_requested(&self) -> f64 {
        self.delay_requested
    }
    pub fn kappa_i(&self) -> f64 {
        self.kappa_i
    }
    pub fn eps_a(&self) -> f64 {
        self.eps_a
    }
    pub fn delay_snap(&self) -> DelaySnap {
        self.delay_snap
    }
    pub fn stop_time(&self) -> Option<f64> {
        self.stop_time
    }

    /// Number of integration steps; the grid is `k·dt` for `k = 0..=steps()`.
    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }

    pub fn delay_steps(&self) -> usize {
        (self.delay / self.dt).round() as usize
    }

    /// Amplitude transmission of the delay line, `e^{-κ_i Δt/2}`.
    pub fn delay_attenuation(&self) -> f64 {
        (-0.5 * self.kappa_i * self.delay).exp()
    }
}
