//! Fixtures shared by the integration test targets.

use photon_recycler::langevin::{self, RunSummary};
use photon_recycler::{CouplingPolicy, InputPulse, SimConfig};

pub const SEGMENT: f64 = 0.05;
pub const DT: f64 = 1e-3;

/// Input `b(t) = √κ(t)·β(τ(t))` for a piecewise-constant coupling profile,
/// with `τ(t) = ∫κ` and a fixed smooth `β`. Every profile with the same
/// integrated coupling ends in the same cavity state.
pub struct Reparametrized {
    pub table: Vec<f64>,
}

impl Reparametrized {
    fn beta(tau: f64) -> f64 {
        (0.4 * tau).exp() * (1.0 + 0.3 * (1.7 * tau).sin())
    }

    fn tau_before(&self, seg: usize) -> f64 {
        self.table[..seg].iter().sum::<f64>() * SEGMENT
    }

    fn end(&self) -> f64 {
        SEGMENT * self.table.len() as f64
    }

    fn value(&self, seg: usize, t: f64) -> f64 {
        let k = self.table[seg];
        let tau = self.tau_before(seg) + k * (t - seg as f64 * SEGMENT);
        k.sqrt() * Self::beta(tau)
    }
}

impl InputPulse for Reparametrized {
    fn amplitude(&self, t: f64) -> f64 {
        if t < 0.0 || t >= self.end() {
            return 0.0;
        }
        let seg = ((t / SEGMENT + 1e-9).floor() as usize).min(self.table.len() - 1);
        self.value(seg, t)
    }

    fn amplitude_before(&self, t: f64) -> f64 {
        if t <= 0.0 || t > self.end() {
            return 0.0;
        }
        let seg = ((t / SEGMENT - 1e-9).ceil() as usize).clamp(1, self.table.len()) - 1;
        self.value(seg, t)
    }

    fn support_end(&self) -> Option<f64> {
        Some(self.end())
    }
}

pub fn capture_with_profile(table: &[f64]) -> f64 {
    let pulse = Reparametrized { table: table.to_vec() };
    let policy = CouplingPolicy::tabulated(SEGMENT, table.to_vec()).unwrap();
    let cfg = SimConfig::new(DT, pulse.end()).unwrap();
    let mut s = RunSummary::default();
    langevin::run(&pulse, &policy, None, &cfg, &mut s).unwrap();
    s.last.a
}
