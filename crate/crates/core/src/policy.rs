//! How a port's coupling `κ(t)` is produced.

use serde::{Deserialize, Serialize};

use crate::control::greedy_coupling;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CouplingPolicy {
    /// `κ(t) = kappa_max` at all times. `kappa_max = 0` switches the port off.
    Constant { kappa_max: f64 },
    /// `κ(t) = min(kappa_max, (b/a)²)`: cancel the reflection whenever the cap
    /// allows it, otherwise couple as hard as possible.
    Greedy { kappa_max: f64 },
    /// Zero-order hold of `table` on the grid `k·step`; zero after the table.
    Tabulated { kappa_max: f64, step: f64, table: Vec<f64> },
}

impl CouplingPolicy {
    pub fn constant(kappa_max: f64) -> Self {
        CouplingPolicy::Constant { kappa_max }
    }

    pub fn off() -> Self {
        CouplingPolicy::Constant { kappa_max: 0.0 }
    }

    pub fn greedy(kappa_max: f64) -> Self {
        CouplingPolicy::Greedy { kappa_max }
    }

    /// Tabulated schedule whose cap is the table maximum.
    pub fn tabulated(step: f64, table: Vec<f64>) -> Result<Self> {
        let kappa_max = table.iter().copied().fold(0.0, f64::max);
        let p = CouplingPolicy::Tabulated { kappa_max, step, table };
        p.validate()?;
        Ok(p)
    }

    pub fn kappa_max(&self) -> f64 {
        match self {
            CouplingPolicy::Constant { kappa_max }
            | CouplingPolicy::Greedy { kappa_max }
            | CouplingPolicy::Tabulated { kappa_max, .. } => *kappa_max,
        }
    }

    pub fn is_off(&self) -> bool {
        matches!(self, CouplingPolicy::Constant { kappa_max } if *kappa_max == 0.0)
    }

    /// Scales the cap (and table values) by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        match self {
            CouplingPolicy::Constant { kappa_max } => CouplingPolicy::constant(kappa_max * factor),
            CouplingPolicy::Greedy { kappa_max } => CouplingPolicy::greedy(kappa_max * factor),
            CouplingPolicy::Tabulated { kappa_max, step, table } => CouplingPolicy::Tabulated {
                kappa_max: kappa_max * factor,
                step: *step,
                table: table.iter().map(|k| k * factor).collect(),
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let kmax = self.kappa_max();
        match self {
            CouplingPolicy::Constant { .. } => {
                if !(kmax.is_finite() && kmax >= 0.0) {
                    return Err(Error::InvalidPolicy(format!("kappa_max must be >= 0, got {kmax}")));
                }
            }
            CouplingPolicy::Greedy { .. } => {
                if !(kmax.is_finite() && kmax > 0.0) {
                    return Err(Error::InvalidPolicy(format!("greedy kappa_max must be > 0, got {kmax}")));
                }
            }
            CouplingPolicy::Tabulated { step, table, .. } => {
                if !(step.is_finite() && *step > 0.0) {
                    return Err(Error::InvalidPolicy(format!("table step must be positive, got {step}")));
                }
                if table.is_empty() {
                    return Err(Error::InvalidPolicy("coupling table is empty".into()));
                }
                if let Some((i, k)) =
                    table.iter().enumerate().find(|(_, k)| !(k.is_finite() && **k >= 0.0 && **k <= kmax))
                {
                    return Err(Error::InvalidPolicy(format!("table entry {i} = {k} outside [0, {kmax}]")));
                }
            }
        }
        Ok(())
    }

    /// Coupling to apply over the step starting at `t`, given the port's
    /// incoming amplitude `b` and the cavity amplitude `a` at that instant.
    pub fn coupling(&self, t: f64, b: f64, a: f64, eps_a: f64) -> f64 {
        match self {
            CouplingPolicy::Constant { kappa_max } => *kappa_max,
            CouplingPolicy::Greedy { kappa_max } => greedy_coupling(b.max(0.0), a, *kappa_max, eps_a),
            CouplingPolicy::Tabulated { step, table, .. } => {
                // the small offset keeps k·dt/step from rounding down a slot
                let idx = (t / step + 1e-9).floor();
                if idx < 0.0 || idx as usize >= table.len() {
                    0.0
                } else {
                    table[idx as usize]
                }
            }
        }
    }
}
