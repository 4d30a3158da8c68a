//! Two-pass ("pitch-and-catch") photon capture in a cavity with tunable coupling.
//!
//! The cavity is described by its classical amplitude `a(t)`; `a²` is the
//! fraction of the incoming single-photon wavepacket that has been captured.
//! The crate integrates the single-port and two-port input-output equations,
//! provides the greedy reflection-eliminating coupling schedule together with
//! delay and stop-time selection, and carries closed-form efficiencies for the
//! square and exponentially decaying pulses so every formula can be checked
//! against the numerical dynamics.
//!
//! ```
//! use photon_recycler::{control, langevin, CouplingPolicy, PulseSpec, SimConfig};
//!
//! let pulse = PulseSpec::exp_decay(1.0);
//! let delay = control::select_delay_exp(2.0, 2.0, 0.0).unwrap();
//! let config = SimConfig::new(1e-3, 40.0).unwrap().with_delay(delay).unwrap();
//! let greedy = CouplingPolicy::greedy(2.0);
//! let traj = langevin::simulate_two_pass(&pulse, &greedy, &greedy, &config).unwrap();
//! assert!(traj.final_loss() < 1e-4);
//! ```

pub mod analytic;
pub mod cli;
pub mod config;
pub mod control;
mod error;
pub mod io;
pub mod langevin;
pub mod policy;
pub mod pulse;
pub mod roots;
pub mod sweep;
pub mod validate;

pub use config::{DelaySnap, SimConfig};
pub use error::{Error, Result};
pub use langevin::{LedgerSummary, Trajectory};
pub use policy::CouplingPolicy;
pub use pulse::{InputPulse, PulseSpec};
