//! Recycling the reflection of a square pulse.
//!
//! Below `2 ln 2` a single greedy port saturates and reflects part of the
//! pulse. The delay scan finds the shortest delay for which port 2 recaptures
//! the reflection without reflecting itself; when none exists it reports the
//! least-loss delay instead.
//!
//! ```bash
//! cargo run --release --example square_two_pass
//! ```

use photon_recycler::control::{self, DelayChoice};
use photon_recycler::{analytic, PulseSpec, SimConfig};

fn main() -> photon_recycler::Result<()> {
    let pulse = PulseSpec::square(1.0);
    let cfg = SimConfig::new(1e-3, 2.0)?;
    println!("2 ln 2 = {:.6}", analytic::SQUARE_THRESHOLD);
    println!(
        "{:>6}  {:>6}  {:>10}  {:>12}  {:>10}  {:>9}",
        "k1", "k2", "1st pass", "k2 needed", "delay", "loss"
    );
    for (k1, k2) in [(1.0, 1.0), (1.3, 1.3), (1.5, 1.5), (3.0, 1.0), (3.0, 1.2), (0.8, 4.0)] {
        let m = analytic::square_metrics(k1)?;
        let choice = control::select_delay_square(&pulse, k1, k2, &cfg)?;
        let tag = match choice {
            DelayChoice::Perfect { .. } => "perfect",
            DelayChoice::Residual { .. } => "residual",
        };
        println!(
            "{k1:>6.2}  {k2:>6.2}  {:>10.6}  {:>12.6}  {:>10.4}  {:>9.2e}  {tag}",
            m.eff_first_pass,
            m.kappa2_min,
            choice.delay(),
            choice.loss()
        );
    }
    Ok(())
}
