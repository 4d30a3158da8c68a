//! The two equal-cap thresholds for perfect two-pass capture.
//!
//! `2 ln 2` for the square pulse and the root `k` of `(k+1)^{k+1} = 4k²` for
//! the exponential pulse, each checked against simulated diagonal cells.
//!
//! ```bash
//! cargo run --release --example threshold_constants
//! ```

use photon_recycler::analytic;
use photon_recycler::pulse::PulseKind;
use photon_recycler::sweep::{self, SWEEP_DT};

fn main() -> photon_recycler::Result<()> {
    let k = analytic::solve_k();
    println!("k      = {k:.10}  (residual {:.1e})", (k + 1.0).powf(k + 1.0) - 4.0 * k * k);
    println!("2 ln 2 = {:.10}", analytic::SQUARE_THRESHOLD);
    for (kind, threshold) in [(PulseKind::Square, analytic::SQUARE_THRESHOLD), (PulseKind::ExpDecay, k)] {
        println!("\n{kind:?}");
        for f in [0.95, 0.99, 1.01, 1.05] {
            let cap = f * threshold;
            let c = sweep::evaluate_cell(kind, cap, cap, SWEEP_DT, 0.0)?;
            println!("  kappa = {cap:.5} ({f:.2} x threshold): loss {:.3e}", c.loss);
        }
    }
    Ok(())
}
