//! Capture of the optimal growing pulse under a constant coupling.
//!
//! For an integrated coupling `τ = κ·t_max` the best a single port can do is
//! `a² = 1 - e^{-τ}`. The example integrates the optimal pulse for a few
//! values of `τ` and prints the simulated and closed-form capture.
//!
//! ```bash
//! cargo run --release --example single_pass_bound
//! ```

use photon_recycler::{analytic, validate};

fn main() -> photon_recycler::Result<()> {
    println!("{:>8}  {:>14}  {:>14}  {:>10}", "tau", "simulated", "bound", "deviation");
    for tau in [0.25, std::f64::consts::LN_2, 1.0, 2.0, 5.0, 10.0] {
        let simulated = validate::numeric_single_pass_bound(tau, 1e-4)?;
        let bound = analytic::single_pass_optimum(tau)?.amplitude.powi(2);
        println!("{tau:>8.4}  {simulated:>14.10}  {bound:>14.10}  {:>10.2e}", (simulated - bound).abs());
    }
    Ok(())
}
