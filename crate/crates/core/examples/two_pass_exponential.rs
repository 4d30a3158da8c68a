//! Two-pass capture of an exponentially decaying pulse.
//!
//! Port 1 captures what it can under the greedy schedule; the reflection
//! travels through the delay line and re-enters through port 2. With the
//! closed-form delay the second pass is reflectionless and the loss drops to
//! the integration error.
//!
//! ```bash
//! cargo run --release --example two_pass_exponential
//! ```

use photon_recycler::langevin::{self, energy_ledger};
use photon_recycler::{analytic, control, CouplingPolicy, DelaySnap, PulseSpec, SimConfig};

fn main() -> photon_recycler::Result<()> {
    let (k1, k2) = (2.0, 2.0);
    let p = control::protocol_params_exp(k1, k2, 0.0)?;
    println!("kappa1_max = {k1}, kappa2_max = {k2}");
    println!("t1 = {:.6}, delay = {:.12} (ln(32/11) = {:.12})", p.t1, p.delay, (32.0f64 / 11.0).ln());

    let pulse = PulseSpec::exp_decay(1.0);
    let single_cfg = SimConfig::new(1e-4, 40.0)?;
    let single = langevin::simulate_single_pass(&pulse, &CouplingPolicy::greedy(k1), &single_cfg)?;
    println!(
        "single pass:  a^2(40) = {:.8}  (closed form {:.8})",
        single.final_a_sq(),
        analytic::exp_eff_infinity(k1)
    );

    let cfg = SimConfig::new(1e-4, 40.0)?.with_delay_snap(DelaySnap::SnapUp)?.with_delay(p.delay)?;
    let g1 = CouplingPolicy::greedy(k1);
    let g2 = CouplingPolicy::greedy(k2);
    let two = langevin::simulate_two_pass(&pulse, &g1, &g2, &cfg)?;
    let ledger = energy_ledger(&two);
    println!("two pass:     a^2(40) = {:.10}, loss = {:.2e}", two.final_a_sq(), two.final_loss());
    println!("max |b_out2| = {:.2e}, ledger violation = {:.2e}", two.max_abs_b_out2(), ledger.max_violation);

    println!("\n{:>6}  {:>8}  {:>8}  {:>10}  {:>10}", "t", "kappa1", "kappa2", "a^2", "b_out2");
    for t in [0.0, 0.5, p.t1, 1.0, p.delay, 1.5, 2.0, 3.0, 5.0, 10.0] {
        let i = two.index_at(t);
        println!(
            "{:>6.3}  {:>8.4}  {:>8.4}  {:>10.6}  {:>10.2e}",
            two.t[i], two.kappa1[i], two.kappa2[i], two.a_sq[i], two.b_out2[i]
        );
    }
    Ok(())
}
