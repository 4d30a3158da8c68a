//! Intrinsic cavity loss and the optimal moment to stop.
//!
//! With `κ_i > 0` the stored excitation decays, so capture must end at the
//! time where gain and loss balance. The example compares the single-pass
//! stop time `T1` and the two-pass stop time `T2` with the peaks of simulated
//! trajectories and prints the improvement factor of recycling.
//!
//! ```bash
//! cargo run --release --example noisy_stop_times
//! ```

use photon_recycler::langevin;
use photon_recycler::{analytic, control, CouplingPolicy, DelaySnap, PulseSpec, SimConfig};

fn peak(a_sq: &[f64], t: &[f64]) -> (f64, f64) {
    a_sq.iter().zip(t).fold((0.0, 0.0), |best, (&a, &t)| if a > best.0 { (a, t) } else { best })
}

fn main() -> photon_recycler::Result<()> {
    let pulse = PulseSpec::exp_decay(1.0);
    let dt = 1e-3;
    for (k, kappa_i) in [(3.0, 1e-3), (2.0, 1e-2), (1.5, 5e-2)] {
        let m = analytic::noisy_metrics(k, k, kappa_i)?;
        let s = control::stop_times(k, k, kappa_i)?;
        println!("kappa_max = {k}, kappa_i = {kappa_i}");

        let cfg = SimConfig::new(dt, 2.0 * s.single)?.with_kappa_i(kappa_i)?;
        let single = langevin::simulate_single_pass(&pulse, &CouplingPolicy::greedy(k), &cfg)?;
        let (a1, t1) = peak(&single.a_sq, &single.t);
        println!(
            "  single pass: T1 = {:.4} (peak at {t1:.3}), a^2 = {:.6} (peak {a1:.6})",
            s.single, m.eff_single
        );

        let delay = control::select_delay_exp(k, k, kappa_i)?;
        let cfg = SimConfig::new(dt, 2.0 * s.two)?
            .with_kappa_i(kappa_i)?
            .with_delay_snap(DelaySnap::SnapUp)?
            .with_delay(delay)?;
        let g = CouplingPolicy::greedy(k);
        let two = langevin::simulate_two_pass(&pulse, &g, &g, &cfg)?;
        let (a2, t2) = peak(&two.a_sq, &two.t);
        println!(
            "  two pass:    T2 = {:.4} (peak at {t2:.3}), a^2 = {:.6} (peak {a2:.6}), delay {delay:.4}",
            s.two,
            m.eff_two.unwrap_or(f64::NAN)
        );
        let f = analytic::improvement_factor(k, kappa_i)?;
        println!("  amplitude ratio single/two = {:.6} (small-alpha {:.6})", f.exact, f.small_alpha);
        println!("  stop after recapture: {:?}", control::stop_after_recapture(k, k, kappa_i));
    }
    if let Some(th) = analytic::kappa_i_threshold(2.0, 2.0) {
        println!("\nlargest kappa_i with T2 > delay + t1 at kappa_max = 2: {th:.5}");
    }
    Ok(())
}
