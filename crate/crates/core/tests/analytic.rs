use std::f64::consts::LN_2;

use photon_recycler::analytic::{self, SQUARE_THRESHOLD};
use photon_recycler::control;
use photon_recycler::pulse::PulseKind;

fn close(a: f64, b: f64, tol: f64) {
    assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
}

/// Composite Simpson rule with `n` (even) panels.
fn simpson(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> f64 {
    let h = (hi - lo) / n as f64;
    let mut s = f(lo) + f(hi);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(lo + i as f64 * h);
    }
    s * h / 3.0
}

/// Greedy capture with loss, integrated by a plain fixed-step RK4 in which
/// the coupling is re-evaluated at every stage. Returns `a²` at each step.
fn greedy_capture(b_in: impl Fn(f64) -> f64, cap: f64, kappa_i: f64, t_end: f64, n: usize) -> Vec<f64> {
    let h = t_end / n as f64;
    let rhs = |t: f64, a: f64| {
        let b = b_in(t);
        let k = if a > 0.0 { cap.min((b / a).powi(2)) } else { cap };
        -(k + kappa_i) / 2.0 * a + k.sqrt() * b
    };
    let mut a = 0.0;
    let mut out = vec![0.0];
    for i in 0..n {
        let t = i as f64 * h;
        let k1 = rhs(t, a);
        let k2 = rhs(t + h / 2.0, a + h / 2.0 * k1);
        let k3 = rhs(t + h / 2.0, a + h / 2.0 * k2);
        let k4 = rhs(t + h, a + h * k3);
        a += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        out.push(a * a);
    }
    out
}

fn exp_pulse(t: f64) -> f64 {
    (-0.5 * t).exp()
}

fn square_pulse(t: f64) -> f64 {
    // closed at the right end so the last RK4 stage sees the plateau
    if t <= 1.0 {
        1.0
    } else {
        0.0
    }
}

#[test]
fn optimal_growth_pulse_is_normalized() {
    for tau in [LN_2, 2.0, 5.0] {
        let opt = analytic::single_pass_optimum(tau).unwrap();
        close(simpson(|x| opt.beta(x).powi(2), 0.0, tau, 2000), 1.0, 1e-12);
        close(opt.amplitude.powi(2), 1.0 - (-tau).exp(), 1e-15);
    }
}

#[test]
fn square_examples_against_direct_formulas() {
    for k in [0.5, 1.0, 1.3, 2.0, 3.0, 4.0, 6.0] {
        let m = analytic::square_metrics(k).unwrap();
        let oracle = if k <= 2.0 * LN_2 {
            4.0 / k * (1.0 - (-k / 2.0).exp()).powi(2)
        } else {
            1.0 - (2.0 * LN_2 - 1.0) / k
        };
        close(m.eff_first_pass, oracle, 1e-14);
        close(m.kappa2_min * m.eff_first_pass, 1.0, 1e-14);
    }
    let m = analytic::square_metrics(4.0).unwrap();
    close(m.eff_first_pass, 0.90343, 1e-5);
    close(m.t1.unwrap(), 0.34657, 1e-5);
    close(m.kappa2_min, 1.10690, 1e-5);
}

#[test]
fn square_efficiency_matches_independent_integration() {
    let n = 40_000;
    for k in [0.5, 1.0, 2.0, 4.0] {
        for kappa_i in [0.0, 1e-3, 0.05] {
            let a_sq = greedy_capture(square_pulse, k, kappa_i, 1.0, n);
            let m = analytic::square_metrics_noisy(k, kappa_i).unwrap();
            close(*a_sq.last().unwrap(), m.eff_first_pass, 1e-6);
        }
    }
}

#[test]
fn exp_examples_against_direct_formulas() {
    for k in [0.5, 1.5, 2.0, 3.0, 6.0, 20.0] {
        let m = analytic::exp_metrics(k).unwrap();
        let oracle = (((1.0 + 1.0 / k).powf(k + 1.0)) / 4.0).powf(1.0 / (k - 1.0));
        close(m.eff_infinity, oracle, 1e-12);
        close(m.t1, 2.0 / (k - 1.0) * (2.0 * k / (k + 1.0)).ln(), 1e-12);
    }
    close(analytic::exp_t1(2.0), 2.0 * (4.0f64 / 3.0).ln(), 1e-14);
    close(analytic::exp_eff_infinity(2.0), 0.84375, 1e-14);
    close(analytic::exp_eff_infinity(3.0), 8.0 / 9.0, 1e-14);
    // κ → 1 limit
    close(analytic::exp_eff_infinity(1.0), 2.0 / std::f64::consts::E, 1e-12);
}

#[test]
fn exp_efficiency_matches_independent_integration() {
    let t_end = 40.0;
    let n = 200_000;
    for k in [0.5, 1.0, 2.0, 6.0] {
        let a_sq = greedy_capture(exp_pulse, k, 0.0, t_end, n);
        close(*a_sq.last().unwrap(), analytic::exp_eff_infinity(k), 1e-6);
        // the amplitude follows the closed-form trajectory
        let m = analytic::exp_metrics(k).unwrap();
        for t in [0.3, m.t1, 2.0, 5.0] {
            let i = (t / t_end * n as f64).round() as usize;
            let ti = i as f64 * t_end / n as f64;
            close(a_sq[i].sqrt(), m.amplitude(ti), 1e-6);
        }
    }
}

#[test]
fn exp_reflection_energy_closes() {
    for k in [1.5, 2.0, 3.0, 6.0] {
        let m = analytic::exp_metrics(k).unwrap();
        let reflected = simpson(|t| m.reflection(t).powi(2), 0.0, m.t1, 20_000);
        let injected = 1.0 - (-m.t1).exp();
        let stored = m.amplitude(m.t1).powi(2);
        close(injected - stored, reflected, 1e-10);
        close(m.reflection(0.0), 1.0, 1e-14);
        close(m.reflection(m.t1), 0.0, 1e-12);
        close(analytic::exp_reflection(0.5 * m.t1, k).unwrap(), m.reflection(0.5 * m.t1), 0.0);
    }
    assert!(analytic::exp_reflection(-1.0, 2.0).is_err());
}

#[test]
fn exp_asymptote_for_large_cap() {
    let k: f64 = 100.0;
    let asymptote = 1.0 - (2.0 * LN_2 - 1.0) / k;
    close(analytic::exp_eff_infinity(k), asymptote, 1e-3);
    close(analytic::exp_t1(k), 2.0 * LN_2 / k, 1e-3);
}

#[test]
fn efficiencies_increase_with_cap() {
    let caps: Vec<f64> = (1..=300).map(|i| 0.02 * i as f64).collect();
    for w in caps.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        assert!(analytic::exp_eff_infinity(hi) > analytic::exp_eff_infinity(lo), "exp at {lo}");
        let sq_lo = analytic::square_metrics(lo).unwrap().eff_first_pass;
        let sq_hi = analytic::square_metrics(hi).unwrap().eff_first_pass;
        assert!(sq_hi >= sq_lo, "square at {lo}");
    }
}

#[test]
fn threshold_constant() {
    let k = analytic::solve_k();
    close(k, 1.2834, 5e-5);
    let residual = (k + 1.0).powf(k + 1.0) - 4.0 * k * k;
    assert!(residual.abs() < 1e-12, "residual {residual}");
    // equal caps at k sit exactly on the feasibility edge
    close(k * analytic::exp_eff_infinity(k), 1.0, 1e-12);
    assert!(analytic::exp_two_pass_feasible(k * (1.0 + 1e-3), k * (1.0 + 1e-3)));
    assert!(!analytic::exp_two_pass_feasible(k * (1.0 - 1e-3), k * (1.0 - 1e-3)));
    // independent bisection of the same equation
    let (mut lo, mut hi) = (1.1f64, 1.9f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (mid + 1.0).powf(mid + 1.0) - 4.0 * mid * mid < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    close(k, lo, 1e-12);
    assert!(SQUARE_THRESHOLD > k);
}

#[test]
fn noisy_single_pass_reduces_to_lossless() {
    for k in [1.5, 2.0, 3.0] {
        close(analytic::noisy_t1(k, 1e-12), analytic::exp_t1(k), 1e-9);
        let d0 = analytic::noisy_delay(k, k, 0.0).unwrap();
        close(analytic::noisy_delay(k, k, 1e-12).unwrap(), d0, 1e-9);
    }
}

#[test]
fn noisy_single_pass_matches_independent_integration() {
    for (k, kappa_i) in [(3.0, 1e-3), (2.0, 0.01), (1.5, 0.1)] {
        let m = analytic::noisy_metrics(k, k, kappa_i).unwrap();
        let n = 100_000;
        let t_end = m.t_stop_single;
        let a_sq = greedy_capture(exp_pulse, k, kappa_i, t_end, n);
        close(*a_sq.last().unwrap(), m.eff_single, 1e-6);
        // T1 is the maximum of a²
        let longer = greedy_capture(exp_pulse, k, kappa_i, 2.0 * t_end, 2 * n);
        let peak = longer.iter().cloned().fold(0.0, f64::max);
        close(peak, m.eff_single, 1e-8);
    }
}

#[test]
fn noisy_two_pass_ceiling() {
    let eff = analytic::noisy_eff_two(1e-3);
    close(eff, 0.99311, 1e-5);
    close(eff, (1e-3f64).powf(1e-3 / (1.0 - 1e-3)), 1e-15);
    close(analytic::noisy_t_stop_two(1e-3), -(1e-3f64).ln() / 0.999, 1e-12);
    // eff_two = e^{-T2}/κ_i at the stop time
    for kappa_i in [1e-4, 1e-3, 1e-2, 0.1] {
        let t2 = analytic::noisy_t_stop_two(kappa_i);
        close(analytic::noisy_eff_two(kappa_i), (-t2).exp() / kappa_i, 1e-12);
    }
}

#[test]
fn kappa_i_threshold_is_where_the_stop_window_closes() {
    let th = analytic::kappa_i_threshold(2.0, 2.0).unwrap();
    // brute-force sign of T2 - Δt - t1 using the control module
    let below = control::stop_after_recapture(2.0, 2.0, th - 1e-6);
    let above = control::stop_after_recapture(2.0, 2.0, th + 1e-6);
    assert_eq!(below, Some(true));
    assert_ne!(above, Some(true));
}

#[test]
fn improvement_factor_is_the_amplitude_ratio() {
    for (k, kappa_i) in [(3.0, 1e-3), (2.0, 0.01), (6.0, 1e-4)] {
        let f = analytic::improvement_factor(k, kappa_i).unwrap();
        let m = analytic::noisy_metrics(k, k, kappa_i).unwrap();
        close(f.exact, (m.eff_single / m.eff_two.unwrap()).sqrt(), 1e-9);
    }
    let f = analytic::improvement_factor(50.0, 1e-4).unwrap();
    close(f.exact, f.small_alpha, 1e-3);
    close(f.small_alpha, 1.0 - (LN_2 - 0.5) / 50.0, 1e-15);
    assert!(analytic::improvement_factor(1.0 - 1e-3, 1e-3).is_err());
}

#[test]
fn report_fields() {
    let r = analytic::report(PulseKind::ExpDecay, 3.0, 3.0, 0.0, None).unwrap();
    close(r.eff_infinity.unwrap(), 0.888889, 1e-6);
    close(r.k_const, 1.2834, 5e-5);
    assert_eq!(r.eff_two, Some(1.0));
    assert!(r.delay.is_some() && r.improvement_factor.is_none());

    let r = analytic::report(PulseKind::ExpDecay, 3.0, 3.0, 1e-3, Some(2.0)).unwrap();
    close(r.t_stop_two.unwrap(), 6.914669948931068, 1e-12);
    close(r.single_pass_bound.unwrap(), 1.0 - (-2.0f64).exp(), 1e-15);
    assert!(r.improvement_factor.is_some() && r.alpha.is_some());

    let r = analytic::report(PulseKind::Square, 4.0, 1.0, 0.0, None).unwrap();
    close(r.eff_single, 0.90343, 1e-5);
    assert_eq!(r.eff_two, None);
    let r = analytic::report(PulseKind::Square, 4.0, 1.2, 0.0, None).unwrap();
    assert_eq!(r.eff_two, Some(1.0));

    assert!(analytic::report(PulseKind::Tabulated, 1.0, 1.0, 0.0, None).is_err());
    let json = serde_json::to_string(&r).unwrap();
    let back: analytic::AnalyticReport = serde_json::from_str(&json).unwrap();
    assert_eq!(back, r);
}

#[test]
fn invalid_arguments() {
    assert!(analytic::square_metrics(0.0).is_err());
    assert!(analytic::square_metrics(f64::NAN).is_err());
    assert!(analytic::exp_metrics(-1.0).is_err());
    assert!(analytic::noisy_metrics(2.0, 2.0, 0.0).is_err());
    assert!(analytic::noisy_metrics(2.0, 2.0, 1.0).is_err());
    assert!(analytic::single_pass_optimum(-0.1).is_err());
}
