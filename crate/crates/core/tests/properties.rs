use photon_recycler::control::greedy_coupling;
use photon_recycler::langevin::{self, RunSummary};
use photon_recycler::{analytic, CouplingPolicy, PulseSpec, SimConfig};
use proptest::prelude::*;

mod common;

use common::capture_with_profile;

fn profile() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.3f64..5.0, 4..40)
}

fn pulse_strategy() -> impl Strategy<Value = PulseSpec> {
    prop_oneof![
        (0.6f64..2.0).prop_map(PulseSpec::square),
        (0.5f64..2.0).prop_map(PulseSpec::exp_decay),
        prop::collection::vec(0.05f64..1.0, 3..12)
            .prop_map(|s| PulseSpec::tabulated_normalized(0.25, s).unwrap()),
    ]
}

fn policy_strategy() -> impl Strategy<Value = CouplingPolicy> {
    prop_oneof![
        (0.2f64..6.0).prop_map(CouplingPolicy::greedy),
        (0.0f64..6.0).prop_map(CouplingPolicy::constant),
    ]
}

fn cases(n: u32) -> ProptestConfig {
    ProptestConfig { cases: n, failure_persistence: None, ..ProptestConfig::default() }
}

fn horizon(pulse: &PulseSpec) -> f64 {
    match pulse {
        PulseSpec::ExpDecay { gamma } => 8.0 / gamma,
        p => p.duration().unwrap(),
    }
}

proptest! {
    #![proptest_config(cases(50))]

    #[test]
    fn energy_ledger_closes(
        pulse in pulse_strategy(),
        p1 in policy_strategy(),
        p2 in prop::option::of(policy_strategy()),
        lossy in any::<bool>(),
        delay in 0.01f64..2.0,
    ) {
        let kappa_i = if lossy { 1e-3 } else { 0.0 };
        let t_end = horizon(&pulse) + delay + 1.0;
        let cfg = SimConfig::new(1e-4, t_end).unwrap().with_kappa_i(kappa_i).unwrap().with_delay(delay).unwrap();
        let mut s = RunSummary::default();
        langevin::run(&pulse, &p1, p2.as_ref(), &cfg, &mut s).unwrap();
        prop_assert!(s.max_ledger_violation < 1e-6, "violation {}", s.max_ledger_violation);
    }
}

proptest! {
    #![proptest_config(cases(10))]

    #[test]
    fn capture_depends_only_on_integrated_coupling(first in profile(), mut second in profile()) {
        let tau: f64 = first.iter().sum();
        let scale = tau / second.iter().sum::<f64>();
        second.iter_mut().for_each(|k| *k *= scale);
        let a1 = capture_with_profile(&first);
        let a2 = capture_with_profile(&second);
        prop_assert!((a1 - a2).abs() < 1e-6, "{} vs {}", a1, a2);
    }
}

proptest! {
    #![proptest_config(cases(256))]

    #[test]
    fn greedy_coupling_is_bounded(b in 0.0f64..10.0, a in 0.0f64..10.0, kmax in 0.01f64..20.0) {
        let eps = 1e-12;
        let k = greedy_coupling(b, a, kmax, eps);
        prop_assert!((0.0..=kmax).contains(&k));
        if a <= eps || (b / a).powi(2) >= kmax {
            prop_assert_eq!(k, kmax);
        } else {
            prop_assert_eq!(k, (b / a).powi(2));
        }
    }

    #[test]
    fn closed_form_efficiencies_are_fractions(k in 0.05f64..50.0, kappa_i in 0.0f64..0.5) {
        let e = analytic::exp_eff_infinity(k);
        prop_assert!(e > 0.0 && e < 1.0);
        let s = analytic::square_metrics_noisy(k, kappa_i).unwrap().eff_first_pass;
        prop_assert!((0.0..=1.0).contains(&s));
    }
}

proptest! {
    #![proptest_config(cases(20))]

    #[test]
    fn switched_off_second_port_is_single_pass(
        pulse in pulse_strategy(),
        p1 in policy_strategy(),
        lossy in any::<bool>(),
        delay in 0.01f64..2.0,
    ) {
        let kappa_i = if lossy { 1e-3 } else { 0.0 };
        let cfg = SimConfig::new(1e-3, horizon(&pulse) + delay + 1.0).unwrap().with_kappa_i(kappa_i).unwrap().with_delay(delay).unwrap();
        let single = langevin::simulate_single_pass(&pulse, &p1, &cfg).unwrap();
        let two = langevin::simulate_two_pass(&pulse, &p1, &CouplingPolicy::off(), &cfg).unwrap();
        prop_assert_eq!(&single.a, &two.a);
        prop_assert_eq!(&single.b_out, &two.b_out);
        prop_assert_eq!(&single.kappa1, &two.kappa1);
        prop_assert_eq!(&single.a_sq, &two.a_sq);
    }
}

#[test]
fn integrator_converges_as_the_step_shrinks() {
    let kappa: f64 = 2.0;
    let t: f64 = 3.0;
    let exact =
        2.0 * kappa.sqrt() * (-t / 2.0).exp() * (1.0 - (-(kappa - 1.0) * t / 2.0).exp()) / (kappa - 1.0);
    let err = |dt: f64| {
        let cfg = SimConfig::new(dt, t).unwrap();
        let mut s = RunSummary::default();
        langevin::run(&PulseSpec::exp_decay(1.0), &CouplingPolicy::constant(kappa), None, &cfg, &mut s)
            .unwrap();
        (s.last.a - exact).abs()
    };
    let (e1, e2, e3) = (err(0.1), err(0.05), err(0.025));
    assert!(e1 / e2 >= 1.8, "{e1} / {e2}");
    assert!(e2 / e3 >= 1.8, "{e2} / {e3}");
}
