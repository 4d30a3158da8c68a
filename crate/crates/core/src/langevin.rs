//! Fixed-step integration of the cavity amplitude equation
//!
//! ```text
//! da/dt = -(κ1 + κ2 + κ_i)/2 · a + √κ1 · b_in + √κ2 · b_in2
//! b_out  = b_in  - √κ1 · a
//! b_out2 = b_in2 - √κ2 · a
//! b_in2(t) = e^{-κ_i Δt/2} · b_out(t - Δt)
//! ```
//!
//! Couplings are evaluated by their policies at the start of each step and
//! held for the whole step; the amplitude is advanced with classical RK4.
//! Port-1 output is kept per step at the three RK4 sample instants (start,
//! midpoint, end) so the delayed feedback needs no interpolation once the
//! delay is a whole number of steps. Energies are accumulated with Simpson's
//! rule on the same instants, which is what lets the ledger close to the
//! integrator's own truncation error.

use serde::{Deserialize, Serialize};

use crate::pulse::InputPulse;
use crate::{CouplingPolicy, DelaySnap, Error, Result, SimConfig};

/// Input–output relation of a port: `b - √κ·a`.
#[inline]
pub fn output_amplitude(b: f64, kappa: f64, a: f64) -> f64 {
    b - kappa.sqrt() * a
}

/// CSV column order of a trajectory.
pub const COLUMNS: [&str; 13] = [
    "t",
    "b_in",
    "kappa1",
    "a",
    "a_sq",
    "b_out",
    "b_in2",
    "kappa2",
    "b_out2",
    "e_in_cum",
    "e_out_cum",
    "e_loss_cum",
    "e_delay_inflight",
];

/// One grid sample of a run. Couplings are the values applied over the step
/// that starts at `t`; amplitudes are the right-continuous values at `t`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub b_in: f64,
    pub kappa1: f64,
    pub a: f64,
    pub b_out: f64,
    pub b_in2: f64,
    pub kappa2: f64,
    pub b_out2: f64,
    pub e_in_cum: f64,
    pub e_out_cum: f64,
    pub e_loss_cum: f64,
    pub e_delay_inflight: f64,
}

impl Sample {
    pub fn a_sq(&self) -> f64 {
        self.a * self.a
    }

    /// `a² + e_out + e_loss + e_inflight - e_in`.
    pub fn ledger_residual(&self) -> f64 {
        self.a_sq() + self.e_out_cum + self.e_loss_cum + self.e_delay_inflight - self.e_in_cum
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMeta {
    pub dt: f64,
    pub steps: usize,
    pub two_pass: bool,
    pub delay: f64,
    pub delay_requested: f64,
    pub delay_snap: DelaySnap,
    pub kappa_i: f64,
    pub stop_time: Option<f64>,
}

/// Uniformly sampled record of a run. All columns share one length.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub b_in: Vec<f64>,
    pub kappa1: Vec<f64>,
    pub a: Vec<f64>,
    pub a_sq: Vec<f64>,
    pub b_out: Vec<f64>,
    pub b_in2: Vec<f64>,
    pub kappa2: Vec<f64>,
    pub b_out2: Vec<f64>,
    pub e_in_cum: Vec<f64>,
    pub e_out_cum: Vec<f64>,
    pub e_loss_cum: Vec<f64>,
    pub e_delay_inflight: Vec<f64>,
    pub meta: TrajectoryMeta,
}

impl Trajectory {
    fn with_capacity(n: usize, meta: TrajectoryMeta) -> Self {
        let col = || Vec::with_capacity(n);
        Trajectory {
            t: col(),
            b_in: col(),
            kappa1: col(),
            a: col(),
            a_sq: col(),
            b_out: col(),
            b_in2: col(),
            kappa2: col(),
            b_out2: col(),
            e_in_cum: col(),
            e_out_cum: col(),
            e_loss_cum: col(),
            e_delay_inflight: col(),
            meta,
        }
    }

    fn push(&mut self, s: &Sample) {
        self.t.push(s.t);
        self.b_in.push(s.b_in);
        self.kappa1.push(s.kappa1);
        self.a.push(s.a);
        self.a_sq.push(s.a_sq());
        self.b_out.push(s.b_out);
        self.b_in2.push(s.b_in2);
        self.kappa2.push(s.kappa2);
        self.b_out2.push(s.b_out2);
        self.e_in_cum.push(s.e_in_cum);
        self.e_out_cum.push(s.e_out_cum);
        self.e_loss_cum.push(s.e_loss_cum);
        self.e_delay_inflight.push(s.e_delay_inflight);
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// Columns in [`COLUMNS`] order.
    pub fn columns(&self) -> [&[f64]; 13] {
        [
            &self.t,
            &self.b_in,
            &self.kappa1,
            &self.a,
            &self.a_sq,
            &self.b_out,
            &self.b_in2,
            &self.kappa2,
            &self.b_out2,
            &self.e_in_cum,
            &self.e_out_cum,
            &self.e_loss_cum,
            &self.e_delay_inflight,
        ]
    }

    pub fn final_a_sq(&self) -> f64 {
        self.a_sq.last().copied().unwrap_or(0.0)
    }

    /// `1 - a²` at the end of the run.
    pub fn final_loss(&self) -> f64 {
        1.0 - self.final_a_sq()
    }

    /// Index of the grid point closest to `t`.
    pub fn index_at(&self, t: f64) -> usize {
        let k = (t / self.meta.dt).round().max(0.0) as usize;
        k.min(self.len().saturating_sub(1))
    }

    /// Largest `|b_out2|` over grid points where port 2 is connected.
    pub fn max_abs_b_out2(&self) -> f64 {
        let start = (self.meta.delay / self.meta.dt).round() as usize;
        self.b_out2.iter().skip(start).fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Totals at the end of a run plus the worst pointwise ledger residual.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LedgerSummary {
    pub e_in: f64,
    pub e_out: f64,
    pub e_loss: f64,
    pub e_delay_inflight: f64,
    pub final_a_sq: f64,
    pub max_violation: f64,
    pub worst_index: usize,
}

/// Checks `a² + e_out + e_loss + e_inflight = e_in` along the whole record.
pub fn energy_ledger(traj: &Trajectory) -> LedgerSummary {
    let mut worst = (0.0f64, 0usize);
    for k in 0..traj.len() {
        let r = (traj.a_sq[k] + traj.e_out_cum[k] + traj.e_loss_cum[k] + traj.e_delay_inflight[k]
            - traj.e_in_cum[k])
            .abs();
        if r > worst.0 || r.is_nan() {
            worst = (r, k);
        }
    }
    let last = traj.len().saturating_sub(1);
    let get = |v: &Vec<f64>| v.get(last).copied().unwrap_or(0.0);
    LedgerSummary {
        e_in: get(&traj.e_in_cum),
        e_out: get(&traj.e_out_cum),
        e_loss: get(&traj.e_loss_cum),
        e_delay_inflight: get(&traj.e_delay_inflight),
        final_a_sq: get(&traj.a_sq),
        max_violation: worst.0,
        worst_index: worst.1,
    }
}

/// Receives every grid sample of a run.
pub trait SampleSink {
    fn record(&mut self, sample: &Sample);
}

impl SampleSink for Trajectory {
    fn record(&mut self, sample: &Sample) {
        self.push(sample);
    }
}

/// Keeps only what parameter scans need: the last sample, the worst port-2
/// reflection and the worst ledger residual.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RunSummary {
    pub last: Sample,
    pub max_abs_b_out2: f64,
    pub max_ledger_violation: f64,
}

impl RunSummary {
    pub fn final_a_sq(&self) -> f64 {
        self.last.a_sq()
    }
    pub fn final_loss(&self) -> f64 {
        1.0 - self.last.a_sq()
    }
}

impl SampleSink for RunSummary {
    fn record(&mut self, s: &Sample) {
        self.last = *s;
        // b_out2 is identically zero before port 2 is connected
        self.max_abs_b_out2 = self.max_abs_b_out2.max(s.b_out2.abs());
        self.max_ledger_violation = self.max_ledger_violation.max(s.ledger_residual().abs());
    }
}

fn trajectory_meta(config: &SimConfig, two_pass: bool) -> TrajectoryMeta {
    TrajectoryMeta {
        dt: config.dt(),
        steps: config.steps(),
        two_pass,
        delay: if two_pass { config.delay() } else { 0.0 },
        delay_requested: if two_pass { config.delay_requested() } else { 0.0 },
        delay_snap: config.delay_snap(),
        kappa_i: config.kappa_i(),
        stop_time: config.stop_time(),
    }
}

/// Captures `pulse` through a single port.
pub fn simulate_single_pass<P: InputPulse + ?Sized>(
    pulse: &P,
    policy: &CouplingPolicy,
    config: &SimConfig,
) -> Result<Trajectory> {
    let mut traj = Trajectory::with_capacity(config.steps() + 1, trajectory_meta(config, false));
    run(pulse, policy, None, config, &mut traj)?;
    Ok(traj)
}

/// Captures `pulse` through port 1 and re-injects the port-1 reflection into
/// port 2 after `config.delay()`.
pub fn simulate_two_pass<P: InputPulse + ?Sized>(
    pulse: &P,
    policy1: &CouplingPolicy,
    policy2: &CouplingPolicy,
    config: &SimConfig,
) -> Result<Trajectory> {
    let mut traj = Trajectory::with_capacity(config.steps() + 1, trajectory_meta(config, true));
    run(pulse, policy1, Some(policy2), config, &mut traj)?;
    Ok(traj)
}

/// Runs the dynamics and streams every grid sample into `sink`.
///
/// `policy2 = None` is the single-port cavity.
pub fn run<P, S>(
    pulse: &P,
    policy1: &CouplingPolicy,
    policy2: Option<&CouplingPolicy>,
    config: &SimConfig,
    sink: &mut S,
) -> Result<()>
where
    P: InputPulse + ?Sized,
    S: SampleSink + ?Sized,
{
    pulse.validate()?;
    policy1.validate()?;
    let delay_steps = config.delay_steps();
    if let Some(p2) = policy2 {
        p2.validate()?;
        if delay_steps == 0 {
            return Err(Error::InvalidConfig(format!(
                "two-pass capture needs a delay of at least one step (dt = {}), got {}",
                config.dt(),
                config.delay()
            )));
        }
        if let Some(support) = pulse.support_end() {
            // small slack for the grid rounding of both quantities
            if config.delay() + support > config.t_end() + 1e-9 * config.dt().max(1.0) {
                return Err(Error::DelayExceedsHorizon {
                    delay: config.delay(),
                    support,
                    t_end: config.t_end(),
                });
            }
        }
    }

    let dt = config.dt();
    let n = config.steps();
    let kappa_i = config.kappa_i();
    let eps_a = config.eps_a();
    let stop = config.stop_time().unwrap_or(f64::INFINITY);
    let att = config.delay_attenuation();
    let att_sq = att * att;
    let w = dt / 6.0;

    // per step: port-1 output at start/mid/end and its Simpson energy
    let mut history: Vec<[f64; 4]> = if policy2.is_some() { Vec::with_capacity(n) } else { Vec::new() };

    let mut a = 0.0f64;
    let mut e_in = 0.0f64;
    let mut e_out = 0.0f64;
    let mut e_loss = 0.0f64;
    let mut inflight = 0.0f64;

    let delayed = |history: &Vec<[f64; 4]>, k: usize| -> Option<[f64; 4]> {
        if policy2.is_some() && k >= delay_steps {
            history.get(k - delay_steps).copied()
        } else {
            None
        }
    };

    for k in 0..=n {
        let t = k as f64 * dt;
        let b1s = pulse.amplitude(t);
        let active = t < stop;
        let kappa1 = if active { policy1.coupling(t, b1s, a, eps_a) } else { 0.0 };
        let past = delayed(&history, k);
        let (b2s, b2m, b2e) = match past {
            Some(h) => (att * h[0], att * h[1], att * h[2]),
            None => (0.0, 0.0, 0.0),
        };
        let kappa2 = match (policy2, past) {
            (Some(p2), Some(_)) if active => p2.coupling(t, b2s, a, eps_a),
            _ => 0.0,
        };
        let s1 = kappa1.sqrt();
        let s2 = kappa2.sqrt();

        sink.record(&Sample {
            t,
            b_in: b1s,
            kappa1,
            a,
            b_out: b1s - s1 * a,
            b_in2: b2s,
            kappa2,
            b_out2: b2s - s2 * a,
            e_in_cum: e_in,
            e_out_cum: e_out,
            e_loss_cum: e_loss,
            e_delay_inflight: inflight,
        });
        if k == n {
            break;
        }

        let b1m = pulse.amplitude(t + 0.5 * dt);
        let b1e = pulse.amplitude_before((k + 1) as f64 * dt);
        let decay = 0.5 * (kappa1 + kappa2 + kappa_i);
        let f = |a: f64, b1: f64, b2: f64| -decay * a + s1 * b1 + s2 * b2;

        let k1 = f(a, b1s, b2s);
        let k2 = f(a + 0.5 * dt * k1, b1m, b2m);
        let k3 = f(a + 0.5 * dt * k2, b1m, b2m);
        let k4 = f(a + dt * k3, b1e, b2e);
        let a_next = a + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if !a_next.is_finite() {
            return Err(Error::NonFinite { step: k, t, a: a_next });
        }
        // cubic Hermite midpoint from the end-point values and slopes
        let f_end = f(a_next, b1e, b2e);
        let a_mid = 0.5 * (a + a_next) + dt / 8.0 * (k1 - f_end);

        let o1 = [b1s - s1 * a, b1m - s1 * a_mid, b1e - s1 * a_next];
        let out1 = w * (o1[0] * o1[0] + 4.0 * o1[1] * o1[1] + o1[2] * o1[2]);
        e_in += w * (b1s * b1s + 4.0 * b1m * b1m + b1e * b1e);
        e_loss += kappa_i * w * (a * a + 4.0 * a_mid * a_mid + a_next * a_next);

        if policy2.is_some() {
            let o2 = [b2s - s2 * a, b2m - s2 * a_mid, b2e - s2 * a_next];
            e_out += w * (o2[0] * o2[0] + 4.0 * o2[1] * o2[1] + o2[2] * o2[2]);
            let leaving = past.map_or(0.0, |h| h[3]);
            inflight += out1 - leaving;
            e_loss += (1.0 - att_sq) * leaving;
            history.push([o1[0], o1[1], o1[2], out1]);
        } else {
            e_out += out1;
        }
        a = a_next;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::PulseSpec;

    #[test]
    fn output_amplitude_examples() {
        assert_eq!(output_amplitude(1.0, 0.0, 0.7), 1.0);
        assert_eq!(output_amplitude(1.0, 4.0, 0.5), 0.0);
    }

    #[test]
    fn zero_coupling_reflects_everything() {
        let pulse = PulseSpec::exp_decay(1.0);
        let cfg = SimConfig::new(1e-3, 10.0).unwrap();
        let traj = simulate_single_pass(&pulse, &CouplingPolicy::off(), &cfg).unwrap();
        assert!(traj.a.iter().all(|&a| a == 0.0));
        assert_eq!(traj.b_out, traj.b_in);
        assert!(energy_ledger(&traj).max_violation < 1e-12);
    }

    #[test]
    fn grid_and_vacuum_start() {
        let pulse = PulseSpec::square(1.0);
        let cfg = SimConfig::new(0.01, 2.0).unwrap();
        let traj = simulate_single_pass(&pulse, &CouplingPolicy::greedy(3.0), &cfg).unwrap();
        assert_eq!(traj.len(), 201);
        assert_eq!(traj.a[0], 0.0);
        for col in traj.columns() {
            assert_eq!(col.len(), traj.len());
        }
        assert_eq!(traj.t[150], 1.5);
    }

    #[test]
    fn two_pass_needs_a_delay() {
        let pulse = PulseSpec::exp_decay(1.0);
        let cfg = SimConfig::new(1e-2, 5.0).unwrap();
        let g = CouplingPolicy::greedy(2.0);
        assert!(matches!(simulate_two_pass(&pulse, &g, &g, &cfg), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn rejects_delay_past_horizon() {
        let pulse = PulseSpec::square(1.0);
        let cfg = SimConfig::new(1e-2, 2.0).unwrap().with_delay(1.5).unwrap();
        let g = CouplingPolicy::greedy(2.0);
        assert!(matches!(simulate_two_pass(&pulse, &g, &g, &cfg), Err(Error::DelayExceedsHorizon { .. })));
    }

    struct Blowup;
    impl InputPulse for Blowup {
        fn amplitude(&self, t: f64) -> f64 {
            if t > 0.05 {
                f64::INFINITY
            } else {
                1.0
            }
        }
    }

    #[test]
    fn non_finite_state_reports_step() {
        let cfg = SimConfig::new(0.01, 1.0).unwrap();
        let err = simulate_single_pass(&Blowup, &CouplingPolicy::constant(1.0), &cfg).unwrap_err();
        match err {
            Error::NonFinite { step, .. } => assert_eq!(step, 5),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn stop_time_decouples() {
        let pulse = PulseSpec::exp_decay(1.0);
        let cfg = SimConfig::new(1e-3, 5.0).unwrap().with_stop_time(Some(2.0)).unwrap();
        let traj = simulate_single_pass(&pulse, &CouplingPolicy::greedy(3.0), &cfg).unwrap();
        let k = traj.index_at(2.0);
        assert!(traj.kappa1[k - 1] > 0.0);
        assert!(traj.kappa1[k..].iter().all(|&x| x == 0.0));
        assert_eq!(traj.a[k], *traj.a.last().unwrap());
    }

    #[test]
    fn summary_sink_matches_trajectory() {
        let pulse = PulseSpec::exp_decay(1.0);
        let cfg = SimConfig::new(1e-3, 10.0).unwrap().with_delay(0.8).unwrap().with_kappa_i(0.01).unwrap();
        let g = CouplingPolicy::greedy(1.5);
        let traj = simulate_two_pass(&pulse, &g, &g, &cfg).unwrap();
        let mut s = RunSummary::default();
        run(&pulse, &g, Some(&g), &cfg, &mut s).unwrap();
        assert_eq!(s.final_a_sq(), traj.final_a_sq());
        assert_eq!(s.max_abs_b_out2, traj.max_abs_b_out2());
        assert_eq!(s.max_ledger_violation, energy_ledger(&traj).max_violation);
    }
}
