//! Loss landscapes `1 - a²_final` over the `(κ1,max, κ2,max)` plane and
//! extraction of the perfect-capture boundary.
//!
//! Cells are independent; they are evaluated on a rayon pool (size capped by
//! `PHOTON_RECYCLER_THREADS`) and collected in index order, so the grid is
//! bit-identical for any thread count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::control::{self, DelayChoice};
use crate::langevin::{self, RunSummary};
use crate::pulse::{PulseKind, PulseSpec};
use crate::{analytic, CouplingPolicy, DelaySnap, Error, Result, SimConfig};

/// Environment variable that caps sweep parallelism.
pub const THREADS_ENV: &str = "PHOTON_RECYCLER_THREADS";

/// Floor applied before taking `log10` of a loss.
pub const LOG10_FLOOR: f64 = 1e-12;

/// Loss below which a cell counts as perfect capture (after refinement).
pub const PERFECT_LOSS: f64 = 1e-6;

/// Default grid step of sweeps and the finer step used to confirm cells.
pub const SWEEP_DT: f64 = 5e-4;
pub const REFINE_DT: f64 = 1e-4;

/// Cells whose loss at the sweep step is below this are re-run at [`REFINE_DT`].
pub const REFINE_TRIGGER: f64 = 1e-4;

/// Lossless exponential runs are read out at `40/γ`, where the untouched tail
/// energy is `e^{-40} < 1e-17`.
pub const EXP_HORIZON: f64 = 40.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Log,
    Linear,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSpec {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl Default for AxisSpec {
    fn default() -> Self {
        AxisSpec { min: 0.2, max: 6.0, points: 60, spacing: Spacing::Log }
    }
}

impl AxisSpec {
    pub fn values(&self) -> Result<Vec<f64>> {
        if !(self.min.is_finite() && self.max.is_finite() && self.min > 0.0 && self.max > self.min) {
            return Err(Error::InvalidArgument(format!(
                "axis [{}, {}] must be positive and increasing",
                self.min, self.max
            )));
        }
        if self.points < 2 {
            return Err(Error::InvalidArgument("an axis needs at least two points".into()));
        }
        let n = self.points - 1;
        Ok((0..=n)
            .map(|i| {
                let f = i as f64 / n as f64;
                match self.spacing {
                    Spacing::Log => (self.min.ln() + f * (self.max.ln() - self.min.ln())).exp(),
                    Spacing::Linear => self.min + f * (self.max - self.min),
                }
            })
            .collect())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default)]
    pub kappa1: AxisSpec,
    #[serde(default)]
    pub kappa2: AxisSpec,
}

impl GridSpec {
    pub fn square(axis: AxisSpec) -> Self {
        GridSpec { kappa1: axis, kappa2: axis }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridMeta {
    pub pulse: PulseKind,
    pub dt: f64,
    pub refine_dt: f64,
    pub kappa_i: f64,
    pub delay_policy: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellFailure {
    pub i: usize,
    pub j: usize,
    pub message: String,
}

/// Loss landscape. `loss[i][j]` belongs to `(kappa1_axis[i], kappa2_axis[j])`.
#[derive(Clone, Debug, PartialEq)]
pub struct LossGrid {
    pub kappa1_axis: Vec<f64>,
    pub kappa2_axis: Vec<f64>,
    pub loss: Vec<Vec<f64>>,
    pub log10_loss: Vec<Vec<f64>>,
    /// Delay used in each cell (natural time units).
    pub delay: Vec<Vec<f64>>,
    pub meta: GridMeta,
    pub failures: Vec<CellFailure>,
}

impl LossGrid {
    /// Builds a grid from losses alone (log column derived).
    pub fn from_losses(
        kappa1_axis: Vec<f64>,
        kappa2_axis: Vec<f64>,
        loss: Vec<Vec<f64>>,
        meta: GridMeta,
    ) -> Self {
        let log10_loss = loss.iter().map(|row| row.iter().map(|&l| log10_clamped(l)).collect()).collect();
        let delay = loss.iter().map(|row| vec![f64::NAN; row.len()]).collect();
        LossGrid { kappa1_axis, kappa2_axis, loss, log10_loss, delay, meta, failures: Vec::new() }
    }

    pub fn cell(&self, i: usize, j: usize) -> f64 {
        self.loss[i][j]
    }
}

pub fn log10_clamped(loss: f64) -> f64 {
    if loss.is_nan() {
        f64::NAN
    } else {
        loss.max(LOG10_FLOOR).log10()
    }
}

/// Number of worker threads: `PHOTON_RECYCLER_THREADS` if set and positive,
/// otherwise rayon's default.
pub fn thread_count() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(rayon::current_num_threads)
}

/// Result of evaluating one `(κ1, κ2)` point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellOutcome {
    pub loss: f64,
    pub delay: f64,
    pub refined: bool,
}

/// Greedy two-pass loss at one point; caps in the pulse's natural rate unit.
///
/// * square: delay from [`control::select_delay_square`], read out at `2·b_max⁻²`;
/// * exponential, reflectionless delay available: the closed-form delay, read
///   out at `40/γ` (lossless) or at the two-pass stop time;
/// * exponential, no reflectionless delay: lossless runs recycle after
///   `40/γ` (the supremum over delays is approached as the delay grows);
///   lossy runs minimize the loss at the stop time over the delay grid;
/// * exponential with loss where the closed-form recapture would end after
///   the stop time: the better of that delay and the least-loss grid delay.
///
/// Points with loss below [`REFINE_TRIGGER`] are recomputed at [`REFINE_DT`].
pub fn evaluate_cell(
    pulse: PulseKind,
    kappa1: f64,
    kappa2: f64,
    dt: f64,
    kappa_i: f64,
) -> Result<CellOutcome> {
    let first = evaluate_cell_at(pulse, kappa1, kappa2, dt, kappa_i)?;
    if dt > REFINE_DT && first.loss < REFINE_TRIGGER {
        let mut fine = evaluate_cell_at(pulse, kappa1, kappa2, REFINE_DT, kappa_i)?;
        fine.refined = true;
        return Ok(fine);
    }
    Ok(first)
}

fn evaluate_cell_at(pulse: PulseKind, k1: f64, k2: f64, dt: f64, kappa_i: f64) -> Result<CellOutcome> {
    match pulse {
        PulseKind::Square => {
            let spec = PulseSpec::square(1.0);
            let cfg = SimConfig::new(dt, 2.0)?.with_kappa_i(kappa_i)?;
            let choice = control::select_delay_square(&spec, k1, k2, &cfg)?;
            let loss = match choice {
                DelayChoice::Perfect { loss, .. } | DelayChoice::Residual { loss, .. } => loss,
            };
            Ok(CellOutcome { loss, delay: choice.delay(), refined: false })
        }
        PulseKind::ExpDecay => {
            let spec = PulseSpec::exp_decay(1.0);
            let p1 = CouplingPolicy::greedy(k1);
            let p2 = CouplingPolicy::greedy(k2);
            let stop = if kappa_i > 0.0 { Some(analytic::noisy_t_stop_two(kappa_i)) } else { None };
            let run = |delay: f64, t_end: f64| -> Result<RunSummary> {
                let cfg = SimConfig::new(dt, t_end)?
                    .with_kappa_i(kappa_i)?
                    .with_delay_snap(DelaySnap::SnapUp)?
                    .with_delay(delay)?
                    .with_stop_time(stop)?;
                let mut s = RunSummary::default();
                langevin::run(&spec, &p1, Some(&p2), &cfg, &mut s)?;
                Ok(s)
            };
            let least_loss = |t_stop: f64| -> Result<CellOutcome> {
                let max_steps = (t_stop / dt).floor() as usize;
                let (steps, loss) = control::minimize_on_grid(1, max_steps.max(2), |n| {
                    run(n as f64 * dt, t_stop).map(|s| s.final_loss())
                })?;
                Ok(CellOutcome { loss, delay: steps as f64 * dt, refined: false })
            };
            match control::protocol_params_exp(k1, k2, kappa_i) {
                Ok(p) => {
                    let delay = p.delay.max(dt);
                    let t_end = stop.unwrap_or(EXP_HORIZON.max(delay + 1.0));
                    let closed = CellOutcome { loss: run(delay, t_end)?.final_loss(), delay, refined: false };
                    match stop {
                        // recapture unfinished at the stop time: compare with the best grid delay
                        Some(t_stop) if delay + p.t1 >= t_stop => {
                            let scan = least_loss(t_stop)?;
                            Ok(if scan.loss < closed.loss { scan } else { closed })
                        }
                        _ => Ok(closed),
                    }
                }
                Err(Error::Infeasible(_)) => match stop {
                    None => {
                        let t1 = analytic::exp_t1(k1);
                        let delay = EXP_HORIZON;
                        let s = run(delay, delay + t1 + 1.0)?;
                        Ok(CellOutcome { loss: s.final_loss(), delay, refined: false })
                    }
                    Some(t_stop) => least_loss(t_stop),
                },
                Err(e) => Err(e),
            }
        }
        PulseKind::Tabulated => Err(Error::InvalidArgument(
            "loss landscapes are defined for the square and exp_decay pulses".into(),
        )),
    }
}

/// Computes the two-pass loss landscape. `config` provides the sweep step
/// `dt` and the intrinsic loss `κ_i`; horizons and delays are chosen per cell.
pub fn loss_grid(pulse: PulseKind, grid: &GridSpec, config: &SimConfig) -> Result<LossGrid> {
    loss_grid_with_threads(pulse, grid, config, thread_count())
}

/// [`loss_grid`] on a pool of exactly `threads` workers.
pub fn loss_grid_with_threads(
    pulse: PulseKind,
    grid: &GridSpec,
    config: &SimConfig,
    threads: usize,
) -> Result<LossGrid> {
    let k1 = grid.kappa1.values()?;
    let k2 = grid.kappa2.values()?;
    let dt = config.dt();
    let kappa_i = config.kappa_i();
    let cells: Vec<(usize, usize)> = (0..k1.len()).flat_map(|i| (0..k2.len()).map(move |j| (i, j))).collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    let outcomes: Vec<Result<CellOutcome>> = pool.install(|| {
        cells.par_iter().map(|&(i, j)| evaluate_cell(pulse, k1[i], k2[j], dt, kappa_i)).collect()
    });

    let mut loss = vec![vec![f64::NAN; k2.len()]; k1.len()];
    let mut delay = vec![vec![f64::NAN; k2.len()]; k1.len()];
    let mut failures = Vec::new();
    for (&(i, j), out) in cells.iter().zip(outcomes) {
        match out {
            Ok(c) => {
                loss[i][j] = c.loss;
                delay[i][j] = c.delay;
            }
            Err(e) => failures.push(CellFailure { i, j, message: e.to_string() }),
        }
    }
    let delay_policy = match pulse {
        PulseKind::Square => "square: smallest reflectionless grid delay, else least-loss delay",
        _ if kappa_i > 0.0 => {
            "exp: closed-form delay if recapture ends before T2, else least-loss delay at T2"
        }
        _ => "exp: closed-form delay, else recycle after 40/gamma",
    };
    let meta = GridMeta { pulse, dt, refine_dt: REFINE_DT, kappa_i, delay_policy: delay_policy.to_string() };
    let mut out = LossGrid::from_losses(k1, k2, loss, meta);
    out.delay = delay;
    out.failures = failures;
    Ok(out)
}

/// One point of the perfect-capture boundary.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub kappa1: f64,
    /// Smallest κ2 with loss below the threshold; `None` if the column never
    /// gets there.
    pub kappa2: Option<f64>,
}

/// For every κ1 column, the first κ2 at which the loss drops below
/// `threshold`, linearly interpolated between the straddling cells.
pub fn boundary_extract(grid: &LossGrid, threshold: f64) -> Result<Vec<BoundaryPoint>> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::InvalidArgument(format!("threshold must lie in (0, 1), got {threshold}")));
    }
    let k2 = &grid.kappa2_axis;
    Ok(grid
        .kappa1_axis
        .iter()
        .zip(&grid.loss)
        .map(|(&kappa1, row)| {
            let kappa2 = row.iter().position(|&l| l < threshold).map(|j| {
                if j == 0 {
                    return k2[0];
                }
                let (l0, l1) = (row[j - 1], row[j]);
                if !l0.is_finite() || l0 == l1 {
                    return k2[j];
                }
                let f = (l0 - threshold) / (l0 - l1);
                k2[j - 1] + f * (k2[j] - k2[j - 1])
            });
            BoundaryPoint { kappa1, kappa2 }
        })
        .collect())
}
