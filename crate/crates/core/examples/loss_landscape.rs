//! Two-pass loss landscape over `(κ1,max, κ2,max)`.
//!
//! Sweeps a coarse grid, writes the heatmap CSV to standard output and prints
//! the perfect-capture boundary next to the closed-form minimum `κ2,max`.
//! Pass `exp` as the first argument for the exponential pulse.
//!
//! ```bash
//! cargo run --release --example loss_landscape > square.csv
//! cargo run --release --example loss_landscape exp > exp.csv
//! ```

use photon_recycler::pulse::PulseKind;
use photon_recycler::sweep::{self, AxisSpec, GridSpec, Spacing, PERFECT_LOSS, SWEEP_DT};
use photon_recycler::{analytic, io, SimConfig};

fn main() -> photon_recycler::Result<()> {
    let kind = match std::env::args().nth(1).as_deref() {
        Some("exp") => PulseKind::ExpDecay,
        _ => PulseKind::Square,
    };
    let spec = GridSpec::square(AxisSpec { min: 0.2, max: 6.0, points: 16, spacing: Spacing::Log });
    let grid = sweep::loss_grid(kind, &spec, &SimConfig::new(SWEEP_DT, 1.0)?)?;
    io::write_heatmap_csv(std::io::stdout().lock(), &grid)?;

    eprintln!("{:>8}  {:>10}  {:>10}", "kappa1", "boundary", "closed");
    for p in sweep::boundary_extract(&grid, PERFECT_LOSS)? {
        let closed = match kind {
            PulseKind::Square => analytic::square_metrics(p.kappa1)?.kappa2_min,
            _ => 1.0 / analytic::exp_eff_infinity(p.kappa1),
        };
        let found = p.kappa2.map_or("-".to_string(), |k| format!("{k:.4}"));
        eprintln!("{:>8.4}  {found:>10}  {closed:>10.4}", p.kappa1);
    }
    Ok(())
}
