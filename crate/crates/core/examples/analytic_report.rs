//! Everything the closed forms say about one parameter point, as JSON.
//!
//! ```bash
//! cargo run --release --example analytic_report
//! ```

use photon_recycler::pulse::PulseKind;
use photon_recycler::{analytic, io};

fn main() -> photon_recycler::Result<()> {
    let out = std::io::stdout().lock();
    let reports = vec![
        analytic::report(PulseKind::Square, 4.0, 1.2, 0.0, None)?,
        analytic::report(PulseKind::ExpDecay, 3.0, 3.0, 0.0, Some(2.0))?,
        analytic::report(PulseKind::ExpDecay, 3.0, 3.0, 1e-3, None)?,
    ];
    io::write_json(out, &reports)
}
