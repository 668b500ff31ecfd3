//! Minimum control time of qubit rotations by continuation in T: x-rotations
//! saturate the speed limit, z-rotations do not.
//!
//! ```bash
//! cargo run --release --example mct_sweep
//! ```

use std::f64::consts::PI;

use unitary_qsl::grape::sweep::{mct_sweep, SweepOptions};
use unitary_qsl::grape::Method;
use unitary_qsl::models::{PhaseControlModel, TargetSpec};
use unitary_qsl::short_time::su2_mct_bounds;

fn main() -> unitary_qsl::Result<()> {
    let m = PhaseControlModel::su2(1.0)?;
    for (label, phi) in [("x", PI / 2.0), ("z", 0.5)] {
        let v = m.target(&TargetSpec::named(label, phi))?;
        let (tx, tz) = su2_mct_bounds(&m, phi)?;
        let mut opts = SweepOptions::new(1.5 * tx.max(tz), 0.05);
        opts.n_seeds = 6;
        opts.optimize.method = Method::Lbfgs;
        let r = mct_sweep(&m, &v, &opts)?;
        println!(
            "V_{label}({phi:.3}): t_min {:?}, tau {:.3}, short-time bound {:.3}",
            r.t_min,
            r.qsl.tau_unified,
            if label == "x" { tx } else { tz }
        );
        for p in r.grid.iter().step_by(4) {
            println!("  T {:6.3}  best J {:.2e}", p.t, p.best_j);
        }
    }
    Ok(())
}
