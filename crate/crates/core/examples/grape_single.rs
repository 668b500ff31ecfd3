//! One GRAPE optimization at fixed T, above and below the minimum time of a
//! qubit z-rotation.
//!
//! ```bash
//! cargo run --release --example grape_single
//! ```

use std::f64::consts::FRAC_PI_2;

use unitary_qsl::grape::{optimize, Method, OptimizeOptions};
use unitary_qsl::models::{PhaseControlModel, TargetSpec};
use unitary_qsl::short_time::su2_mct_bounds;

fn main() -> unitary_qsl::Result<()> {
    let m = PhaseControlModel::su2(1.0)?;
    let v = m.target(&TargetSpec::named("z", FRAC_PI_2))?;
    let (_, tz) = su2_mct_bounds(&m, FRAC_PI_2)?;
    let opts = OptimizeOptions { method: Method::Lbfgs, ..Default::default() };
    for t in [0.5 * tz, 1.2 * tz] {
        let best = (0..5)
            .map(|seed| optimize(&m, &v, t, 30, seed, &opts))
            .collect::<unitary_qsl::Result<Vec<_>>>()?
            .into_iter()
            .min_by(|a, b| a.final_infidelity.total_cmp(&b.final_infidelity))
            .expect("five runs");
        println!(
            "T = {t:.3} (T_z = {tz:.3}): J = {:.3e} after {} iterations, stop {:?}",
            best.final_infidelity, best.iterations, best.stop
        );
    }
    Ok(())
}
