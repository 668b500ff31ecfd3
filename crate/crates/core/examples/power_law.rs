//! Small-phi minimum control times of the su(3) targets A and C with a
//! power-law fit. Reduced seeds keep it to about a minute.
//!
//! ```bash
//! cargo run --release --example power_law
//! ```

use unitary_qsl::grape::fit::power_law_fit;
use unitary_qsl::grape::sweep::{mct_sweep, SweepOptions};
use unitary_qsl::grape::Method;
use unitary_qsl::models::{PhaseControlModel, TargetFamily, TargetSpec};
use unitary_qsl::short_time::target_mct_bound;

fn main() -> unitary_qsl::Result<()> {
    let m = PhaseControlModel::su3(1.0)?;
    for label in ["A", "C"] {
        let mut points = Vec::new();
        for phi in [0.05, 0.1, 0.2, 0.4] {
            let bound = target_mct_bound(&m, &TargetFamily::named(label), phi)?.expect("depth <= 2");
            let mut opts = SweepOptions::new(3.0 * bound, bound / 40.0);
            opts.n_seeds = 3;
            opts.optimize.method = Method::Lbfgs;
            let v = m.target(&TargetSpec::named(label, phi))?;
            if let Some(t) = mct_sweep(&m, &v, &opts)?.t_min {
                println!("{label} phi {phi:.2}: t_min {t:.4} (bound {bound:.4})");
                points.push((phi, t));
            }
        }
        let fit = power_law_fit(&points)?;
        println!("{label}: t_min ~ {:.3} phi^{:.3}, 1/a = {:?}, R^2 = {:?}\n", fit.b, fit.a, fit.inverse_power, fit.r2);
    }
    Ok(())
}
