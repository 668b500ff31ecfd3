//! Distance covered by a random piecewise-constant drive against the
//! integrated speed that bounds it.
//!
//! ```bash
//! cargo run --example speed_limit_check
//! ```

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use unitary_qsl::metrics::{state_speed_limit, unitary_speed_limits};
use unitary_qsl::models::{ControlField, PhaseControlModel};
use unitary_qsl::ops::random;

fn main() -> unitary_qsl::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for m in [PhaseControlModel::su2(1.0)?, PhaseControlModel::su3(1.0)?, PhaseControlModel::spin_j(2.0, 1.0)?] {
        let field = ControlField::new(2.0, (0..10).map(|_| rng.gen_range(-PI..PI)).collect())?;
        let steps = m.steps(&field);
        let st = state_speed_limit(&steps, &random::state(m.dim(), &mut rng))?;
        let (u1, u2) = unitary_speed_limits(&steps)?;
        println!("{}:", m.label());
        println!("  state  {:.4} <= {:.4}", st.distance, st.bound);
        println!("  S1     {:.4} <= {:.4}", u1.distance, u1.bound);
        println!("  S2     {:.4} <= {:.4}", u2.distance, u2.bound);
    }
    Ok(())
}
