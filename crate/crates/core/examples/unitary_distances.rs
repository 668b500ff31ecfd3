//! The two operator distances on random gates: equal in SU(2), ordered in
//! SU(3), and the closed form against a brute-force search over states.
//!
//! ```bash
//! cargo run --release --example unitary_distances
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use unitary_qsl::grape::infidelity;
use unitary_qsl::metrics::{oracle, s1_distance, s2_distance};
use unitary_qsl::ops::random;

fn main() -> unitary_qsl::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for d in [2, 3] {
        for _ in 0..3 {
            let u = random::haar_unitary(d, &mut rng);
            let v = random::haar_unitary(d, &mut rng);
            let s1 = s1_distance(&u, &v)?;
            let brute = oracle::s1_bruteforce(&u, &v, 10_000, &mut rng)?;
            println!(
                "d={d}: S1 {s1:.6} (search {brute:.6})  S2 {:.6}  J {:.4}",
                s2_distance(&u, &v)?,
                infidelity(&u, &v)?
            );
        }
    }
    Ok(())
}
