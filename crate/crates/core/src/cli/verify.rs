//! Property suites run by `verify`, each at a size that finishes in seconds.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bounds::{classical_limit_table, model_qsl};
use crate::error::Result;
use crate::grape::{field_infidelity, gradient, infidelity};
use crate::lie::{generate_algebra, DEFAULT_TOL};
use crate::metrics::{oracle, s1_distance, s2_distance, state_speed_limit, unitary_speed_limits};
use crate::models::{ControlField, PhaseControlModel, TargetSpec};
use crate::ops::random;
use crate::short_time::{
    order_accuracy_check, random_cubic_phase, su2_mct_bounds, SlopeEstimate, TaylorDrive, MAX_ORDER,
};

#[derive(Clone, Debug, Serialize)]
pub struct PropertyOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Check = fn(&mut ChaCha8Rng) -> Result<(bool, String)>;

fn models() -> Vec<PhaseControlModel> {
    vec![
        PhaseControlModel::su2(1.0).expect("valid"),
        PhaseControlModel::su3(1.0).expect("valid"),
        PhaseControlModel::spin_j(1.5, 1.0).expect("valid"),
    ]
}

fn random_field(rng: &mut ChaCha8Rng, n: usize, t_max: f64) -> Result<ControlField> {
    let t = rng.gen_range(0.1..t_max);
    ControlField::new(t, (0..n).map(|_| rng.gen_range(-PI..PI)).collect())
}

fn su2_qsl_closed_form(_: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let om = 1.3;
    let m = PhaseControlModel::su2(om)?;
    let mut worst: f64 = 0.0;
    for label in ["x", "y", "z"] {
        for phi in [0.1, 0.5, 1.0, PI] {
            let q = model_qsl(&m, &m.target(&TargetSpec::named(label, phi))?)?;
            worst = worst.max((q.tau_unified - phi / om).abs());
        }
    }
    Ok((worst <= 1e-12, format!("max |tau - phi/omega| = {worst:.2e}")))
}

fn su2_metric_equivalence(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let u = random::haar_unitary(2, rng);
        let v = random::haar_unitary(2, rng);
        worst = worst.max((s1_distance(&u, &v)? - s2_distance(&u, &v)?).abs());
    }
    Ok((worst <= 1e-10, format!("max |S1 - S2| = {worst:.2e} over 1000 pairs")))
}

fn su3_s1_oracle(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let u = random::haar_unitary(3, rng);
        let v = random::haar_unitary(3, rng);
        let b = oracle::s1_bruteforce(&u, &v, 10_000, rng)?;
        worst = worst.max((s1_distance(&u, &v)? - b).abs());
    }
    Ok((worst <= 1e-3, format!("max deviation {worst:.2e} over 10 pairs")))
}

fn infidelity_identity(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for d in [2, 3, 4] {
        for _ in 0..50 {
            let u = random::haar_unitary(d, rng);
            let v = random::haar_unitary(d, rng);
            let j = infidelity(&u, &v)?;
            let c = (s2_distance(&u, &v)? / 2.0).cos();
            worst = worst.max((j - (1.0 - c * c)).abs());
            if !(0.0..=1.0).contains(&j) {
                return Ok((false, format!("J = {j} outside [0, 1]")));
            }
        }
    }
    Ok((worst <= 1e-12, format!("max |J - sin^2(S2/2)| = {worst:.2e}")))
}

fn gradient_fd(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let h = 1e-6;
    let mut worst: f64 = 0.0;
    for m in models() {
        for _ in 0..20 {
            let v = random::haar_unitary(m.dim(), rng);
            let field = random_field(rng, 12, 4.0)?;
            let (_, g) = gradient(&m, &field, &v)?;
            let scale = g.iter().fold(1e-8, |a: f64, x| a.max(x.abs()));
            for k in 0..g.len() {
                let mut plus = field.clone();
                let mut minus = field.clone();
                plus.values[k] += h;
                minus.values[k] -= h;
                let fd = (field_infidelity(&m, &plus, &v) - field_infidelity(&m, &minus, &v)) / (2.0 * h);
                worst = worst.max((fd - g[k]).abs() / scale);
            }
        }
    }
    Ok((worst <= 1e-5, format!("max relative deviation {worst:.2e} on 60 configurations")))
}

fn controllability(_: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let mut details = Vec::new();
    let mut ok = true;
    for (m, dim) in models().into_iter().zip([3, 8, 3]) {
        let (a, b) = m.generators();
        let r = generate_algebra(&[a.normalized(), b.normalized()], DEFAULT_TOL)?;
        ok &= r.dimension == dim;
        details.push(format!("{}: {}", m.label(), r.dimension));
    }
    Ok((ok, details.join(", ")))
}

fn expansion_order(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let m = PhaseControlModel::su3(1.0)?;
    let grid: Vec<f64> = (0..12).map(|k| 0.01 * 20f64.powf(k as f64 / 11.0)).collect();
    let mut worst = f64::INFINITY;
    for _ in 0..3 {
        let d = TaylorDrive::for_model(&m, random_cubic_phase(rng, 2.0), MAX_ORDER)?;
        for n in 1..=MAX_ORDER {
            let excess = match order_accuracy_check(&d, n, &grid)?.slope {
                SlopeEstimate::Fitted(k) => k - (n + 1) as f64,
                SlopeEstimate::Exact => f64::INFINITY,
            };
            worst = worst.min(excess);
        }
    }
    Ok((worst >= -0.15, format!("min slope - (N+1) = {worst:.3}")))
}

fn speed_limits(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let mut margin = f64::INFINITY;
    for m in models() {
        for _ in 0..100 {
            let steps = m.steps(&random_field(rng, 8, 6.0)?);
            let psi = random::state(m.dim(), rng);
            let s = state_speed_limit(&steps, &psi)?;
            let (u1, u2) = unitary_speed_limits(&steps)?;
            for c in [s, u1, u2] {
                margin = margin.min(c.bound - c.distance);
            }
        }
    }
    Ok((margin >= -1e-9, format!("min bound - distance = {margin:.2e}")))
}

fn classical_limit(_: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let js: Vec<f64> = (1..=100).map(|k| k as f64 / 2.0).collect();
    let t = classical_limit_table(&js, 1.0)?;
    let ratio = t[t.len() - 1].tau2 / t[0].tau2;
    Ok((ratio < 0.1, format!("tau(50)/tau(1/2) = {ratio:.4}")))
}

fn su2_bound_chain(_: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let om = 0.8;
    let m = PhaseControlModel::su2(om)?;
    let mut worst: f64 = 0.0;
    for phi in [0.1, 0.5, 1.0, PI] {
        let (tx, tz) = su2_mct_bounds(&m, phi)?;
        worst = worst.max((tx - phi / om).abs()).max((tz - (12.0 * phi).sqrt() / om).abs());
    }
    Ok((worst <= 1e-12, format!("max deviation {worst:.2e}")))
}

const SUITES: [(&str, Check); 10] = [
    ("su2_qsl_closed_form", su2_qsl_closed_form),
    ("su2_metric_equivalence", su2_metric_equivalence),
    ("su3_s1_oracle", su3_s1_oracle),
    ("infidelity_identity", infidelity_identity),
    ("gradient_finite_difference", gradient_fd),
    ("controllability", controllability),
    ("expansion_order", expansion_order),
    ("speed_limit_inequalities", speed_limits),
    ("classical_limit", classical_limit),
    ("su2_bound_chain", su2_bound_chain),
];

/// Runs every suite; suite `k` draws from stream `k` of `seed`.
pub fn run_properties(seed: u64) -> Vec<PropertyOutcome> {
    SUITES
        .iter()
        .enumerate()
        .map(|(k, (name, check))| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            match check(&mut rng) {
                Ok((passed, detail)) => PropertyOutcome { name, passed, detail },
                Err(e) => PropertyOutcome { name, passed: false, detail: format!("error: {e}") },
            }
        })
        .collect()
}
