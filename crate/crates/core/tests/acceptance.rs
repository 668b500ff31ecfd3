//! Acceptance criteria 1-14. Runs as a plain binary so every criterion
//! prints its PASS/FAIL line. A criterion that errors always fails the run;
//! a FAIL verdict does so only with `--strict` or `ACCEPTANCE_STRICT=1`.
//!
//! `cargo test --release --test acceptance -- 7 9` runs a subset.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, UnitSphere};

use unitary_qsl::bounds::{classical_limit_table, model_qsl, spinj_distance, spinj_phi_perp};
use unitary_qsl::grape::fit::power_law_fit;
use unitary_qsl::grape::sweep::{default_t_hi, mct_sweep, SweepOptions, SweepResult};
use unitary_qsl::grape::Method;
use unitary_qsl::lie::{
    su3_labeled_basis, gell_mann_coefficients, generate_algebra, reference_direction, reference_directions,
    lambda_e_opposite_sign, su3_control_pair, SU3_LABELS, DEFAULT_TOL,
};
use unitary_qsl::metrics::{oracle, s1_distance, s2_distance, state_speed_limit, unitary_speed_limits};
use unitary_qsl::models::{ControlField, PhaseControlModel, TargetFamily, TargetSpec};
use unitary_qsl::ops::{hs_inner, random};
use unitary_qsl::short_time::{
    order_accuracy_check, random_cubic_phase, su2_mct_bounds, target_beta, target_mct_bound, ShortTimeConstants,
    SlopeEstimate, TaylorDrive, MAX_ORDER,
};

type Outcome = Result<(bool, String), String>;

/// Every sweep run here, for the consistency criterion.
struct Recorded {
    label: String,
    result: SweepResult,
}

#[derive(Default)]
struct Ctx {
    sweeps: Vec<Recorded>,
}

const SEEDS: usize = 20;
const N_TS: usize = 30;

fn e<E: std::fmt::Display>(x: E) -> String {
    x.to_string()
}

impl Ctx {
    fn sweep(&mut self, model: &PhaseControlModel, label: &str, phi: f64, t_hi: f64, t_step: f64) -> Result<SweepResult, String> {
        let v = model.target(&TargetSpec::named(label, phi)).map_err(e)?;
        let mut opts = SweepOptions::new(t_hi, t_step);
        opts.n_seeds = SEEDS;
        opts.n_ts = N_TS;
        opts.optimize.method = Method::Lbfgs;
        let t0 = Instant::now();
        let r = mct_sweep(model, &v, &opts).map_err(e)?;
        println!(
            "    sweep {}({phi:.4}) t_hi {t_hi:.4} step {t_step:.4}: t_min {} by threshold {:?} [{:.0}s]",
            label,
            fmt_opt(r.t_min),
            r.t_min_by_threshold.iter().map(|x| x.t_min.map(|t| (t * 1e4).round() / 1e4)).collect::<Vec<_>>(),
            t0.elapsed().as_secs_f64()
        );
        self.sweeps.push(Recorded { label: format!("{}({phi:.4})", label), result: r.clone() });
        Ok(r)
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or("none".into(), |t| format!("{t:.4}"))
}

fn c1_su2_closed_form(_: &mut Ctx) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut axes: Vec<[f64; 3]> = vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    axes.extend((0..50).map(|_| UnitSphere.sample(&mut rng)));
    let mut worst: f64 = 0.0;
    for omega in [1.0, 0.37, 2.5] {
        let m = PhaseControlModel::su2(omega).map_err(e)?;
        for n in &axes {
            for phi in [0.1, 0.5, 1.0, PI] {
                let v = m.target(&TargetSpec { family: TargetFamily::Axis(*n), phi }).map_err(e)?;
                let q = model_qsl(&m, &v).map_err(e)?;
                worst = worst.max((q.tau_unified - phi / omega).abs());
            }
        }
    }
    Ok((worst <= 1e-12, format!("max |tau - phi/Omega| = {worst:.2e} over {} axes, 3 Omegas", axes.len())))
}

fn c2_metric_equivalence(_: &mut Ctx) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let u = random::haar_unitary(2, &mut rng);
        let v = random::haar_unitary(2, &mut rng);
        worst = worst.max((s1_distance(&u, &v).map_err(e)? - s2_distance(&u, &v).map_err(e)?).abs());
    }
    Ok((worst <= 1e-10, format!("max |S1 - S2| = {worst:.2e} on 10^4 pairs")))
}

fn c3_s1_oracle(_: &mut Ctx) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let u = random::haar_unitary(3, &mut rng);
        let v = random::haar_unitary(3, &mut rng);
        let b = oracle::s1_bruteforce(&u, &v, 10_000, &mut rng).map_err(e)?;
        worst = worst.max((s1_distance(&u, &v).map_err(e)? - b).abs());
    }
    Ok((worst <= 1e-3, format!("max |S1 - oracle| = {worst:.2e} on 200 pairs")))
}

fn max_dev(a: &[f64; 8], b: &[f64; 8], sign: f64) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - sign * y).abs()).fold(0.0, f64::max)
}

fn c4_controllability(_: &mut Ctx) -> Outcome {
    let (la, lb) = su3_control_pair();
    let report = generate_algebra(&[la, lb], DEFAULT_TOL).map_err(e)?;
    let mut depths = report.depths();
    depths.sort();
    let shape_ok = report.dimension == 8 && report.fully_controllable && depths == [0, 0, 1, 2, 2, 3, 3, 3];

    // closed-form directions against the evaluated nested commutators, up to sign
    let basis = su3_labeled_basis().map_err(e)?;
    let mut worst: f64 = 0.0;
    for (k, (_, p)) in reference_directions().iter().enumerate() {
        let got = gell_mann_coefficients(&basis[k + 2]);
        worst = worst.max(max_dev(&got, p, 1.0).min(max_dev(&got, p, -1.0)));
    }
    // and each one lies at its listed depth of the generated algebra
    let listed = [1, 2, 2, 3, 3, 3];
    let mut depth_ok = true;
    for (label, want) in SU3_LABELS[2..].iter().zip(listed) {
        let x = reference_direction(*label).expect("listed").normalized();
        let weight = |max_depth: usize| -> f64 {
            report
                .basis
                .iter()
                .filter(|b| b.depth <= max_depth)
                .map(|b| hs_inner(b.element.matrix(), x.matrix()).map(|c| c.norm_sqr()).unwrap_or(0.0))
                .sum()
        };
        depth_ok &= (weight(want) - 1.0).abs() < 1e-9 && weight(want - 1) < 1.0 - 1e-9;
    }
    let e_got = gell_mann_coefficients(&basis[4]);
    let e_dev = max_dev(&e_got, &lambda_e_opposite_sign(), 1.0)
        .min(max_dev(&e_got, &lambda_e_opposite_sign(), -1.0));
    Ok((
        shape_ok && depth_ok && worst <= 1e-9,
        format!(
            "dim {}, controllable {}, depths {depths:?}, max direction deviation {worst:.2e}, depths match {depth_ok} (lambda_E with the opposite lambda_5 sign deviates by {e_dev:.3})",
            report.dimension, report.fully_controllable
        ),
    ))
}

fn c5_expansion_order(_: &mut Ctx) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let grid: Vec<f64> = (0..12).map(|k| 0.01 * 20f64.powf(k as f64 / 11.0)).collect();
    let models = [PhaseControlModel::su2(1.0).map_err(e)?, PhaseControlModel::su3(1.0).map_err(e)?];
    let mut min_excess = [f64::INFINITY; MAX_ORDER];
    let mut exact = 0;
    for k in 0..20 {
        let m = &models[k % 2];
        let d = TaylorDrive::for_model(m, random_cubic_phase(&mut rng, 2.0), MAX_ORDER).map_err(e)?;
        for n in 1..=MAX_ORDER {
            match order_accuracy_check(&d, n, &grid).map_err(e)?.slope {
                SlopeEstimate::Fitted(s) => min_excess[n - 1] = min_excess[n - 1].min(s - (n + 1) as f64),
                SlopeEstimate::Exact => exact += 1,
            }
        }
    }
    let ok = min_excess.iter().all(|&x| x >= -0.15);
    let shown: Vec<String> = min_excess.iter().map(|x| format!("{x:+.3}")).collect();
    Ok((ok, format!("min slope - (N+1) for N = 1..5: [{}] over 20 drives ({exact} exact)", shown.join(", "))))
}

fn c6_su2_bound_chain(_: &mut Ctx) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut consts_ok = true;
    for omega in [1.0, 0.6, 3.0] {
        let m = PhaseControlModel::su2(omega).map_err(e)?;
        let k = ShortTimeConstants::for_model(&m).map_err(e)?;
        consts_ok &= (k.f_abc - SQRT_2).abs() < 1e-12 && (k.e - FRAC_1_SQRT_2).abs() < 1e-12;
        for phi in [0.1, 0.5, 1.0, PI / 2.0, PI] {
            for axis in ["x", "z"] {
                let beta = target_beta(&m, &TargetFamily::named(axis), phi).map_err(e)?;
                consts_ok &= (beta - phi / SQRT_2).abs() < 1e-12;
            }
            let (tx, tz) = su2_mct_bounds(&m, phi).map_err(e)?;
            worst = worst.max((tx - phi / omega).abs()).max((tz - (12.0 * phi).sqrt() / omega).abs());
        }
    }
    Ok((worst <= 1e-12 && consts_ok, format!("constants derived: {consts_ok}, max deviation {worst:.2e}")))
}

fn c7_x_saturation(ctx: &mut Ctx) -> Outcome {
    let m = PhaseControlModel::su2(1.0).map_err(e)?;
    let step = 0.05;
    let mut ok = true;
    let mut parts = Vec::new();
    for phi in [PI / 4.0, PI / 2.0, 3.0 * PI / 4.0, PI] {
        let v = m.target(&TargetSpec::named("x", phi)).map_err(e)?;
        let t_hi = default_t_hi(&m, &v).map_err(e)?;
        let r = ctx.sweep(&m, "x", phi, t_hi, step)?;
        let hit = r.t_min.is_some_and(|t| (t - phi).abs() <= step + 1e-9);
        ok &= hit;
        parts.push(format!("phi {phi:.4}: t_min {}", fmt_opt(r.t_min)));
    }
    Ok((ok, parts.join("; ")))
}

fn c8_z_gap(ctx: &mut Ctx) -> Outcome {
    let m = PhaseControlModel::su2(1.0).map_err(e)?;
    let step = 0.05;
    let mut ok = true;
    let mut parts = Vec::new();
    let mut tz_02 = None;
    for phi in [0.2, 0.5, 1.0] {
        let (_, bound) = su2_mct_bounds(&m, phi).map_err(e)?;
        let r = ctx.sweep(&m, "z", phi, 1.5 * bound, step)?;
        let floor = r.qsl.tau_unified.max(0.9 * (12.0 * phi).sqrt());
        ok &= r.t_min.is_some_and(|t| t >= floor);
        parts.push(format!("phi {phi}: t_min {} >= {floor:.4}", fmt_opt(r.t_min)));
        if phi == 0.2 {
            tz_02 = r.t_min;
        }
    }
    let v = m.target(&TargetSpec::named("x", 0.2)).map_err(e)?;
    let rx = ctx.sweep(&m, "x", 0.2, default_t_hi(&m, &v).map_err(e)?, step)?;
    let gap = matches!((tz_02, rx.t_min), (Some(z), Some(x)) if z > 2.0 * x);
    ok &= gap;
    parts.push(format!("t_min(z, 0.2) > 2 t_min(x, 0.2) = 2 x {}: {gap}", fmt_opt(rx.t_min)));
    Ok((ok, parts.join("; ")))
}

fn c9_su3_power_laws(ctx: &mut Ctx) -> Outcome {
    let m = PhaseControlModel::su3(1.0).map_err(e)?;
    let phis = [0.05, 0.1, 0.2, 0.4];
    let labels = ["A", "C", "D"];
    let mut t = [[None; 4]; 3];
    for (i, label) in labels.iter().enumerate() {
        for (k, &phi) in phis.iter().enumerate() {
            let bound = target_mct_bound(&m, &TargetFamily::named(label), phi)
                .map_err(e)?
                .ok_or("no short-time bound")?;
            t[i][k] = ctx.sweep(&m, label, phi, 3.0 * bound, bound / 40.0)?.t_min;
        }
    }
    let mut ok = true;
    let mut parts = Vec::new();
    for k in 0..4 {
        let h = matches!((t[0][k], t[1][k], t[2][k]), (Some(a), Some(c), Some(d)) if a < c && c < d);
        ok &= h;
        if !h {
            parts.push(format!("hierarchy broken at phi {}", phis[k]));
        }
    }
    for (i, label) in labels.iter().enumerate() {
        let want = (i + 1) as f64;
        let pts: Vec<(f64, f64)> = phis.iter().zip(&t[i]).filter_map(|(&p, t)| t.map(|t| (p, t))).collect();
        if pts.len() < 4 {
            ok = false;
            parts.push(format!("{label}: only {} of 4 t_min values", pts.len()));
            continue;
        }
        let fit = power_law_fit(&pts).map_err(e)?;
        let inv = fit.inverse_power.unwrap_or(f64::NAN);
        let r2 = fit.r2.unwrap_or(0.0);
        let pass = (inv - want).abs() <= 0.15 * want && r2 >= 0.98;
        ok &= pass;
        parts.push(format!(
            "{label}: t_min {:?}, 1/a = {inv:.3} (want {want} +- 15%), R^2 = {r2:.4} {}",
            pts.iter().map(|p| (p.1 * 1e4).round() / 1e4).collect::<Vec<_>>(),
            if pass { "ok" } else { "out of range" }
        ));
    }
    Ok((ok, parts.join("; ")))
}

fn c10_crossover(ctx: &mut Ctx) -> Outcome {
    let m = PhaseControlModel::su3(1.0).map_err(e)?;
    let c = ctx.sweep(&m, "C", PI, 24.0, 0.25)?;
    let d = ctx.sweep(&m, "D", PI, 24.0, 0.25)?;
    let ok = matches!((d.t_min, c.t_min), (Some(d), Some(c)) if d < c);
    Ok((ok, format!("t_min(D(pi)) = {}, t_min(C(pi)) = {}", fmt_opt(d.t_min), fmt_opt(c.t_min))))
}

fn c11_qsl_consistency(ctx: &mut Ctx) -> Outcome {
    if ctx.sweeps.is_empty() {
        let m = PhaseControlModel::su2(1.0).map_err(e)?;
        ctx.sweep(&m, "x", PI / 2.0, 2.5, 0.05)?;
        ctx.sweep(&m, "z", 0.5, 3.7, 0.05)?;
    }
    let mut ok = true;
    let mut below_exact = Vec::new();
    for s in &ctx.sweeps {
        let r = &s.result;
        ok &= r.qsl_consistent;
        if let Some(t) = r.t_min {
            if t < r.qsl.tau_unified {
                below_exact.push(format!("{} t_min {t:.4} < tau {:.4} (floor {:.4})", s.label, r.qsl.tau_unified, r.qsl_floor));
            }
        }
    }
    Ok((
        ok,
        format!(
            "{} sweeps, all t_min >= threshold-adjusted QSL floor: {ok}; below exact-target tau: {}",
            ctx.sweeps.len(),
            if below_exact.is_empty() { "none".into() } else { below_exact.join(", ") }
        ),
    ))
}

/// Smallest-angle maximizer of `spinj_distance`: coarse grid, golden-section
/// refinement of every local maximum, first one reaching the global max.
fn grid_argmax(j: f64) -> Result<f64, String> {
    let n = 20_000;
    let h = PI / n as f64;
    let f = |p: f64| spinj_distance(j, p).unwrap_or(f64::NAN);
    let vals: Vec<f64> = (0..=n).map(|k| f(k as f64 * h)).collect();
    let mut peaks = Vec::new();
    for k in 1..=n {
        let left = vals[k - 1];
        let right = if k < n { vals[k + 1] } else { f64::NEG_INFINITY };
        if vals[k] >= left && vals[k] >= right {
            let (mut a, mut b) = ((k - 1) as f64 * h, ((k + 1) as f64 * h).min(PI));
            let g = (5f64.sqrt() - 1.0) / 2.0;
            for _ in 0..80 {
                let (x1, x2) = (b - g * (b - a), a + g * (b - a));
                if f(x1) < f(x2) {
                    a = x1;
                } else {
                    b = x2;
                }
            }
            let x = (a + b) / 2.0;
            peaks.push((x, f(x)));
        }
    }
    let best = peaks.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    peaks.iter().find(|p| p.1 >= best - 1e-9).map(|p| p.0).ok_or_else(|| "no peak".into())
}

fn c12_classical_limit(_: &mut Ctx) -> Outcome {
    let js: Vec<f64> = (1..=100).map(|k| k as f64 / 2.0).collect();
    let rows = classical_limit_table(&js, 1.0).map_err(e)?;
    let decreasing = rows.windows(2).all(|w| w[1].tau2 < w[0].tau2);
    let ratio = rows[rows.len() - 1].tau2 / rows[0].tau2;
    let mut worst: f64 = 0.0;
    for &j in &js {
        worst = worst.max((grid_argmax(j)? - spinj_phi_perp(j).map_err(e)?).abs());
    }
    Ok((
        decreasing && ratio < 0.1 && worst <= 1e-3,
        format!("strictly decreasing {decreasing}, tau(50)/tau(1/2) = {ratio:.4}, max |phi_perp - argmax| = {worst:.2e}"),
    ))
}

fn c13_threshold_insensitivity(ctx: &mut Ctx) -> Outcome {
    let m = PhaseControlModel::su2(1.0).map_err(e)?;
    let step = 0.05;
    let (_, bound) = su2_mct_bounds(&m, PI / 2.0).map_err(e)?;
    let r = ctx.sweep(&m, "z", PI / 2.0, 1.5 * bound, step)?;
    let at = |thr: f64| r.t_min_at(thr);
    let ok = match (at(1e-4), at(1e-5), at(1e-6)) {
        (Some(a), Some(b), Some(c)) => (a - b).abs() <= 2.0 * step + 1e-9 && (c - b).abs() <= 2.0 * step + 1e-9,
        _ => false,
    };
    Ok((ok, format!("t_min at 1e-4 / 1e-5 / 1e-6: {} / {} / {}", fmt_opt(at(1e-4)), fmt_opt(at(1e-5)), fmt_opt(at(1e-6)))))
}

fn c14_speed_limits(_: &mut Ctx) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let models = [
        PhaseControlModel::su2(1.0).map_err(e)?,
        PhaseControlModel::su3(1.0).map_err(e)?,
        PhaseControlModel::spin_j(1.0, 1.0).map_err(e)?,
        PhaseControlModel::spin_j(2.5, 1.0).map_err(e)?,
    ];
    let mut margins = Vec::new();
    for m in &models {
        let mut worst = [f64::INFINITY; 3];
        for _ in 0..1000 {
            let n = rng.gen_range(1..=30);
            let t = rng.gen_range(0.01..10.0);
            let field = ControlField::new(t, (0..n).map(|_| rng.gen_range(-PI..PI)).collect()).map_err(e)?;
            let steps = m.steps(&field);
            let st = state_speed_limit(&steps, &random::state(m.dim(), &mut rng)).map_err(e)?;
            let (u1, u2) = unitary_speed_limits(&steps).map_err(e)?;
            for (w, c) in worst.iter_mut().zip([st, u1, u2]) {
                *w = w.min(c.bound - c.distance);
            }
        }
        margins.push((m.label().to_string(), worst));
    }
    let ok = margins.iter().all(|(_, w)| w.iter().all(|&x| x >= -1e-9));
    let shown: Vec<String> = margins
        .iter()
        .map(|(l, w)| format!("{l} [{:.1e}, {:.1e}, {:.1e}]", w[0], w[1], w[2]))
        .collect();
    Ok((ok, format!("min bound - distance (state, S1, S2): {}", shown.join(", "))))
}

fn main() {
    let criteria: [(usize, &str, fn(&mut Ctx) -> Outcome); 14] = [
        (1, "SU(2) QSL closed form", c1_su2_closed_form),
        (2, "SU(2) metric equivalence", c2_metric_equivalence),
        (3, "S1 closed form vs oracle", c3_s1_oracle),
        (4, "controllability report", c4_controllability),
        (5, "expansion order", c5_expansion_order),
        (6, "SU(2) bound chain", c6_su2_bound_chain),
        (7, "MCT saturation for V_x", c7_x_saturation),
        (8, "z-rotation gap", c8_z_gap),
        (9, "SU(3) hierarchy and power laws", c9_su3_power_laws),
        (10, "large-phi crossover", c10_crossover),
        (14, "speed-limit inequalities", c14_speed_limits),
        (12, "classical limit", c12_classical_limit),
        (13, "threshold insensitivity", c13_threshold_insensitivity),
        (11, "QSL consistency of all sweeps", c11_qsl_consistency),
    ];
    let wanted: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut ctx = Ctx::default();
    let strict = std::env::args().any(|a| a == "--strict") || std::env::var_os("ACCEPTANCE_STRICT").is_some_and(|v| v == "1");
    let mut failed = Vec::new();
    let mut errored = Vec::new();
    for (id, name, f) in criteria {
        if !wanted.is_empty() && !wanted.contains(&id) {
            continue;
        }
        let t0 = Instant::now();
        let (passed, detail) = match f(&mut ctx) {
            Ok(x) => x,
            Err(msg) => {
                errored.push(id);
                (false, format!("error: {msg}"))
            }
        };
        println!(
            "criterion {id:>2} {}: {name}: {detail} [{:.1}s]",
            if passed { "PASS" } else { "FAIL" },
            t0.elapsed().as_secs_f64()
        );
        if !passed {
            failed.push(id);
        }
    }
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
    }
    if !errored.is_empty() || (strict && !failed.is_empty()) {
        std::process::exit(1);
    }
}
