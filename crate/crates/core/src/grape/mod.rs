//! Gate-infidelity minimization over piecewise-constant phase fields.

pub mod fit;
mod kernel;
pub mod sweep;

use std::collections::VecDeque;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{ControlField, PhaseControlModel};
use crate::ops::{CMatrix, UnitaryOperator};

pub use fit::{power_law_fit, PowerLawFit};
pub use sweep::{mct_sweep, SweepOptions, SweepResult};

/// `J = 1 - |tr(V^dag U)|^2 / d^2`, clipped to `[0, 1]`.
pub fn infidelity(u: &UnitaryOperator, v: &UnitaryOperator) -> Result<f64> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch { left: u.dim(), right: v.dim() });
    }
    let g = trace_overlap(v.matrix(), u.matrix());
    Ok(infidelity_from_overlap(g, u.dim()))
}

fn trace_overlap(v: &CMatrix, u: &CMatrix) -> Complex64 {
    // tr(V^dag U) = sum_ij conj(V_ij) U_ij
    v.iter().zip(u.iter()).map(|(a, b)| a.conj() * b).sum()
}

fn infidelity_from_overlap(g: Complex64, d: usize) -> f64 {
    (1.0 - g.norm_sqr() / (d * d) as f64).clamp(0.0, 1.0)
}

/// Infidelity of the field's propagator against `v`.
pub fn field_infidelity(model: &PhaseControlModel, field: &ControlField, v: &UnitaryOperator) -> f64 {
    let g = kernel::overlap(model, v, &field.values, field.dt());
    infidelity_from_overlap(g, model.dim())
}

/// `(J, dJ/dalpha_k)` from forward and backward propagator caches and the
/// exact derivative of every step exponential.
pub fn gradient(model: &PhaseControlModel, field: &ControlField, v: &UnitaryOperator) -> Result<(f64, Vec<f64>)> {
    field.validate()?;
    if v.dim() != model.dim() {
        return Err(Error::DimensionMismatch { left: model.dim(), right: v.dim() });
    }
    let d = model.dim();
    let (g, dg) = kernel::overlap_gradient(model, v, &field.values, field.dt());
    let scale = -2.0 / (d * d) as f64;
    Ok((infidelity_from_overlap(g, d), dg.iter().map(|x| scale * (g.conj() * x).re).collect()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Steepest descent with backtracking (Armijo) line search.
    #[default]
    GradientDescent,
    /// Limited-memory BFGS with the same line search.
    Lbfgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizeOptions {
    pub target_infidelity: f64,
    pub grad_tol: f64,
    pub max_iters: usize,
    pub method: Method,
    /// Stop when `J` fell by less than `stall_rel * J` over the last
    /// `stall_window` iterations; `0` disables.
    pub stall_window: usize,
    pub stall_rel: f64,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self {
            target_infidelity: 1e-6,
            grad_tol: 1e-10,
            max_iters: 5000,
            method: Method::GradientDescent,
            stall_window: 200,
            stall_rel: 1e-4,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Target,
    SmallGradient,
    MaxIters,
    Stalled,
    LineSearch,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptimizationResult {
    pub final_infidelity: f64,
    pub field: ControlField,
    pub iterations: usize,
    pub converged: bool,
    pub stop: StopReason,
}

const ARMIJO_C: f64 = 1e-4;
const LBFGS_MEMORY: usize = 8;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Random field with `alpha_k` uniform on `[-pi, pi)`.
pub fn random_field(total_time: f64, n_steps: usize, rng: &mut impl Rng) -> Result<ControlField> {
    ControlField::new(total_time, (0..n_steps).map(|_| rng.gen_range(-PI..PI)).collect())
}

/// Optimizes from a random field drawn with `seed`.
pub fn optimize(
    model: &PhaseControlModel,
    v: &UnitaryOperator,
    total_time: f64,
    n_steps: usize,
    seed: u64,
    opts: &OptimizeOptions,
) -> Result<OptimizationResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let field = random_field(total_time, n_steps, &mut rng)?;
    optimize_from(model, v, field, opts)
}

/// Optimizes starting from `field`.
pub fn optimize_from(
    model: &PhaseControlModel,
    v: &UnitaryOperator,
    field: ControlField,
    opts: &OptimizeOptions,
) -> Result<OptimizationResult> {
    optimize_with(model, v, field, opts, |_, _| {})
}

/// As [`optimize_from`], calling `observe(iteration, J)` after every
/// accepted step.
pub fn optimize_with(
    model: &PhaseControlModel,
    v: &UnitaryOperator,
    mut field: ControlField,
    opts: &OptimizeOptions,
    mut observe: impl FnMut(usize, f64),
) -> Result<OptimizationResult> {
    if !(field.total_time > 0.0) {
        return Err(Error::InvalidArgument("total time must be positive".into()));
    }
    let (mut j, mut g) = gradient(model, &field, v)?;
    let mut history: VecDeque<f64> = VecDeque::new();
    let mut memory: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new();
    let mut step_len = 1.0;
    let mut iterations = 0;
    let stop = loop {
        if j <= opts.target_infidelity {
            break StopReason::Target;
        }
        let gnorm = dot(&g, &g).sqrt();
        if gnorm <= opts.grad_tol {
            break StopReason::SmallGradient;
        }
        if iterations >= opts.max_iters {
            break StopReason::MaxIters;
        }
        if opts.stall_window > 0 {
            if history.len() == opts.stall_window {
                let old = history.pop_front().expect("full window");
                if old - j < opts.stall_rel * j {
                    break StopReason::Stalled;
                }
            }
            history.push_back(j);
        }

        let mut dir = match opts.method {
            Method::GradientDescent => g.iter().map(|x| -x).collect::<Vec<_>>(),
            Method::Lbfgs => lbfgs_direction(&g, &memory),
        };
        let mut slope = dot(&g, &dir);
        if slope >= 0.0 {
            memory.clear();
            dir = g.iter().map(|x| -x).collect();
            slope = -gnorm * gnorm;
        }
        let mut t = match opts.method {
            Method::GradientDescent => step_len,
            Method::Lbfgs if memory.is_empty() => (1.0 / gnorm).min(1.0),
            Method::Lbfgs => 1.0,
        };
        let accepted = loop {
            let trial: Vec<f64> = field.values.iter().zip(&dir).map(|(a, p)| a + t * p).collect();
            let trial_field = ControlField { values: trial, ..field.clone() };
            let jt = field_infidelity(model, &trial_field, v);
            if jt <= j + ARMIJO_C * t * slope {
                break Some((trial_field, t));
            }
            t *= 0.5;
            if t < 1e-16 {
                break None;
            }
        };
        let Some((new_field, t)) = accepted else {
            break StopReason::LineSearch;
        };
        let (jn, gn) = gradient(model, &new_field, v)?;
        if opts.method == Method::Lbfgs {
            let s: Vec<f64> = dir.iter().map(|p| t * p).collect();
            let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
            let sy = dot(&s, &y);
            if sy > 1e-12 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() {
                if memory.len() == LBFGS_MEMORY {
                    memory.pop_front();
                }
                memory.push_back((s, y, 1.0 / sy));
            }
        }
        // let the next steepest-descent trial grow again
        step_len = (t * 2.0).min(1e6);
        field = new_field;
        j = jn;
        g = gn;
        iterations += 1;
        observe(iterations, j);
    };
    Ok(OptimizationResult {
        final_infidelity: j,
        converged: j <= opts.target_infidelity,
        field,
        iterations,
        stop,
    })
}

fn lbfgs_direction(g: &[f64], memory: &VecDeque<(Vec<f64>, Vec<f64>, f64)>) -> Vec<f64> {
    let mut q = g.to_vec();
    let mut alphas = Vec::with_capacity(memory.len());
    for (s, y, rho) in memory.iter().rev() {
        let a = rho * dot(s, &q);
        q.iter_mut().zip(y).for_each(|(qi, yi)| *qi -= a * yi);
        alphas.push(a);
    }
    if let Some((s, y, _)) = memory.back() {
        let gamma = dot(s, y) / dot(y, y);
        q.iter_mut().for_each(|x| *x *= gamma);
    }
    for ((s, y, rho), a) in memory.iter().zip(alphas.iter().rev()) {
        let b = rho * dot(y, &q);
        q.iter_mut().zip(s).for_each(|(qi, si)| *qi += (a - b) * si);
    }
    q.iter_mut().for_each(|x| *x = -*x);
    q
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_PI_2;

    use super::*;
    use crate::metrics::s2_distance;
    use crate::models::{TargetFamily, TargetSpec};
    use crate::ops::{pauli, random};

    fn fd_check(model: &PhaseControlModel, v: &UnitaryOperator, field: &ControlField) -> f64 {
        let (_, g) = gradient(model, field, v).unwrap();
        let h = 1e-6;
        let gmax = g.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let mut worst = 0.0f64;
        for k in 0..g.len() {
            let mut p = field.clone();
            p.values[k] += h;
            let mut m = field.clone();
            m.values[k] -= h;
            let fd = (field_infidelity(model, &p, v) - field_infidelity(model, &m, v)) / (2.0 * h);
            worst = worst.max((fd - g[k]).abs() / gmax.max(1e-3));
        }
        worst
    }

    #[test]
    fn infidelity_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let v = random::haar_unitary(3, &mut rng);
        assert!(infidelity(&v, &v).unwrap() < 1e-15);
        let sx = pauli()[0].clone();
        let mx = crate::ops::expm_hermitian(&sx, FRAC_PI_2); // -i sigma_x
        assert!((infidelity(&UnitaryOperator::identity(2), &mx).unwrap() - 1.0).abs() < 1e-15);
        for _ in 0..20 {
            let u = random::haar_unitary(3, &mut rng);
            let s2 = s2_distance(&u, &v).unwrap();
            let j = infidelity(&u, &v).unwrap();
            assert!((j - (1.0 - (s2 / 2.0).cos().powi(2))).abs() < 1e-12);
        }
        assert!(infidelity(&UnitaryOperator::identity(2), &v).is_err());
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let models = [
            PhaseControlModel::su2(1.0).unwrap(),
            PhaseControlModel::su3(1.3).unwrap(),
            PhaseControlModel::spin_j(1.5, 0.8).unwrap(),
        ];
        for m in &models {
            for _ in 0..5 {
                let v = random::haar_unitary(m.dim(), &mut rng);
                let field = random_field(rng.gen_range(0.5..4.0), 12, &mut rng).unwrap();
                let dev = fd_check(m, &v, &field);
                assert!(dev < 1e-5, "{:?}: {dev}", m.label());
            }
        }
    }

    #[test]
    fn stationary_at_analytic_optimum() {
        let m = PhaseControlModel::su2(1.0).unwrap();
        let phi = 1.2;
        let v = m.target(&TargetSpec { family: TargetFamily::named("x"), phi }).unwrap();
        let field = ControlField::constant(phi, 30, 0.0).unwrap();
        let (j, g) = gradient(&m, &field, &v).unwrap();
        assert!(j < 1e-12, "{j}");
        assert!(dot(&g, &g).sqrt() < 1e-8);
    }

    #[test]
    fn reaches_x_rotation() {
        let m = PhaseControlModel::su2(1.0).unwrap();
        let v = m.target(&TargetSpec::named("x", FRAC_PI_2)).unwrap();
        let opts = OptimizeOptions { target_infidelity: 1e-10, ..Default::default() };
        let f = ControlField::constant(FRAC_PI_2, 30, 0.05).unwrap();
        let r = optimize_from(&m, &v, f, &opts).unwrap();
        assert!(r.final_infidelity <= 1e-10, "{r:?}");
        let r = optimize_from(&m, &v, ControlField::constant(FRAC_PI_2, 30, 0.0).unwrap(), &opts).unwrap();
        assert!(r.final_infidelity <= 1e-10 && r.iterations == 0);
    }

    #[test]
    fn z_rotation_below_bound_fails() {
        let m = PhaseControlModel::su2(1.0).unwrap();
        let v = m.target(&TargetSpec::named("z", FRAC_PI_2)).unwrap();
        for method in [Method::GradientDescent, Method::Lbfgs] {
            let opts = OptimizeOptions { method, ..Default::default() };
            let r = optimize(&m, &v, 0.5, 30, 9, &opts).unwrap();
            assert!(!r.converged && r.final_infidelity > 1e-3, "{r:?}");
        }
    }

    #[test]
    fn deterministic_and_bounded() {
        let m = PhaseControlModel::su3(1.0).unwrap();
        let v = m.target(&TargetSpec::named("C", 0.8)).unwrap();
        for method in [Method::GradientDescent, Method::Lbfgs] {
            let opts = OptimizeOptions { method, max_iters: 300, ..Default::default() };
            let run = || {
                let mut seen = Vec::new();
                let mut rng = ChaCha8Rng::seed_from_u64(17);
                let f = random_field(5.0, 30, &mut rng).unwrap();
                let r = optimize_with(&m, &v, f, &opts, |_, j| seen.push(j)).unwrap();
                (r, seen)
            };
            let (a, seen) = run();
            let (b, _) = run();
            assert_eq!(a, b);
            assert!(seen.iter().all(|j| (0.0..=1.0).contains(j)));
            assert!(seen.windows(2).all(|w| w[1] <= w[0]));
        }
    }
}
