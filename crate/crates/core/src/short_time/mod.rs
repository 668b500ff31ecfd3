//! Short-time expansion of the propagator and the control-time bounds it
//! implies for elements at depth 0, 1 and 2 of the dynamical Lie algebra.
//!
//! Time is dimensionless throughout (`s = Omega t`), with `h(s) = H/Omega`.

pub mod series;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lie::{generate_algebra, AlgebraReport, Provenance, DEFAULT_TOL};
use crate::models::{PhaseControlModel, TargetFamily};
use crate::ops::{
    commutator, expm_hermitian, hs_inner, hs_norm, unitary_spectrum, CMatrix, HermitianGenerator,
    UnitaryOperator, I,
};

pub use series::MAX_ORDER;

/// How the Taylor coefficients of a drive were produced.
#[derive(Clone, Debug)]
pub enum FieldForm {
    /// `h(s) = sum_n h_n s^n` exactly.
    General,
    /// `h(s) = E (cos alpha(s) chi_a + sin alpha(s) chi_b)` with polynomial
    /// `alpha(s) = sum_n alpha_n s^n`.
    PhaseControl {
        e: f64,
        alpha: Vec<f64>,
        chi_a: HermitianGenerator,
        chi_b: HermitianGenerator,
    },
}

/// A drive `h(s)` together with its Taylor coefficients `h_0..h_order`.
#[derive(Clone, Debug)]
pub struct TaylorDrive {
    coefficients: Vec<HermitianGenerator>,
    form: FieldForm,
}

/// Taylor coefficients of `exp(i alpha(s))` up to `s^order`.
fn phase_series(alpha: &[f64], order: usize) -> Vec<Complex64> {
    let a0 = alpha.first().copied().unwrap_or(0.0);
    let g = |k: usize| Complex64::new(0.0, alpha.get(k).copied().unwrap_or(0.0));
    // e = exp(g) with g_0 = 0: n e_n = sum_k k g_k e_{n-k}
    let mut e = vec![Complex64::new(1.0, 0.0)];
    for n in 1..=order {
        let acc: Complex64 = (1..=n).map(|k| g(k) * k as f64 * e[n - k]).sum();
        e.push(acc / n as f64);
    }
    let p = Complex64::from_polar(1.0, a0);
    e.into_iter().map(|x| x * p).collect()
}

impl TaylorDrive {
    /// Polynomial drive with the given coefficients.
    pub fn general(coefficients: Vec<HermitianGenerator>) -> Result<Self> {
        let first = coefficients
            .first()
            .ok_or_else(|| Error::InvalidArgument("drive needs at least h_0".into()))?;
        let d = first.dim();
        if let Some(bad) = coefficients.iter().find(|h| h.dim() != d) {
            return Err(Error::DimensionMismatch { left: d, right: bad.dim() });
        }
        Ok(Self { coefficients, form: FieldForm::General })
    }

    /// Phase-control drive on orthonormal `chi_a`, `chi_b`, expanded to `s^order`.
    pub fn phase_control(
        e: f64,
        alpha: Vec<f64>,
        chi_a: HermitianGenerator,
        chi_b: HermitianGenerator,
        order: usize,
    ) -> Result<Self> {
        if !(e > 0.0) || alpha.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidArgument("phase drive needs E > 0 and finite alpha".into()));
        }
        if chi_a.dim() != chi_b.dim() {
            return Err(Error::DimensionMismatch { left: chi_a.dim(), right: chi_b.dim() });
        }
        let coefficients = phase_series(&alpha, order)
            .into_iter()
            .map(|c| chi_a.lin_comb(e * c.re, &chi_b, e * c.im))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { coefficients, form: FieldForm::PhaseControl { e, alpha, chi_a, chi_b } })
    }

    /// Phase-control drive of a model, with `chi` the normalized generators.
    pub fn for_model(model: &PhaseControlModel, alpha: Vec<f64>, order: usize) -> Result<Self> {
        let (a, b) = model.generators();
        Self::phase_control(model.drive_amplitude(), alpha, a.normalized(), b.normalized(), order)
    }

    pub fn coefficients(&self) -> &[HermitianGenerator] {
        &self.coefficients
    }

    pub fn order(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn form(&self) -> &FieldForm {
        &self.form
    }

    pub fn dim(&self) -> usize {
        self.coefficients[0].dim()
    }

    /// `(eps_a_n, eps_b_n)` for `n = 0..=order`, phase-control drives only.
    pub fn phase_coefficients(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        match &self.form {
            FieldForm::PhaseControl { e, alpha, .. } => {
                let c = phase_series(alpha, self.order());
                Some((c.iter().map(|x| e * x.re).collect(), c.iter().map(|x| e * x.im).collect()))
            }
            FieldForm::General => None,
        }
    }

    /// `h(s)`.
    pub fn at(&self, s: f64) -> HermitianGenerator {
        match &self.form {
            FieldForm::General => {
                let mut m = CMatrix::zeros(self.dim(), self.dim());
                for h in self.coefficients.iter().rev() {
                    m = m * Complex64::new(s, 0.0) + h.matrix();
                }
                HermitianGenerator::from_trusted(m)
            }
            FieldForm::PhaseControl { e, alpha, chi_a, chi_b } => {
                let a: f64 = alpha.iter().rev().fold(0.0, |acc, c| acc * s + c);
                chi_a.lin_comb(e * a.cos(), chi_b, e * a.sin()).expect("same dimension")
            }
        }
    }

    /// `U(s)` from `n_steps` steps of the fourth-order two-point Gauss
    /// Magnus integrator.
    pub fn propagate(&self, s: f64, n_steps: usize) -> UnitaryOperator {
        let n = n_steps.max(1);
        let h = s / n as f64;
        let off = 3f64.sqrt() / 6.0;
        let k2 = 3f64.sqrt() * h * h / 12.0;
        let mut u = UnitaryOperator::identity(self.dim());
        for k in 0..n {
            let t0 = k as f64 * h;
            let h1 = self.at(t0 + (0.5 - off) * h);
            let h2 = self.at(t0 + (0.5 + off) * h);
            // exp(-i K), K = (h/2)(H1 + H2) - i (sqrt3 h^2/12) [H2, H1]
            let c = commutator(h2.matrix(), h1.matrix()).expect("same dimension");
            let kmat = (h1.matrix() + h2.matrix()) * Complex64::new(h / 2.0, 0.0) - c * (I * k2);
            let step = expm_hermitian(&HermitianGenerator::from_trusted(kmat), 1.0);
            u = step.compose(&u).expect("same dimension");
        }
        u
    }
}

/// `A_1..A_N` of `U(s) = exp(-i sum_n A_n s^n)`.
#[derive(Clone, Debug)]
pub struct GeneratorExpansion {
    terms: Vec<HermitianGenerator>,
}

impl GeneratorExpansion {
    /// `A_1..A_N`, index 0 holding `A_1`.
    pub fn terms(&self) -> &[HermitianGenerator] {
        &self.terms
    }

    pub fn order(&self) -> usize {
        self.terms.len()
    }

    /// `a_n^mu = tr(chi_mu A_n)` for an orthonormal basis; row `n - 1`
    /// holds `A_n`.
    pub fn component_table(&self, basis: &[HermitianGenerator]) -> Result<Vec<Vec<f64>>> {
        self.terms
            .iter()
            .map(|a| basis.iter().map(|b| Ok(hs_inner(b.matrix(), a.matrix())?.re)).collect())
            .collect()
    }

    /// Truncated `A(s)`.
    pub fn generator_at(&self, s: f64) -> HermitianGenerator {
        let d = self.terms[0].dim();
        let mut m = CMatrix::zeros(d, d);
        for a in self.terms.iter().rev() {
            m = (m + a.matrix()) * Complex64::new(s, 0.0);
        }
        HermitianGenerator::from_trusted(m)
    }

    /// `exp(-i A(s))` with the truncated generator.
    pub fn unitary_at(&self, s: f64) -> UnitaryOperator {
        expm_hermitian(&self.generator_at(s), 1.0)
    }
}

/// Solves for `A_1..A_order` (`order <= 5`) from the drive's coefficients.
pub fn generator_expansion(drive: &TaylorDrive, order: usize) -> Result<GeneratorExpansion> {
    if order == 0 || order > MAX_ORDER {
        return Err(Error::InvalidArgument(format!("expansion order must be in 1..={MAX_ORDER}")));
    }
    if drive.order() + 1 < order {
        return Err(Error::InsufficientOrder { have: drive.order(), need: order - 1 });
    }
    let h: Vec<CMatrix> = drive.coefficients[..order].iter().map(|x| x.matrix().clone()).collect();
    let terms = series::generator_terms(order)
        .iter()
        .map(|e| {
            if e.is_zero() {
                return Ok(HermitianGenerator::zeros(drive.dim()));
            }
            HermitianGenerator::new(e.evaluate(&h))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GeneratorExpansion { terms })
}

/// Principal `A` with `U = exp(-i A)`.
pub fn log_unitary(u: &UnitaryOperator) -> Result<HermitianGenerator> {
    let sp = unitary_spectrum(u)?;
    let d = u.dim();
    let mut diag = CMatrix::zeros(d, d);
    for (k, p) in sp.phases.iter().enumerate() {
        diag[(k, k)] = Complex64::new(-p, 0.0);
    }
    let a = &sp.vectors * diag * sp.vectors.adjoint();
    Ok(HermitianGenerator::from_trusted((&a + a.adjoint()) * Complex64::new(0.5, 0.0)))
}

/// Result of a log-log fit of the truncation residual.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum SlopeEstimate {
    Fitted(f64),
    /// Residual at rounding level over the whole grid.
    Exact,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrderAccuracy {
    /// `(s, ||U(s) - exp(-i A_N(s))||)` pairs.
    pub residuals: Vec<(f64, f64)>,
    pub slope: SlopeEstimate,
}

/// Residuals below this are treated as rounding noise.
pub const RESIDUAL_FLOOR: f64 = 1e-11;
const REFERENCE_STEPS: usize = 100;

/// Least-squares slope of `ln y` against `ln x`.
pub(crate) fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(x, y) in points {
        let (lx, ly) = (x.ln(), y.ln());
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// Compares `exp(-i sum_{n<=N} A_n s^n)` with the propagated `U(s)` on
/// `s_grid` and fits the power of the residual.
pub fn order_accuracy_check(drive: &TaylorDrive, order: usize, s_grid: &[f64]) -> Result<OrderAccuracy> {
    if let Some(s) = s_grid.iter().find(|s| !(**s > 0.0 && **s <= 0.3)) {
        return Err(Error::InvalidArgument(format!("s = {s} outside (0, 0.3]")));
    }
    let exp = generator_expansion(drive, order)?;
    let residuals: Vec<(f64, f64)> = s_grid
        .iter()
        .map(|&s| {
            let exact = drive.propagate(s, REFERENCE_STEPS);
            (s, hs_norm(&(exact.matrix() - exp.unitary_at(s).matrix())))
        })
        .collect();
    let usable: Vec<_> = residuals.iter().copied().filter(|&(_, r)| r > RESIDUAL_FLOOR).collect();
    let slope = if usable.len() < 3 {
        SlopeEstimate::Exact
    } else {
        SlopeEstimate::Fitted(log_log_slope(&usable))
    };
    Ok(OrderAccuracy { residuals, slope })
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must be positive, got {x}")))
    }
}

/// Depth 0: `s_A >= beta/E`.
pub fn bound_s_a(beta: f64, e: f64) -> Result<f64> {
    positive("beta", beta)?;
    positive("E", e)?;
    Ok(beta / e)
}

/// Depth 1: `s_C >= sqrt(12 beta/(f_ABC E^2))`.
pub fn bound_s_c(beta: f64, f_abc: f64, e: f64) -> Result<f64> {
    positive("beta", beta)?;
    positive("f_ABC", f_abc)?;
    positive("E", e)?;
    Ok((12.0 * beta / (f_abc * e * e)).sqrt())
}

/// Depth 2: `s_D >= (18 beta/(f_ABC eta f_ACD E^3))^(1/3)`; `eta` defaults to 1.
pub fn bound_s_d(beta: f64, f_abc: f64, f_acd: f64, e: f64, eta: Option<f64>) -> Result<f64> {
    positive("beta", beta)?;
    positive("f_ABC", f_abc)?;
    positive("f_ACD", f_acd)?;
    positive("E", e)?;
    let eta = eta.unwrap_or(1.0);
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::InvalidArgument(format!("eta must lie in (0, 1], got {eta}")));
    }
    Ok((18.0 * beta / (f_abc * eta * f_acd * e.powi(3))).cbrt())
}

/// Constants entering the short-time bounds of a two-generator phase drive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ShortTimeConstants {
    pub e: f64,
    pub f_abc: f64,
    /// Absent when `[chi_A, chi_C]` adds nothing new to the algebra.
    pub f_acd: Option<f64>,
    pub eta_d: Option<f64>,
}

impl ShortTimeConstants {
    /// Reads `f_ABC`, `f_ACD` and `eta_D` off an algebra generated from the
    /// model's two normalized generators.
    pub fn from_report(model: &PhaseControlModel, report: &AlgebraReport) -> Result<Self> {
        let find = |l: usize, r: usize| {
            report.basis.iter().position(|e| {
                matches!(e.provenance, Provenance::Commutator { left, right, .. }
                    if (left, right) == (l, r) || (left, right) == (r, l))
            })
        };
        let c = find(0, 1).ok_or_else(|| {
            Error::InvalidArgument("algebra has no depth-1 element [chi_A, chi_B]".into())
        })?;
        let f_abc = report.structure_constant(0, 1, c).abs();
        let d = find(0, c).map(|k| &report.basis[k]);
        Ok(Self {
            e: model.drive_amplitude(),
            f_abc,
            f_acd: d.map(|x| x.raw_norm),
            eta_d: d.map(|x| x.overlap.abs()),
        })
    }

    pub fn for_model(model: &PhaseControlModel) -> Result<Self> {
        let (a, b) = model.generators();
        let report = generate_algebra(&[a.normalized(), b.normalized()], DEFAULT_TOL)?;
        Self::from_report(model, &report)
    }
}

/// `beta = ||X|| phi`, the coefficient of the target along its normalized
/// direction.
pub fn target_beta(model: &PhaseControlModel, family: &TargetFamily, phi: f64) -> Result<f64> {
    Ok(model.target_generator(family)?.norm() * phi)
}

/// `(T_x, T_z)` for `V_n(phi) = exp(-i sigma_n phi/2)`, in units of `1/Omega`
/// scaled by the model's `Omega`.
pub fn su2_mct_bounds(model: &PhaseControlModel, phi: f64) -> Result<(f64, f64)> {
    let k = ShortTimeConstants::for_model(model)?;
    let bx = target_beta(model, &TargetFamily::named("x"), phi)?;
    let bz = target_beta(model, &TargetFamily::named("z"), phi)?;
    let om = model.omega();
    Ok((bound_s_a(bx, k.e)? / om, bound_s_c(bz, k.f_abc, k.e)? / om))
}

/// `(T_A, T_C, T_D)` for `V_X(phi) = exp(-i lambda_X phi)`.
pub fn su3_mct_bounds(model: &PhaseControlModel, phi: f64, report: &AlgebraReport) -> Result<(f64, f64, f64)> {
    let k = ShortTimeConstants::from_report(model, report)?;
    let (f_acd, eta) = k
        .f_acd
        .zip(k.eta_d)
        .ok_or_else(|| Error::InvalidArgument("algebra has no depth-2 element [chi_A, chi_C]".into()))?;
    let om = model.omega();
    let beta = |x: &str| target_beta(model, &TargetFamily::named(x), phi);
    Ok((
        bound_s_a(beta("A")?, k.e)? / om,
        bound_s_c(beta("C")?, k.f_abc, k.e)? / om,
        bound_s_d(beta("D")?, k.f_abc, f_acd, k.e, Some(eta))? / om,
    ))
}

/// Short-time bound for a target reached at algebra depth 0, 1 or 2.
pub fn depth_bound(k: &ShortTimeConstants, depth: usize, beta: f64) -> Result<f64> {
    match depth {
        0 => bound_s_a(beta, k.e),
        1 => bound_s_c(beta, k.f_abc, k.e),
        2 => {
            let f_acd = k.f_acd.ok_or_else(|| Error::InvalidArgument("no depth-2 constant".into()))?;
            bound_s_d(beta, k.f_abc, f_acd, k.e, k.eta_d)
        }
        _ => Err(Error::InvalidArgument(format!("no short-time bound for depth {depth}"))),
    }
}

/// Short-time bound on the control time of `V(phi)`, using the lowest
/// algebra depth whose span contains the target generator. `None` beyond
/// depth 2.
pub fn target_mct_bound(model: &PhaseControlModel, family: &TargetFamily, phi: f64) -> Result<Option<f64>> {
    let (a, b) = model.generators();
    let report = generate_algebra(&[a.normalized(), b.normalized()], DEFAULT_TOL)?;
    let x = model.target_generator(family)?.normalized();
    let max_depth = report.basis.iter().map(|e| e.depth).max().unwrap_or(0);
    let mut weight = 0.0;
    let mut depth = None;
    for k in 0..=max_depth {
        for e in report.basis.iter().filter(|e| e.depth == k) {
            weight += hs_inner(e.element.matrix(), x.matrix())?.norm_sqr();
        }
        if weight > 1.0 - 1e-9 {
            depth = Some(k);
            break;
        }
    }
    match depth {
        Some(k) if k <= 2 => {
            let consts = ShortTimeConstants::from_report(model, &report)?;
            let beta = target_beta(model, family, phi)?;
            Ok(Some(depth_bound(&consts, k, beta)? / model.omega()))
        }
        _ => Ok(None),
    }
}

/// `F(eps)` evaluated at `s` from `eps_mu^(0..=2)`.
pub fn f_epsilon(eps_a: &[f64], eps_b: &[f64], s: f64) -> Result<f64> {
    if eps_a.len() < 3 || eps_b.len() < 3 {
        return Err(Error::InsufficientOrder { have: eps_a.len().min(eps_b.len()).saturating_sub(1), need: 2 });
    }
    let (a, b) = (eps_a, eps_b);
    let s2 = s * s;
    Ok(a[0] * (0.5 * a[1] * b[1] * s2 - a[0] * b[2] * s2 / 3.0)
        - b[0] * (0.5 * a[1] * a[1] * s2 - a[0] * a[2] * s2 / 3.0))
}

/// `|F(eps)| <= (20/3) E^3` at every `s` of the grid.
pub fn f_epsilon_bound_check(drive: &TaylorDrive, s_grid: &[f64]) -> Result<bool> {
    let FieldForm::PhaseControl { e, .. } = drive.form() else {
        return Err(Error::InvalidArgument("F(eps) is defined for phase-control drives".into()));
    };
    let (a, b) = drive
        .phase_coefficients()
        .expect("phase-control drive");
    let cap = 20.0 / 3.0 * e.powi(3);
    for &s in s_grid {
        if f_epsilon(&a, &b, s)?.abs() > cap {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `a_D(s) = (f_ABC f_ACD/120) F(eps) s^3` as it follows from `F`.
pub fn a_d_estimate(k: &ShortTimeConstants, drive: &TaylorDrive, s: f64) -> Result<f64> {
    let f_acd = k.f_acd.ok_or_else(|| Error::InvalidArgument("no depth-2 constant".into()))?;
    let (a, b) = drive
        .phase_coefficients()
        .ok_or_else(|| Error::InvalidArgument("a_D estimate needs a phase-control drive".into()))?;
    Ok(k.f_abc * f_acd / 120.0 * f_epsilon(&a, &b, s)? * s.powi(3))
}

/// Random cubic phase `alpha(s)` with coefficients uniform in `[-c, c]`.
pub fn random_cubic_phase(rng: &mut impl Rng, c: f64) -> Vec<f64> {
    (0..4).map(|_| rng.gen_range(-c..=c)).collect()
}

/// `chi_D`, the depth-2 element of `[chi_A, chi_C]`, orthonormalized; and
/// `chi_C`.
pub fn depth_directions(report: &AlgebraReport) -> Option<(HermitianGenerator, HermitianGenerator)> {
    let find = |l: usize, r: usize| {
        report.basis.iter().find(|e| {
            matches!(e.provenance, Provenance::Commutator { left, right, .. }
                if (left, right) == (l, r) || (left, right) == (r, l))
        })
    };
    let c_idx = report.basis.iter().position(|e| {
        matches!(e.provenance, Provenance::Commutator { left: 0, right: 1, .. })
    })?;
    let d = find(0, c_idx)?;
    Some((report.basis[c_idx].element.clone(), d.element.clone()))
}
