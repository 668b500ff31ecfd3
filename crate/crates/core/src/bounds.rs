//! Geometric speed-limit times for unitary targets and the spin-J
//! classical-limit formulas.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metrics::{s1_distance, s2_distance};
use crate::models::{PhaseControlModel, TargetFamily, TargetSpec};
use crate::ops::UnitaryOperator;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QslReport {
    pub s1: f64,
    pub s2: f64,
    pub tau1: f64,
    pub tau2: f64,
    pub tau_unified: f64,
}

/// `tau1 = S1(V, I)/delta_eps_bar`, `tau2 = (sqrt(d)/2) S2(V, I)/hnorm_bar`.
pub fn qsl_times(v: &UnitaryOperator, delta_eps_bar: f64, hnorm_bar: f64) -> Result<QslReport> {
    if !(delta_eps_bar > 0.0) || !(hnorm_bar > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "speed ceilings must be positive (got {delta_eps_bar}, {hnorm_bar})"
        )));
    }
    let id = UnitaryOperator::identity(v.dim());
    let s1 = s1_distance(&id, v)?;
    let s2 = s2_distance(&id, v)?;
    let tau1 = s1 / delta_eps_bar;
    let tau2 = (v.dim() as f64).sqrt() / 2.0 * s2 / hnorm_bar;
    Ok(QslReport { s1, s2, tau1, tau2, tau_unified: tau1.max(tau2) })
}

/// QSL times of a model's target, using the model's own speed ceilings.
pub fn model_qsl(model: &PhaseControlModel, target: &UnitaryOperator) -> Result<QslReport> {
    let (de, hn) = model.speed_ceilings();
    qsl_times(target, de, hn)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QslRow {
    pub phi: f64,
    #[serde(flatten)]
    pub report: QslReport,
}

/// QSL times along `V(phi)` for every `phi` in the grid.
pub fn qsl_curve(model: &PhaseControlModel, family: &TargetFamily, phis: &[f64]) -> Result<Vec<QslRow>> {
    phis.iter()
        .map(|&phi| {
            let v = model.target(&TargetSpec { family: family.clone(), phi })?;
            Ok(QslRow { phi, report: model_qsl(model, &v)? })
        })
        .collect()
}

/// Smallest time compatible with the speed limits for any `U` whose
/// infidelity with `target` is at most `threshold`.
///
/// `J <= thr` bounds `S2(U, V) <= 2 asin(sqrt thr)` and, through the worst
/// eigenphase spread compatible with `|tr W|/d = sqrt(1 - J)`, also
/// `S1(U, V) <= 2 acos(1 - (d/2)(1 - sqrt(1 - thr)))`. The triangle
/// inequality then lowers each QSL time by the corresponding reach.
pub fn reachable_qsl_floor(report: &QslReport, dim: usize, delta_eps_bar: f64, hnorm_bar: f64, threshold: f64) -> f64 {
    let thr = threshold.clamp(0.0, 1.0);
    let d = dim as f64;
    let reach2 = 2.0 * thr.sqrt().asin();
    let c = 1.0 - d / 2.0 * (1.0 - (1.0 - thr).sqrt());
    let reach1 = 2.0 * c.clamp(-1.0, 1.0).acos();
    let t1 = (report.s1 - reach1).max(0.0) / delta_eps_bar;
    let t2 = d.sqrt() / 2.0 * (report.s2 - reach2).max(0.0) / hnorm_bar;
    t1.max(t2)
}

/// `S2(V_n(phi), I)` in the spin-J representation,
/// `2 acos |sin((J+1/2) phi) / ((2J+1) sin(phi/2))|`.
pub fn spinj_distance(j: f64, phi: f64) -> Result<f64> {
    crate::models::validate_spin(j)?;
    let d = 2.0 * j + 1.0;
    let half = (phi / 2.0).sin();
    let ratio = if half.abs() < 1e-8 {
        // sin(d x)/(d sin x) = 1 - (d^2 - 1) x^2/6 + O(x^4), x = phi/2
        let x = phi / 2.0;
        1.0 - (d * d - 1.0) * x * x / 6.0
    } else {
        ((j + 0.5) * phi).sin() / (d * half)
    };
    Ok(2.0 * ratio.abs().clamp(0.0, 1.0).acos())
}

/// `||H|| / Omega = sqrt(J(J+1)(2J+1)/3)`.
pub fn spinj_hnorm(j: f64) -> Result<f64> {
    crate::models::validate_spin(j)?;
    Ok((j * (j + 1.0) * (2.0 * j + 1.0) / 3.0).sqrt())
}

/// Smallest rotation angle giving a target orthogonal to the identity,
/// `pi/(J + 1/2)`.
pub fn spinj_phi_perp(j: f64) -> Result<f64> {
    crate::models::validate_spin(j)?;
    Ok(PI / (j + 0.5))
}

/// `tau2` for the spin-J target `exp(-i J_n phi)` at Rabi frequency `omega`.
pub fn spinj_tau2(j: f64, phi: f64, omega: f64) -> Result<f64> {
    let d = 2.0 * j + 1.0;
    Ok(d.sqrt() / 2.0 * spinj_distance(j, phi)? / (omega * spinj_hnorm(j)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ClassicalRow {
    #[serde(rename = "J")]
    pub j: f64,
    pub phi_perp: f64,
    pub tau2: f64,
}

/// `tau2` at `phi_perp(J)` for an ascending list of spins; fails unless the
/// times strictly decrease.
pub fn classical_limit_table(js: &[f64], omega: f64) -> Result<Vec<ClassicalRow>> {
    let rows = js
        .iter()
        .map(|&j| {
            let phi_perp = spinj_phi_perp(j)?;
            Ok(ClassicalRow { j, phi_perp, tau2: spinj_tau2(j, phi_perp, omega)? })
        })
        .collect::<Result<Vec<_>>>()?;
    for w in rows.windows(2) {
        if !(w[1].j > w[0].j) {
            return Err(Error::InvalidArgument("J list must be ascending".into()));
        }
        if !(w[1].tau2 < w[0].tau2) {
            return Err(Error::InvariantViolation(format!(
                "tau2 does not decrease between J = {} and J = {}",
                w[0].j, w[1].j
            )));
        }
    }
    Ok(rows)
}
