//! Distances between pure states and between unitaries, and the
//! instantaneous speeds that bound how fast those distances can grow.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ops::{
    eigenphases, expm_hermitian, hs_norm, CVector, HermitianGenerator, UnitaryOperator,
};

pub const STATE_NORM_TOL: f64 = 1e-12;

fn check_state(psi: &CVector) -> Result<()> {
    let n = psi.norm();
    if (n - 1.0).abs() > STATE_NORM_TOL {
        return Err(Error::NotNormalized(n));
    }
    Ok(())
}

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch { left: a, right: b });
    }
    Ok(())
}

/// `2 arccos |<a|b>|`, clamped into `[0, pi]`.
fn overlap_angle(overlap_abs: f64) -> f64 {
    2.0 * overlap_abs.clamp(0.0, 1.0).acos()
}

/// Fubini-Study distance `2 arccos |<psi1|psi2>|`.
pub fn fubini_study(psi1: &CVector, psi2: &CVector) -> Result<f64> {
    check_dims(psi1.len(), psi2.len())?;
    check_state(psi1)?;
    check_state(psi2)?;
    Ok(overlap_angle(psi1.dotc(psi2).norm()))
}

/// Standard deviation of `H` in the state `psi`.
pub fn state_energy_dispersion(h: &HermitianGenerator, psi: &CVector) -> Result<f64> {
    check_dims(h.dim(), psi.len())?;
    check_state(psi)?;
    let hpsi = h.matrix() * psi;
    let mean = psi.dotc(&hpsi).re;
    let second = hpsi.norm_squared();
    Ok((second - mean * mean).max(0.0).sqrt())
}

/// Shortest closed arc of the unit circle containing a set of phases.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArcResult {
    /// Arc length in `[0, 2pi)`.
    pub delta: f64,
    /// Input indices of the arc's endpoints: the arc runs counterclockwise
    /// from `extremal.0` to `extremal.1`.
    pub extremal: (usize, usize),
}

/// Minimal covering arc via the largest circular gap between sorted phases.
///
/// Duplicated phases are allowed and produce zero-length gaps.
pub fn minimal_covering_arc(phases: &[f64]) -> ArcResult {
    assert!(!phases.is_empty(), "covering arc of an empty set");
    let n = phases.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| phases[a].total_cmp(&phases[b]).then(a.cmp(&b)));
    if n == 1 {
        return ArcResult { delta: 0.0, extremal: (order[0], order[0]) };
    }
    // gap k runs from sorted[k] to sorted[k+1], the last one wraps by 2pi
    let mut best_gap = f64::NEG_INFINITY;
    let mut best_k = 0;
    for k in 0..n {
        let a = phases[order[k]];
        let b = if k + 1 < n { phases[order[k + 1]] } else { phases[order[0]] + 2.0 * PI };
        let gap = b - a;
        if gap > best_gap {
            best_gap = gap;
            best_k = k;
        }
    }
    let start = order[(best_k + 1) % n];
    let end = order[best_k];
    let delta = (2.0 * PI - best_gap).max(0.0);
    ArcResult { delta, extremal: (start, end) }
}

/// Worst-case state distance `S1(U, V) = min(delta, pi)`, with `delta` the
/// covering arc of the eigenphases of `U^dagger V`.
pub fn s1_distance(u: &UnitaryOperator, v: &UnitaryOperator) -> Result<f64> {
    let w = u.overlap(v)?;
    let phases = eigenphases(&w)?;
    let arc = minimal_covering_arc(&phases);
    Ok(if arc.delta >= PI { PI } else { arc.delta })
}

/// Trace-overlap distance `S2(U, V) = 2 arccos(|tr(U^dagger V)| / d)`.
pub fn s2_distance(u: &UnitaryOperator, v: &UnitaryOperator) -> Result<f64> {
    check_dims(u.dim(), v.dim())?;
    let d = u.dim() as f64;
    let tr: Complex64 = u.matrix().iter().zip(v.matrix().iter()).map(|(a, b)| a.conj() * b).sum();
    Ok(overlap_angle(tr.norm() / d))
}

/// Spectral width `E_max - E_min`.
pub fn delta_epsilon(h: &HermitianGenerator) -> f64 {
    let vals = h.eigen().values;
    vals[vals.len() - 1] - vals[0]
}

/// Hilbert-Schmidt speed `(2/sqrt(d)) ||H||`.
pub fn hs_speed(h: &HermitianGenerator) -> f64 {
    2.0 / (h.dim() as f64).sqrt() * hs_norm(h.matrix())
}

/// Outcome of integrating a piecewise-constant drive: the distance actually
/// covered next to the integrated speed that bounds it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpeedLimitCheck {
    pub distance: f64,
    pub bound: f64,
}

impl SpeedLimitCheck {
    pub fn holds(&self, tol: f64) -> bool {
        self.distance <= self.bound + tol
    }
}

/// Fubini-Study distance reached from `psi0` against `2 * sum(dE_k dt_k)`.
///
/// Each step's Hamiltonian conserves its own moments, so the dispersion is
/// constant within a step and the sum is exact.
pub fn state_speed_limit(steps: &[(HermitianGenerator, f64)], psi0: &CVector) -> Result<SpeedLimitCheck> {
    let mut psi = psi0.clone();
    let mut bound = 0.0;
    for (h, dt) in steps {
        bound += 2.0 * state_energy_dispersion(h, &psi)? * dt;
        psi = expm_hermitian(h, *dt).matrix() * psi;
    }
    let n = psi.norm();
    psi /= Complex64::from(n);
    Ok(SpeedLimitCheck { distance: fubini_study(psi0, &psi)?, bound })
}

/// `S1(U(T), I)` against `sum(delta_eps_k dt_k)` and `S2(U(T), I)` against
/// `sum((2/sqrt d) ||H_k|| dt_k)`.
pub fn unitary_speed_limits(
    steps: &[(HermitianGenerator, f64)],
) -> Result<(SpeedLimitCheck, SpeedLimitCheck)> {
    let d = steps.first().map(|s| s.0.dim()).ok_or_else(|| {
        Error::InvalidArgument("empty drive".into())
    })?;
    let mut u = UnitaryOperator::identity(d);
    let (mut b1, mut b2) = (0.0, 0.0);
    for (h, dt) in steps {
        b1 += delta_epsilon(h) * dt;
        b2 += hs_speed(h) * dt;
        u = expm_hermitian(h, *dt).compose(&u)?;
    }
    let id = UnitaryOperator::identity(d);
    Ok((
        SpeedLimitCheck { distance: s1_distance(&u, &id)?, bound: b1 },
        SpeedLimitCheck { distance: s2_distance(&u, &id)?, bound: b2 },
    ))
}

/// Brute-force evaluation of `max_psi s(U psi, V psi)` for cross-checking
/// [`s1_distance`].
pub mod oracle {
    use rand::Rng;

    use super::*;
    use crate::ops::{random, unitary_spectrum};

    fn overlap_abs(w: &crate::ops::CMatrix, psi: &CVector) -> f64 {
        psi.dotc(&(w * psi)).norm()
    }

    /// Haar sampling of `n_samples` states, the superposition of the two
    /// extremal eigenvectors of `U^dagger V`, and a shrinking random-step
    /// refinement of the best candidate. Meant for `n_samples >= 10^4`.
    pub fn s1_bruteforce(
        u: &UnitaryOperator,
        v: &UnitaryOperator,
        n_samples: usize,
        rng: &mut impl Rng,
    ) -> Result<f64> {
        let w = u.overlap(v)?;
        let wm = w.matrix();
        let d = w.dim();

        let spec = unitary_spectrum(&w)?;
        let arc = minimal_covering_arc(&spec.phases);
        let (a, b) = arc.extremal;
        let cand = (spec.vectors.column(a) + spec.vectors.column(b)) * Complex64::from(0.5f64.sqrt());
        let mut best = if a == b { spec.vectors.column(a).into_owned() } else { cand };
        let mut best_val = overlap_abs(wm, &best);

        for _ in 0..n_samples {
            let psi = random::state(d, rng);
            let val = overlap_abs(wm, &psi);
            if val < best_val {
                best_val = val;
                best = psi;
            }
        }

        let mut step = 0.1;
        while step > 1e-9 {
            let mut improved = false;
            for _ in 0..40 {
                let kick = random::state(d, rng) * Complex64::from(step);
                let mut trial = &best + kick;
                let n = trial.norm();
                trial /= Complex64::from(n);
                let val = overlap_abs(wm, &trial);
                if val < best_val {
                    best_val = val;
                    best = trial;
                    improved = true;
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        Ok(overlap_angle(best_val))
    }
}
