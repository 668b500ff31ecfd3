//! Phase-controlled systems and their target families.
//!
//! All three models share the form `H(alpha) = k * Omega * (cos(alpha) G_A +
//! sin(alpha) G_B)`: `k = 1/2` with Pauli or Gell-Mann generators for su(2)
//! and su(3), `k = 1` with spin operators for spin-J.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::{su3_labeled_basis, SU3_LABELS};
use crate::ops::{
    expm_hermitian, hs_norm, pauli, spin_operators, twice_spin, HermitianGenerator,
    UnitaryOperator,
};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ModelLabel {
    Su2,
    Su3,
    SpinJ(f64),
}

impl fmt::Display for ModelLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelLabel::Su2 => write!(f, "su2"),
            ModelLabel::Su3 => write!(f, "su3"),
            ModelLabel::SpinJ(j) => write!(f, "spinJ({j})"),
        }
    }
}

/// Model description as read from and written to JSON: `{label, omega, J?}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub label: String,
    pub omega: f64,
    #[serde(rename = "J", skip_serializing_if = "Option::is_none", default)]
    pub j: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct PhaseControlModel {
    label: ModelLabel,
    omega: f64,
    prefactor: f64,
    generators: (HermitianGenerator, HermitianGenerator),
}

impl PhaseControlModel {
    pub fn su2(omega: f64) -> Result<Self> {
        check_omega(omega)?;
        let [sx, sy, _] = pauli();
        Ok(Self { label: ModelLabel::Su2, omega, prefactor: 0.5, generators: (sx, sy) })
    }

    pub fn su3(omega: f64) -> Result<Self> {
        check_omega(omega)?;
        let (a, b) = crate::lie::su3_control_pair();
        Ok(Self { label: ModelLabel::Su3, omega, prefactor: 0.5, generators: (a, b) })
    }

    pub fn spin_j(j: f64, omega: f64) -> Result<Self> {
        check_omega(omega)?;
        let [jx, jy, _] = spin_operators(j)?;
        Ok(Self { label: ModelLabel::SpinJ(j), omega, prefactor: 1.0, generators: (jx, jy) })
    }

    pub fn from_spec(spec: &ModelSpec) -> Result<Self> {
        match spec.label.to_ascii_lowercase().as_str() {
            "su2" => Self::su2(spec.omega),
            "su3" => Self::su3(spec.omega),
            "spinj" | "spin" => {
                let j = spec.j.ok_or_else(|| Error::InvalidArgument("spinJ model needs J".into()))?;
                Self::spin_j(j, spec.omega)
            }
            other => Err(Error::InvalidArgument(format!("unknown model `{other}`"))),
        }
    }

    pub fn spec(&self) -> ModelSpec {
        let (label, j) = match self.label {
            ModelLabel::Su2 => ("su2", None),
            ModelLabel::Su3 => ("su3", None),
            ModelLabel::SpinJ(j) => ("spinJ", Some(j)),
        };
        ModelSpec { label: label.into(), omega: self.omega, j }
    }

    pub fn label(&self) -> ModelLabel {
        self.label
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn dim(&self) -> usize {
        self.generators.0.dim()
    }

    /// Raw generators `(G_A, G_B)` (Pauli, Gell-Mann or spin normalization).
    pub fn generators(&self) -> (&HermitianGenerator, &HermitianGenerator) {
        (&self.generators.0, &self.generators.1)
    }

    /// Scaled generators `(k Omega G_A, k Omega G_B)`.
    pub fn scaled_generators(&self) -> (HermitianGenerator, HermitianGenerator) {
        let s = self.prefactor * self.omega;
        (self.generators.0.scale(s), self.generators.1.scale(s))
    }

    /// Dimensionless drive amplitude `E`: the norm of `H/Omega` in an
    /// orthonormal (`tr(chi^2) = 1`) basis.
    pub fn drive_amplitude(&self) -> f64 {
        self.prefactor * self.generators.0.norm()
    }

    pub fn hamiltonian_at(&self, alpha: f64) -> HermitianGenerator {
        let (a, b) = &self.generators;
        let s = self.prefactor * self.omega;
        a.lin_comb(s * alpha.cos(), b, s * alpha.sin()).expect("same dimension")
    }

    /// `dH/dalpha`.
    pub fn hamiltonian_derivative(&self, alpha: f64) -> HermitianGenerator {
        let (a, b) = &self.generators;
        let s = self.prefactor * self.omega;
        a.lin_comb(-s * alpha.sin(), b, s * alpha.cos()).expect("same dimension")
    }

    /// Time-independent ceilings `(delta_eps_bar, ||H||_bar)` on the two
    /// speeds. For phase control both are constant in `alpha`, so the
    /// values at `alpha = 0` are exact.
    pub fn speed_ceilings(&self) -> (f64, f64) {
        let h = self.hamiltonian_at(0.0);
        (crate::metrics::delta_epsilon(&h), hs_norm(h.matrix()))
    }

    /// Hermitian generator `X` of the target family `V(phi) = exp(-i X phi)`.
    pub fn target_generator(&self, family: &TargetFamily) -> Result<HermitianGenerator> {
        match (self.label, family) {
            (ModelLabel::Su2, TargetFamily::Axis(n)) => {
                let [sx, sy, sz] = pauli();
                Ok(axis_combination(n, [&sx, &sy, &sz])?.scale(0.5))
            }
            (ModelLabel::SpinJ(j), TargetFamily::Axis(n)) => {
                let [jx, jy, jz] = spin_operators(j)?;
                axis_combination(n, [&jx, &jy, &jz])
            }
            (ModelLabel::Su3, TargetFamily::Named(x)) => {
                let basis = su3_labeled_basis()?;
                SU3_LABELS
                    .iter()
                    .position(|l| x.len() == 1 && x.starts_with(*l))
                    .map(|k| basis[k].clone())
                    .ok_or_else(|| Error::UnknownTarget(x.clone()))
            }
            (_, TargetFamily::Named(x)) => {
                let n = match x.as_str() {
                    "x" => [1.0, 0.0, 0.0],
                    "y" => [0.0, 1.0, 0.0],
                    "z" => [0.0, 0.0, 1.0],
                    _ => return Err(Error::UnknownTarget(x.clone())),
                };
                self.target_generator(&TargetFamily::Axis(n))
            }
            (ModelLabel::Su3, TargetFamily::Axis(_)) => {
                Err(Error::UnknownTarget("axis targets are defined for su2/spinJ only".into()))
            }
        }
    }

    pub fn target(&self, spec: &TargetSpec) -> Result<UnitaryOperator> {
        if !(0.0..=std::f64::consts::PI).contains(&spec.phi) {
            return Err(Error::InvalidArgument(format!("phi = {} outside [0, pi]", spec.phi)));
        }
        let x = self.target_generator(&spec.family)?;
        Ok(expm_hermitian(&x, spec.phi))
    }

    /// Per-step Hamiltonians and durations of a piecewise-constant field.
    pub fn steps(&self, field: &ControlField) -> Vec<(HermitianGenerator, f64)> {
        let dt = field.dt();
        field.values.iter().map(|&a| (self.hamiltonian_at(a), dt)).collect()
    }

    /// `U(T) = U_N ... U_1`, with `U_k = exp(-i H(alpha_k) dt)` and step 1
    /// applied first.
    pub fn propagate(&self, field: &ControlField) -> UnitaryOperator {
        self.propagate_trajectory(field).pop().expect("at least the identity")
    }

    /// `[I, U_1, U_2 U_1, ..., U(T)]`.
    pub fn propagate_trajectory(&self, field: &ControlField) -> Vec<UnitaryOperator> {
        let dt = field.dt();
        let mut out = Vec::with_capacity(field.values.len() + 1);
        let mut u = UnitaryOperator::identity(self.dim());
        out.push(u.clone());
        for &a in &field.values {
            let step = expm_hermitian(&self.hamiltonian_at(a), dt);
            u = step.compose(&u).expect("same dimension");
            out.push(u.clone());
        }
        out
    }
}

fn check_omega(omega: f64) -> Result<()> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::InvalidArgument(format!("omega must be positive, got {omega}")));
    }
    Ok(())
}

fn axis_combination(n: &[f64; 3], ops: [&HermitianGenerator; 3]) -> Result<HermitianGenerator> {
    let norm = n.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!("axis {n:?} is not a unit vector")));
    }
    let xy = ops[0].lin_comb(n[0], ops[1], n[1])?;
    xy.lin_comb(1.0, ops[2], n[2])
}

/// Piecewise-constant phase field `alpha_k` on `n_steps` equal steps of `[0, T]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControlField {
    pub n_steps: usize,
    pub total_time: f64,
    pub values: Vec<f64>,
}

impl ControlField {
    pub fn new(total_time: f64, values: Vec<f64>) -> Result<Self> {
        let field = Self { n_steps: values.len(), total_time, values };
        field.validate()?;
        Ok(field)
    }

    pub fn constant(total_time: f64, n_steps: usize, alpha: f64) -> Result<Self> {
        Self::new(total_time, vec![alpha; n_steps])
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_steps == 0 || self.values.len() != self.n_steps {
            return Err(Error::InvalidArgument(format!(
                "field needs n_steps >= 1 values (n_steps {}, {} values)",
                self.n_steps,
                self.values.len()
            )));
        }
        if !(self.total_time > 0.0 && self.total_time.is_finite()) {
            return Err(Error::InvalidArgument(format!("total time {} must be positive", self.total_time)));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(())
    }

    pub fn dt(&self) -> f64 {
        self.total_time / self.n_steps as f64
    }

    /// Same phases on a different total time.
    pub fn rescaled(&self, total_time: f64) -> Result<Self> {
        Self::new(total_time, self.values.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetFamily {
    /// `exp(-i (n . S) phi)` with `S` the model's spin operators (`sigma/2`
    /// for su(2)).
    Axis([f64; 3]),
    /// A named generator: `x`, `y`, `z` for su(2)/spin-J, `A`..`H` for su(3).
    Named(String),
}

impl TargetFamily {
    pub fn named(label: &str) -> Self {
        TargetFamily::Named(label.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetSpec {
    pub family: TargetFamily,
    pub phi: f64,
}

impl TargetSpec {
    pub fn named(label: &str, phi: f64) -> Self {
        Self { family: TargetFamily::named(label), phi }
    }
}

/// Checks that `j` is usable for the spin-J model.
pub fn validate_spin(j: f64) -> Result<()> {
    twice_spin(j).map(|_| ())
}
