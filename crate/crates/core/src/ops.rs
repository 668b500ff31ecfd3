//! Dense complex linear algebra for the small Hermitian and unitary matrices
//! used throughout the crate.
//!
//! Everything is built on `nalgebra::DMatrix<Complex64>`. Generators and
//! evolution operators are wrapped in newtypes that check their defining
//! properties once, at construction.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-12;
pub const UNITARY_TOL: f64 = 1e-10;

pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn check_square(m: &CMatrix) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(())
}

fn check_same_dim(x: &CMatrix, y: &CMatrix) -> Result<()> {
    if x.shape() != y.shape() {
        return Err(Error::DimensionMismatch { left: x.nrows(), right: y.nrows() });
    }
    Ok(())
}

/// Largest entry of `|M - M^dagger|`.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// A traceless Hermitian matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianGenerator(CMatrix);

impl HermitianGenerator {
    pub fn new(m: CMatrix) -> Result<Self> {
        check_square(&m)?;
        let scale = m.iter().fold(1.0_f64, |acc, z| acc.max(z.norm()));
        let defect = hermiticity_defect(&m);
        if defect > HERMITIAN_TOL * scale {
            return Err(Error::NotHermitian(defect));
        }
        let tr = m.trace().norm();
        if tr > TRACE_TOL * scale {
            return Err(Error::NotTraceless(tr));
        }
        Ok(Self(symmetrize(m)))
    }

    /// Wraps a matrix known to be Hermitian and traceless up to rounding.
    pub(crate) fn from_trusted(m: CMatrix) -> Self {
        Self(symmetrize(m))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(CMatrix::zeros(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn scale(&self, k: f64) -> Self {
        Self(&self.0 * Complex64::from(k))
    }

    /// `a*self + b*other`.
    pub fn lin_comb(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        check_same_dim(&self.0, &other.0)?;
        Ok(Self(&self.0 * Complex64::from(a) + &other.0 * Complex64::from(b)))
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Normalized so that `tr(X^2) = 1`.
    pub fn normalized(&self) -> Self {
        let n = self.norm();
        if n == 0.0 {
            return self.clone();
        }
        self.scale(1.0 / n)
    }

    pub fn eigen(&self) -> SpectralDecomposition {
        SpectralDecomposition::of(&self.0)
    }
}

/// Replaces `m` by `(m + m^dagger)/2`.
fn symmetrize(m: CMatrix) -> CMatrix {
    let adj = m.adjoint();
    (m + adj) * Complex64::from(0.5)
}

/// Eigenvalues (ascending) and eigenvectors (columns) of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl SpectralDecomposition {
    pub fn of(m: &CMatrix) -> Self {
        let eig = SymmetricEigen::new(m.clone());
        let n = m.nrows();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
        Self { values, vectors }
    }

    /// `V f(D) V^dagger` for a complex-valued function of the eigenvalues.
    pub fn apply(&self, f: impl Fn(f64) -> Complex64) -> CMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (j, &lam) in self.values.iter().enumerate() {
            let fj = f(lam);
            for i in 0..n {
                scaled[(i, j)] *= fj;
            }
        }
        scaled * self.vectors.adjoint()
    }
}

/// An element of SU(d).
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryOperator(CMatrix);

impl UnitaryOperator {
    pub fn new(m: CMatrix) -> Result<Self> {
        check_square(&m)?;
        let n = m.nrows();
        let gram = m.adjoint() * &m;
        let dev = (gram - CMatrix::identity(n, n)).iter().fold(0.0_f64, |a, z| a.max(z.norm()));
        if dev > UNITARY_TOL {
            return Err(Error::NotSpecialUnitary(format!("|U^dagger U - I| = {dev:.3e}")));
        }
        let det = m.determinant();
        if (det - Complex64::from(1.0)).norm() > UNITARY_TOL {
            return Err(Error::NotSpecialUnitary(format!("det U = {det}")));
        }
        Ok(Self(m))
    }

    pub(crate) fn from_trusted(m: CMatrix) -> Self {
        Self(m)
    }

    pub fn identity(dim: usize) -> Self {
        Self(CMatrix::identity(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    /// `self * other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        check_same_dim(&self.0, &other.0)?;
        Ok(Self(&self.0 * &other.0))
    }

    /// `U^dagger V`, the overlap operator of the pair.
    pub fn overlap(&self, other: &Self) -> Result<Self> {
        check_same_dim(&self.0, &other.0)?;
        Ok(Self(self.0.adjoint() * &other.0))
    }

    /// Similarity transform `G U G^dagger`.
    pub fn conjugated_by(&self, g: &Self) -> Result<Self> {
        check_same_dim(&self.0, &g.0)?;
        Ok(Self(&g.0 * &self.0 * g.0.adjoint()))
    }
}

pub fn commutator(x: &CMatrix, y: &CMatrix) -> Result<CMatrix> {
    check_same_dim(x, y)?;
    Ok(x * y - y * x)
}

/// `tr(X^dagger Y)`.
pub fn hs_inner(x: &CMatrix, y: &CMatrix) -> Result<Complex64> {
    check_same_dim(x, y)?;
    Ok(x.iter().zip(y.iter()).map(|(a, b)| a.conj() * b).sum())
}

pub fn hs_norm(x: &CMatrix) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `exp(-i H t)`.
pub fn expm_hermitian(h: &HermitianGenerator, t: f64) -> UnitaryOperator {
    let spec = h.eigen();
    UnitaryOperator::from_trusted(spec.apply(|lam| Complex64::from_polar(1.0, -lam * t)))
}

/// Maps an angle onto the principal branch `(-pi, pi]`.
pub fn principal_angle(x: f64) -> f64 {
    let mut y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y -= 2.0 * PI;
    }
    y
}

/// Eigenvalues and eigenvectors of a unitary, from its complex Schur form.
#[derive(Clone, Debug)]
pub struct UnitarySpectrum {
    /// Eigenphases in `(-pi, pi]`, ascending.
    pub phases: Vec<f64>,
    /// Orthonormal eigenvectors, column `k` belongs to `phases[k]`.
    pub vectors: CMatrix,
}

pub fn unitary_spectrum(u: &UnitaryOperator) -> Result<UnitarySpectrum> {
    let n = u.dim();
    let schur = Schur::try_new(u.matrix().clone(), 1e-15, 10_000).ok_or(Error::NoConvergence)?;
    let (q, t) = schur.unpack();
    let mut order: Vec<(f64, usize)> = (0..n)
        .map(|k| {
            let z = t[(k, k)];
            (principal_angle(z.im.atan2(z.re)), k)
        })
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0));
    let phases = order.iter().map(|p| p.0).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| q[(i, order[j].1)]);
    Ok(UnitarySpectrum { phases, vectors })
}

/// Eigenphases of `U` on `(-pi, pi]`, ascending.
pub fn eigenphases(u: &UnitaryOperator) -> Result<Vec<f64>> {
    unitary_spectrum(u).map(|s| s.phases)
}

/// Families of conventional Hermitian bases.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum BasisKind {
    Pauli,
    GellMann,
    /// Spin operators `J_x, J_y, J_z` for the given `J`.
    Spin(f64),
}

pub fn standard_basis(kind: BasisKind) -> Result<Vec<HermitianGenerator>> {
    match kind {
        BasisKind::Pauli => Ok(pauli().to_vec()),
        BasisKind::GellMann => Ok(gell_mann().to_vec()),
        BasisKind::Spin(j) => spin_operators(j).map(|ops| ops.to_vec()),
    }
}

fn from_rows(rows: &[&[Complex64]]) -> HermitianGenerator {
    let n = rows.len();
    HermitianGenerator::from_trusted(CMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

/// `[sigma_x, sigma_y, sigma_z]`.
pub fn pauli() -> [HermitianGenerator; 3] {
    let o = c(0.0, 0.0);
    let l = c(1.0, 0.0);
    [
        from_rows(&[&[o, l], &[l, o]]),
        from_rows(&[&[o, -I], &[I, o]]),
        from_rows(&[&[l, o], &[o, -l]]),
    ]
}

/// `[lambda_1, ..., lambda_8]`, normalized to `tr(lambda_i lambda_j) = 2 delta_ij`.
pub fn gell_mann() -> [HermitianGenerator; 8] {
    let o = c(0.0, 0.0);
    let l = c(1.0, 0.0);
    let r3 = c(1.0 / 3f64.sqrt(), 0.0);
    [
        from_rows(&[&[o, l, o], &[l, o, o], &[o, o, o]]),
        from_rows(&[&[o, -I, o], &[I, o, o], &[o, o, o]]),
        from_rows(&[&[l, o, o], &[o, -l, o], &[o, o, o]]),
        from_rows(&[&[o, o, l], &[o, o, o], &[l, o, o]]),
        from_rows(&[&[o, o, -I], &[o, o, o], &[I, o, o]]),
        from_rows(&[&[o, o, o], &[o, o, l], &[o, l, o]]),
        from_rows(&[&[o, o, o], &[o, o, -I], &[o, I, o]]),
        from_rows(&[&[r3, o, o], &[o, r3, o], &[o, o, r3 * -2.0]]),
    ]
}

/// Checks that `j` is a positive half-integer and returns `2j`.
pub fn twice_spin(j: f64) -> Result<usize> {
    let two_j = 2.0 * j;
    if !(two_j >= 1.0) || (two_j - two_j.round()).abs() > 1e-12 || two_j > 1e6 {
        return Err(Error::InvalidSpin(j));
    }
    Ok(two_j.round() as usize)
}

/// `[J_x, J_y, J_z]` in the `|J, m>` basis ordered `m = J, J-1, ..., -J`.
pub fn spin_operators(j: f64) -> Result<[HermitianGenerator; 3]> {
    let d = twice_spin(j)? + 1;
    let m = |k: usize| j - k as f64;
    let mut jz = CMatrix::zeros(d, d);
    let mut jp = CMatrix::zeros(d, d);
    for k in 0..d {
        jz[(k, k)] = c(m(k), 0.0);
        if k > 0 {
            // <m+1| J+ |m> with m = m(k)
            let mk = m(k);
            jp[(k - 1, k)] = c((j * (j + 1.0) - mk * (mk + 1.0)).sqrt(), 0.0);
        }
    }
    let jm = jp.adjoint();
    let jx = (&jp + &jm) * c(0.5, 0.0);
    let jy = (&jp - &jm) * c(0.0, -0.5);
    Ok([
        HermitianGenerator::from_trusted(jx),
        HermitianGenerator::from_trusted(jy),
        HermitianGenerator::from_trusted(jz),
    ])
}

/// Random matrices and states for tests, oracles and property suites.
pub mod random {
    use rand::Rng;
    use rand_distr::StandardNormal;

    use super::*;

    fn gaussian(rng: &mut impl Rng) -> Complex64 {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re, im) * std::f64::consts::FRAC_1_SQRT_2
    }

    /// Haar-distributed element of SU(d).
    pub fn haar_unitary(dim: usize, rng: &mut impl Rng) -> UnitaryOperator {
        let z = CMatrix::from_fn(dim, dim, |_, _| gaussian(rng));
        let qr = z.qr();
        let (mut q, r) = qr.unpack();
        for j in 0..dim {
            let d = r[(j, j)];
            let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0, 0.0) };
            for i in 0..dim {
                q[(i, j)] *= phase;
            }
        }
        let det = q.determinant();
        let root = Complex64::from_polar(1.0, -det.arg() / dim as f64);
        UnitaryOperator::from_trusted(q * root)
    }

    /// Traceless Hermitian matrix with i.i.d. Gaussian entries.
    pub fn hermitian(dim: usize, rng: &mut impl Rng) -> HermitianGenerator {
        let z = CMatrix::from_fn(dim, dim, |_, _| gaussian(rng));
        let mut h = (&z + z.adjoint()) * c(0.5, 0.0);
        let shift = h.trace() / c(dim as f64, 0.0);
        for k in 0..dim {
            h[(k, k)] -= shift;
        }
        HermitianGenerator::from_trusted(h)
    }

    /// Haar-random pure state.
    pub fn state(dim: usize, rng: &mut impl Rng) -> CVector {
        let v = CVector::from_fn(dim, |_, _| gaussian(rng));
        let n = v.norm();
        v / c(n, 0.0)
    }
}
