//! Dynamical Lie algebra of a set of control generators.
//!
//! The algebra is grown breadth-first: level `L` commutes every element of
//! depth `L-1` with every element of depth `<= L-1`, and keeps the part of
//! each commutator orthogonal to the current span. An element's depth is
//! therefore the smallest number of nested commutators that produces a new
//! direction.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ops::{commutator, gell_mann, hs_inner, CMatrix, HermitianGenerator, I};

pub const DEFAULT_TOL: f64 = 1e-10;

/// How an algebra element was produced.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    /// Input generator number `index`.
    Generator { index: usize, expr: String },
    /// `-i [basis[left], basis[right]]`, orthogonalized against earlier elements.
    Commutator { left: usize, right: usize, expr: String },
}

impl Provenance {
    pub fn expr(&self) -> &str {
        match self {
            Provenance::Generator { expr, .. } | Provenance::Commutator { expr, .. } => expr,
        }
    }
}

#[derive(Clone, Debug)]
pub struct DepthTaggedElement {
    /// Orthonormalized element, `tr(chi^2) = 1`.
    pub element: HermitianGenerator,
    pub depth: usize,
    pub provenance: Provenance,
    /// Norm of the Hermitian raw element (`-i[X, Y]` or the input generator)
    /// before normalization.
    pub raw_norm: f64,
    /// `tr(chi * raw/|raw|)`, the overlap between the orthonormalized element
    /// and its normalized raw direction.
    pub overlap: f64,
}

#[derive(Clone, Debug)]
pub struct StructureConstant {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub f: f64,
}

#[derive(Clone, Debug)]
pub struct AlgebraReport {
    pub basis: Vec<DepthTaggedElement>,
    pub dimension: usize,
    pub hilbert_dim: usize,
    pub fully_controllable: bool,
    /// Nonzero `f_abc` with `a < b`, where `[chi_a, chi_b] = i sum_c f_abc chi_c`.
    pub structure_constants: Vec<StructureConstant>,
}

impl AlgebraReport {
    pub fn elements(&self) -> Vec<HermitianGenerator> {
        self.basis.iter().map(|e| e.element.clone()).collect()
    }

    pub fn depths(&self) -> Vec<usize> {
        self.basis.iter().map(|e| e.depth).collect()
    }

    pub fn structure_constant(&self, a: usize, b: usize, c: usize) -> f64 {
        let elems: Vec<_> = self.basis.iter().map(|e| &e.element).collect();
        structure_constant_of(&elems, a, b, c)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let elements: Vec<_> = self
            .basis
            .iter()
            .map(|e| {
                let m = e.element.matrix();
                let rows: Vec<Vec<[f64; 2]>> = (0..m.nrows())
                    .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
                    .collect();
                serde_json::json!({
                    "depth": e.depth,
                    "matrix": rows,
                    "provenance": e.provenance,
                    "overlap": e.overlap,
                })
            })
            .collect();
        let sc: Vec<_> = self
            .structure_constants
            .iter()
            .map(|s| serde_json::json!({"a": s.a, "b": s.b, "c": s.c, "f": s.f}))
            .collect();
        serde_json::json!({
            "dimension": self.dimension,
            "fully_controllable": self.fully_controllable,
            "elements": elements,
            "structure_constants": sc,
        })
    }
}

/// Removes the components of `raw` along an orthonormal `basis`
/// (two passes of modified Gram-Schmidt).
fn residual(raw: &CMatrix, basis: &[&HermitianGenerator]) -> CMatrix {
    let mut r = raw.clone();
    for _ in 0..2 {
        for b in basis {
            let p = hs_inner(b.matrix(), &r).expect("dims checked by caller");
            r -= b.matrix() * p;
        }
    }
    r
}

/// Gram-Schmidt step: orthonormalizes `raw` against `basis` and reports the
/// overlap `eta = tr(chi * raw/|raw|)` of the result with the raw direction.
pub fn orthonormalize_with_overlap(
    raw: &HermitianGenerator,
    basis: &[HermitianGenerator],
) -> Result<(HermitianGenerator, f64)> {
    let refs: Vec<_> = basis.iter().collect();
    orthonormalize_refs(raw, &refs, DEFAULT_TOL)
}

fn orthonormalize_refs(
    raw: &HermitianGenerator,
    basis: &[&HermitianGenerator],
    tol: f64,
) -> Result<(HermitianGenerator, f64)> {
    for b in basis {
        if b.dim() != raw.dim() {
            return Err(Error::DimensionMismatch { left: raw.dim(), right: b.dim() });
        }
    }
    let unit = raw.normalized();
    let r = residual(unit.matrix(), basis);
    let rn = crate::ops::hs_norm(&r);
    if rn <= tol {
        return Err(Error::InSpan);
    }
    let chi = HermitianGenerator::from_trusted(r / Complex64::from(rn));
    let eta = hs_inner(chi.matrix(), unit.matrix())?.re;
    Ok((chi, eta))
}

/// `f_abc = Im tr(chi_c [chi_a, chi_b])` for an orthonormal Hermitian basis.
pub fn structure_constant(basis: &[HermitianGenerator], a: usize, b: usize, c: usize) -> f64 {
    let refs: Vec<_> = basis.iter().collect();
    structure_constant_of(&refs, a, b, c)
}

fn structure_constant_of(basis: &[&HermitianGenerator], a: usize, b: usize, c: usize) -> f64 {
    let k = commutator(basis[a].matrix(), basis[b].matrix()).expect("same algebra");
    hs_inner(basis[c].matrix(), &k).expect("same algebra").im
}

/// Like [`structure_constant`], but insists that `[chi_a, chi_b]` lies along
/// `chi_c`, so that `chi_c = (-i/f) [chi_a, chi_b]`.
pub fn proportional_structure_constant(
    basis: &[HermitianGenerator],
    a: usize,
    b: usize,
    c: usize,
    tol: f64,
) -> Result<f64> {
    let f = structure_constant(basis, a, b, c);
    let k = commutator(basis[a].matrix(), basis[b].matrix())?;
    let rest = k - basis[c].matrix() * Complex64::new(0.0, f);
    let res = crate::ops::hs_norm(&rest);
    if res > tol {
        return Err(Error::NotProportional(res));
    }
    Ok(f)
}

/// Breadth-first closure of `generators` under commutation.
pub fn generate_algebra(generators: &[HermitianGenerator], tol: f64) -> Result<AlgebraReport> {
    let first = generators
        .first()
        .ok_or_else(|| Error::InvalidArgument("no generators".into()))?;
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let d = first.dim();
    for g in generators {
        if g.dim() != d {
            return Err(Error::DimensionMismatch { left: d, right: g.dim() });
        }
        let tr = g.matrix().trace().norm();
        if tr > crate::ops::TRACE_TOL * g.norm().max(1.0) {
            return Err(Error::NotTraceless(tr));
        }
    }
    let max_dim = d * d - 1;

    let mut basis: Vec<DepthTaggedElement> = Vec::new();
    let try_add = |basis: &mut Vec<DepthTaggedElement>,
                   raw: HermitianGenerator,
                   depth: usize,
                   provenance: Provenance|
     -> Result<bool> {
        let raw_norm = raw.norm();
        if raw_norm <= tol {
            return Ok(false);
        }
        let refs: Vec<_> = basis.iter().map(|e| &e.element).collect();
        match orthonormalize_refs(&raw, &refs, tol) {
            Ok((element, overlap)) => {
                basis.push(DepthTaggedElement { element, depth, provenance, raw_norm, overlap });
                Ok(true)
            }
            Err(Error::InSpan) => Ok(false),
            Err(e) => Err(e),
        }
    };

    for (index, g) in generators.iter().enumerate() {
        let expr = format!("g{index}");
        try_add(&mut basis, g.clone(), 0, Provenance::Generator { index, expr })?;
    }

    let mut level = 1;
    loop {
        if basis.len() == max_dim {
            break;
        }
        let frontier: Vec<usize> =
            (0..basis.len()).filter(|&k| basis[k].depth == level - 1).collect();
        let mut added = false;
        let snapshot = basis.len();
        'pairs: for &j in &frontier {
            for i in 0..snapshot {
                // frontier pairs appear once
                if basis[i].depth == level - 1 && i >= j {
                    continue;
                }
                let k = commutator(basis[i].element.matrix(), basis[j].element.matrix())?;
                let raw = HermitianGenerator::from_trusted(k * (-I));
                let expr = format!(
                    "[{},{}]",
                    basis[i].provenance.expr(),
                    basis[j].provenance.expr()
                );
                let prov = Provenance::Commutator { left: i, right: j, expr };
                if try_add(&mut basis, raw, level, prov)? {
                    added = true;
                    if basis.len() == max_dim {
                        break 'pairs;
                    }
                }
            }
        }
        if !added {
            break;
        }
        level += 1;
    }

    let elems: Vec<_> = basis.iter().map(|e| &e.element).collect();
    let n = elems.len();
    let mut structure_constants = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in 0..n {
                let f = structure_constant_of(&elems, a, b, c);
                if f.abs() > tol.max(1e-12) {
                    structure_constants.push(StructureConstant { a, b, c, f });
                }
            }
        }
    }

    Ok(AlgebraReport {
        dimension: n,
        hilbert_dim: d,
        fully_controllable: n == max_dim,
        basis,
        structure_constants,
    })
}

/// Real coordinates of Hermitian matrices in the orthonormal ambient basis
/// `{E_kk diagonals, (E_jk + E_kj)/sqrt2, i(E_jk - E_kj)/sqrt2}`.
fn real_coordinates(m: &CMatrix) -> Vec<f64> {
    let n = m.nrows();
    let mut out = Vec::with_capacity(n * n);
    let r2 = std::f64::consts::SQRT_2;
    for i in 0..n {
        out.push(m[(i, i)].re);
        for j in i + 1..n {
            out.push(r2 * m[(i, j)].re);
            out.push(-r2 * m[(i, j)].im);
        }
    }
    out
}

/// Numerical rank via singular values of the coordinate matrix.
pub fn rank(elements: &[HermitianGenerator], tol: f64) -> usize {
    if elements.is_empty() {
        return 0;
    }
    let cols: Vec<Vec<f64>> = elements.iter().map(|e| real_coordinates(&e.normalized().into_matrix())).collect();
    let rows = cols[0].len();
    let m = DMatrix::from_fn(rows, cols.len(), |i, j| cols[j][i]);
    m.singular_values().iter().filter(|&&s| s > tol).count()
}

/// Labels `A..H` of the su(3) model's nested-commutator basis.
pub const SU3_LABELS: [char; 8] = ['A', 'B', 'C', 'D', 'E', 'F', 'G', 'H'];

/// The two controlled generators of the su(3) model,
/// `lambda_A = lambda_1` and `lambda_B = (lambda_2 + lambda_4)/sqrt2`.
pub fn su3_control_pair() -> (HermitianGenerator, HermitianGenerator) {
    let l = gell_mann();
    let lb = l[1].lin_comb(0.5f64.sqrt(), &l[3], 0.5f64.sqrt()).expect("3x3");
    (l[0].clone(), lb)
}

/// Closed-form Gell-Mann coefficients (`lambda_1..lambda_8`) of the
/// directions `lambda_C..lambda_H`, each normalized to `tr(lambda^2) = 2`.
///
/// `lambda_E` is `[lambda_B, [lambda_A, lambda_B]]`, proportional to
/// `lambda_1 - 3/5 lambda_5`; see [`lambda_e_opposite_sign`].
pub fn reference_directions() -> [(char, [f64; 8]); 6] {
    let s = |x: f64| x.sqrt();
    [
        ('C', [0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.5, 0.0].map(|v| v * s(4.0 / 5.0))),
        ('D', [0.0, 1.0, 0.0, 0.25, 0.0, 0.0, 0.0, 0.0].map(|v| v * 4.0 / s(17.0))),
        (
            'E',
            [1.0, 0.0, 0.0, 0.0, -0.6, 0.0, 0.0, 0.0].map(|v| v * -5.0 * s(2.0) / (2.0 * s(17.0))),
        ),
        ('F', [0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.125, 0.0].map(|v| v * 4.0 * s(4.0) / s(65.0))),
        ('G', [0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0]),
        ('H', [0.0, 0.0, 6.5, 0.0, 0.0, 0.0, 4.0, 1.5 * s(3.0)].map(|v| v / s(65.0))),
    ]
}

/// `-(5 sqrt2 / 2 sqrt17)(lambda_1 + 3/5 lambda_5)`, the `lambda_E` form with
/// the wrong `lambda_5` sign. Kept to show it is not a nested commutator.
pub fn lambda_e_opposite_sign() -> [f64; 8] {
    let k = -5.0 * 2f64.sqrt() / (2.0 * 17f64.sqrt());
    [k, 0.0, 0.0, 0.0, 0.6 * k, 0.0, 0.0, 0.0]
}

/// Coefficients `tr(lambda_i X)/2` of a 3x3 Hermitian matrix.
pub fn gell_mann_coefficients(x: &HermitianGenerator) -> [f64; 8] {
    let l = gell_mann();
    let mut out = [0.0; 8];
    for (k, lk) in l.iter().enumerate() {
        out[k] = hs_inner(lk.matrix(), x.matrix()).expect("3x3").re / 2.0;
    }
    out
}

fn from_coefficients(coeffs: &[f64; 8]) -> HermitianGenerator {
    let l = gell_mann();
    let mut m = CMatrix::zeros(3, 3);
    for (k, lk) in l.iter().enumerate() {
        m += lk.matrix() * Complex64::from(coeffs[k]);
    }
    HermitianGenerator::from_trusted(m)
}

/// Hermitian direction of a nested commutator of `depth` brackets:
/// `(-i)^depth * [..]`, scaled to `tr(X^2) = 2`.
fn nested(depth: usize, k: CMatrix) -> HermitianGenerator {
    let phase = (0..depth).fold(Complex64::new(1.0, 0.0), |acc, _| acc * -I);
    HermitianGenerator::from_trusted(k * phase).normalized().scale(2f64.sqrt())
}

/// The eight generators `lambda_A..lambda_H`, built by evaluating the nested
/// commutators of `lambda_A`, `lambda_B` and normalized to `tr(lambda^2) = 2`.
///
/// Signs: `lambda_C = -i sqrt(2/5)[lambda_A, lambda_B]`, `lambda_D` along
/// `i[lambda_A, lambda_C]`, the rest oriented to overlap positively with
/// [`reference_directions`].
pub fn su3_labeled_basis() -> Result<[HermitianGenerator; 8]> {
    let (la, lb) = su3_control_pair();
    let br = |x: &CMatrix, y: &CMatrix| commutator(x, y).expect("3x3");
    let ab = br(la.matrix(), lb.matrix());
    let raw = [
        nested(1, ab.clone()),
        nested(2, br(la.matrix(), &ab)),
        nested(2, br(lb.matrix(), &ab)),
        nested(3, br(la.matrix(), &br(la.matrix(), &ab))),
        nested(3, br(la.matrix(), &br(lb.matrix(), &ab))),
        nested(3, br(lb.matrix(), &br(lb.matrix(), &ab))),
    ];
    let refs = reference_directions();
    let mut out = vec![la, lb];
    for (x, (_, p)) in raw.into_iter().zip(refs.iter()) {
        let reference = from_coefficients(p);
        let s = hs_inner(reference.matrix(), x.matrix())?.re;
        out.push(if s < 0.0 { x.scale(-1.0) } else { x });
    }
    if rank(&out, 1e-10) != 8 {
        return Err(Error::InvalidArgument("nested commutators are not independent".into()));
    }
    Ok(out.try_into().expect("eight elements"))
}

/// Closed-form direction of `lambda_X` as a matrix.
pub fn reference_direction(label: char) -> Option<HermitianGenerator> {
    reference_directions().iter().find(|(l, _)| *l == label).map(|(_, p)| from_coefficients(p))
}
