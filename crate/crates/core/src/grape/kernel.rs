//! Propagation and exact gradient, generic over the matrix dimension so
//! that qubits and qutrits run on stack-allocated matrices.

use nalgebra::allocator::Allocator;
use nalgebra::{Const, DefaultAllocator, Dim, DimDiff, DimSub, Dyn, OMatrix, SymmetricEigen, U1};
use num_complex::Complex64;

use crate::models::PhaseControlModel;
use crate::ops::{CMatrix, UnitaryOperator};

type M<D> = OMatrix<Complex64, D, D>;

struct Problem<D: Dim>
where
    DefaultAllocator: Allocator<D, D>,
{
    ga: M<D>,
    gb: M<D>,
    v: M<D>,
}

struct Step<D: Dim>
where
    DefaultAllocator: Allocator<D, D> + Allocator<D>,
{
    values: nalgebra::OVector<f64, D>,
    vectors: M<D>,
    unitary: M<D>,
}

impl<D> Problem<D>
where
    D: Dim + DimSub<U1>,
    DefaultAllocator: Allocator<D, D> + Allocator<D> + Allocator<DimDiff<D, U1>>,
{
    fn h(&self, alpha: f64) -> M<D> {
        &self.ga * Complex64::new(alpha.cos(), 0.0) + &self.gb * Complex64::new(alpha.sin(), 0.0)
    }

    fn dh(&self, alpha: f64) -> M<D> {
        &self.gb * Complex64::new(alpha.cos(), 0.0) - &self.ga * Complex64::new(alpha.sin(), 0.0)
    }

    fn step(&self, alpha: f64, dt: f64) -> Step<D> {
        let eig = SymmetricEigen::new(self.h(alpha));
        let mut scaled = eig.eigenvectors.clone();
        for (j, lam) in eig.eigenvalues.iter().enumerate() {
            let f = Complex64::from_polar(1.0, -lam * dt);
            for x in scaled.column_mut(j).iter_mut() {
                *x *= f;
            }
        }
        let unitary = &scaled * eig.eigenvectors.adjoint();
        Step { values: eig.eigenvalues, vectors: eig.eigenvectors, unitary }
    }

    fn overlap(&self, u: &M<D>) -> Complex64 {
        self.v.iter().zip(u.iter()).map(|(a, b)| a.conj() * b).sum()
    }

    fn identity(&self) -> M<D> {
        let (r, c) = self.ga.shape_generic();
        M::<D>::identity_generic(r, c)
    }

    /// `tr(V^dag U)`.
    fn forward(&self, values: &[f64], dt: f64) -> Complex64 {
        let mut u = self.identity();
        for &a in values {
            u = self.step(a, dt).unitary * u;
        }
        self.overlap(&u)
    }

    /// `(g, dg/dalpha_k)` with `g = tr(V^dag U)`.
    fn overlap_gradient(&self, values: &[f64], dt: f64) -> (Complex64, Vec<Complex64>) {
        let n = values.len();
        let steps: Vec<Step<D>> = values.iter().map(|&a| self.step(a, dt)).collect();
        let mut prefix = Vec::with_capacity(n + 1);
        prefix.push(self.identity());
        for s in &steps {
            let next = &s.unitary * prefix.last().expect("nonempty");
            prefix.push(next);
        }
        let mut suffix = vec![self.identity(); n + 1];
        for k in (0..n).rev() {
            suffix[k] = &suffix[k + 1] * &steps[k].unitary;
        }
        let g = self.overlap(&prefix[n]);
        let vdag = self.v.adjoint();
        let d = self.ga.nrows();
        let grads = steps
            .iter()
            .enumerate()
            .map(|(k, s)| {
                // tr(M dU_k), M = R_k V^dag L_k, dU_k = W (Gamma o W^dag dH W) W^dag
                let w = &s.vectors;
                let wdag = w.adjoint();
                let x = &wdag * self.dh(values[k]) * w;
                let mw = &wdag * (&prefix[k] * &vdag * &suffix[k + 1]) * w;
                let lam = &s.values;
                let mut dg = Complex64::new(0.0, 0.0);
                for a in 0..d {
                    for b in 0..d {
                        // divided difference of exp(-i x dt) between lam_a and lam_b
                        let half = (lam[a] - lam[b]) * dt / 2.0;
                        let sinc = if half.abs() < 1e-8 { 1.0 - half * half / 6.0 } else { half.sin() / half };
                        let gamma = Complex64::new(0.0, -dt)
                            * Complex64::from_polar(1.0, -(lam[a] + lam[b]) * dt / 2.0)
                            * sinc;
                        dg += mw[(b, a)] * gamma * x[(a, b)];
                    }
                }
                dg
            })
            .collect();
        (g, grads)
    }
}

fn convert<D: Dim>(m: &CMatrix, d: D) -> M<D>
where
    DefaultAllocator: Allocator<D, D>,
{
    M::<D>::from_iterator_generic(d, d, m.iter().cloned())
}

macro_rules! dispatch {
    ($model:expr, $v:expr, |$p:ident| $body:expr) => {{
        let (ga, gb) = $model.scaled_generators();
        match $model.dim() {
            2 => {
                let d = Const::<2>;
                let $p = Problem { ga: convert(ga.matrix(), d), gb: convert(gb.matrix(), d), v: convert($v.matrix(), d) };
                $body
            }
            3 => {
                let d = Const::<3>;
                let $p = Problem { ga: convert(ga.matrix(), d), gb: convert(gb.matrix(), d), v: convert($v.matrix(), d) };
                $body
            }
            n => {
                let d = Dyn(n);
                let $p = Problem { ga: convert(ga.matrix(), d), gb: convert(gb.matrix(), d), v: convert($v.matrix(), d) };
                $body
            }
        }
    }};
}

pub(super) fn overlap(model: &PhaseControlModel, v: &UnitaryOperator, values: &[f64], dt: f64) -> Complex64 {
    dispatch!(model, v, |p| p.forward(values, dt))
}

pub(super) fn overlap_gradient(
    model: &PhaseControlModel,
    v: &UnitaryOperator,
    values: &[f64],
    dt: f64,
) -> (Complex64, Vec<Complex64>) {
    dispatch!(model, v, |p| p.overlap_gradient(values, dt))
}
