//! Exact-coefficient expansion of the generator `A(s)` of `U(s) = exp(-i A(s))`.
//!
//! With `h(s) = sum h_k s^k`, the generator obeys
//! `dA/ds = sum_m B_m/m! (-i)^m ad_A^m h`, with Bernoulli numbers in the
//! `x/(e^x - 1)` convention (`B_1 = -1/2`). Matching powers of `s` gives
//! `n A_n = sum_m (-i)^m B_m/m! [s^(n-1)] ad_A^m h`, which is solved here on
//! formal linear combinations of nested commutators of the symbols `h_k`.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::{Complex, Complex64};
use num_rational::Ratio;
use num_traits::{One, Zero};

use crate::ops::{commutator, CMatrix};

pub type Rational = Ratio<i64>;
pub type Coeff = Complex<Rational>;

/// Highest order of `A(s)` this module expands to.
pub const MAX_ORDER: usize = 5;

/// A nested commutator of the Taylor coefficients `h_k`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Word {
    Leaf(usize),
    Bracket(Box<Word>, Box<Word>),
}

impl Word {
    /// Commutator nesting depth.
    pub fn depth(&self) -> usize {
        match self {
            Word::Leaf(_) => 0,
            Word::Bracket(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    /// Total `s`-degree carried by the leaves.
    pub fn degree(&self) -> usize {
        match self {
            Word::Leaf(k) => *k,
            Word::Bracket(a, b) => a.degree() + b.degree(),
        }
    }

    pub fn evaluate(&self, h: &[CMatrix]) -> CMatrix {
        match self {
            Word::Leaf(k) => h[*k].clone(),
            Word::Bracket(a, b) => commutator(&a.evaluate(h), &b.evaluate(h)).expect("same dimension"),
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Word::Leaf(k) => write!(f, "h{k}"),
            Word::Bracket(a, b) => write!(f, "[{a},{b}]"),
        }
    }
}

/// Formal linear combination of [`Word`]s with exact complex-rational
/// coefficients. Brackets are stored with ordered arguments, using
/// antisymmetry to flip signs.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LieExpr(BTreeMap<Word, Coeff>);

fn cz() -> Coeff {
    Coeff::new(Rational::zero(), Rational::zero())
}

pub fn rational(n: i64, d: i64) -> Coeff {
    Coeff::new(Rational::new(n, d), Rational::zero())
}

fn minus_i() -> Coeff {
    Coeff::new(Rational::zero(), -Rational::one())
}

impl LieExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn leaf(k: usize) -> Self {
        let mut m = BTreeMap::new();
        m.insert(Word::Leaf(k), rational(1, 1));
        Self(m)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Coeff)> {
        self.0.iter()
    }

    fn add_term(&mut self, w: Word, c: Coeff) {
        let entry = self.0.entry(w.clone()).or_insert_with(cz);
        *entry = *entry + c;
        if entry.is_zero() {
            self.0.remove(&w);
        }
    }

    pub fn add(&mut self, other: &LieExpr) {
        for (w, c) in &other.0 {
            self.add_term(w.clone(), *c);
        }
    }

    pub fn scaled(&self, k: Coeff) -> LieExpr {
        let mut out = LieExpr::zero();
        if k.is_zero() {
            return out;
        }
        for (w, c) in &self.0 {
            out.add_term(w.clone(), *c * k);
        }
        out
    }

    pub fn bracket(&self, other: &LieExpr) -> LieExpr {
        let mut out = LieExpr::zero();
        for (wa, ca) in &self.0 {
            for (wb, cb) in &other.0 {
                if wa == wb {
                    continue;
                }
                let c = *ca * *cb;
                if wa < wb {
                    out.add_term(Word::Bracket(Box::new(wa.clone()), Box::new(wb.clone())), c);
                } else {
                    out.add_term(Word::Bracket(Box::new(wb.clone()), Box::new(wa.clone())), -c);
                }
            }
        }
        out
    }

    /// Highest leaf index that appears.
    pub fn max_leaf(&self) -> Option<usize> {
        fn walk(w: &Word) -> usize {
            match w {
                Word::Leaf(k) => *k,
                Word::Bracket(a, b) => walk(a).max(walk(b)),
            }
        }
        self.0.keys().map(walk).max()
    }

    pub fn evaluate(&self, h: &[CMatrix]) -> CMatrix {
        let d = h[0].nrows();
        let mut out = CMatrix::zeros(d, d);
        for (w, c) in &self.0 {
            let k = Complex64::new(to_f64(c.re), to_f64(c.im));
            out += w.evaluate(h) * k;
        }
        out
    }
}

fn to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

impl fmt::Display for LieExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (w, c) in &self.0 {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let (re, im) = (c.re, c.im);
            match (re.is_zero(), im.is_zero()) {
                (false, true) => write!(f, "({re})")?,
                (true, false) => write!(f, "({im})i")?,
                _ => write!(f, "({re} + {im}i)")?,
            }
            write!(f, "{w}")?;
        }
        Ok(())
    }
}

/// Bernoulli numbers `B_0..B_n`, generating function `x/(e^x - 1)`.
pub fn bernoulli(n: usize) -> Vec<Rational> {
    let mut b = vec![Rational::one()];
    for m in 1..=n {
        // sum_{k=0}^{m} C(m+1, k) B_k = 0
        let mut acc = Rational::zero();
        let mut binom: i64 = 1;
        for (k, bk) in b.iter().enumerate().take(m) {
            acc += Rational::from_integer(binom) * bk;
            binom = binom * (m as i64 + 1 - k as i64) / (k as i64 + 1);
        }
        b.push(-acc / Rational::from_integer(m as i64 + 1));
    }
    b
}

fn factorial(n: usize) -> i64 {
    (1..=n as i64).product()
}

/// Symbolic `A_1..A_order` in terms of `h_0..h_{order-1}`.
pub fn generator_terms(order: usize) -> Vec<LieExpr> {
    assert!(order <= MAX_ORDER + 2, "expansion order {order} too large for i64 rationals");
    let b = bernoulli(order);
    let mut a: Vec<LieExpr> = vec![LieExpr::zero()]; // a[0] unused
    for n in 1..=order {
        let p = n - 1;
        // t[m][q] = coefficient of s^q in ad_A^m h, for q <= p
        let mut t: Vec<Vec<LieExpr>> = vec![(0..=p).map(LieExpr::leaf).collect()];
        let mut rhs = t[0][p].clone();
        let mut phase = rational(1, 1);
        for m in 1..=p {
            let prev = &t[m - 1];
            let row: Vec<LieExpr> = (0..=p)
                .map(|q| {
                    let mut acc = LieExpr::zero();
                    for j in 1..=q {
                        acc.add(&a[j].bracket(&prev[q - j]));
                    }
                    acc
                })
                .collect();
            phase = phase * minus_i();
            let k = phase * Coeff::new(b[m] / Rational::from_integer(factorial(m)), Rational::zero());
            rhs.add(&row[p].scaled(k));
            t.push(row);
        }
        a.push(rhs.scaled(rational(1, n as i64)));
    }
    a.remove(0);
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bracket(a: Word, b: Word) -> Word {
        Word::Bracket(Box::new(a), Box::new(b))
    }

    fn coeff(e: &LieExpr, w: &Word) -> Coeff {
        e.terms().find(|(x, _)| *x == w).map(|(_, c)| *c).unwrap_or_else(cz)
    }

    #[test]
    fn bernoulli_numbers() {
        let b = bernoulli(6);
        let want = [(1, 1), (-1, 2), (1, 6), (0, 1), (-1, 30), (0, 1), (1, 42)];
        for (x, (n, d)) in b.iter().zip(want) {
            assert_eq!(*x, Rational::new(n, d));
        }
    }

    #[test]
    fn low_orders() {
        use Word::Leaf;
        let a = generator_terms(4);
        assert_eq!(a[0], LieExpr::leaf(0));
        assert_eq!(a[1], LieExpr::leaf(1).scaled(rational(1, 2)));
        // A3 = h2/3 + (i/12)[h0,h1]
        assert_eq!(a[2].terms().count(), 2);
        assert_eq!(coeff(&a[2], &Leaf(2)), rational(1, 3));
        assert_eq!(
            coeff(&a[2], &bracket(Leaf(0), Leaf(1))),
            Coeff::new(Rational::zero(), Rational::new(1, 12))
        );
        // A4 = h3/4 + (i/12)[h0,h2]
        assert_eq!(coeff(&a[3], &Leaf(3)), rational(1, 4));
        assert_eq!(
            coeff(&a[3], &bracket(Leaf(0), Leaf(2))),
            Coeff::new(Rational::zero(), Rational::new(1, 12))
        );
    }

    #[test]
    fn degrees_are_consistent() {
        let a = generator_terms(5);
        for (n, an) in a.iter().enumerate() {
            for (w, _) in an.terms() {
                // each bracket absorbs one power of s
                assert_eq!(w.degree() + w.depth(), n, "{w} in A{}", n + 1);
            }
        }
    }
}
