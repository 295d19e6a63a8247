//! Finite sums of complex exponentials, `sum c_i exp(lambda_i z)`.
//!
//! These are closed under multiplication and are eigenvector combinations for every
//! convolution operator, so they carry the exact dynamics.

use crate::error::{Error, Result};
use crate::Cplx;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

/// Frequencies closer than this are treated as the same frequency.
pub const MERGE_TOL: f64 = 1e-12;

/// Largest `|Re(exponent)|` accepted before `exp` is considered out of range.
pub const EXP_GUARD: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub coeff: Cplx,
    pub freq: Cplx,
}

impl Term {
    pub fn new(coeff: Cplx, freq: Cplx) -> Self {
        Term { coeff, freq }
    }
}

/// Canonical exponential polynomial: terms sorted by `(freq.re, freq.im)`, frequencies
/// pairwise distinct, no zero coefficients. The empty list is the zero function.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<Term>", into = "Vec<Term>")]
pub struct ExpPoly {
    terms: Vec<Term>,
}

fn freq_order(a: &Cplx, b: &Cplx) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

fn finite(z: Cplx) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// `exp(w)` with the range guard applied to `Re(w)`.
pub fn guarded_exp(w: Cplx, bound: f64) -> Result<Cplx> {
    if !finite(w) {
        return Err(Error::NonFinite("exponent"));
    }
    if w.re.abs() > bound {
        return Err(Error::Range { exponent: w, bound });
    }
    Ok(w.exp())
}

impl ExpPoly {
    pub fn zero() -> Self {
        ExpPoly { terms: Vec::new() }
    }

    pub fn constant(c: Cplx) -> Self {
        Self::single(c, Cplx::new(0.0, 0.0))
    }

    pub fn single(coeff: Cplx, freq: Cplx) -> Self {
        Self::from_terms(vec![Term::new(coeff, freq)])
    }

    /// Builds the canonical form: sort, merge frequencies within [`MERGE_TOL`], drop
    /// exact zero coefficients. Panics on non-finite input; use `try_from_terms` to
    /// get an error instead.
    pub fn from_terms(terms: Vec<Term>) -> Self {
        Self::try_from_terms(terms).expect("ExpPoly terms must be finite")
    }

    pub fn try_from_terms(terms: Vec<Term>) -> Result<Self> {
        if terms.iter().any(|t| !finite(t.coeff) || !finite(t.freq)) {
            return Err(Error::NonFinite("ExpPoly term"));
        }
        Ok(ExpPoly { terms: canonicalize(terms) })
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_freq_modulus(&self) -> f64 {
        self.terms.iter().map(|t| t.freq.norm()).fold(0.0, f64::max)
    }

    pub fn coeff_l1(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.norm()).sum()
    }

    pub fn eval(&self, z: Cplx) -> Result<Cplx> {
        self.eval_with_bound(z, EXP_GUARD)
    }

    pub fn eval_with_bound(&self, z: Cplx, bound: f64) -> Result<Cplx> {
        let mut acc = Cplx::new(0.0, 0.0);
        for t in &self.terms {
            acc += t.coeff * guarded_exp(t.freq * z, bound)?;
        }
        Ok(acc)
    }

    pub fn mul(&self, other: &ExpPoly) -> ExpPoly {
        let mut out = Vec::with_capacity(self.len() * other.len());
        for a in &self.terms {
            for b in &other.terms {
                out.push(Term::new(a.coeff * b.coeff, a.freq + b.freq));
            }
        }
        ExpPoly { terms: canonicalize(out) }
    }

    /// `f^n` as a left fold of [`ExpPoly::mul`]; `f^0` is the constant 1.
    pub fn pow(&self, n: u32) -> ExpPoly {
        if n == 0 {
            return ExpPoly::constant(Cplx::new(1.0, 0.0));
        }
        let mut acc = self.clone();
        for _ in 1..n {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn add(&self, other: &ExpPoly) -> ExpPoly {
        let mut v = self.terms.clone();
        v.extend_from_slice(&other.terms);
        ExpPoly { terms: canonicalize(v) }
    }

    pub fn sub(&self, other: &ExpPoly) -> ExpPoly {
        self.add(&other.scale(Cplx::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: Cplx) -> ExpPoly {
        let v = self.terms.iter().map(|t| Term::new(t.coeff * s, t.freq)).collect();
        ExpPoly { terms: canonicalize(v) }
    }

    /// Replace every term `(c, lambda)` by `(g(c, lambda), lambda)`.
    pub fn map_coeffs(&self, mut g: impl FnMut(Cplx, Cplx) -> Cplx) -> ExpPoly {
        let v = self.terms.iter().map(|t| Term::new(g(t.coeff, t.freq), t.freq)).collect();
        ExpPoly { terms: canonicalize(v) }
    }
}

fn canonicalize(mut terms: Vec<Term>) -> Vec<Term> {
    terms.sort_by(|a, b| freq_order(&a.freq, &b.freq));
    let mut out: Vec<Term> = Vec::with_capacity(terms.len());
    for t in terms {
        // scan back over the run whose real part is within tolerance
        let mut hit = None;
        for (k, o) in out.iter().enumerate().rev() {
            if t.freq.re - o.freq.re > MERGE_TOL {
                break;
            }
            if (t.freq - o.freq).norm() <= MERGE_TOL {
                hit = Some(k);
                break;
            }
        }
        match hit {
            Some(k) => out[k].coeff += t.coeff,
            None => out.push(t),
        }
    }
    out.retain(|t| t.coeff != Cplx::new(0.0, 0.0));
    out
}

impl TryFrom<Vec<Term>> for ExpPoly {
    type Error = Error;
    fn try_from(v: Vec<Term>) -> Result<Self> {
        ExpPoly::try_from_terms(v)
    }
}

impl From<ExpPoly> for Vec<Term> {
    fn from(p: ExpPoly) -> Self {
        p.terms
    }
}

/// Pointwise evaluation, `sum coeff_i * exp(freq_i * z)`.
pub fn eval_exppoly(f: &ExpPoly, z: Cplx) -> Result<Cplx> {
    f.eval(z)
}

pub fn mul_exppoly(f: &ExpPoly, g: &ExpPoly) -> ExpPoly {
    f.mul(g)
}

pub fn pow_exppoly(f: &ExpPoly, n: u32) -> ExpPoly {
    f.pow(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Cplx {
        Cplx::new(re, im)
    }

    #[test]
    fn eval_trivial_cases() {
        assert_eq!(ExpPoly::zero().eval(c(3.0, 4.0)).unwrap(), c(0.0, 0.0));
        assert_eq!(ExpPoly::constant(c(1.0, 0.0)).eval(c(-2.0, 7.5)).unwrap(), c(1.0, 0.0));
        assert_eq!(ExpPoly::single(c(2.0, 0.0), c(1.0, 0.0)).eval(c(0.0, 0.0)).unwrap(), c(2.0, 0.0));
    }

    #[test]
    fn overflow_is_range_error() {
        let f = ExpPoly::single(c(1.0, 0.0), c(1.0, 0.0));
        assert!(matches!(f.eval(c(701.0, 0.0)), Err(Error::Range { .. })));
        assert!(f.eval_with_bound(c(701.0, 0.0), 710.0).is_ok());
    }

    #[test]
    fn single_exponentials_multiply_by_adding_frequencies() {
        let l = c(0.3, -1.0);
        let m = c(2.0, 0.5);
        let p = ExpPoly::single(c(1.0, 0.0), l).mul(&ExpPoly::single(c(1.0, 0.0), m));
        assert_eq!(p.terms(), &[Term::new(c(1.0, 0.0), l + m)]);
    }

    #[test]
    fn times_zero_is_zero() {
        let f = ExpPoly::single(c(2.0, 1.0), c(1.0, 1.0));
        assert!(f.mul(&ExpPoly::zero()).is_zero());
    }

    #[test]
    fn binomial_square() {
        let f = ExpPoly::from_terms(vec![Term::new(c(1.0, 0.0), c(0.0, 0.0)), Term::new(c(1.0, 0.0), c(1.0, 0.0))]);
        let sq = f.mul(&f);
        let want = vec![
            Term::new(c(1.0, 0.0), c(0.0, 0.0)),
            Term::new(c(2.0, 0.0), c(1.0, 0.0)),
            Term::new(c(1.0, 0.0), c(2.0, 0.0)),
        ];
        assert_eq!(sq.terms(), want.as_slice());
    }

    #[test]
    fn pow_edge_cases() {
        let l = c(0.5, 0.25);
        let f = ExpPoly::single(c(1.0, 0.0), l);
        assert_eq!(f.pow(4).terms(), &[Term::new(c(1.0, 0.0), l * 4.0)]);
        assert_eq!(f.pow(0), ExpPoly::constant(c(1.0, 0.0)));
    }

    #[test]
    fn merge_and_drop() {
        let f = ExpPoly::from_terms(vec![
            Term::new(c(1.0, 0.0), c(1.0, 0.0)),
            Term::new(c(-1.0, 0.0), c(1.0 + 1e-13, 0.0)),
            Term::new(c(3.0, 0.0), c(-1.0, 2.0)),
        ]);
        assert_eq!(f.len(), 1);
        assert_eq!(f.terms()[0].freq, c(-1.0, 2.0));
    }

    #[test]
    fn non_adjacent_near_duplicates_merge() {
        // sorted order puts (1e-13, 0) between the two near-equal frequencies
        let f = ExpPoly::from_terms(vec![
            Term::new(c(1.0, 0.0), c(0.0, 5.0)),
            Term::new(c(1.0, 0.0), c(1e-13, 0.0)),
            Term::new(c(1.0, 0.0), c(2e-13, 5.0)),
        ]);
        assert_eq!(f.len(), 2);
    }

    #[test]
    fn rejects_nan() {
        assert!(ExpPoly::try_from_terms(vec![Term::new(c(f64::NAN, 0.0), c(0.0, 0.0))]).is_err());
    }

    #[test]
    fn serde_round_trip_is_bit_exact() {
        let f = ExpPoly::from_terms(vec![
            Term::new(c(0.1, -1.0 / 3.0), c(std::f64::consts::PI, 1e-300)),
            Term::new(c(2.0f64.sqrt(), 0.0), c(-0.7, 0.2)),
        ]);
        let s = serde_json::to_string(&f).unwrap();
        let g: ExpPoly = serde_json::from_str(&s).unwrap();
        assert_eq!(f, g);
        assert!(s.starts_with("[{\"coeff\":["));
    }
}
