//! Truncated power series. Only used by the oracle side of the dynamics checks.

use crate::error::{Error, Result};
use crate::exppoly::ExpPoly;
use crate::Cplx;
use serde::{Deserialize, Serialize};

/// `coeffs[k]` is the coefficient of `z^k`; at most `cap + 1` entries are kept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaylorPoly {
    coeffs: Vec<Cplx>,
    cap: usize,
}

impl TaylorPoly {
    pub fn new(mut coeffs: Vec<Cplx>, cap: usize) -> Result<Self> {
        if coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::NonFinite("Taylor coefficient"));
        }
        coeffs.truncate(cap + 1);
        Ok(TaylorPoly { coeffs, cap })
    }

    pub fn one(cap: usize) -> Self {
        TaylorPoly { coeffs: vec![Cplx::new(1.0, 0.0)], cap }
    }

    pub fn coeffs(&self) -> &[Cplx] {
        &self.coeffs
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, k: usize) -> Cplx {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn eval(&self, z: Cplx) -> Cplx {
        self.coeffs.iter().rev().fold(Cplx::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Taylor coefficients of an exponential polynomial, `sum_i c_i lambda_i^k / k!`.
    pub fn from_exppoly(f: &ExpPoly, cap: usize) -> Self {
        let mut coeffs = vec![Cplx::new(0.0, 0.0); cap + 1];
        for t in f.terms() {
            let mut p = t.coeff;
            for (k, slot) in coeffs.iter_mut().enumerate() {
                if k > 0 {
                    p *= t.freq / k as f64;
                }
                *slot += p;
            }
        }
        TaylorPoly { coeffs, cap }
    }

    /// Product truncated at `cap`.
    pub fn mul_trunc(&self, other: &TaylorPoly, cap: usize) -> TaylorPoly {
        let n = (self.len() + other.len()).saturating_sub(1).min(cap + 1);
        let mut out = vec![Cplx::new(0.0, 0.0); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if i >= n {
                break;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j >= n {
                    break;
                }
                out[i + j] += a * b;
            }
        }
        TaylorPoly { coeffs: out, cap }
    }

    /// `self^q` truncated at `cap`, by binary powering.
    pub fn pow_trunc(&self, mut q: u64, cap: usize) -> TaylorPoly {
        let mut acc = TaylorPoly::one(cap);
        let mut base = TaylorPoly { coeffs: self.coeffs.iter().take(cap + 1).copied().collect(), cap };
        while q > 0 {
            if q & 1 == 1 {
                acc = acc.mul_trunc(&base, cap);
            }
            q >>= 1;
            if q > 0 {
                base = base.mul_trunc(&base, cap);
            }
        }
        acc
    }

    pub fn sub(&self, other: &TaylorPoly) -> TaylorPoly {
        let n = self.len().max(other.len());
        let coeffs = (0..n).map(|k| self.coeff(k) - other.coeff(k)).collect();
        TaylorPoly { coeffs, cap: self.cap.max(other.cap) }
    }

    pub fn l1(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exppoly::Term;

    fn c(re: f64, im: f64) -> Cplx {
        Cplx::new(re, im)
    }

    #[test]
    fn exp_series() {
        let f = ExpPoly::single(c(1.0, 0.0), c(1.0, 0.0));
        let t = TaylorPoly::from_exppoly(&f, 3);
        let want = [1.0, 1.0, 0.5, 1.0 / 6.0];
        for (k, w) in want.iter().enumerate() {
            assert!((t.coeff(k) - c(*w, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn eval_matches_exppoly_inside_radius() {
        let f = ExpPoly::from_terms(vec![Term::new(c(1.0, 2.0), c(0.5, -1.0)), Term::new(c(-3.0, 0.0), c(2.0, 0.0))]);
        let t = TaylorPoly::from_exppoly(&f, 60);
        let z = c(0.4, 0.7);
        assert!((t.eval(z) - f.eval(z).unwrap()).norm() < 1e-12);
    }

    #[test]
    fn pow_matches_exp_of_multiple() {
        // (e^z)^5 = e^{5z}
        let e = TaylorPoly::from_exppoly(&ExpPoly::single(c(1.0, 0.0), c(1.0, 0.0)), 30);
        let p = e.pow_trunc(5, 30);
        let want = TaylorPoly::from_exppoly(&ExpPoly::single(c(1.0, 0.0), c(5.0, 0.0)), 30);
        for k in 0..=30 {
            let scale = want.coeff(k).norm().max(1e-300);
            assert!((p.coeff(k) - want.coeff(k)).norm() / scale < 1e-12, "k={k}");
        }
    }

    #[test]
    fn truncation_respects_cap() {
        let t = TaylorPoly::new(vec![c(1.0, 0.0); 10], 4).unwrap();
        assert_eq!(t.len(), 5);
        assert_eq!(t.pow_trunc(0, 4), TaylorPoly::one(4));
    }
}
