//! Derivatives by the Cauchy integral, discretised with the trapezoid rule on a circle.
//!
//! For an entire function the trapezoid rule on `K` points is exact up to aliasing of
//! coefficients `n + K, n + 2K, ...`, so the error falls geometrically in `K`. Each run
//! is repeated with `2K` points and the difference is the reported error estimate.

use crate::error::{Error, Result};
use crate::symbol::SymbolSpec;
use crate::taylor::TaylorPoly;
use crate::Cplx;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CauchyOptions {
    /// Circle radii. With several radii each coefficient is taken from the radius
    /// with the smallest rounding bound `eps * max|f| / r^n`.
    pub radii: Vec<f64>,
    /// Base sample count `K`; the check run uses `2K`.
    pub samples: usize,
    /// Acceptance: `|coef(K) - coef(2K)| r^n <= tol * max|f|` on that circle.
    pub tol: f64,
}

impl Default for CauchyOptions {
    fn default() -> Self {
        CauchyOptions { radii: vec![0.5], samples: 64, tol: 1e-10 }
    }
}

impl CauchyOptions {
    /// Settings for long Taylor expansions on symbols of moderate type.
    pub fn oracle() -> Self {
        CauchyOptions { radii: vec![0.5, 1.0, 2.0, 4.0, 8.0, 16.0], samples: 256, tol: 1e-10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Derivatives {
    pub center: Cplx,
    /// `values[n]` approximates the n-th derivative at the center
    pub values: Vec<Cplx>,
    /// `|values(K) - values(2K)|` per order
    pub errors: Vec<f64>,
}

struct CircleFit {
    coefs: Vec<Cplx>,
    max_abs: f64,
}

fn circle_coefs(phi: &SymbolSpec, center: Cplx, r: f64, k: usize, n_max: usize) -> Result<CircleFit> {
    let vals: Vec<Cplx> = (0..k)
        .map(|j| phi.eval(center + Cplx::from_polar(r, TAU * j as f64 / k as f64)))
        .collect::<Result<_>>()?;
    let max_abs = vals.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut coefs = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let mut acc = Cplx::new(0.0, 0.0);
        for (j, v) in vals.iter().enumerate() {
            // reduce j*n mod k before forming the angle
            let idx = (j * n) % k;
            acc += v * Cplx::from_polar(1.0, -TAU * idx as f64 / k as f64);
        }
        coefs.push(acc / (k as f64 * r.powi(n as i32)));
    }
    Ok(CircleFit { coefs, max_abs })
}

/// Taylor coefficients `f^(n)(center) / n!` for `n <= n_max`, with error estimates.
pub fn taylor_coefs_at(phi: &SymbolSpec, center: Cplx, n_max: usize, opts: &CauchyOptions) -> Result<(Vec<Cplx>, Vec<f64>)> {
    if opts.radii.is_empty() || opts.radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(Error::Invalid("Cauchy radii must be positive".into()));
    }
    // aliasing needs K comfortably above the highest order
    let mut k = opts.samples.max(8);
    while k < 2 * (n_max + 1) {
        k *= 2;
    }
    let mut best: Vec<Option<(f64, Cplx, f64, bool)>> = vec![None; n_max + 1];
    let mut last_err = None;
    for &r in &opts.radii {
        let fit = match (circle_coefs(phi, center, r, k, n_max), circle_coefs(phi, center, r, 2 * k, n_max)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => {
                last_err = Some(e);
                continue;
            }
        };
        let (a, b) = fit;
        let scale = a.max_abs.max(b.max_abs).max(f64::MIN_POSITIVE);
        #[allow(clippy::needless_range_loop)]
        for n in 0..=n_max {
            let rn = r.powi(n as i32);
            let diff = (a.coefs[n] - b.coefs[n]).norm();
            let bound = (f64::EPSILON * scale / rn).max(diff);
            let ok = diff * rn <= opts.tol * scale;
            let better = match best[n] {
                None => true,
                Some((bb, _, _, bok)) => (ok && !bok) || (ok == bok && bound < bb),
            };
            if better {
                best[n] = Some((bound, b.coefs[n], diff, ok));
            }
        }
    }
    let mut coefs = Vec::with_capacity(n_max + 1);
    let mut errs = Vec::with_capacity(n_max + 1);
    for (n, slot) in best.into_iter().enumerate() {
        match slot {
            None => return Err(last_err.unwrap_or(Error::Invalid("no usable Cauchy circle".into()))),
            Some((_, c, diff, ok)) => {
                if !ok {
                    return Err(Error::NonConvergence { order: n, diff, tol: opts.tol });
                }
                coefs.push(c);
                errs.push(diff);
            }
        }
    }
    Ok((coefs, errs))
}

/// Derivatives `phi^(n)(center)` for `n <= n_max`.
pub fn derivs_at(phi: &SymbolSpec, center: Cplx, n_max: usize, opts: &CauchyOptions) -> Result<Derivatives> {
    let (coefs, errs) = taylor_coefs_at(phi, center, n_max, opts)?;
    let mut fact = 1.0;
    let mut values = Vec::with_capacity(n_max + 1);
    let mut errors = Vec::with_capacity(n_max + 1);
    for (n, (c, e)) in coefs.into_iter().zip(errs).enumerate() {
        if n > 0 {
            fact *= n as f64;
        }
        values.push(c * fact);
        errors.push(e * fact);
    }
    Ok(Derivatives { center, values, errors })
}

/// Derivatives at the origin with the default circle (radius 0.5, 64 and 128 samples).
pub fn derivs_at_zero(phi: &SymbolSpec, n_max: usize) -> Result<Derivatives> {
    derivs_at(phi, Cplx::new(0.0, 0.0), n_max, &CauchyOptions::default())
}

pub fn to_taylor(phi: &SymbolSpec, k: usize) -> Result<TaylorPoly> {
    to_taylor_with(phi, k, &CauchyOptions::default())
}

pub fn to_taylor_with(phi: &SymbolSpec, k: usize, opts: &CauchyOptions) -> Result<TaylorPoly> {
    let (coefs, _) = taylor_coefs_at(phi, Cplx::new(0.0, 0.0), k, opts)?;
    TaylorPoly::new(coefs, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exppoly::{ExpPoly, Term};

    fn c(re: f64, im: f64) -> Cplx {
        Cplx::new(re, im)
    }

    #[test]
    fn exp_all_ones() {
        let d = derivs_at_zero(&SymbolSpec::exp(c(1.0, 0.0)), 6).unwrap();
        for v in &d.values {
            assert!((v - c(1.0, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn cos_first_three() {
        let d = derivs_at_zero(&SymbolSpec::cos(), 2).unwrap();
        let want = [c(1.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)];
        for (v, w) in d.values.iter().zip(want) {
            assert!((v - w).norm() < 1e-10);
        }
    }

    #[test]
    fn exppoly_symbolic_agreement() {
        let f = ExpPoly::from_terms(vec![
            Term::new(c(0.5, -0.25), c(1.2, 0.4)),
            Term::new(c(-1.0, 0.0), c(-0.3, 0.9)),
            Term::new(c(0.2, 0.7), c(0.0, -1.5)),
        ]);
        let phi = SymbolSpec::ExpPoly { terms: f.clone() };
        // the default small circle loses digits as n! / r^n grows; the multi-radius
        // options keep higher orders inside the same tolerance
        let d = derivs_at_zero(&phi, 4).unwrap();
        let wide = derivs_at(&phi, c(0.0, 0.0), 12, &CauchyOptions::oracle()).unwrap();
        for n in 0..=12 {
            let exact: Cplx = f.terms().iter().map(|t| t.coeff * t.freq.powu(n as u32)).sum();
            if n <= 4 {
                assert!((d.values[n] - exact).norm() < 1e-10, "n={n}");
            }
            assert!((wide.values[n] - exact).norm() < 1e-10, "n={n}");
        }
    }

    #[test]
    fn taylor_of_exp_and_cos() {
        let t = to_taylor(&SymbolSpec::exp(c(1.0, 0.0)), 3).unwrap();
        for (k, w) in [1.0, 1.0, 0.5, 1.0 / 6.0].iter().enumerate() {
            assert!((t.coeff(k) - c(*w, 0.0)).norm() < 1e-12);
        }
        let t = to_taylor(&SymbolSpec::cos(), 4).unwrap();
        for (k, w) in [1.0, 0.0, -0.5, 0.0, 1.0 / 24.0].iter().enumerate() {
            assert!((t.coeff(k) - c(*w, 0.0)).norm() < 1e-12);
        }
        let t = to_taylor(&SymbolSpec::polynomial(vec![c(1.0, 0.0)]), 3).unwrap();
        assert!((t.coeff(0) - c(1.0, 0.0)).norm() < 1e-15);
        assert!(t.coeffs()[1..].iter().all(|v| v.norm() < 1e-15));
    }

    #[test]
    fn off_center() {
        let d = derivs_at(&SymbolSpec::exp(c(2.0, 0.0)), c(0.3, -0.2), 3, &CauchyOptions::default()).unwrap();
        let base = (c(2.0, 0.0) * c(0.3, -0.2)).exp();
        for n in 0..=3 {
            let want = base * 2f64.powi(n as i32);
            assert!((d.values[n] - want).norm() < 1e-9 * want.norm());
        }
    }

    #[test]
    fn fast_growth_reports_non_convergence() {
        let phi = SymbolSpec::exp(c(200.0, 0.0));
        let err = derivs_at_zero(&phi, 4).unwrap_err();
        assert!(matches!(err, Error::NonConvergence { .. }), "{err:?}");
    }

    #[test]
    fn oracle_options_reach_high_order() {
        let t = to_taylor_with(&SymbolSpec::cos(), 80, &CauchyOptions::oracle()).unwrap();
        let mut f = 1.0;
        for k in 0..=80usize {
            if k > 0 {
                f *= k as f64;
            }
            let want = match k % 4 {
                0 => 1.0 / f,
                2 => -1.0 / f,
                _ => 0.0,
            };
            assert!((t.coeff(k).re - want).abs() < 1e-15 + 1e-9 * want.abs(), "k={k}");
        }
    }
}
