//! Decision tree for unimodular symbols, with the evidence behind each verdict.

use crate::derivs::{derivs_at_zero, to_taylor};
use crate::error::{Error, Result};
use crate::grid::geometric_grid;
use crate::growth::{check_tma_conditions, default_step_grid, estimate_order_type, find_arith_progression};
use crate::symbol::{degree, Catalog, Genus, GrowthClass, SymbolSpec};
use crate::zeros::{summarize_zeros, ZeroSetSummary};
use crate::Cplx;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// `||phi(0)| - 1|` allowed before a symbol counts as non-unimodular.
pub const UNIMODULAR_TOL: f64 = 1e-9;
/// `|phi'' phi - phi'^2|` at the origin must exceed this.
pub const SECOND_DERIV_TOL: f64 = 1e-6;
/// `|sum z_n^-2|` at or below this is treated as zero.
pub const ZERO_SUM_TOL: f64 = 1e-9;
/// Tolerance for the coefficient conditions of the exponential-times-polynomial branch.
pub const COEFF_TOL: f64 = 1e-12;
pub const DEFAULT_M_MAX: usize = 8;
const RAY_DIRECTIONS: usize = 72;
const PROGRESSION_DIRECTIONS: usize = 360;
const PROGRESSION_T_MAX: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    HasAlgebra,
    NoAlgebra,
    Unknown,
}

/// Which argument produced the verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    /// non-constant and of subexponential growth
    Subexponential,
    /// exponential growth and no zeros
    ZeroFree,
    /// `e^{az} p(z)` with the coefficient condition on `p`
    ExpTimesPolynomial,
    /// canonical product with `sum 1/|z_n|` finite
    CanonicalProductConvergent,
    /// canonical product with `sum 1/|z_n|` infinite and a non-zero exponent
    CanonicalProductDivergent,
    /// non-degenerate second derivative plus long progressions in `phi^{-1}(D)`
    SecondDerivativeProgression,
    /// a ray where `|phi| < 1` near 0 and later outgrows the indicator
    RayGrowth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Confidence {
    Exact,
    Numerical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvidenceValue {
    Real(f64),
    Complex(Cplx),
    Flag(bool),
    Count(u64),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    pub check: String,
    pub value: EvidenceValue,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub outcome: Outcome,
    pub route: Option<Route>,
    pub evidence: Vec<Evidence>,
    pub confidence: Confidence,
    /// `phi(0)`; the classifier works with `phi / phi(0)`
    pub rotation: Cplx,
}

struct Builder {
    evidence: Vec<Evidence>,
    rotation: Cplx,
}

impl Builder {
    fn push(&mut self, check: impl Into<String>, value: EvidenceValue) {
        self.evidence.push(Evidence { check: check.into(), value });
    }

    fn finish(self, outcome: Outcome, route: Option<Route>, confidence: Confidence) -> Verdict {
        Verdict { outcome, route, evidence: self.evidence, confidence, rotation: self.rotation }
    }

    fn unknown(mut self, why: impl Into<String>) -> Verdict {
        self.push("unknown_reason", EvidenceValue::Text(why.into()));
        self.finish(Outcome::Unknown, None, Confidence::Numerical)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecondDerivativeEvidence {
    /// `phi(0), phi'(0), phi''(0)` of the normalized symbol
    pub derivs: [Cplx; 3],
    pub second_deriv_margin: f64,
    /// `(m, a)` with `|phi(j a)| < 1` for `j = 1..=m`, or `None`
    pub progressions: Vec<(usize, Option<Cplx>)>,
    pub passed: bool,
}

/// Second-derivative margin and progressions `{j a}_{j <= m}` inside `phi^{-1}(D)` for
/// `m = 2..=m_max`.
pub fn check_t2(phi: &SymbolSpec, m_max: usize) -> Result<SecondDerivativeEvidence> {
    let d = derivs_at_zero(phi, 2)?;
    let phi0 = d.values[0];
    if (phi0.norm() - 1.0).abs() > UNIMODULAR_TOL {
        return Err(Error::Normalization(phi0.norm()));
    }
    let derivs = [d.values[0] / phi0, d.values[1] / phi0, d.values[2] / phi0];
    let margin = (derivs[2] * derivs[0] - derivs[1] * derivs[1]).norm();
    let grid = default_step_grid(PROGRESSION_T_MAX);
    let mut progressions = Vec::new();
    let mut all_found = true;
    for m in 2..=m_max.max(2) {
        // rotating phi by a unimodular constant does not change |phi|
        let a = if all_found { find_arith_progression(phi, m, PROGRESSION_DIRECTIONS, &grid) } else { None };
        all_found &= a.is_some();
        progressions.push((m, a));
    }
    Ok(SecondDerivativeEvidence { derivs, second_deriv_margin: margin, progressions, passed: margin > SECOND_DERIV_TOL && all_found })
}

/// `phi(a z)` with structure transformed in closed form.
pub fn rescale_symbol(phi: &SymbolSpec, a: Cplx) -> Result<SymbolSpec> {
    if a.norm() == 0.0 || !(a.re.is_finite() && a.im.is_finite()) {
        return Err(Error::Invalid("rescale factor must be finite and non-zero".into()));
    }
    Ok(phi.rescale(a))
}

/// Exponent and polynomial of an `e^{az} p(z)` form.
fn exp_poly_form(phi: &SymbolSpec) -> Option<(Cplx, Vec<Cplx>)> {
    match phi {
        SymbolSpec::Catalog(Catalog::ExpTimesPoly { a, poly }) => Some((*a, poly.clone())),
        SymbolSpec::Catalog(Catalog::Exp { a }) => Some((*a, vec![Cplx::new(1.0, 0.0)])),
        SymbolSpec::PolyTimesExp { poly, a, .. } => Some((*a, poly.clone())),
        _ => None,
    }
}

fn structurally_zero_free(phi: &SymbolSpec) -> bool {
    match phi {
        SymbolSpec::Catalog(Catalog::Exp { .. }) => true,
        SymbolSpec::Catalog(Catalog::ExpTimesPoly { poly, .. }) | SymbolSpec::PolyTimesExp { poly, .. } => {
            degree(poly).unwrap_or(0) == 0
        }
        SymbolSpec::ExpPoly { terms } => terms.len() == 1,
        SymbolSpec::HadamardTrunc { zeros, truncation, .. } => *truncation == 0 || zeros.is_empty(),
        _ => false,
    }
}

enum Growth {
    Sub(Confidence),
    Exponential(Confidence),
    NotExponentialType,
    Inconclusive,
}

const GROWTH_R_LO: f64 = 2.0;
const GROWTH_R_HI: f64 = 32.0;

fn decide_growth(phi: &SymbolSpec, b: &mut Builder) -> Growth {
    match phi.growth_class() {
        GrowthClass::Constant => Growth::Inconclusive,
        GrowthClass::Subexponential => {
            b.push("growth_class", EvidenceValue::Text("subexponential".into()));
            Growth::Sub(Confidence::Exact)
        }
        GrowthClass::ExponentialType(t) => {
            b.push("growth_class.type", EvidenceValue::Real(t));
            Growth::Exponential(Confidence::Exact)
        }
        GrowthClass::NotExponentialType => {
            b.push("growth_class", EvidenceValue::Text("not_exponential_type".into()));
            Growth::NotExponentialType
        }
        GrowthClass::Undetermined => {
            let grid = geometric_grid(GROWTH_R_LO, GROWTH_R_HI, 24);
            match estimate_order_type(phi, &grid) {
                Ok(g) => {
                    b.push("estimate_order_type.order", EvidenceValue::Real(g.order));
                    b.push("estimate_order_type.type", EvidenceValue::Real(g.type_));
                    b.push("estimate_order_type.quality", EvidenceValue::Real(g.quality));
                    if g.degenerate {
                        Growth::Inconclusive
                    } else if g.order < 0.9 || (g.type_valid && g.type_ < 0.05) {
                        Growth::Sub(Confidence::Numerical)
                    } else if g.type_valid {
                        Growth::Exponential(Confidence::Numerical)
                    } else {
                        Growth::NotExponentialType
                    }
                }
                Err(e) => {
                    b.push("estimate_order_type.error", EvidenceValue::Text(e.to_string()));
                    Growth::Inconclusive
                }
            }
        }
    }
}

/// Verdict for a symbol with `|phi(0)| = 1`. Never guesses: anything outside the known
/// routes is `Unknown`.
pub fn classify(phi: &SymbolSpec, zeros: Option<&ZeroSetSummary>) -> Verdict {
    let mut b = Builder { evidence: Vec::new(), rotation: Cplx::new(1.0, 0.0) };
    if let Err(e) = phi.validate() {
        return b.unknown(format!("invalid symbol: {e}"));
    }
    let phi0 = match phi.eval(Cplx::new(0.0, 0.0)) {
        Ok(v) => v,
        Err(e) => return b.unknown(format!("phi(0) failed: {e}")),
    };
    b.rotation = phi0;
    b.push("phi(0)", EvidenceValue::Complex(phi0));
    if (phi0.norm() - 1.0).abs() > UNIMODULAR_TOL {
        return b.unknown(format!("|phi(0)| = {} is not 1", phi0.norm()));
    }
    if phi.growth_class() == GrowthClass::Constant {
        return b.unknown("constant symbol");
    }

    let growth = decide_growth(phi, &mut b);
    let growth_conf = match growth {
        Growth::Sub(conf) => return b.finish(Outcome::HasAlgebra, Some(Route::Subexponential), conf),
        Growth::NotExponentialType => return b.unknown("symbol is not of exponential type"),
        Growth::Inconclusive => return b.unknown("growth could not be decided"),
        Growth::Exponential(conf) => conf,
    };

    if structurally_zero_free(phi) {
        b.push("zero_free", EvidenceValue::Flag(true));
        return b.finish(Outcome::NoAlgebra, Some(Route::ZeroFree), growth_conf);
    }

    if let Some((a, poly)) = exp_poly_form(phi) {
        let p0 = poly[0];
        let coef = |k: usize| poly.get(k).copied().unwrap_or_default() / p0;
        let (a1, a2) = (coef(1), coef(2));
        b.push("poly.a1", EvidenceValue::Complex(a1));
        b.push("poly.a2", EvidenceValue::Complex(a2));
        b.push("exp.a", EvidenceValue::Complex(a));
        let ratio = a1 / a;
        let non_real = ratio.im.abs() > COEFF_TOL * ratio.norm().max(1.0);
        let curvature = (2.0 * a2 - a1 * a1).norm();
        b.push("a1/a non-real", EvidenceValue::Flag(non_real));
        b.push("|2 a2 - a1^2|", EvidenceValue::Real(curvature));
        if a.norm() > 0.0 && (non_real || curvature > COEFF_TOL) {
            return b.finish(Outcome::HasAlgebra, Some(Route::ExpTimesPolynomial), Confidence::Exact);
        }
    }

    if let SymbolSpec::HadamardTrunc { a, zeros: zl, genus, truncation, .. } = phi {
        let own;
        let summary = match zeros {
            Some(s) => s,
            None => {
                own = summarize_zeros(zl, *truncation);
                &own
            }
        };
        b.push("zeros.sum_inv_sq", EvidenceValue::Complex(summary.sum_inv_sq));
        b.push("zeros.sum_inv_abs", EvidenceValue::Real(summary.sum_inv_abs));
        b.push("zeros.truncation", EvidenceValue::Count(summary.truncation as u64));
        b.push("zeros.genus_guess", EvidenceValue::Count(summary.genus_guess.as_u8() as u64));
        if summary.sum_inv_sq.norm() <= ZERO_SUM_TOL {
            return b.unknown("sum of z_n^-2 vanishes on the supplied zeros");
        }
        match genus {
            Genus::Zero => {
                return b.finish(Outcome::HasAlgebra, Some(Route::CanonicalProductConvergent), Confidence::Exact);
            }
            Genus::One if a.norm() > 0.0 => {
                return b.finish(Outcome::HasAlgebra, Some(Route::CanonicalProductDivergent), Confidence::Exact);
            }
            Genus::One => {}
        }
    }

    match check_t2(phi, DEFAULT_M_MAX) {
        Ok(ev) => {
            b.push("second_deriv_margin", EvidenceValue::Real(ev.second_deriv_margin));
            for (m, a) in &ev.progressions {
                match a {
                    Some(a) => b.push(format!("progression(m={m})"), EvidenceValue::Complex(*a)),
                    None => b.push(format!("progression(m={m})"), EvidenceValue::Flag(false)),
                }
            }
            if ev.passed {
                return b.finish(Outcome::HasAlgebra, Some(Route::SecondDerivativeProgression), Confidence::Numerical);
            }
        }
        Err(e) => b.push("check_t2.error", EvidenceValue::Text(e.to_string())),
    }

    let big = geometric_grid(0.05, 16.0, 48);
    for k in 0..RAY_DIRECTIONS {
        let theta = TAU * k as f64 / RAY_DIRECTIONS as f64;
        if let Ok(Some(ev)) = check_tma_conditions(phi, theta, 2.0, &big) {
            b.push("ray.theta", EvidenceValue::Real(ev.theta));
            b.push("ray.r", EvidenceValue::Real(ev.r));
            b.push("ray.R", EvidenceValue::Real(ev.big_r));
            b.push("ray.h_hat", EvidenceValue::Real(ev.h_hat));
            return b.finish(Outcome::HasAlgebra, Some(Route::RayGrowth), Confidence::Numerical);
        }
    }
    b.unknown("no listed route applies")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreeGeneratorEvidence {
    /// smallest `n >= 1` with `phi^(n)(0) != 0` among `n <= 12`
    pub first_nonzero_derivative: Option<usize>,
    pub subexponential: bool,
    /// subexponential and the index above is odd
    pub part_a: bool,
    /// `(a, a1, a2)` of an `e^{az+b} p(z)` form
    pub exp_poly: Option<(Cplx, Cplx, Cplx)>,
    /// `a != 0` and `a1/a` non-real, or both `2 a2 != a1^2` and `a1 + a != 0`
    pub part_b: Option<bool>,
    pub zero_sums: Option<ZeroSetSummary>,
    /// `sum z_n^-2 != 0`, `a != 0`, and `sum 1/z_n != a` when the product has genus 0
    pub part_c: Option<bool>,
}

impl FreeGeneratorEvidence {
    pub fn any(&self) -> bool {
        self.part_a || self.part_b == Some(true) || self.part_c == Some(true)
    }
}

const TIG_ORDER: usize = 12;
const TIG_DERIV_TOL: f64 = 1e-8;

/// Hypothesis check for dense, freely generated algebras. Reports each of the three
/// sufficient conditions separately.
pub fn check_tig(phi: &SymbolSpec, zeros: Option<&ZeroSetSummary>) -> Result<FreeGeneratorEvidence> {
    let t = to_taylor(phi, TIG_ORDER)?;
    let phi0 = t.coeff(0);
    if (phi0.norm() - 1.0).abs() > UNIMODULAR_TOL {
        return Err(Error::Normalization(phi0.norm()));
    }
    let first = (1..=TIG_ORDER).find(|&n| (t.coeff(n) / phi0).norm() > TIG_DERIV_TOL);
    let subexponential = phi.is_structurally_subexponential();
    let part_a = subexponential && first.is_some_and(|n| n % 2 == 1);

    let (exp_poly, part_b) = match exp_poly_form(phi) {
        Some((a, poly)) if degree(&poly).unwrap_or(0) >= 1 => {
            let p0 = poly[0];
            let a1 = poly.get(1).copied().unwrap_or_default() / p0;
            let a2 = poly.get(2).copied().unwrap_or_default() / p0;
            let ok = a.norm() > 0.0 && {
                let r = a1 / a;
                r.im.abs() > COEFF_TOL * r.norm().max(1.0)
                    || ((2.0 * a2 - a1 * a1).norm() > COEFF_TOL && (a1 + a).norm() > COEFF_TOL)
            };
            (Some((a, a1, a2)), Some(ok))
        }
        _ => (None, None),
    };

    let (zero_sums, part_c) = match phi {
        SymbolSpec::HadamardTrunc { a, zeros: zl, genus, truncation, .. } => {
            let s = zeros.cloned().unwrap_or_else(|| summarize_zeros(zl, *truncation));
            let ok = s.sum_inv_sq.norm() > ZERO_SUM_TOL
                && a.norm() > 0.0
                && (*genus == Genus::One || (s.sum_inv - a).norm() > ZERO_SUM_TOL);
            (Some(s), Some(ok))
        }
        _ => (None, None),
    };

    Ok(FreeGeneratorEvidence { first_nonzero_derivative: first, subexponential, part_a, exp_poly, part_b, zero_sums, part_c })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Cplx {
        Cplx::new(re, im)
    }

    #[test]
    fn exponential_has_no_algebra() {
        let v = classify(&SymbolSpec::exp(c(2.0, 0.0)), None);
        assert_eq!(v.outcome, Outcome::NoAlgebra);
        assert_eq!(v.route, Some(Route::ZeroFree));
        assert_eq!(v.confidence, Confidence::Exact);
    }

    #[test]
    fn exp_times_poly_non_real_ratio() {
        let v = classify(&SymbolSpec::exp_times_poly(c(1.0, 0.0), vec![c(1.0, 0.0), c(0.0, 1.0)]), None);
        assert_eq!(v.outcome, Outcome::HasAlgebra);
        assert_eq!(v.route, Some(Route::ExpTimesPolynomial));
    }

    #[test]
    fn squares_as_zeros() {
        let zeros: Vec<Cplx> = (1..=400).map(|n| c((n * n) as f64, 0.0)).collect();
        let phi = SymbolSpec::HadamardTrunc { a: c(1.0, 0.0), b: c(0.0, 0.0), truncation: zeros.len(), zeros, genus: Genus::Zero };
        let v = classify(&phi, None);
        assert_eq!(v.outcome, Outcome::HasAlgebra);
        assert_eq!(v.route, Some(Route::CanonicalProductConvergent));
    }

    #[test]
    fn vanishing_square_sum_is_unknown() {
        // z^-2 sums to zero over {1, i}
        let phi = SymbolSpec::HadamardTrunc { a: c(1.0, 0.0), b: c(0.0, 0.0), zeros: vec![c(1.0, 0.0), c(0.0, 1.0)], genus: Genus::Zero, truncation: 2 };
        assert_eq!(classify(&phi, None).outcome, Outcome::Unknown);
    }

    #[test]
    fn rotation_recorded() {
        let w = Cplx::from_polar(1.0, 0.7);
        let phi = SymbolSpec::ExpPoly { terms: crate::ExpPoly::single(w, c(1.5, 0.0)) };
        let v = classify(&phi, None);
        assert_eq!(v.outcome, Outcome::NoAlgebra);
        assert!((v.rotation - w).norm() < 1e-15);
    }

    #[test]
    fn non_unimodular_is_unknown() {
        let v = classify(&SymbolSpec::polynomial(vec![c(2.0, 0.0), c(1.0, 0.0)]), None);
        assert_eq!(v.outcome, Outcome::Unknown);
    }

    #[test]
    fn gaussian_is_not_exponential_type() {
        assert_eq!(classify(&SymbolSpec::exp_square(c(1.0, 0.0)), None).outcome, Outcome::Unknown);
    }

    #[test]
    fn polynomial_is_subexponential() {
        let v = classify(&SymbolSpec::polynomial(vec![c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]), None);
        assert_eq!((v.outcome, v.route), (Outcome::HasAlgebra, Some(Route::Subexponential)));
    }

    #[test]
    fn t2_examples() {
        let ev = check_t2(&SymbolSpec::cos(), 8).unwrap();
        assert!(ev.passed);
        assert!((ev.second_deriv_margin - 1.0).abs() < 1e-9);
        for (m, a) in &ev.progressions {
            let a = a.unwrap();
            assert!((1..=*m).all(|j| (a * j as f64).cos().norm() < 1.0));
        }
        let ev = check_t2(&SymbolSpec::sinc_pi(), 4).unwrap();
        assert!((ev.second_deriv_margin - PI * PI / 3.0).abs() < 1e-8);
        let ev = check_t2(&SymbolSpec::exp(c(1.0, 0.0)), 3).unwrap();
        assert!(!ev.passed && ev.second_deriv_margin < 1e-9);
        let off = SymbolSpec::polynomial(vec![c(1.5, 0.0), c(1.0, 0.0)]);
        assert!(matches!(check_t2(&off, 2), Err(Error::Normalization(_))));
    }

    #[test]
    fn tig_examples() {
        let ev = check_tig(&SymbolSpec::polynomial(vec![c(1.0, 0.0), c(1.0, 0.0)]), None).unwrap();
        assert_eq!(ev.first_nonzero_derivative, Some(1));
        assert!(ev.part_a);
        let ev = check_tig(&SymbolSpec::exp_times_poly(c(1.0, 0.0), vec![c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]), None).unwrap();
        assert_eq!(ev.part_b, Some(true));
        let (a, a1, a2) = ev.exp_poly.unwrap();
        assert_eq!(((2.0 * a2 - a1 * a1).re, (a1 + a).re), (1.0, 2.0));
        let ev = check_tig(&SymbolSpec::cos(), None).unwrap();
        assert_eq!(ev.first_nonzero_derivative, Some(2));
        assert!(!ev.part_a);
    }

    #[test]
    fn rescale_examples() {
        let e2 = rescale_symbol(&SymbolSpec::exp(c(1.0, 0.0)), c(2.0, 0.0)).unwrap();
        assert!((e2.eval(c(0.3, 0.1)).unwrap() - (c(0.6, 0.2)).exp()).norm() < 1e-14);
        let phi = SymbolSpec::HadamardTrunc { a: c(0.0, 0.0), b: c(0.0, 0.0), zeros: vec![c(2.0, 0.0), c(0.0, 3.0)], genus: Genus::Zero, truncation: 2 };
        match rescale_symbol(&phi, c(0.0, 2.0)).unwrap() {
            SymbolSpec::HadamardTrunc { zeros, .. } => {
                assert!((zeros[0] - c(0.0, -1.0)).norm() < 1e-15);
                assert!((zeros[1] - c(1.5, 0.0)).norm() < 1e-15);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(rescale_symbol(&SymbolSpec::cos(), c(1.0, 0.0)).unwrap(), SymbolSpec::cos());
        assert!(rescale_symbol(&SymbolSpec::cos(), c(0.0, 0.0)).is_err());
    }
}
