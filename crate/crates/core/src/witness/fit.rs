//! Least-squares placement of an arbitrary polynomial target onto fixed frequencies.

use crate::error::{Error, Result};
use crate::exppoly::{ExpPoly, Term};
use crate::grid::DiskGrid;
use crate::symbol::horner;
use crate::Cplx;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// Relative singular-value cutoff of the solve.
pub const FIT_RCOND: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub fitted: ExpPoly,
    /// `max |fitted - target|` on the grid
    pub fit_error: f64,
    pub condition: f64,
}

/// Coefficients on `freqs` minimizing the grid `l2` distance to the polynomial with
/// coefficients `poly` (constant term first).
pub fn fit_polynomial(poly: &[Cplx], freqs: &[Cplx], grid: &DiskGrid) -> Result<FitResult> {
    if freqs.is_empty() {
        return Err(Error::Invalid("fit needs at least one frequency".into()));
    }
    let pts = grid.points();
    let mut a = DMatrix::<Cplx>::zeros(pts.len(), freqs.len());
    let mut rhs = DVector::<Cplx>::zeros(pts.len());
    for (i, &z) in pts.iter().enumerate() {
        for (j, &f) in freqs.iter().enumerate() {
            a[(i, j)] = (f * z).exp();
        }
        rhs[i] = horner(poly, z);
    }
    let svd = a.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let x = svd.solve(&rhs, FIT_RCOND * smax).map_err(|e| Error::SearchFailure(format!("least squares: {e}")))?;
    let mut terms = Vec::with_capacity(freqs.len());
    for (j, &f) in freqs.iter().enumerate() {
        if !(x[j].re.is_finite() && x[j].im.is_finite()) {
            return Err(Error::NonFinite("fit coefficient"));
        }
        terms.push(Term::new(x[j], f));
    }
    let fitted = ExpPoly::from_terms(terms);
    let mut fit_error = 0.0f64;
    for &z in &pts {
        fit_error = fit_error.max((fitted.eval(z)? - horner(poly, z)).norm());
    }
    Ok(FitResult { fitted, fit_error, condition: if smin > 0.0 { smax / smin } else { f64::INFINITY } })
}
