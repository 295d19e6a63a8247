//! Directions along which `log|phi|` starts out increasing and convex.

use crate::derivs::{derivs_at, CauchyOptions};
use crate::error::{Error, Result};
use crate::symbol::SymbolSpec;
use crate::Cplx;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_8, PI, TAU};

/// Relative margin on `|h''(w0)|`, `h = log phi`.
pub const SECOND_DERIV_MARGIN: f64 = 1e-6;
/// `phi'(w0)` counts as zero below this relative size.
pub const FIRST_DERIV_FLOOR: f64 = 1e-8;
pub const PROFILE_POINTS: usize = 64;
const MAX_HALVINGS: usize = 40;
/// Relative size both real parts should exceed so that rounding in the inputs cannot
/// flip them.
const DIRECTION_MARGIN: f64 = 1e-6;
const SCAN_DIRECTIONS: usize = 720;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[allow(clippy::upper_case_acronyms)]
enum Quadrant {
    I,
    II,
    III,
    IV,
}

fn quadrant(z: Cplx) -> Option<Quadrant> {
    let (x, y) = (z.re, z.im);
    if x > 0.0 && y >= 0.0 {
        Some(Quadrant::I)
    } else if x <= 0.0 && y > 0.0 {
        Some(Quadrant::II)
    } else if x < 0.0 && y <= 0.0 {
        Some(Quadrant::III)
    } else if x >= 0.0 && y < 0.0 {
        Some(Quadrant::IV)
    } else {
        None
    }
}

/// Base angle and whether the table asks for a small positive shift.
fn table_entry(a1: Quadrant, a2: Quadrant) -> (f64, bool) {
    use Quadrant::*;
    match (a2, a1) {
        (I, I) => (0.0, false),
        (I, II) => (PI, true),
        (I, III) => (PI, false),
        (I, IV) => (0.0, false),
        (II, I) | (II, II) => (-FRAC_PI_2, true),
        (II, III) | (II, IV) => (FRAC_PI_2, true),
        (III, I) => (-FRAC_PI_2, true),
        (III, II) => (-FRAC_PI_2, false),
        (III, III) | (III, IV) => (FRAC_PI_2, false),
        (IV, I) => (0.0, true),
        (IV, II) | (IV, III) => (PI, true),
        (IV, IV) => (0.0, true),
    }
}

fn clears(a1: Cplx, a2: Cplx, theta: f64, margin: f64) -> bool {
    let e = Cplx::from_polar(1.0, theta);
    (a1 * e).re > margin * a1.norm() && (a2 * e * e).re > margin * a2.norm()
}

/// Best of `SCAN_DIRECTIONS` equispaced angles by the smaller relative real part, if it
/// clears the margin.
fn scan_direction(a1: Cplx, a2: Cplx) -> Option<f64> {
    let score = |th: f64| {
        let e = Cplx::from_polar(1.0, th);
        ((a1 * e).re / a1.norm()).min((a2 * e * e).re / a2.norm())
    };
    let (th, best) = (0..SCAN_DIRECTIONS)
        .map(|k| -PI + TAU * k as f64 / SCAN_DIRECTIONS as f64)
        .map(|th| (th, score(th)))
        .fold((0.0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
    (best > DIRECTION_MARGIN).then_some(th)
}

fn strict(a1: Cplx, a2: Cplx, theta: f64) -> bool {
    clears(a1, a2, theta, 0.0)
}

/// `theta` with `Re(a1 e^{i theta}) >= 0` and `Re(a2 e^{2 i theta}) > 0`, the first
/// inequality strict when `a1 != 0`.
///
/// The quadrant table gives a base angle. Entries marked for a shift, and base angles
/// that land on a boundary in floating point, are nudged by `pi/8 * 2^-k` until both
/// inequalities hold strictly. A scan over equispaced angles covers inputs that sit
/// within rounding of an axis.
pub fn convex_direction(a1: Cplx, a2: Cplx) -> Result<f64> {
    if a2.norm() == 0.0 || !(a1.re.is_finite() && a1.im.is_finite() && a2.re.is_finite() && a2.im.is_finite()) {
        return Err(Error::Invalid("convex_direction needs finite a1 and nonzero finite a2".into()));
    }
    let Some(q1) = quadrant(a1) else {
        // theta and theta + pi both work here; report the one in (-pi/2, pi/2] so a
        // near-negative-real a2 does not flip sign with rounding noise
        let th = 0.5 * a2.conj().arg();
        return Ok(if th <= -FRAC_PI_2 + 1e-9 { th + PI } else { th });
    };
    let q2 = quadrant(a2).expect("a2 is nonzero");
    let (base, shift) = table_entry(q1, q2);
    if !shift && clears(a1, a2, base, DIRECTION_MARGIN) {
        return Ok(base);
    }
    // inputs within rounding of an axis can land in the neighbouring quadrant, which
    // leaves the base angle on the far edge of the admissible arc; a shift against the
    // table's direction recovers a usable margin
    let mut eps = FRAC_PI_8;
    for _ in 0..64 {
        for th in [base + eps, base - eps] {
            if clears(a1, a2, th, DIRECTION_MARGIN) {
                return Ok(th);
            }
        }
        eps *= 0.5;
    }
    if let Some(th) = scan_direction(a1, a2) {
        return Ok(th);
    }
    if !shift && strict(a1, a2, base) {
        return Ok(base);
    }
    let mut eps = FRAC_PI_8;
    for _ in 0..64 {
        if strict(a1, a2, base + eps) {
            return Ok(base + eps);
        }
        eps *= 0.5;
    }
    Err(Error::SearchFailure(format!("no strict direction near {base} for a1={a1}, a2={a2}")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexRay {
    pub w0: Cplx,
    pub w1: Cplx,
    pub theta: f64,
    pub eta: f64,
    /// parameter interval of the profile: `(0, 1)` or `(-1, 1)`
    pub domain: (f64, f64),
    /// `log|phi((1-t) w0 + t w1)|` at `PROFILE_POINTS` equispaced `t`
    pub profile: Vec<f64>,
    /// `|phi''(w0) phi(w0) - phi'(w0)^2| / |phi(w0)|^2`
    pub second_deriv_margin: f64,
}

impl ConvexRay {
    pub fn point(&self, t: f64) -> Cplx {
        self.w0 + (self.w1 - self.w0) * t
    }
}

fn profile(phi: &SymbolSpec, w0: Cplx, w1: Cplx, domain: (f64, f64)) -> Option<Vec<f64>> {
    let n = PROFILE_POINTS;
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let t = domain.0 + (domain.1 - domain.0) * k as f64 / (n - 1) as f64;
        let v = phi.eval(w0 + (w1 - w0) * t).ok()?.norm();
        if !(v > 0.0) {
            return None;
        }
        out.push(v.ln());
    }
    Some(out)
}

/// First and second differences of the samples are all positive.
pub fn is_increasing_convex(p: &[f64]) -> bool {
    p.windows(2).all(|w| w[1] - w[0] > 0.0) && p.windows(3).all(|w| w[2] - 2.0 * w[1] + w[0] > 0.0)
}

/// A segment from `w0` inside `D(w0, delta)` on which `log|phi|` samples as strictly
/// increasing and strictly convex.
pub fn find_convex_ray(phi: &SymbolSpec, w0: Cplx, delta: f64) -> Result<ConvexRay> {
    if !(delta > 0.0) {
        return Err(Error::Invalid("find_convex_ray needs delta > 0".into()));
    }
    let d = derivs_at(phi, w0, 2, &CauchyOptions::default())?;
    let (f0, f1, f2) = (d.values[0], d.values[1], d.values[2]);
    if f0.norm() < 1e-12 {
        return Err(Error::hypothesis("phi_nonzero_at_w0", format!("|phi(w0)| = {:e}", f0.norm())));
    }
    let h2 = (f2 * f0 - f1 * f1) / (f0 * f0);
    let margin = h2.norm();
    if margin <= SECOND_DERIV_MARGIN {
        return Err(Error::hypothesis(
            "second_deriv_margin",
            format!("|phi'' phi - phi'^2| / |phi|^2 = {margin:e} at w0 = {w0}"),
        ));
    }
    let h1 = f1 / f0;
    let two_sided = h1.norm() > FIRST_DERIV_FLOOR;
    let a1 = if two_sided { h1 } else { Cplx::new(0.0, 0.0) };
    let theta = convex_direction(a1, h2 * 0.5)?;
    let domain = if two_sided { (-1.0, 1.0) } else { (0.0, 1.0) };
    let mut eta = delta / 2.0;
    for _ in 0..=MAX_HALVINGS {
        let w1 = w0 + Cplx::from_polar(eta, theta);
        if let Some(p) = profile(phi, w0, w1, domain) {
            if is_increasing_convex(&p) {
                return Ok(ConvexRay { w0, w1, theta, eta, domain, profile: p, second_deriv_margin: margin });
            }
        }
        eta *= 0.5;
    }
    Err(Error::SearchFailure(format!("no convex segment from w0 = {w0} after {MAX_HALVINGS} halvings")))
}
