//! The coefficient equation `c^m phi_val^N = b` that makes the survivors land on `b`.

use crate::dynamics::{power_polar, reduce_phase, LN_MIN};
use crate::error::{Error, Result};
use crate::Cplx;

/// `|phi_val|` must clear 1 by this much.
pub const ABOVE_ONE: f64 = 1e-6;

/// Principal solution of `c^m phi_val^N = b`.
pub fn solve_coeff(b: Cplx, m: u32, phi_val: Cplx, n: u64) -> Result<Cplx> {
    solve_coeff_scaled(b, 0.0, m, phi_val, n)
}

/// Principal solution of `c^m phi_val^N = b e^{log_scale}`; `log_scale` carries factors
/// such as `n^K` that would overflow on their own.
pub fn solve_coeff_scaled(b: Cplx, log_scale: f64, m: u32, phi_val: Cplx, n: u64) -> Result<Cplx> {
    if m == 0 {
        return Err(Error::Invalid("solve_coeff needs m >= 1".into()));
    }
    if b.norm() == 0.0 || !(b.re.is_finite() && b.im.is_finite()) {
        return Err(Error::Invalid(format!("solve_coeff needs a nonzero finite b, got {b}")));
    }
    if !(phi_val.norm() > 1.0 + ABOVE_ONE) {
        return Err(Error::hypothesis("phi_above_one", format!("|phi| = {} at the target frequency", phi_val.norm())));
    }
    // same polar helper as apply_symbol_power so the phases cancel exactly
    let (lm, ph) = power_polar(phi_val, n);
    let mf = m as f64;
    let ln_c = (b.norm().ln() + log_scale - lm) / mf;
    if ln_c < LN_MIN {
        return Err(Error::Range { exponent: Cplx::new(ln_c, 0.0), bound: -LN_MIN });
    }
    let arg = reduce_phase(b.arg() - ph) / mf;
    Ok(Cplx::from_polar(ln_c.exp(), arg))
}
