//! Symbol descriptions and their evaluation.

use crate::error::{Error, Result};
use crate::exppoly::{guarded_exp, ExpPoly, EXP_GUARD};
use crate::Cplx;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::f64::consts::PI;

/// Genus of a canonical product. Only 0 and 1 occur for exponential type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Genus {
    Zero,
    One,
}

impl Genus {
    pub fn as_u8(self) -> u8 {
        match self {
            Genus::Zero => 0,
            Genus::One => 1,
        }
    }

    pub fn from_u8(p: u8) -> Option<Genus> {
        match p {
            0 => Some(Genus::Zero),
            1 => Some(Genus::One),
            _ => None,
        }
    }
}

impl Serialize for Genus {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u8(self.as_u8())
    }
}

impl<'de> Deserialize<'de> for Genus {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let p = u8::deserialize(d)?;
        Genus::from_u8(p).ok_or_else(|| serde::de::Error::custom(format!("genus must be 0 or 1, got {p}")))
    }
}

/// Closed-form symbols. Every entry carries a scale so that `phi(s z)` stays in the
/// same family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum Catalog {
    /// `cos(scale z)`
    Cos { scale: Cplx },
    /// `sin(scale z) + exp(-scale z)`
    SinPlusExpNeg { scale: Cplx },
    /// `sin(pi scale z) / (pi scale z)`
    SincPi { scale: Cplx },
    /// `exp(a z)`
    Exp { a: Cplx },
    /// `exp(a z) p(z)`, `poly[k]` the coefficient of `z^k`
    ExpTimesPoly { a: Cplx, poly: Vec<Cplx> },
    /// `exp(a z^2)`; entire but not of exponential type
    ExpSquare { a: Cplx },
    /// `p(z)`
    Polynomial { coeffs: Vec<Cplx> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SymbolSpec {
    Catalog(Catalog),
    ExpPoly {
        terms: ExpPoly,
    },
    /// `exp(a z + b) p(z)` with `p(0) = 1` and `Re(b) = 0`.
    PolyTimesExp {
        poly: Vec<Cplx>,
        a: Cplx,
        b: Cplx,
    },
    /// `exp(a z + b) prod_{n < truncation} E_genus(z / zeros[n])`.
    HadamardTrunc {
        a: Cplx,
        b: Cplx,
        zeros: Vec<Cplx>,
        genus: Genus,
        truncation: usize,
    },
}

/// How fast a symbol grows, when that can be read off its form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthClass {
    Constant,
    Subexponential,
    /// order one with positive type; the value is the type
    ExponentialType(f64),
    NotExponentialType,
    /// structure does not settle it; estimate numerically
    Undetermined,
}

const ZERO: Cplx = Cplx::new(0.0, 0.0);
const ONE: Cplx = Cplx::new(1.0, 0.0);
const STRUCT_TOL: f64 = 1e-12;

pub fn horner(coeffs: &[Cplx], z: Cplx) -> Cplx {
    coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
}

fn finite(z: Cplx) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

pub(crate) fn degree(coeffs: &[Cplx]) -> Option<usize> {
    coeffs.iter().rposition(|c| *c != ZERO)
}

/// Weierstrass elementary factor: `E_0(z) = 1 - z`, `E_1(z) = (1 - z) e^z`.
pub fn weierstrass_factor(p: Genus, z: Cplx) -> Cplx {
    match p {
        Genus::Zero => ONE - z,
        Genus::One => (ONE - z) * z.exp(),
    }
}

fn sinc_pi(x: Cplx) -> Result<Cplx> {
    if x.im.abs() > EXP_GUARD {
        return Err(Error::Range { exponent: x * Cplx::new(0.0, 1.0), bound: EXP_GUARD });
    }
    if x.norm() < 0.1 {
        // 1 - x^2/3! + x^4/5! - x^6/7! + x^8/9!
        let x2 = x * x;
        let s = ONE - x2 / 6.0 * (ONE - x2 / 20.0 * (ONE - x2 / 42.0 * (ONE - x2 / 72.0)));
        return Ok(s);
    }
    Ok(x.sin() / x)
}

/// Product with running renormalisation so long zero lists neither overflow nor
/// underflow before the final exponential.
fn hadamard_eval(a: Cplx, b: Cplx, zeros: &[Cplx], genus: Genus, z: Cplx) -> Result<Cplx> {
    let mut acc = ONE;
    let mut log_scale = 0.0f64;
    let mut expo = a * z + b;
    for &zn in zeros {
        let w = z / zn;
        acc *= ONE - w;
        if genus == Genus::One {
            expo += w;
        }
        if acc == ZERO {
            return Ok(ZERO);
        }
        let m = acc.norm();
        if !(1e-100..=1e100).contains(&m) {
            log_scale += m.ln();
            acc /= m;
        }
    }
    let total = expo + Cplx::new(log_scale, 0.0);
    Ok(acc * guarded_exp(total, EXP_GUARD)?)
}

impl Catalog {
    pub fn eval(&self, z: Cplx) -> Result<Cplx> {
        match self {
            Catalog::Cos { scale } => {
                let w = scale * z;
                if w.im.abs() > EXP_GUARD {
                    return Err(Error::Range { exponent: w * Cplx::new(0.0, 1.0), bound: EXP_GUARD });
                }
                Ok(w.cos())
            }
            Catalog::SinPlusExpNeg { scale } => {
                let w = scale * z;
                if w.im.abs() > EXP_GUARD {
                    return Err(Error::Range { exponent: w * Cplx::new(0.0, 1.0), bound: EXP_GUARD });
                }
                Ok(w.sin() + guarded_exp(-w, EXP_GUARD)?)
            }
            Catalog::SincPi { scale } => sinc_pi(scale * z * PI),
            Catalog::Exp { a } => guarded_exp(a * z, EXP_GUARD),
            Catalog::ExpTimesPoly { a, poly } => Ok(guarded_exp(a * z, EXP_GUARD)? * horner(poly, z)),
            Catalog::ExpSquare { a } => guarded_exp(a * z * z, EXP_GUARD),
            Catalog::Polynomial { coeffs } => Ok(horner(coeffs, z)),
        }
    }
}

impl SymbolSpec {
    pub fn cos() -> Self {
        SymbolSpec::Catalog(Catalog::Cos { scale: ONE })
    }

    pub fn sin_plus_exp_neg() -> Self {
        SymbolSpec::Catalog(Catalog::SinPlusExpNeg { scale: ONE })
    }

    pub fn sinc_pi() -> Self {
        SymbolSpec::Catalog(Catalog::SincPi { scale: ONE })
    }

    pub fn exp(a: Cplx) -> Self {
        SymbolSpec::Catalog(Catalog::Exp { a })
    }

    pub fn exp_times_poly(a: Cplx, poly: Vec<Cplx>) -> Self {
        SymbolSpec::Catalog(Catalog::ExpTimesPoly { a, poly })
    }

    pub fn exp_square(a: Cplx) -> Self {
        SymbolSpec::Catalog(Catalog::ExpSquare { a })
    }

    pub fn polynomial(coeffs: Vec<Cplx>) -> Self {
        SymbolSpec::Catalog(Catalog::Polynomial { coeffs })
    }

    /// Truncated canonical product of `sin(pi z)/(pi z)`: zeros `-1, 1, -2, 2, ...`.
    pub fn sinc_hadamard(pairs: usize) -> Self {
        let mut zeros = Vec::with_capacity(2 * pairs);
        for k in 1..=pairs {
            zeros.push(Cplx::new(-(k as f64), 0.0));
            zeros.push(Cplx::new(k as f64, 0.0));
        }
        let truncation = zeros.len();
        SymbolSpec::HadamardTrunc { a: ZERO, b: ZERO, zeros, genus: Genus::One, truncation }
    }

    /// Checks the structural invariants that serde alone cannot express.
    pub fn validate(&self) -> Result<()> {
        let all_finite = |v: &[Cplx]| v.iter().all(|z| finite(*z));
        match self {
            SymbolSpec::Catalog(c) => {
                let ok = match c {
                    Catalog::Cos { scale } | Catalog::SinPlusExpNeg { scale } | Catalog::SincPi { scale } => {
                        if *scale == ZERO {
                            return Err(Error::Invalid("catalog scale must be non-zero".into()));
                        }
                        finite(*scale)
                    }
                    Catalog::Exp { a } | Catalog::ExpSquare { a } => finite(*a),
                    Catalog::ExpTimesPoly { a, poly } => finite(*a) && all_finite(poly) && !poly.is_empty(),
                    Catalog::Polynomial { coeffs } => all_finite(coeffs) && !coeffs.is_empty(),
                };
                if !ok {
                    return Err(Error::Invalid("catalog parameters must be finite and non-empty".into()));
                }
            }
            SymbolSpec::ExpPoly { .. } => {}
            SymbolSpec::PolyTimesExp { poly, a, b } => {
                if poly.is_empty() || !all_finite(poly) || !finite(*a) || !finite(*b) {
                    return Err(Error::Invalid("poly_times_exp fields must be finite and poly non-empty".into()));
                }
                if (poly[0] - ONE).norm() > STRUCT_TOL {
                    return Err(Error::Invalid(format!("poly_times_exp requires p(0) = 1, got {}", poly[0])));
                }
                if b.re.abs() > STRUCT_TOL {
                    return Err(Error::Invalid(format!("poly_times_exp requires Re(b) = 0, got {}", b.re)));
                }
            }
            SymbolSpec::HadamardTrunc { a, b, zeros, truncation, .. } => {
                if !finite(*a) || !finite(*b) || !all_finite(zeros) {
                    return Err(Error::Invalid("hadamard fields must be finite".into()));
                }
                if zeros.contains(&ZERO) {
                    return Err(Error::Invalid("hadamard zeros must be non-zero".into()));
                }
                if *truncation > zeros.len() {
                    return Err(Error::Invalid(format!(
                        "truncation {truncation} exceeds the {} supplied zeros",
                        zeros.len()
                    )));
                }
                if b.re.abs() > STRUCT_TOL {
                    return Err(Error::Invalid(format!("hadamard requires Re(b) = 0, got {}", b.re)));
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, z: Cplx) -> Result<Cplx> {
        if !finite(z) {
            return Err(Error::NonFinite("evaluation point"));
        }
        match self {
            SymbolSpec::Catalog(c) => c.eval(z),
            SymbolSpec::ExpPoly { terms } => terms.eval(z),
            SymbolSpec::PolyTimesExp { poly, a, b } => Ok(guarded_exp(a * z + b, EXP_GUARD)? * horner(poly, z)),
            SymbolSpec::HadamardTrunc { a, b, zeros, genus, truncation } => {
                hadamard_eval(*a, *b, &zeros[..*truncation], *genus, z)
            }
        }
    }

    /// The symbol `z -> phi(s z)`, transformed in closed form.
    pub fn rescale(&self, s: Cplx) -> SymbolSpec {
        let powers = |v: &[Cplx]| -> Vec<Cplx> {
            let mut p = ONE;
            v.iter()
                .map(|c| {
                    let out = c * p;
                    p *= s;
                    out
                })
                .collect()
        };
        match self {
            SymbolSpec::Catalog(c) => SymbolSpec::Catalog(match c {
                Catalog::Cos { scale } => Catalog::Cos { scale: scale * s },
                Catalog::SinPlusExpNeg { scale } => Catalog::SinPlusExpNeg { scale: scale * s },
                Catalog::SincPi { scale } => Catalog::SincPi { scale: scale * s },
                Catalog::Exp { a } => Catalog::Exp { a: a * s },
                Catalog::ExpTimesPoly { a, poly } => Catalog::ExpTimesPoly { a: a * s, poly: powers(poly) },
                Catalog::ExpSquare { a } => Catalog::ExpSquare { a: a * s * s },
                Catalog::Polynomial { coeffs } => Catalog::Polynomial { coeffs: powers(coeffs) },
            }),
            SymbolSpec::ExpPoly { terms } => SymbolSpec::ExpPoly {
                terms: ExpPoly::from_terms(
                    terms.terms().iter().map(|t| crate::exppoly::Term::new(t.coeff, t.freq * s)).collect(),
                ),
            },
            SymbolSpec::PolyTimesExp { poly, a, b } => SymbolSpec::PolyTimesExp { poly: powers(poly), a: a * s, b: *b },
            SymbolSpec::HadamardTrunc { a, b, zeros, genus, truncation } => SymbolSpec::HadamardTrunc {
                a: a * s,
                b: *b,
                zeros: zeros.iter().map(|z| z / s).collect(),
                genus: *genus,
                truncation: *truncation,
            },
        }
    }

    /// Growth read off the form alone. Truncated products are judged by the infinite
    /// product they stand for.
    pub fn growth_class(&self) -> GrowthClass {
        let exp_like = |a: &Cplx, nonconst_rest: bool| {
            if a.norm() > 0.0 {
                GrowthClass::ExponentialType(a.norm())
            } else if nonconst_rest {
                GrowthClass::Subexponential
            } else {
                GrowthClass::Constant
            }
        };
        match self {
            SymbolSpec::Catalog(c) => match c {
                Catalog::Cos { scale } | Catalog::SinPlusExpNeg { scale } => GrowthClass::ExponentialType(scale.norm()),
                Catalog::SincPi { scale } => GrowthClass::ExponentialType(PI * scale.norm()),
                Catalog::Exp { a } => exp_like(a, false),
                Catalog::ExpTimesPoly { a, poly } => exp_like(a, degree(poly).unwrap_or(0) >= 1),
                Catalog::ExpSquare { a } => {
                    if *a == ZERO {
                        GrowthClass::Constant
                    } else {
                        GrowthClass::NotExponentialType
                    }
                }
                Catalog::Polynomial { coeffs } => exp_like(&ZERO, degree(coeffs).unwrap_or(0) >= 1),
            },
            SymbolSpec::ExpPoly { terms } => {
                let t = terms.max_freq_modulus();
                if t > 0.0 {
                    GrowthClass::ExponentialType(t)
                } else {
                    GrowthClass::Constant
                }
            }
            SymbolSpec::PolyTimesExp { poly, a, .. } => exp_like(a, degree(poly).unwrap_or(0) >= 1),
            SymbolSpec::HadamardTrunc { a, zeros, genus, truncation, .. } => {
                if *truncation == 0 || zeros.is_empty() {
                    exp_like(a, false)
                } else if *genus == Genus::Zero {
                    exp_like(a, true)
                } else {
                    GrowthClass::Undetermined
                }
            }
        }
    }

    pub fn is_structurally_subexponential(&self) -> bool {
        matches!(self.growth_class(), GrowthClass::Subexponential | GrowthClass::Constant)
    }
}

/// Smallest truncation `M` with `sum_{n >= M} |radius / z_n|^(genus + 1) < tol` over the
/// supplied list. Returns the full length when the supplied tail never gets small enough.
pub fn default_truncation(zeros: &[Cplx], genus: Genus, radius: f64, tol: f64) -> usize {
    let p = (genus.as_u8() + 1) as i32;
    let mut tail: f64 = zeros.iter().map(|z| (radius / z.norm()).powi(p)).sum();
    for (m, z) in zeros.iter().enumerate() {
        if tail < tol {
            return m;
        }
        tail -= (radius / z.norm()).powi(p);
    }
    zeros.len()
}

/// `phi(z)` for any symbol; the free-function form of [`SymbolSpec::eval`].
pub fn eval_symbol(phi: &SymbolSpec, z: Cplx) -> Result<Cplx> {
    phi.eval(z)
}
