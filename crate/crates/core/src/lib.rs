//! Numerical toolkit for convolution operators `phi(D)` acting on entire functions.
//!
//! The exact state space is the exponential polynomials, on which `phi(D)` acts
//! diagonally: `phi(D) e^{lambda z} = phi(lambda) e^{lambda z}`.

// negated comparisons are deliberate: they send NaN down the rejecting branch
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classifier;
pub mod convex;
pub mod derivs;
pub mod dynamics;
pub mod error;
pub mod exppoly;
pub mod grid;
pub mod growth;
pub mod symbol;
pub mod taylor;
pub mod witness;
pub mod zeros;

pub use num_complex::Complex64 as Cplx;

pub use classifier::{
    check_t2, check_tig, classify, rescale_symbol, Confidence, Evidence, EvidenceValue, FreeGeneratorEvidence, Outcome, Route,
    SecondDerivativeEvidence, Verdict,
};
pub use convex::{convex_direction, find_convex_ray, ConvexRay};
pub use dynamics::{
    apply_symbol, apply_symbol_power, apply_symbol_taylor, sup_distance, sup_norm, verify_targets, verify_witness, GridEval, OrbitTrace,
    TargetCheck, TaylorCheck, Verification,
};
pub use derivs::{derivs_at, derivs_at_zero, to_taylor, to_taylor_with, CauchyOptions, Derivatives};
pub use error::{Error, Result};
pub use exppoly::{eval_exppoly, mul_exppoly, pow_exppoly, ExpPoly, Term};
pub use grid::{geometric_grid, DiskGrid};
pub use growth::{
    check_tma_conditions, estimate_order_type, find_arith_progression, indicator, max_modulus, ray_below_one, ray_scan, tau0,
    GrowthEstimate, RayGrowthEvidence, RayScan,
};
pub use symbol::{eval_symbol, weierstrass_factor, Catalog, Genus, GrowthClass, SymbolSpec};
pub use taylor::TaylorPoly;
pub use zeros::{summarize_zeros, ZeroSetSummary};
