//! Explicit generators and step counts whose powers land near prescribed targets.

pub mod coeff;
pub mod fit;
pub mod lattice;
pub mod multi;
pub mod report;
pub mod single;
pub mod weights;

pub use coeff::{solve_coeff, solve_coeff_scaled};
pub use fit::{fit_polynomial, FitResult};
pub use lattice::{
    classify_tuple, compositions, enumerate_lattice, enumerate_levels, index_set, multinomial, multinomial_gamma, theta_ratio,
    Lattice, LatticeTuple, TupleCase,
};
pub use multi::{construct_witness_multi, construct_witness_multi_with, plan_multi, MultiOptions, MultiPlan, MultiTargets};
pub use report::{
    FitSummary, MultiParams, Placement, SingleParams, SurvivorCheck, TargetResidual, ThetaEntry, WindowRoute, WitnessParams,
    WitnessReport, WitnessRoute,
};
pub use single::{construct_witness_t2, construct_witness_t2_with, plan_t2, T2Options, T2Plan, TargetSpec};
pub use weights::{select_weights, ExponentSet, WeightChoice};

use crate::classifier::UNIMODULAR_TOL;
use crate::dynamics::{apply_symbol_power, sup_distance};
use crate::error::{Error, Result};
use crate::exppoly::ExpPoly;
use crate::grid::DiskGrid;
use crate::growth::{in_unit_disk, BELOW_ONE};
use crate::symbol::SymbolSpec;
use crate::Cplx;
use std::f64::consts::TAU;

/// Boundary samples per disk or per polygon edge.
pub(crate) const EDGE_SAMPLES: usize = 64;

pub(crate) fn check_unimodular(phi: &SymbolSpec) -> Result<Cplx> {
    let v = phi.eval(Cplx::new(0.0, 0.0))?;
    if (v.norm() - 1.0).abs() > UNIMODULAR_TOL {
        return Err(Error::Normalization(v.norm()));
    }
    Ok(v)
}

/// Center and `EDGE_SAMPLES` boundary points of `D(c, r)` satisfy `|phi| < 1`.
pub(crate) fn disk_inside(phi: &SymbolSpec, c: Cplx, r: f64) -> bool {
    in_unit_disk(phi, c, BELOW_ONE)
        && (0..EDGE_SAMPLES).all(|k| in_unit_disk(phi, c + Cplx::from_polar(r, TAU * k as f64 / EDGE_SAMPLES as f64), BELOW_ONE))
}

/// `prod_i g_i^{e_i}`.
pub fn monomial(generators: &[ExpPoly], exponent: &[u32]) -> ExpPoly {
    let mut acc = ExpPoly::constant(Cplx::new(1.0, 0.0));
    for (g, &e) in generators.iter().zip(exponent) {
        if e > 0 {
            acc = acc.mul(&g.pow(e));
        }
    }
    acc
}

/// `T^q` of every requested monomial and its grid distance to the matching target.
pub(crate) fn evaluate_levels(
    phi: &SymbolSpec,
    generators: &[ExpPoly],
    exponents: &[Vec<u32>],
    targets: &[ExpPoly],
    q: u64,
    grid: &DiskGrid,
) -> Result<Vec<(ExpPoly, f64)>> {
    exponents
        .iter()
        .zip(targets)
        .map(|(e, t)| {
            let img = apply_symbol_power(phi, &monomial(generators, e), q)?;
            let r = sup_distance(&img, t, grid)?;
            Ok((img, r))
        })
        .collect()
}
