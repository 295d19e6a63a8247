//! Several generators: `f^beta` lands near `B` and every other `f^alpha` near 0.
//!
//! `f_1 = L_1 + R_n` carries the correction terms, `f_i = L_i + n^{-k_i}` for the
//! others. The powers of `n` separate exponents that share the maximal first
//! coordinate; the convex segment handles the rest.

use super::coeff::solve_coeff_scaled;
use super::lattice::{classify_tuple, frequency, index_set, multinomial, theta_from_moduli, TupleCase};
use super::report::{
    MultiParams, Placement, SurvivorCheck, TargetResidual, ThetaEntry, WindowRoute, WitnessParams, WitnessReport, WitnessRoute,
};
use super::weights::{select_weights, ExponentSet, WeightChoice};
use super::{check_unimodular, evaluate_levels, EDGE_SAMPLES};
use crate::convex::{find_convex_ray, ConvexRay};
use crate::dynamics::{power_polar, scaled_coeff, sup_distance};
use crate::error::{Error, Result};
use crate::exppoly::{ExpPoly, Term};
use crate::grid::DiskGrid;
use crate::growth::{in_unit_disk, BELOW_ONE};
use crate::symbol::SymbolSpec;
use crate::Cplx;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

const RAY_RADIUS: f64 = 4.0;
const MAX_WINDOW_HALVINGS: usize = 20;
const DIRECTIONS: usize = 360;
const DIRECTION_SAMPLES: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MultiOptions {
    pub epsilon: f64,
    pub grid: DiskGrid,
    pub n_max: u64,
    pub theta_margin: f64,
    pub replace_rounds: u32,
}

impl Default for MultiOptions {
    fn default() -> Self {
        MultiOptions { epsilon: 1e-5, grid: DiskGrid::default(), n_max: 1 << 20, theta_margin: 1e-4, replace_rounds: 8 }
    }
}

impl MultiOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) {
            return Err(Error::Invalid("epsilon must be positive".into()));
        }
        if self.n_max < 8 {
            return Err(Error::Invalid("n_max must be at least 8".into()));
        }
        if !(self.theta_margin > 0.0 && self.theta_margin < 1.0) {
            return Err(Error::Invalid("theta margin must lie in (0, 1)".into()));
        }
        self.grid.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum MultiTargets {
    /// one term per generator in the middle of the approximating window, one target term
    #[default]
    Auto,
    /// `l[i]` approximates generator `i` (caller's coordinates), `b` is the target
    Given { b: ExpPoly, l: Vec<ExpPoly> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiPlan {
    pub weights: WeightChoice,
    pub m: u32,
    pub d_a: u32,
    pub route: WindowRoute,
    pub w: Cplx,
    pub a: f64,
    pub b: f64,
    pub lambda_window: [Cplx; 2],
    pub gamma_window: [Cplx; 2],
    pub ray: ConvexRay,
}

fn segment_inside(phi: &SymbolSpec, p: Cplx, q: Cplx) -> bool {
    (0..=EDGE_SAMPLES).all(|k| in_unit_disk(phi, p + (q - p) * (k as f64 / EDGE_SAMPLES as f64), BELOW_ONE))
}

/// Boundary of `s Lambda + [0, d] g` for every `s` in `1..=d_a`, where `d` covers the
/// remaining correction factors, each at most the top of `Gamma / m`.
fn windows_inside(phi: &SymbolSpec, lam: [Cplx; 2], gamma_top: Cplx, d_a: u32, m: u32) -> bool {
    (1..=d_a).all(|s| {
        let (p0, p1) = (lam[0] * s as f64, lam[1] * s as f64);
        let shift = gamma_top * ((d_a - s) as f64 / m as f64);
        segment_inside(phi, p0, p1)
            && segment_inside(phi, p1, p1 + shift)
            && segment_inside(phi, p1 + shift, p0 + shift)
            && segment_inside(phi, p0 + shift, p0)
    })
}

/// Direction `e^{i theta}` minimizing `max |phi|` over `s [lo, hi] e^{i theta}`, `s <= d_a`.
fn quiet_direction(phi: &SymbolSpec, lo: f64, hi: f64, d_a: u32) -> Cplx {
    let mut best = (f64::INFINITY, Cplx::new(1.0, 0.0));
    for k in 0..DIRECTIONS {
        let dir = Cplx::from_polar(1.0, TAU * k as f64 / DIRECTIONS as f64);
        let mut worst = 0.0f64;
        'outer: for s in 1..=d_a {
            for i in 0..DIRECTION_SAMPLES {
                let t = lo + (hi - lo) * i as f64 / (DIRECTION_SAMPLES - 1) as f64;
                match phi.eval(dir * (t * s as f64)) {
                    Ok(v) => worst = worst.max(v.norm()),
                    Err(_) => {
                        worst = f64::INFINITY;
                        break 'outer;
                    }
                }
            }
        }
        if worst < best.0 {
            best = (worst, dir);
        }
    }
    best.1
}

/// Weights, convex segment and the two frequency windows. `scale` shrinks the
/// starting window width.
///
/// With `phi'(0) != 0` the segment is two-sided and both windows sit on it, on
/// opposite sides of the origin. Otherwise the correction window stays on the
/// one-sided segment and the approximating window moves to the direction where
/// `|phi|` is smallest.
pub fn plan_multi(phi: &SymbolSpec, set: &ExponentSet, scale: f64) -> Result<MultiPlan> {
    phi.validate()?;
    check_unimodular(phi)?;
    if !(scale > 0.0 && scale <= 1.0) {
        return Err(Error::Invalid("window scale must lie in (0, 1]".into()));
    }
    let weights = select_weights(set)?;
    let (m, d_a) = (set.m(), set.d_a());
    let ray = find_convex_ray(phi, Cplx::new(0.0, 0.0), RAY_RADIUS)?;
    let w = ray.w1;
    let route = if ray.domain.0 < 0.0 { WindowRoute::Collinear } else { WindowRoute::SplitRay };
    let mut a = scale / (4.0 * d_a as f64);
    for _ in 0..=MAX_WINDOW_HALVINGS {
        let b = a / (4.0 * d_a as f64);
        let gamma_window = [w * b, w * (2.0 * b)];
        let lambda_window = match route {
            WindowRoute::Collinear => [w * (-2.0 * a), w * (-a)],
            WindowRoute::SplitRay => {
                let (lo, hi) = (a * w.norm(), 2.0 * a * w.norm());
                let dir = quiet_direction(phi, lo, hi, d_a);
                [dir * lo, dir * hi]
            }
        };
        if windows_inside(phi, lambda_window, gamma_window[1], d_a, m) {
            return Ok(MultiPlan { weights, m, d_a, route, w, a, b, lambda_window, gamma_window, ray });
        }
        a *= 0.5;
    }
    Err(Error::SearchFailure(format!("no window width keeps the sums where |phi| < 1 after {MAX_WINDOW_HALVINGS} halvings")))
}

fn on_segment(z: Cplx, seg: [Cplx; 2]) -> bool {
    let t = (z - seg[0]) / (seg[1] - seg[0]);
    t.im.abs() <= 1e-9 && t.re >= -1e-12 && t.re <= 1.0 + 1e-12
}

/// Approximating parts in working order and the target.
fn place(targets: &MultiTargets, plan: &MultiPlan) -> Result<(Vec<ExpPoly>, ExpPoly)> {
    let one = Cplx::new(1.0, 0.0);
    let n = plan.weights.permutation.len();
    match targets {
        MultiTargets::Auto => {
            let lam = (plan.lambda_window[0] + plan.lambda_window[1]) * 0.5;
            let gam = (plan.gamma_window[0] + plan.gamma_window[1]) * 0.5;
            Ok((vec![ExpPoly::single(one, lam); n], ExpPoly::single(one, gam)))
        }
        MultiTargets::Given { b, l } => {
            if l.len() != n {
                return Err(Error::Invalid(format!("{} approximating parts for {n} generators", l.len())));
            }
            if b.is_zero() || l.iter().any(ExpPoly::is_zero) {
                return Err(Error::Invalid("target and approximating parts must be nonzero".into()));
            }
            for t in b.terms() {
                if !on_segment(t.freq, plan.gamma_window) {
                    return Err(Error::Placement(format!("target frequency {} is outside {:?}", t.freq, plan.gamma_window)));
                }
            }
            for t in l.iter().flat_map(|x| x.terms()) {
                if !on_segment(t.freq, plan.lambda_window) {
                    return Err(Error::Placement(format!(
                        "approximating frequency {} is outside {:?}",
                        t.freq, plan.lambda_window
                    )));
                }
            }
            Ok((plan.weights.permute(l), b.clone()))
        }
    }
}

struct Table {
    entries: Vec<ThetaEntry>,
    /// `(position of the exponent in the set, correction index)`
    survivors: Vec<(usize, usize)>,
}

fn build_table(
    phi: &SymbolSpec,
    set: &ExponentSet,
    plan: &MultiPlan,
    l: &[ExpPoly],
    b: &ExpPoly,
) -> Result<Table> {
    let m = plan.m;
    let k = plan.weights.k_permuted();
    let beta_p = plan.weights.permute(&plan.weights.beta);
    let k_beta: f64 = (1..k.len()).map(|t| k[t] * beta_p[t] as f64).sum();
    let sizes: Vec<usize> = l.iter().map(ExpPoly::len).collect();
    let gamma: Vec<Cplx> = b.terms().iter().map(|t| t.freq / m as f64).collect();
    let denom: Vec<f64> = b.terms().iter().map(|t| phi.eval(t.freq).map(|v| v.norm())).collect::<Result<_>>()?;
    let bmod: Vec<f64> = b.terms().iter().map(|t| t.coeff.norm()).collect();
    let mut entries = Vec::new();
    let mut survivors = Vec::new();
    for (ai, alpha) in set.elems().iter().enumerate() {
        let alpha_p = plan.weights.permute(alpha);
        let is_target = alpha_p == beta_p;
        for t in index_set(&alpha_p, &sizes, b.len()) {
            let case = classify_tuple(&t, m, is_target);
            if case == TupleCase::Survivor {
                survivors.push((ai, t.survivor_index(m).expect("survivor tuple")));
                continue;
            }
            let mut mu = frequency(&t.v, &gamma);
            let mut weight = 1.0;
            for (g, ug) in l.iter().zip(&t.u) {
                let fr: Vec<Cplx> = g.terms().iter().map(|x| x.freq).collect();
                mu += frequency(ug, &fr);
                for (x, &e) in g.terms().iter().zip(ug) {
                    weight *= x.coeff.norm().powi(e as i32);
                }
            }
            let mut first = t.u[0].clone();
            first.extend_from_slice(&t.v);
            weight *= multinomial(&first)?;
            for (ug, &lg) in t.u[1..].iter().zip(&t.l) {
                let mut parts = ug.clone();
                parts.push(lg);
                weight *= multinomial(&parts)?;
            }
            for (&vj, bj) in t.v.iter().zip(&bmod) {
                weight *= bj.powf(vj as f64 / m as f64);
            }
            let n_power = t.v_total() as f64 / m as f64 * k_beta - t.l.iter().zip(&k[1..]).map(|(&lg, kg)| lg as f64 * kg).sum::<f64>();
            let theta = if case == TupleCase::PolynomialDecay {
                if !(n_power < 0.0) {
                    return Err(Error::hypothesis("polynomial_decay", format!("power {n_power} of n for {t:?} in {alpha:?}")));
                }
                1.0
            } else {
                theta_from_moduli(phi.eval(mu)?.norm(), &t.v, &denom, m)
            };
            entries.push(ThetaEntry { exponent: alpha.clone(), tuple: t, frequency: mu, theta, case, weight, n_power, bound: 0.0 });
        }
    }
    Ok(Table { entries, survivors })
}

/// Witness for the exponent set with caller-supplied target and approximating parts.
pub fn construct_witness_multi(
    phi: &SymbolSpec,
    set: &ExponentSet,
    b: &ExpPoly,
    u_targets: &[ExpPoly],
    epsilon: f64,
    grid: &DiskGrid,
    n_max: u64,
) -> Result<WitnessReport> {
    let opts = MultiOptions { epsilon, grid: *grid, n_max, ..MultiOptions::default() };
    construct_witness_multi_with(phi, set, &MultiTargets::Given { b: b.clone(), l: u_targets.to_vec() }, &opts)
}

pub fn construct_witness_multi_with(
    phi: &SymbolSpec,
    set: &ExponentSet,
    targets: &MultiTargets,
    opts: &MultiOptions,
) -> Result<WitnessReport> {
    opts.validate()?;
    let mut scale = 1.0;
    let mut round = 0;
    let (plan, l, b, table) = loop {
        let plan = plan_multi(phi, set, scale)?;
        let (l, b) = place(targets, &plan)?;
        let table = build_table(phi, set, &plan, &l, &b)?;
        let worst = table
            .entries
            .iter()
            .filter(|e| e.case.needs_margin() && e.theta > 1.0 - opts.theta_margin)
            .max_by(|x, y| x.theta.total_cmp(&y.theta));
        match worst {
            None => break (plan, l, b, table),
            Some(e) => {
                let msg = format!("ratio {} for {:?} in {:?} misses the margin {}", e.theta, e.tuple, e.exponent, opts.theta_margin);
                if matches!(targets, MultiTargets::Given { .. }) || round >= opts.replace_rounds {
                    return Err(Error::Placement(msg));
                }
                scale *= 0.5;
                round += 1;
            }
        }
    };

    let m = plan.m;
    let k = plan.weights.k_permuted();
    let beta_p = plan.weights.permute(&plan.weights.beta);
    let k_beta: f64 = (1..k.len()).map(|t| k[t] * beta_p[t] as f64).sum();
    let gamma: Vec<Cplx> = b.terms().iter().map(|t| t.freq / m as f64).collect();
    let phi_b: Vec<Cplx> = b.terms().iter().map(|t| phi.eval(t.freq)).collect::<Result<_>>()?;
    let exps: Vec<Vec<u32>> = set.elems().iter().map(|a| plan.weights.permute(a)).collect();
    let target_of: Vec<ExpPoly> = exps.iter().map(|a| if *a == beta_p { b.clone() } else { ExpPoly::zero() }).collect();
    let radius = opts.grid.radius;

    let mut trace = Vec::new();
    let mut n = 8u64;
    let (q, gens, coeffs, eval, bounds) = loop {
        if n > opts.n_max {
            let last = trace.last().map(|x: &(u64, f64)| x.1).unwrap_or(f64::INFINITY);
            return Err(Error::Exhausted { n_max: opts.n_max, last, trace });
        }
        let ln_n = (n as f64).ln();
        let coeffs = match b
            .terms()
            .iter()
            .zip(&phi_b)
            .map(|(t, &pv)| solve_coeff_scaled(t.coeff, k_beta * ln_n, m, pv, n))
            .collect::<Result<Vec<_>>>()
        {
            Ok(c) => c,
            Err(Error::Range { .. }) => {
                let last = trace.last().map(|x: &(u64, f64)| x.1).unwrap_or(f64::INFINITY);
                return Err(Error::Exhausted { n_max: n, last, trace });
            }
            Err(e) => return Err(e),
        };
        let r_n = ExpPoly::from_terms(coeffs.iter().zip(&gamma).map(|(&c, &g)| Term::new(c, g)).collect());
        let mut gens = Vec::with_capacity(l.len());
        gens.push(l[0].add(&r_n));
        for (t, lt) in l.iter().enumerate().skip(1) {
            gens.push(lt.add(&ExpPoly::constant(Cplx::new((-k[t] * ln_n).exp(), 0.0))));
        }
        let eval = evaluate_levels(phi, &gens, &exps, &target_of, n, &opts.grid)?;
        let mut bounds = vec![0.0; exps.len()];
        for e in &table.entries {
            let i = set.elems().iter().position(|a| *a == e.exponent).expect("entry exponent in set");
            bounds[i] += e.bound_at(n, radius);
        }
        let max_res = eval.iter().map(|g| g.1).fold(0.0, f64::max);
        trace.push((n, max_res));
        if max_res <= opts.epsilon && bounds.iter().all(|&s| s <= opts.epsilon) {
            break (n, gens, coeffs, eval, bounds);
        }
        n *= 2;
    };

    let mut survivors = Vec::new();
    for &(_, j) in &table.survivors {
        let (lm, ph) = power_polar(phi_b[j], q);
        let x = scaled_coeff(coeffs[j].powu(m), lm - k_beta * (q as f64).ln(), ph).unwrap_or_default();
        let bj = b.terms()[j].coeff;
        survivors.push(SurvivorCheck { index: j, target: bj, reproduced: x, rel_err: (x - bj).norm() / bj.norm() });
    }
    let approximation_p = gens.iter().zip(&l).map(|(g, lt)| sup_distance(g, lt, &opts.grid)).collect::<Result<Vec<_>>>()?;
    let targets_out = set
        .elems()
        .iter()
        .zip(eval)
        .zip(target_of)
        .zip(bounds)
        .map(|(((a, g), target), bound_sum)| TargetResidual { exponent: a.clone(), target, residual: g.1, bound_sum })
        .collect();
    let params = MultiParams {
        m,
        d_a: plan.d_a,
        exponents: set.elems().to_vec(),
        weights: plan.weights.clone(),
        route: plan.route,
        w: plan.w,
        a: plan.a,
        b: plan.b,
        lambda_window: plan.lambda_window,
        gamma_window: plan.gamma_window,
        gamma,
        theta_margin: opts.theta_margin,
        n_max: opts.n_max,
        grid: opts.grid,
        epsilon: opts.epsilon,
        placement: match targets {
            MultiTargets::Auto => Placement::Auto,
            MultiTargets::Given { .. } => Placement::Given,
        },
    };
    Ok(WitnessReport {
        route: WitnessRoute::MultiGenerator,
        generators: plan.weights.unpermute(&gens),
        q,
        targets: targets_out,
        theta_table: table.entries.into_iter().map(|e| e.with_bound(q, radius)).collect(),
        params: WitnessParams::Multi(params),
        coefficients: coeffs,
        survivors,
        approximation: plan.weights.unpermute(&approximation_p),
        fit: None,
        trace,
    })
}
