//! One generator: `f = A + R_N` with `T^N(f^m)` near `B` and `T^N(f^j)` near 0 for `j < m`.

use super::coeff::solve_coeff;
use super::fit::fit_polynomial;
use super::lattice::{enumerate_levels, frequency, multinomial_gamma, theta_ratio, LatticeTuple, TupleCase};
use super::report::{
    FitSummary, Placement, SingleParams, SurvivorCheck, TargetResidual, ThetaEntry, WitnessParams, WitnessReport, WitnessRoute,
};
use super::{check_unimodular, disk_inside, evaluate_levels};
use crate::convex::{find_convex_ray, ConvexRay};
use crate::dynamics::{power_polar, scaled_coeff, sup_norm};
use crate::error::{Error, Result};
use crate::exppoly::{ExpPoly, Term};
use crate::grid::{geometric_grid, DiskGrid};
use crate::growth::{in_unit_disk, BELOW_ONE};
use crate::symbol::SymbolSpec;
use crate::Cplx;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

const DIRECTIONS: usize = 360;
const MAGNITUDES: usize = 48;
const MAX_DELTA_HALVINGS: usize = 30;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct T2Options {
    pub m: u32,
    pub epsilon: f64,
    pub grid: DiskGrid,
    pub n_max: u64,
    pub theta_margin: f64,
    /// largest progression step scanned
    pub max_step: f64,
    /// lower end of the target window as a fraction of `w0`
    pub window_lo: f64,
    /// window re-selections allowed after a ratio misses the margin
    pub replace_rounds: u32,
    /// frequencies on the circle of radius `delta/2` around `w` in fit mode
    pub fit_approx_terms: usize,
    /// frequencies spread over the target window in fit mode
    pub fit_target_terms: usize,
}

impl Default for T2Options {
    fn default() -> Self {
        T2Options {
            m: 2,
            epsilon: 1e-6,
            grid: DiskGrid::default(),
            n_max: 1 << 20,
            theta_margin: 1e-4,
            max_step: 2.0,
            window_lo: 0.5,
            replace_rounds: 8,
            fit_approx_terms: 8,
            fit_target_terms: 2,
        }
    }
}

impl T2Options {
    pub fn validate(&self) -> Result<()> {
        if self.m < 2 {
            return Err(Error::Invalid(format!("m must be at least 2, got {}", self.m)));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::Invalid("epsilon must be positive".into()));
        }
        if self.n_max < 8 {
            return Err(Error::Invalid("n_max must be at least 8".into()));
        }
        if !(self.theta_margin > 0.0 && self.theta_margin < 1.0) {
            return Err(Error::Invalid("theta margin must lie in (0, 1)".into()));
        }
        if !(self.max_step > 0.0) {
            return Err(Error::Invalid("max_step must be positive".into()));
        }
        if !(self.window_lo > 0.0 && self.window_lo < 1.0) {
            return Err(Error::Invalid("window_lo must lie in (0, 1)".into()));
        }
        if self.fit_approx_terms == 0 || self.fit_target_terms == 0 {
            return Err(Error::Invalid("fit needs at least one frequency on each side".into()));
        }
        self.grid.validate()
    }
}

/// Caller's choice of approximating part `A` and target `B`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum TargetSpec {
    /// `A = e^{wz}`, `B = e^{beta z}` with `beta` in the middle of the window
    #[default]
    Auto,
    /// frequencies must already sit in the admissible sets
    Given { a: ExpPoly, b: ExpPoly },
    /// polynomial coefficients, fitted onto frequencies placed in the admissible sets
    Fit { a: Vec<Cplx>, b: Vec<Cplx> },
}

/// Geometry shared by every target choice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct T2Plan {
    pub m: u32,
    pub w: Cplx,
    pub delta: f64,
    pub progression_margin: f64,
    pub ray: ConvexRay,
}

impl T2Plan {
    pub fn w_star(&self) -> Cplx {
        self.ray.w1
    }

    /// Top of the target window. The ray's far end, not its base point `ray.w0`.
    #[allow(clippy::misnamed_getters)]
    pub fn w0(&self) -> Cplx {
        self.ray.w1
    }
}

/// Longest run of `true` on a circular array, as `(start, len)`; the first wins ties.
fn longest_arc(valid: &[bool]) -> Option<(usize, usize)> {
    let n = valid.len();
    if valid.iter().all(|&v| v) {
        return Some((0, n));
    }
    let mut best: Option<(usize, usize)> = None;
    for s in 0..n {
        if valid[s] && !valid[(s + n - 1) % n] {
            let mut len = 0;
            while valid[(s + len) % n] {
                len += 1;
            }
            if best.is_none_or(|(_, l)| len > l) {
                best = Some((s, len));
            }
        }
    }
    best
}

/// Every disk `D(s w, (s+d) delta)` with `s >= 1`, `s + d <= m` sits where `|phi| < 1`.
fn disks_inside(phi: &SymbolSpec, w: Cplx, delta: f64, m: u32) -> bool {
    (1..=m).all(|s| (0..=m - s).all(|d| disk_inside(phi, w * s as f64, (s + d) as f64 * delta)))
}

/// Progression step, continuity radius and convex segment for `m`.
///
/// Magnitudes up to `max_step` are scanned; at each one the middle of the longest arc
/// of directions with `|phi(j w)| < 1` for `j <= m` is a candidate, and its radius is
/// halved from `|w|/4` until the disks pass. The candidate with the largest radius wins.
pub fn plan_t2(phi: &SymbolSpec, m: u32, max_step: f64) -> Result<T2Plan> {
    phi.validate()?;
    if m < 2 {
        return Err(Error::Invalid(format!("m must be at least 2, got {m}")));
    }
    check_unimodular(phi)?;
    let mut best: Option<(Cplx, f64)> = None;
    for r in geometric_grid(max_step / 200.0, max_step, MAGNITUDES) {
        let valid: Vec<bool> = (0..DIRECTIONS)
            .map(|k| {
                let a = Cplx::from_polar(r, TAU * k as f64 / DIRECTIONS as f64);
                (1..=m).all(|j| in_unit_disk(phi, a * j as f64, BELOW_ONE))
            })
            .collect();
        let Some((start, len)) = longest_arc(&valid) else { continue };
        let center = (start + (len - 1) / 2) % DIRECTIONS;
        let w = Cplx::from_polar(r, TAU * center as f64 / DIRECTIONS as f64);
        let mut delta = r / 4.0;
        for _ in 0..=MAX_DELTA_HALVINGS {
            if disks_inside(phi, w, delta, m) {
                if best.is_none_or(|(_, d)| delta > d) {
                    best = Some((w, delta));
                }
                break;
            }
            delta *= 0.5;
        }
    }
    let (w, delta) = best.ok_or_else(|| {
        Error::SearchFailure(format!("no step w with |phi(jw)| < 1 for j <= {m} and |w| <= {max_step}"))
    })?;
    let ray = find_convex_ray(phi, Cplx::new(0.0, 0.0), delta)?;
    let progression_margin = (1..=m).map(|j| phi.eval(w * j as f64).map(|v| v.norm())).collect::<Result<Vec<_>>>()?.into_iter().fold(0.0, f64::max);
    Ok(T2Plan { m, w, delta, progression_margin, ray })
}

/// Points of `[lo w0, w0]`: `(w0 * t)` with `t` real.
fn on_window(z: Cplx, w0: Cplx, lo: f64) -> bool {
    let t = z / w0;
    t.im.abs() <= 1e-9 && t.re >= lo - 1e-12 && t.re <= 1.0 + 1e-12
}

fn place(spec: &TargetSpec, plan: &T2Plan, lo: f64, opts: &T2Options) -> Result<(ExpPoly, ExpPoly, Option<FitSummary>)> {
    let w0 = plan.w0();
    match spec {
        TargetSpec::Auto => {
            let one = Cplx::new(1.0, 0.0);
            Ok((ExpPoly::single(one, plan.w), ExpPoly::single(one, w0 * ((1.0 + lo) / 2.0)), None))
        }
        TargetSpec::Given { a, b } => {
            if a.is_zero() || b.is_zero() {
                return Err(Error::Invalid("approximating part and target must be nonzero".into()));
            }
            for t in a.terms() {
                if (t.freq - plan.w).norm() >= plan.delta {
                    return Err(Error::Placement(format!(
                        "approximating frequency {} is outside D({}, {})",
                        t.freq, plan.w, plan.delta
                    )));
                }
            }
            for t in b.terms() {
                if !on_window(t.freq, w0, lo) {
                    return Err(Error::Placement(format!("target frequency {} is outside [{lo} w0, w0], w0 = {w0}", t.freq)));
                }
            }
            Ok((a.clone(), b.clone(), None))
        }
        TargetSpec::Fit { a, b } => {
            let (na, nb) = (opts.fit_approx_terms, opts.fit_target_terms);
            let fa: Vec<Cplx> =
                (0..na).map(|k| plan.w + Cplx::from_polar(plan.delta / 2.0, TAU * k as f64 / na as f64)).collect();
            // both window ends when there are two or more; a single one goes to the top
            let fb: Vec<Cplx> = if nb == 1 {
                vec![w0]
            } else {
                (0..nb).map(|k| w0 * (lo + (1.0 - lo) * k as f64 / (nb - 1) as f64)).collect()
            };
            let ra = fit_polynomial(a, &fa, &opts.grid)?;
            let rb = fit_polynomial(b, &fb, &opts.grid)?;
            if ra.fitted.is_zero() || rb.fitted.is_zero() {
                return Err(Error::Invalid("fitted approximating part or target vanished".into()));
            }
            let (fa, fb) = (ra.fitted.clone(), rb.fitted.clone());
            Ok((fa, fb, Some(FitSummary { approximating: ra, target: rb })))
        }
    }
}

fn theta_rows(phi: &SymbolSpec, a: &ExpPoly, b: &ExpPoly, m: u32) -> Result<Vec<ThetaEntry>> {
    let alpha: Vec<Cplx> = a.terms().iter().map(|t| t.freq).collect();
    let acoef: Vec<Cplx> = a.terms().iter().map(|t| t.coeff).collect();
    let lambda: Vec<Cplx> = b.terms().iter().map(|t| t.freq / m as f64).collect();
    let bmod: Vec<f64> = b.terms().iter().map(|t| t.coeff.norm()).collect();
    let lat = enumerate_levels(a.len(), b.len(), m)?;
    let mut rows = Vec::new();
    let levels = lat.lower.iter().enumerate().map(|(i, l)| (i as u32 + 1, l)).chain(std::iter::once((m, &lat.top)));
    for (n, tuples) in levels {
        for t in tuples {
            let (theta, case) = theta_ratio(phi, &t.u[0], &t.v, &lambda, &alpha, m)?;
            let gamma = multinomial_gamma(&t.u[0], &t.v, &acoef)?;
            let mut weight = gamma.norm();
            for (&vj, bj) in t.v.iter().zip(&bmod) {
                weight *= bj.powf(vj as f64 / m as f64);
            }
            rows.push(ThetaEntry {
                exponent: vec![n],
                tuple: LatticeTuple { u: t.u.clone(), v: t.v.clone(), l: Vec::new() },
                frequency: frequency(&t.u[0], &alpha) + frequency(&t.v, &lambda),
                theta,
                case,
                weight,
                n_power: 0.0,
                bound: 0.0,
            });
        }
    }
    Ok(rows)
}

/// Witness for `m` with the given approximating part and target.
pub fn construct_witness_t2(
    phi: &SymbolSpec,
    m: u32,
    a: &ExpPoly,
    b: &ExpPoly,
    epsilon: f64,
    grid: &DiskGrid,
    n_max: u64,
) -> Result<WitnessReport> {
    let opts = T2Options { m, epsilon, grid: *grid, n_max, ..T2Options::default() };
    construct_witness_t2_with(phi, &TargetSpec::Given { a: a.clone(), b: b.clone() }, &opts)
}

pub fn construct_witness_t2_with(phi: &SymbolSpec, spec: &TargetSpec, opts: &T2Options) -> Result<WitnessReport> {
    opts.validate()?;
    let m = opts.m;
    let plan = plan_t2(phi, m, opts.max_step)?;
    let mut lo = opts.window_lo;
    let mut round = 0;
    let (a, b, fit, rows) = loop {
        let (a, b, fit) = place(spec, &plan, lo, opts)?;
        let rows = theta_rows(phi, &a, &b, m)?;
        let worst = rows
            .iter()
            .filter(|r| r.case.needs_margin() && r.theta > 1.0 - opts.theta_margin)
            .max_by(|x, y| x.theta.total_cmp(&y.theta));
        match worst {
            None => break (a, b, fit, rows),
            Some(r) => {
                let msg = format!(
                    "ratio {} for {:?} at level {:?} misses the margin {}",
                    r.theta, r.tuple, r.exponent, opts.theta_margin
                );
                if matches!(spec, TargetSpec::Given { .. }) || round >= opts.replace_rounds {
                    return Err(Error::Placement(msg));
                }
                lo = (1.0 + lo) / 2.0;
                round += 1;
            }
        }
    };

    let lambda: Vec<Cplx> = b.terms().iter().map(|t| t.freq / m as f64).collect();
    let phi_b: Vec<Cplx> = b.terms().iter().map(|t| phi.eval(t.freq)).collect::<Result<_>>()?;
    let mut targets: Vec<ExpPoly> = vec![ExpPoly::zero(); m as usize - 1];
    targets.push(b.clone());

    let mut trace = Vec::new();
    let mut n = 8u64;
    let outcome = loop {
        if n > opts.n_max {
            let last = trace.last().map(|x: &(u64, f64)| x.1).unwrap_or(f64::INFINITY);
            return Err(Error::Exhausted { n_max: opts.n_max, last, trace });
        }
        let coeffs = match b.terms().iter().zip(&phi_b).map(|(t, &pv)| solve_coeff(t.coeff, m, pv, n)).collect::<Result<Vec<_>>>() {
            Ok(c) => c,
            Err(Error::Range { .. }) => {
                // the correction coefficients left the float range before the budget was met
                let last = trace.last().map(|x: &(u64, f64)| x.1).unwrap_or(f64::INFINITY);
                return Err(Error::Exhausted { n_max: n, last, trace });
            }
            Err(e) => return Err(e),
        };
        let r_n = ExpPoly::from_terms(coeffs.iter().zip(&lambda).map(|(&c, &l)| Term::new(c, l)).collect());
        let f = a.add(&r_n);
        let eval = evaluate_levels(phi, std::slice::from_ref(&f), &(1..=m).map(|j| vec![j]).collect::<Vec<_>>(), &targets, n, &opts.grid)?;
        let bounds = bound_sums(&rows, m, n, opts.grid.radius);
        let max_res = eval.iter().map(|g| g.1).fold(0.0, f64::max);
        trace.push((n, max_res));
        if max_res <= opts.epsilon && bounds.iter().all(|&s| s <= opts.epsilon) {
            break (n, f, r_n, coeffs, eval, bounds);
        }
        n *= 2;
    };
    let (q, f, r_n, coeffs, eval, bounds) = outcome;

    let mut survivors = Vec::with_capacity(b.len());
    for (j, ((t, &pv), &c)) in b.terms().iter().zip(&phi_b).zip(&coeffs).enumerate() {
        let (lm, ph) = power_polar(pv, q);
        let x = scaled_coeff(c.powu(m), lm, ph).unwrap_or_default();
        survivors.push(SurvivorCheck { index: j, target: t.coeff, reproduced: x, rel_err: (x - t.coeff).norm() / t.coeff.norm() });
    }
    let targets = eval
        .into_iter()
        .zip(targets)
        .zip(bounds)
        .enumerate()
        .map(|(j, ((g, target), bound_sum))| TargetResidual { exponent: vec![j as u32 + 1], target, residual: g.1, bound_sum })
        .collect();
    let theta_table = rows.into_iter().map(|r| r.with_bound(q, opts.grid.radius)).collect();
    let params = SingleParams {
        m,
        w: plan.w,
        delta: plan.delta,
        w_star: plan.w_star(),
        w0: plan.w0(),
        window_lo: lo,
        alpha: a.terms().iter().map(|t| t.freq).collect(),
        lambda,
        progression_margin: plan.progression_margin,
        second_deriv_margin: plan.ray.second_deriv_margin,
        theta_margin: opts.theta_margin,
        n_max: opts.n_max,
        grid: opts.grid,
        epsilon: opts.epsilon,
        placement: match spec {
            TargetSpec::Auto => Placement::Auto,
            TargetSpec::Given { .. } => Placement::Given,
            TargetSpec::Fit { .. } => Placement::Fit,
        },
    };
    Ok(WitnessReport {
        route: WitnessRoute::SingleGenerator,
        generators: vec![f],
        q,
        targets,
        theta_table,
        params: WitnessParams::Single(params),
        coefficients: coeffs,
        survivors,
        approximation: vec![sup_norm(&r_n, &opts.grid)?],
        fit,
        trace,
    })
}

fn bound_sums(rows: &[ThetaEntry], levels: u32, n: u64, radius: f64) -> Vec<f64> {
    let mut out = vec![0.0; levels as usize];
    for r in rows {
        if r.case != TupleCase::Survivor {
            out[r.exponent[0] as usize - 1] += r.bound_at(n, radius);
        }
    }
    out
}
