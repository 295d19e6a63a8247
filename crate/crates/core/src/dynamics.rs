//! Action of `phi(D)` and its powers, computed exactly on exponential polynomials and
//! through truncated Taylor series as an independent check.

use crate::error::{Error, Result};
use crate::exppoly::{ExpPoly, Term};
use crate::grid::DiskGrid;
use crate::symbol::SymbolSpec;
use crate::taylor::TaylorPoly;
use crate::witness::lattice::{compositions, multinomial};
use crate::witness::report::WitnessReport;
use crate::Cplx;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};
use std::path::Path;

/// Extra Taylor orders both inputs must carry past the output length.
pub const TAYLOR_GUARD: usize = 20;

/// Largest `ln|x|` kept as a finite double.
pub const LN_MAX: f64 = 709.0;
/// Below this `ln|x|` a coefficient is treated as zero.
pub const LN_MIN: f64 = -745.0;

/// Reduce an angle to `(-pi, pi]`.
pub fn reduce_phase(t: f64) -> f64 {
    let r = t.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// `v^q` in polar form: `(q ln|v|, arg(v^q))` with the phase reduced to `(-pi, pi]`.
///
/// Powers up to `2^20` are formed this way so the modulus never leaves log space
/// and the phase is a single multiplication.
pub fn power_polar(v: Cplx, q: u64) -> (f64, f64) {
    let qf = q as f64;
    (qf * v.norm().ln(), reduce_phase(qf * v.arg()))
}

/// `c * e^{lm + i ph}` without forming `e^{lm}` on its own.
pub(crate) fn scaled_coeff(c: Cplx, lm: f64, ph: f64) -> Option<Cplx> {
    let ln = c.norm().ln() + lm;
    if ln < LN_MIN {
        None
    } else {
        Some(Cplx::from_polar(ln.exp(), c.arg() + ph))
    }
}

/// `phi(D) f`: every term `(c, lambda)` becomes `(c phi(lambda), lambda)`.
pub fn apply_symbol(phi: &SymbolSpec, f: &ExpPoly) -> Result<ExpPoly> {
    let mut out = Vec::with_capacity(f.len());
    for t in f.terms() {
        out.push(Term::new(t.coeff * phi.eval(t.freq)?, t.freq));
    }
    Ok(ExpPoly::from_terms(out))
}

/// `phi(D)^q f`. Terms that underflow are dropped; overflow names the frequency.
pub fn apply_symbol_power(phi: &SymbolSpec, f: &ExpPoly, q: u64) -> Result<ExpPoly> {
    if q == 0 {
        return Ok(f.clone());
    }
    let mut out = Vec::with_capacity(f.len());
    for t in f.terms() {
        let v = phi.eval(t.freq)?;
        if v.norm() == 0.0 {
            continue;
        }
        let (lm, ph) = power_polar(v, q);
        if t.coeff.norm().ln() + lm > LN_MAX {
            return Err(Error::PowerOverflow { lambda: t.freq, q });
        }
        if let Some(c) = scaled_coeff(t.coeff, lm, ph) {
            out.push(Term::new(c, t.freq));
        }
    }
    Ok(ExpPoly::from_terms(out))
}

/// `phi(D) f` on truncated series: coefficient `k` is `sum_n a_n (k+n)!/k! f_{k+n}`.
///
/// Both inputs must be truncated at `k_out + TAYLOR_GUARD` or later. Coefficients of
/// the result near `k_out` only see the guard band of `f`, which is where the loss is.
pub fn apply_symbol_taylor(phi_t: &TaylorPoly, f_t: &TaylorPoly, k_out: usize) -> Result<TaylorPoly> {
    let need = k_out + TAYLOR_GUARD;
    let got = phi_t.cap().min(f_t.cap());
    if got < need {
        return Err(Error::TaylorLength { need, got });
    }
    let a = phi_t.coeffs();
    let f = f_t.coeffs();
    let mut out = Vec::with_capacity(k_out + 1);
    for k in 0..=k_out {
        let mut acc = Cplx::new(0.0, 0.0);
        // (k+n)!/k!, built up one factor at a time
        let mut ratio = 1.0;
        for (n, an) in a.iter().enumerate() {
            if n > 0 {
                ratio *= (k + n) as f64;
            }
            match f.get(k + n) {
                Some(fk) => acc += an * fk * ratio,
                None => break,
            }
        }
        out.push(acc);
    }
    TaylorPoly::new(out, k_out)
}

/// Anything that can be evaluated at a grid point.
pub trait GridEval {
    fn eval_at(&self, z: Cplx) -> Result<Cplx>;
}

impl GridEval for ExpPoly {
    fn eval_at(&self, z: Cplx) -> Result<Cplx> {
        self.eval(z)
    }
}

impl GridEval for TaylorPoly {
    fn eval_at(&self, z: Cplx) -> Result<Cplx> {
        Ok(self.eval(z))
    }
}

/// `max |f - g|` over the grid points.
pub fn sup_distance<F: GridEval + ?Sized, G: GridEval + ?Sized>(f: &F, g: &G, grid: &DiskGrid) -> Result<f64> {
    grid.validate()?;
    let mut m = 0.0f64;
    for z in grid.points() {
        let d = (f.eval_at(z)? - g.eval_at(z)?).norm();
        if !d.is_finite() {
            return Err(Error::NonFinite("sup distance"));
        }
        m = m.max(d);
    }
    Ok(m)
}

/// `max |f|` over the grid points.
pub fn sup_norm<F: GridEval + ?Sized>(f: &F, grid: &DiskGrid) -> Result<f64> {
    sup_distance(f, &ExpPoly::zero(), grid)
}

/// Residual of one target along increasing powers of the operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitTrace {
    pub target: String,
    pub grid: DiskGrid,
    /// `(q, residual)`, `q` strictly increasing
    pub iterates: Vec<(u64, f64)>,
}

impl OrbitTrace {
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["q", "residual"])?;
        for (q, r) in &self.iterates {
            w.write_record([q.to_string(), format!("{r:e}")])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Largest `q ln M + R rho` for which the truncated-series check is attempted.
pub const TAYLOR_SCOPE_LOG: f64 = 10.0;
/// Output order of the truncated-series check.
pub const TAYLOR_ORDER: usize = 60;
/// Agreement required between the independent evaluations.
pub const AGREEMENT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum TaylorCheck {
    /// residual through the truncated series and its distance to the diagonal image
    InScope { residual: f64, max_diff: f64 },
    /// `log10` of the rounding estimate; too large for a meaningful comparison
    OutOfScope { log10_estimate: f64 },
    Unavailable { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetCheck {
    pub exponent: Vec<u32>,
    /// residual with the merged exponential polynomial and polar powers
    pub diagonal: f64,
    /// residual with every expansion term kept separate and powered in log space
    pub lattice: f64,
    /// `max |diagonal image - lattice image|` on the grid
    pub agreement: f64,
    pub taylor: TaylorCheck,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verification {
    pub passed: bool,
    pub q: u64,
    pub epsilon: f64,
    pub targets: Vec<TargetCheck>,
    pub traces: Vec<OrbitTrace>,
    pub failures: Vec<String>,
}

/// Terms of `prod g_i^{e_i}` without merging: `(coefficient, frequency)`.
fn expand_terms(generators: &[ExpPoly], exponent: &[u32]) -> Result<Vec<(Cplx, Cplx)>> {
    let mut acc = vec![(Cplx::new(1.0, 0.0), Cplx::new(0.0, 0.0))];
    for (g, &e) in generators.iter().zip(exponent) {
        if e == 0 {
            continue;
        }
        let mut part = Vec::new();
        for k in compositions(e, g.len()) {
            let mut c = Cplx::new(multinomial(&k)?, 0.0);
            let mut fr = Cplx::new(0.0, 0.0);
            for (t, &ki) in g.terms().iter().zip(&k) {
                c *= t.coeff.powu(ki);
                fr += t.freq * ki as f64;
            }
            part.push((c, fr));
        }
        acc = acc.iter().flat_map(|&(c0, f0)| part.iter().map(move |&(c1, f1)| (c0 * c1, f0 + f1))).collect();
    }
    Ok(acc)
}

/// `log` of each term of `T^q` applied to the expansion; zero terms dropped.
fn lattice_image(phi: &SymbolSpec, terms: &[(Cplx, Cplx)], q: u64) -> Result<Vec<(Cplx, Cplx)>> {
    let mut out = Vec::with_capacity(terms.len());
    for &(c, fr) in terms {
        let v = phi.eval(fr)?;
        if c.norm() == 0.0 || (q > 0 && v.norm() == 0.0) {
            continue;
        }
        let lv = if q == 0 { Cplx::new(0.0, 0.0) } else { v.ln() * q as f64 };
        out.push((c.ln() + lv, fr));
    }
    Ok(out)
}

fn eval_log_terms(terms: &[(Cplx, Cplx)], z: Cplx) -> Result<Cplx> {
    let mut acc = Cplx::new(0.0, 0.0);
    for &(lc, fr) in terms {
        let e = lc + fr * z;
        if e.re > LN_MAX {
            return Err(Error::PowerOverflow { lambda: fr, q: 0 });
        }
        if e.re >= LN_MIN {
            acc += e.exp();
        }
    }
    Ok(acc)
}

fn taylor_check(phi: &SymbolSpec, f: &ExpPoly, q: u64, target: &ExpPoly, diag: &ExpPoly, grid: &DiskGrid) -> TaylorCheck {
    let rho = f.max_freq_modulus();
    let m_phi = (0..64)
        .map(|k| phi.eval(Cplx::from_polar(rho.max(1e-3), TAU * k as f64 / 64.0)).map(|v| v.norm()))
        .collect::<Result<Vec<_>>>()
        .map(|v| v.into_iter().fold(0.0, f64::max));
    let m_phi = match m_phi {
        Ok(x) => x,
        Err(e) => return TaylorCheck::Unavailable { reason: e.to_string() },
    };
    let growth = q as f64 * m_phi.max(1.0).ln() + grid.radius * rho;
    let log10_estimate = (f64::EPSILON.ln() + f.coeff_l1().ln() + growth) / std::f64::consts::LN_10;
    if growth > TAYLOR_SCOPE_LOG || log10_estimate > -7.0 {
        return TaylorCheck::OutOfScope { log10_estimate };
    }
    let cap = TAYLOR_ORDER + TAYLOR_GUARD;
    let run = || -> Result<(f64, f64)> {
        let phi_t = crate::derivs::to_taylor_with(phi, cap, &crate::derivs::CauchyOptions::oracle())?;
        let img = apply_symbol_taylor(&phi_t.pow_trunc(q, cap), &TaylorPoly::from_exppoly(f, cap), TAYLOR_ORDER)?;
        Ok((sup_distance(&img, target, grid)?, sup_distance(&img, diag, grid)?))
    };
    match run() {
        Ok((residual, max_diff)) => TaylorCheck::InScope { residual, max_diff },
        Err(e) => TaylorCheck::Unavailable { reason: e.to_string() },
    }
}

/// Recompute `T^q(prod g_i^{e_i})` for each exponent from scratch and compare with
/// the targets. Passes when the diagonal and lattice evaluations agree within
/// `AGREEMENT_TOL`, both residuals are at most `epsilon`, and the truncated-series
/// check, when in scope, agrees as well.
pub fn verify_targets(
    phi: &SymbolSpec,
    generators: &[ExpPoly],
    exponents: &[Vec<u32>],
    q: u64,
    targets: &[ExpPoly],
    grid: &DiskGrid,
    epsilon: f64,
) -> Result<Verification> {
    grid.validate()?;
    if generators.is_empty() || generators.iter().any(ExpPoly::is_zero) {
        return Err(Error::Invalid("generators must be nonzero".into()));
    }
    if exponents.len() != targets.len() || exponents.iter().any(|e| e.len() != generators.len()) {
        return Err(Error::Invalid("exponents, targets and generators do not line up".into()));
    }
    let pts = grid.points();
    let mut checks = Vec::with_capacity(exponents.len());
    let mut traces = Vec::with_capacity(exponents.len());
    let mut failures = Vec::new();
    for (e, target) in exponents.iter().zip(targets) {
        let f = {
            let mut acc = ExpPoly::constant(Cplx::new(1.0, 0.0));
            for (g, &k) in generators.iter().zip(e) {
                acc = acc.mul(&g.pow(k));
            }
            acc
        };
        let diag = apply_symbol_power(phi, &f, q)?;
        let lat = lattice_image(phi, &expand_terms(generators, e)?, q)?;
        let (mut d_res, mut l_res, mut agree) = (0.0f64, 0.0f64, 0.0f64);
        for &z in &pts {
            let dv = diag.eval(z)?;
            let lv = eval_log_terms(&lat, z)?;
            let tv = target.eval(z)?;
            d_res = d_res.max((dv - tv).norm());
            l_res = l_res.max((lv - tv).norm());
            agree = agree.max((dv - lv).norm());
        }
        let taylor = taylor_check(phi, &f, q, target, &diag, grid);
        let label = format!("{e:?}");
        if d_res > epsilon {
            failures.push(format!("{label}: diagonal residual {d_res:e} > {epsilon:e}"));
        }
        if l_res > epsilon {
            failures.push(format!("{label}: lattice residual {l_res:e} > {epsilon:e}"));
        }
        if agree > AGREEMENT_TOL {
            failures.push(format!("{label}: evaluations differ by {agree:e}"));
        }
        if let TaylorCheck::InScope { residual, max_diff } = taylor {
            if residual > epsilon || max_diff > AGREEMENT_TOL {
                failures.push(format!("{label}: truncated series residual {residual:e}, difference {max_diff:e}"));
            }
        }
        let mut iterates = Vec::new();
        let mut qq = 1u64;
        while qq < q {
            iterates.push((qq, sup_distance(&apply_symbol_power(phi, &f, qq)?, target, grid)?));
            qq *= 2;
        }
        iterates.push((q, d_res));
        traces.push(OrbitTrace { target: label, grid: *grid, iterates });
        checks.push(TargetCheck { exponent: e.clone(), diagonal: d_res, lattice: l_res, agreement: agree, taylor });
    }
    Ok(Verification { passed: failures.is_empty(), q, epsilon, targets: checks, traces, failures })
}

/// Re-verify a witness report on `grid` at tolerance `epsilon`.
pub fn verify_witness(phi: &SymbolSpec, report: &WitnessReport, grid: &DiskGrid, epsilon: f64) -> Result<Verification> {
    let exps: Vec<Vec<u32>> = report.targets.iter().map(|t| t.exponent.clone()).collect();
    let targets: Vec<ExpPoly> = report.targets.iter().map(|t| t.target.clone()).collect();
    verify_targets(phi, &report.generators, &exps, report.q, &targets, grid, epsilon)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Cplx {
        Cplx::new(re, im)
    }

    #[test]
    fn reduce_phase_range() {
        assert_eq!(reduce_phase(PI), PI);
        assert!((reduce_phase(-PI) - PI).abs() < 1e-15);
        assert!((reduce_phase(3.0 * TAU + 0.5) - 0.5).abs() < 1e-12);
        assert!((reduce_phase(-0.5) + 0.5).abs() < 1e-15);
    }

    #[test]
    fn shift_symbol_multiplies_by_exp() {
        let lam = c(0.3, -1.1);
        let g = apply_symbol(&SymbolSpec::exp(c(1.0, 0.0)), &ExpPoly::single(c(1.0, 0.0), lam)).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g.terms()[0].freq, lam);
        assert!((g.terms()[0].coeff - lam.exp()).norm() < 1e-15);
    }

    #[test]
    fn zero_and_constant() {
        assert!(apply_symbol(&SymbolSpec::cos(), &ExpPoly::zero()).unwrap().is_zero());
        let g = apply_symbol(&SymbolSpec::cos(), &ExpPoly::constant(c(1.0, 0.0))).unwrap();
        assert_eq!(g, ExpPoly::constant(c(1.0, 0.0)));
    }

    #[test]
    fn symbol_zero_drops_term() {
        // cos vanishes at pi/2
        let f = ExpPoly::single(c(1.0, 0.0), c(std::f64::consts::FRAC_PI_2, 0.0));
        let g = apply_symbol_power(&SymbolSpec::cos(), &f, 3).unwrap();
        assert!(g.coeff_l1() < 1e-40);
    }

    #[test]
    fn power_zero_is_identity_and_fold_agrees() {
        let phi = SymbolSpec::sin_plus_exp_neg();
        let f = ExpPoly::from_terms(vec![Term::new(c(1.0, 0.5), c(0.4, 0.2)), Term::new(c(-2.0, 0.0), c(-0.1, 1.3))]);
        assert_eq!(apply_symbol_power(&phi, &f, 0).unwrap(), f);
        let mut fold = f.clone();
        for _ in 0..7 {
            fold = apply_symbol(&phi, &fold).unwrap();
        }
        let pw = apply_symbol_power(&phi, &f, 7).unwrap();
        for (a, b) in fold.terms().iter().zip(pw.terms()) {
            assert_eq!(a.freq, b.freq);
            assert!((a.coeff - b.coeff).norm() <= 1e-12 * a.coeff.norm());
        }
    }

    #[test]
    fn decaying_modulus() {
        let phi = SymbolSpec::exp_square(c(1.0, 0.0));
        let f = ExpPoly::single(c(1.0, 0.0), c(0.0, 0.5));
        let mut prev = f64::INFINITY;
        for q in 0..20 {
            let m = apply_symbol_power(&phi, &f, q).unwrap().coeff_l1();
            assert!(m < prev);
            prev = m;
        }
    }

    #[test]
    fn overflow_names_frequency() {
        let phi = SymbolSpec::exp(c(1.0, 0.0));
        let f = ExpPoly::single(c(1.0, 0.0), c(2.0, 0.0));
        match apply_symbol_power(&phi, &f, 1000).unwrap_err() {
            Error::PowerOverflow { lambda, q } => {
                assert_eq!(lambda, c(2.0, 0.0));
                assert_eq!(q, 1000);
            }
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn large_power_phase_is_reduced() {
        // |phi| = 1 on the imaginary axis for phi = exp, so only the phase moves
        let phi = SymbolSpec::exp(c(1.0, 0.0));
        let f = ExpPoly::single(c(1.0, 0.0), c(0.0, 1.0));
        let q = 1u64 << 20;
        let g = apply_symbol_power(&phi, &f, q).unwrap();
        let want = reduce_phase((q as f64).rem_euclid(TAU));
        let got = g.terms()[0].coeff;
        assert!((got.norm() - 1.0).abs() < 1e-12);
        assert!((got.arg() - want).abs() < 1e-9);
    }

    fn taylor(v: &[f64], cap: usize) -> TaylorPoly {
        TaylorPoly::new(v.iter().map(|&x| c(x, 0.0)).collect(), cap).unwrap()
    }

    #[test]
    fn taylor_differentiation() {
        let d = taylor(&[0.0, 1.0], 30);
        let f = taylor(&[0.0, 0.0, 0.5], 30);
        let g = apply_symbol_taylor(&d, &f, 10).unwrap();
        assert_eq!(g.coeff(1), c(1.0, 0.0));
        assert!(g.coeffs().iter().enumerate().all(|(k, v)| k == 1 || v.norm() == 0.0));
    }

    #[test]
    fn taylor_identity() {
        let one = TaylorPoly::one(30);
        let f = taylor(&[1.0, -2.0, 3.0, 0.25], 30);
        let g = apply_symbol_taylor(&one, &f, 10).unwrap();
        for k in 0..=10 {
            assert_eq!(g.coeff(k), f.coeff(k));
        }
    }

    #[test]
    fn taylor_shift_matches_diagonal() {
        let cap = 60;
        let mut a = vec![1.0];
        for k in 1..=cap {
            a.push(a[k - 1] / k as f64);
        }
        let phi_t = taylor(&a, cap);
        for lam in [c(2.0, 0.0), c(-1.2, 1.5), c(0.0, -2.0)] {
            let f = ExpPoly::single(c(1.0, 0.0), lam);
            let g = apply_symbol_taylor(&phi_t, &TaylorPoly::from_exppoly(&f, cap), 40).unwrap();
            let want = TaylorPoly::from_exppoly(&f.scale(lam.exp()), 40);
            for k in 0..=40 {
                let w = want.coeff(k);
                assert!((g.coeff(k) - w).norm() <= 1e-8 * w.norm().max(1e-300), "k={k}");
            }
        }
    }

    #[test]
    fn taylor_length_checked() {
        let short = TaylorPoly::one(10);
        let err = apply_symbol_taylor(&short, &TaylorPoly::one(40), 5).unwrap_err();
        assert_eq!(err, Error::TaylorLength { need: 25, got: 10 });
    }

    #[test]
    fn sup_distance_basics() {
        let g = DiskGrid::default();
        let f = ExpPoly::single(c(1.0, 0.0), c(0.5, 0.2));
        assert_eq!(sup_distance(&f, &f, &g).unwrap(), 0.0);
        assert_eq!(sup_norm(&ExpPoly::constant(c(1.0, 0.0)), &g).unwrap(), 1.0);
        let t = TaylorPoly::from_exppoly(&f, 60);
        assert!(sup_distance(&f, &t, &DiskGrid::new(1.0, 16, 2).unwrap()).unwrap() < 1e-12);
    }

    #[test]
    fn orbit_trace_csv() {
        let dir = std::env::temp_dir().join(format!("hyperalg-orbit-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join("orbit.csv");
        let tr = OrbitTrace { target: "f^2".into(), grid: DiskGrid::default(), iterates: vec![(1, 0.5), (2, 0.25)] };
        tr.write_csv(&p).unwrap();
        let s = std::fs::read_to_string(&p).unwrap();
        assert!(s.starts_with("q,residual\n1,5e-1\n"));
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn verify_small_case_in_taylor_scope() {
        let phi = SymbolSpec::cos();
        let g = ExpPoly::from_terms(vec![Term::new(c(1.0, 0.0), c(0.3, 0.1)), Term::new(c(0.5, 0.0), c(-0.2, 0.4))]);
        let grid = DiskGrid::new(1.0, 16, 3).unwrap();
        let exps = vec![vec![1], vec![2]];
        let targets: Vec<ExpPoly> = exps.iter().map(|e| apply_symbol_power(&phi, &g.pow(e[0]), 2).unwrap()).collect();
        let v = verify_targets(&phi, &[g], &exps, 2, &targets, &grid, 1e-9).unwrap();
        assert!(v.passed, "{:?}", v.failures);
        for t in &v.targets {
            match &t.taylor {
                TaylorCheck::InScope { max_diff, .. } => assert!(*max_diff < 1e-9, "{max_diff}"),
                other => panic!("{other:?}"),
            }
        }
        assert_eq!(v.traces[0].iterates.iter().map(|x| x.0).collect::<Vec<_>>(), vec![1, 2]);
    }

    #[test]
    fn verify_rejects_zero_generator() {
        let err = verify_targets(&SymbolSpec::cos(), &[ExpPoly::zero()], &[vec![1]], 1, &[ExpPoly::zero()], &DiskGrid::default(), 1e-6);
        assert!(matches!(err, Err(Error::Invalid(_))));
    }

    #[test]
    fn verify_detects_wrong_target() {
        let phi = SymbolSpec::exp_square(c(1.0, 0.0));
        let g = ExpPoly::single(c(1.0, 0.0), c(0.0, 1.0));
        let v = verify_targets(&phi, &[g], &[vec![1]], 3, &[ExpPoly::constant(c(1.0, 0.0))], &DiskGrid::default(), 1e-6).unwrap();
        assert!(!v.passed);
        assert!(v.failures.iter().any(|f| f.contains("diagonal residual")));
        assert!(v.failures.iter().any(|f| f.contains("lattice residual")));
    }

    #[test]
    fn lattice_expansion_matches_products() {
        let g1 = ExpPoly::from_terms(vec![Term::new(c(1.0, 2.0), c(0.1, 0.0)), Term::new(c(-0.5, 0.0), c(0.0, 0.7))]);
        let g2 = ExpPoly::from_terms(vec![Term::new(c(0.3, 0.0), c(-0.4, 0.2)), Term::new(c(2.0, -1.0), c(0.0, 0.0))]);
        let terms = expand_terms(&[g1.clone(), g2.clone()], &[3, 2]).unwrap();
        assert_eq!(terms.len(), 4 * 3);
        let prod = g1.pow(3).mul(&g2.pow(2));
        for z in [c(0.5, -0.3), c(-1.0, 1.0)] {
            let direct: Cplx = terms.iter().map(|&(a, f)| a * (f * z).exp()).sum();
            assert!((direct - prod.eval(z).unwrap()).norm() < 1e-12);
        }
    }
}
