//! Growth diagnostics of symbols and the ray/progression searches built on them.
//!
//! Every limsup below is replaced by a maximum over the top half of a finite window.
//! The outputs are numerical evidence, never proofs.

use crate::error::{Error, Result};
use crate::grid::geometric_grid;
use crate::symbol::SymbolSpec;
use crate::Cplx;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::io::Write;

/// `|phi| < 1` is enforced as `|phi| <= 1 - BELOW_ONE`.
pub const BELOW_ONE: f64 = 1e-6;
/// `|phi| > 1` is enforced as `|phi| >= 1 + ABOVE_ONE`.
pub const ABOVE_ONE: f64 = 1e-6;
/// Samples below this modulus are skipped by the indicator.
pub const ZERO_FLOOR: f64 = 1e-300;

/// `|phi(z)| <= 1 - margin`; points where evaluation overflows are outside.
pub fn in_unit_disk(phi: &SymbolSpec, z: Cplx, margin: f64) -> bool {
    phi.eval(z).map(|v| v.norm() <= 1.0 - margin).unwrap_or(false)
}

pub fn max_modulus(phi: &SymbolSpec, r: f64, samples: usize) -> Result<f64> {
    if !(r > 0.0) || samples < 16 {
        return Err(Error::Invalid(format!("max_modulus needs r > 0 and samples >= 16 (r={r}, samples={samples})")));
    }
    let mut m = 0.0f64;
    for k in 0..samples {
        let z = Cplx::from_polar(r, TAU * k as f64 / samples as f64);
        m = m.max(phi.eval(z)?.norm());
    }
    Ok(m)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthEstimate {
    pub order: f64,
    #[serde(rename = "type")]
    pub type_: f64,
    /// the type is only meaningful when the order is within 0.2 of 1
    pub type_valid: bool,
    pub r_window: (f64, f64),
    /// RMS residual of the log-log fit
    pub quality: f64,
    /// true when `M(r) <= 1` throughout the fit window
    pub degenerate: bool,
    /// `(r, log M(r))` for every grid point
    pub log_max: Vec<(f64, f64)>,
}

impl GrowthEstimate {
    /// Columns `r, logM`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["r", "logM"])?;
        for (r, l) in &self.log_max {
            wr.write_record([r.to_string(), l.to_string()])?;
        }
        wr.flush()?;
        Ok(())
    }
}

const MODULUS_SAMPLES: usize = 256;

pub fn estimate_order_type(phi: &SymbolSpec, r_grid: &[f64]) -> Result<GrowthEstimate> {
    if r_grid.len() < 8 || r_grid.windows(2).any(|w| !(w[1] > w[0])) || r_grid[0] <= 0.0 {
        return Err(Error::Invalid("r_grid must be positive, increasing, with at least 8 points".into()));
    }
    let log_max: Vec<(f64, f64)> = r_grid
        .iter()
        .map(|&r| max_modulus(phi, r, MODULUS_SAMPLES).map(|m| (r, m.ln())))
        .collect::<Result<_>>()?;
    let top = &log_max[log_max.len() / 2..];
    let r_window = (top[0].0, top[top.len() - 1].0);
    let pts: Vec<(f64, f64)> = top.iter().filter(|(_, l)| *l > 0.0).map(|(r, l)| (r.ln(), l.ln())).collect();
    if pts.len() < 2 {
        return Ok(GrowthEstimate {
            order: 0.0,
            type_: 0.0,
            type_valid: false,
            r_window,
            quality: f64::MAX,
            degenerate: true,
            log_max,
        });
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let quality = (pts.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2)).sum::<f64>() / n).sqrt();
    let order = slope.max(0.0);
    let type_ = top.iter().map(|(r, l)| l / r).fold(0.0f64, f64::max);
    Ok(GrowthEstimate { order, type_, type_valid: (order - 1.0).abs() <= 0.2, r_window, quality, degenerate: false, log_max })
}

pub fn indicator(phi: &SymbolSpec, theta: f64, r_grid: &[f64]) -> Result<f64> {
    if r_grid.is_empty() || r_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Invalid("indicator needs an increasing r_grid".into()));
    }
    let dir = Cplx::from_polar(1.0, theta);
    let mut best: Option<f64> = None;
    for &t in &r_grid[r_grid.len() / 2..] {
        let m = phi.eval(dir * t)?.norm();
        if m < ZERO_FLOOR {
            continue;
        }
        let v = m.ln() / t;
        best = Some(best.map_or(v, |b| b.max(v)));
    }
    best.ok_or_else(|| Error::SearchFailure("every indicator sample hit a zero of phi".into()))
}

/// Indicator along the ray through `z1`, clamped at 0. Exactly 0 for symbols whose
/// form makes them subexponential.
pub fn tau0(phi: &SymbolSpec, z1: Cplx, r_grid: &[f64]) -> Result<f64> {
    if z1.norm() == 0.0 {
        return Err(Error::Invalid("tau0 needs z1 != 0".into()));
    }
    if phi.is_structurally_subexponential() {
        return Ok(0.0);
    }
    Ok(indicator(phi, z1.arg(), r_grid)?.max(0.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RayScan {
    pub theta: f64,
    pub t_grid: Vec<f64>,
    pub moduli: Vec<f64>,
}

impl RayScan {
    /// Columns `t, modulus`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["t", "modulus"])?;
        for (t, m) in self.t_grid.iter().zip(&self.moduli) {
            wr.write_record([t.to_string(), m.to_string()])?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// Moduli along a ray. Overflowing points are recorded as `f64::MAX`.
pub fn ray_scan(phi: &SymbolSpec, theta: f64, t_grid: &[f64]) -> Result<RayScan> {
    if t_grid.windows(2).any(|w| !(w[1] > w[0])) || t_grid.first().is_some_and(|t| *t <= 0.0) {
        return Err(Error::Invalid("ray t_grid must be positive and strictly increasing".into()));
    }
    let dir = Cplx::from_polar(1.0, theta);
    let moduli = t_grid
        .iter()
        .map(|&t| match phi.eval(dir * t) {
            Ok(v) => Ok(v.norm()),
            Err(Error::Range { .. }) => Ok(f64::MAX),
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;
    Ok(RayScan { theta, t_grid: t_grid.to_vec(), moduli })
}

/// Largest sampled `r` such that every sample `t <= r` on the ray has `|phi| < 1`.
pub fn ray_below_one(phi: &SymbolSpec, theta: f64, t_max: f64, samples: usize) -> Result<Option<f64>> {
    if samples < 64 || !(t_max > 0.0) {
        return Err(Error::Invalid("ray_below_one needs t_max > 0 and samples >= 64".into()));
    }
    let grid: Vec<f64> = (1..=samples).map(|k| t_max * k as f64 / samples as f64).collect();
    let scan = ray_scan(phi, theta, &grid)?;
    let mut r = None;
    for (t, m) in scan.t_grid.iter().zip(&scan.moduli) {
        if *m <= 1.0 - BELOW_ONE {
            r = Some(*t);
        } else {
            break;
        }
    }
    Ok(r)
}

/// Default magnitude grid for progression scans.
pub fn default_step_grid(t_max: f64) -> Vec<f64> {
    geometric_grid(1e-3, t_max, 200)
}

/// First step `a` with `|phi(j a)| < 1` for `j = 1..=m`.
///
/// Magnitudes are scanned in increasing order. At the first magnitude with any valid
/// direction, the direction with the smallest `max_j |phi(j a)|` is returned (lowest
/// index on ties), so the choice is deterministic and prefers the steepest descent.
pub fn find_arith_progression(phi: &SymbolSpec, m: usize, directions: usize, a_grid: &[f64]) -> Option<Cplx> {
    if m == 0 || directions == 0 {
        return None;
    }
    for &r in a_grid {
        let mut best: Option<(f64, Cplx)> = None;
        for k in 0..directions {
            let a = Cplx::from_polar(r, TAU * k as f64 / directions as f64);
            if let Some(worst) = progression_worst(phi, a, m) {
                if worst <= 1.0 - BELOW_ONE && best.is_none_or(|(b, _)| worst < b) {
                    best = Some((worst, a));
                }
            }
        }
        if let Some((_, a)) = best {
            return Some(a);
        }
    }
    None
}

/// `max_{1<=j<=m} |phi(j a)|`, or `None` when evaluation overflows.
pub fn progression_worst(phi: &SymbolSpec, a: Cplx, m: usize) -> Option<f64> {
    let mut worst = 0.0f64;
    for j in 1..=m {
        let v = phi.eval(a * j as f64).ok()?.norm();
        worst = worst.max(v);
    }
    Some(worst)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RayGrowthEvidence {
    pub theta: f64,
    /// `|phi| < 1` on `(0, r]`
    pub r: f64,
    /// `|phi(R e^{i theta})| > max(1, e^{h R})`
    pub big_r: f64,
    /// indicator estimate used for `h`
    pub h_hat: f64,
    pub modulus_at_big_r: f64,
}

/// Searches for `0 < r < R` with `|phi| < 1` on `(0, r]` and
/// `|phi(R e^{i theta})| >= (1 + margin) max(1, e^{h R})`.
///
/// The indicator is estimated on `[R_max, 2 R_max]` with `R_max` the top of `r_grid_big`,
/// so the test point never sits inside the estimation window.
pub fn check_tma_conditions(phi: &SymbolSpec, theta: f64, t_max: f64, r_grid_big: &[f64]) -> Result<Option<RayGrowthEvidence>> {
    let Some(r) = ray_below_one(phi, theta, t_max, 256)? else {
        return Ok(None);
    };
    let Some(&r_top) = r_grid_big.last() else {
        return Ok(None);
    };
    let h_grid = geometric_grid(r_top, 2.0 * r_top, 24);
    let h_hat = match tau0(phi, Cplx::from_polar(1.0, theta), &h_grid) {
        Ok(h) => h,
        Err(Error::Range { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let dir = Cplx::from_polar(1.0, theta);
    for &big_r in r_grid_big {
        if big_r <= r {
            continue;
        }
        let m = match phi.eval(dir * big_r) {
            Ok(v) => v.norm(),
            Err(Error::Range { .. }) => continue,
            Err(e) => return Err(e),
        };
        let bar = (1.0 + ABOVE_ONE) * (h_hat * big_r).exp().max(1.0);
        if m >= bar {
            return Ok(Some(RayGrowthEvidence { theta, r, big_r, h_hat, modulus_at_big_r: m }));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Cplx {
        Cplx::new(re, im)
    }

    #[test]
    fn max_modulus_examples() {
        let e = SymbolSpec::exp(c(1.0, 0.0));
        assert!((max_modulus(&e, 2.0, 64).unwrap() - 2f64.exp()).abs() < 1e-6);
        let one = SymbolSpec::polynomial(vec![c(1.0, 0.0)]);
        assert_eq!(max_modulus(&one, 5.0, 16).unwrap(), 1.0);
        assert!((max_modulus(&SymbolSpec::cos(), 3.0, 64).unwrap() - 3f64.cosh()).abs() < 1e-6);
        assert!(max_modulus(&e, 1.0, 8).is_err());
    }

    #[test]
    fn order_type_examples() {
        let grid = geometric_grid(2.0, 50.0, 24);
        let e = estimate_order_type(&SymbolSpec::exp(c(1.0, 0.0)), &grid).unwrap();
        assert!((e.order - 1.0).abs() < 0.05 && (e.type_ - 1.0).abs() < 0.05, "{e:?}");
        let cs = estimate_order_type(&SymbolSpec::cos(), &grid).unwrap();
        assert!((cs.order - 1.0).abs() < 0.05 && (cs.type_ - 1.0).abs() < 0.05, "{cs:?}");
        let p = estimate_order_type(&SymbolSpec::polynomial(vec![c(1.0, 0.0), c(1.0, 0.0)]), &geometric_grid(1e2, 1e8, 24)).unwrap();
        assert!(p.order < 0.1, "{p:?}");
    }

    #[test]
    fn degenerate_growth() {
        let e = estimate_order_type(&SymbolSpec::polynomial(vec![c(0.5, 0.0)]), &geometric_grid(1.0, 10.0, 8)).unwrap();
        assert!(e.degenerate);
        assert_eq!(e.order, 0.0);
    }

    #[test]
    fn indicator_examples() {
        let grid = geometric_grid(2.0, 50.0, 24);
        let e = SymbolSpec::exp(c(1.0, 0.0));
        assert!((indicator(&e, 0.0, &grid).unwrap() - 1.0).abs() < 1e-6);
        assert!((indicator(&e, PI, &grid).unwrap() + 1.0).abs() < 0.1);
        assert!((indicator(&SymbolSpec::cos(), PI / 2.0, &grid).unwrap() - 1.0).abs() < 0.05);
    }

    #[test]
    fn tau0_examples() {
        let grid = geometric_grid(2.0, 50.0, 24);
        let p = SymbolSpec::polynomial(vec![c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(tau0(&p, c(1.0, 1.0), &grid).unwrap(), 0.0);
        assert!((tau0(&SymbolSpec::exp(c(1.0, 0.0)), c(1.0, 0.0), &grid).unwrap() - 1.0).abs() < 1e-6);
        assert!(tau0(&SymbolSpec::cos(), c(1.0, 0.0), &grid).unwrap() < 0.05);
        assert!(tau0(&SymbolSpec::cos(), c(0.0, 0.0), &grid).is_err());
    }

    #[test]
    fn ray_below_one_examples() {
        let t_max = 5.0;
        let r = ray_below_one(&SymbolSpec::exp(c(-1.0, 0.0)), 0.0, t_max, 64).unwrap();
        assert_eq!(r, Some(t_max));
        assert_eq!(ray_below_one(&SymbolSpec::exp(c(1.0, 0.0)), 0.0, t_max, 64).unwrap(), None);
        let r = ray_below_one(&SymbolSpec::cos(), 0.0, 4.0, 256).unwrap().unwrap();
        // the margin excludes the sample just below pi, where 1 - |cos t| is about 5e-7
        assert!(r < PI && r > PI - 2.0 * 4.0 / 256.0 - 1e-12, "{r}");
    }

    #[test]
    fn progression_examples() {
        let grid = default_step_grid(4.0);
        let a = find_arith_progression(&SymbolSpec::cos(), 5, 360, &grid).unwrap();
        for j in 1..=5 {
            assert!((a * j as f64).cos().norm() < 1.0);
        }
        let phi = SymbolSpec::exp_times_poly(c(1.0, 0.0), vec![c(1.0, 0.0), c(1.0, 0.0)]);
        let a = find_arith_progression(&phi, 3, 360, &grid).unwrap();
        assert!(a.re < 0.0 && a.im.abs() < 1e-12 * a.norm().max(1.0), "{a}");
        let shifted = SymbolSpec::polynomial(vec![c(2.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(find_arith_progression(&shifted, 2, 360, &geometric_grid(1e-3, 0.5, 20)), None);
    }

    #[test]
    fn tma_examples() {
        let big = geometric_grid(0.1, 32.0, 64);
        let p = SymbolSpec::polynomial(vec![c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let ev = check_tma_conditions(&p, 0.0, 0.9, &big).unwrap().unwrap();
        assert_eq!(ev.h_hat, 0.0);
        assert!(ev.big_r > ev.r && ev.modulus_at_big_r > 1.0);
        assert!(check_tma_conditions(&SymbolSpec::exp(c(1.0, 0.0)), 0.0, 2.0, &big).unwrap().is_none());
        assert!(check_tma_conditions(&SymbolSpec::cos(), PI / 2.0, 2.0, &big).unwrap().is_none());
    }

    #[test]
    fn csv_columns() {
        let scan = ray_scan(&SymbolSpec::cos(), 0.0, &[0.5, 1.0]).unwrap();
        let mut buf = Vec::new();
        scan.write_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("t,modulus\n0.5,"));
    }
}
