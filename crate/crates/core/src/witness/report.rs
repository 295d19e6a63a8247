//! Serializable outcome of a witness construction.

use super::fit::FitResult;
use super::lattice::{LatticeTuple, TupleCase};
use super::weights::WeightChoice;
use crate::error::Result;
use crate::exppoly::ExpPoly;
use crate::grid::DiskGrid;
use crate::Cplx;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessRoute {
    SingleGenerator,
    MultiGenerator,
}

/// How the target frequencies were chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Placement {
    Auto,
    Given,
    Fit,
}

/// Residual of one power of the generators against its target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetResidual {
    /// the power: `[j]` for one generator, the exponent tuple otherwise
    pub exponent: Vec<u32>,
    pub target: ExpPoly,
    /// `max |T^q(f^exponent) - target|` on the grid
    pub residual: f64,
    /// sum of the per-tuple bounds over every tuple that should vanish
    pub bound_sum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaEntry {
    pub exponent: Vec<u32>,
    #[serde(flatten)]
    pub tuple: LatticeTuple,
    pub frequency: Cplx,
    pub theta: f64,
    pub case: TupleCase,
    /// `q`-independent part of the tuple's magnitude
    pub weight: f64,
    /// power of `q` in the tuple's magnitude
    pub n_power: f64,
    /// `weight q^n_power theta^q e^{R |frequency|}` at the reported `q`
    pub bound: f64,
}

impl ThetaEntry {
    pub fn with_bound(mut self, q: u64, radius: f64) -> Self {
        self.bound = self.bound_at(q, radius);
        self
    }

    /// Grid sup bound of the tuple's contribution after `q` steps.
    pub fn bound_at(&self, q: u64, radius: f64) -> f64 {
        if self.weight == 0.0 || self.theta == 0.0 {
            return 0.0;
        }
        let qf = q as f64;
        (self.weight.ln() + self.n_power * qf.ln() + qf * self.theta.ln() + radius * self.frequency.norm()).exp()
    }
}

/// Survivor contribution against the coefficient it should reproduce.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivorCheck {
    pub index: usize,
    pub target: Cplx,
    pub reproduced: Cplx,
    pub rel_err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingleParams {
    pub m: u32,
    /// progression step: `|phi(j w)| < 1` for `j <= m`
    pub w: Cplx,
    /// radius of the disks around `w` and the origin that keep the sums inside
    pub delta: f64,
    /// end of the convex segment from the origin
    pub w_star: Cplx,
    /// top of the target window `[window_lo w0, w0]`
    pub w0: Cplx,
    pub window_lo: f64,
    /// approximating frequencies
    pub alpha: Vec<Cplx>,
    /// correction frequencies, target frequencies over `m`
    pub lambda: Vec<Cplx>,
    pub progression_margin: f64,
    pub second_deriv_margin: f64,
    pub theta_margin: f64,
    pub n_max: u64,
    pub grid: DiskGrid,
    pub epsilon: f64,
    pub placement: Placement,
}

/// Where the approximating and correction windows sit relative to the convex segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowRoute {
    /// both windows on one line through the origin, on opposite sides
    Collinear,
    /// the approximating window on its own ray where `|phi| < 1`
    SplitRay,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiParams {
    pub m: u32,
    pub d_a: u32,
    pub exponents: Vec<Vec<u32>>,
    pub weights: WeightChoice,
    pub route: WindowRoute,
    pub w: Cplx,
    pub a: f64,
    pub b: f64,
    pub lambda_window: [Cplx; 2],
    pub gamma_window: [Cplx; 2],
    /// correction frequencies, target frequencies over `m`
    pub gamma: Vec<Cplx>,
    pub theta_margin: f64,
    pub n_max: u64,
    pub grid: DiskGrid,
    pub epsilon: f64,
    pub placement: Placement,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WitnessParams {
    Single(SingleParams),
    Multi(MultiParams),
}

impl WitnessParams {
    pub fn grid(&self) -> &DiskGrid {
        match self {
            WitnessParams::Single(p) => &p.grid,
            WitnessParams::Multi(p) => &p.grid,
        }
    }

    pub fn theta_margin(&self) -> f64 {
        match self {
            WitnessParams::Single(p) => p.theta_margin,
            WitnessParams::Multi(p) => p.theta_margin,
        }
    }

    pub fn epsilon(&self) -> f64 {
        match self {
            WitnessParams::Single(p) => p.epsilon,
            WitnessParams::Multi(p) => p.epsilon,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub approximating: FitResult,
    pub target: FitResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub route: WitnessRoute,
    /// in the caller's coordinate order
    pub generators: Vec<ExpPoly>,
    pub q: u64,
    pub targets: Vec<TargetResidual>,
    pub theta_table: Vec<ThetaEntry>,
    pub params: WitnessParams,
    /// correction coefficients at `q`
    pub coefficients: Vec<Cplx>,
    pub survivors: Vec<SurvivorCheck>,
    /// `max |f_i - L_i|` on the grid, per generator
    pub approximation: Vec<f64>,
    pub fit: Option<FitSummary>,
    /// `(q, max residual)` for every `q` tried
    pub trace: Vec<(u64, f64)>,
}

impl WitnessReport {
    pub fn max_residual(&self) -> f64 {
        self.targets.iter().map(|t| t.residual).fold(0.0, f64::max)
    }

    pub fn max_bound_sum(&self) -> f64 {
        self.targets.iter().map(|t| t.bound_sum).fold(0.0, f64::max)
    }

    /// Entries that should clear the margin but do not.
    pub fn theta_violations(&self) -> Vec<&ThetaEntry> {
        let margin = self.params.theta_margin();
        self.theta_table.iter().filter(|e| e.case.needs_margin() && e.theta > 1.0 - margin).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| crate::error::Error::Io(e.to_string()))
    }

    pub fn write_theta_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["exponent", "u", "v", "l", "freq_re", "freq_im", "theta", "case", "weight", "n_power", "bound"])?;
        let join = |x: &[u32]| x.iter().map(u32::to_string).collect::<Vec<_>>().join(" ");
        for e in &self.theta_table {
            let u = e.tuple.u.iter().map(|x| join(x)).collect::<Vec<_>>().join("|");
            let case = serde_json::to_value(e.case).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default();
            w.write_record([
                join(&e.exponent),
                u,
                join(&e.tuple.v),
                join(&e.tuple.l),
                format!("{:e}", e.frequency.re),
                format!("{:e}", e.frequency.im),
                format!("{:e}", e.theta),
                case,
                format!("{:e}", e.weight),
                format!("{}", e.n_power),
                format!("{:e}", e.bound),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_trace_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["q", "max_residual"])?;
        for (q, r) in &self.trace {
            w.write_record([q.to_string(), format!("{r:e}")])?;
        }
        w.flush()?;
        Ok(())
    }
}
