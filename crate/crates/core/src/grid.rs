//! Deterministic point sets used as a sup-norm surrogate on closed disks.

use crate::error::{Error, Result};
use crate::Cplx;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiskGrid {
    pub radius: f64,
    /// points per circle
    pub samples: usize,
    pub circles: usize,
}

impl Default for DiskGrid {
    fn default() -> Self {
        DiskGrid { radius: 3.0, samples: 64, circles: 6 }
    }
}

impl DiskGrid {
    pub fn new(radius: f64, samples: usize, circles: usize) -> Result<Self> {
        let g = DiskGrid { radius, samples, circles };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(Error::Invalid(format!("grid radius must be positive, got {}", self.radius)));
        }
        if self.samples < 8 {
            return Err(Error::Invalid(format!("grid needs at least 8 samples per circle, got {}", self.samples)));
        }
        if self.circles < 2 {
            return Err(Error::Invalid(format!("grid needs at least 2 circles, got {}", self.circles)));
        }
        Ok(())
    }

    /// The origin, then `circles` circles at radii `R j / circles`, each with
    /// `samples` equispaced angles starting at angle 0.
    pub fn points(&self) -> Vec<Cplx> {
        let mut pts = Vec::with_capacity(1 + self.samples * self.circles);
        pts.push(Cplx::new(0.0, 0.0));
        for j in 1..=self.circles {
            let r = self.radius * j as f64 / self.circles as f64;
            for k in 0..self.samples {
                pts.push(Cplx::from_polar(r, TAU * k as f64 / self.samples as f64));
            }
        }
        pts
    }
}

/// `n` points from `lo` to `hi`, equally spaced in log scale.
pub fn geometric_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi >= lo && n >= 1);
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    let mut g: Vec<f64> = (0..n).map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp()).collect();
    // pin the endpoints so callers can rely on hitting them exactly
    g[0] = lo;
    g[n - 1] = hi;
    g
}
