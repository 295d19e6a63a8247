//! Partial sums over a supplied (possibly truncated) zero list.

use crate::grid::geometric_grid;
use crate::symbol::Genus;
use crate::Cplx;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroSetSummary {
    pub sum_inv: Cplx,
    pub sum_inv_sq: Cplx,
    pub sum_inv_abs: f64,
    /// 0 when the second half of the list adds under 5% of `sum_inv_abs`
    pub genus_guess: Genus,
    /// number of zeros the sums were taken over
    pub truncation: usize,
    /// `(r, #{n : |z_n| <= r})`
    pub counts: Vec<(f64, usize)>,
}

/// Summary over `zeros[..truncation]`. Zero entries are skipped.
pub fn summarize_zeros(zeros: &[Cplx], truncation: usize) -> ZeroSetSummary {
    let zs: Vec<Cplx> = zeros[..truncation.min(zeros.len())].iter().copied().filter(|z| z.norm() > 0.0).collect();
    let mut sum_inv = Cplx::new(0.0, 0.0);
    let mut sum_inv_sq = Cplx::new(0.0, 0.0);
    let mut sum_inv_abs = 0.0;
    let mut second_half = 0.0;
    let half = zs.len() / 2;
    for (n, z) in zs.iter().enumerate() {
        let inv = z.inv();
        sum_inv += inv;
        sum_inv_sq += inv * inv;
        sum_inv_abs += inv.norm();
        if n >= half {
            second_half += inv.norm();
        }
    }
    let genus_guess = if zs.len() >= 2 && second_half < 0.05 * sum_inv_abs { Genus::Zero } else { Genus::One };
    let counts = match zs.iter().map(|z| z.norm()).fold(None, |m: Option<f64>, r| Some(m.map_or(r, |m| m.max(r)))) {
        Some(rmax) => {
            let rmin = zs.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
            let grid = if rmax > rmin { geometric_grid(rmin, rmax, 16) } else { vec![rmax] };
            grid.into_iter().map(|r| (r, zs.iter().filter(|z| z.norm() <= r * (1.0 + 1e-12)).count())).collect()
        }
        None => Vec::new(),
    };
    ZeroSetSummary { sum_inv, sum_inv_sq, sum_inv_abs, genus_guess, truncation: zs.len(), counts }
}
