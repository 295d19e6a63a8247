//! Multi-index bookkeeping for the multinomial expansions of `f^n`.

use crate::error::{Error, Result};
use crate::symbol::SymbolSpec;
use crate::Cplx;
use serde::{Deserialize, Serialize};

/// Largest total degree accepted by the multinomial helpers.
pub const MAX_TOTAL_DEGREE: u32 = 64;

/// One term of a multinomial expansion. `u[i]` counts the powers taken from the
/// approximating part of generator `i`, `v` the powers taken from the correction
/// terms and `l[i]` the powers of the constant attached to generator `i + 2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeTuple {
    pub u: Vec<Vec<u32>>,
    pub v: Vec<u32>,
    pub l: Vec<u32>,
}

impl LatticeTuple {
    pub fn u_total(&self) -> u32 {
        self.u.iter().flatten().sum()
    }

    pub fn v_total(&self) -> u32 {
        self.v.iter().sum()
    }

    /// `v = m e_j` for some `j`; returns `j`.
    pub fn survivor_index(&self, m: u32) -> Option<usize> {
        if self.u_total() != 0 {
            return None;
        }
        let mut nz = self.v.iter().enumerate().filter(|(_, &x)| x != 0);
        match (nz.next(), nz.next()) {
            (Some((j, &x)), None) if x == m => Some(j),
            _ => None,
        }
    }
}

/// All vectors of `parts` non-negative integers summing to `total`, first coordinate
/// descending.
pub fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    fn rec(rem: u32, parts: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if parts == 1 {
            cur.push(rem);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for x in (0..=rem).rev() {
            cur.push(x);
            rec(rem - x, parts - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if parts == 0 {
        if total == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(total, parts, &mut Vec::with_capacity(parts), &mut out);
    out
}

/// Tuples `(u, v)` of a single-generator expansion, grouped by level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    /// level `m` with the survivors removed
    pub top: Vec<LatticeTuple>,
    /// levels `1..m-1`, `lower[n-1]` is level `n`
    pub lower: Vec<Vec<LatticeTuple>>,
    pub survivors: Vec<LatticeTuple>,
}

/// Level `n`: `u` of length `pa`, `v` of length `pb`, `|u| + |v| = n`.
pub fn level(pa: usize, pb: usize, n: u32) -> Vec<LatticeTuple> {
    compositions(n, pa + pb)
        .into_iter()
        .map(|x| LatticeTuple { u: vec![x[..pa].to_vec()], v: x[pa..].to_vec(), l: Vec::new() })
        .collect()
}

/// Levels `1..=m` with `pa` approximating terms and `pb` correction terms.
pub fn enumerate_levels(pa: usize, pb: usize, m: u32) -> Result<Lattice> {
    if pa == 0 || pb == 0 || m < 2 {
        return Err(Error::Invalid(format!("lattice needs pa, pb >= 1 and m >= 2, got ({pa}, {pb}, {m})")));
    }
    let (survivors, top): (Vec<_>, Vec<_>) = level(pa, pb, m).into_iter().partition(|t| t.survivor_index(m).is_some());
    let lower = (1..m).map(|n| level(pa, pb, n)).collect();
    Ok(Lattice { top, lower, survivors })
}

/// Levels for `p` terms on both sides.
pub fn enumerate_lattice(p: usize, m: u32) -> Result<Lattice> {
    enumerate_levels(p, p, m)
}

/// Index set of `f^alpha` for the multi-generator expansion. Generator 1 has
/// `sizes[0]` approximating terms plus `p` corrections, generator `i >= 2` has
/// `sizes[i]` approximating terms plus one constant.
pub fn index_set(alpha: &[u32], sizes: &[usize], p: usize) -> Vec<LatticeTuple> {
    assert_eq!(alpha.len(), sizes.len());
    let first: Vec<(Vec<u32>, Vec<u32>)> =
        compositions(alpha[0], sizes[0] + p).into_iter().map(|x| (x[..sizes[0]].to_vec(), x[sizes[0]..].to_vec())).collect();
    let mut acc: Vec<LatticeTuple> =
        first.into_iter().map(|(u1, v)| LatticeTuple { u: vec![u1], v, l: Vec::new() }).collect();
    for (i, &a) in alpha.iter().enumerate().skip(1) {
        let opts = compositions(a, sizes[i] + 1);
        let mut next = Vec::with_capacity(acc.len() * opts.len());
        for t in &acc {
            for x in &opts {
                let mut t2 = t.clone();
                t2.u.push(x[..sizes[i]].to_vec());
                t2.l.push(x[sizes[i]]);
                next.push(t2);
            }
        }
        acc = next;
    }
    acc
}

/// `(sum k)! / prod k!`, built as a product of binomials.
pub fn multinomial(parts: &[u32]) -> Result<f64> {
    let total: u32 = parts.iter().sum();
    if total > MAX_TOTAL_DEGREE {
        return Err(Error::Invalid(format!("total degree {total} exceeds {MAX_TOTAL_DEGREE}")));
    }
    let mut acc = 1.0;
    let mut run = 0u32;
    for &k in parts {
        for j in 1..=k {
            acc = acc * (run + j) as f64 / j as f64;
        }
        run += k;
    }
    Ok(acc.round())
}

/// `(|u|+|v|)! prod a_i^{u_i} / (u_i! v_i!)`.
pub fn multinomial_gamma(u: &[u32], v: &[u32], a: &[Cplx]) -> Result<Cplx> {
    if a.len() != u.len() {
        return Err(Error::Invalid(format!("{} coefficients for {} exponents", a.len(), u.len())));
    }
    let mut parts = u.to_vec();
    parts.extend_from_slice(v);
    let mut g = Cplx::new(multinomial(&parts)?, 0.0);
    for (ai, &ui) in a.iter().zip(u) {
        g *= ai.powu(ui);
    }
    Ok(g)
}

/// Which part of the decay argument covers a tuple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TupleCase {
    /// at least one approximating factor; the frequency sits where `|phi| < 1`
    InsideDisk,
    /// correction terms only, a proper convex combination of the target frequencies
    ConvexTarget,
    /// correction terms only, fewer than `m` of them; the origin joins the combination
    ConvexOrigin,
    /// ratio exactly 1, decays through a negative power of `n`
    PolynomialDecay,
    /// reproduces a target coefficient
    Survivor,
}

impl TupleCase {
    /// Whether the ratio must clear the margin below 1.
    pub fn needs_margin(self) -> bool {
        !matches!(self, TupleCase::Survivor | TupleCase::PolynomialDecay)
    }
}

/// Case of a tuple from its counts alone. `is_target` marks the exponent whose
/// survivors should reproduce the target.
pub fn classify_tuple(t: &LatticeTuple, m: u32, is_target: bool) -> TupleCase {
    let (nu, nv) = (t.u_total(), t.v_total());
    if nu >= 1 {
        TupleCase::InsideDisk
    } else if nv == 0 {
        TupleCase::PolynomialDecay
    } else if t.survivor_index(m).is_some() {
        if is_target {
            TupleCase::Survivor
        } else {
            TupleCase::PolynomialDecay
        }
    } else if nv == m {
        TupleCase::ConvexTarget
    } else {
        TupleCase::ConvexOrigin
    }
}

/// `|phi(mu)| / prod |phi_j|^{v_j/m}` from moduli, in log space.
pub fn theta_from_moduli(phi_mu: f64, v: &[u32], denom: &[f64], m: u32) -> f64 {
    if phi_mu == 0.0 {
        return 0.0;
    }
    let mut ln = phi_mu.ln();
    for (&vj, &dj) in v.iter().zip(denom) {
        ln -= vj as f64 / m as f64 * dj.ln();
    }
    ln.exp()
}

/// Ratio and case of a single-generator tuple. `lambda` are the correction
/// frequencies, `alpha_freqs` the approximating ones.
pub fn theta_ratio(
    phi: &SymbolSpec,
    u: &[u32],
    v: &[u32],
    lambda: &[Cplx],
    alpha_freqs: &[Cplx],
    m: u32,
) -> Result<(f64, TupleCase)> {
    if u.len() != alpha_freqs.len() || v.len() != lambda.len() {
        return Err(Error::Invalid("tuple and frequency lengths differ".into()));
    }
    let t = LatticeTuple { u: vec![u.to_vec()], v: v.to_vec(), l: Vec::new() };
    let case = classify_tuple(&t, m, true);
    if case == TupleCase::Survivor {
        return Ok((1.0, case));
    }
    let mu = frequency(u, alpha_freqs) + frequency(v, lambda);
    let denom: Vec<f64> = lambda.iter().map(|&l| phi.eval(l * m as f64).map(|x| x.norm())).collect::<Result<_>>()?;
    Ok((theta_from_moduli(phi.eval(mu)?.norm(), v, &denom, m), case))
}

/// `sum_i k_i x_i`.
pub fn frequency(k: &[u32], x: &[Cplx]) -> Cplx {
    k.iter().zip(x).map(|(&k, &x)| x * k as f64).sum()
}
