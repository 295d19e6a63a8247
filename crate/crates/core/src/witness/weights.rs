//! Exponent sets and the injective weighting that singles out the target exponent.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Nonempty finite set of exponent tuples of a common length, without the zero tuple.
/// Stored sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<u32>>", into = "Vec<Vec<u32>>")]
pub struct ExponentSet {
    elems: Vec<Vec<u32>>,
}

impl ExponentSet {
    pub fn new(mut elems: Vec<Vec<u32>>) -> Result<Self> {
        let Some(n) = elems.first().map(Vec::len) else {
            return Err(Error::Invalid("exponent set is empty".into()));
        };
        if n == 0 || elems.iter().any(|a| a.len() != n) {
            return Err(Error::Invalid("exponent tuples must share a positive length".into()));
        }
        if elems.iter().any(|a| a.iter().all(|&x| x == 0)) {
            return Err(Error::Invalid("exponent set contains the zero tuple".into()));
        }
        elems.sort();
        elems.dedup();
        Ok(ExponentSet { elems })
    }

    pub fn elems(&self) -> &[Vec<u32>] {
        &self.elems
    }

    pub fn dim(&self) -> usize {
        self.elems[0].len()
    }

    /// largest coordinate
    pub fn m(&self) -> u32 {
        self.elems.iter().flatten().copied().max().unwrap_or(0)
    }

    /// largest total degree
    pub fn d_a(&self) -> u32 {
        self.elems.iter().map(|a| a.iter().sum()).max().unwrap_or(0)
    }
}

impl TryFrom<Vec<Vec<u32>>> for ExponentSet {
    type Error = Error;
    fn try_from(v: Vec<Vec<u32>>) -> Result<Self> {
        ExponentSet::new(v)
    }
}

impl From<ExponentSet> for Vec<Vec<u32>> {
    fn from(s: ExponentSet) -> Self {
        s.elems
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightChoice {
    /// weights by original coordinate
    pub k: Vec<f64>,
    /// selected exponent, original coordinates
    pub beta: Vec<u32>,
    /// `permutation[t]` is the original coordinate placed at position `t`
    pub permutation: Vec<usize>,
    /// weighted sum of each element of the set, in set order
    pub values: Vec<f64>,
    /// `sum_{t >= 2} k_t (beta_t - alpha_t)` for every other alpha with a full first coordinate
    pub tail_margins: Vec<(Vec<u32>, f64)>,
}

impl WeightChoice {
    /// `x` reordered to the working coordinates.
    pub fn permute<T: Clone>(&self, x: &[T]) -> Vec<T> {
        self.permutation.iter().map(|&i| x[i].clone()).collect()
    }

    /// Working coordinates back to the original order.
    pub fn unpermute<T: Clone + Default>(&self, x: &[T]) -> Vec<T> {
        let mut out = vec![T::default(); x.len()];
        for (t, &i) in self.permutation.iter().enumerate() {
            out[i] = x[t].clone();
        }
        out
    }

    /// Weights in the working coordinates.
    pub fn k_permuted(&self) -> Vec<f64> {
        self.permute(&self.k)
    }
}

/// Base-`(d+1)` positional weights after moving a coordinate that reaches the maximum
/// to the front; picks the weighted minimum among exponents with a maximal first
/// coordinate and checks injectivity and the tail inequality explicitly.
pub fn select_weights(a: &ExponentSet) -> Result<WeightChoice> {
    let n = a.dim();
    let m = a.m();
    let base = (m + 1) as f64;
    let lead = (0..n).find(|&i| a.elems().iter().any(|x| x[i] == m)).expect("some coordinate attains the maximum");
    let mut permutation = vec![lead];
    permutation.extend((0..n).filter(|&i| i != lead));
    let mut k = vec![0.0; n];
    for (t, &i) in permutation.iter().enumerate() {
        k[i] = base.powi(t as i32);
    }
    let value = |x: &[u32]| x.iter().zip(&k).map(|(&xi, ki)| xi as f64 * ki).sum::<f64>();
    let values: Vec<f64> = a.elems().iter().map(|x| value(x)).collect();
    for i in 0..values.len() {
        for j in 0..i {
            if values[i] == values[j] {
                return Err(Error::SearchFailure(format!("weights not injective on {:?}, {:?}", a.elems()[i], a.elems()[j])));
            }
        }
    }
    let full: Vec<&Vec<u32>> = a.elems().iter().filter(|x| x[lead] == m).collect();
    let beta = full
        .iter()
        .min_by(|x, y| value(x).total_cmp(&value(y)))
        .map(|x| (*x).clone())
        .expect("lead coordinate attains m");
    let tail = |x: &[u32]| -> f64 {
        permutation[1..].iter().map(|&i| k[i] * (beta[i] as f64 - x[i] as f64)).sum()
    };
    let mut tail_margins = Vec::new();
    for x in full {
        if *x == beta {
            continue;
        }
        let t = tail(x);
        if !(t < 0.0) {
            return Err(Error::SearchFailure(format!("tail inequality fails for {x:?}: {t}")));
        }
        tail_margins.push((x.clone(), t));
    }
    Ok(WeightChoice { k, beta, permutation, values, tail_margins })
}
