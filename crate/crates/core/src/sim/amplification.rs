use serde::{Deserialize, Serialize};

use crate::error::{usage, Result};
use crate::prob::{kahan_sum, plogp, KahanSum};

/// Exact joint of `X^n` and a discrete decoder observation. Each row is one
/// observation value and holds sparse `(x^n index, p(x^n, info))` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockJoint {
    n: usize,
    x_alphabet: usize,
    rows: Vec<Vec<(usize, f64)>>,
}

impl BlockJoint {
    pub fn new(n: usize, x_alphabet: usize, rows: Vec<Vec<(usize, f64)>>) -> Result<Self> {
        if n == 0 || x_alphabet == 0 {
            return usage("block joint needs n >= 1 and a nonempty alphabet");
        }
        let count = (x_alphabet as f64).powi(n as i32);
        let mut total = KahanSum::default();
        for &(x, p) in rows.iter().flatten() {
            if x as f64 >= count || !(p >= 0.0) || !p.is_finite() {
                return usage(format!("bad block joint entry ({x}, {p})"));
            }
            total.add(p);
        }
        if (total.value() - 1.0).abs() > 1e-9 {
            return usage(format!("block joint sums to {}", total.value()));
        }
        Ok(Self { n, x_alphabet, rows })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[Vec<(usize, f64)>] {
        &self.rows
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ListMeasure {
    /// `(1/n) log2` of the largest list.
    pub exponent: f64,
    /// `P(X^n in list(info))`.
    pub coverage: f64,
    pub max_list_size: usize,
    pub epsilon: f64,
}

/// Exact `(1/n) H(X^n | info)` in bits per symbol.
pub fn measure_block_entropy(joint: &BlockJoint) -> f64 {
    let h = kahan_sum(joint.rows.iter().map(|row| {
        let mass = kahan_sum(row.iter().map(|e| e.1));
        kahan_sum(row.iter().map(|e| plogp(e.1))) - plogp(mass)
    }));
    h.max(0.0) / joint.n as f64
}

/// Lists `{x^n : -(1/n) log2 p(x^n | info) <= (1/n) H(X^n | info) + eps}`.
pub fn measure_list(joint: &BlockJoint, eps: f64) -> ListMeasure {
    let n = joint.n as f64;
    let threshold = n * (measure_block_entropy(joint) + eps);
    let mut coverage = KahanSum::default();
    let mut max_list_size = 0;
    for row in &joint.rows {
        let mass = kahan_sum(row.iter().map(|e| e.1));
        if mass <= 0.0 {
            continue;
        }
        let mut size = 0;
        for &(_, p) in row {
            if p > 0.0 && -(p / mass).log2() <= threshold {
                size += 1;
                coverage.add(p);
            }
        }
        max_list_size = max_list_size.max(size);
    }
    ListMeasure {
        exponent: (max_list_size.max(1) as f64).log2() / n,
        coverage: coverage.value().clamp(0.0, 1.0),
        max_list_size,
        epsilon: eps,
    }
}

/// Block entropy against the list bound
/// `exponent + (2 + n * failure * log2|X|) / n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmplificationCheck {
    pub block_entropy_rate: f64,
    pub list: ListMeasure,
    pub failure_mass: f64,
    pub bound: f64,
    pub holds: bool,
}

pub fn check_amplification(joint: &BlockJoint, eps: f64) -> AmplificationCheck {
    let block_entropy_rate = measure_block_entropy(joint);
    let list = measure_list(joint, eps);
    let failure_mass = 1.0 - list.coverage;
    let n = joint.n as f64;
    let bound = list.exponent + (2.0 + n * failure_mass * (joint.x_alphabet as f64).log2()) / n;
    AmplificationCheck { block_entropy_rate, list, failure_mass, bound, holds: block_entropy_rate <= bound + 1e-12 }
}
