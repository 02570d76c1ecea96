use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_enumeration, digits, rng_stream, robust_typical, sample, sequence_count};
use crate::error::{usage, Error, Result};
use crate::prob::{entropy_bits, kahan_sum, mutual_information, plogp, JointPmf};

/// Exhaustive check of random binning of i.i.d. sequences. `source` has two
/// axes: the binned variable first, its observer second.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BinningExperiment {
    pub n: usize,
    pub r_k: f64,
    pub seed: u64,
    pub source: JointPmf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinningReport {
    pub n: usize,
    pub r_k: f64,
    pub bins: u64,
    /// `log2(bins) / n`.
    pub realized_key_rate: f64,
    /// Exact `H(Y^n | W^n, K)` in bits.
    pub entropy: f64,
    /// Exact `H(Y^n | W^n) = n H(Y|W)`.
    pub entropy_without_key: f64,
    /// `n (H(Y|W) - R_K)`.
    pub bound: f64,
    /// `(entropy - bound) / n`; the per-symbol slack the bound needs.
    pub slack: f64,
    /// `entropy >= n H(Y|W) - log2(bins)` up to 1e-9.
    pub lower_bound_ok: bool,
}

/// Number of bins for rate `r` at blocklength `n`, at least one.
fn bin_count(n: usize, r: f64) -> Result<u64> {
    if !(r >= 0.0) || !r.is_finite() {
        return usage(format!("key rate {r} must be finite and nonnegative"));
    }
    let m = (n as f64 * r).exp2().round();
    if m > 1e15 {
        return usage(format!("key rate {r} gives too many bins"));
    }
    Ok((m as u64).max(1))
}

/// Coupled bin map: item `i` gets a uniform `u_i` and bin `floor(u_i M)`, so
/// the same seed yields nested-in-spirit maps across bin counts.
fn bin_map(items: usize, bins: u64, seed: u64, stream: u64) -> Vec<u64> {
    let mut rng = rng_stream(seed, stream);
    (0..items)
        .map(|_| {
            let u: f64 = rng.gen();
            ((u * bins as f64) as u64).min(bins - 1)
        })
        .collect()
}

fn check_blocklength(n: usize) -> Result<()> {
    if !(1..=12).contains(&n) {
        return usage(format!("blocklength {n} outside [1, 12]"));
    }
    Ok(())
}

/// Exact `H(Y^n | W^n, K)` for one sampled bin map over all `|Y|^n`
/// sequences, with `round(2^{n R_K})` bins.
pub fn exact_binning_entropy(exp: &BinningExperiment) -> Result<BinningReport> {
    check_blocklength(exp.n)?;
    let n = exp.n;
    if exp.source.axes().len() != 2 {
        return usage("binning source must have exactly two axes");
    }
    let sizes = exp.source.sizes();
    let (ny, nw) = (sizes[0], sizes[1]);
    let count_y = sequence_count(ny, n, "binned")?;
    let count_w = sequence_count(nw, n, "observer")?;
    check_enumeration(&[count_y, count_w], "binning enumeration")?;
    let bins = bin_count(n, exp.r_k)?;
    if bins as usize > count_y {
        return usage(format!("{bins} bins exceed the {count_y} binned sequences"));
    }
    let map = bin_map(count_y, bins, exp.seed, 0);
    let p = exp.source.probs();

    // Per observer sequence: H(Y^n, w^n) part, H(W^n) part, H(W^n, K) part.
    let parts: Vec<[f64; 3]> = (0..count_w)
        .into_par_iter()
        .map(|w| {
            let mut wd = vec![0; n];
            digits(w, nw, &mut wd);
            let mut py = vec![1.0];
            for &wi in &wd {
                let mut next = Vec::with_capacity(py.len() * ny);
                for &q in &py {
                    next.extend((0..ny).map(|y| q * p[y * nw + wi]));
                }
                py = next;
            }
            let mut mass = vec![0.0; bins as usize];
            for (y, &q) in py.iter().enumerate() {
                mass[map[y] as usize] += q;
            }
            [entropy_bits(&py), plogp(kahan_sum(py.iter().copied())), entropy_bits(&mass)]
        })
        .collect();
    let h_yw = kahan_sum(parts.iter().map(|t| t[0]));
    let h_w = kahan_sum(parts.iter().map(|t| t[1]));
    let h_wk = kahan_sum(parts.iter().map(|t| t[2]));
    let entropy = (h_yw - h_wk).max(0.0);
    let entropy_without_key = (h_yw - h_w).max(0.0);
    let bound = entropy_without_key - n as f64 * exp.r_k;
    Ok(BinningReport {
        n,
        r_k: exp.r_k,
        bins,
        realized_key_rate: (bins as f64).log2() / n as f64,
        entropy,
        entropy_without_key,
        bound,
        slack: (entropy - bound) / n as f64,
        lower_bound_ok: entropy >= entropy_without_key - (bins as f64).log2() - 1e-9,
    })
}

fn default_epsilon() -> f64 {
    0.15
}

/// Exhaustive check of random binning of codewords. `source` is the joint
/// `p(u, w~)` with the codeword variable first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodewordBinningExperiment {
    pub n: usize,
    pub r_tilde: f64,
    pub r_k: f64,
    pub seed: u64,
    pub source: JointPmf,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodewordBinningReport {
    pub n: usize,
    pub codewords: u64,
    pub bins: u64,
    /// Exact `H(L | K, W~^n)` in bits for the sampled codebook and bin map.
    pub entropy: f64,
    /// Exact `H(L | W~^n)`.
    pub entropy_without_key: f64,
    /// `n (R~ - R_K - I(U; W~))`.
    pub bound: f64,
    /// `(entropy - bound) / n`.
    pub slack: f64,
    /// Probability that the selected codeword is jointly typical with `W~^n`.
    pub typical_mass: f64,
    /// `entropy <= log2(codewords)`.
    pub cardinality_ok: bool,
}

/// Exact `H(L | K, W~^n)` where `W~^n` is i.i.d. from the observer marginal
/// and `L` is uniform over the codewords jointly typical with it (uniform
/// over all codewords when none is).
pub fn codeword_binning_entropy(exp: &CodewordBinningExperiment) -> Result<CodewordBinningReport> {
    check_blocklength(exp.n)?;
    let n = exp.n;
    if exp.source.axes().len() != 2 {
        return usage("codeword binning source must have exactly two axes");
    }
    if !(exp.epsilon > 0.0) {
        return usage("typicality epsilon must be positive");
    }
    if !(exp.r_tilde >= 0.0) || !exp.r_tilde.is_finite() {
        return usage(format!("codebook rate {} must be finite and nonnegative", exp.r_tilde));
    }
    let names: Vec<&str> = exp.source.axes().iter().map(|a| a.name.as_str()).collect();
    let info = mutual_information(&exp.source, &[names[0]], &[names[1]], &[])?.max(0.0);
    let excess = exp.r_tilde - exp.r_k - info;
    if excess <= 0.0 {
        return Err(Error::Precondition(format!(
            "R~ - R_K - I(U;W~) = {excess:.6} must be positive"
        )));
    }
    let sizes = exp.source.sizes();
    let (nu, nw) = (sizes[0], sizes[1]);
    let count_w = sequence_count(nw, n, "observer")?;
    let codewords = ((n as f64 * exp.r_tilde).exp2() - 1e-9).ceil().max(1.0) as u64;
    let bins = bin_count(n, exp.r_k)?;
    check_enumeration(&[count_w, codewords as usize, n], "codeword enumeration")?;

    let joint = exp.source.probs();
    let p_u: Vec<f64> = (0..nu).map(|u| kahan_sum((0..nw).map(|w| joint[u * nw + w]))).collect();
    let p_w: Vec<f64> = (0..nw).map(|w| kahan_sum((0..nu).map(|u| joint[u * nw + w]))).collect();
    let mut rng = rng_stream(exp.seed, 0);
    let book: Vec<Vec<usize>> = (0..codewords).map(|_| (0..n).map(|_| sample(&p_u, &mut rng)).collect()).collect();
    let map = bin_map(codewords as usize, bins, exp.seed, 1);

    // Per observer sequence: p(w^n), H(L|w^n), H(K|w^n), typical flag.
    let parts: Vec<[f64; 4]> = (0..count_w)
        .into_par_iter()
        .map(|w| {
            let mut wd = vec![0; n];
            digits(w, nw, &mut wd);
            let pw: f64 = wd.iter().map(|&s| p_w[s]).product();
            if pw == 0.0 {
                return [0.0; 4];
            }
            let mut counts = vec![0u32; nu * nw];
            let typical: Vec<usize> = (0..book.len())
                .filter(|&l| robust_typical(joint, exp.epsilon, book[l].iter().zip(&wd).map(|(&u, &s)| u * nw + s), &mut counts))
                .collect();
            let (chosen, hit) = if typical.is_empty() { ((0..book.len()).collect(), 0.0) } else { (typical, 1.0) };
            let mut mass = vec![0.0; bins as usize];
            let each = 1.0 / chosen.len() as f64;
            for &l in &chosen {
                mass[map[l] as usize] += each;
            }
            [pw, (chosen.len() as f64).log2(), entropy_bits(&mass), hit]
        })
        .collect();
    let entropy_without_key = kahan_sum(parts.iter().map(|t| t[0] * t[1]));
    let h_k = kahan_sum(parts.iter().map(|t| t[0] * t[2]));
    let entropy = (entropy_without_key - h_k).max(0.0);
    let bound = n as f64 * excess;
    Ok(CodewordBinningReport {
        n,
        codewords,
        bins,
        entropy,
        entropy_without_key,
        bound,
        slack: (entropy - bound) / n as f64,
        typical_mass: kahan_sum(parts.iter().map(|t| t[0] * t[3])),
        cardinality_ok: entropy <= (codewords as f64).log2() + 1e-9,
    })
}
