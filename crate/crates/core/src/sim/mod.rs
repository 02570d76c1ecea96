//! Exact small-blocklength checks of the binning lemmas, an end-to-end
//! simulation of the two-layer scheme, and the list and block-entropy
//! decoder-quality measures.
//!
//! Sequences are indexed in mixed radix with the first symbol most
//! significant. Random streams are `ChaCha8` keyed by `(seed, stream)`.

mod amplification;
mod binning;
mod pad;
mod scheme;

pub use amplification::{check_amplification, measure_block_entropy, measure_list, AmplificationCheck, BlockJoint, ListMeasure};
pub use binning::{
    codeword_binning_entropy, exact_binning_entropy, BinningExperiment, BinningReport, CodewordBinningExperiment,
    CodewordBinningReport,
};
pub use pad::{one_time_pad, PadIndex};
pub use scheme::{simulate_scheme_open, CodebookSizes, SchemeConfig, SimReport};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Largest number of length-`n` sequences enumerated for one variable.
pub const MAX_SEQUENCES: usize = 10_000_000;

/// Largest number of joint sequence tuples visited by one exact enumeration.
pub const MAX_ENUMERATION: u128 = 100_000_000;

pub(crate) fn rng_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `alphabet^n`, bounded by [`MAX_SEQUENCES`].
pub(crate) fn sequence_count(alphabet: usize, n: usize, what: &str) -> Result<usize> {
    let total = (alphabet as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if total > MAX_SEQUENCES as u128 {
        return Err(Error::Capacity { what: format!("{what} sequences"), needed: total, limit: MAX_SEQUENCES as u128 });
    }
    Ok(total as usize)
}

pub(crate) fn check_enumeration(counts: &[usize], what: &str) -> Result<()> {
    let total = counts.iter().fold(1u128, |acc, &c| acc.saturating_mul(c as u128));
    if total > MAX_ENUMERATION {
        return Err(Error::Capacity { what: what.into(), needed: total, limit: MAX_ENUMERATION });
    }
    Ok(())
}

/// Symbols of sequence `index`, first symbol most significant.
pub(crate) fn digits(mut index: usize, base: usize, out: &mut [usize]) {
    for d in out.iter_mut().rev() {
        *d = index % base;
        index /= base;
    }
}

/// Draw from a pmf given as a slice.
pub(crate) fn sample(p: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let r: f64 = rng.gen();
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &q) in p.iter().enumerate() {
        if q > 0.0 {
            acc += q;
            last = i;
            if r < acc {
                return i;
            }
        }
    }
    last
}

/// Robust typicality: every symbol's empirical frequency is within
/// `eps * p(a)` of `p(a)`; symbols of probability zero must not occur.
pub(crate) fn robust_typical(p: &[f64], eps: f64, symbols: impl Iterator<Item = usize>, counts: &mut [u32]) -> bool {
    counts.iter_mut().for_each(|c| *c = 0);
    let mut n = 0u32;
    for s in symbols {
        counts[s] += 1;
        n += 1;
    }
    let n = f64::from(n);
    p.iter().zip(counts.iter()).all(|(&q, &c)| {
        let pi = f64::from(c) / n;
        if q == 0.0 {
            c == 0
        } else {
            (pi - q).abs() <= eps * q
        }
    })
}
