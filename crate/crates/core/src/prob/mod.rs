//! Finite-alphabet pmfs and exact information measures (bits).
//!
//! Every quantity is computed from dense tables with `0 log 0 = 0`.
//! Conditional entropies use `H(A|B) = H(A,B) - H(B)` and mutual informations
//! `I(A;B|C) = H(A|C) - H(A|B,C)`.

mod alphabet;
mod conditional;
mod joint;

pub use alphabet::{Alphabet, Axis};
pub use conditional::ConditionalPmf;
pub use joint::{JointPmf, MAX_CELLS};



use serde::{Deserialize, Serialize};

use crate::error::{usage, Result};

/// Label appended to an alphabet to mark an erasure.
pub const ERASURE_LABEL: &str = "e";

/// Compensated (Neumaier) summation.
#[derive(Debug, Default, Clone, Copy)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

pub fn kahan_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut k = KahanSum::default();
    values.into_iter().for_each(|v| k.add(v));
    k.value()
}

/// `-p log2 p` with the `0 log 0 = 0` convention.
#[inline]
pub fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.log2()
    } else {
        0.0
    }
}

/// Shannon entropy in bits of an (unnormalized-safe) probability vector.
pub fn entropy_bits(probs: &[f64]) -> f64 {
    kahan_sum(probs.iter().map(|&p| plogp(p)))
}

/// Binary entropy function in bits.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return usage(format!("binary entropy argument {p} outside [0,1]"));
    }
    Ok(h2(p))
}

/// Binary entropy without range checking; callers guarantee `p` in [0,1].
#[inline]
pub(crate) fn h2(p: f64) -> f64 {
    plogp(p) + plogp(1.0 - p)
}

fn union_indices(pmf: &JointPmf, a: &[&str], b: &[&str]) -> Result<Vec<usize>> {
    let mut idx = pmf.indices_of(a)?;
    for i in pmf.indices_of(b)? {
        if !idx.contains(&i) {
            idx.push(i);
        }
    }
    Ok(idx)
}

/// H(over | given) in bits.
pub fn entropy(pmf: &JointPmf, over: &[&str], given: &[&str]) -> Result<f64> {
    let joint = union_indices(pmf, over, given)?;
    let cond = pmf.indices_of(given)?;
    Ok(pmf.entropy_of_indices(&joint) - pmf.entropy_of_indices(&cond))
}

/// I(a ; b | given) in bits. The three variable sets must be disjoint.
pub fn mutual_information(pmf: &JointPmf, a: &[&str], b: &[&str], given: &[&str]) -> Result<f64> {
    let ai = pmf.indices_of(a)?;
    let bi = pmf.indices_of(b)?;
    let gi = pmf.indices_of(given)?;
    let overlap = ai.iter().any(|i| bi.contains(i) || gi.contains(i)) || bi.iter().any(|i| gi.contains(i));
    if overlap {
        return usage("mutual information variable sets overlap");
    }
    let cat = |x: &[usize], y: &[usize]| -> Vec<usize> { x.iter().chain(y).copied().collect() };
    let h_ag = pmf.entropy_of_indices(&cat(&ai, &gi));
    let h_g = pmf.entropy_of_indices(&gi);
    let bg = cat(&bi, &gi);
    let h_abg = pmf.entropy_of_indices(&cat(&ai, &bg));
    let h_bg = pmf.entropy_of_indices(&bg);
    Ok((h_ag - h_g) - (h_abg - h_bg))
}

/// Outcome of a Markov-chain test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarkovCheck {
    pub holds: bool,
    /// Largest total-variation distance between p(next | all earlier) and
    /// p(next | previous) over conditioning slices with positive mass.
    pub max_violation: f64,
}

/// Tests the chain `G1 - G2 - ... - Gk` where each link is a group of
/// variables. Each group must be independent of all earlier groups given its
/// immediate predecessor.
pub fn check_markov(pmf: &JointPmf, chain: &[&[&str]], tol: f64) -> Result<MarkovCheck> {
    if chain.len() < 3 {
        return usage("a Markov chain needs at least three links");
    }
    let groups: Vec<Vec<usize>> = chain.iter().map(|g| pmf.indices_of(g)).collect::<Result<_>>()?;
    if groups.iter().any(Vec::is_empty) {
        return usage("empty Markov chain link");
    }
    for (i, g) in groups.iter().enumerate() {
        if groups[..i].iter().any(|h| h.iter().any(|x| g.contains(x))) {
            return usage("Markov chain links overlap");
        }
    }
    let sizes = pmf.sizes();
    let card = |g: &[usize]| -> usize { g.iter().map(|&i| sizes[i]).product() };
    let mut worst: f64 = 0.0;
    for j in 2..groups.len() {
        let past: Vec<usize> = groups[..j - 1].iter().flatten().copied().collect();
        let prev = &groups[j - 1];
        let cur = &groups[j];
        let (na, nb, nc) = (card(&past), card(prev), card(cur));
        let keep: Vec<usize> = past.iter().chain(prev).chain(cur).copied().collect();
        let t = pmf.marginal_table(&keep);
        let mut pbc = vec![0.0; nb * nc];
        for a in 0..na {
            for b in 0..nb {
                for c in 0..nc {
                    pbc[b * nc + c] += t[(a * nb + b) * nc + c];
                }
            }
        }
        for b in 0..nb {
            let pb: f64 = pbc[b * nc..(b + 1) * nc].iter().sum();
            if pb <= 0.0 {
                continue;
            }
            for a in 0..na {
                let row = &t[(a * nb + b) * nc..(a * nb + b + 1) * nc];
                let pab: f64 = row.iter().sum();
                if pab <= 0.0 {
                    continue;
                }
                let tv: f64 = row
                    .iter()
                    .zip(&pbc[b * nc..(b + 1) * nc])
                    .map(|(&x, &y)| (x / pab - y / pb).abs())
                    .sum::<f64>()
                    / 2.0;
                worst = worst.max(tv);
            }
        }
    }
    Ok(MarkovCheck {
        holds: worst <= tol,
        max_violation: worst,
    })
}

/// Appends `name`, an erased copy of `of`: equal to it with probability
/// `1 - p_e` and to the erasure symbol otherwise.
pub fn add_erasure(pmf: &JointPmf, of: &str, name: &str, p_e: f64) -> Result<JointPmf> {
    if !(0.0..=1.0).contains(&p_e) {
        return usage(format!("erasure probability {p_e} outside [0,1]"));
    }
    let src = pmf.axis(of)?.clone();
    if src.alphabet.index_of(ERASURE_LABEL).is_some() {
        return usage(format!("alphabet of {of:?} already contains the erasure label"));
    }
    let k = src.size();
    let labels = src
        .alphabet
        .labels()
        .iter()
        .cloned()
        .chain([ERASURE_LABEL.to_string()]);
    let out = Axis::new(name, Alphabet::with_labels(labels)?);
    let ch = ConditionalPmf::from_fn(vec![src], vec![out], |g, o| {
        if o[0] == k {
            p_e
        } else if o[0] == g[0] {
            1.0 - p_e
        } else {
            0.0
        }
    })?;
    pmf.extend(&ch)
}

/// Joint of a source `X` (the single axis of `p_source`) and `Y`, an erased
/// version of `X` with erasure probability `p_e`.
pub fn make_erasure_source(p_source: &JointPmf, p_e: f64) -> Result<JointPmf> {
    if p_source.axes().len() != 1 {
        return usage("erasure source expects a pmf over a single variable");
    }
    let x = p_source.axes()[0].name.clone();
    let y = if x == "Y" { "Y'" } else { "Y" };
    add_erasure(p_source, &x, y, p_e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn bsc_pair(p: f64) -> JointPmf {
        let x = JointPmf::bernoulli("X", 0.5).unwrap();
        let ch = ConditionalPmf::from_fn(
            vec![Axis::new("X", Alphabet::binary())],
            vec![Axis::new("Y", Alphabet::binary())],
            |g, o| if g[0] == o[0] { 1.0 - p } else { p },
        )
        .unwrap();
        x.extend(&ch).unwrap()
    }

    #[test]
    fn uniform_bit_has_one_bit() {
        let x = JointPmf::bernoulli("X", 0.5).unwrap();
        assert_abs_diff_eq!(entropy(&x, &["X"], &[]).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn deterministic_copy_has_zero_conditional_entropy() {
        let j = bsc_pair(0.0);
        assert_abs_diff_eq!(entropy(&j, &["X"], &["Y"]).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(mutual_information(&j, &["X"], &["Y"], &[]).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn erased_bit_conditional_entropy() {
        // Oracle: explicit sum over the 2x3 table {0.1, 0, 0.4; 0, 0.1, 0.4}.
        let j = make_erasure_source(&JointPmf::bernoulli("X", 0.5).unwrap(), 0.8).unwrap();
        let h_xy = -(2.0 * 0.1 * 0.1f64.log2() + 2.0 * 0.4 * 0.4f64.log2());
        let h_y = -(2.0 * 0.1 * 0.1f64.log2() + 0.8 * 0.8f64.log2());
        let h = entropy(&j, &["X"], &["Y"]).unwrap();
        assert_abs_diff_eq!(h, h_xy - h_y, epsilon = 1e-12);
        assert_abs_diff_eq!(h, 0.8, epsilon = 1e-12);
    }

    #[test]
    fn erasure_marginals() {
        let j = make_erasure_source(&JointPmf::bernoulli("X", 0.5).unwrap(), 0.8).unwrap();
        let y = j.marginal(&["Y"]).unwrap();
        assert_abs_diff_eq!(y.probs()[0], 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(y.probs()[1], 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(y.probs()[2], 0.8, epsilon = 1e-15);
        let none = make_erasure_source(&JointPmf::bernoulli("X", 0.3).unwrap(), 0.0).unwrap();
        assert_abs_diff_eq!(entropy(&none, &["X"], &["Y"]).unwrap(), 0.0, epsilon = 1e-15);
        let all = make_erasure_source(&JointPmf::bernoulli("X", 0.3).unwrap(), 1.0).unwrap();
        assert_abs_diff_eq!(mutual_information(&all, &["X"], &["Y"], &[]).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(all.marginal(&["X"]).unwrap().probs()[1], 0.3, epsilon = 1e-15);
    }

    #[test]
    fn binary_entropy_values() {
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_abs_diff_eq!(binary_entropy(0.4).unwrap(), 0.970_950_594_454_668_5, epsilon = 1e-12);
        assert!(binary_entropy(1.1).is_err());
        assert!(binary_entropy(-0.1).is_err());
    }

    #[test]
    fn unknown_and_overlapping_variables() {
        let j = bsc_pair(0.1);
        assert!(entropy(&j, &["Q"], &[]).is_err());
        assert!(mutual_information(&j, &["X"], &["X"], &[]).is_err());
        assert!(mutual_information(&j, &["X"], &["Y"], &["Y"]).is_err());
    }

    #[test]
    fn markov_violation_for_copy_around_independent_middle() {
        let x = JointPmf::bernoulli("X", 0.5).unwrap();
        let with_y = x.extend(&ConditionalPmf::from_fn(vec![], vec![Axis::new("Y", Alphabet::binary())], |_, _| 0.5).unwrap()).unwrap();
        let z = ConditionalPmf::deterministic(
            vec![Axis::new("X", Alphabet::binary())],
            vec![Axis::new("Z", Alphabet::binary())],
            |g| g[0],
        )
        .unwrap();
        let j = with_y.extend(&z).unwrap();
        let m = check_markov(&j, &[&["X"], &["Y"], &["Z"]], 1e-9).unwrap();
        assert!(!m.holds);
        assert_abs_diff_eq!(m.max_violation, 0.5, epsilon = 1e-12);
        assert!(check_markov(&j, &[&["X"], &["Y"]], 1e-9).is_err());
    }

    #[test]
    fn zero_mass_slices_become_uniform() {
        let j = make_erasure_source(&JointPmf::bernoulli("X", 0.5).unwrap(), 0.0).unwrap();
        let (c, zeros) = j.conditional(&["X"], &["Y"]).unwrap();
        assert_eq!(zeros, 1);
        assert_eq!(c.row(2), &[0.5, 0.5]);
    }

    #[test]
    fn json_round_trip() {
        let j = make_erasure_source(&JointPmf::bernoulli("X", 0.3).unwrap(), 0.37).unwrap();
        let s = serde_json::to_string(&j).unwrap();
        let back: JointPmf = serde_json::from_str(&s).unwrap();
        assert_eq!(back, j);
        assert!(s.contains("\"labels\":[\"0\",\"1\",\"e\"]"));
    }

    #[test]
    fn capacity_limit() {
        let axes = (0..9).map(|i| Axis::new(format!("A{i}"), Alphabet::new(10).unwrap())).collect();
        let err = JointPmf::new(axes, vec![]).unwrap_err();
        assert!(matches!(err, crate::Error::Capacity { .. }));
    }
}
