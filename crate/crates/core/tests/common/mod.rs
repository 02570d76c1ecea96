#![allow(dead_code)]

use proptest::prelude::*;
use rdi::prob::{entropy, Alphabet, Axis, ConditionalPmf, JointPmf};
use rdi::rd::DistortionSpec;
use rdi::regions::{corollary_source, AuxChannelSet, CorollaryCase, CorollaryParams, Reconstruction};

pub fn h2(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        0.0
    } else {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }
}

/// Binary-symmetric channel from the binary axis `from` to a new axis `to`.
pub fn bsc(from: &Axis, to: &str, p: f64) -> ConditionalPmf {
    ConditionalPmf::from_fn(vec![from.clone()], vec![Axis::new(to, Alphabet::binary())], |g, o| {
        if g[0] == o[0] {
            1.0 - p
        } else {
            p
        }
    })
    .unwrap()
}

/// Uniform `Y` and `W` observing it through a BSC with crossover `p`.
pub fn bsc_pair(y: &str, w: &str, p: f64) -> JointPmf {
    let base = JointPmf::bernoulli(y, 0.5).unwrap();
    let ch = bsc(base.axis(y).unwrap(), w, p);
    base.extend(&ch).unwrap()
}

/// Uniform `X`, `Y` from `X` and `Z` from `Y`, both through BSCs.
pub fn bsc_chain(p_xy: f64, p_yz: f64) -> JointPmf {
    let x = JointPmf::bernoulli("X", 0.5).unwrap();
    let xy = x.extend(&bsc(x.axis("X").unwrap(), "Y", p_xy)).unwrap();
    xy.extend(&bsc(xy.axis("Y").unwrap(), "Z", p_yz)).unwrap()
}

/// `V` is `X` with probability `1 - erase`, the erasure symbol otherwise.
pub fn erasure_v(source: &JointPmf, erase: f64) -> ConditionalPmf {
    let out = Axis::new("V", Alphabet::with_labels(["0", "1", "e"]).unwrap());
    ConditionalPmf::from_fn(vec![source.axis("X").unwrap().clone()], vec![out], |g, o| {
        if o[0] == 2 {
            erase
        } else if o[0] == g[0] {
            1.0 - erase
        } else {
            0.0
        }
    })
    .unwrap()
}

/// Whether the case is evaluated with the switch closed.
pub fn is_closed(case: CorollaryCase) -> bool {
    matches!(case, CorollaryCase::ErasedZHamming | CorollaryCase::DoubleErasureHamming | CorollaryCase::LoglossClosed)
}

/// Source and the optimal `(U = const, V*)` choice of an erasure example at
/// distortion `d`. Hamming cases need `d` below half the combined erasure
/// probability; log-loss cases need `d` below the conditional entropy.
pub fn v_star(case: CorollaryCase, params: &CorollaryParams, d: f64) -> (JointPmf, AuxChannelSet) {
    use CorollaryCase::*;
    let s = corollary_source(case, params).unwrap();
    let x = s.axis("X").unwrap().clone();
    let aux = match case {
        ErasedYHamming | ErasedZHamming | DoubleErasureHamming => {
            // V = X through BSC(d / p), decoder uses its own unerased view first.
            let (p, inputs, table): (f64, Vec<&str>, Vec<usize>) = match case {
                ErasedYHamming => (params.p_e.unwrap(), vec!["Y", "V"], vec![0, 0, 1, 1, 0, 1]),
                ErasedZHamming => (params.p_e.unwrap(), vec!["Z", "V"], vec![0, 0, 1, 1, 0, 1]),
                _ => {
                    let mut t = Vec::new();
                    for y in 0..3 {
                        for z in 0..3 {
                            for v in 0..2 {
                                t.push(if y < 2 { y } else if z < 2 { z } else { v });
                            }
                        }
                    }
                    (params.p_ey.unwrap() * params.p_ez.unwrap(), vec!["Y", "Z", "V"], t)
                }
            };
            let rec = Reconstruction::Table {
                inputs: inputs.into_iter().map(String::from).collect(),
                table,
                distortion: DistortionSpec::Hamming,
            };
            AuxChannelSet::with_v(&s, &bsc(&x, "V", d / p), rec).unwrap()
        }
        LoglossOpen | LoglossClosed => {
            let given: &[&str] = if case == LoglossOpen { &["Y"] } else { &["Y", "Z"] };
            let h = entropy(&s, &["X"], given).unwrap();
            AuxChannelSet::with_v(&s, &erasure_v(&s, d / h), Reconstruction::Posterior).unwrap()
        }
        HelperErasedHamming | HelperLogloss => panic!("helper cases take a helper description"),
    };
    (s, aux)
}

/// Strategy for a strictly positive pmf with the given axis sizes.
pub fn joint_strategy(names: &'static [&'static str], sizes: &'static [usize]) -> impl Strategy<Value = JointPmf> {
    let cells: usize = sizes.iter().product();
    prop::collection::vec(0.01f64..1.0, cells).prop_map(move |w| {
        let total: f64 = w.iter().sum();
        let axes = names.iter().zip(sizes).map(|(n, &k)| Axis::new(*n, Alphabet::new(k).unwrap())).collect();
        JointPmf::new(axes, w.iter().map(|v| v / total).collect()).unwrap()
    })
}
