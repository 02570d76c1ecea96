mod common;

use approx::assert_abs_diff_eq;
use common::{bsc_chain, h2, joint_strategy};
use proptest::prelude::*;
use rdi::prob::{make_erasure_source, JointPmf};
use rdi::rd::{check_si_equality, rd_erased_hamming, rd_logloss, rd_si_enc, DistortionSpec, RdSolverConfig, RdSource};
use rdi::Error;

fn cfg() -> RdSolverConfig {
    RdSolverConfig { restarts: 4, ..Default::default() }
}

fn erased_bit(p_x: f64, p_e: f64) -> JointPmf {
    make_erasure_source(&JointPmf::bernoulli("X", p_x).unwrap(), p_e).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn erased_hamming_matches_closed_form(p_e in 0.1f64..0.95, frac in 0.0f64..0.5) {
        let d = frac * p_e;
        let s = erased_bit(0.5, p_e);
        let r = rd_si_enc(&RdSource::new(&s, "X", &["Y"]).unwrap(), &DistortionSpec::Hamming, d, &cfg()).unwrap();
        let want = p_e * (1.0 - h2(d / p_e));
        prop_assert!((r - want).abs() < 1e-4, "rate {} vs {}", r, want);
        let closed = rd_erased_hamming(&JointPmf::bernoulli("X", 0.5).unwrap(), p_e, d).unwrap();
        prop_assert!((closed.rate - want).abs() < 1e-4);
    }

    #[test]
    fn logloss_matches_closed_form(p in joint_strategy(&["X", "Y"], &[3, 2]), d in 0.0f64..1.5) {
        let src = RdSource::new(&p, "X", &["Y"]).unwrap();
        let r = rd_si_enc(&src, &DistortionSpec::LogLoss, d, &cfg()).unwrap();
        let want = rd_logloss(&src, d).unwrap();
        prop_assert!((r - want).abs() < 1e-4, "rate {} vs {}", r, want);
    }

    #[test]
    fn rate_is_non_increasing_and_bounded(p in joint_strategy(&["X", "Y"], &[2, 3])) {
        let src = RdSource::new(&p, "X", &["Y"]).unwrap();
        let h = src.conditional_entropy();
        let mut last = f64::INFINITY;
        for d in [0.0, 0.1, 0.2, 0.3, 0.5] {
            let r = rd_si_enc(&src, &DistortionSpec::Hamming, d, &cfg()).unwrap();
            prop_assert!(r >= 0.0 && r <= h + 1e-6);
            prop_assert!(r <= last + 1e-6);
            last = r;
        }
    }
}

#[test]
fn erased_hamming_oracles() {
    let x = JointPmf::bernoulli("X", 0.5).unwrap();
    assert_abs_diff_eq!(rd_erased_hamming(&x, 0.8, 0.2).unwrap().rate, 0.150978, epsilon = 1e-6);
    assert_eq!(rd_erased_hamming(&x, 0.8, 0.4).unwrap().rate, 0.0);
    let src = RdSource::new(&erased_bit(0.5, 0.8), "X", &["Y"]).unwrap();
    assert_abs_diff_eq!(rd_logloss(&src, 0.3).unwrap(), 0.5, epsilon = 1e-12);
}

#[test]
fn equality_verdicts() {
    let grid = [0.05, 0.15, 0.25];
    let erased = RdSource::new(&erased_bit(0.5, 0.8), "X", &["Y"]).unwrap();
    let c = RdSolverConfig { restarts: 8, ..Default::default() };
    assert!(check_si_equality(&erased, &DistortionSpec::Hamming, &[0.2], &c).unwrap().verdict);
    assert!(check_si_equality(&erased, &DistortionSpec::LogLoss, &grid, &c).unwrap().verdict);
    // Doubly symmetric binary source: the informed encoder is strictly better.
    let dsbs = bsc_chain(0.25, 0.0).marginal(&["X", "Y"]).unwrap();
    let report = check_si_equality(&RdSource::new(&dsbs, "X", &["Y"]).unwrap(), &DistortionSpec::Hamming, &[0.1], &c)
        .unwrap();
    assert!(!report.verdict);
    assert!(report.max_gap > 1e-3);
}

#[test]
fn infeasible_distortion() {
    let s = erased_bit(0.5, 0.5);
    let src = RdSource::new(&s, "X", &[]).unwrap();
    let dist = DistortionSpec::Matrix { matrix: vec![vec![0.2, 1.0], vec![1.0, 0.2]] };
    let err = rd_si_enc(&src, &dist, 0.1, &cfg()).unwrap_err();
    assert!(matches!(err, Error::Infeasible { minimum, .. } if (minimum - 0.2).abs() < 1e-9));
}
