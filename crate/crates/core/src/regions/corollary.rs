use serde::{Deserialize, Serialize};

use super::{h, mi, RdiPoint};
use crate::error::{usage, Result};
use crate::prob::{h2, JointPmf};
use crate::sources;

/// Closed-form special cases on binary erasure sources.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorollaryCase {
    /// Switch open, `Y` erased `X`, `Z` from `Y`, Hamming distortion.
    ErasedYHamming,
    /// Switch open, same source, log-loss.
    LoglossOpen,
    /// Switch closed, `Z` erased `X`, `Y` from `Z`, Hamming distortion.
    ErasedZHamming,
    /// Switch closed, independent erasures `Y` and `Z`, Hamming distortion.
    DoubleErasureHamming,
    /// Switch closed, independent erasures, log-loss.
    LoglossClosed,
    /// Helper with `Y - W - Z - X`, erased `Z`, Hamming distortion.
    HelperErasedHamming,
    /// Helper with `Y - W - Z - X`, log-loss.
    HelperLogloss,
}

impl CorollaryCase {
    pub const ALL: [CorollaryCase; 7] = [
        CorollaryCase::ErasedYHamming,
        CorollaryCase::LoglossOpen,
        CorollaryCase::ErasedZHamming,
        CorollaryCase::DoubleErasureHamming,
        CorollaryCase::LoglossClosed,
        CorollaryCase::HelperErasedHamming,
        CorollaryCase::HelperLogloss,
    ];

    pub fn is_helper(self) -> bool {
        matches!(self, CorollaryCase::HelperErasedHamming | CorollaryCase::HelperLogloss)
    }
}

fn half() -> f64 {
    0.5
}

/// Source parameters. Which fields are required depends on the case:
/// `p_e` and `q` for the single-erasure cases, `p_ey` and `p_ez` for the
/// double-erasure cases, `p_e` and `p_w` for the helper cases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorollaryParams {
    /// P(X = 1).
    #[serde(default = "half")]
    pub p_x: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_e: Option<f64>,
    /// Probability that an erased observation resolves to `0` in the derived
    /// binary variable.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_ey: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_ez: Option<f64>,
    /// Extra erasure from `Z` to the eavesdropper's `W` (helper cases).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_w: Option<f64>,
}

impl Default for CorollaryParams {
    fn default() -> Self {
        Self { p_x: 0.5, p_e: None, q: None, p_ey: None, p_ez: None, p_w: None }
    }
}

impl CorollaryParams {
    pub fn erased(p_e: f64, q: f64) -> Self {
        Self { p_e: Some(p_e), q: Some(q), ..Default::default() }
    }

    pub fn double(p_ey: f64, p_ez: f64) -> Self {
        Self { p_ey: Some(p_ey), p_ez: Some(p_ez), ..Default::default() }
    }

    pub fn helper(p_e: f64, p_w: f64) -> Self {
        Self { p_e: Some(p_e), p_w: Some(p_w), ..Default::default() }
    }

    fn check(&self, case: CorollaryCase) -> Result<()> {
        use CorollaryCase::*;
        let (need, name): ([bool; 5], &str) = match case {
            ErasedYHamming | LoglossOpen | ErasedZHamming => ([true, true, false, false, false], "p_e and q"),
            DoubleErasureHamming | LoglossClosed => ([false, false, true, true, false], "p_ey and p_ez"),
            HelperErasedHamming | HelperLogloss => ([true, false, false, false, true], "p_e and p_w"),
        };
        let have = [self.p_e, self.q, self.p_ey, self.p_ez, self.p_w];
        if need.iter().zip(&have).any(|(n, h)| *n != h.is_some()) {
            return usage(format!("case {case:?} takes exactly {name}"));
        }
        for (label, v) in [("p_x", Some(self.p_x)), ("p_e", self.p_e), ("q", self.q), ("p_ey", self.p_ey), ("p_ez", self.p_ez), ("p_w", self.p_w)] {
            if let Some(v) = v {
                if !(0.0..=1.0).contains(&v) {
                    return usage(format!("{label} = {v} outside [0,1]"));
                }
            }
        }
        Ok(())
    }
}

/// The joint pmf the case is defined on.
pub fn corollary_source(case: CorollaryCase, p: &CorollaryParams) -> Result<JointPmf> {
    use CorollaryCase::*;
    p.check(case)?;
    let v = |o: Option<f64>| o.expect("checked");
    match case {
        ErasedYHamming | LoglossOpen => sources::erased_y(p.p_x, v(p.p_e), v(p.q)),
        ErasedZHamming => sources::erased_z(p.p_x, v(p.p_e), v(p.q)),
        DoubleErasureHamming | LoglossClosed => sources::double_erasure(p.p_x, v(p.p_ey), v(p.p_ez)),
        HelperErasedHamming | HelperLogloss => sources::helper_erased(p.p_x, v(p.p_e), v(p.p_w)),
    }
}

/// The leakage floor: `I(X;Z)`, or `I(X;W)` in the helper cases.
pub fn corollary_floor(case: CorollaryCase, p: &CorollaryParams) -> Result<f64> {
    let s = corollary_source(case, p)?;
    let eve = if case.is_helper() { "W" } else { "Z" };
    mi(&s, &["X"], &[eve], &[])
}

/// Hamming rate-distortion function of a Bern(p) source.
fn binary_rd(p: f64, d: f64) -> f64 {
    if d < p.min(1.0 - p) {
        h2(p) - h2(d)
    } else {
        0.0
    }
}

/// Erasure-scaled Hamming rate `p_e R_X(D / p_e)`.
fn erased_rate(p_x: f64, p_e: f64, d: f64) -> f64 {
    if p_e == 0.0 {
        0.0
    } else {
        p_e * binary_rd(p_x, d / p_e)
    }
}

/// Exact closed-form evaluation of one case at distortion `d` (and helper
/// rate `r_h` for the helper cases).
pub fn corollary_region(case: CorollaryCase, p: &CorollaryParams, d: f64, r_h: Option<f64>) -> Result<RdiPoint> {
    use CorollaryCase::*;
    if !d.is_finite() || d < 0.0 {
        return usage(format!("distortion {d} must be finite and nonnegative"));
    }
    match (case.is_helper(), r_h) {
        (true, None) => return usage(format!("case {case:?} needs a helper rate")),
        (false, Some(_)) => return usage(format!("case {case:?} takes no helper rate")),
        (true, Some(r)) if !(r >= 0.0) => return usage(format!("helper rate {r} must be nonnegative")),
        _ => {}
    }
    let s = corollary_source(case, p)?;
    let v = |o: Option<f64>| o.expect("checked");
    let floor = corollary_floor(case, p)?;
    let (r, second) = match case {
        ErasedYHamming => {
            let r = erased_rate(p.p_x, v(p.p_e), d);
            (r, floor + r - h(&s, &["Y"], &["X", "Z"])?)
        }
        LoglossOpen => {
            let hxy = h(&s, &["X"], &["Y"])?;
            ((hxy - d).max(0.0), floor + hxy - d - h(&s, &["Y"], &["X", "Z"])?)
        }
        ErasedZHamming => {
            let r = erased_rate(p.p_x, v(p.p_e), d);
            (r, floor + r - h(&s, &["Y"], &["Z"])?)
        }
        DoubleErasureHamming => {
            let r = erased_rate(p.p_x, v(p.p_ey) * v(p.p_ez), d);
            (r, floor + r - h(&s, &["Y"], &["X"])?)
        }
        LoglossClosed => {
            let hxyz = h(&s, &["X"], &["Y", "Z"])?;
            ((hxyz - d).max(0.0), floor + hxyz - d - h(&s, &["Y"], &["X", "Z"])?)
        }
        HelperErasedHamming => {
            let r = erased_rate(p.p_x, v(p.p_e), d);
            (r, floor + r - v(r_h))
        }
        HelperLogloss => {
            let hxz = h(&s, &["X"], &["Z"])?;
            ((hxz - d).max(0.0), floor + hxz - d - v(r_h))
        }
    };
    Ok(RdiPoint { r_h, r, d, delta: floor.max(second) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn double_erasure_lossless_rate() {
        let pt = corollary_region(CorollaryCase::DoubleErasureHamming, &CorollaryParams::double(0.9, 0.8), 0.0, None).unwrap();
        assert_abs_diff_eq!(pt.r, 0.72, epsilon = 1e-12);
        assert_abs_diff_eq!(pt.delta, 0.2f64.max(0.2 + 0.72 - h2(0.9)), epsilon = 1e-12);
    }

    #[test]
    fn helper_logloss_zero_rate() {
        let p = CorollaryParams::helper(0.8, 0.5);
        let pt = corollary_region(CorollaryCase::HelperLogloss, &p, 0.1, Some(0.0)).unwrap();
        let floor = corollary_floor(CorollaryCase::HelperLogloss, &p).unwrap();
        assert_abs_diff_eq!(floor, 0.1, epsilon = 1e-12);
        assert_abs_diff_eq!(pt.delta, floor + 0.8 - 0.1, epsilon = 1e-12);
        assert_eq!(pt.r_h, Some(0.0));
    }

    #[test]
    fn erased_y_rate_crosses_zero() {
        let p = CorollaryParams::erased(0.8, 0.5);
        let at = corollary_region(CorollaryCase::ErasedYHamming, &p, 0.4, None).unwrap();
        assert_eq!(at.r, 0.0);
        let before = corollary_region(CorollaryCase::ErasedYHamming, &p, 0.4 - 1e-6, None).unwrap();
        assert!(before.r > 0.0 && before.r < 1e-9);
    }

    #[test]
    fn parameter_case_mismatch() {
        let p = CorollaryParams::double(0.9, 0.8);
        assert!(corollary_region(CorollaryCase::ErasedYHamming, &p, 0.1, None).is_err());
        let p = CorollaryParams::erased(0.8, 0.5);
        assert!(corollary_region(CorollaryCase::ErasedYHamming, &p, 0.1, Some(0.2)).is_err());
        assert!(corollary_region(CorollaryCase::HelperLogloss, &CorollaryParams::helper(0.8, 0.5), 0.1, None).is_err());
        let bad = CorollaryParams::erased(1.2, 0.5);
        assert!(corollary_region(CorollaryCase::ErasedYHamming, &bad, 0.1, None).is_err());
    }

    #[test]
    fn floor_respected_everywhere() {
        for case in CorollaryCase::ALL {
            let p = match case {
                CorollaryCase::DoubleErasureHamming | CorollaryCase::LoglossClosed => CorollaryParams::double(0.9, 0.8),
                c if c.is_helper() => CorollaryParams::helper(0.8, 0.3),
                _ => CorollaryParams::erased(0.8, 0.5),
            };
            let floor = corollary_floor(case, &p).unwrap();
            for i in 0..=20 {
                let d = i as f64 * 0.05;
                let pt = corollary_region(case, &p, d, case.is_helper().then_some(0.2)).unwrap();
                assert!(pt.delta >= floor - 1e-12);
                assert!(pt.r >= 0.0);
            }
        }
    }
}
