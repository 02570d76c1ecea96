use serde::{Deserialize, Serialize};

use super::RdiPoint;
use crate::error::{usage, Result};

/// Jointly Gaussian chains with independent additive noises.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "ordering")]
pub enum GaussianChainParams {
    /// `Z = W + A`, `X = Z + B`, `Y = X + C`.
    #[serde(rename = "W-Z-X-Y")]
    WZXY { var_w: f64, var_a: f64, var_b: f64, var_c: f64 },
    /// `Z = X + A`, `W = Z + B`, `Y = W + C`.
    #[serde(rename = "X-Z-W-Y")]
    XZWY { var_x: f64, var_a: f64, var_b: f64, var_c: f64 },
}

impl GaussianChainParams {
    fn variances(&self) -> [f64; 4] {
        match *self {
            GaussianChainParams::WZXY { var_w, var_a, var_b, var_c } => [var_w, var_a, var_b, var_c],
            GaussianChainParams::XZWY { var_x, var_a, var_b, var_c } => [var_x, var_a, var_b, var_c],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.variances().iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return usage("all variances must be positive and finite");
        }
        Ok(())
    }
}

/// Gaussian region point plus saturation of the rate's `[.]+`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianPoint {
    pub point: RdiPoint,
    /// The log argument of the rate was at most one and the rate clipped to 0.
    pub saturated: bool,
}

/// Closed-form region under squared-error distortion, in bits. `r_h` may be
/// `f64::INFINITY`.
pub fn gaussian_region(params: &GaussianChainParams, r_h: f64, d: f64) -> Result<GaussianPoint> {
    params.validate()?;
    if !(d > 0.0) || !d.is_finite() {
        return usage(format!("distortion {d} must be positive"));
    }
    if !(r_h >= 0.0) {
        return usage(format!("helper rate {r_h} must be nonnegative"));
    }
    let half_log = |v: f64| 0.5 * v.log2();
    let (raw, delta) = match *params {
        GaussianChainParams::WZXY { var_w, var_a, var_b, var_c } => {
            let shrink = var_b / (var_b + var_c) * (1.0 - (-2.0 * r_h).exp2());
            let raw = half_log(var_b * (1.0 - shrink) / d);
            let floor = half_log((var_w + var_a + var_b) / (var_a + var_b));
            let key = half_log(var_b / d) - r_h;
            (raw, floor.max(floor + key))
        }
        GaussianChainParams::XZWY { var_x, var_a, var_b, .. } => {
            let raw = half_log(var_x * var_a / ((var_x + var_a) * d));
            let floor = half_log((var_x + var_a + var_b) / (var_a + var_b));
            (raw, floor.max(floor + raw - r_h))
        }
    };
    Ok(GaussianPoint {
        point: RdiPoint { r_h: Some(r_h), r: raw.max(0.0), d, delta },
        saturated: raw <= 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const ONES: GaussianChainParams = GaussianChainParams::WZXY { var_w: 1.0, var_a: 1.0, var_b: 1.0, var_c: 1.0 };

    #[test]
    fn unit_variances() {
        let g = gaussian_region(&ONES, 0.5, 0.5).unwrap();
        assert_abs_diff_eq!(g.point.r, 0.5 * 1.5f64.log2(), epsilon = 1e-12);
        assert_abs_diff_eq!(g.point.delta, 0.5 * 1.5f64.log2(), epsilon = 1e-12);
        assert_abs_diff_eq!(g.point.r, 0.292481, epsilon = 1e-6);
    }

    #[test]
    fn limits() {
        let inf = gaussian_region(&ONES, f64::INFINITY, 0.2).unwrap();
        assert_abs_diff_eq!(inf.point.r, 0.5 * (0.5f64 / 0.2).log2(), epsilon = 1e-12);
        assert_abs_diff_eq!(inf.point.delta, 0.5 * 1.5f64.log2(), epsilon = 1e-12);
        let zero = gaussian_region(&ONES, 0.0, 1.0).unwrap();
        assert_eq!(zero.point.r, 0.0);
        assert!(zero.saturated);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(gaussian_region(&ONES, 0.5, 0.0).is_err());
        assert!(gaussian_region(&ONES, -1.0, 0.5).is_err());
        let bad = GaussianChainParams::XZWY { var_x: 1.0, var_a: 0.0, var_b: 1.0, var_c: 1.0 };
        assert!(gaussian_region(&bad, 0.5, 0.5).is_err());
    }

    #[test]
    fn second_ordering() {
        let p = GaussianChainParams::XZWY { var_x: 1.0, var_a: 1.0, var_b: 1.0, var_c: 1.0 };
        let g = gaussian_region(&p, 0.0, 0.25).unwrap();
        assert_abs_diff_eq!(g.point.r, 0.5, epsilon = 1e-12);
        let floor = 0.5 * 1.5f64.log2();
        assert_abs_diff_eq!(g.point.delta, floor + 0.5, epsilon = 1e-12);
    }
}
