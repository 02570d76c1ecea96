use serde::{Deserialize, Serialize};

use super::{h, mi, require_markov, AuxChannelSet, RdiPoint};
use crate::error::{usage, Result};
use crate::prob::JointPmf;
use crate::rd::{helper_aux_optimize, rd_si_enc, DistortionSpec, HelperAux, RdSolverConfig, RdSource};

const CONSTRAINT_TOL: f64 = 1e-12;

/// Secret-key rates: `r_k` from the decoder's side information, `r_k_prime`
/// from the helper's description.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KeyRates {
    pub r_k: f64,
    pub r_k_prime: f64,
}

/// One linear constraint on the key rates, `value <= cap`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeyConstraint {
    pub name: String,
    pub value: f64,
    pub cap: f64,
    pub slack: f64,
    pub satisfied: bool,
}

impl KeyConstraint {
    fn new(name: &str, value: f64, cap: f64) -> Self {
        let slack = cap - value;
        Self { name: name.into(), value, cap, slack, satisfied: slack >= -CONSTRAINT_TOL }
    }
}

/// Achievable point in the helper setting with the key split used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HelperBound {
    pub point: RdiPoint,
    /// `max{I(U_h;Y|Z), I(U_h;Y|X)}`; the helper rate must cover it.
    pub helper_rate_needed: f64,
    pub keys: KeyRates,
    pub constraints: Vec<KeyConstraint>,
}

impl HelperBound {
    pub fn feasible(&self) -> bool {
        self.constraints.iter().all(|c| c.satisfied)
    }
}

/// Inner bound for the helper setting. `source` needs `X`, `Y`, `Z`, `W` and
/// `aux` a helper description. With `keys = None` the largest admissible key
/// rates are used, filling `r_k_prime` first.
pub fn helper_inner_bound(
    source: &JointPmf,
    aux: &AuxChannelSet,
    r_h: f64,
    keys: Option<KeyRates>,
) -> Result<HelperBound> {
    if !(r_h >= 0.0) {
        return usage(format!("helper rate {r_h} must be nonnegative"));
    }
    if aux.p_uh().is_none() {
        return usage("helper bound needs a helper description p(u_h | y)");
    }
    let j = aux.joint(source)?;
    require_markov(&j, &[&["Uh"], &["Y"], &["X", "Z", "W"]], "Uh - Y - (X, Z, W)")?;
    require_markov(&j, &[&["U", "V"], &["X", "Uh"], &["Y", "Z", "W"]], "(U, V) - (X, Uh) - (Y, Z, W)")?;
    require_markov(&j, &[&["U", "V", "Uh"], &["X", "Y"], &["Z", "W"]], "(U, V, Uh) - (X, Y) - (Z, W)")?;

    let needed = mi(&j, &["Uh"], &["Y"], &["Z"])?.max(mi(&j, &["Uh"], &["Y"], &["X"])?);
    let r = mi(&j, &["X"], &["U", "V"], &["Z", "Uh"])?;
    let i_v = mi(&j, &["X"], &["V"], &["Z", "Uh", "U"])?;
    let base = mi(&j, &["X"], &["W", "U"], &[])?
        + i_v
        + mi(&j, &["U", "V"], &["Uh"], &["X", "Y"])?
        + mi(&j, &["U"], &["Uh"], &["X", "Y"])?;
    let cap_k = mi(&j, &["Uh"], &["Y"], &[])? - mi(&j, &["Uh"], &["X", "W", "U", "V"], &[])?;
    let cap_kp = r_h - needed;
    let keys = keys.unwrap_or_else(|| {
        let r_k_prime = cap_kp.min(i_v).max(0.0);
        let r_k = cap_k.min(i_v - r_k_prime).max(0.0);
        KeyRates { r_k, r_k_prime }
    });
    let constraints = vec![
        KeyConstraint::new("helper rate", needed, r_h),
        KeyConstraint::new("R_K", keys.r_k, cap_k),
        KeyConstraint::new("R_K'", keys.r_k_prime, cap_kp),
        KeyConstraint::new("R_K + R_K'", keys.r_k + keys.r_k_prime, i_v),
        KeyConstraint::new("R_K >= 0", 0.0, keys.r_k),
        KeyConstraint::new("R_K' >= 0", 0.0, keys.r_k_prime),
    ];
    let d = aux.distortion(&j, &["Z", "Uh", "U", "V"])?;
    Ok(HelperBound {
        point: RdiPoint { r_h: Some(r_h), r, d, delta: base - keys.r_k - keys.r_k_prime },
        helper_rate_needed: needed,
        keys,
        constraints,
    })
}

fn check_rates(r_h: f64, d: f64) -> Result<()> {
    if !(r_h >= 0.0) {
        return usage(format!("helper rate {r_h} must be nonnegative"));
    }
    if !(d >= 0.0) || !d.is_finite() {
        return usage(format!("distortion {d} must be finite and nonnegative"));
    }
    Ok(())
}

/// Log-loss region for `Y - X - Z - W`. Also returns the optimized helper
/// description.
pub fn region_helper_logloss(
    source: &JointPmf,
    r_h: f64,
    d: f64,
    cfg: &RdSolverConfig,
) -> Result<(RdiPoint, HelperAux)> {
    check_rates(r_h, d)?;
    require_markov(source, &[&["Y"], &["X"], &["Z"], &["W"]], "Y - X - Z - W")?;
    let aux = helper_aux_optimize(source, r_h, cfg)?;
    let i_xw = mi(source, &["X"], &["W"], &[])?;
    let h_xz = h(source, &["X"], &["Z"])?;
    let point = RdiPoint {
        r_h: Some(r_h),
        r: (aux.objective - d).max(0.0),
        d,
        delta: i_xw.max(i_xw + h_xz - d - r_h),
    };
    Ok((point, aux))
}

/// Region for `Y - W - Z - X`, where the helper cannot reduce the rate.
pub fn region_helper_degraded(
    source: &JointPmf,
    dist: &DistortionSpec,
    r_h: f64,
    d: f64,
    cfg: &RdSolverConfig,
) -> Result<RdiPoint> {
    check_rates(r_h, d)?;
    require_markov(source, &[&["Y"], &["W"], &["Z"], &["X"]], "Y - W - Z - X")?;
    let r = rd_si_enc(&RdSource::new(source, "X", &["Z"])?, dist, d, cfg)?;
    let i_xw = mi(source, &["X"], &["W"], &[])?;
    Ok(RdiPoint { r_h: Some(r_h), r, d, delta: i_xw.max(i_xw + r - r_h) })
}
