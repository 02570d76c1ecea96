//! Evaluators for the rate, distortion and leakage bounds.
//!
//! Sources are joint pmfs with axes named `X` (source), `Y` (side
//! information at encoder, and decoder), `Z` (eavesdropper side information)
//! and, for the helper setting, `W`. Auxiliaries are named `U`, `V` and `Uh`.

mod corollary;
mod gaussian;
mod helper;

pub use corollary::{corollary_floor, corollary_region, corollary_source, CorollaryCase, CorollaryParams};
pub use gaussian::{gaussian_region, GaussianChainParams, GaussianPoint};
pub use helper::{
    helper_inner_bound, region_helper_degraded, region_helper_logloss, HelperBound, KeyConstraint, KeyRates,
};

use serde::{Deserialize, Serialize};

use crate::error::{usage, Error, Result};
use crate::prob::{check_markov, entropy, mutual_information, Alphabet, Axis, ConditionalPmf, JointPmf};
use crate::rd::{rd_si_enc, Decoder, DistortionSpec, RdSolverConfig, RdSource, WzSolution};

/// Tolerance used when verifying structural Markov chains.
pub const MARKOV_TOL: f64 = 1e-9;

/// One `(R_h, R, D, Delta)` tuple. `R_h` is present only in the helper
/// setting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RdiPoint {
    #[serde(rename = "Rh", default, skip_serializing_if = "Option::is_none")]
    pub r_h: Option<f64>,
    #[serde(rename = "R")]
    pub r: f64,
    #[serde(rename = "D")]
    pub d: f64,
    #[serde(rename = "Delta")]
    pub delta: f64,
}

impl RdiPoint {
    pub fn new(r: f64, d: f64, delta: f64) -> Self {
        Self { r_h: None, r, d, delta }
    }
}

/// Decoder reconstruction attached to an auxiliary choice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Reconstruction {
    /// Deterministic `x_hat` indexed row-major by the named decoder inputs.
    Table {
        inputs: Vec<String>,
        table: Vec<usize>,
        distortion: DistortionSpec,
    },
    /// Log-loss with the posterior of `X` given every decoder input.
    Posterior,
}

/// Auxiliary channels `p(u,v | ...)`, an optional helper description
/// `p(u_h | y)`, and the reconstruction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AuxChannelSetRepr")]
pub struct AuxChannelSet {
    p_uv: ConditionalPmf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p_uh: Option<ConditionalPmf>,
    reconstruction: Reconstruction,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AuxChannelSetRepr {
    p_uv: ConditionalPmf,
    #[serde(default)]
    p_uh: Option<ConditionalPmf>,
    reconstruction: Reconstruction,
}

impl TryFrom<AuxChannelSetRepr> for AuxChannelSet {
    type Error = Error;

    fn try_from(r: AuxChannelSetRepr) -> Result<Self> {
        Self::new(r.p_uv, r.p_uh, r.reconstruction)
    }
}

impl AuxChannelSet {
    /// Validates names and the cardinality caps `|U|, |V| <= (given size) + 2`
    /// and `|U_h| <= |Y| + 2`.
    pub fn new(p_uv: ConditionalPmf, p_uh: Option<ConditionalPmf>, reconstruction: Reconstruction) -> Result<Self> {
        if p_uv.output_names() != ["U", "V"] {
            return usage("auxiliary channel must output (U, V)");
        }
        let cap = p_uv.given_size() + 2;
        for a in p_uv.output() {
            if a.size() > cap {
                return usage(format!("|{}| = {} exceeds the cardinality cap {cap}", a.name, a.size()));
            }
        }
        if let Some(h) = &p_uh {
            if h.given_names() != ["Y"] || h.output_names() != ["Uh"] {
                return usage("helper channel must map Y to Uh");
            }
            if h.output_size() > h.given_size() + 2 {
                return usage(format!("|Uh| = {} exceeds |Y| + 2", h.output_size()));
            }
        }
        Ok(Self { p_uv, p_uh, reconstruction })
    }

    /// `U` and `V` both constant, given `(X, Y)` taken from `source`.
    pub fn trivial(source: &JointPmf, reconstruction: Reconstruction) -> Result<Self> {
        let given = vec![source.axis("X")?.clone(), source.axis("Y")?.clone()];
        let out = vec![Axis::new("U", Alphabet::unit()), Axis::new("V", Alphabet::unit())];
        Self::new(ConditionalPmf::from_fn(given, out, |_, _| 1.0)?, None, reconstruction)
    }

    /// `U` constant and `V` drawn from `p_v`, whose given axes must be a
    /// subset of `(X, Y)` in `source`.
    pub fn with_v(source: &JointPmf, p_v: &ConditionalPmf, reconstruction: Reconstruction) -> Result<Self> {
        let given = vec![source.axis("X")?.clone(), source.axis("Y")?.clone()];
        Self::from_parts(given, None, p_v, reconstruction)
    }

    fn from_parts(
        given: Vec<Axis>,
        p_u: Option<&ConditionalPmf>,
        p_v: &ConditionalPmf,
        reconstruction: Reconstruction,
    ) -> Result<Self> {
        let names: Vec<&str> = given.iter().map(|a| a.name.as_str()).collect();
        let lookup = |c: &ConditionalPmf| -> Result<Vec<usize>> {
            c.given()
                .iter()
                .map(|a| {
                    names
                        .iter()
                        .position(|n| *n == a.name)
                        .ok_or_else(|| Error::Usage(format!("auxiliary depends on {:?}, not allowed here", a.name)))
                })
                .collect()
        };
        let v_idx = lookup(p_v)?;
        let v_sizes: Vec<usize> = p_v.given().iter().map(Axis::size).collect();
        let (u_axis, u_rows) = match p_u {
            Some(u) => (u.output()[0].clone(), Some((u, lookup(u)?))),
            None => (Axis::new("U", Alphabet::unit()), None),
        };
        let v_axis = Axis::new("V", p_v.output()[0].alphabet.clone());
        let flat = |idx: &[usize], pick: &[usize], sizes: &[usize]| -> usize {
            pick.iter().zip(sizes).fold(0, |acc, (&i, &s)| acc * s + idx[i])
        };
        let p_uv = ConditionalPmf::from_fn(given, vec![u_axis, v_axis], |g, o| {
            let pv = p_v.row(flat(g, &v_idx, &v_sizes))[o[1]];
            let pu = match &u_rows {
                Some((u, idx)) => {
                    let sizes: Vec<usize> = u.given().iter().map(Axis::size).collect();
                    u.row(flat(g, idx, &sizes))[o[0]]
                }
                None => 1.0,
            };
            pu * pv
        })?;
        Self::new(p_uv, None, reconstruction)
    }

    /// Wraps a Wyner-Ziv test channel and its decoder. Decoder inputs are
    /// `V` followed by the side-information variables of `rd_source`.
    pub fn from_wz(
        source: &JointPmf,
        rd_source: &RdSource,
        sol: &WzSolution,
        dist: &DistortionSpec,
    ) -> Result<Self> {
        let p_v = sol.channel_pmf(rd_source)?;
        let reconstruction = match &sol.decoder {
            Decoder::Posterior => Reconstruction::Posterior,
            Decoder::Table { table } => Reconstruction::Table {
                inputs: std::iter::once("V".to_string())
                    .chain(rd_source.si_names().iter().map(|s| s.to_string()))
                    .collect(),
                table: table.clone(),
                distortion: dist.clone(),
            },
        };
        Self::with_v(source, &p_v, reconstruction)
    }

    /// Helper setting: `p(u_h | y)` plus `p(u, v | x, u_h)`.
    pub fn helper(
        source: &JointPmf,
        p_uh: ConditionalPmf,
        p_u: Option<&ConditionalPmf>,
        p_v: &ConditionalPmf,
        reconstruction: Reconstruction,
    ) -> Result<Self> {
        let given = vec![source.axis("X")?.clone(), p_uh.output()[0].clone()];
        let mut s = Self::from_parts(given, p_u, p_v, reconstruction)?;
        s = Self::new(s.p_uv, Some(p_uh), s.reconstruction)?;
        Ok(s)
    }

    pub fn p_uv(&self) -> &ConditionalPmf {
        &self.p_uv
    }

    pub fn p_uh(&self) -> Option<&ConditionalPmf> {
        self.p_uh.as_ref()
    }

    pub fn reconstruction(&self) -> &Reconstruction {
        &self.reconstruction
    }

    /// Source extended by the helper description (if any) and `(U, V)`.
    pub fn joint(&self, source: &JointPmf) -> Result<JointPmf> {
        let base = match &self.p_uh {
            Some(h) => source.extend(h)?,
            None => source.clone(),
        };
        base.extend(&self.p_uv)
    }

    /// Expected distortion when the decoder observes `allowed`.
    pub fn distortion(&self, joint: &JointPmf, allowed: &[&str]) -> Result<f64> {
        match &self.reconstruction {
            Reconstruction::Posterior => entropy(joint, &["X"], allowed),
            Reconstruction::Table { inputs, table, distortion } => {
                for i in inputs {
                    if !allowed.contains(&i.as_str()) {
                        return usage(format!("reconstruction uses {i:?}, which the decoder does not observe"));
                    }
                }
                let names: Vec<&str> = inputs.iter().map(String::as_str).collect();
                let idx = joint.indices_of(&names)?;
                let sizes = joint.sizes();
                let needed: usize = idx.iter().map(|&i| sizes[i]).product();
                if table.len() != needed {
                    return usage(format!(
                        "reconstruction table has {} entries, decoder inputs need {needed}",
                        table.len()
                    ));
                }
                let x = joint.axis_index("X")?;
                let t = distortion
                    .table(sizes[x])?
                    .ok_or_else(|| Error::Usage("log-loss needs a posterior reconstruction".into()))?;
                if let Some(bad) = table.iter().find(|&&h| h >= t.nh) {
                    return usage(format!("reconstruction index {bad} out of range"));
                }
                Ok(joint.expectation(|m| {
                    let k = idx.iter().fold(0, |acc, &i| acc * sizes[i] + m[i]);
                    t.at(m[x], table[k])
                }))
            }
        }
    }
}

fn mi(j: &JointPmf, a: &[&str], b: &[&str], g: &[&str]) -> Result<f64> {
    Ok(mutual_information(j, a, b, g)?.max(0.0))
}

fn h(j: &JointPmf, a: &[&str], g: &[&str]) -> Result<f64> {
    Ok(entropy(j, a, g)?.max(0.0))
}

fn require_markov(j: &JointPmf, chain: &[&[&str]], what: &str) -> Result<()> {
    let m = check_markov(j, chain, MARKOV_TOL)?;
    if !m.holds {
        return Err(Error::Precondition(format!(
            "{what} does not hold (max violation {:.3e})",
            m.max_violation
        )));
    }
    Ok(())
}

/// Leakage lower bound with the switch open (lower-bound semantics).
pub fn outer_bound_open(source: &JointPmf, aux: &AuxChannelSet) -> Result<RdiPoint> {
    let j = aux.joint(source)?;
    let r = mi(&j, &["X"], &["U", "V"], &["Y"])?;
    let i_xz = mi(&j, &["X"], &["Z"], &[])?;
    let second = mi(&j, &["X"], &["Z", "V", "U"], &[])? + mi(&j, &["V"], &["Z"], &["U"])?
        - mi(&j, &["V"], &["Y"], &["U"])?
        - h(&j, &["Y"], &["U", "V", "X", "Z"])?;
    let d = aux.distortion(&j, &["Y", "U", "V"])?;
    Ok(RdiPoint::new(r, d, i_xz.max(second)))
}

/// Achievable point with the switch open.
pub fn inner_bound_open(source: &JointPmf, aux: &AuxChannelSet) -> Result<RdiPoint> {
    let j = aux.joint(source)?;
    let r = mi(&j, &["X"], &["U", "V"], &["Y"])?;
    let i_vx = mi(&j, &["V"], &["X"], &["U", "Y"])?;
    let r_k = i_vx.min(h(&j, &["Y"], &["U", "V", "X", "Z"])?);
    let delta = mi(&j, &["X"], &["Z", "U"], &[])? + i_vx - r_k;
    let d = aux.distortion(&j, &["Y", "U", "V"])?;
    Ok(RdiPoint::new(r, d, delta))
}

/// Achievable point with the switch closed (decoder also sees `Z`).
pub fn inner_bound_closed(source: &JointPmf, aux: &AuxChannelSet) -> Result<RdiPoint> {
    let j = aux.joint(source)?;
    let r = mi(&j, &["X"], &["U", "V"], &["Y", "Z"])?;
    let i_vx = mi(&j, &["V"], &["X"], &["U", "Y", "Z"])?;
    let r_k = i_vx.min(h(&j, &["Y"], &["U", "V", "X", "Z"])?);
    let delta = mi(&j, &["X"], &["Z", "U"], &[])? + i_vx - r_k;
    let d = aux.distortion(&j, &["Y", "Z", "U", "V"])?;
    Ok(RdiPoint::new(r, d, delta))
}

/// Leakage lower bound with the switch closed. Only `V` may be nontrivial.
pub fn outer_bound_closed(source: &JointPmf, aux: &AuxChannelSet) -> Result<RdiPoint> {
    if aux.p_uv.output()[0].size() != 1 {
        return usage("the closed-switch outer bound takes V only; U must be constant");
    }
    let j = aux.joint(source)?;
    let r = mi(&j, &["X"], &["V"], &["Y", "Z"])?;
    let i_xz = mi(&j, &["X"], &["Z"], &[])?;
    let delta = i_xz.max(i_xz + r - h(&j, &["Y"], &["X", "Z"])?);
    let d = aux.distortion(&j, &["Y", "Z", "V"])?;
    Ok(RdiPoint::new(r, d, delta))
}

fn leakage_form(source: &JointPmf, r: f64) -> Result<f64> {
    let i_xz = mi(source, &["X"], &["Z"], &[])?;
    Ok(i_xz.max(i_xz + r - h(source, &["Y"], &["X", "Z"])?))
}

/// Region for `X - Y - Z` when encoder side information does not lower the
/// rate-distortion function. The equality condition is the caller's
/// responsibility; see [`crate::rd::check_si_equality`].
pub fn region_open_markov(source: &JointPmf, dist: &DistortionSpec, d: f64, cfg: &RdSolverConfig) -> Result<RdiPoint> {
    require_markov(source, &[&["X"], &["Y"], &["Z"]], "X - Y - Z")?;
    let r = rd_si_enc(&RdSource::new(source, "X", &["Y"])?, dist, d, cfg)?;
    Ok(RdiPoint::new(r, d, leakage_form(source, r)?))
}

/// Region with the switch closed, under the equality condition for the
/// combined side information `(Y, Z)`.
pub fn region_closed(source: &JointPmf, dist: &DistortionSpec, d: f64, cfg: &RdSolverConfig) -> Result<RdiPoint> {
    let r = rd_si_enc(&RdSource::new(source, "X", &["Y", "Z"])?, dist, d, cfg)?;
    Ok(RdiPoint::new(r, d, leakage_form(source, r)?))
}

/// Number of switches between the floor branch and the rate-dependent branch
/// of the leakage `max`.
pub fn count_kinks(deltas: &[f64], floor: f64, tol: f64) -> usize {
    let above: Vec<bool> = deltas.iter().map(|&d| d > floor + tol).collect();
    above.windows(2).filter(|w| w[0] != w[1]).count()
}
