//! Binary erasure sources used throughout the examples and figures.
//!
//! All builders name the source `X` and use the labels `0`, `1` and `e`.

use crate::error::{usage, Result};
use crate::prob::{add_erasure, Alphabet, Axis, ConditionalPmf, JointPmf, ERASURE_LABEL};

fn check_prob(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return usage(format!("{name} = {p} outside [0,1]"));
    }
    Ok(())
}

/// Binary variable `out` that copies the binary part of `from` and resolves
/// an erasure to `0` with probability `q`.
fn resolve_erasure(pmf: &JointPmf, from: &str, out: &str, q: f64) -> Result<JointPmf> {
    check_prob("erasure resolution probability", q)?;
    let src = pmf.axis(from)?.clone();
    let e = src
        .alphabet
        .index_of(ERASURE_LABEL)
        .ok_or_else(|| crate::Error::Usage(format!("{from:?} has no erasure symbol")))?;
    let ch = ConditionalPmf::from_fn(vec![src], vec![Axis::new(out, Alphabet::binary())], |g, o| {
        if g[0] == e {
            if o[0] == 0 {
                q
            } else {
                1.0 - q
            }
        } else if o[0] == g[0] {
            1.0
        } else {
            0.0
        }
    })?;
    pmf.extend(&ch)
}

/// `X ~ Bern(p_x)`, `Y` erases `X` with probability `p_e`, and `Z` is `Y` with
/// the erasure resolved to `0` with probability `q`. Satisfies `X - Y - Z`.
pub fn erased_y(p_x: f64, p_e: f64, q: f64) -> Result<JointPmf> {
    let x = JointPmf::bernoulli("X", p_x)?;
    let xy = add_erasure(&x, "X", "Y", p_e)?;
    resolve_erasure(&xy, "Y", "Z", q)
}

/// `Z` erases `X` with probability `p_e`; `Y` is `Z` with the erasure resolved
/// to `0` with probability `q`. Satisfies `X - Z - Y`.
pub fn erased_z(p_x: f64, p_e: f64, q: f64) -> Result<JointPmf> {
    let x = JointPmf::bernoulli("X", p_x)?;
    let xz = add_erasure(&x, "X", "Z", p_e)?;
    let xzy = resolve_erasure(&xz, "Z", "Y", q)?;
    Ok(xzy)
}

/// `Y` and `Z` are conditionally independent erasures of `X`.
pub fn double_erasure(p_x: f64, p_ey: f64, p_ez: f64) -> Result<JointPmf> {
    let x = JointPmf::bernoulli("X", p_x)?;
    let xy = add_erasure(&x, "X", "Y", p_ey)?;
    add_erasure(&xy, "X", "Z", p_ez)
}

/// Helper chain `Y - W - Z - X`: `Z` erases `X` with probability `p_e`, `W`
/// further erases `Z` with probability `p_w`, and the helper sees `Y = W`.
pub fn helper_erased(p_x: f64, p_e: f64, p_w: f64) -> Result<JointPmf> {
    check_prob("p_w", p_w)?;
    let x = JointPmf::bernoulli("X", p_x)?;
    let xz = add_erasure(&x, "X", "Z", p_e)?;
    let z = xz.axis("Z")?.clone();
    let k = z.size();
    let ch = ConditionalPmf::from_fn(vec![z.clone()], vec![Axis::new("W", z.alphabet.clone())], |g, o| {
        let erased = k - 1;
        if g[0] == erased {
            if o[0] == erased {
                1.0
            } else {
                0.0
            }
        } else if o[0] == g[0] {
            1.0 - p_w
        } else if o[0] == erased {
            p_w
        } else {
            0.0
        }
    })?;
    let xzw = xz.extend(&ch)?;
    xzw.add_tuple_axis("Y", &["W"])
}

/// Helper chain `Y - X - Z - W`: `Y = X`, `Z` erases `X` with probability
/// `p_e`, and `W` further erases `Z` with probability `p_w`.
pub fn helper_source_observer(p_x: f64, p_e: f64, p_w: f64) -> Result<JointPmf> {
    let base = helper_erased(p_x, p_e, p_w)?;
    let m = base.marginal(&["X", "Z", "W"])?;
    m.add_tuple_axis("Y", &["X"])
}
