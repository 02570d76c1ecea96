use serde::{Deserialize, Serialize};

use super::alphabet::{Alphabet, Axis, AxisRepr};
use super::conditional::ConditionalPmf;
use crate::error::{usage, Error, Result};

/// Largest dense product alphabet accepted.
pub const MAX_CELLS: usize = 100_000_000;

pub(crate) const SUM_TOL: f64 = 1e-12;

/// Dense joint pmf over named finite variables, row-major with the last axis
/// varying fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "JointPmfRepr", into = "JointPmfRepr")]
pub struct JointPmf {
    axes: Vec<Axis>,
    probs: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct JointPmfRepr {
    axes: Vec<AxisRepr>,
    probs: Vec<f64>,
}

impl From<JointPmf> for JointPmfRepr {
    fn from(p: JointPmf) -> Self {
        Self {
            axes: p.axes.iter().map(AxisRepr::from).collect(),
            probs: p.probs,
        }
    }
}

impl TryFrom<JointPmfRepr> for JointPmf {
    type Error = Error;

    fn try_from(r: JointPmfRepr) -> Result<Self> {
        let axes = r
            .axes
            .into_iter()
            .map(Axis::try_from)
            .collect::<Result<Vec<_>>>()?;
        JointPmf::new(axes, r.probs)
    }
}

pub(crate) fn checked_product(sizes: impl IntoIterator<Item = usize>, what: &str) -> Result<usize> {
    let mut total: u128 = 1;
    for s in sizes {
        total = total.saturating_mul(s as u128);
    }
    if total > MAX_CELLS as u128 {
        return Err(Error::Capacity {
            what: what.to_string(),
            needed: total,
            limit: MAX_CELLS as u128,
        });
    }
    Ok(total as usize)
}

pub(crate) fn validate_probs(probs: &[f64], what: &str) -> Result<()> {
    if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
        return Err(Error::InvalidPmf(format!("{what}: entry {p} is not a probability")));
    }
    Ok(())
}

/// Visit every multi-index of a row-major array with the given shape.
pub(crate) fn for_each_index(sizes: &[usize], mut f: impl FnMut(usize, &[usize])) {
    let total: usize = sizes.iter().product();
    let mut idx = vec![0usize; sizes.len()];
    for flat in 0..total {
        f(flat, &idx);
        for d in (0..sizes.len()).rev() {
            idx[d] += 1;
            if idx[d] < sizes[d] {
                break;
            }
            idx[d] = 0;
        }
    }
}

impl JointPmf {
    pub fn new(axes: Vec<Axis>, probs: Vec<f64>) -> Result<Self> {
        for (i, a) in axes.iter().enumerate() {
            if axes[..i].iter().any(|b| b.name == a.name) {
                return usage(format!("duplicate axis name {:?}", a.name));
            }
        }
        let cells = checked_product(axes.iter().map(Axis::size), "joint pmf")?;
        if probs.len() != cells {
            return Err(Error::InvalidPmf(format!(
                "expected {cells} probabilities, got {}",
                probs.len()
            )));
        }
        validate_probs(&probs, "joint pmf")?;
        let sum = super::kahan_sum(probs.iter().copied());
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidPmf(format!("probabilities sum to {sum}")));
        }
        Ok(Self { axes, probs })
    }

    /// Build a joint by evaluating `f` at every multi-index.
    pub fn from_fn(axes: Vec<Axis>, mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        let sizes: Vec<usize> = axes.iter().map(Axis::size).collect();
        let cells = checked_product(sizes.iter().copied(), "joint pmf")?;
        let mut probs = vec![0.0; cells];
        for_each_index(&sizes, |flat, idx| probs[flat] = f(idx));
        Self::new(axes, probs)
    }

    /// Pmf of a single variable.
    pub fn single(name: impl Into<String>, alphabet: Alphabet, probs: Vec<f64>) -> Result<Self> {
        Self::new(vec![Axis::new(name, alphabet)], probs)
    }

    /// Uniform pmf on `{0,1}` when `p_one = 0.5`; Bernoulli in general.
    pub fn bernoulli(name: impl Into<String>, p_one: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p_one) {
            return usage(format!("Bernoulli parameter {p_one} outside [0,1]"));
        }
        Self::single(name, Alphabet::binary(), vec![1.0 - p_one, p_one])
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.axes.iter().map(Axis::size).collect()
    }

    pub fn has_axis(&self, name: &str) -> bool {
        self.axes.iter().any(|a| a.name == name)
    }

    pub fn axis_index(&self, name: &str) -> Result<usize> {
        self.axes
            .iter()
            .position(|a| a.name == name)
            .ok_or_else(|| Error::Usage(format!("unknown variable {name:?}")))
    }

    pub fn axis(&self, name: &str) -> Result<&Axis> {
        Ok(&self.axes[self.axis_index(name)?])
    }

    pub(crate) fn indices_of(&self, names: &[&str]) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(names.len());
        for n in names {
            let i = self.axis_index(n)?;
            if out.contains(&i) {
                return usage(format!("variable {n:?} listed twice"));
            }
            out.push(i);
        }
        Ok(out)
    }

    /// Probability at a multi-index.
    pub fn prob(&self, idx: &[usize]) -> f64 {
        let mut flat = 0;
        for (a, &i) in self.axes.iter().zip(idx) {
            flat = flat * a.size() + i;
        }
        self.probs[flat]
    }

    /// Calls `f(multi_index, p)` for every cell with positive mass.
    pub fn for_each_support(&self, mut f: impl FnMut(&[usize], f64)) {
        let sizes = self.sizes();
        for_each_index(&sizes, |flat, idx| {
            let p = self.probs[flat];
            if p > 0.0 {
                f(idx, p)
            }
        });
    }

    /// Dense marginal table over the axes at `keep` (in the given order).
    pub(crate) fn marginal_table(&self, keep: &[usize]) -> Vec<f64> {
        let sizes = self.sizes();
        let out_sizes: Vec<usize> = keep.iter().map(|&k| sizes[k]).collect();
        let mut out = vec![0.0; out_sizes.iter().product()];
        for_each_index(&sizes, |flat, idx| {
            let p = self.probs[flat];
            if p == 0.0 {
                return;
            }
            let mut o = 0;
            for (&k, &s) in keep.iter().zip(&out_sizes) {
                o = o * s + idx[k];
            }
            out[o] += p;
        });
        out
    }

    /// Marginal pmf over `names`, axes ordered as given.
    pub fn marginal(&self, names: &[&str]) -> Result<JointPmf> {
        let keep = self.indices_of(names)?;
        let table = self.marginal_table(&keep);
        let axes = keep.iter().map(|&k| self.axes[k].clone()).collect();
        Ok(JointPmf { axes, probs: table })
    }

    /// Entropy in bits of the marginal over a set of axis indices.
    pub(crate) fn entropy_of_indices(&self, idx: &[usize]) -> f64 {
        if idx.is_empty() {
            return 0.0;
        }
        super::entropy_bits(&self.marginal_table(idx))
    }

    /// Append the output axes of `channel`, giving p(existing) p(out | given).
    pub fn extend(&self, channel: &ConditionalPmf) -> Result<JointPmf> {
        let given: Vec<usize> = channel
            .given()
            .iter()
            .map(|a| {
                let i = self.axis_index(&a.name)?;
                if self.axes[i].size() != a.size() {
                    return usage(format!(
                        "channel input {:?} has size {}, joint axis has size {}",
                        a.name,
                        a.size(),
                        self.axes[i].size()
                    ));
                }
                Ok(i)
            })
            .collect::<Result<_>>()?;
        for a in channel.output() {
            if self.has_axis(&a.name) {
                return usage(format!("channel output {:?} already present", a.name));
            }
        }
        let mut axes = self.axes.clone();
        axes.extend(channel.output().iter().cloned());
        let out_size = channel.output_size();
        let sizes = self.sizes();
        let cells = checked_product(sizes.iter().copied().chain([out_size]), "extended joint")?;
        let mut probs = vec![0.0; cells];
        let given_sizes: Vec<usize> = given.iter().map(|&g| sizes[g]).collect();
        for_each_index(&sizes, |flat, idx| {
            let p = self.probs[flat];
            if p == 0.0 {
                return;
            }
            let mut g = 0;
            for (&gi, &gs) in given.iter().zip(&given_sizes) {
                g = g * gs + idx[gi];
            }
            let row = channel.row(g);
            let base = flat * out_size;
            for (o, &q) in row.iter().enumerate() {
                probs[base + o] = p * q;
            }
        });
        Ok(JointPmf { axes, probs })
    }

    /// p(output | given) together with the number of zero-mass conditioning
    /// slices, which are filled with the uniform pmf.
    pub fn conditional(&self, output: &[&str], given: &[&str]) -> Result<(ConditionalPmf, usize)> {
        let out_idx = self.indices_of(output)?;
        let given_idx = self.indices_of(given)?;
        if out_idx.iter().any(|o| given_idx.contains(o)) {
            return usage("output and conditioning variables overlap");
        }
        let keep: Vec<usize> = given_idx.iter().chain(&out_idx).copied().collect();
        let mut table = self.marginal_table(&keep);
        let out_size: usize = out_idx.iter().map(|&o| self.axes[o].size()).product();
        let mut zero_slices = 0;
        for row in table.chunks_mut(out_size) {
            let s = super::kahan_sum(row.iter().copied());
            if s > 0.0 {
                row.iter_mut().for_each(|v| *v /= s);
            } else {
                zero_slices += 1;
                row.iter_mut().for_each(|v| *v = 1.0 / out_size as f64);
            }
        }
        let cond = ConditionalPmf::new(
            given_idx.iter().map(|&g| self.axes[g].clone()).collect(),
            out_idx.iter().map(|&o| self.axes[o].clone()).collect(),
            table,
        )?;
        Ok((cond, zero_slices))
    }

    /// Adds an axis whose value is the tuple of `components` (deterministic).
    pub fn add_tuple_axis(&self, name: &str, components: &[&str]) -> Result<JointPmf> {
        let comp = self.indices_of(components)?;
        let sizes: Vec<usize> = comp.iter().map(|&c| self.axes[c].size()).collect();
        let mut labels = Vec::new();
        for_each_index(&sizes, |_, idx| {
            let parts: Vec<&str> = idx
                .iter()
                .zip(&comp)
                .map(|(&i, &c)| self.axes[c].alphabet.label(i))
                .collect();
            labels.push(parts.join(","));
        });
        let alphabet = Alphabet::with_labels(labels)?;
        let given: Vec<Axis> = comp.iter().map(|&c| self.axes[c].clone()).collect();
        let channel = ConditionalPmf::deterministic(given, vec![Axis::new(name, alphabet)], |idx| {
            let mut o = 0;
            for (&i, &s) in idx.iter().zip(&sizes) {
                o = o * s + i;
            }
            o
        })?;
        self.extend(&channel)
    }

    pub fn rename(mut self, from: &str, to: &str) -> Result<JointPmf> {
        if from != to && self.has_axis(to) {
            return usage(format!("axis {to:?} already exists"));
        }
        let i = self.axis_index(from)?;
        self.axes[i].name = to.to_string();
        Ok(self)
    }

    /// Expectation of `f` over the joint.
    pub fn expectation(&self, mut f: impl FnMut(&[usize]) -> f64) -> f64 {
        let mut acc = super::KahanSum::default();
        self.for_each_support(|idx, p| acc.add(p * f(idx)));
        acc.value()
    }
}
