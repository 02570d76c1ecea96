use serde::{Deserialize, Serialize};

use super::alphabet::{Axis, AxisRepr};
use super::joint::{checked_product, for_each_index, validate_probs, SUM_TOL};
use crate::error::{usage, Error, Result};

/// Stochastic map p(output | given). Rows are indexed by the row-major flat
/// index of the given axes; each row is a pmf over the flat output index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ConditionalRepr", into = "ConditionalRepr")]
pub struct ConditionalPmf {
    given: Vec<Axis>,
    output: Vec<Axis>,
    probs: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct ConditionalRepr {
    given: Vec<AxisRepr>,
    output: Vec<AxisRepr>,
    probs: Vec<f64>,
}

impl From<ConditionalPmf> for ConditionalRepr {
    fn from(c: ConditionalPmf) -> Self {
        Self {
            given: c.given.iter().map(AxisRepr::from).collect(),
            output: c.output.iter().map(AxisRepr::from).collect(),
            probs: c.probs,
        }
    }
}

impl TryFrom<ConditionalRepr> for ConditionalPmf {
    type Error = Error;

    fn try_from(r: ConditionalRepr) -> Result<Self> {
        let given = r.given.into_iter().map(Axis::try_from).collect::<Result<_>>()?;
        let output = r.output.into_iter().map(Axis::try_from).collect::<Result<_>>()?;
        ConditionalPmf::new(given, output, r.probs)
    }
}

impl ConditionalPmf {
    pub fn new(given: Vec<Axis>, output: Vec<Axis>, probs: Vec<f64>) -> Result<Self> {
        if output.is_empty() {
            return usage("conditional pmf needs at least one output axis");
        }
        let all: Vec<&Axis> = given.iter().chain(&output).collect();
        for (i, a) in all.iter().enumerate() {
            if all[..i].iter().any(|b| b.name == a.name) {
                return usage(format!("duplicate axis name {:?}", a.name));
            }
        }
        let cells = checked_product(all.iter().map(|a| a.size()), "conditional pmf")?;
        if probs.len() != cells {
            return Err(Error::InvalidPmf(format!(
                "expected {cells} conditional probabilities, got {}",
                probs.len()
            )));
        }
        validate_probs(&probs, "conditional pmf")?;
        let out_size: usize = output.iter().map(Axis::size).product();
        for (g, row) in probs.chunks(out_size).enumerate() {
            let s = super::kahan_sum(row.iter().copied());
            if (s - 1.0).abs() > SUM_TOL {
                return Err(Error::InvalidPmf(format!(
                    "conditioning slice {g} sums to {s}"
                )));
            }
        }
        Ok(Self {
            given,
            output,
            probs,
        })
    }

    /// Build from `f(given_index, output_index)`.
    pub fn from_fn(
        given: Vec<Axis>,
        output: Vec<Axis>,
        mut f: impl FnMut(&[usize], &[usize]) -> f64,
    ) -> Result<Self> {
        let gs: Vec<usize> = given.iter().map(Axis::size).collect();
        let os: Vec<usize> = output.iter().map(Axis::size).collect();
        let gsize = checked_product(gs.iter().copied(), "conditional pmf")?;
        let osize = checked_product(os.iter().copied(), "conditional pmf")?;
        let mut probs = vec![0.0; gsize * osize];
        for_each_index(&gs, |g, gi| {
            for_each_index(&os, |o, oi| probs[g * osize + o] = f(gi, oi));
        });
        Self::new(given, output, probs)
    }

    /// Deterministic map: `f` returns the flat output index.
    pub fn deterministic(
        given: Vec<Axis>,
        output: Vec<Axis>,
        mut f: impl FnMut(&[usize]) -> usize,
    ) -> Result<Self> {
        let gs: Vec<usize> = given.iter().map(Axis::size).collect();
        let osize: usize = output.iter().map(Axis::size).product();
        let gsize: usize = checked_product(gs.iter().copied(), "conditional pmf")?;
        let mut probs = vec![0.0; gsize * osize];
        let mut bad = None;
        for_each_index(&gs, |g, gi| {
            let o = f(gi);
            if o >= osize {
                bad = Some(o);
            } else {
                probs[g * osize + o] = 1.0;
            }
        });
        if let Some(o) = bad {
            return usage(format!("deterministic map produced index {o} out of range"));
        }
        Self::new(given, output, probs)
    }

    pub fn given(&self) -> &[Axis] {
        &self.given
    }

    pub fn output(&self) -> &[Axis] {
        &self.output
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn given_size(&self) -> usize {
        self.given.iter().map(Axis::size).product()
    }

    pub fn output_size(&self) -> usize {
        self.output.iter().map(Axis::size).product()
    }

    pub fn row(&self, given_flat: usize) -> &[f64] {
        let o = self.output_size();
        &self.probs[given_flat * o..(given_flat + 1) * o]
    }

    pub fn given_names(&self) -> Vec<&str> {
        self.given.iter().map(|a| a.name.as_str()).collect()
    }

    pub fn output_names(&self) -> Vec<&str> {
        self.output.iter().map(|a| a.name.as_str()).collect()
    }
}
