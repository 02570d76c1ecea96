use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{usage, Result};
use crate::prob::JointPmf;
use crate::rd::{DistortionSpec, RdSolverConfig};
use crate::regions::{AuxChannelSet, CorollaryCase, CorollaryParams, GaussianChainParams};
use crate::sim::SchemeConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Region,
    Sweep,
    Simulate,
    VerifyLemma,
    Gaussian,
    Reproduce,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Region => "region",
            CommandKind::Sweep => "sweep",
            CommandKind::Simulate => "simulate",
            CommandKind::VerifyLemma => "verify-lemma",
            CommandKind::Gaussian => "gaussian",
            CommandKind::Reproduce => "reproduce",
        }
    }
}

/// Explicit values or `count` evenly spaced points from `start` to `stop`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    Values(Vec<f64>),
    Range { start: f64, stop: f64, count: usize },
}

impl Grid {
    /// Expands and checks the grid is nonempty, finite and strictly increasing.
    pub fn points(&self, what: &str) -> Result<Vec<f64>> {
        let pts = match self {
            Grid::Values(v) => v.clone(),
            Grid::Range { start, stop, count } => match count {
                0 => Vec::new(),
                1 => vec![*start],
                _ => (0..*count).map(|i| start + (stop - start) * i as f64 / (*count - 1) as f64).collect(),
            },
        };
        if pts.is_empty() {
            return usage(format!("{what} grid is empty"));
        }
        if pts.iter().any(|v| !v.is_finite() && *v != f64::INFINITY) {
            return usage(format!("{what} grid has a non-finite value"));
        }
        if pts.windows(2).any(|w| !(w[1] > w[0])) {
            return usage(format!("{what} grid must be strictly increasing"));
        }
        Ok(pts)
    }
}

/// Exactly one way of describing the source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum SourceSpec {
    /// Inline joint pmf with axes `X`, `Y`, `Z` (and `W` for the helper).
    Pmf(JointPmf),
    /// A binary erasure example.
    Erasure { case: CorollaryCase, params: CorollaryParams },
    Gaussian(GaussianChainParams),
}

/// Which region an inline pmf is evaluated under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Setting {
    OpenMarkov,
    Closed,
    HelperDegraded,
    HelperLogloss,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Figure {
    Fig3,
    Fig4,
}

fn default_epsilon() -> f64 {
    0.15
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum LemmaSpec {
    /// Binning of i.i.d. sequences; one row per (seed, key rate).
    Binning {
        n: usize,
        r_k: Grid,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seeds: Option<Vec<u64>>,
        source: JointPmf,
    },
    /// Binning of codewords.
    Codeword {
        n: usize,
        r_tilde: f64,
        r_k: f64,
        source: JointPmf,
        #[serde(default = "default_epsilon")]
        epsilon: f64,
    },
    /// Exhaustive one-time-pad bijection and uniformity check.
    Pad { modulus: u64 },
}

/// One JSON run description. Which fields are needed depends on the command.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<CommandKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<SourceSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub setting: Option<Setting>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distortion: Option<DistortionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<Grid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rh: Option<Grid>,
    #[serde(default)]
    pub solver: RdSolverConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aux: Option<AuxChannelSet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scheme: Option<SchemeConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lemma: Option<LemmaSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub figure: Option<Figure>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| crate::Error::Usage(format!("config: {e}")))
    }
}
