//! Rate-distortion functions with side information: conditional
//! Blahut-Arimoto for the informed-encoder case, multi-start alternating
//! minimization for Wyner-Ziv, closed forms, and the helper auxiliary search.

mod ba;
mod helper;
mod wz;

pub use ba::{rd_si_enc, solve_si_enc, SiEncSolution};
pub use helper::{helper_aux_optimize, HelperAux};
pub use wz::{rd_wyner_ziv, Decoder, WzSolution};

use serde::{Deserialize, Serialize};

use crate::error::{usage, Error, Result};
use crate::prob::{self, JointPmf};

/// Per-symbol distortion measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DistortionSpec {
    Hamming,
    /// `matrix[x][x_hat]`.
    Matrix { matrix: Vec<Vec<f64>> },
    /// Reconstruction is a pmf over X, loss `log2 1/x_hat(x)`.
    LogLoss,
}

/// Dense distortion table, row-major `d[x * n_hat + x_hat]`.
#[derive(Debug, Clone)]
pub(crate) struct DistTable {
    pub nx: usize,
    pub nh: usize,
    pub d: Vec<f64>,
}

impl DistTable {
    #[inline]
    pub fn at(&self, x: usize, xh: usize) -> f64 {
        self.d[x * self.nh + xh]
    }
}

impl DistortionSpec {
    pub fn is_log_loss(&self) -> bool {
        matches!(self, DistortionSpec::LogLoss)
    }

    /// Dense table for a source alphabet of size `nx`; `None` for log-loss.
    pub(crate) fn table(&self, nx: usize) -> Result<Option<DistTable>> {
        match self {
            DistortionSpec::LogLoss => Ok(None),
            DistortionSpec::Hamming => Ok(Some(DistTable {
                nx,
                nh: nx,
                d: (0..nx * nx).map(|i| if i / nx == i % nx { 0.0 } else { 1.0 }).collect(),
            })),
            DistortionSpec::Matrix { matrix } => {
                if matrix.len() != nx {
                    return usage(format!("distortion matrix has {} rows, source has {nx} symbols", matrix.len()));
                }
                let nh = matrix.first().map_or(0, Vec::len);
                if nh == 0 || matrix.iter().any(|r| r.len() != nh) {
                    return usage("distortion matrix rows must be nonempty and equal length");
                }
                if matrix.iter().flatten().any(|v| !v.is_finite() || *v < 0.0) {
                    return usage("distortion entries must be finite and nonnegative");
                }
                Ok(Some(DistTable {
                    nx,
                    nh,
                    d: matrix.iter().flatten().copied().collect(),
                }))
            }
        }
    }
}

/// Solver knobs shared by every optimizer in this module.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RdSolverConfig {
    pub max_iterations: usize,
    /// Stopping threshold for the inner iterations (duality gap for
    /// Blahut-Arimoto, objective change for alternating minimization).
    pub convergence_tol: f64,
    /// Accepted mismatch between achieved and requested distortion before
    /// time-sharing closes the gap.
    pub distortion_tol: f64,
    pub restarts: usize,
    pub rng_seed: u64,
    /// Largest rate gap at which two rate-distortion functions count as equal.
    pub equality_tol: f64,
}

impl Default for RdSolverConfig {
    fn default() -> Self {
        Self {
            max_iterations: 20_000,
            convergence_tol: 1e-12,
            distortion_tol: 1e-6,
            restarts: 32,
            rng_seed: 0,
            equality_tol: 1e-3,
        }
    }
}

impl RdSolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return usage("max_iterations must be at least 1");
        }
        if !(self.convergence_tol > 0.0) || !(self.distortion_tol > 0.0) || !(self.equality_tol > 0.0) {
            return usage("solver tolerances must be positive");
        }
        if self.restarts == 0 {
            return usage("restarts must be at least 1");
        }
        Ok(())
    }
}

/// A source `X` with side information `S` (possibly a tuple of variables,
/// possibly empty), flattened into dense tables.
#[derive(Debug, Clone)]
pub struct RdSource {
    pmf: JointPmf,
    x: String,
    si: Vec<String>,
    pub(crate) nx: usize,
    pub(crate) ns: usize,
    /// p(s)
    pub(crate) ps: Vec<f64>,
    /// p(x|s), row-major `[s * nx + x]`
    pub(crate) px_s: Vec<f64>,
    /// p(x)
    pub(crate) px: Vec<f64>,
    /// p(s|x), row-major `[x * ns + s]`
    pub(crate) ps_x: Vec<f64>,
}

impl RdSource {
    pub fn new(pmf: &JointPmf, x: &str, si: &[&str]) -> Result<Self> {
        if si.contains(&x) {
            return usage("source variable also listed as side information");
        }
        let names: Vec<&str> = std::iter::once(x).chain(si.iter().copied()).collect();
        let m = pmf.marginal(&names)?;
        let nx = m.axes()[0].size();
        let ns = m.probs().len() / nx;
        let mut ps = vec![0.0; ns];
        let mut px = vec![0.0; nx];
        for (xi, row) in m.probs().chunks(ns).enumerate() {
            for (s, &p) in row.iter().enumerate() {
                ps[s] += p;
                px[xi] += p;
            }
        }
        let mut px_s = vec![0.0; ns * nx];
        let mut ps_x = vec![0.0; nx * ns];
        for xi in 0..nx {
            for s in 0..ns {
                let p = m.probs()[xi * ns + s];
                px_s[s * nx + xi] = if ps[s] > 0.0 { p / ps[s] } else { 0.0 };
                ps_x[xi * ns + s] = if px[xi] > 0.0 { p / px[xi] } else { 0.0 };
            }
        }
        Ok(Self {
            pmf: m,
            x: x.to_string(),
            si: si.iter().map(|s| s.to_string()).collect(),
            nx,
            ns,
            ps,
            px_s,
            px,
            ps_x,
        })
    }

    /// Marginal pmf over `(X, S...)` in that axis order.
    pub fn pmf(&self) -> &JointPmf {
        &self.pmf
    }

    pub fn x_name(&self) -> &str {
        &self.x
    }

    pub fn si_names(&self) -> Vec<&str> {
        self.si.iter().map(String::as_str).collect()
    }

    pub fn x_size(&self) -> usize {
        self.nx
    }

    pub fn si_size(&self) -> usize {
        self.ns
    }

    /// H(X | S) in bits.
    pub fn conditional_entropy(&self) -> f64 {
        let mut acc = prob::KahanSum::default();
        for s in 0..self.ns {
            acc.add(self.ps[s] * prob::entropy_bits(&self.px_s[s * self.nx..(s + 1) * self.nx]));
        }
        acc.value()
    }

    /// Smallest achievable expected distortion: every symbol reconstructed
    /// by its individually best reproduction.
    pub(crate) fn d_min(&self, t: &DistTable) -> f64 {
        let mut acc = prob::KahanSum::default();
        for x in 0..self.nx {
            let m = (0..t.nh).map(|h| t.at(x, h)).fold(f64::INFINITY, f64::min);
            acc.add(self.px[x] * m);
        }
        acc.value()
    }

    /// Distortion of the best reconstruction that depends on the side
    /// information only, with the minimizing reproduction per slice.
    pub(crate) fn d_max(&self, t: &DistTable) -> (f64, Vec<usize>) {
        let mut acc = prob::KahanSum::default();
        let mut best = Vec::with_capacity(self.ns);
        for s in 0..self.ns {
            let (h, v) = best_reproduction(t, &self.px_s[s * self.nx..(s + 1) * self.nx]);
            best.push(h);
            acc.add(self.ps[s] * v);
        }
        (acc.value(), best)
    }

    pub(crate) fn check_dist(&self, t: &DistTable) -> Result<()> {
        if t.nx != self.nx {
            return usage("distortion table does not match the source alphabet");
        }
        Ok(())
    }
}

/// Reproduction minimizing `sum_x w[x] d(x, .)`, lowest index on ties.
pub(crate) fn best_reproduction(t: &DistTable, w: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for h in 0..t.nh {
        let v: f64 = w.iter().enumerate().map(|(x, &p)| p * t.at(x, h)).sum();
        if v < best.1 {
            best = (h, v);
        }
    }
    best
}

fn check_distortion(d: f64) -> Result<()> {
    if !d.is_finite() || d < 0.0 {
        return usage(format!("distortion {d} must be finite and nonnegative"));
    }
    Ok(())
}

/// Rate-distortion function under log-loss with side information at both
/// ends: `[H(X|S) - D]+`.
pub fn rd_logloss(source: &RdSource, d: f64) -> Result<f64> {
    check_distortion(d)?;
    Ok((source.conditional_entropy() - d).max(0.0))
}

/// Result of [`rd_erased_hamming`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErasedRate {
    pub rate: f64,
    /// Set when `D > p_e`, where the rate is clamped to zero.
    pub saturated: bool,
}

/// Hamming rate-distortion function with erased side information:
/// `p_e R_X(D / p_e)` where `R_X` is the ordinary rate-distortion function of
/// the source.
pub fn rd_erased_hamming(p_source: &JointPmf, p_e: f64, d: f64) -> Result<ErasedRate> {
    if !(0.0..=1.0).contains(&p_e) {
        return usage(format!("erasure probability {p_e} outside [0,1]"));
    }
    check_distortion(d)?;
    if p_source.axes().len() != 1 {
        return usage("erased-Hamming rate expects a pmf over a single variable");
    }
    if d > p_e || p_e == 0.0 {
        return Ok(ErasedRate {
            rate: 0.0,
            saturated: d > p_e,
        });
    }
    let x = p_source.axes()[0].name.clone();
    let src = RdSource::new(p_source, &x, &[])?;
    let cfg = RdSolverConfig::default();
    let r = rd_si_enc(&src, &DistortionSpec::Hamming, d / p_e, &cfg)?;
    Ok(ErasedRate {
        rate: p_e * r,
        saturated: false,
    })
}

/// One grid point of an equality check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SiEqualityPoint {
    pub distortion: f64,
    pub r_wz: f64,
    pub r_si_enc: f64,
    pub gap: f64,
    /// Achieving Wyner-Ziv test channel and decoder.
    pub v_star: WzSolution,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SiEqualityReport {
    pub distortion_grid: Vec<f64>,
    pub r_wz: Vec<f64>,
    pub r_si_enc: Vec<f64>,
    pub max_gap: f64,
    pub tolerance: f64,
    pub verdict: bool,
    pub points: Vec<SiEqualityPoint>,
}

/// Compares the Wyner-Ziv and informed-encoder rate-distortion functions on
/// a distortion grid. The Wyner-Ziv values are upper bounds from a
/// non-convex search, so a `true` verdict certifies equality up to
/// `cfg.equality_tol` only.
pub fn check_si_equality(
    source: &RdSource,
    dist: &DistortionSpec,
    grid: &[f64],
    cfg: &RdSolverConfig,
) -> Result<SiEqualityReport> {
    if grid.is_empty() {
        return usage("distortion grid is empty");
    }
    let mut points = Vec::with_capacity(grid.len());
    for &d in grid {
        let r_si_enc = rd_si_enc(source, dist, d, cfg)?;
        let v_star = rd_wyner_ziv(source, dist, d, cfg)?;
        points.push(SiEqualityPoint {
            distortion: d,
            r_wz: v_star.rate,
            r_si_enc,
            gap: v_star.rate - r_si_enc,
            v_star,
        });
    }
    let max_gap = points.iter().map(|p| p.gap).fold(f64::NEG_INFINITY, f64::max);
    Ok(SiEqualityReport {
        distortion_grid: grid.to_vec(),
        r_wz: points.iter().map(|p| p.r_wz).collect(),
        r_si_enc: points.iter().map(|p| p.r_si_enc).collect(),
        max_gap,
        tolerance: cfg.equality_tol,
        verdict: max_gap <= cfg.equality_tol,
        points,
    })
}

pub(crate) fn infeasible(requested: f64, minimum: f64) -> Error {
    Error::Infeasible { requested, minimum }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::make_erasure_source;
    use approx::assert_abs_diff_eq;

    fn erased(p_e: f64) -> RdSource {
        let j = make_erasure_source(&JointPmf::bernoulli("X", 0.5).unwrap(), p_e).unwrap();
        RdSource::new(&j, "X", &["Y"]).unwrap()
    }

    #[test]
    fn logloss_closed_form() {
        let s = erased(0.8);
        assert_abs_diff_eq!(rd_logloss(&s, 0.0).unwrap(), 0.8, epsilon = 1e-12);
        assert_abs_diff_eq!(rd_logloss(&s, 0.3).unwrap(), 0.5, epsilon = 1e-12);
        assert_eq!(rd_logloss(&s, 0.9).unwrap(), 0.0);
        assert!(rd_logloss(&s, -0.1).is_err());
    }

    #[test]
    fn erased_hamming_values() {
        let b = JointPmf::bernoulli("X", 0.5).unwrap();
        let r = rd_erased_hamming(&b, 0.8, 0.0).unwrap();
        assert_abs_diff_eq!(r.rate, 0.8, epsilon = 1e-9);
        assert_eq!(rd_erased_hamming(&b, 0.8, 0.4).unwrap().rate, 0.0);
        let want = 0.8 * (1.0 - prob::binary_entropy(0.25).unwrap());
        assert_abs_diff_eq!(rd_erased_hamming(&b, 0.8, 0.2).unwrap().rate, want, epsilon = 1e-9);
        assert_abs_diff_eq!(want, 0.150978, epsilon = 1e-6);
        let sat = rd_erased_hamming(&b, 0.3, 0.5).unwrap();
        assert!(sat.saturated && sat.rate == 0.0);
    }

    #[test]
    fn source_tables() {
        let s = erased(0.8);
        assert_eq!((s.nx, s.ns), (2, 3));
        assert_abs_diff_eq!(s.conditional_entropy(), 0.8, epsilon = 1e-12);
        let t = DistortionSpec::Hamming.table(2).unwrap().unwrap();
        assert_eq!(s.d_min(&t), 0.0);
        assert_abs_diff_eq!(s.d_max(&t).0, 0.4, epsilon = 1e-12);
    }

    #[test]
    fn matrix_validation() {
        let bad = DistortionSpec::Matrix { matrix: vec![vec![0.0, 1.0], vec![1.0]] };
        assert!(bad.table(2).is_err());
        let neg = DistortionSpec::Matrix { matrix: vec![vec![0.0, -1.0], vec![1.0, 0.0]] };
        assert!(neg.table(2).is_err());
        assert!(DistortionSpec::LogLoss.table(2).unwrap().is_none());
    }

    #[test]
    fn spec_json_shape() {
        let s: DistortionSpec = serde_json::from_str(r#"{"kind":"log-loss"}"#).unwrap();
        assert!(s.is_log_loss());
        let m: DistortionSpec = serde_json::from_str(r#"{"kind":"matrix","matrix":[[0,1],[1,0]]}"#).unwrap();
        assert!(matches!(m, DistortionSpec::Matrix { .. }));
    }
}
