use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::amplification::{check_amplification, BlockJoint};
use super::pad::{one_time_pad, PadIndex};
use super::{check_enumeration, digits, rng_stream, robust_typical, sample, sequence_count};
use crate::error::{usage, Error, Result};
use crate::prob::{entropy, entropy_bits, kahan_sum, mutual_information, plogp, JointPmf, KahanSum};
use crate::rd::DistTable;
use crate::regions::{AuxChannelSet, Reconstruction};

const CHUNK: usize = 1024;
const MAX_CODEWORDS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SchemeConfig {
    pub n: usize,
    /// Robust typicality parameter.
    pub epsilon: f64,
    /// Slack added to the codebook-size rates; `epsilon` when absent.
    pub rate_slack: Option<f64>,
    pub seed: u64,
    pub trials: usize,
    /// Log-loss reconstructions mix the posterior with the uniform pmf at
    /// this weight.
    pub logloss_perturbation: f64,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        Self { n: 4, epsilon: 0.15, rate_slack: None, seed: 0, trials: 100_000, logloss_perturbation: 1e-3 }
    }
}

impl SchemeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(1..=6).contains(&self.n) {
            return usage(format!("blocklength {} outside [1, 6]", self.n));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return usage("epsilon must be positive");
        }
        if let Some(s) = self.rate_slack {
            if !(s >= 0.0 && s.is_finite()) {
                return usage("rate slack must be nonnegative");
            }
        }
        if self.trials == 0 {
            return usage("trials must be positive");
        }
        if !(self.logloss_perturbation > 0.0 && self.logloss_perturbation < 1.0) {
            return usage("log-loss perturbation must lie in (0, 1)");
        }
        Ok(())
    }
}

/// Index-set sizes: `U` codewords, `V` codewords per `U`, `U` bins, open part
/// of the `V` bin index, and key bins. The `V` bin count is `m1o * mk`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodebookSizes {
    pub l0: usize,
    pub l1: usize,
    pub m0: usize,
    pub m1o: usize,
    pub mk: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub n: usize,
    pub seed: u64,
    pub trials: usize,
    pub sizes: CodebookSizes,
    /// `min{H(Y|U,V,X,Z), I(V;X|U,Y)}`.
    pub key_rate: f64,
    pub scrambling: bool,
    pub empirical_distortion: f64,
    pub distortion_std_error: f64,
    /// Single-letter `E d(X, x_hat(U, V, Y))`.
    pub single_letter_distortion: f64,
    /// Exact `(1/n) I(X^n; M, Z^n)` for the sampled codebook.
    pub exact_leakage_rate: f64,
    /// Same with the key scrambling removed.
    pub leakage_rate_without_key: f64,
    pub encoder_failure_rate: f64,
    pub decoder_error_rate: f64,
    pub list_size_exponent: f64,
    pub list_coverage: f64,
    /// Exact `(1/n) H(X^n | Y^n, M)`.
    pub block_entropy_rate: f64,
    /// `list_size_exponent + (2 + n * (1 - coverage) * log2|X|) / n`.
    pub amplification_bound: f64,
    pub amplification_holds: bool,
    pub warnings: Vec<String>,
}

/// Single-letter tables indexed as documented on each field.
struct Letter {
    nx: usize,
    ny: usize,
    nz: usize,
    nu: usize,
    nv: usize,
    /// `[x*ny + y]`
    p_xy: Vec<f64>,
    /// `[(x*ny + y)*nz + z]`, conditional on `(x, y)`.
    p_z_xy: Vec<f64>,
    p_u: Vec<f64>,
    /// `[u*nv + v]`, conditional on `u`.
    p_v_u: Vec<f64>,
    /// `[(u*nx + x)*ny + y]`
    t_uxy: Vec<f64>,
    /// `[((v*nu + u)*nx + x)*ny + y]`
    t_vuxy: Vec<f64>,
    /// `[u*ny + y]`
    t_uy: Vec<f64>,
    /// `[(v*nu + u)*ny + y]`
    t_vuy: Vec<f64>,
    /// `[((x*ny + y)*nu + u)*nv + v]`
    p_xyuv: Vec<f64>,
}

impl Letter {
    fn new(joint: &JointPmf) -> Result<Self> {
        let m = joint.marginal(&["X", "Y", "Z", "U", "V"])?;
        let s = m.sizes();
        let (nx, ny, nz, nu, nv) = (s[0], s[1], s[2], s[3], s[4]);
        let mut l = Letter {
            nx,
            ny,
            nz,
            nu,
            nv,
            p_xy: vec![0.0; nx * ny],
            p_z_xy: vec![0.0; nx * ny * nz],
            p_u: vec![0.0; nu],
            p_v_u: vec![0.0; nu * nv],
            t_uxy: vec![0.0; nu * nx * ny],
            t_vuxy: vec![0.0; nv * nu * nx * ny],
            t_uy: vec![0.0; nu * ny],
            t_vuy: vec![0.0; nv * nu * ny],
            p_xyuv: vec![0.0; nx * ny * nu * nv],
        };
        m.for_each_support(|i, p| {
            let (x, y, z, u, v) = (i[0], i[1], i[2], i[3], i[4]);
            l.p_xy[x * ny + y] += p;
            l.p_z_xy[(x * ny + y) * nz + z] += p;
            l.p_u[u] += p;
            l.p_v_u[u * nv + v] += p;
            l.t_uxy[(u * nx + x) * ny + y] += p;
            l.t_vuxy[((v * nu + u) * nx + x) * ny + y] += p;
            l.t_uy[u * ny + y] += p;
            l.t_vuy[(v * nu + u) * ny + y] += p;
            l.p_xyuv[((x * ny + y) * nu + u) * nv + v] += p;
        });
        for xy in 0..nx * ny {
            let row = &mut l.p_z_xy[xy * nz..(xy + 1) * nz];
            let t: f64 = row.iter().sum();
            if t > 0.0 {
                row.iter_mut().for_each(|q| *q /= t);
            }
        }
        for u in 0..nu {
            let row = &mut l.p_v_u[u * nv..(u + 1) * nv];
            let t: f64 = row.iter().sum();
            if t > 0.0 {
                row.iter_mut().for_each(|q| *q /= t);
            }
        }
        Ok(l)
    }
}

/// Decoder output rule evaluated per symbol.
enum Rule {
    Table { slots: Vec<(usize, usize)>, table: Vec<usize>, dist: DistTable },
    Posterior { q: Vec<f64> },
}

impl Rule {
    fn new(aux: &AuxChannelSet, l: &Letter, perturbation: f64) -> Result<Self> {
        match aux.reconstruction() {
            Reconstruction::Table { inputs, table, distortion } => {
                let mut slots = Vec::new();
                let mut needed = 1;
                for name in inputs {
                    let (slot, size) = match name.as_str() {
                        "Y" => (0, l.ny),
                        "U" => (1, l.nu),
                        "V" => (2, l.nv),
                        other => return usage(format!("decoder input {other:?} is not observed with the switch open")),
                    };
                    slots.push((slot, size));
                    needed *= size;
                }
                if table.len() != needed {
                    return usage(format!("reconstruction table has {} entries, expected {needed}", table.len()));
                }
                let dist = distortion
                    .table(l.nx)?
                    .ok_or_else(|| Error::Usage("log-loss needs a posterior reconstruction".into()))?;
                if let Some(bad) = table.iter().find(|&&h| h >= dist.nh) {
                    return usage(format!("reconstruction index {bad} out of range"));
                }
                Ok(Rule::Table { slots, table: table.clone(), dist })
            }
            Reconstruction::Posterior => {
                let (nx, ny, nu, nv) = (l.nx, l.ny, l.nu, l.nv);
                let mut q = vec![0.0; ny * nu * nv * nx];
                for y in 0..ny {
                    for u in 0..nu {
                        for v in 0..nv {
                            let at = |x: usize| l.p_xyuv[((x * ny + y) * nu + u) * nv + v];
                            let t: f64 = (0..nx).map(at).sum();
                            for x in 0..nx {
                                let post = if t > 0.0 { at(x) / t } else { 1.0 / nx as f64 };
                                q[((y * nu + u) * nv + v) * nx + x] =
                                    (1.0 - perturbation) * post + perturbation / nx as f64;
                            }
                        }
                    }
                }
                Ok(Rule::Posterior { q })
            }
        }
    }

    fn loss(&self, l: &Letter, x: usize, y: usize, u: usize, v: usize) -> f64 {
        match self {
            Rule::Table { slots, table, dist } => {
                let vals = [y, u, v];
                let k = slots.iter().fold(0, |acc, &(s, size)| acc * size + vals[s]);
                dist.at(x, table[k])
            }
            Rule::Posterior { q } => -q[((y * l.nu + u) * l.nv + v) * l.nx + x].log2(),
        }
    }
}

struct Codebook {
    n: usize,
    eps: f64,
    sizes: CodebookSizes,
    u: Vec<Vec<usize>>,
    v: Vec<Vec<Vec<usize>>>,
    bin_u: Vec<usize>,
    bin_v: Vec<Vec<usize>>,
    key: Vec<usize>,
}

/// Candidate `(l0, l1)` with its encoder probability.
struct Choice {
    l0: usize,
    l1: usize,
    p: f64,
}

impl Codebook {
    fn u_set(&self, l: &Letter, xd: &[usize], yd: &[usize], counts: &mut [u32]) -> (Vec<usize>, bool) {
        let typical: Vec<usize> = (0..self.sizes.l0)
            .filter(|&i| {
                let syms = (0..self.n).map(|t| (self.u[i][t] * l.nx + xd[t]) * l.ny + yd[t]);
                robust_typical(&l.t_uxy, self.eps, syms, counts)
            })
            .collect();
        if typical.is_empty() {
            ((0..self.sizes.l0).collect(), true)
        } else {
            (typical, false)
        }
    }

    fn v_set(&self, l: &Letter, l0: usize, xd: &[usize], yd: &[usize], counts: &mut [u32]) -> (Vec<usize>, bool) {
        let u = &self.u[l0];
        let typical: Vec<usize> = (0..self.sizes.l1)
            .filter(|&j| {
                let v = &self.v[l0][j];
                let syms = (0..self.n).map(|t| ((v[t] * l.nu + u[t]) * l.nx + xd[t]) * l.ny + yd[t]);
                robust_typical(&l.t_vuxy, self.eps, syms, counts)
            })
            .collect();
        if typical.is_empty() {
            ((0..self.sizes.l1).collect(), true)
        } else {
            (typical, false)
        }
    }

    fn encoder(&self, l: &Letter, xd: &[usize], yd: &[usize], counts: &mut [u32]) -> Vec<Choice> {
        let (us, _) = self.u_set(l, xd, yd, counts);
        let pu = 1.0 / us.len() as f64;
        let mut out = Vec::new();
        for &l0 in &us {
            let (vs, _) = self.v_set(l, l0, xd, yd, counts);
            let pv = pu / vs.len() as f64;
            out.extend(vs.into_iter().map(|l1| Choice { l0, l1, p: pv }));
        }
        out
    }

    /// Transmitted index with and without key scrambling.
    fn message(&self, l0: usize, l1: usize, y: usize) -> (usize, usize) {
        let mk = self.sizes.mk;
        let m1 = self.bin_v[l0][l1];
        let (m1s, m1o) = (m1 % mk, m1 / mk);
        let sent = pad(m1s, self.key[y], mk);
        let base = (self.bin_u[l0] * self.sizes.m1o + m1o) * mk;
        (base + sent, base + m1s)
    }

    fn decode(&self, l: &Letter, yd: &[usize], m0: usize, m1: usize, counts: &mut [u32]) -> (usize, usize) {
        let in_bin: Vec<usize> = (0..self.sizes.l0).filter(|&i| self.bin_u[i] == m0).collect();
        let l0 = in_bin
            .iter()
            .copied()
            .find(|&i| robust_typical(&l.t_uy, self.eps, (0..self.n).map(|t| self.u[i][t] * l.ny + yd[t]), counts))
            .or_else(|| in_bin.first().copied())
            .unwrap_or(0);
        let u = &self.u[l0];
        let in_bin: Vec<usize> = (0..self.sizes.l1).filter(|&j| self.bin_v[l0][j] == m1).collect();
        let l1 = in_bin
            .iter()
            .copied()
            .find(|&j| {
                let v = &self.v[l0][j];
                let syms = (0..self.n).map(|t| (v[t] * l.nu + u[t]) * l.ny + yd[t]);
                robust_typical(&l.t_vuy, self.eps, syms, counts)
            })
            .or_else(|| in_bin.first().copied())
            .unwrap_or(0);
        (l0, l1)
    }
}

/// 0-based wrapper over the 1-based pad.
fn pad(m: usize, k: usize, modulus: usize) -> usize {
    let m = PadIndex::new(m as u64 + 1, modulus as u64).expect("index in range");
    let k = PadIndex::new(k as u64 + 1, modulus as u64).expect("index in range");
    one_time_pad(m, k).expect("equal moduli").value() as usize - 1
}

fn unpad(sent: usize, k: usize, modulus: usize) -> usize {
    (sent + 2 * modulus - k - 1) % modulus
}

fn size_for(n: usize, rate: f64, what: &str, warnings: &mut Vec<String>) -> Result<usize> {
    if rate < 1.0 / n as f64 {
        if rate > 0.0 {
            warnings.push(format!("{what} rate {rate:.4} is below 1/n; using a single index"));
        }
        return Ok(1);
    }
    let s = ((n as f64 * rate).exp2() - 1e-9).ceil();
    if s > MAX_CODEWORDS as f64 {
        return Err(Error::Capacity { what: what.into(), needed: s as u128, limit: MAX_CODEWORDS as u128 });
    }
    Ok(s as usize)
}

fn seq_prob(table: &[f64], n: usize, f: impl Fn(usize) -> usize) -> f64 {
    (0..n).map(|t| table[f(t)]).product()
}

/// Builds one codebook for the two-layer scheme with key scrambling,
/// estimates distortion and error rates by Monte Carlo, and computes the
/// exact per-codebook leakage with and without the key.
pub fn simulate_scheme_open(source: &JointPmf, aux: &AuxChannelSet, cfg: &SchemeConfig) -> Result<SimReport> {
    cfg.validate()?;
    let n = cfg.n;
    for name in ["X", "Y", "Z"] {
        let k = source.axis(name)?.size();
        if k > 3 {
            return usage(format!("{name} has {k} symbols; the simulator takes binary or ternary alphabets"));
        }
    }
    let joint = aux.joint(source)?;
    let l = Letter::new(&joint)?;
    let rule = Rule::new(aux, &l, cfg.logloss_perturbation)?;
    let mi = |a: &[&str], b: &[&str], g: &[&str]| -> Result<f64> { Ok(mutual_information(&joint, a, b, g)?.max(0.0)) };

    let delta = cfg.rate_slack.unwrap_or(cfg.epsilon);
    let mut warnings = Vec::new();
    let i_vx_uy = mi(&["V"], &["X"], &["U", "Y"])?;
    let key_rate = i_vx_uy.min(entropy(&joint, &["Y"], &["U", "V", "X", "Z"])?.max(0.0));
    let l0 = size_for(n, mi(&["U"], &["X", "Y"], &[])? + delta, "U codebook", &mut warnings)?;
    let l1 = size_for(n, mi(&["V"], &["X", "Y"], &["U"])? + delta, "V codebook", &mut warnings)?;
    let m0 = size_for(n, mi(&["U"], &["X"], &["Y"])? + 3.0 * delta, "U bin", &mut warnings)?;
    let mk = if key_rate <= 1e-12 {
        warnings.push("key rate is zero; scrambling skipped".into());
        1
    } else {
        size_for(n, key_rate, "key", &mut warnings)?
    };
    let m1o = size_for(n, i_vx_uy + 3.0 * delta - key_rate, "open V bin", &mut warnings)?;
    let sizes = CodebookSizes { l0, l1, m0, m1o, mk };
    let m1 = m1o * mk;
    let messages = m0 * m1;
    if l0.saturating_mul(l1) > MAX_CODEWORDS || messages > MAX_CODEWORDS {
        return Err(Error::Capacity {
            what: "scheme codebook".into(),
            needed: (l0 as u128 * l1 as u128).max(messages as u128),
            limit: MAX_CODEWORDS as u128,
        });
    }

    let count_x = sequence_count(l.nx, n, "X")?;
    let count_y = sequence_count(l.ny, n, "Y")?;
    let count_z = sequence_count(l.nz, n, "Z")?;
    check_enumeration(&[count_x, count_y, l0, l1, n], "scheme encoder enumeration")?;
    check_enumeration(&[count_x, count_z, messages, 2], "scheme leakage table")?;

    let mut rng = rng_stream(cfg.seed, 0);
    let u: Vec<Vec<usize>> = (0..l0).map(|_| (0..n).map(|_| sample(&l.p_u, &mut rng)).collect()).collect();
    let v: Vec<Vec<Vec<usize>>> = u
        .iter()
        .map(|uw| {
            (0..l1)
                .map(|_| uw.iter().map(|&ut| sample(&l.p_v_u[ut * l.nv..(ut + 1) * l.nv], &mut rng)).collect())
                .collect()
        })
        .collect();
    let bin_u: Vec<usize> = (0..l0).map(|_| rng.gen_range(0..m0)).collect();
    let bin_v: Vec<Vec<usize>> = (0..l0).map(|_| (0..l1).map(|_| rng.gen_range(0..m1)).collect()).collect();
    let key: Vec<usize> = (0..count_y).map(|_| rng.gen_range(0..mk)).collect();
    let book = Codebook { n, eps: cfg.epsilon, sizes, u, v, bin_u, bin_v, key };
    let count_cells = l.t_vuxy.len().max(l.t_uxy.len()).max(l.t_uy.len()).max(l.t_vuy.len());

    // Exact enumeration, one X^n sequence per task.
    struct XPart {
        px: f64,
        h_on: f64,
        h_off: f64,
        on: Vec<f64>,
        off: Vec<f64>,
        rows: Vec<(usize, usize, f64)>,
    }
    let parts: Vec<XPart> = (0..count_x)
        .into_par_iter()
        .map(|x| {
            let mut xd = vec![0; n];
            let mut yd = vec![0; n];
            let mut zd = vec![0; n];
            digits(x, l.nx, &mut xd);
            let mut counts = vec![0u32; count_cells];
            let mut on = vec![0.0; count_z * messages];
            let mut off = vec![0.0; count_z * messages];
            let mut rows = Vec::new();
            let mut px = KahanSum::default();
            for y in 0..count_y {
                digits(y, l.ny, &mut yd);
                let pxy = seq_prob(&l.p_xy, n, |t| xd[t] * l.ny + yd[t]);
                if pxy == 0.0 {
                    continue;
                }
                px.add(pxy);
                let pz: Vec<f64> = (0..count_z)
                    .map(|z| {
                        digits(z, l.nz, &mut zd);
                        seq_prob(&l.p_z_xy, n, |t| (xd[t] * l.ny + yd[t]) * l.nz + zd[t])
                    })
                    .collect();
                for c in book.encoder(&l, &xd, &yd, &mut counts) {
                    let (m_on, m_off) = book.message(c.l0, c.l1, y);
                    let w = pxy * c.p;
                    rows.push((y, m_on, w));
                    for (z, &q) in pz.iter().enumerate() {
                        if q > 0.0 {
                            on[z * messages + m_on] += w * q;
                            off[z * messages + m_off] += w * q;
                        }
                    }
                }
            }
            XPart { px: px.value(), h_on: entropy_bits(&on), h_off: entropy_bits(&off), on, off, rows }
        })
        .collect();

    let h_x = kahan_sum(parts.iter().map(|p| plogp(p.px)));
    let h_xmz_on = kahan_sum(parts.iter().map(|p| p.h_on));
    let h_xmz_off = kahan_sum(parts.iter().map(|p| p.h_off));
    let mut mz_on = vec![KahanSum::default(); count_z * messages];
    let mut mz_off = vec![KahanSum::default(); count_z * messages];
    for p in &parts {
        for (i, (&a, &b)) in p.on.iter().zip(&p.off).enumerate() {
            mz_on[i].add(a);
            mz_off[i].add(b);
        }
    }
    let h_mz = |acc: &[KahanSum]| kahan_sum(acc.iter().map(|k| plogp(k.value())));
    let leak = |h_mz: f64, h_xmz: f64| ((h_x + h_mz - h_xmz) / n as f64).max(0.0);
    let exact_leakage_rate = leak(h_mz(&mz_on), h_xmz_on);
    let leakage_rate_without_key = leak(h_mz(&mz_off), h_xmz_off);

    let mut block: BTreeMap<(usize, usize), BTreeMap<usize, f64>> = BTreeMap::new();
    for (x, p) in parts.iter().enumerate() {
        for &(y, m, w) in &p.rows {
            *block.entry((y, m)).or_default().entry(x).or_insert(0.0) += w;
        }
    }
    drop(parts);
    let rows: Vec<Vec<(usize, f64)>> = block.into_values().map(|r| r.into_iter().collect()).collect();
    let amp = check_amplification(&BlockJoint::new(n, l.nx, rows)?, cfg.epsilon);

    // Monte Carlo: trial t draws from stream t + 1.
    let chunks = cfg.trials.div_ceil(CHUNK);
    let stats: Vec<[f64; 4]> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut sum = KahanSum::default();
            let mut sq = KahanSum::default();
            let (mut fails, mut errors) = (0.0, 0.0);
            let mut xd = vec![0; n];
            let mut yd = vec![0; n];
            let mut counts = vec![0u32; count_cells];
            for t in c * CHUNK..((c + 1) * CHUNK).min(cfg.trials) {
                let mut rng = rng_stream(cfg.seed, t as u64 + 1);
                let mut y = 0;
                for i in 0..n {
                    let s = sample(&l.p_xy, &mut rng);
                    xd[i] = s / l.ny;
                    yd[i] = s % l.ny;
                    y = y * l.ny + yd[i];
                }
                let (us, fu) = book.u_set(&l, &xd, &yd, &mut counts);
                let l0 = us[rng.gen_range(0..us.len())];
                let (vs, fv) = book.v_set(&l, l0, &xd, &yd, &mut counts);
                let l1 = vs[rng.gen_range(0..vs.len())];
                if fu || fv {
                    fails += 1.0;
                }
                let (sent, _) = book.message(l0, l1, y);
                let mk = book.sizes.mk;
                let m1s = unpad(sent % mk, book.key[y], mk);
                let open = sent / mk;
                let m1 = (open % book.sizes.m1o) * mk + m1s;
                let m0 = open / book.sizes.m1o;
                let (h0, h1) = book.decode(&l, &yd, m0, m1, &mut counts);
                if (h0, h1) != (l0, l1) {
                    errors += 1.0;
                }
                let d = (0..n).map(|i| rule.loss(&l, xd[i], yd[i], book.u[h0][i], book.v[h0][h1][i])).sum::<f64>()
                    / n as f64;
                sum.add(d);
                sq.add(d * d);
            }
            [sum.value(), sq.value(), fails, errors]
        })
        .collect();
    let trials = cfg.trials as f64;
    let mean = kahan_sum(stats.iter().map(|s| s[0])) / trials;
    let second = kahan_sum(stats.iter().map(|s| s[1])) / trials;
    let var = if cfg.trials > 1 { ((second - mean * mean) * trials / (trials - 1.0)).max(0.0) } else { 0.0 };

    let mut single = KahanSum::default();
    for x in 0..l.nx {
        for y in 0..l.ny {
            for uu in 0..l.nu {
                for vv in 0..l.nv {
                    let p = l.p_xyuv[((x * l.ny + y) * l.nu + uu) * l.nv + vv];
                    if p > 0.0 {
                        single.add(p * rule.loss(&l, x, y, uu, vv));
                    }
                }
            }
        }
    }

    Ok(SimReport {
        n,
        seed: cfg.seed,
        trials: cfg.trials,
        sizes,
        key_rate,
        scrambling: mk > 1,
        empirical_distortion: mean,
        distortion_std_error: (var / trials).sqrt(),
        single_letter_distortion: single.value(),
        exact_leakage_rate,
        leakage_rate_without_key,
        encoder_failure_rate: kahan_sum(stats.iter().map(|s| s[2])) / trials,
        decoder_error_rate: kahan_sum(stats.iter().map(|s| s[3])) / trials,
        list_size_exponent: amp.list.exponent,
        list_coverage: amp.list.coverage,
        block_entropy_rate: amp.block_entropy_rate,
        amplification_bound: amp.bound,
        amplification_holds: amp.holds,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::{Alphabet, Axis, ConditionalPmf};
    use crate::rd::DistortionSpec;
    use crate::sources::erased_y;
    use approx::assert_abs_diff_eq;

    #[test]
    fn pad_roundtrip() {
        for k in 0..5 {
            for m in 0..5 {
                assert_eq!(unpad(pad(m, k, 5), k, 5), m);
            }
        }
    }

    #[test]
    fn degenerate_auxiliaries() {
        let s = erased_y(0.5, 0.8, 0.5).unwrap();
        let rec = Reconstruction::Table { inputs: vec![], table: vec![0], distortion: DistortionSpec::Hamming };
        let aux = AuxChannelSet::trivial(&s, rec).unwrap();
        let cfg = SchemeConfig { n: 3, trials: 2000, seed: 5, ..Default::default() };
        let r = simulate_scheme_open(&s, &aux, &cfg).unwrap();
        let i_xz = mutual_information(&s, &["X"], &["Z"], &[]).unwrap();
        assert_abs_diff_eq!(r.exact_leakage_rate, i_xz, epsilon = 1e-9);
        assert_abs_diff_eq!(r.leakage_rate_without_key, i_xz, epsilon = 1e-9);
        assert_abs_diff_eq!(r.single_letter_distortion, 0.5, epsilon = 1e-12);
        assert!((r.empirical_distortion - 0.5).abs() < 4.0 * r.distortion_std_error + 1e-12);
        assert!(r.amplification_holds);
    }

    #[test]
    fn deterministic_and_bounded() {
        let s = erased_y(0.5, 0.8, 0.5).unwrap();
        let x = s.axis("X").unwrap().clone();
        let v = ConditionalPmf::deterministic(vec![x], vec![Axis::new("V", Alphabet::binary())], |g| g[0]).unwrap();
        let rec = Reconstruction::Table { inputs: vec!["V".into()], table: vec![0, 1], distortion: DistortionSpec::Hamming };
        let aux = AuxChannelSet::with_v(&s, &v, rec).unwrap();
        let cfg = SchemeConfig { n: 3, trials: 3000, seed: 9, ..Default::default() };
        let a = simulate_scheme_open(&s, &aux, &cfg).unwrap();
        let b = simulate_scheme_open(&s, &aux, &cfg).unwrap();
        assert_eq!(a, b);
        for r in [a.exact_leakage_rate, a.leakage_rate_without_key, a.block_entropy_rate] {
            assert!((0.0..=1.0 + 1e-9).contains(&r));
        }
        assert!((0.0..=1.0).contains(&a.encoder_failure_rate));
        assert!((0.0..=1.0).contains(&a.decoder_error_rate));
        assert!(a.amplification_holds);
    }

    #[test]
    fn rejects_bad_config() {
        let s = erased_y(0.5, 0.8, 0.5).unwrap();
        let aux = AuxChannelSet::trivial(&s, Reconstruction::Posterior).unwrap();
        let cfg = SchemeConfig { n: 7, ..Default::default() };
        assert!(simulate_scheme_open(&s, &aux, &cfg).is_err());
        let rec = Reconstruction::Table { inputs: vec!["Z".into()], table: vec![0, 1, 0], distortion: DistortionSpec::Hamming };
        let aux = AuxChannelSet::trivial(&s, rec).unwrap();
        assert!(simulate_scheme_open(&s, &aux, &SchemeConfig { n: 2, trials: 10, ..Default::default() }).is_err());
    }
}
