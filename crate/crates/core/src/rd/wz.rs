use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Dirichlet, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{best_reproduction, check_distortion, infeasible, DistTable, DistortionSpec, RdSolverConfig, RdSource};
use crate::error::Result;
use crate::prob::{Alphabet, Axis, ConditionalPmf, KahanSum};

/// How the decoder maps `(V, S)` to a reconstruction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Decoder {
    /// `table[v * ns + s]` is the reproduction index.
    Table { table: Vec<usize> },
    /// Log-loss: the reconstruction is the posterior `p(x | v, s)`.
    Posterior,
}

/// Wyner-Ziv test channel `p(v|x)` with its decoder. The rate is an upper
/// bound on the true Wyner-Ziv function.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WzSolution {
    pub rate: f64,
    pub distortion: f64,
    pub nx: usize,
    pub ns: usize,
    pub nv: usize,
    /// `p(v|x)` as `[x][v]`.
    pub channel: Vec<f64>,
    pub decoder: Decoder,
    /// Time-shared rate reached by each restart, in restart order.
    pub restart_values: Vec<f64>,
    /// Running minimum of `restart_values`.
    pub best_so_far: Vec<f64>,
}

impl WzSolution {
    /// `p(v | x)` as a conditional pmf given the source axis, output `V`.
    pub fn channel_pmf(&self, source: &RdSource) -> Result<ConditionalPmf> {
        let x = source.pmf().axes()[0].clone();
        let v = Axis::new("V", Alphabet::new(self.nv)?);
        ConditionalPmf::new(vec![x], vec![v], self.channel.clone())
    }
}

/// Wyner-Ziv rate-distortion function (decoder-only side information),
/// `min I(X;V|S)` over `p(v|x)` and `x_hat(v, s)` with `|V| = |X| + 1`.
///
/// Each restart draws a Dirichlet(1) initial channel, bisects the slope and
/// time-shares the two bracketing solutions. Restarts run in parallel on
/// independent `(seed, restart)` streams, so the result does not depend on
/// scheduling.
pub fn rd_wyner_ziv(source: &RdSource, dist: &DistortionSpec, d: f64, cfg: &RdSolverConfig) -> Result<WzSolution> {
    cfg.validate()?;
    check_distortion(d)?;
    let Some(t) = dist.table(source.nx)? else {
        return Ok(logloss_solution(source, d));
    };
    source.check_dist(&t)?;
    let am = Am { src: source, t: &t, cfg, nv: source.nx + 1 };
    let d_min = source.d_min(&t);
    let (d_max, best) = source.d_max(&t);
    if d < d_min - 1e-12 {
        return Err(infeasible(d, d_min));
    }
    if d >= d_max {
        let sol = am.constant(&best);
        return Ok(am.finish(sol, vec![0.0]));
    }
    if d <= d_min + 1e-12 {
        let sol = am.identity();
        let r = sol.rate;
        return Ok(am.finish(sol, vec![r]));
    }
    let runs: Vec<State> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| am.restart(r as u64, d, &best))
        .collect();
    let values: Vec<f64> = runs.iter().map(|s| s.rate).collect();
    // Lowest rate wins; ties go to the earliest restart.
    let mut pick = 0;
    for (i, s) in runs.iter().enumerate() {
        if s.rate < runs[pick].rate {
            pick = i;
        }
    }
    let winner = runs.into_iter().nth(pick).expect("at least one restart");
    Ok(am.finish(winner, values))
}

fn logloss_solution(source: &RdSource, d: f64) -> WzSolution {
    // V = X with probability 1 - a, erased otherwise; the posterior decoder
    // then pays a H(X|S) and the rate is (1 - a) H(X|S).
    let h = source.conditional_entropy();
    let a = if h > 0.0 { (d / h).min(1.0) } else { 1.0 };
    let (nx, nv) = (source.nx, source.nx + 1);
    let mut channel = vec![0.0; nx * nv];
    for x in 0..nx {
        channel[x * nv + x] = 1.0 - a;
        channel[x * nv + nx] = a;
    }
    let rate = (1.0 - a) * h;
    WzSolution {
        rate,
        distortion: a * h,
        nx,
        ns: source.ns,
        nv,
        channel,
        decoder: Decoder::Posterior,
        restart_values: vec![rate],
        best_so_far: vec![rate],
    }
}

#[derive(Clone)]
struct State {
    nv: usize,
    /// `[x][v]`
    p: Vec<f64>,
    /// `[v][s]`
    dec: Vec<usize>,
    rate: f64,
    distortion: f64,
}

struct Am<'a> {
    src: &'a RdSource,
    t: &'a DistTable,
    cfg: &'a RdSolverConfig,
    nv: usize,
}

impl Am<'_> {
    fn finish(&self, s: State, restart_values: Vec<f64>) -> WzSolution {
        let mut best_so_far = Vec::with_capacity(restart_values.len());
        let mut m = f64::INFINITY;
        for &v in &restart_values {
            m = m.min(v);
            best_so_far.push(m);
        }
        WzSolution {
            rate: s.rate,
            distortion: s.distortion,
            nx: self.src.nx,
            ns: self.src.ns,
            nv: s.nv,
            channel: s.p,
            decoder: Decoder::Table { table: s.dec },
            restart_values,
            best_so_far,
        }
    }

    fn constant(&self, best: &[usize]) -> State {
        let p = vec![1.0; self.src.nx];
        let dec = best.to_vec();
        self.evaluate(1, p, dec)
    }

    fn identity(&self) -> State {
        let nx = self.src.nx;
        let mut p = vec![0.0; nx * nx];
        for x in 0..nx {
            p[x * nx + x] = 1.0;
        }
        let dec = self.decoder(nx, &p);
        self.evaluate(nx, p, dec)
    }

    fn evaluate(&self, nv: usize, p: Vec<f64>, dec: Vec<usize>) -> State {
        let (rate, distortion) = self.rate_distortion(nv, &p, &dec);
        State { nv, p, dec, rate, distortion }
    }

    /// Optimal decoder for a fixed channel, lowest index on ties.
    fn decoder(&self, nv: usize, p: &[f64]) -> Vec<usize> {
        let (nx, ns) = (self.src.nx, self.src.ns);
        let mut dec = vec![0; nv * ns];
        let mut w = vec![0.0; nx];
        for v in 0..nv {
            for s in 0..ns {
                for x in 0..nx {
                    w[x] = self.src.px_s[s * nx + x] * p[x * nv + v];
                }
                dec[v * ns + s] = best_reproduction(self.t, &w).0;
            }
        }
        dec
    }

    /// `q(v|s)` as `[s][v]`.
    fn q(&self, nv: usize, p: &[f64]) -> Vec<f64> {
        let (nx, ns) = (self.src.nx, self.src.ns);
        let mut q = vec![0.0; ns * nv];
        for s in 0..ns {
            for x in 0..nx {
                let pxs = self.src.px_s[s * nx + x];
                if pxs > 0.0 {
                    for v in 0..nv {
                        q[s * nv + v] += pxs * p[x * nv + v];
                    }
                }
            }
        }
        q
    }

    fn rate_distortion(&self, nv: usize, p: &[f64], dec: &[usize]) -> (f64, f64) {
        let (nx, ns) = (self.src.nx, self.src.ns);
        let q = self.q(nv, p);
        let mut r = KahanSum::default();
        let mut d = KahanSum::default();
        for x in 0..nx {
            for s in 0..ns {
                let pxs = self.src.ps[s] * self.src.px_s[s * nx + x];
                if pxs == 0.0 {
                    continue;
                }
                for v in 0..nv {
                    let pv = p[x * nv + v];
                    if pv > 0.0 {
                        r.add(pxs * pv * (pv / q[s * nv + v]).log2());
                        d.add(pxs * pv * self.t.at(x, dec[v * ns + s]));
                    }
                }
            }
        }
        (r.value().max(0.0), d.value())
    }

    /// Alternating minimization at slope `beta` from the channel `p`.
    fn at_slope(&self, beta: f64, mut p: Vec<f64>) -> State {
        let (nx, ns, nv) = (self.src.nx, self.src.ns, self.nv);
        let mut prev = f64::INFINITY;
        let mut dec = self.decoder(nv, &p);
        let mut logits = vec![0.0; nv];
        for _ in 0..self.cfg.max_iterations {
            let q = self.q(nv, &p);
            for x in 0..nx {
                for (v, l) in logits.iter_mut().enumerate() {
                    let mut acc = 0.0;
                    for s in 0..ns {
                        let w = self.src.ps_x[x * ns + s];
                        if w > 0.0 {
                            let qv = q[s * nv + v];
                            acc += if qv > 0.0 {
                                w * (qv.ln() - beta * self.t.at(x, dec[v * ns + s]))
                            } else {
                                f64::NEG_INFINITY
                            };
                        }
                    }
                    *l = acc;
                }
                let m = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let row = &mut p[x * nv..(x + 1) * nv];
                if m == f64::NEG_INFINITY {
                    continue;
                }
                let mut z = 0.0;
                for (r, &l) in row.iter_mut().zip(&logits) {
                    *r = (l - m).exp();
                    z += *r;
                }
                row.iter_mut().for_each(|r| *r /= z);
            }
            dec = self.decoder(nv, &p);
            let (r, d) = self.rate_distortion(nv, &p, &dec);
            let obj = r + beta / std::f64::consts::LN_2 * d;
            if (prev - obj).abs() <= self.cfg.convergence_tol {
                break;
            }
            prev = obj;
        }
        self.evaluate(nv, p, dec)
    }

    fn restart(&self, restart: u64, d: f64, best: &[usize]) -> State {
        let (nx, nv) = (self.src.nx, self.nv);
        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.rng_seed);
        rng.set_stream(restart);
        let dir = Dirichlet::new(&vec![1.0; nv]).expect("nv >= 2");
        let mut init = Vec::with_capacity(nx * nv);
        for _ in 0..nx {
            init.extend(dir.sample(&mut rng));
        }

        let mut lo = self.constant(best);
        let mut lo_beta = 0.0;
        let mut hi = None;
        let mut beta = 1.0;
        while beta < 1e9 {
            let s = self.at_slope(beta, init.clone());
            if s.distortion <= d {
                hi = Some((beta, s));
                break;
            }
            if s.distortion < lo.distortion {
                lo = s;
                lo_beta = beta;
            }
            beta *= 2.0;
        }
        let (mut hi_beta, mut hi) = hi.unwrap_or_else(|| (f64::INFINITY, self.identity()));
        if hi_beta.is_finite() {
            for _ in 0..200 {
                if lo.distortion - hi.distortion <= self.cfg.distortion_tol || hi_beta - lo_beta <= 1e-13 * hi_beta {
                    break;
                }
                let mid = 0.5 * (lo_beta + hi_beta);
                let s = self.at_slope(mid, init.clone());
                if s.distortion <= d {
                    hi = s;
                    hi_beta = mid;
                } else if s.distortion < lo.distortion {
                    lo = s;
                    lo_beta = mid;
                } else {
                    // Non-monotone response of the local search; keep the
                    // better bracket and shrink from above.
                    lo_beta = mid;
                }
            }
        }
        self.time_share(lo, hi, d)
    }

    /// Mixes two solutions with an independent switch so the distortion hits
    /// `d`, then compacts the alphabet.
    fn time_share(&self, lo: State, hi: State, d: f64) -> State {
        let span = lo.distortion - hi.distortion;
        let lam = if span > 0.0 { ((d - hi.distortion) / span).clamp(0.0, 1.0) } else { 0.0 };
        let (nx, ns) = (self.src.nx, self.src.ns);
        let nv = lo.nv + hi.nv;
        let mut p = vec![0.0; nx * nv];
        for x in 0..nx {
            for v in 0..lo.nv {
                p[x * nv + v] = lam * lo.p[x * lo.nv + v];
            }
            for v in 0..hi.nv {
                p[x * nv + lo.nv + v] = (1.0 - lam) * hi.p[x * hi.nv + v];
            }
        }
        let mut dec = lo.dec.clone();
        dec.extend_from_slice(&hi.dec);
        let (p, dec, nv) = compact(nx, ns, nv, &self.src.px, p, dec);
        self.evaluate(nv, p, dec)
    }
}

/// Drops zero-mass symbols and merges symbols with proportional columns and
/// identical decoder rows. Both operations leave rate and distortion intact.
fn compact(nx: usize, ns: usize, nv: usize, px: &[f64], p: Vec<f64>, dec: Vec<usize>) -> (Vec<f64>, Vec<usize>, usize) {
    let mass = |v: usize| -> f64 { (0..nx).map(|x| px[x] * p[x * nv + v]).sum() };
    let mut keep: Vec<usize> = Vec::new();
    let mut cols: Vec<Vec<f64>> = Vec::new();
    for v in 0..nv {
        let m = mass(v);
        if m <= 0.0 {
            continue;
        }
        let col: Vec<f64> = (0..nx).map(|x| p[x * nv + v]).collect();
        let normalized: Vec<f64> = col.iter().map(|c| c / m).collect();
        let row = &dec[v * ns..(v + 1) * ns];
        let mut merged = false;
        for (k, &u) in keep.iter().enumerate() {
            let mu: f64 = (0..nx).map(|x| px[x] * cols[k][x]).sum();
            let same_dec = &dec[u * ns..(u + 1) * ns] == row;
            let proportional = cols[k]
                .iter()
                .zip(&normalized)
                .all(|(a, b)| (a / mu - b).abs() <= 1e-12 * (1.0 + b.abs()));
            if same_dec && proportional {
                for x in 0..nx {
                    cols[k][x] += col[x];
                }
                merged = true;
                break;
            }
        }
        if !merged {
            keep.push(v);
            cols.push(col);
        }
    }
    let k = keep.len();
    let mut out = vec![0.0; nx * k];
    let mut out_dec = Vec::with_capacity(k * ns);
    for (j, &v) in keep.iter().enumerate() {
        for x in 0..nx {
            out[x * k + j] = cols[j][x];
        }
        out_dec.extend_from_slice(&dec[v * ns..(v + 1) * ns]);
    }
    // Rows of zero-probability symbols may have lost all mass; park them on
    // the first symbol so every row stays a pmf.
    for x in 0..nx {
        let row = &mut out[x * k..(x + 1) * k];
        let z: f64 = row.iter().sum();
        if z > 0.0 {
            row.iter_mut().for_each(|r| *r /= z);
        } else {
            row[0] = 1.0;
        }
    }
    (out, out_dec, k)
}
