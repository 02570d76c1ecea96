use serde::{Deserialize, Serialize};

use super::{check_distortion, infeasible, DistTable, DistortionSpec, RdSolverConfig, RdSource};
use crate::error::Result;
use crate::prob::{Alphabet, Axis, ConditionalPmf, KahanSum};

const LN2: f64 = std::f64::consts::LN_2;

/// Informed-encoder solution: rate, achieved distortion and the test channel
/// `p(x_hat | x, s)` stored as `[s][x][x_hat]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SiEncSolution {
    pub rate: f64,
    pub distortion: f64,
    /// Final slope of the bracketing pair, absent for closed-form cases.
    pub beta: Option<f64>,
    pub nx: usize,
    pub ns: usize,
    pub nh: usize,
    pub channel: Option<Vec<f64>>,
}

impl SiEncSolution {
    /// Test channel as a conditional pmf given `(X, S...)` with output `Xhat`.
    pub fn channel_pmf(&self, source: &RdSource) -> Option<ConditionalPmf> {
        let ch = self.channel.as_ref()?;
        let given: Vec<Axis> = source.pmf().axes().to_vec();
        let out = vec![Axis::new("Xhat", Alphabet::new(self.nh).ok()?)];
        ConditionalPmf::from_fn(given, out, |g, o| {
            let x = g[0];
            let mut s = 0;
            for (axis, &i) in source.pmf().axes()[1..].iter().zip(&g[1..]) {
                s = s * axis.size() + i;
            }
            ch[(s * self.nx + x) * self.nh + o[0]]
        })
        .ok()
    }
}

/// R_SI-Enc(D) in bits.
pub fn rd_si_enc(source: &RdSource, dist: &DistortionSpec, d: f64, cfg: &RdSolverConfig) -> Result<f64> {
    Ok(solve_si_enc(source, dist, d, cfg)?.rate)
}

/// Minimizes `I(X; Xhat | S)` subject to `E d(X, Xhat) <= D` with one
/// Blahut-Arimoto run per side-information value at a shared slope. The
/// slope is bisected to bracket `D` and the two bracketing channels are
/// mixed to meet it exactly.
pub fn solve_si_enc(source: &RdSource, dist: &DistortionSpec, d: f64, cfg: &RdSolverConfig) -> Result<SiEncSolution> {
    cfg.validate()?;
    check_distortion(d)?;
    let Some(t) = dist.table(source.nx)? else {
        return Ok(solve_logloss(source, d, cfg));
    };
    source.check_dist(&t)?;
    let solver = Solver { src: source, t: &t, cfg };
    let d_min = source.d_min(&t);
    let (d_max, best) = source.d_max(&t);
    if d >= d_max {
        let mut ch = vec![0.0; source.ns * source.nx * t.nh];
        for s in 0..source.ns {
            for x in 0..source.nx {
                ch[(s * source.nx + x) * t.nh + best[s]] = 1.0;
            }
        }
        return Ok(solver.finish(ch, None));
    }
    if d < d_min - 1e-12 {
        return Err(infeasible(d, d_min));
    }
    let masked = solver.masked();
    if d <= d_min + 1e-12 {
        return Ok(solver.finish(masked.channel, None));
    }

    let mut q = vec![1.0 / t.nh as f64; source.ns * t.nh];
    // lo: distortion above target, hi: at or below.
    let mut lo = Point { beta: 0.0, distortion: d_max, channel: solver.constant(&best) };
    let mut hi: Option<Point> = None;
    let mut beta = 1.0;
    while beta < 1e12 {
        let p = solver.at_slope(beta, &mut q);
        if p.distortion <= d {
            hi = Some(p);
            break;
        }
        lo = p;
        beta *= 2.0;
    }
    let mut hi = match hi {
        Some(p) => p,
        None => Point { beta: f64::INFINITY, ..masked },
    };
    if hi.beta.is_finite() {
        for _ in 0..200 {
            if lo.distortion - hi.distortion <= cfg.distortion_tol || hi.beta - lo.beta <= 1e-13 * hi.beta {
                break;
            }
            let mid = 0.5 * (lo.beta + hi.beta);
            let p = solver.at_slope(mid, &mut q);
            if p.distortion <= d {
                hi = p;
            } else {
                lo = p;
            }
        }
    }
    let span = lo.distortion - hi.distortion;
    let lam = if span > 0.0 { (d - hi.distortion) / span } else { 0.0 };
    let ch: Vec<f64> = lo
        .channel
        .iter()
        .zip(&hi.channel)
        .map(|(a, b)| lam * a + (1.0 - lam) * b)
        .collect();
    let beta = if hi.beta.is_finite() { Some(hi.beta) } else { None };
    Ok(solver.finish(ch, beta))
}

/// Log-loss: the reconstruction is the posterior of `X` given `(U, S)` for an
/// auxiliary `U` with `|X| + 1` symbols, so the distortion is `H(X|U,S)` and
/// the rate `I(X;U|S)`. Candidate channels come from the two extremes and
/// from information-bottleneck iterations at several slopes; the result is
/// the best time-sharing of two candidates, built over disjoint copies of `U`
/// so that rate and distortion mix linearly. The stored channel is
/// `p(u | x, s)` with `2 (|X| + 1)` outputs.
fn solve_logloss(source: &RdSource, d: f64, cfg: &RdSolverConfig) -> SiEncSolution {
    let (nx, ns) = (source.nx, source.ns);
    let nu = nx + 1;
    let slice = |s: usize| &source.px_s[s * nx..(s + 1) * nx];
    let evaluate = |ch: &[f64]| -> (f64, f64) {
        let (mut rate, mut dist) = (KahanSum::default(), KahanSum::default());
        for s in 0..ns {
            let (r, h) = logloss_terms(slice(s), &ch[s * nx * nu..(s + 1) * nx * nu], nx, nu);
            rate.add(source.ps[s] * r);
            dist.add(source.ps[s] * h);
        }
        (rate.value().max(0.0), dist.value().max(0.0))
    };
    let constant: Vec<f64> = (0..ns * nx * nu).map(|i| if i % nu == nx { 1.0 } else { 0.0 }).collect();
    let identity: Vec<f64> = (0..ns * nx * nu).map(|i| if i % nu == (i / nu) % nx { 1.0 } else { 0.0 }).collect();
    let mut candidates = vec![constant, identity];
    for beta in [0.5, 0.9, 1.1, 1.5, 2.0, 4.0] {
        let mut ch = Vec::with_capacity(ns * nx * nu);
        for s in 0..ns {
            ch.extend(bottleneck(slice(s), nx, nu, beta, cfg));
        }
        candidates.push(ch);
    }
    let points: Vec<(f64, f64)> = candidates.iter().map(|c| evaluate(c)).collect();
    // Best pair (a above d, b at or below d) by interpolated rate.
    let mut best: Option<(f64, usize, usize, f64)> = None;
    for (a, pa) in points.iter().enumerate() {
        for (b, pb) in points.iter().enumerate() {
            if pa.1 < d || pb.1 > d {
                continue;
            }
            let lam = if pa.1 > pb.1 { (d - pb.1) / (pa.1 - pb.1) } else { 0.0 };
            let r = lam * pa.0 + (1.0 - lam) * pb.0;
            if best.is_none_or(|bst| r < bst.0) {
                best = Some((r, a, b, lam));
            }
        }
    }
    // With d above every candidate's distortion the constant channel wins.
    let (_, a, b, lam) = best.unwrap_or((0.0, 0, 0, 1.0));
    let mut channel = vec![0.0; ns * nx * 2 * nu];
    for row in 0..ns * nx {
        for u in 0..nu {
            channel[row * 2 * nu + u] = lam * candidates[a][row * nu + u];
            channel[row * 2 * nu + nu + u] = (1.0 - lam) * candidates[b][row * nu + u];
        }
    }
    let (pa, pb) = (points[a], points[b]);
    SiEncSolution {
        rate: (lam * pa.0 + (1.0 - lam) * pb.0).max(0.0),
        distortion: lam * pa.1 + (1.0 - lam) * pb.1,
        beta: None,
        nx,
        ns,
        nh: 2 * nu,
        channel: Some(channel),
    }
}

/// `(I(X;U), H(X|U))` in bits for one slice with channel `w[x][u]`.
fn logloss_terms(px: &[f64], w: &[f64], nx: usize, nu: usize) -> (f64, f64) {
    let mut r = vec![0.0; nu];
    for x in 0..nx {
        for u in 0..nu {
            r[u] += px[x] * w[x * nu + u];
        }
    }
    let (mut rate, mut h) = (KahanSum::default(), KahanSum::default());
    for x in 0..nx {
        for u in 0..nu {
            let joint = px[x] * w[x * nu + u];
            if joint > 0.0 {
                rate.add(joint * (w[x * nu + u] / r[u]).log2());
                h.add(-joint * (joint / r[u]).log2());
            }
        }
    }
    (rate.value(), h.value())
}

/// Bottleneck iterations for `min I(X;U) + beta H(X|U)` on one slice:
/// `w[x][u] ~ r[u] p(x|u)^beta`, from a slightly informative start.
fn bottleneck(px: &[f64], nx: usize, nu: usize, beta: f64, cfg: &RdSolverConfig) -> Vec<f64> {
    let mut w: Vec<f64> = (0..nx * nu).map(|i| if i % nu == i / nu { 2.0 } else { 1.0 } / (nu as f64 + 1.0)).collect();
    let mut r = vec![0.0; nu];
    for _ in 0..cfg.max_iterations {
        r.iter_mut().for_each(|v| *v = 0.0);
        for x in 0..nx {
            for u in 0..nu {
                r[u] += px[x] * w[x * nu + u];
            }
        }
        let mut change: f64 = 0.0;
        for x in 0..nx {
            let mut row = vec![0.0; nu];
            for u in 0..nu {
                if r[u] > 0.0 && px[x] > 0.0 {
                    let post = px[x] * w[x * nu + u] / r[u];
                    row[u] = r[u] * post.powf(beta);
                }
            }
            let total: f64 = row.iter().sum();
            for u in 0..nu {
                let v = if total > 0.0 { row[u] / total } else { 1.0 / nu as f64 };
                change = change.max((v - w[x * nu + u]).abs());
                w[x * nu + u] = v;
            }
        }
        if change <= cfg.convergence_tol {
            break;
        }
    }
    w
}

struct Point {
    beta: f64,
    distortion: f64,
    channel: Vec<f64>,
}

struct Solver<'a> {
    src: &'a RdSource,
    t: &'a DistTable,
    cfg: &'a RdSolverConfig,
}

impl Solver<'_> {
    fn slice(&self, s: usize) -> &[f64] {
        let nx = self.src.nx;
        &self.src.px_s[s * nx..(s + 1) * nx]
    }

    fn finish(&self, channel: Vec<f64>, beta: Option<f64>) -> SiEncSolution {
        SiEncSolution {
            rate: self.rate(&channel),
            distortion: self.distortion(&channel),
            beta,
            nx: self.src.nx,
            ns: self.src.ns,
            nh: self.t.nh,
            channel: Some(channel),
        }
    }

    fn constant(&self, best: &[usize]) -> Vec<f64> {
        let (nx, nh) = (self.src.nx, self.t.nh);
        let mut ch = vec![0.0; self.src.ns * nx * nh];
        for (s, &b) in best.iter().enumerate() {
            for x in 0..nx {
                ch[(s * nx + x) * nh + b] = 1.0;
            }
        }
        ch
    }

    fn rate(&self, ch: &[f64]) -> f64 {
        let (nx, nh) = (self.src.nx, self.t.nh);
        let mut acc = KahanSum::default();
        for s in 0..self.src.ns {
            let ps = self.src.ps[s];
            if ps == 0.0 {
                continue;
            }
            let px = self.slice(s);
            let w = &ch[s * nx * nh..(s + 1) * nx * nh];
            let mut r = vec![0.0; nh];
            for x in 0..nx {
                for h in 0..nh {
                    r[h] += px[x] * w[x * nh + h];
                }
            }
            for x in 0..nx {
                for h in 0..nh {
                    let v = w[x * nh + h];
                    if px[x] > 0.0 && v > 0.0 {
                        acc.add(ps * px[x] * v * (v / r[h]).log2());
                    }
                }
            }
        }
        acc.value().max(0.0)
    }

    fn distortion(&self, ch: &[f64]) -> f64 {
        let (nx, nh) = (self.src.nx, self.t.nh);
        let mut acc = KahanSum::default();
        for s in 0..self.src.ns {
            let px = self.slice(s);
            for x in 0..nx {
                for h in 0..nh {
                    acc.add(self.src.ps[s] * px[x] * ch[(s * nx + x) * nh + h] * self.t.at(x, h));
                }
            }
        }
        acc.value()
    }

    /// Blahut-Arimoto at slope `beta` (nats per unit distortion), warm
    /// started from and updating the output marginals `q` (`[s][x_hat]`).
    fn at_slope(&self, beta: f64, q: &mut [f64]) -> Point {
        let (nx, nh) = (self.src.nx, self.t.nh);
        let mut a = vec![0.0; nx * nh];
        for x in 0..nx {
            let m = (0..nh).map(|h| self.t.at(x, h)).fold(f64::INFINITY, f64::min);
            for h in 0..nh {
                a[x * nh + h] = (-beta * (self.t.at(x, h) - m)).exp();
            }
        }
        let mut ch = vec![0.0; self.src.ns * nx * nh];
        for s in 0..self.src.ns {
            let qs = &mut q[s * nh..(s + 1) * nh];
            let w = blahut_arimoto(self.slice(s), &a, nx, nh, qs, self.cfg);
            ch[s * nx * nh..(s + 1) * nx * nh].copy_from_slice(&w);
        }
        Point {
            beta,
            distortion: self.distortion(&ch),
            channel: ch,
        }
    }

    /// Least-rate channel supported on each symbol's best reproductions.
    fn masked(&self) -> Point {
        let (nx, nh) = (self.src.nx, self.t.nh);
        let mut a = vec![0.0; nx * nh];
        for x in 0..nx {
            let m = (0..nh).map(|h| self.t.at(x, h)).fold(f64::INFINITY, f64::min);
            for h in 0..nh {
                if self.t.at(x, h) <= m {
                    a[x * nh + h] = 1.0;
                }
            }
        }
        let mut ch = vec![0.0; self.src.ns * nx * nh];
        for s in 0..self.src.ns {
            let mut qs = vec![1.0 / nh as f64; nh];
            let w = blahut_arimoto(self.slice(s), &a, nx, nh, &mut qs, self.cfg);
            ch[s * nx * nh..(s + 1) * nx * nh].copy_from_slice(&w);
        }
        Point {
            beta: f64::INFINITY,
            distortion: self.distortion(&ch),
            channel: ch,
        }
    }
}

/// Blahut-Arimoto on one slice with kernel `a[x][h] = exp(-beta d)`. Stops on
/// the standard duality gap `ln max c - sum q' ln c`.
fn blahut_arimoto(px: &[f64], a: &[f64], nx: usize, nh: usize, q: &mut [f64], cfg: &RdSolverConfig) -> Vec<f64> {
    let mut z = vec![0.0; nx];
    let mut c = vec![0.0; nh];
    for _ in 0..cfg.max_iterations {
        for x in 0..nx {
            z[x] = (0..nh).map(|h| q[h] * a[x * nh + h]).sum();
        }
        c.iter_mut().for_each(|v| *v = 0.0);
        for x in 0..nx {
            if px[x] > 0.0 && z[x] > 0.0 {
                for h in 0..nh {
                    c[h] += px[x] * a[x * nh + h] / z[x];
                }
            }
        }
        let cmax = c.iter().copied().fold(0.0, f64::max);
        let mut avg = 0.0;
        for h in 0..nh {
            q[h] *= c[h];
            if q[h] > 0.0 {
                avg += q[h] * c[h].ln();
            }
        }
        let total: f64 = q.iter().sum();
        q.iter_mut().for_each(|v| *v /= total);
        if cmax.ln() - avg <= cfg.convergence_tol * LN2 {
            break;
        }
    }
    let mut w = vec![0.0; nx * nh];
    for x in 0..nx {
        let zx: f64 = (0..nh).map(|h| q[h] * a[x * nh + h]).sum();
        if zx > 0.0 {
            for h in 0..nh {
                w[x * nh + h] = q[h] * a[x * nh + h] / zx;
            }
        } else {
            let h = (0..nh).find(|&h| a[x * nh + h] > 0.0).unwrap_or(0);
            w[x * nh + h] = 1.0;
        }
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::{binary_entropy, make_erasure_source, JointPmf};
    use approx::assert_abs_diff_eq;

    fn erased(p_e: f64) -> RdSource {
        let j = make_erasure_source(&JointPmf::bernoulli("X", 0.5).unwrap(), p_e).unwrap();
        RdSource::new(&j, "X", &["Y"]).unwrap()
    }

    #[test]
    fn logloss_solver_meets_the_line() {
        let s = erased(0.6);
        let cfg = RdSolverConfig::default();
        for d in [0.0, 0.1, 0.3, 0.59, 0.8] {
            let sol = solve_si_enc(&s, &DistortionSpec::LogLoss, d, &cfg).unwrap();
            assert_abs_diff_eq!(sol.rate, (0.6 - d).max(0.0), epsilon = 1e-9);
            assert_abs_diff_eq!(sol.distortion, d.min(0.6), epsilon = 1e-9);
            let ch = sol.channel.unwrap();
            for row in ch.chunks(sol.nh) {
                assert_abs_diff_eq!(row.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn binary_source_without_si() {
        let j = JointPmf::bernoulli("X", 0.5).unwrap();
        let s = RdSource::new(&j, "X", &[]).unwrap();
        let cfg = RdSolverConfig::default();
        for d in [0.01, 0.1, 0.25, 0.4] {
            let sol = solve_si_enc(&s, &DistortionSpec::Hamming, d, &cfg).unwrap();
            assert_abs_diff_eq!(sol.rate, 1.0 - binary_entropy(d).unwrap(), epsilon = 1e-9);
            assert_abs_diff_eq!(sol.distortion, d, epsilon = 1e-12);
        }
        assert_eq!(rd_si_enc(&s, &DistortionSpec::Hamming, 0.5, &cfg).unwrap(), 0.0);
        assert_abs_diff_eq!(rd_si_enc(&s, &DistortionSpec::Hamming, 0.0, &cfg).unwrap(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn erased_si() {
        let cfg = RdSolverConfig::default();
        let r = rd_si_enc(&erased(0.8), &DistortionSpec::Hamming, 0.2, &cfg).unwrap();
        assert_abs_diff_eq!(r, 0.8 * (1.0 - binary_entropy(0.25).unwrap()), epsilon = 1e-9);
    }

    #[test]
    fn perfect_si_is_free() {
        let cfg = RdSolverConfig::default();
        let s = erased(0.0);
        for d in [0.0, 0.1, 0.3] {
            assert_eq!(rd_si_enc(&s, &DistortionSpec::Hamming, d, &cfg).unwrap(), 0.0);
        }
    }

    #[test]
    fn below_minimum_distortion() {
        let j = JointPmf::bernoulli("X", 0.5).unwrap();
        let s = RdSource::new(&j, "X", &[]).unwrap();
        let m = DistortionSpec::Matrix { matrix: vec![vec![0.5, 1.0], vec![1.0, 0.5]] };
        let cfg = RdSolverConfig::default();
        let err = rd_si_enc(&s, &m, 0.2, &cfg).unwrap_err();
        assert!(matches!(err, crate::Error::Infeasible { minimum, .. } if (minimum - 0.5).abs() < 1e-12));
        assert_abs_diff_eq!(rd_si_enc(&s, &m, 0.5, &cfg).unwrap(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn channel_export_normalizes() {
        let cfg = RdSolverConfig::default();
        let s = erased(0.8);
        let sol = solve_si_enc(&s, &DistortionSpec::Hamming, 0.2, &cfg).unwrap();
        let c = sol.channel_pmf(&s).unwrap();
        assert_eq!(c.given_names(), vec!["X", "Y"]);
        assert_eq!(c.output_size(), 2);
    }
}
