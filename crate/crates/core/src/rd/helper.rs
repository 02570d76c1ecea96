use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Dirichlet, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::RdSolverConfig;
use crate::error::{usage, Result};
use crate::prob::{entropy_bits, Alphabet, Axis, ConditionalPmf, JointPmf, KahanSum};

/// Helper description `p(u_h | y)` minimizing `H(X | U_h, Z)` under a rate
/// budget on `I(U_h; Y | Z)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HelperAux {
    pub channel: ConditionalPmf,
    /// H(X | U_h, Z) in bits; an upper bound on the true minimum.
    pub objective: f64,
    /// Achieved I(U_h; Y | Z) in bits.
    pub rate: f64,
    pub restart_values: Vec<f64>,
}

/// Searches `p(u_h | y)` with `|U_h| <= |Y| + 2`. Uses variational
/// alternating minimization of `H(X|U_h,Z) + lambda I(U_h;Y|Z)`, bisection on
/// `lambda` and time-sharing to meet the budget, over Dirichlet restarts
/// plus the constant and identity descriptions. Expects axes `X`, `Y`, `Z`.
pub fn helper_aux_optimize(source: &JointPmf, r_h: f64, cfg: &RdSolverConfig) -> Result<HelperAux> {
    cfg.validate()?;
    if !r_h.is_finite() && r_h != f64::INFINITY || r_h < 0.0 {
        return usage(format!("helper rate {r_h} must be nonnegative"));
    }
    let m = source.marginal(&["X", "Y", "Z"])?;
    let y_axis = m.axes()[1].clone();
    let p = Tables::new(&m);
    let cap = p.ny + 2;

    let constant = p.evaluate(1, vec![1.0; p.ny]);
    let mut eye = vec![0.0; p.ny * p.ny];
    for y in 0..p.ny {
        eye[y * p.ny + y] = 1.0;
    }
    let identity = p.evaluate(p.ny, eye);

    let mut values = Vec::new();
    let best = if identity.rate <= r_h + 1e-12 {
        values.push(identity.objective);
        identity
    } else {
        let runs: Vec<Sol> = (0..cfg.restarts)
            .into_par_iter()
            .map(|r| p.restart(r as u64, r_h, cap, cfg, &constant))
            .collect();
        let mut best = constant.clone();
        values.push(constant.objective);
        for s in runs {
            values.push(s.objective);
            if s.rate <= r_h + 1e-9 && s.objective < best.objective {
                best = s;
            }
        }
        best
    };
    let channel = ConditionalPmf::new(vec![y_axis], vec![Axis::new("Uh", Alphabet::new(best.nu)?)], best.p)?;
    Ok(HelperAux {
        channel,
        objective: best.objective,
        rate: best.rate,
        restart_values: values,
    })
}

#[derive(Clone)]
struct Sol {
    nu: usize,
    /// `[y][u]`
    p: Vec<f64>,
    objective: f64,
    rate: f64,
}

struct Tables {
    nx: usize,
    ny: usize,
    nz: usize,
    /// p(x,y,z)
    pxyz: Vec<f64>,
    /// p(y)
    py: Vec<f64>,
    /// p(y,z)
    pyz: Vec<f64>,
    /// p(z)
    pz: Vec<f64>,
}

impl Tables {
    fn new(m: &JointPmf) -> Self {
        let s = m.sizes();
        let (nx, ny, nz) = (s[0], s[1], s[2]);
        let pxyz = m.probs().to_vec();
        let mut py = vec![0.0; ny];
        let mut pyz = vec![0.0; ny * nz];
        let mut pz = vec![0.0; nz];
        for x in 0..nx {
            for y in 0..ny {
                for z in 0..nz {
                    let v = pxyz[(x * ny + y) * nz + z];
                    py[y] += v;
                    pyz[y * nz + z] += v;
                    pz[z] += v;
                }
            }
        }
        Self { nx, ny, nz, pxyz, py, pyz, pz }
    }

    /// (p(u,z) as `[u][z]`, p(x,u,z) as `[x][u][z]`).
    fn joints(&self, nu: usize, p: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let (nx, ny, nz) = (self.nx, self.ny, self.nz);
        let mut puz = vec![0.0; nu * nz];
        let mut pxuz = vec![0.0; nx * nu * nz];
        for x in 0..nx {
            for y in 0..ny {
                for z in 0..nz {
                    let v = self.pxyz[(x * ny + y) * nz + z];
                    if v == 0.0 {
                        continue;
                    }
                    for u in 0..nu {
                        let w = v * p[y * nu + u];
                        puz[u * nz + z] += w;
                        pxuz[(x * nu + u) * nz + z] += w;
                    }
                }
            }
        }
        (puz, pxuz)
    }

    fn evaluate(&self, nu: usize, p: Vec<f64>) -> Sol {
        let (puz, pxuz) = self.joints(nu, &p);
        // H(X|U,Z) = H(X,U,Z) - H(U,Z)
        let objective = (entropy_bits(&pxuz) - entropy_bits(&puz)).max(0.0);
        // I(U;Y|Z) = H(U,Z) - H(Z) - H(U|Y) since U - Y - Z.
        let mut h_u_y = KahanSum::default();
        for y in 0..self.ny {
            h_u_y.add(self.py[y] * entropy_bits(&p[y * nu..(y + 1) * nu]));
        }
        let rate = (entropy_bits(&puz) - entropy_bits(&self.pz) - h_u_y.value()).max(0.0);
        Sol { nu, p, objective, rate }
    }

    fn at_lambda(&self, lambda: f64, nu: usize, mut p: Vec<f64>, cfg: &RdSolverConfig) -> Sol {
        let (nx, ny, nz) = (self.nx, self.ny, self.nz);
        let mut prev = f64::INFINITY;
        let mut logits = vec![0.0; nu];
        for _ in 0..cfg.max_iterations {
            let (puz, pxuz) = self.joints(nu, &p);
            for y in 0..ny {
                if self.py[y] == 0.0 {
                    continue;
                }
                for (u, l) in logits.iter_mut().enumerate() {
                    let mut acc = 0.0;
                    for z in 0..nz {
                        let wz = self.pyz[y * nz + z] / self.py[y];
                        if wz == 0.0 {
                            continue;
                        }
                        let uz = puz[u * nz + z];
                        if uz == 0.0 {
                            acc = f64::NEG_INFINITY;
                            break;
                        }
                        acc += wz * (uz / self.pz[z]).ln();
                        for x in 0..nx {
                            let wx = self.pxyz[(x * ny + y) * nz + z] / self.py[y];
                            if wx > 0.0 {
                                acc += wx / lambda * (pxuz[(x * nu + u) * nz + z] / uz).ln();
                            }
                        }
                    }
                    *l = acc;
                }
                let m = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                if m == f64::NEG_INFINITY {
                    continue;
                }
                let row = &mut p[y * nu..(y + 1) * nu];
                let mut z = 0.0;
                for (r, &l) in row.iter_mut().zip(&logits) {
                    *r = (l - m).exp();
                    z += *r;
                }
                row.iter_mut().for_each(|r| *r /= z);
            }
            let s = self.evaluate(nu, p);
            let obj = s.objective + lambda * s.rate;
            p = s.p;
            if (prev - obj).abs() <= cfg.convergence_tol {
                break;
            }
            prev = obj;
        }
        self.evaluate(nu, p)
    }

    fn restart(&self, restart: u64, r_h: f64, cap: usize, cfg: &RdSolverConfig, constant: &Sol) -> Sol {
        let nu = cap;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed ^ 0x6865_6c70);
        rng.set_stream(restart);
        let dir = Dirichlet::new(&vec![1.0; nu]).expect("nu >= 2");
        let mut init = Vec::with_capacity(self.ny * nu);
        for _ in 0..self.ny {
            init.extend(dir.sample(&mut rng));
        }
        // Larger lambda buys less rate. `feas` meets the budget, `over` does not.
        let mut feas = (f64::INFINITY, constant.clone());
        let mut over: Option<(f64, Sol)> = None;
        let mut lambda = 1.0;
        for _ in 0..60 {
            let s = self.at_lambda(lambda, nu, init.clone(), cfg);
            if s.rate <= r_h {
                feas = (lambda, s);
                lambda /= 2.0;
                if over.is_some() {
                    break;
                }
            } else {
                over = Some((lambda, s));
                if feas.0.is_finite() {
                    break;
                }
                lambda *= 2.0;
            }
            if !(1e-9..=1e9).contains(&lambda) {
                break;
            }
        }
        let Some(mut over) = over else {
            return feas.1;
        };
        if feas.0.is_finite() {
            for _ in 0..100 {
                if over.1.rate - feas.1.rate <= 1e-10 || feas.0 - over.0 <= 1e-13 * feas.0 {
                    break;
                }
                let mid = 0.5 * (over.0 + feas.0);
                let s = self.at_lambda(mid, nu, init.clone(), cfg);
                if s.rate <= r_h {
                    feas = (mid, s);
                } else {
                    over = (mid, s);
                }
            }
        }
        self.time_share(feas.1, over.1, r_h, cap)
    }

    fn time_share(&self, feas: Sol, over: Sol, r_h: f64, cap: usize) -> Sol {
        let span = over.rate - feas.rate;
        if span <= 0.0 {
            return feas;
        }
        let lam = ((r_h - feas.rate) / span).clamp(0.0, 1.0);
        let (a, b) = (drop_unused(self, feas.clone()), drop_unused(self, over));
        if a.nu + b.nu > cap {
            return feas;
        }
        let nu = a.nu + b.nu;
        let mut p = vec![0.0; self.ny * nu];
        for y in 0..self.ny {
            for u in 0..a.nu {
                p[y * nu + u] = (1.0 - lam) * a.p[y * a.nu + u];
            }
            for u in 0..b.nu {
                p[y * nu + a.nu + u] = lam * b.p[y * b.nu + u];
            }
        }
        let s = self.evaluate(nu, p);
        if s.rate <= r_h + 1e-12 {
            s
        } else {
            feas
        }
    }
}

fn drop_unused(t: &Tables, s: Sol) -> Sol {
    let used: Vec<usize> = (0..s.nu)
        .filter(|&u| (0..t.ny).any(|y| t.py[y] > 0.0 && s.p[y * s.nu + u] > 0.0))
        .collect();
    if used.len() == s.nu {
        return s;
    }
    let k = used.len().max(1);
    let mut p = vec![0.0; t.ny * k];
    for y in 0..t.ny {
        for (j, &u) in used.iter().enumerate() {
            p[y * k + j] = s.p[y * s.nu + u];
        }
        let z: f64 = p[y * k..(y + 1) * k].iter().sum();
        if z > 0.0 {
            p[y * k..(y + 1) * k].iter_mut().for_each(|v| *v /= z);
        } else {
            p[y * k] = 1.0;
        }
    }
    t.evaluate(k, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::{add_erasure, entropy, mutual_information};
    use approx::assert_abs_diff_eq;

    fn copy_with_erased_z(p_e: f64) -> JointPmf {
        let x = JointPmf::bernoulli("X", 0.5).unwrap();
        let xy = x.add_tuple_axis("Y", &["X"]).unwrap();
        add_erasure(&xy, "X", "Z", p_e).unwrap()
    }

    fn quick() -> RdSolverConfig {
        RdSolverConfig { restarts: 4, ..Default::default() }
    }

    #[test]
    fn zero_rate_gives_constant() {
        let j = copy_with_erased_z(0.8);
        let h = helper_aux_optimize(&j, 0.0, &quick()).unwrap();
        assert_abs_diff_eq!(h.objective, entropy(&j, &["X"], &["Z"]).unwrap(), epsilon = 1e-9);
        assert!(h.rate <= 1e-9);
    }

    #[test]
    fn ample_rate_gives_identity() {
        let j = copy_with_erased_z(0.8);
        let h = helper_aux_optimize(&j, 1.0, &quick()).unwrap();
        assert_abs_diff_eq!(h.objective, 0.0, epsilon = 1e-9);
    }

    #[test]
    fn partial_rate_is_feasible() {
        let j = copy_with_erased_z(0.8);
        let h = helper_aux_optimize(&j, 0.3, &quick()).unwrap();
        assert!(h.rate <= 0.3 + 1e-9);
        assert!(h.objective <= 0.8 + 1e-9);
        let full = j.extend(&h.channel).unwrap();
        let i = mutual_information(&full, &["Uh"], &["Y"], &["Z"]).unwrap();
        assert_abs_diff_eq!(i, h.rate, epsilon = 1e-9);
        assert!(h.channel.output_size() <= 4);
    }
}
