//! Agmon lengths, Rellich-type inequalities and decay bounds.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::construct::{HardyWeight, MetricSpec, ScalarField};
use crate::error::{invalid, Result};
use crate::numgrid::{adaptive_gauss, gauss_legendre};

/// The metric `ds² = W(x) A(x)⁻¹ dx dx`.
#[derive(Debug, Clone)]
pub struct AgmonMetric {
    pub weight: HardyWeight,
    pub metric: MetricSpec,
    /// `(v₀, v₁)` generating the weight, for the lower bound `½|Δ log(v₀/v₁)|`.
    pub pair: Option<(ScalarField, ScalarField)>,
}

impl AgmonMetric {
    pub fn new(weight: HardyWeight, metric: MetricSpec) -> Result<Self> {
        if weight.dim() != metric.dim() {
            return invalid("weight and metric dimensions differ");
        }
        Ok(AgmonMetric { weight, metric, pair: None })
    }

    pub fn with_pair(mut self, v0: ScalarField, v1: ScalarField) -> Self {
        self.pair = Some((v0, v1));
        self
    }

    /// `sqrt(W(x)) |d|_{A⁻¹}`.
    pub fn line_element(&self, x: &[f64], d: &[f64]) -> Result<f64> {
        let w = self.weight.value(x)?;
        if !(w >= 0.0) || !w.is_finite() {
            return invalid(format!("weight undefined at {x:?}"));
        }
        Ok((w * self.metric.dual_norm_sq(x, d)?).sqrt())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgmonLength {
    pub length: f64,
    pub lower_bound: Option<f64>,
}

const LENGTH_TOL: f64 = 1e-12;

/// Length of the polygonal curve through `curve`.
pub fn agmon_length(metric: &AgmonMetric, curve: &[Vec<f64>]) -> Result<AgmonLength> {
    if curve.len() < 2 {
        return invalid("curve needs at least two points");
    }
    let n = metric.weight.dim();
    if curve.iter().any(|p| p.len() != n) {
        return invalid(format!("curve points must have dimension {n}"));
    }
    let mut length = 0.0;
    for seg in curve.windows(2) {
        let (a, b) = (&seg[0], &seg[1]);
        let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| y - x).collect();
        let piece = adaptive_gauss(
            |t| {
                let x: Vec<f64> = a.iter().zip(&d).map(|(p, q)| p + t * q).collect();
                metric.line_element(&x, &d)
            },
            0.0,
            1.0,
            LENGTH_TOL,
        )?;
        length += piece;
    }
    let lower_bound = match &metric.pair {
        None => None,
        Some((v0, v1)) => {
            let lr = |x: &[f64]| -> Result<f64> { Ok((v0.eval(x)? / v1.eval(x)?).ln()) };
            Some(0.5 * (lr(&curve[curve.len() - 1])? - lr(&curve[0])?).abs())
        }
    };
    Ok(AgmonLength { length, lower_bound })
}

/// Radial segment `r₀ e₁ → r₁ e₁`.
pub fn radial_segment(n: usize, r0: f64, r1: f64) -> Vec<Vec<f64>> {
    let mut a = vec![0.0; n];
    let mut b = vec![0.0; n];
    a[0] = r0;
    b[0] = r1;
    vec![a, b]
}

/// Smooth radial bump `cos²(π(log r - c)/(2w))` on `|log r - c| < w`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialBump {
    pub center: f64,
    pub half_width: f64,
}

impl RadialBump {
    /// `(u, u_s, u_ss)` in `s = log r`.
    pub fn jet(&self, s: f64) -> (f64, f64, f64) {
        let z = (s - self.center) / self.half_width;
        if z.abs() >= 1.0 {
            return (0.0, 0.0, 0.0);
        }
        let k = PI / (2.0 * self.half_width);
        let th = k * (s - self.center);
        let (sn, cs) = th.sin_cos();
        (cs * cs, -k * 2.0 * sn * cs, -2.0 * k * k * (cs * cs - sn * sn))
    }

    /// Seeded family, centers in `[-2, 2]`, half-widths in `[0.5, 2]`.
    pub fn family(seed: u64, count: usize) -> Vec<RadialBump> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| RadialBump { center: rng.gen_range(-2.0..=2.0), half_width: rng.gen_range(0.5..=2.0) })
            .collect()
    }
}

pub type RadialPotentialFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Inputs of the Rellich-type inequalities for `P = -Δ + V` on radial functions.
#[derive(Clone)]
pub struct RellichConfig {
    pub n: usize,
    pub mu: f64,
    pub lambda: f64,
    /// Convex parameter of the Hardy–Rellich variant.
    pub alpha: f64,
    pub v0: ScalarField,
    pub v1: ScalarField,
    pub weight: HardyWeight,
    pub potential: RadialPotentialFn,
}

impl RellichConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.mu) {
            return invalid(format!("mu must lie in [0, 1), got {}", self.mu));
        }
        if !(0.0..=1.0).contains(&self.lambda) {
            return invalid(format!("lambda must lie in [0, 1], got {}", self.lambda));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return invalid(format!("alpha must lie in [0, 1], got {}", self.alpha));
        }
        if self.n < 2 || self.weight.dim() != self.n {
            return invalid("dimension mismatch in Rellich configuration");
        }
        Ok(())
    }

    /// `λ(1-μ²)²`.
    pub fn prefactor(&self) -> f64 {
        rellich_prefactor(self.mu, self.lambda)
    }
}

pub fn rellich_prefactor(mu: f64, lambda: f64) -> f64 {
    let a = (1.0 - mu) * (1.0 + mu);
    lambda * a * a
}

/// `λ ((n-2)/2)⁴ (1-μ²)²`, the constant of the weighted Rellich inequality in punctured space.
pub fn euclidean_rellich_constant(n: usize, mu: f64, lambda: f64) -> f64 {
    let c = (n as f64 - 2.0) * (n as f64 - 2.0) / 4.0;
    let a = (1.0 - mu) * (1.0 + mu) * c;
    lambda * a * a
}

/// `n²(n-4)²/16`.
pub fn classical_rellich_constant(n: usize) -> f64 {
    let nf = n as f64;
    nf * nf * (nf - 4.0) * (nf - 4.0) / 16.0
}

#[derive(Debug, Clone, PartialEq)]
pub struct RellichReport {
    pub prefactor: f64,
    /// Per test function `lhs / rhs` of the weighted inequality.
    pub ratios: Vec<f64>,
    pub worst_ratio: f64,
    pub holds: bool,
    /// Same for `λ∫u²W ≤ α∫uPu + (1-α)∫(Pu)²/W`.
    pub ratios_convex: Vec<f64>,
    pub worst_ratio_convex: f64,
    pub holds_convex: bool,
}

const RELLICH_SLACK: f64 = 1e-9;

pub fn rellich_check(cfg: &RellichConfig, tests: &[RadialBump]) -> Result<RellichReport> {
    cfg.validate()?;
    let n = cfg.n as f64;
    let pre = cfg.prefactor();
    let at = |r: f64| {
        let mut x = vec![0.0; cfg.n];
        x[0] = r;
        x
    };
    let mut ratios = Vec::new();
    let mut ratios_b = Vec::new();
    let mut holds = true;
    let mut holds_b = true;
    for b in tests {
        let (lo, hi) = (b.center - b.half_width, b.center + b.half_width);
        let mut acc = [0.0f64; 5];
        let mut err = None;
        for (k, slot) in acc.iter_mut().enumerate() {
            *slot = gauss_legendre(
                |s| {
                    let r = s.exp();
                    let x = at(r);
                    let eval = || -> Result<f64> {
                        let w = cfg.weight.value(&x)?;
                        if !(w > 0.0) {
                            return invalid(format!("weight vanishes at r = {r}"));
                        }
                        let rho = (cfg.v0.eval(&x)? / cfg.v1.eval(&x)?).powf(cfg.mu);
                        let (u, us, uss) = b.jet(s);
                        let pu = -(uss + (n - 2.0) * us) / (r * r) + (cfg.potential)(r) * u;
                        let jac = r.powf(n);
                        Ok(jac
                            * match k {
                                0 => u * u * w * rho,
                                1 => pu * pu / w * rho,
                                2 => u * u * w,
                                3 => u * pu,
                                _ => pu * pu / w,
                            })
                    };
                    match eval() {
                        Ok(v) => v,
                        Err(e) => {
                            err.get_or_insert(e);
                            0.0
                        }
                    }
                },
                lo,
                hi,
                400,
            );
        }
        if let Some(e) = err {
            return Err(e);
        }
        let lhs = pre * acc[0];
        let rhs = acc[1];
        ratios.push(lhs / rhs);
        holds &= lhs <= rhs * (1.0 + RELLICH_SLACK) + RELLICH_SLACK;
        let lhs_b = cfg.lambda * acc[2];
        let rhs_b = cfg.alpha * acc[3] + (1.0 - cfg.alpha) * acc[4];
        ratios_b.push(lhs_b / rhs_b);
        holds_b &= lhs_b <= rhs_b * (1.0 + RELLICH_SLACK) + RELLICH_SLACK;
    }
    let worst = ratios.iter().cloned().fold(0.0, f64::max);
    let worst_b = ratios_b.iter().cloned().fold(0.0, f64::max);
    Ok(RellichReport {
        prefactor: pre,
        ratios,
        worst_ratio: worst,
        holds,
        ratios_convex: ratios_b,
        worst_ratio_convex: worst_b,
        holds_convex: holds_b,
    })
}

/// Punctured-space configuration: `v₀ = |x|^{2-n}`, `v₁ = 1`, `W = ((n-2)/2)²/|x|²`, `V = 0`.
pub fn euclidean_rellich_config(n: usize, mu: f64, lambda: f64, alpha: f64) -> Result<RellichConfig> {
    if n < 3 {
        return invalid("punctured-space configuration needs n ≥ 3");
    }
    let c = (n as f64 - 2.0).powi(2) / 4.0;
    Ok(RellichConfig {
        n,
        mu,
        lambda,
        alpha,
        v0: ScalarField::radial_power(n, vec![0.0; n], 2.0 - n as f64),
        v1: ScalarField::constant(n, 1.0),
        weight: HardyWeight::radial(n, "((n-2)/2)^2 / |x|^2", move |r| c / (r * r)),
        potential: Arc::new(|_| 0.0),
    })
}

/// `sup v / (v₁^{1-β} v₂^β)` over the probe points.
pub fn decay_bound(v: &ScalarField, v1: &ScalarField, v2: &ScalarField, beta: f64, probes: &[Vec<f64>]) -> Result<f64> {
    if !(0.5..=1.0).contains(&beta) {
        return invalid(format!("beta must lie in [1/2, 1], got {beta}"));
    }
    let mut sup: f64 = 0.0;
    for x in probes {
        let bound = v1.eval(x)?.powf(1.0 - beta) * v2.eval(x)?.powf(beta);
        sup = sup.max(v.eval(x)? / bound);
    }
    Ok(sup)
}

/// Relative defect of `(Pu, uv²) = (P(vu), vu) + ½(u², Pv²) - (Pv, u²v)` for `P = -Δ` on
/// radial functions, discretised by central differences in `s = log r` on `m` nodes over
/// `[a, b]` with the trapezoid inner product `∫ f g r^n ds`.
pub fn ibp_identity_residual(
    n: usize,
    u: &dyn Fn(f64) -> f64,
    v: &dyn Fn(f64) -> f64,
    support: (f64, f64),
    m: usize,
) -> Result<f64> {
    let (a, b) = support;
    if !(a > 0.0 && b > a) || m < 5 {
        return invalid("bad discretisation for the product-rule identity");
    }
    let (s0, s1) = (a.ln(), b.ln());
    let h = (s1 - s0) / (m - 1) as f64;
    let s: Vec<f64> = (0..m).map(|k| s0 + k as f64 * h).collect();
    let r: Vec<f64> = s.iter().map(|x| x.exp()).collect();
    let nf = n as f64;
    let apply = |f: &[f64]| -> Vec<f64> {
        (0..m)
            .map(|i| {
                if i == 0 || i + 1 == m {
                    return 0.0;
                }
                let d2 = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / (h * h);
                let d1 = (f[i + 1] - f[i - 1]) / (2.0 * h);
                -(d2 + (nf - 2.0) * d1) / (r[i] * r[i])
            })
            .collect()
    };
    let dot = |f: &[f64], g: &[f64]| -> f64 {
        (0..m).map(|i| if i == 0 || i + 1 == m { 0.5 } else { 1.0 } * f[i] * g[i] * r[i].powf(nf)).sum::<f64>() * h
    };
    let uu: Vec<f64> = r.iter().map(|&x| u(x)).collect();
    let vv: Vec<f64> = r.iter().map(|&x| v(x)).collect();
    let uv2: Vec<f64> = (0..m).map(|i| uu[i] * vv[i] * vv[i]).collect();
    let vu: Vec<f64> = (0..m).map(|i| uu[i] * vv[i]).collect();
    let u2: Vec<f64> = uu.iter().map(|x| x * x).collect();
    let v2: Vec<f64> = vv.iter().map(|x| x * x).collect();
    let u2v: Vec<f64> = (0..m).map(|i| u2[i] * vv[i]).collect();
    let lhs = dot(&apply(&uu), &uv2);
    let t1 = dot(&apply(&vu), &vu);
    let t2 = 0.5 * dot(&u2, &apply(&v2));
    let t3 = dot(&apply(&vv), &u2v);
    let scale = lhs.abs() + t1.abs() + t2.abs() + t3.abs();
    Ok((lhs - (t1 + t2 - t3)).abs() / scale)
}
