//! Spectral representation of `W⁻¹P` on radial functions.
//!
//! A radial `f = u F(G/u)` is carried to a function `F` of `t = G/u`; in
//! `τ = log t` the generalized transform is an ordinary Fourier integral and
//! the conjugated operator acts as `-4t² d²/dt²`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::numgrid::{gauss_legendre, LogGrid, SampledFunction};
use crate::radial::{sphere_area, RadialPair};
use crate::varify::level_integral;

/// Uniform `ξ` grid with trapezoid weights.
#[derive(Debug, Clone, PartialEq)]
pub struct XiGrid {
    pub xi: Vec<f64>,
    pub weights: Vec<f64>,
}

impl XiGrid {
    pub fn uniform(lo: f64, hi: f64, count: usize) -> Result<Self> {
        if count < 2 || !(hi > lo) {
            return invalid("ξ grid needs hi > lo and at least two points");
        }
        let d = (hi - lo) / (count - 1) as f64;
        let xi = (0..count).map(|k| lo + k as f64 * d).collect();
        let weights = (0..count).map(|k| if k == 0 || k + 1 == count { 0.5 * d } else { d }).collect();
        Ok(XiGrid { xi, weights })
    }

    /// 512 points on `[-8, 8]`.
    pub fn standard() -> Self {
        Self::uniform(-8.0, 8.0, 512).expect("valid default grid")
    }

    pub fn integrate(&self, f: impl Fn(usize) -> f64) -> f64 {
        self.weights.iter().enumerate().map(|(k, w)| w * f(k)).sum()
    }
}

const MELLIN_TAIL: f64 = 1e-8;

/// `Mf(ξ) = (2π)^{-1/2} ∫ f(r) r^{iξ - 1/2} dr`, trapezoid rule in `s = log r`.
pub fn mellin_transform(f: &SampledFunction, xi: &[f64]) -> Result<Vec<Complex64>> {
    let grid = f.grid();
    let h = grid.step();
    let g: Vec<f64> = grid.nodes().iter().zip(f.values()).map(|(r, v)| v * r.sqrt()).collect();
    let total: f64 = g.iter().map(|v| v.abs()).sum::<f64>() * h;
    let tail = g[0].abs() + g[g.len() - 1].abs();
    if total == 0.0 {
        return Ok(vec![Complex64::new(0.0, 0.0); xi.len()]);
    }
    if tail > MELLIN_TAIL * total {
        return Err(Error::InsufficientDecay(tail / total));
    }
    let s: Vec<f64> = (0..grid.len()).map(|k| grid.s(k)).collect();
    let norm = h / (2.0 * PI).sqrt();
    Ok(xi
        .iter()
        .map(|&x| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, gk) in g.iter().enumerate() {
                let w = if k == 0 || k + 1 == g.len() { 0.5 } else { 1.0 };
                acc += Complex64::from_polar(w * gk, x * s[k]);
            }
            acc * norm
        })
        .collect())
}

/// `(‖f‖², ‖Mf‖²)` with `‖f‖²` on `(0, ∞)` by the trapezoid rule in `s`.
pub fn mellin_plancherel(f: &SampledFunction, xi: &XiGrid) -> Result<(f64, f64)> {
    let m = mellin_transform(f, &xi.xi)?;
    let grid = f.grid();
    let h = grid.step();
    let n = grid.len();
    let lhs: f64 = (0..n)
        .map(|k| {
            let w = if k == 0 || k + 1 == n { 0.5 } else { 1.0 };
            w * f.values()[k].powi(2) * grid.node(k)
        })
        .sum::<f64>()
        * h;
    Ok((lhs, xi.integrate(|k| m[k].norm_sqr())))
}

/// Gaussian bump `χ(τ) = exp(-(τ-c)²/(2σ²))`, truncated at `|τ - c| = 7σ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    pub center: f64,
    pub sigma: f64,
}

impl Bump {
    pub fn support(&self) -> (f64, f64) {
        (self.center - 7.0 * self.sigma, self.center + 7.0 * self.sigma)
    }

    pub fn chi(&self, tau: f64) -> f64 {
        let z = (tau - self.center) / self.sigma;
        if z.abs() > 7.0 {
            0.0
        } else {
            (-0.5 * z * z).exp()
        }
    }

    pub fn chi2(&self, tau: f64) -> f64 {
        let z = (tau - self.center) / self.sigma;
        if z.abs() > 7.0 {
            0.0
        } else {
            (z * z - 1.0) / (self.sigma * self.sigma) * (-0.5 * z * z).exp()
        }
    }

    /// `∫χ² dτ`.
    pub fn l2_sq(&self) -> f64 {
        self.sigma * PI.sqrt()
    }

    /// Seeded family with `σ ∈ [0.8, 1.2]`, `c ∈ [-3, 0]`.
    pub fn family(seed: u64, count: usize) -> Vec<Bump> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count).map(|_| Bump { sigma: rng.gen_range(0.8..=1.2), center: rng.gen_range(-3.0..=0.0) }).collect()
    }
}

/// The level map `x ↦ G(x)/u(x)` of a radial pair with pullback and pushforward.
#[derive(Debug, Clone)]
pub struct RadialSpectralMap {
    pub pair: RadialPair,
}

/// Quadrature nodes in `s` carrying `r`, `τ`, `sqrt(uG)` and `W dν / ds`.
struct Nodes {
    r: Vec<f64>,
    tau: Vec<f64>,
    amp: Vec<f64>,
    measure: Vec<f64>,
}

const GL_X: [f64; 5] =
    [-0.906_179_845_938_664, -0.538_469_310_105_683, 0.0, 0.538_469_310_105_683, 0.906_179_845_938_664];
const GL_W: [f64; 5] =
    [0.236_926_885_056_189, 0.478_628_670_499_366, 0.568_888_888_888_889, 0.478_628_670_499_366, 0.236_926_885_056_189];

impl RadialSpectralMap {
    pub fn new(pair: RadialPair) -> Self {
        RadialSpectralMap { pair }
    }

    /// `t = G/u` at radius `r`.
    pub fn t_of_r(&self, r: f64) -> Result<f64> {
        Ok(self.pair.tau(r)?.exp())
    }

    /// `u(r) F(G/u)`.
    pub fn pullback(&self, f: &dyn Fn(f64) -> f64, r: f64) -> Result<f64> {
        Ok(self.pair.log_u(r)?.exp() * f(self.t_of_r(r)?))
    }

    /// `F(t) = f(r(t)) / u(r(t))`.
    pub fn pushforward(&self, f: &dyn Fn(f64) -> f64, t: f64) -> Result<f64> {
        let r = self.pair.radius_at_level(t.ln())?;
        Ok(f(r) / self.pair.log_u(r)?.exp())
    }

    fn nodes(&self, tau_lo: f64, tau_hi: f64) -> Result<Nodes> {
        let r_in = self.pair.radius_at_level(tau_hi)?;
        let r_out = self.pair.radius_at_level(tau_lo)?;
        let (a, b) = (r_in.ln(), r_out.ln());
        let panels = ((b - a) / 0.01).ceil().max(100.0) as usize;
        let h = (b - a) / panels as f64;
        let n = self.pair.dim() as f64;
        let area = sphere_area(self.pair.dim());
        let mut out = Nodes { r: vec![], tau: vec![], amp: vec![], measure: vec![] };
        for p in 0..panels {
            let mid = a + (p as f64 + 0.5) * h;
            for (x, w) in GL_X.iter().zip(GL_W) {
                let s = mid + 0.5 * h * x;
                let r = s.exp();
                out.r.push(r);
                out.tau.push(self.pair.tau(r)?);
                out.amp.push((0.5 * (self.pair.log_u(r)? + self.pair.log_g(r)?)).exp());
                out.measure.push(0.5 * h * w * area * self.pair.weight(r)? * r.powf(n));
            }
        }
        Ok(out)
    }

    /// `∫|u F(G/u)|² W dν` against `∫ |F|² dt/(4t²)` over `t ∈ [t_lo, t_hi]`.
    pub fn isometry_check(&self, f: &dyn Fn(f64) -> f64, t_lo: f64, t_hi: f64) -> Result<(f64, f64)> {
        if !(t_lo > 0.0 && t_hi > t_lo) {
            return invalid("level window must satisfy 0 < t_lo < t_hi");
        }
        let nodes = self.nodes(t_lo.ln(), t_hi.ln())?;
        let mut lhs = 0.0;
        for k in 0..nodes.r.len() {
            let v = self.pullback(f, nodes.r[k])?;
            lhs += v * v * nodes.measure[k];
        }
        let panels = ((t_hi / t_lo).ln() / 0.01).ceil().max(100.0) as usize;
        let rhs = gauss_legendre(
            |tau| {
                let t = tau.exp();
                f(t).powi(2) / (4.0 * t)
            },
            t_lo.ln(),
            t_hi.ln(),
            panels,
        );
        Ok((lhs, rhs))
    }
}

/// `φ_ξ = sqrt(uG) e^{iξ log(G/u)}`, a solution of `Pφ = (1 + 4ξ²) W φ`.
#[derive(Debug, Clone)]
pub struct ModeFunction {
    pub xi: f64,
    pub pair: RadialPair,
}

impl ModeFunction {
    pub fn new(xi: f64, pair: RadialPair) -> Self {
        ModeFunction { xi, pair }
    }

    pub fn eigenvalue(&self) -> f64 {
        1.0 + 4.0 * self.xi * self.xi
    }

    pub fn eval(&self, r: f64) -> Result<Complex64> {
        let amp = (0.5 * (self.pair.log_u(r)? + self.pair.log_g(r)?)).exp();
        Ok(Complex64::from_polar(amp, self.xi * self.pair.tau(r)?))
    }

    /// Relative residual of `(P - (1+4ξ²)W)φ` at `r`, worst of real and imaginary parts.
    pub fn residual(&self, r: f64) -> Result<f64> {
        let lam = self.eigenvalue();
        let w = self.pair.weight(r)?;
        let mut worst: f64 = 0.0;
        for part in [0, 1] {
            let f = |s: f64| -> Result<f64> {
                let z = self.eval(s.exp())?;
                Ok(if part == 0 { z.re } else { z.im })
            };
            let (res, scale) = radial_operator_terms(&self.pair, &f, r, lam * w)?;
            if scale > 0.0 {
                worst = worst.max(res.abs() / scale);
            }
        }
        Ok(worst)
    }
}

const FD_STEP: f64 = 1e-3;

/// First and second derivative in `s` by fourth-order differences.
fn fd_s(f: &dyn Fn(f64) -> Result<f64>, s: f64, h: f64) -> Result<(f64, f64, f64)> {
    let fm2 = f(s - 2.0 * h)?;
    let fm1 = f(s - h)?;
    let f0 = f(s)?;
    let fp1 = f(s + h)?;
    let fp2 = f(s + 2.0 * h)?;
    let d1 = (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h);
    let d2 = (-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2) / (12.0 * h * h);
    Ok((f0, d1, d2))
}

/// `(Pφ - c φ, size of the terms)` for radial `φ` given as a function of `s`.
fn radial_operator_terms(pair: &RadialPair, f: &dyn Fn(f64) -> Result<f64>, r: f64, c: f64) -> Result<(f64, f64)> {
    let n = pair.dim() as f64;
    let (v, d1, d2) = fd_s(f, r.ln(), FD_STEP)?;
    let pot = pair.potential(r);
    let lap = (d2 + (n - 2.0) * d1) / (r * r);
    let res = -lap + pot * v - c * v;
    let scale = d2.abs() / (r * r) + (n - 2.0) * d1.abs() / (r * r) + (pot * v).abs() + (c * v).abs();
    Ok((res, scale))
}

/// A function of `t` with its second derivative.
pub struct LevelFunction<'a> {
    pub f: &'a dyn Fn(f64) -> f64,
    pub d2: &'a dyn Fn(f64) -> f64,
}

/// Max relative residual of `(1/W) P(u F(G/u)) = -4 u F''(G/u) (G/u)²` over the probe radii.
pub fn conjugation_check(map: &RadialSpectralMap, f: &LevelFunction, probes: &[f64]) -> Result<f64> {
    let pair = &map.pair;
    let mut worst: f64 = 0.0;
    for &r in probes {
        let phi = |s: f64| map.pullback(f.f, s.exp());
        let (res, scale) = radial_operator_terms(pair, &phi, r, 0.0)?;
        let w = pair.weight(r)?;
        let t = map.t_of_r(r)?;
        let rhs = -4.0 * pair.log_u(r)?.exp() * (f.d2)(t) * t * t;
        let lhs = res / w;
        let denom = scale / w + rhs.abs();
        if denom > 0.0 {
            worst = worst.max((lhs - rhs).abs() / denom);
        }
    }
    Ok(worst)
}

/// Conjugation residual for `F(t) = p(log t)` with `p` a polynomial (coefficients low to high).
pub fn d_operator_check(map: &RadialSpectralMap, coeffs: &[f64], probes: &[f64]) -> Result<f64> {
    let p = |x: f64, d: usize| -> f64 {
        let mut acc = 0.0;
        for (k, c) in coeffs.iter().enumerate().skip(d) {
            let mut fac = 1.0;
            for j in 0..d {
                fac *= (k - j) as f64;
            }
            acc += c * fac * x.powi((k - d) as i32);
        }
        acc
    };
    let f = |t: f64| p(t.ln(), 0);
    let d2 = |t: f64| (p(t.ln(), 2) - p(t.ln(), 1)) / (t * t);
    conjugation_check(map, &LevelFunction { f: &f, d2: &d2 }, probes)
}

/// `Ff(ξ) = sqrt(2/π) ∫ f φ_ξ W dν` for radial `f` supported in `τ ∈ [tau_lo, tau_hi]`.
pub fn generalized_fourier(
    map: &RadialSpectralMap,
    f: &dyn Fn(f64) -> Result<f64>,
    tau_lo: f64,
    tau_hi: f64,
    xi: &[f64],
) -> Result<Vec<Complex64>> {
    let nodes = map.nodes(tau_lo, tau_hi)?;
    let vals: Vec<f64> = nodes.r.iter().map(|&r| f(r)).collect::<Result<_>>()?;
    Ok(transform_nodes(&nodes, &vals, xi))
}

fn transform_nodes(nodes: &Nodes, vals: &[f64], xi: &[f64]) -> Vec<Complex64> {
    let c = (2.0 / PI).sqrt();
    xi.iter()
        .map(|&x| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, v) in vals.iter().enumerate() {
                acc += Complex64::from_polar(v * nodes.amp[k] * nodes.measure[k], x * nodes.tau[k]);
            }
            acc * c
        })
        .collect()
}

/// Inverse transform at radius `r`: `sqrt(2/π) ∫ Ff(ξ) conj(φ_ξ(r)) dξ`.
pub fn inverse_fourier(map: &RadialSpectralMap, transform: &[Complex64], xi: &XiGrid, r: f64) -> Result<f64> {
    let amp = (0.5 * (map.pair.log_u(r)? + map.pair.log_g(r)?)).exp();
    let tau = map.pair.tau(r)?;
    let sum = xi.integrate(|k| (transform[k] * Complex64::from_polar(1.0, -xi.xi[k] * tau)).re);
    Ok((2.0 / PI).sqrt() * amp * sum)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlancherelReport {
    /// `∫ |f|² W dν`.
    pub norm_sq: f64,
    pub transform_norm_sq: f64,
    pub plancherel_error: f64,
    /// Max inversion error relative to `max |f|`.
    pub inversion_error: f64,
    /// Max deviation of `F((1/W)Pf)` from `(1+4ξ²) Ff`, relative.
    pub multiplier_error: f64,
}

/// Transform, Plancherel, inversion and multiplier checks for `f = sqrt(uG) χ(τ)`.
pub fn bump_checks(map: &RadialSpectralMap, bump: &Bump, xi: &XiGrid, seed: u64) -> Result<PlancherelReport> {
    let (lo, hi) = bump.support();
    let nodes = map.nodes(lo, hi)?;
    let vals: Vec<f64> = nodes.tau.iter().zip(&nodes.amp).map(|(t, a)| a * bump.chi(*t)).collect();
    let norm_sq: f64 = vals.iter().zip(&nodes.measure).map(|(v, m)| v * v * m).sum();
    let ff = transform_nodes(&nodes, &vals, &xi.xi);
    let transform_norm_sq = xi.integrate(|k| ff[k].norm_sqr());

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fmax = nodes.amp.iter().zip(&nodes.tau).map(|(a, t)| a * bump.chi(*t)).fold(0.0f64, f64::max);
    let mut inversion_error: f64 = 0.0;
    for _ in 0..100 {
        let tau = bump.center + bump.sigma * rng.gen_range(-3.0..=3.0);
        let r = map.pair.radius_at_level(tau)?;
        let exact = (0.5 * (map.pair.log_u(r)? + map.pair.log_g(r)?)).exp() * bump.chi(tau);
        let rec = inverse_fourier(map, &ff, xi, r)?;
        inversion_error = inversion_error.max((rec - exact).abs() / fmax);
    }

    // (1/W)P f by differences of f in s
    let pair = &map.pair;
    let image: Vec<f64> = nodes
        .r
        .iter()
        .map(|&r| {
            let f = |s: f64| -> Result<f64> {
                let rr = s.exp();
                Ok((0.5 * (pair.log_u(rr)? + pair.log_g(rr)?)).exp() * bump.chi(pair.tau(rr)?))
            };
            let (res, _) = radial_operator_terms(pair, &f, r, 0.0)?;
            Ok(res / pair.weight(r)?)
        })
        .collect::<Result<_>>()?;
    let fg = transform_nodes(&nodes, &image, &xi.xi);
    let mut num: f64 = 0.0;
    let mut den: f64 = 0.0;
    for (k, x) in xi.xi.iter().enumerate() {
        let target = ff[k] * (1.0 + 4.0 * x * x);
        num = num.max((fg[k] - target).norm());
        den = den.max(target.norm());
    }
    Ok(PlancherelReport {
        norm_sq,
        transform_norm_sq,
        plancherel_error: (transform_norm_sq - norm_sq).abs() / norm_sq,
        inversion_error,
        multiplier_error: if den > 0.0 { num / den } else { 0.0 },
    })
}

/// `(‖f‖²_W, ‖M T h‖²)` where `h = F/(2t)` and `T h(t) = h(1/t)/t`: the radial isometry,
/// the inversion and the Mellin transform composed.
pub fn composed_unitarity(map: &RadialSpectralMap, bump: &Bump, xi: &XiGrid) -> Result<(f64, f64)> {
    let (lo, hi) = bump.support();
    let nodes = map.nodes(lo, hi)?;
    let norm_sq: f64 =
        nodes.tau.iter().zip(&nodes.amp).zip(&nodes.measure).map(|((t, a), m)| (a * bump.chi(*t)).powi(2) * m).sum();
    // F(t) = t^{1/2} χ(log t), so T h(t) = F(1/t)/2
    let grid = std::sync::Arc::new(LogGrid::new((-hi - 2.0).exp(), (-lo + 2.0).exp(), 4001)?);
    let th = SampledFunction::from_fn(grid, |t| 0.5 * t.powf(-0.5) * bump.chi(-t.ln()));
    let (_, m) = mellin_plancherel(&th, xi)?;
    Ok((norm_sq, m))
}

/// Relative defect of `D'(T h) = T(D' h)` with `D' = -8t d/dt - 4t² d²/dt²` and
/// `T h(t) = h(1/t)/t`, at the probe points.
pub fn inversion_intertwining(
    h: &dyn Fn(f64) -> f64,
    dh: &dyn Fn(f64) -> f64,
    d2h: &dyn Fn(f64) -> f64,
    probes: &[f64],
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &t in probes {
        if !(t > 0.0) {
            return invalid("probe points must be positive");
        }
        let th = |s: f64| -> Result<f64> {
            let x = s.exp();
            Ok(h(1.0 / x) / x)
        };
        // in s = log t: t g' = g_s, t² g'' = g_ss - g_s
        let (_, g1, g2) = fd_s(&th, t.ln(), FD_STEP)?;
        let lhs = -8.0 * g1 - 4.0 * (g2 - g1);
        let u = 1.0 / t;
        let dprime = -8.0 * u * dh(u) - 4.0 * u * u * d2h(u);
        let rhs = dprime / t;
        let scale = 8.0 * g1.abs() + 4.0 * (g2.abs() + g1.abs()) + rhs.abs();
        if scale > 0.0 {
            worst = worst.max((lhs - rhs).abs() / scale);
        }
    }
    Ok(worst)
}

/// `(2/(πρ)) ∫_{|τ| < ρπ} φ_k φ̄_l W dν` with `φ_k = sqrt(uG) e^{ikτ/ρ}`.
pub fn torus_orthonormality(map: &RadialSpectralMap, rho: f64, k: i32, l: i32) -> Result<Complex64> {
    if !(rho > 0.0) {
        return invalid("torus radius must be positive");
    }
    let nodes = map.nodes(-rho * PI, rho * PI)?;
    let dk = (k - l) as f64 / rho;
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..nodes.r.len() {
        acc += Complex64::from_polar(nodes.amp[i] * nodes.amp[i] * nodes.measure[i], dk * nodes.tau[i]);
    }
    Ok(acc * (2.0 / (PI * rho)))
}

/// `(∫_{a ≤ G/u ≤ b} u G W dν, ¼ log(b/a))`.
pub fn coarea_identity(pair: &RadialPair, a: f64, b: f64) -> Result<(f64, f64)> {
    if !(a > 0.0) {
        return invalid("levels must be positive");
    }
    if a > b {
        return invalid(format!("level a = {a} exceeds b = {b}"));
    }
    if a == b {
        return Ok((0.0, 0.0));
    }
    let lhs = level_integral(pair, a.ln(), b.ln(), &|r| Ok((pair.log_u(r)? + pair.log_g(r)?).exp() * pair.weight(r)?))?;
    Ok((lhs, 0.25 * (b / a).ln()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn classical() -> RadialSpectralMap {
        RadialSpectralMap::new(RadialPair::classical(3).unwrap())
    }

    #[test]
    fn mellin_of_exponential() {
        let grid = Arc::new(LogGrid::new(1e-20, 60.0, 8001).unwrap());
        let f = SampledFunction::from_fn(grid.clone(), |r| (-r).exp());
        let m = mellin_transform(&f, &[0.0]).unwrap();
        assert!((m[0].re - 0.5f64.sqrt()).abs() < 1e-5);
        assert!(m[0].im.abs() < 1e-10);
        let g = SampledFunction::from_fn(grid.clone(), |r| (-2.0 * r).exp());
        let sum = SampledFunction::from_fn(grid, |r| (-r).exp() + (-2.0 * r).exp());
        let xi = [-1.0, 0.3, 2.0];
        let (a, b, c) = (
            mellin_transform(&f, &xi).unwrap(),
            mellin_transform(&g, &xi).unwrap(),
            mellin_transform(&sum, &xi).unwrap(),
        );
        for k in 0..3 {
            assert!((a[k] + b[k] - c[k]).norm() < 1e-12);
        }
    }

    #[test]
    fn mellin_rejects_slow_decay() {
        let grid = Arc::new(LogGrid::new(1e-3, 1e3, 2001).unwrap());
        let f = SampledFunction::from_fn(grid, |r| 1.0 / (1.0 + r));
        assert!(matches!(mellin_transform(&f, &[0.0]), Err(Error::InsufficientDecay(_))));
    }

    #[test]
    fn mellin_plancherel_on_bump() {
        let grid = Arc::new(LogGrid::new((-12.0f64).exp(), (12.0f64).exp(), 4001).unwrap());
        let f = SampledFunction::from_fn(grid, |r| r.powf(-0.5) * (-(r.ln() - 0.5).powi(2)).exp());
        let (a, b) = mellin_plancherel(&f, &XiGrid::standard()).unwrap();
        assert!((a - b).abs() / a < 1e-4);
    }

    #[test]
    fn isometry_on_level_functions() {
        for map in [classical(), RadialSpectralMap::new(RadialPair::Yukawa)] {
            let f = |t: f64| t * (1.0 - t.ln().powi(2) / 9.0).max(0.0);
            let (a, b) = map.isometry_check(&f, (-3.0f64).exp(), (3.0f64).exp()).unwrap();
            assert!((a - b).abs() < 1e-6 * b.max(1.0), "{a} {b}");
        }
    }

    #[test]
    fn pullback_pushforward_roundtrip() {
        let map = RadialSpectralMap::new(RadialPair::Yukawa);
        let f = |t: f64| t.sqrt() + 1.0;
        for r in [0.1, 1.0, 5.0] {
            let v = map.pullback(&f, r).unwrap();
            let g = |x: f64| map.pullback(&f, x).unwrap();
            let back = map.pushforward(&g, map.t_of_r(r).unwrap()).unwrap();
            assert!((back * map.pair.log_u(r).unwrap().exp() - v).abs() < 1e-9 * v);
        }
    }

    #[test]
    fn modes_solve_the_eigen_relation() {
        for pair in [RadialPair::classical(3).unwrap(), RadialPair::Yukawa] {
            for xi in [0.0, 0.5, 2.0] {
                let mode = ModeFunction::new(xi, pair.clone());
                assert!(mode.eigenvalue() >= 1.0);
                for r in [0.3, 1.0, 4.0] {
                    assert!(mode.residual(r).unwrap() < 1e-5);
                }
            }
        }
    }

    #[test]
    fn conjugation_examples() {
        let probes = [0.2, 0.7, 1.0, 3.0, 9.0];
        for map in [classical(), RadialSpectralMap::new(RadialPair::Yukawa)] {
            let a = 0.25;
            let f = move |t: f64| t.powf(a);
            let d2 = move |t: f64| a * (a - 1.0) * t.powf(a - 2.0);
            assert!(conjugation_check(&map, &LevelFunction { f: &f, d2: &d2 }, &probes).unwrap() < 1e-8);
            let lin = |t: f64| t;
            let zero = |_: f64| 0.0;
            assert!(conjugation_check(&map, &LevelFunction { f: &lin, d2: &zero }, &probes).unwrap() < 1e-8);
            let c = |t: f64| t.sqrt() * (0.5 * t.ln()).cos();
            // t² F'' = -F/2, eigen-relation with λ = 2
            let c2 = |t: f64| -0.5 * t.powf(-1.5) * (0.5 * t.ln()).cos();
            assert!(conjugation_check(&map, &LevelFunction { f: &c, d2: &c2 }, &probes).unwrap() < 1e-6);
            assert!(d_operator_check(&map, &[1.0, -0.5, 0.25, 0.1], &probes).unwrap() < 1e-6);
        }
    }

    #[test]
    fn transform_checks_on_bumps() {
        let xi = XiGrid::standard();
        for map in [classical(), RadialSpectralMap::new(RadialPair::Yukawa)] {
            for (i, bump) in Bump::family(42, 3).iter().enumerate() {
                let rep = bump_checks(&map, bump, &xi, i as u64).unwrap();
                assert!((rep.norm_sq - 0.25 * bump.l2_sq()).abs() < 1e-8);
                assert!(rep.plancherel_error < 1e-4);
                assert!(rep.inversion_error < 1e-4);
                assert!(rep.multiplier_error < 1e-4, "{}", rep.multiplier_error);
                let (a, b) = composed_unitarity(&map, bump, &xi).unwrap();
                assert!((a - b).abs() / a < 1e-4);
            }
        }
    }

    #[test]
    fn zero_transforms_to_zero() {
        let map = classical();
        let out = generalized_fourier(&map, &|_| Ok(0.0), -1.0, 1.0, &[0.0, 1.0]).unwrap();
        assert!(out.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn inversion_commutes_with_conjugated_operator() {
        let h = |t: f64| (-(t.ln()).powi(2)).exp();
        let dh = |t: f64| -2.0 * t.ln() / t * h(t);
        let d2h = |t: f64| {
            let l = t.ln();
            h(t) * (4.0 * l * l - 2.0 + 2.0 * l) / (t * t)
        };
        assert!(inversion_intertwining(&h, &dh, &d2h, &[0.3, 1.0, 2.5]).unwrap() < 1e-8);
    }

    #[test]
    fn torus_modes() {
        for map in [classical(), RadialSpectralMap::new(RadialPair::Yukawa)] {
            for rho in [0.5, 1.0] {
                for k in -2..=2 {
                    for l in -2..=2 {
                        let z = torus_orthonormality(&map, rho, k, l).unwrap();
                        let want = if k == l { 1.0 } else { 0.0 };
                        assert!((z - Complex64::new(want, 0.0)).norm() < 1e-6);
                    }
                }
            }
        }
    }

    #[test]
    fn coarea_examples() {
        let e = std::f64::consts::E;
        for pair in [RadialPair::classical(3).unwrap(), RadialPair::Yukawa] {
            for (a, b) in [(1.0, e), (e, e.powi(3))] {
                let (lhs, rhs) = coarea_identity(&pair, a, b).unwrap();
                assert!((lhs - rhs).abs() < 1e-6);
            }
            assert_eq!(coarea_identity(&pair, 2.0, 2.0).unwrap().0, 0.0);
            assert!(coarea_identity(&pair, 3.0, 2.0).is_err());
        }
    }
}
