//! Closed-form weights and their constants.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::construct::{dist2, hardy_weight_multi, hardy_weight_pair, HardyWeight, MetricSpec, ScalarField};
use crate::error::{invalid, Error, Result};
use crate::radial::RadialProfile;

/// `((n-2)/2)²`.
pub fn hardy_constant(n: usize) -> f64 {
    let c = (n as f64 - 2.0) / 2.0;
    c * c
}

#[derive(Debug, Clone)]
pub struct NamedExample {
    pub name: String,
    pub n: usize,
    pub weight: HardyWeight,
    /// Sharp constant of the example (coefficient of the leading singular term).
    pub constant: f64,
    pub domain: String,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CatalogParams {
    pub n: usize,
    /// Principal Dirichlet eigenvalue of the cross-section, for cones.
    pub lambda0: Option<f64>,
    /// Half opening angle of a spherical-cap cross-section, for cones.
    pub cap_angle: Option<f64>,
}

pub const CATALOG_NAMES: [&str; 8] = [
    "hardy_punctured",
    "leray_disk",
    "ball",
    "cone",
    "convex_distance",
    "one_dim_halfline",
    "one_dim_massive",
    "halfspace_poisson",
];

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn classical(name: &str, params: &CatalogParams) -> Result<NamedExample> {
    let n = params.n;
    let example = |weight: HardyWeight, constant: f64, domain: &str| NamedExample {
        name: name.to_string(),
        n,
        weight,
        constant,
        domain: domain.to_string(),
    };
    match name {
        "hardy_punctured" => {
            require_dim(n, 3, name)?;
            let c = hardy_constant(n);
            let w = HardyWeight::radial(n, "((n-2)/2)^2 / |x|^2", move |r| c / (r * r));
            Ok(example(w, c, "R^n minus the origin"))
        }
        "leray_disk" => {
            if n != 2 {
                return invalid("leray_disk is planar (n = 2)");
            }
            let w = HardyWeight::from_fn(2, "1 / (4 |x|^2 log^2 |x|)", |x| {
                let r = norm(x);
                if !(r > 0.0 && r < 1.0) {
                    return Err(Error::NonPositive { point: x.to_vec(), value: r });
                }
                Ok(1.0 / (4.0 * r * r * r.ln().powi(2)))
            });
            Ok(example(w, 0.25, "unit disk minus the origin"))
        }
        "ball" => {
            require_dim(n, 3, name)?;
            let nf = n as f64;
            let w = HardyWeight::from_fn(n, "(n-2)^2 / (4 (|x| (1 - |x|^(n-2)))^2)", move |x| {
                let r = norm(x);
                if !(r > 0.0 && r < 1.0) {
                    return Err(Error::NonPositive { point: x.to_vec(), value: r });
                }
                let d = r * (1.0 - r.powf(nf - 2.0));
                Ok((nf - 2.0).powi(2) / (4.0 * d * d))
            });
            Ok(example(w, hardy_constant(n), "unit ball minus the origin"))
        }
        "cone" => {
            require_dim(n, 2, name)?;
            let l0 = match (params.lambda0, params.cap_angle) {
                (Some(l), _) => l,
                (None, Some(a)) => cap_eigenvalue(n, a)?,
                (None, None) => (n - 1) as f64,
            };
            if !(l0 >= 0.0) {
                return invalid("cross-section eigenvalue must be nonnegative");
            }
            let c = ((n as f64 - 2.0).powi(2) + 4.0 * l0) / 4.0;
            let w = HardyWeight::radial(n, "((n-2)^2 + 4 lambda0) / (4 |x|^2)", move |r| c / (r * r));
            Ok(example(w, c, "cone over a cross-section of the sphere"))
        }
        "convex_distance" => {
            require_dim(n, 1, name)?;
            let w = HardyWeight::from_fn(n, "1 / (4 d(x)^2), unit ball", |x| {
                let d = 1.0 - norm(x);
                if !(d > 0.0) {
                    return Err(Error::NonPositive { point: x.to_vec(), value: d });
                }
                Ok(0.25 / (d * d))
            });
            Ok(example(w, 0.25, "unit ball (convex), distance to the boundary"))
        }
        "one_dim_halfline" => {
            if n != 1 {
                return invalid("one_dim_halfline is one-dimensional");
            }
            let w = HardyWeight::from_fn(1, "1 / (4 x^2)", |x| {
                if !(x[0] > 0.0) {
                    return Err(Error::NonPositive { point: x.to_vec(), value: x[0] });
                }
                Ok(0.25 / (x[0] * x[0]))
            });
            Ok(example(w, 0.25, "half-line (0, inf)"))
        }
        "one_dim_massive" => {
            if n != 1 {
                return invalid("one_dim_massive is one-dimensional");
            }
            let w = HardyWeight::from_fn(1, "1", |_| Ok(1.0));
            Ok(example(w, 1.0, "real line, P = -u'' + u"))
        }
        "halfspace_poisson" => {
            require_dim(n, 2, name)?;
            let nf = n as f64;
            let w = HardyWeight::from_fn(n, "1/4 (1/x_n^2 + n(n-2)/|x|^2)", move |x| {
                let xn = x[n - 1];
                if !(xn > 0.0) {
                    return Err(Error::NonPositive { point: x.to_vec(), value: xn });
                }
                let r2 = x.iter().map(|v| v * v).sum::<f64>();
                Ok(0.25 * (1.0 / (xn * xn) + nf * (nf - 2.0) / r2))
            });
            Ok(example(w, 0.25, "upper half-space"))
        }
        other => invalid(format!("unknown catalog entry '{other}'")),
    }
}

fn require_dim(n: usize, min: usize, name: &str) -> Result<()> {
    if n < min {
        return invalid(format!("{name} needs n ≥ {min}"));
    }
    Ok(())
}

/// Principal Dirichlet eigenvalue of the geodesic cap `{θ < angle}` in `S^{n-1}`.
///
/// Zonal shooting for `y'' + (n-2) cot θ y' + λ y = 0` with bisection on `λ`.
pub fn cap_eigenvalue(n: usize, angle: f64) -> Result<f64> {
    if n < 2 {
        return invalid("cap eigenvalue needs n ≥ 2");
    }
    if !(angle > 0.0 && angle < PI) {
        return invalid(format!("cap angle must lie in (0, π), got {angle}"));
    }
    let positive_on_cap = |lambda: f64| -> bool {
        let nf = n as f64;
        let a2 = -lambda / (2.0 * (nf - 1.0));
        let a4 = a2 * (2.0 * (nf - 2.0) / 3.0 - lambda) / (4.0 * (nf + 1.0));
        let t0 = (1e-2f64).min(0.1 * angle);
        let mut y = 1.0 + a2 * t0 * t0 + a4 * t0.powi(4);
        let mut p = 2.0 * a2 * t0 + 4.0 * a4 * t0.powi(3);
        let steps = 20_000;
        let h = (angle - t0) / steps as f64;
        let f = |t: f64, y: f64, p: f64| -> (f64, f64) { (p, -(nf - 2.0) / t.tan() * p - lambda * y) };
        let mut t = t0;
        for _ in 0..steps {
            let (a1, b1) = f(t, y, p);
            let (a2, b2) = f(t + 0.5 * h, y + 0.5 * h * a1, p + 0.5 * h * b1);
            let (a3, b3) = f(t + 0.5 * h, y + 0.5 * h * a2, p + 0.5 * h * b2);
            let (a4, b4) = f(t + h, y + h * a3, p + h * b3);
            y += h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
            p += h / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4);
            t += h;
            if y <= 0.0 {
                return false;
            }
        }
        true
    };
    let mut hi = 1.0;
    while positive_on_cap(hi) {
        hi *= 2.0;
        if hi > 1e8 {
            return Err(Error::NoConvergence { iterations: 0, residual: hi });
        }
    }
    let mut lo = 0.0;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if positive_on_cap(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MultipoleVariant {
    /// Pairwise sum with user weights (`N` poles, or `N+1` with the constant solution first).
    General,
    /// `u₀ = 1` and `u_i = |x - x_i|^{2-n}` with equal weights `1/(N+1)`.
    Uniform,
    /// `(C_H/N) Σ |x-x_i|^{-2} + (C_H/N²) Σ_{i<j} |x_i-x_j|² / (|x-x_i|²|x-x_j|²)`.
    Bde,
    /// `((n-2)/N)² Σ_{i<j} |x_i-x_j|² / (|x-x_i|²|x-x_j|²)`.
    Cz,
}

impl MultipoleVariant {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "general" => Ok(MultipoleVariant::General),
            "uniform" => Ok(MultipoleVariant::Uniform),
            "bde" | "w1" => Ok(MultipoleVariant::Bde),
            "cz" | "w2" => Ok(MultipoleVariant::Cz),
            other => invalid(format!("unknown multipolar variant '{other}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultipoleConfig {
    pub n: usize,
    pub poles: Vec<Vec<f64>>,
    pub alpha: Option<Vec<f64>>,
    pub variant: MultipoleVariant,
}

impl MultipoleConfig {
    pub fn new(n: usize, poles: Vec<Vec<f64>>, variant: MultipoleVariant) -> Self {
        MultipoleConfig { n, poles, alpha: None, variant }
    }

    fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return invalid("multipolar weights need n ≥ 3");
        }
        if self.poles.len() < 2 {
            return invalid("at least two poles are required");
        }
        for p in &self.poles {
            if p.len() != self.n {
                return invalid(format!("pole {p:?} does not have dimension {}", self.n));
            }
        }
        for i in 0..self.poles.len() {
            for j in i + 1..self.poles.len() {
                if dist2(&self.poles[i], &self.poles[j]) == 0.0 {
                    return invalid(format!("coincident poles at {:?}", self.poles[i]));
                }
            }
        }
        Ok(())
    }

    /// Weights of `(u₀, u₁, …)` with `u₀ = 1` first, or of `(u₁, …)` only.
    fn resolved_alpha(&self) -> Result<(bool, Vec<f64>)> {
        let nn = self.poles.len();
        match self.variant {
            MultipoleVariant::Uniform => Ok((true, vec![1.0 / (nn as f64 + 1.0); nn + 1])),
            MultipoleVariant::Cz | MultipoleVariant::Bde => Ok((false, vec![1.0 / nn as f64; nn])),
            MultipoleVariant::General => {
                let a = self.alpha.clone().ok_or_else(|| Error::InvalidInput("general variant needs alpha".into()))?;
                if a.len() == nn + 1 {
                    Ok((true, a))
                } else if a.len() == nn {
                    Ok((false, a))
                } else {
                    invalid(format!("alpha has {} entries for {nn} poles", a.len()))
                }
            }
        }
    }
}

/// `|x|²W` limits at a pole and at infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultipolarConstants {
    pub near_pole: f64,
    pub at_infinity: f64,
}

fn pole_field(n: usize, pole: &[f64]) -> ScalarField {
    ScalarField::radial_power(n, pole.to_vec(), 2.0 - n as f64)
}

fn pole_check(x: &[f64], poles: &[Vec<f64>]) -> Result<()> {
    for p in poles {
        if dist2(x, p) == 0.0 {
            return Err(Error::Singular(0.0));
        }
    }
    Ok(())
}

/// Closed-form multipolar weight and its constants.
pub fn multipolar_weight(cfg: &MultipoleConfig) -> Result<(HardyWeight, MultipolarConstants)> {
    cfg.validate()?;
    let n = cfg.n;
    let nf = n as f64;
    let nn = cfg.poles.len();
    let nnf = nn as f64;
    let ch = hardy_constant(n);
    let poles = cfg.poles.clone();
    let cross = move |x: &[f64], poles: &[Vec<f64>]| -> (f64, f64) {
        let d: Vec<f64> = poles.iter().map(|p| dist2(x, p)).collect();
        let singles: f64 = d.iter().map(|v| 1.0 / v).sum();
        let mut pairs = 0.0;
        for i in 0..poles.len() {
            for j in i + 1..poles.len() {
                pairs += dist2(&poles[i], &poles[j]) / (d[i] * d[j]);
            }
        }
        (singles, pairs)
    };
    match cfg.variant {
        MultipoleVariant::Uniform => {
            let c = ((nf - 2.0) / (nnf + 1.0)).powi(2);
            let w = HardyWeight::from_fn(n, "((n-2)/(N+1))^2 (sum 1/|x-x_i|^2 + sum_{i<j} pair terms)", move |x| {
                pole_check(x, &poles)?;
                let (s, p) = cross(x, &poles);
                Ok(c * (s + p))
            });
            let k = 4.0 * nnf / (nnf + 1.0).powi(2) * ch;
            Ok((w, MultipolarConstants { near_pole: k, at_infinity: k }))
        }
        MultipoleVariant::Bde => {
            let w = HardyWeight::from_fn(n, "(C_H/N) sum 1/|x-x_i|^2 + (C_H/N^2) sum_{i<j} pair terms", move |x| {
                pole_check(x, &poles)?;
                let (s, p) = cross(x, &poles);
                Ok(ch / nnf * s + ch / (nnf * nnf) * p)
            });
            let near = (2.0 * nnf - 1.0) / (nnf * nnf) * ch;
            Ok((w, MultipolarConstants { near_pole: near, at_infinity: ch }))
        }
        MultipoleVariant::Cz => {
            let c = ((nf - 2.0) / nnf).powi(2);
            let w = HardyWeight::from_fn(n, "((n-2)/N)^2 sum_{i<j} pair terms", move |x| {
                pole_check(x, &poles)?;
                let (_, p) = cross(x, &poles);
                Ok(c * p)
            });
            let near = (4.0 * nnf - 4.0) / (nnf * nnf) * ch;
            Ok((w, MultipolarConstants { near_pole: near, at_infinity: 0.0 }))
        }
        MultipoleVariant::General => {
            let w = multipolar_brute_force(cfg)?;
            let (with_constant, alpha) = cfg.resolved_alpha()?;
            let off = usize::from(with_constant);
            let near = (0..nn)
                .map(|i| (nf - 2.0).powi(2) * alpha[i + off] * (1.0 - alpha[i + off]))
                .fold(f64::INFINITY, f64::min);
            let at_inf = if with_constant { (nf - 2.0).powi(2) * alpha[0] * (1.0 - alpha[0]) } else { 0.0 };
            Ok((w, MultipolarConstants { near_pole: near, at_infinity: at_inf }))
        }
    }
}

/// Multipolar weight assembled from the generic pairwise construction.
pub fn multipolar_brute_force(cfg: &MultipoleConfig) -> Result<HardyWeight> {
    cfg.validate()?;
    let n = cfg.n;
    let metric = MetricSpec::identity(n);
    let fields: Vec<ScalarField> = cfg.poles.iter().map(|p| pole_field(n, p)).collect();
    let (with_constant, alpha) = cfg.resolved_alpha()?;
    match cfg.variant {
        MultipoleVariant::Bde => {
            let nnf = cfg.poles.len() as f64;
            let one = ScalarField::constant(n, 1.0);
            let singles = fields.iter().map(|f| hardy_weight_pair(f, &one, &metric)).collect::<Result<Vec<_>>>()?;
            let pairs = hardy_weight_multi(&fields, &alpha, &metric)?;
            Ok(HardyWeight::from_fn(n, "BDE from pair weights", move |x| {
                let mut s = 0.0;
                for w in &singles {
                    s += w.value(x)?;
                }
                Ok(s / nnf + 0.25 * pairs.value(x)?)
            }))
        }
        _ => {
            let mut all = Vec::new();
            if with_constant {
                all.push(ScalarField::constant(n, 1.0));
            }
            all.extend(fields);
            hardy_weight_multi(&all, &alpha, &metric)
        }
    }
}

/// `lim_{ρ→0} ρ² W(pole + ρ e)` by Richardson extrapolation from `ρ₀, ρ₀/2, ρ₀/4`.
pub fn near_pole_limit(weight: &HardyWeight, pole: &[f64], direction: &[f64], rho0: f64) -> Result<f64> {
    let dn = norm(direction);
    let g = |rho: f64| -> Result<f64> {
        let x: Vec<f64> = pole.iter().zip(direction).map(|(p, d)| p + rho * d / dn).collect();
        Ok(rho * rho * weight.value(&x)?)
    };
    richardson(g, rho0)
}

/// `lim_{R→∞} R² W(R e)` by Richardson extrapolation in `1/R`.
pub fn infinity_limit(weight: &HardyWeight, direction: &[f64], r0: f64) -> Result<f64> {
    let dn = norm(direction);
    let g = |eps: f64| -> Result<f64> {
        let big = 1.0 / eps;
        let x: Vec<f64> = direction.iter().map(|d| big * d / dn).collect();
        Ok(big * big * weight.value(&x)?)
    };
    richardson(g, 1.0 / r0)
}

fn richardson(g: impl Fn(f64) -> Result<f64>, h: f64) -> Result<f64> {
    let a = g(h)?;
    let b = g(h / 2.0)?;
    let c = g(h / 4.0)?;
    let ab = 2.0 * b - a;
    let bc = 2.0 * c - b;
    Ok((4.0 * bc - ab) / 3.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfspaceConfig {
    pub n: usize,
    pub mu: f64,
}

impl HalfspaceConfig {
    pub fn alpha_plus(&self) -> f64 {
        0.5 * (1.0 + (1.0 - 4.0 * self.mu).sqrt())
    }

    pub fn beta(&self) -> f64 {
        1.0 - self.n as f64 - (1.0 - 4.0 * self.mu).sqrt()
    }
}

/// `W = μ/x_n² + β²/(4|x|²)` on the upper half-space and its ground state `x_n^{α₊} |x|^{β/2}`.
pub fn halfspace_weight(cfg: &HalfspaceConfig) -> Result<(HardyWeight, ScalarField)> {
    if cfg.n < 2 {
        return invalid("half-space weights need n ≥ 2");
    }
    if !(0.0..=0.25).contains(&cfg.mu) {
        return invalid(format!("mu must lie in [0, 1/4], got {}", cfg.mu));
    }
    let n = cfg.n;
    let (mu, a, b) = (cfg.mu, cfg.alpha_plus(), cfg.beta());
    let w = HardyWeight::from_fn(n, "mu/x_n^2 + beta^2/(4|x|^2)", move |x| {
        let xn = x[n - 1];
        if !(xn > 0.0) {
            return Err(Error::NonPositive { point: x.to_vec(), value: xn });
        }
        let r2 = x.iter().map(|v| v * v).sum::<f64>();
        Ok(mu / (xn * xn) + b * b / (4.0 * r2))
    });
    let ground = ScalarField::new(n, "x_n^a |x|^(b/2)", move |x| {
        let r2 = x.iter().map(|v| v * v).sum::<f64>();
        x[n - 1].powf(a) * r2.powf(0.25 * b)
    })
    .with_gradient(move |x| {
        let r2 = x.iter().map(|v| v * v).sum::<f64>();
        let v = x[n - 1].powf(a) * r2.powf(0.25 * b);
        let mut g: Vec<f64> = x.iter().map(|xi| v * 0.5 * b * xi / r2).collect();
        g[n - 1] += v * a / x[n - 1];
        g
    });
    Ok((w, ground))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PLaplaceConfig {
    pub p: f64,
    pub n: usize,
    pub alpha: f64,
}

/// `α(1-α)(p-1) |(log(v₀/v₁))'|² |(log v_α)'|^{p-2}` from log-slopes `r v'/v`.
pub fn p_weight_from_slopes(cfg: &PLaplaceConfig, slope0: f64, slope1: f64, r: f64) -> Result<f64> {
    let (p, a) = (cfg.p, cfg.alpha);
    let d = (slope0 - slope1) / r;
    let la = (a * slope1 + (1.0 - a) * slope0) / r;
    let base = la.abs();
    let factor = if (p - 2.0).abs() < 1e-15 {
        1.0
    } else if base == 0.0 {
        if p > 2.0 {
            0.0
        } else {
            return Err(Error::Singular(r));
        }
    } else {
        base.powf(p - 2.0)
    };
    Ok(a * (1.0 - a) * (p - 1.0) * d * d * factor)
}

/// Radial p-Hardy weight from two positive p-harmonic profiles.
pub fn p_hardy_radial(cfg: &PLaplaceConfig, v0: &RadialProfile, v1: &RadialProfile) -> Result<HardyWeight> {
    if !(cfg.p > 1.0) {
        return invalid("p must exceed 1");
    }
    if !(cfg.alpha > 0.0 && cfg.alpha < 1.0) {
        return invalid("alpha must lie in (0, 1)");
    }
    let (c, a, b) = (*cfg, Arc::new(v0.clone()), Arc::new(v1.clone()));
    Ok(HardyWeight::from_fn(cfg.n, "a(1-a)(p-1)|(log v0/v1)'|^2 |(log v_a)'|^(p-2)", move |x| {
        let r = norm(x);
        p_weight_from_slopes(&c, a.log_slope_at(r)?, b.log_slope_at(r)?, r)
    }))
}

/// `((p-1)/p)^p`.
pub fn caccioppoli_constant(p: f64) -> f64 {
    // integer exponents go through powi so that e.g. p = 3 gives exactly 8/27
    if p.fract() == 0.0 && p.abs() < 64.0 {
        (p - 1.0).powi(p as i32) / p.powi(p as i32)
    } else {
        ((p - 1.0) / p).powf(p)
    }
}

/// `((p-1)/p)^p |v'/v|^p` for a positive radial profile.
pub fn caccioppoli_weight(n: usize, p: f64, v: &RadialProfile) -> HardyWeight {
    let v = Arc::new(v.clone());
    let c = caccioppoli_constant(p);
    HardyWeight::from_fn(n, "((p-1)/p)^p |v'/v|^p", move |x| {
        let r = norm(x);
        Ok(c * (v.log_slope_at(r)? / r).abs().powf(p))
    })
}

/// `((n-p)/p)^p`, the coefficient of `r^{-p}` for `v = r^{(p-n)/(p-1)}`.
pub fn p_green_constant(n: usize, p: f64) -> f64 {
    ((n as f64 - p) / p).abs().powf(p)
}

/// One row of the shipped constants table.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantRow {
    pub name: String,
    pub n: usize,
    pub poles: usize,
    pub constant: f64,
    pub anchor: String,
}

pub const CONSTANTS_CSV: &str = include_str!("../data/constants.csv");

pub fn constants_table() -> Result<Vec<ConstantRow>> {
    let mut rows = Vec::new();
    let mut lines = CONSTANTS_CSV.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty());
    let header = lines.next().unwrap_or_default();
    if header.trim() != "name,n,N,constant,anchor" {
        return invalid(format!("unexpected constants header '{header}'"));
    }
    for line in lines {
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.len() != 5 {
            return invalid(format!("malformed constants row '{line}'"));
        }
        let parse = |s: &str| s.parse::<f64>().map_err(|e| Error::InvalidInput(format!("{s}: {e}")));
        rows.push(ConstantRow {
            name: cols[0].to_string(),
            n: cols[1].parse().map_err(|e| Error::InvalidInput(format!("{}: {e}", cols[1])))?,
            poles: cols[2].parse().map_err(|e| Error::InvalidInput(format!("{}: {e}", cols[2])))?,
            constant: parse(cols[3])?,
            anchor: cols[4].to_string(),
        });
    }
    Ok(rows)
}

/// Recomputes a constants-table row from the library.
pub fn recompute_constant(row: &ConstantRow) -> Result<f64> {
    let poles = |k: usize| -> Vec<Vec<f64>> {
        (0..k)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / k as f64;
                let mut p = vec![0.0; row.n];
                p[0] = t.cos();
                if row.n > 1 {
                    p[1] = t.sin();
                }
                p
            })
            .collect()
    };
    let params = CatalogParams { n: row.n, ..Default::default() };
    match row.name.as_str() {
        "hardy_punctured" | "leray_disk" | "ball" | "convex_distance" | "one_dim_halfline" | "one_dim_massive"
        | "halfspace_poisson" => Ok(classical(&row.name, &params)?.constant),
        "cone_hemisphere" => Ok(classical("cone", &CatalogParams { cap_angle: Some(PI / 2.0), ..params })?.constant),
        "halfspace_mu_quarter_unit_normal" => {
            let (w, _) = halfspace_weight(&HalfspaceConfig { n: row.n, mu: 0.25 })?;
            let mut e = vec![0.0; row.n];
            e[row.n - 1] = 1.0;
            w.value(&e)
        }
        "multipolar_uniform" | "multipolar_w1" | "multipolar_w2" => {
            let v = match row.name.as_str() {
                "multipolar_uniform" => MultipoleVariant::Uniform,
                "multipolar_w1" => MultipoleVariant::Bde,
                _ => MultipoleVariant::Cz,
            };
            Ok(multipolar_weight(&MultipoleConfig::new(row.n, poles(row.poles), v))?.1.near_pole)
        }
        "multipolar_uniform_origin" => {
            let (w, _) = multipolar_weight(&MultipoleConfig::new(row.n, poles(row.poles), MultipoleVariant::Uniform))?;
            w.value(&vec![0.0; row.n])
        }
        "rellich_power_weight" => Ok(crate::agmon::euclidean_rellich_constant(row.n, 2.0 / (row.n as f64 - 2.0), 1.0)),
        "caccioppoli" => Ok(caccioppoli_constant(3.0)),
        "p_green_weight" => Ok(p_green_constant(row.n, 2.0)),
        "annulus_principal_eigenvalue" => Ok(crate::varify::optimal_annulus_prediction(8.0 * 10f64.ln())),
        // half the log-ratio of the pair along r: 1 -> e^4
        "agmon_radial_segment" => Ok(0.5 * (row.n as f64 - 2.0) * 4.0),
        other => invalid(format!("no recipe for constants row '{other}'")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::fd_laplacian;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn two_poles() -> Vec<Vec<f64>> {
        vec![vec![1.0, 0.0, 0.0], vec![-1.0, 0.0, 0.0]]
    }

    #[test]
    fn ball_value_at_half() {
        let e = classical("ball", &CatalogParams { n: 3, ..Default::default() }).unwrap();
        assert!((e.weight.value(&[0.5, 0.0, 0.0]).unwrap() - 4.0).abs() < 1e-12);
        assert!(e.weight.value(&[1.5, 0.0, 0.0]).is_err());
    }

    #[test]
    fn hemisphere_cone_matches_halfspace_constant() {
        let e = classical("cone", &CatalogParams { n: 3, cap_angle: Some(PI / 2.0), ..Default::default() }).unwrap();
        assert!((e.constant - 2.25).abs() < 1e-8);
        let h = HalfspaceConfig { n: 3, mu: 0.0 };
        assert!((h.beta().powi(2) / 4.0 - e.constant).abs() < 1e-8);
    }

    #[test]
    fn cap_eigenvalues() {
        for n in [2usize, 3, 4, 5] {
            assert!((cap_eigenvalue(n, PI / 2.0).unwrap() - (n - 1) as f64).abs() < 1e-7);
        }
        let a = 0.7;
        assert!((cap_eigenvalue(2, a).unwrap() - (PI / (2.0 * a)).powi(2)).abs() < 1e-6);
        assert!(cap_eigenvalue(3, 0.3).unwrap() > cap_eigenvalue(3, 0.6).unwrap());
    }

    #[test]
    fn poisson_variant_matches_pair() {
        let n = 3;
        let v0 = ScalarField::new(n, "x_n/|x|^n", |x| x[2] / x.iter().map(|v| v * v).sum::<f64>().powf(1.5));
        let one = ScalarField::constant(n, 1.0);
        let pair = hardy_weight_pair(&v0, &one, &MetricSpec::identity(n)).unwrap();
        let e = classical("halfspace_poisson", &CatalogParams { n, ..Default::default() }).unwrap();
        for x in [[0.3, 0.2, 0.5], [1.0, -2.0, 0.1], [0.0, 0.0, 2.0]] {
            let (a, b) = (pair.value(&x).unwrap(), e.weight.value(&x).unwrap());
            assert!((a - b).abs() < 1e-8 * b);
        }
    }

    #[test]
    fn multipolar_closed_forms_match_pairwise_sums() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for nn in [2usize, 3] {
            let poles: Vec<Vec<f64>> = (0..nn)
                .map(|i| {
                    let t = 2.0 * PI * i as f64 / nn as f64;
                    vec![t.cos(), t.sin(), 0.0]
                })
                .collect();
            for v in [MultipoleVariant::Uniform, MultipoleVariant::Bde, MultipoleVariant::Cz] {
                let cfg = MultipoleConfig::new(3, poles.clone(), v);
                let (w, _) = multipolar_weight(&cfg).unwrap();
                let b = multipolar_brute_force(&cfg).unwrap();
                for _ in 0..200 {
                    let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-3.0..3.0)).collect();
                    let (p, q) = (w.value(&x).unwrap(), b.value(&x).unwrap());
                    assert!((p - q).abs() <= 1e-10 * q.abs().max(1e-300), "{v:?} {p} {q}");
                }
            }
        }
    }

    #[test]
    fn multipolar_origin_value_and_constants() {
        let cfg = MultipoleConfig::new(3, two_poles(), MultipoleVariant::Uniform);
        let (w, k) = multipolar_weight(&cfg).unwrap();
        assert!((w.value(&[0.0, 0.0, 0.0]).unwrap() - 2.0 / 3.0).abs() < 1e-14);
        assert!((k.near_pole - 2.0 / 9.0).abs() < 1e-15);
        let e = [0.3, 0.5, -0.2];
        assert!((near_pole_limit(&w, &two_poles()[0], &e, 1e-2).unwrap() - k.near_pole).abs() < 1e-6);
        assert!((infinity_limit(&w, &e, 1e3).unwrap() - k.at_infinity).abs() < 1e-6);
        for (v, near, inf) in [(MultipoleVariant::Bde, 0.1875, 0.25), (MultipoleVariant::Cz, 0.25, 0.0)] {
            let cfg = MultipoleConfig::new(3, two_poles(), v);
            let (w, k) = multipolar_weight(&cfg).unwrap();
            assert!((k.near_pole - near).abs() < 1e-15 && (k.at_infinity - inf).abs() < 1e-15);
            assert!((near_pole_limit(&w, &two_poles()[1], &e, 1e-2).unwrap() - near).abs() < 1e-6);
            assert!((infinity_limit(&w, &e, 1e3).unwrap() - inf).abs() < 1e-6);
        }
    }

    #[test]
    fn multipolar_rejects_bad_configs() {
        let same = vec![vec![1.0, 0.0, 0.0], vec![1.0, 0.0, 0.0]];
        assert!(multipolar_weight(&MultipoleConfig::new(3, same, MultipoleVariant::Uniform)).is_err());
        assert!(multipolar_weight(&MultipoleConfig::new(3, vec![vec![0.0; 3]], MultipoleVariant::Uniform)).is_err());
        let cfg = MultipoleConfig::new(3, two_poles(), MultipoleVariant::Uniform);
        let (w, _) = multipolar_weight(&cfg).unwrap();
        assert!(w.value(&[1.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn general_variant_reduces_to_uniform() {
        let mut cfg = MultipoleConfig::new(3, two_poles(), MultipoleVariant::General);
        cfg.alpha = Some(vec![1.0 / 3.0; 3]);
        let (w, k) = multipolar_weight(&cfg).unwrap();
        let (u, ku) = multipolar_weight(&MultipoleConfig::new(3, two_poles(), MultipoleVariant::Uniform)).unwrap();
        let x = [0.2, 0.4, 0.9];
        assert!((w.value(&x).unwrap() - u.value(&x).unwrap()).abs() < 1e-12);
        assert!((k.near_pole - ku.near_pole).abs() < 1e-15);
    }

    #[test]
    fn halfspace_ground_state_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for mu in [0.0, 0.125, 0.25] {
            let cfg = HalfspaceConfig { n: 3, mu };
            let (w, psi) = halfspace_weight(&cfg).unwrap();
            for _ in 0..100 {
                let x: Vec<f64> = vec![rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(0.1..2.0)];
                let h = 1e-2 * x[2].min(x.iter().map(|v| v * v).sum::<f64>().sqrt());
                let lap = fd_laplacian(&|y| psi.eval(y), &x, h).unwrap();
                let v = psi.eval(&x).unwrap();
                let wv = w.value(&x).unwrap() * v;
                assert!((lap + wv).abs() <= 1e-6 * (lap.abs() + wv.abs()));
            }
        }
        let (w, _) = halfspace_weight(&HalfspaceConfig { n: 3, mu: 0.25 }).unwrap();
        assert!((w.value(&[0.0, 0.0, 1.0]).unwrap() - 1.25).abs() < 1e-14);
        assert!(halfspace_weight(&HalfspaceConfig { n: 3, mu: 0.3 }).is_err());
    }

    #[test]
    fn p_laplace_weights() {
        assert!((caccioppoli_constant(3.0) - 8.0 / 27.0).abs() < 1e-15);
        assert!((p_green_constant(3, 2.0) - 0.25).abs() < 1e-15);
        let cfg = PLaplaceConfig { p: 2.0, n: 3, alpha: 0.5 };
        let w = p_weight_from_slopes(&cfg, -1.0, 0.0, 2.0).unwrap();
        assert!((w - 0.25 / 4.0).abs() < 1e-15);
        let cfg3 = PLaplaceConfig { p: 3.0, n: 3, alpha: 0.5 };
        assert_eq!(p_weight_from_slopes(&cfg3, 1.0, -1.0, 1.0).unwrap(), 0.0);
        let cfg15 = PLaplaceConfig { p: 1.5, n: 3, alpha: 0.5 };
        assert!(matches!(p_weight_from_slopes(&cfg15, 1.0, -1.0, 1.0), Err(Error::Singular(_))));
    }

    #[test]
    fn caccioppoli_of_p_green_power() {
        let g = Arc::new(crate::numgrid::LogGrid::new(0.1, 10.0, 100).unwrap());
        let (n, p) = (3.0, 2.0);
        let e = (p - n) / (p - 1.0);
        let v = RadialProfile::from_fns(g, move |r| e * r.ln(), move |_| e);
        let w = caccioppoli_weight(3, p, &v);
        for r in [0.5f64, 1.0, 4.0] {
            assert!((w.value(&[r, 0.0, 0.0]).unwrap() * r * r - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn constants_table_matches_computed_values() {
        let rows = constants_table().unwrap();
        assert!(rows.len() >= 15);
        for row in rows {
            let computed = recompute_constant(&row).unwrap();
            assert!((computed - row.constant).abs() < 1e-8, "{} {} {}", row.name, computed, row.constant);
        }
    }

    #[test]
    fn every_catalog_entry_builds() {
        for name in CATALOG_NAMES {
            let n = match name {
                "leray_disk" => 2,
                "one_dim_halfline" | "one_dim_massive" => 1,
                _ => 3,
            };
            let e = classical(name, &CatalogParams { n, ..Default::default() }).unwrap();
            assert!(e.constant > 0.0);
        }
        assert!(classical("nope", &CatalogParams { n: 3, ..Default::default() }).is_err());
    }
}
