//! Variational checks: annulus eigenvalues, Rayleigh quotients, null sequences.
//!
//! Radial test functions are written `φ = r^{-(n-2)/2} w(s)`, `s = log r`, so that
//! `∫(φ'² + Vφ²) r^{n-1} dr = ∫ w_s² + (c² + r²V) w² ds` and
//! `∫ W φ² r^{n-1} dr = ∫ r²W w² ds` with `c = (n-2)/2` and `w` vanishing at both ends.
//! Both forms are discretised with hat functions on a uniform mesh in `s`;
//! the zeroth-order terms are lumped.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::numgrid::{gauss_legendre, linear_fit, try_gauss_legendre};
use crate::radial::{sphere_area, RadialPair};

/// Dirichlet problem on the annulus `r_lo < r < r_hi` with `m` interior nodes.
#[derive(Debug, Clone)]
pub struct AnnulusProblem {
    pub n: usize,
    pub r_lo: f64,
    pub r_hi: f64,
    /// Mesh width in `s`.
    pub h: f64,
    /// Interior nodes in `s`.
    pub s: Vec<f64>,
    /// Stiffness diagonal and off-diagonal.
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
    /// Lumped weighted mass.
    pub mass: Vec<f64>,
}

impl AnnulusProblem {
    pub fn assemble(
        n: usize,
        potential: &dyn Fn(f64) -> f64,
        weight: &dyn Fn(f64) -> f64,
        r_lo: f64,
        r_hi: f64,
        m: usize,
    ) -> Result<Self> {
        if n < 2 {
            return invalid("dimension must be ≥ 2");
        }
        if !(r_lo > 0.0 && r_hi > r_lo) {
            return invalid(format!("bad annulus ({r_lo}, {r_hi})"));
        }
        if m < 3 {
            return invalid("annulus needs at least 3 interior nodes");
        }
        let c = (n as f64 - 2.0) / 2.0;
        let (s0, s1) = (r_lo.ln(), r_hi.ln());
        let h = (s1 - s0) / (m + 1) as f64;
        let s: Vec<f64> = (1..=m).map(|i| s0 + i as f64 * h).collect();
        let mut diag = Vec::with_capacity(m);
        let mut mass = Vec::with_capacity(m);
        for &si in &s {
            let r = si.exp();
            let v = potential(r);
            let w = weight(r);
            if !v.is_finite() {
                return invalid(format!("potential is not finite at r = {r}"));
            }
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::NonPositive { point: vec![r], value: w });
            }
            diag.push(2.0 / h + h * (c * c + r * r * v));
            mass.push(h * r * r * w);
        }
        let off = vec![-1.0 / h; m - 1];
        Ok(AnnulusProblem { n, r_lo, r_hi, h, s, diag, off, mass })
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    /// `K v`.
    pub fn apply_stiffness(&self, v: &[f64]) -> Vec<f64> {
        let m = self.len();
        (0..m)
            .map(|i| {
                let mut x = self.diag[i] * v[i];
                if i > 0 {
                    x += self.off[i - 1] * v[i - 1];
                }
                if i + 1 < m {
                    x += self.off[i] * v[i + 1];
                }
                x
            })
            .collect()
    }

    pub fn stiffness_form(&self, v: &[f64]) -> f64 {
        self.apply_stiffness(v).iter().zip(v).map(|(a, b)| a * b).sum()
    }

    pub fn mass_form(&self, v: &[f64]) -> f64 {
        self.mass.iter().zip(v).map(|(m, x)| m * x * x).sum()
    }

    /// Symmetrised matrix `M^{-1/2} K M^{-1/2}`.
    fn symmetric(&self) -> (Vec<f64>, Vec<f64>) {
        let d: Vec<f64> = self.diag.iter().zip(&self.mass).map(|(k, m)| k / m).collect();
        let e: Vec<f64> = (0..self.len() - 1).map(|i| self.off[i] / (self.mass[i] * self.mass[i + 1]).sqrt()).collect();
        (d, e)
    }
}

/// Number of eigenvalues of the symmetric tridiagonal `(d, e)` below `x`.
fn sturm_count(d: &[f64], e: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = d[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..d.len() {
        let prev = if q == 0.0 { f64::EPSILON * (d[i - 1].abs() + 1.0) } else { q };
        q = d[i] - x - e[i - 1] * e[i - 1] / prev;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Solve `(T - σ I) x = b` for symmetric tridiagonal `T` (Thomas algorithm).
fn thomas(d: &[f64], e: &[f64], sigma: f64, b: &[f64]) -> Vec<f64> {
    let m = d.len();
    let mut c = vec![0.0; m];
    let mut g = vec![0.0; m];
    let mut denom = d[0] - sigma;
    c[0] = if m > 1 { e[0] / denom } else { 0.0 };
    g[0] = b[0] / denom;
    for i in 1..m {
        denom = d[i] - sigma - e[i - 1] * c[i - 1];
        if i + 1 < m {
            c[i] = e[i] / denom;
        }
        g[i] = (b[i] - e[i - 1] * g[i - 1]) / denom;
    }
    let mut x = vec![0.0; m];
    x[m - 1] = g[m - 1];
    for i in (0..m - 1).rev() {
        x[i] = g[i] - c[i] * x[i + 1];
    }
    x
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumEstimate {
    pub lambda0: f64,
    /// Plateau of exterior-annulus eigenvalues when a sweep produced the estimate.
    pub lambda_infinity: Option<f64>,
    /// Normwise backward error `‖(K-λM)v‖ / ((‖K‖ + |λ|‖M‖)‖v‖)`.
    pub residual: f64,
    /// `‖(K-λM)v‖ / ‖Mv‖`.
    pub raw_residual: f64,
    pub iterations: usize,
    pub degenerate: bool,
}

pub const EIGEN_TOL: f64 = 1e-10;
const MAX_ITER: usize = 5000;

/// Smallest generalized eigenvalue of `(K, M)` and its eigenvector (nodal values of `w`).
pub fn principal_eigenpair(p: &AnnulusProblem) -> Result<(SpectrumEstimate, Vec<f64>)> {
    let m = p.len();
    let (d, e) = p.symmetric();
    let mut gersh = f64::INFINITY;
    for i in 0..m {
        let left = if i > 0 { e[i - 1].abs() } else { 0.0 };
        let right = if i + 1 < m { e[i].abs() } else { 0.0 };
        gersh = gersh.min(d[i] - left - right);
    }
    let sigma = 0.9 * gersh;
    let norm_k = (0..m)
        .map(|i| {
            p.diag[i].abs()
                + if i > 0 { p.off[i - 1].abs() } else { 0.0 }
                + if i + 1 < m { p.off[i].abs() } else { 0.0 }
        })
        .fold(0.0f64, f64::max);
    let norm_m = p.mass.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    // positive start vector
    let mut x: Vec<f64> = (0..m).map(|i| (PI * (i + 1) as f64 / (m + 1) as f64).sin()).collect();
    let mut lambda = f64::NAN;
    let mut residual = f64::INFINITY;
    let mut raw = f64::INFINITY;
    let mut iterations = 0;
    for it in 1..=MAX_ITER {
        iterations = it;
        let y = thomas(&d, &e, sigma, &x);
        let ny = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        x = y.iter().map(|v| v / ny).collect();
        let v: Vec<f64> = x.iter().zip(&p.mass).map(|(xi, mi)| xi / mi.sqrt()).collect();
        let kv = p.apply_stiffness(&v);
        let num: f64 = kv.iter().zip(&v).map(|(a, b)| a * b).sum();
        let den = p.mass_form(&v);
        lambda = num / den;
        let r: Vec<f64> = kv.iter().zip(&v).zip(&p.mass).map(|((k, vi), mi)| k - lambda * mi * vi).collect();
        let nr = r.iter().map(|a| a * a).sum::<f64>().sqrt();
        let nv = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        let nmv = v.iter().zip(&p.mass).map(|(a, b)| (a * b).powi(2)).sum::<f64>().sqrt();
        residual = nr / ((norm_k + lambda.abs() * norm_m) * nv);
        raw = nr / nmv;
        if residual <= EIGEN_TOL {
            break;
        }
    }
    if residual > EIGEN_TOL {
        return Err(Error::NoConvergence { iterations, residual });
    }
    // the Sturm recurrence is only accurate to a few ulps of ‖A‖, which grows like 1/h²
    let norm_a = (0..m)
        .map(|i| d[i].abs() + if i > 0 { e[i - 1].abs() } else { 0.0 } + if i + 1 < m { e[i].abs() } else { 0.0 })
        .fold(0.0f64, f64::max);
    let margin = 1e-8 * lambda.abs().max(1.0) + 64.0 * f64::EPSILON * norm_a;
    let below = sturm_count(&d, &e, lambda - margin);
    if below > 0 {
        return Err(Error::NoConvergence { iterations, residual });
    }
    let degenerate = sturm_count(&d, &e, lambda + margin) > 1;
    let mut w: Vec<f64> = x.iter().zip(&p.mass).map(|(xi, mi)| xi / mi.sqrt()).collect();
    if w.iter().sum::<f64>() < 0.0 {
        w.iter_mut().for_each(|v| *v = -*v);
    }
    Ok((
        SpectrumEstimate {
            lambda0: lambda,
            lambda_infinity: None,
            residual,
            raw_residual: raw,
            iterations,
            degenerate,
        },
        w,
    ))
}

pub fn principal_eigenvalue(p: &AnnulusProblem) -> Result<SpectrumEstimate> {
    Ok(principal_eigenpair(p)?.0)
}

/// `1 + 4π²/L²`, the annulus eigenvalue of an optimal weight whose level function
/// `log(G/u)` spans an interval of length `L`.
pub fn optimal_annulus_prediction(log_length: f64) -> f64 {
    1.0 + 4.0 * PI * PI / (log_length * log_length)
}

#[derive(Debug, Clone, PartialEq)]
pub struct InfinitySweep {
    pub radii: Vec<f64>,
    pub lambda0: Vec<f64>,
    /// `(max - min) / mean` of the sweep.
    pub drift: f64,
    /// Slope of `log10 λ₀` against `log10 R`.
    pub decade_slope: f64,
    pub estimate: SpectrumEstimate,
}

/// Principal eigenvalues on exterior annuli `(R, R·window)`.
pub fn lambda_infinity_sweep(
    n: usize,
    potential: &dyn Fn(f64) -> f64,
    weight: &dyn Fn(f64) -> f64,
    radii: &[f64],
    window: f64,
    m: usize,
) -> Result<InfinitySweep> {
    if radii.is_empty() {
        return invalid("sweep needs at least one radius");
    }
    if !(window > 1.0) {
        return invalid("window ratio must exceed 1");
    }
    let mut values = Vec::new();
    let mut last = None;
    for &r in radii {
        let p = AnnulusProblem::assemble(n, potential, weight, r, r * window, m)?;
        let est = principal_eigenvalue(&p)?;
        values.push(est.lambda0);
        last = Some(est);
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let slope = if radii.len() > 1 {
        let xs: Vec<f64> = radii.iter().map(|r| r.log10()).collect();
        let ys: Vec<f64> = values.iter().map(|v| v.log10()).collect();
        linear_fit(&xs, &ys).slope
    } else {
        0.0
    };
    let mut estimate = last.expect("at least one radius");
    estimate.lambda0 = values[0];
    estimate.lambda_infinity = Some(*values.last().expect("nonempty"));
    Ok(InfinitySweep {
        radii: radii.to_vec(),
        lambda0: values,
        drift: (max - min) / mean,
        decade_slope: slope,
        estimate,
    })
}

/// Radial test function with its derivative in `r`.
#[derive(Clone)]
pub struct RadialTestFunction {
    pub value: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub derivative: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl RadialTestFunction {
    pub fn new(
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        derivative: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        RadialTestFunction { value: Arc::new(value), derivative: Arc::new(derivative) }
    }
}

const PANELS: usize = 4000;

/// `∫(φ'² + Vφ²) dx / ∫ W φ² dx` for a radial `φ` supported in `support`.
pub fn rayleigh_quotient(
    phi: &RadialTestFunction,
    n: usize,
    potential: &dyn Fn(f64) -> f64,
    weight: &dyn Fn(f64) -> f64,
    support: (f64, f64),
) -> Result<f64> {
    let (num, den) = quadratic_forms(phi, n, potential, weight, support)?;
    if !(den > 0.0) {
        return invalid("test function has zero weighted mass");
    }
    Ok(num / den)
}

fn quadratic_forms(
    phi: &RadialTestFunction,
    n: usize,
    potential: &dyn Fn(f64) -> f64,
    weight: &dyn Fn(f64) -> f64,
    support: (f64, f64),
) -> Result<(f64, f64)> {
    let (a, b) = support;
    if !(a > 0.0 && b > a) {
        return invalid(format!("bad support ({a}, {b})"));
    }
    let nf = n as f64;
    let num = gauss_legendre(
        |s| {
            let r = s.exp();
            let (f, df) = ((phi.value)(r), (phi.derivative)(r));
            (df * df + potential(r) * f * f) * r.powf(nf)
        },
        a.ln(),
        b.ln(),
        PANELS,
    );
    let den = gauss_legendre(
        |s| {
            let r = s.exp();
            let f = (phi.value)(r);
            weight(r) * f * f * r.powf(nf)
        },
        a.ln(),
        b.ln(),
        PANELS,
    );
    Ok((num, den))
}

/// `φ = sqrt(G u) χ((τ - center)/k)` with `χ(t) = cos(πt/4)` on `|t| < 2`.
pub fn null_test_function(pair: &RadialPair, center: f64, k: f64) -> Result<(RadialTestFunction, (f64, f64))> {
    let lo = pair.radius_at_level(center + 2.0 * k)?;
    let hi = pair.radius_at_level(center - 2.0 * k)?;
    let p1 = Arc::new(pair.clone());
    let p2 = p1.clone();
    let chi = move |t: f64| if t.abs() < 2.0 { (PI * t / 4.0).cos() } else { 0.0 };
    let dchi = move |t: f64| if t.abs() < 2.0 { -PI / 4.0 * (PI * t / 4.0).sin() } else { 0.0 };
    let value = move |r: f64| -> f64 {
        let base = (0.5 * (p1.log_g(r).unwrap_or(f64::NAN) + p1.log_u(r).unwrap_or(f64::NAN))).exp();
        base * chi((p1.tau(r).unwrap_or(f64::NAN) - center) / k)
    };
    let derivative = move |r: f64| -> f64 {
        let eval = || -> Result<f64> {
            let base = (0.5 * (p2.log_g(r)? + p2.log_u(r)?)).exp();
            let t = (p2.tau(r)? - center) / k;
            let half = 0.5 * (p2.slope_g(r)? + p2.slope_u(r)?) / r;
            Ok(base * (half * chi(t) + dchi(t) / k * p2.tau_slope(r)? / r))
        };
        eval().unwrap_or(f64::NAN)
    };
    Ok((RadialTestFunction::new(value, derivative), (lo, hi)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct NullSequence {
    pub ks: Vec<f64>,
    pub quotients: Vec<f64>,
    /// `∫ φ_k² W dν`.
    pub masses: Vec<f64>,
    /// Fit of quotients to `1 + C/k²`.
    pub fit_c: f64,
    pub fit_intercept: f64,
    pub fit_r2: f64,
    pub mass_slope: f64,
    /// Masses restricted to the fixed window `|τ - center| ≤ 1`.
    pub fixed_window_masses: Vec<f64>,
}

/// Rayleigh quotients and weighted masses along widening log-cutoffs of `sqrt(G u)`.
pub fn null_sequence_probe(pair: &RadialPair, center: f64, ks: &[f64]) -> Result<NullSequence> {
    if ks.len() < 2 {
        return invalid("null-sequence probe needs at least two cutoffs");
    }
    let n = pair.dim();
    let area = sphere_area(n);
    let pot = |r: f64| pair.potential(r);
    let w = |r: f64| pair.weight(r).unwrap_or(f64::NAN);
    let mut quotients = Vec::new();
    let mut masses = Vec::new();
    let mut fixed = Vec::new();
    for &k in ks {
        let (phi, support) = null_test_function(pair, center, k)?;
        let (num, den) = quadratic_forms(&phi, n, &pot, &w, support)?;
        quotients.push(num / den);
        masses.push(area * den);
        let inner = (pair.radius_at_level(center + 1.0)?, pair.radius_at_level(center - 1.0)?);
        let (_, d) = quadratic_forms(&phi, n, &pot, &w, inner)?;
        fixed.push(area * d);
    }
    if quotients.iter().chain(&masses).any(|v| !v.is_finite()) {
        return invalid("null-sequence cutoffs leave the range of the pair");
    }
    let inv: Vec<f64> = ks.iter().map(|k| 1.0 / (k * k)).collect();
    let fit = linear_fit(&inv, &quotients);
    let mfit = linear_fit(ks, &masses);
    Ok(NullSequence {
        ks: ks.to_vec(),
        quotients,
        masses,
        fit_c: fit.slope,
        fit_intercept: fit.intercept,
        fit_r2: fit.r_squared,
        mass_slope: mfit.slope,
        fixed_window_masses: fixed,
    })
}

/// `∫ f(r) dν` over `{lo ≤ log(G/u) ≤ hi}` for a radial integrand.
pub(crate) fn level_integral(pair: &RadialPair, lo: f64, hi: f64, f: &dyn Fn(f64) -> Result<f64>) -> Result<f64> {
    let r_in = pair.radius_at_level(hi)?;
    let r_out = pair.radius_at_level(lo)?;
    let n = pair.dim() as f64;
    let area = sphere_area(pair.dim());
    let panels = ((r_out / r_in).ln() / 0.01).ceil().max(50.0) as usize;
    let v = try_gauss_legendre(
        |s| {
            let r = s.exp();
            Ok(f(r)? * r.powf(n))
        },
        r_in.ln(),
        r_out.ln(),
        panels,
    )?;
    Ok(area * v)
}

/// Slope of `∫_{a ≤ G/u ≤ 1} u G W dν` against `log(1/a)`.
pub fn null_criticality_probe(pair: &RadialPair, a_list: &[f64]) -> Result<f64> {
    if a_list.len() < 2 || a_list.iter().any(|a| !(*a > 0.0 && *a < 1.0)) {
        return invalid("levels must lie in (0, 1), at least two of them");
    }
    let mut xs = Vec::new();
    let mut ms = Vec::new();
    for &a in a_list {
        let m = level_integral(pair, a.ln(), 0.0, &|r| Ok((pair.log_u(r)? + pair.log_g(r)?).exp() * pair.weight(r)?))?;
        xs.push(-a.ln());
        ms.push(m);
    }
    Ok(linear_fit(&xs, &ms).slope)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AverageDomination {
    pub lhs: f64,
    /// `5 ∫_{a-1 ≤ log(G/u) ≤ b+1} u G W dν = (5/4)(b - a + 2)`.
    pub rhs: f64,
    /// `(5/4)(log(b+1) - log(a-1))`, the bound with the levels read on the `G/u` scale.
    pub rhs_level_scale: f64,
    pub holds: bool,
}

/// `∫_{a ≤ log(G/u) ≤ b} u G V dν` against the averaged bound by `W`.
pub fn average_domination_check(
    pair: &RadialPair,
    potential: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
) -> Result<AverageDomination> {
    if !(a > 1.0) {
        return invalid(format!("level a must exceed 1, got {a}"));
    }
    if !(b > a) {
        return invalid(format!("level b = {b} must exceed a = {a}"));
    }
    let lhs = level_integral(pair, a, b, &|r| Ok((pair.log_u(r)? + pair.log_g(r)?).exp() * potential(r)))?;
    let rhs = 1.25 * (b - a + 2.0);
    let rhs_level_scale = 1.25 * ((b + 1.0).ln() - (a - 1.0).ln());
    Ok(AverageDomination { lhs, rhs, rhs_level_scale, holds: lhs <= rhs })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn classical_w(r: f64) -> f64 {
        0.25 / (r * r)
    }

    fn zero(_: f64) -> f64 {
        0.0
    }

    #[test]
    fn classical_annulus_eigenvalue() {
        let p = AnnulusProblem::assemble(3, &zero, &classical_w, 1e-4, 1e4, 4000).unwrap();
        let est = principal_eigenvalue(&p).unwrap();
        let pred = optimal_annulus_prediction((1e8f64).ln());
        assert!((est.lambda0 / pred - 1.0).abs() < 1e-4, "{} {}", est.lambda0, pred);
        assert!(est.residual <= EIGEN_TOL);
        assert!(!est.degenerate);
    }

    #[test]
    fn constant_weight_control_gives_pi_squared() {
        let one = |_: f64| 1.0;
        let p = AnnulusProblem::assemble(3, &zero, &one, 1.0, 2.0, 4000).unwrap();
        let est = principal_eigenvalue(&p).unwrap();
        assert!((est.lambda0 / (PI * PI) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn second_order_refinement() {
        let lam = |m: usize| {
            let p = AnnulusProblem::assemble(3, &zero, &classical_w, 1.0, 100.0, m).unwrap();
            principal_eigenvalue(&p).unwrap().lambda0
        };
        let (a, b, c) = (lam(99), lam(199), lam(399));
        assert!((a - b).abs() <= 4.0 * (b - c).abs() + 1e-10);
    }

    #[test]
    fn quadratic_forms_match_continuum() {
        let p = AnnulusProblem::assemble(3, &zero, &classical_w, 1.0, (PI).exp(), 2000).unwrap();
        let s0 = 0.0;
        let w: Vec<f64> = p.s.iter().map(|s| (s - s0).sin()).collect();
        // ∫_0^π cos² + 1/4 sin² ds and ∫ 1/4 sin² ds
        assert!((p.stiffness_form(&w) - (PI / 2.0 + PI / 8.0)).abs() < 1e-5);
        assert!((p.mass_form(&w) - PI / 8.0).abs() < 1e-5);
    }

    #[test]
    fn zero_weight_is_rejected() {
        let bad = |r: f64| if r > 2.0 { 0.0 } else { 1.0 };
        assert!(AnnulusProblem::assemble(3, &zero, &bad, 1.0, 4.0, 100).is_err());
    }

    #[test]
    fn exterior_sweep_plateau_and_controls() {
        let radii = [1.0, 10.0, 100.0];
        let sweep = lambda_infinity_sweep(3, &zero, &classical_w, &radii, 1e3, 1000).unwrap();
        assert!(sweep.drift < 1e-9);
        let grow = |r: f64| r.powf(-2.5);
        let g = lambda_infinity_sweep(3, &zero, &grow, &radii, 1e3, 1000).unwrap();
        assert!(g.lambda0.windows(2).all(|w| w[1] / w[0] > 2.0));
        let decay = |r: f64| r.powf(-1.5);
        let d = lambda_infinity_sweep(3, &zero, &decay, &radii, 1e3, 1000).unwrap();
        assert!(d.lambda0.windows(2).all(|w| w[0] / w[1] > 2.0));
    }

    #[test]
    fn tent_quotient() {
        let ell: f64 = 3.0;
        let chi = move |s: f64| (1.0 - s.abs() / ell).max(0.0);
        let dchi = move |s: f64| if s.abs() < ell { -s.signum() / ell } else { 0.0 };
        let phi = RadialTestFunction::new(
            move |r: f64| r.powf(-0.5) * chi(r.ln()),
            move |r: f64| {
                let s = r.ln();
                r.powf(-1.5) * (dchi(s) - 0.5 * chi(s))
            },
        );
        let q = rayleigh_quotient(&phi, 3, &zero, &classical_w, ((-ell).exp(), ell.exp())).unwrap();
        let oracle = {
            let num = gauss_legendre(|s| dchi(s).powi(2), -ell, ell, 2000);
            let den = gauss_legendre(|s| chi(s).powi(2), -ell, ell, 2000);
            1.0 + 4.0 * num / den
        };
        assert!((q / oracle - 1.0).abs() < 1e-2);
        assert!((oracle - (1.0 + 12.0 / (ell * ell))).abs() < 1e-6);
    }

    #[test]
    fn eigenvalue_below_rayleigh_quotients() {
        let p = AnnulusProblem::assemble(3, &zero, &classical_w, 0.1, 10.0, 800).unwrap();
        let lam = principal_eigenvalue(&p).unwrap().lambda0;
        let l = (100f64).ln();
        let phi = RadialTestFunction::new(
            move |r: f64| r.powf(-0.5) * (PI * (r.ln() + 0.5 * l) / l).sin().powi(2),
            move |r: f64| {
                let t = PI * (r.ln() + 0.5 * l) / l;
                r.powf(-1.5) * (2.0 * t.sin() * t.cos() * PI / l - 0.5 * t.sin().powi(2))
            },
        );
        let q = rayleigh_quotient(&phi, 3, &zero, &classical_w, (0.1, 10.0)).unwrap();
        assert!(lam <= q + 1e-9);
    }

    #[test]
    fn null_sequence_for_classical_pair() {
        let pair = RadialPair::classical(3).unwrap();
        let ks = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let ns = null_sequence_probe(&pair, 0.0, &ks).unwrap();
        for (k, q) in ks.iter().zip(&ns.quotients) {
            assert!((q - (1.0 + PI * PI / (4.0 * k * k))).abs() < 1e-6);
        }
        assert!(ns.fit_r2 >= 0.999);
        assert!((ns.mass_slope - 0.5).abs() < 1e-6);
        let spread = ns.fixed_window_masses.last().unwrap() - ns.fixed_window_masses[2];
        assert!(spread.abs() < 0.05);
    }

    #[test]
    fn null_criticality_slope_is_quarter() {
        let levels: Vec<f64> = (1..=10).map(|k| (-(k as f64)).exp()).collect();
        for pair in [RadialPair::classical(3).unwrap(), RadialPair::Yukawa] {
            let slope = null_criticality_probe(&pair, &levels).unwrap();
            assert!((slope - 0.25).abs() < 1e-6, "{slope}");
        }
    }

    #[test]
    fn average_domination() {
        let pair = RadialPair::classical(3).unwrap();
        for (a, b) in [(2.0, 3.0), (2.0, 10.0), (5.0, 50.0)] {
            let w = |r: f64| classical_w(r);
            let full = average_domination_check(&pair, &w, a, b).unwrap();
            assert!((full.lhs - 0.25 * (b - a)).abs() < 1e-8);
            assert!(full.holds);
            let half = |r: f64| 0.5 * classical_w(r);
            assert!(average_domination_check(&pair, &half, a, b).unwrap().holds);
        }
        assert!(average_domination_check(&pair, &classical_w, 1.0, 3.0).is_err());
    }
}
