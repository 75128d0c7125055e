//! Radial operators `-Δ + V(|x|)`: regular solution, Green function, optimal weight.
//!
//! The regular solution is carried as `L = log ψ` and `y = r ψ'/ψ`, which obey
//! `L' = y`, `y' = r²V - y² - (n-2) y` in `s = log r`. The Green function is
//! carried through `κ = r^{2-n} / (ψ g₀)`, which obeys
//! `κ' = κ (2 - n - 2y + κ)` and is integrated from the outer end inwards.
//! Then `W = κ² / (4 r²)` and `d log g₀ / ds = y - κ`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::numgrid::{linear_fit, log_variable_derivative, LogGrid, MonotoneCubic, SampledFunction};

pub type RadialFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Slope of partial integrals against the log cutoff above which an integral counts as divergent.
pub const DIVERGENCE_SLOPE: f64 = 0.05;

#[derive(Clone)]
pub enum RadialPotential {
    Zero,
    Constant(f64),
    /// `c r^b`
    Power {
        c: f64,
        b: f64,
    },
    /// Tabulated `(r, V)` with shape-preserving interpolation in `log r`.
    Sampled(Arc<MonotoneCubic>),
    Custom(RadialFn),
}

impl fmt::Debug for RadialPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RadialPotential::Zero => write!(f, "zero"),
            RadialPotential::Constant(c) => write!(f, "constant:{c}"),
            RadialPotential::Power { c, b } => write!(f, "power:{c},{b}"),
            RadialPotential::Sampled(m) => write!(f, "sampled{:?}", m.domain()),
            RadialPotential::Custom(_) => write!(f, "custom"),
        }
    }
}

impl RadialPotential {
    pub fn custom(v: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        RadialPotential::Custom(Arc::new(v))
    }

    /// Tabulated potential from `(r, V)` pairs.
    pub fn sampled(r: &[f64], v: &[f64]) -> Result<Self> {
        if r.iter().any(|x| !(*x > 0.0)) {
            return invalid("tabulated potential needs positive radii");
        }
        if v.iter().any(|x| !x.is_finite()) {
            return invalid("tabulated potential has non-finite values");
        }
        let s = r.iter().map(|x| x.ln()).collect();
        Ok(RadialPotential::Sampled(Arc::new(MonotoneCubic::new(s, v.to_vec())?)))
    }

    pub fn eval(&self, r: f64) -> f64 {
        match self {
            RadialPotential::Zero => 0.0,
            RadialPotential::Constant(c) => *c,
            RadialPotential::Power { c, b } => c * r.powf(*b),
            RadialPotential::Sampled(m) => {
                let (lo, hi) = m.domain();
                m.eval(r.ln().clamp(lo, hi)).unwrap_or(f64::NAN)
            }
            RadialPotential::Custom(f) => f(r),
        }
    }

    fn check_on(&self, grid: &LogGrid) -> Result<()> {
        if let RadialPotential::Sampled(m) = self {
            let (lo, hi) = m.domain();
            if grid.t_min().ln() < lo - 1e-12 || grid.t_max().ln() > hi + 1e-12 {
                return invalid(format!(
                    "tabulated potential covers [{}, {}] but the grid is [{}, {}]",
                    lo.exp(),
                    hi.exp(),
                    grid.t_min(),
                    grid.t_max()
                ));
            }
        }
        if let RadialPotential::Power { b, .. } = self {
            if *b < -2.0 {
                return invalid(format!("power potential r^{b} is too singular at the origin"));
            }
        }
        for &r in grid.nodes() {
            if !self.eval(r).is_finite() {
                return invalid(format!("potential is not finite at r = {r}"));
            }
        }
        Ok(())
    }

    /// Leading behaviour of `y = r ψ'/ψ` at small `r`.
    fn frobenius_start(&self, n: usize, r: f64) -> Result<f64> {
        let nf = n as f64;
        match self {
            RadialPotential::Power { c, b } if (*b + 2.0).abs() < 1e-14 => {
                let disc = (nf - 2.0).powi(2) + 4.0 * c;
                if disc < 0.0 {
                    return Err(Error::NotNonnegative(r));
                }
                Ok(0.5 * (-(nf - 2.0) + disc.sqrt()))
            }
            RadialPotential::Power { c, b } => Ok(c * r.powf(b + 2.0) / (b + nf)),
            _ => Ok(r * r * self.eval(r) / nf),
        }
    }
}

/// `P = -Δ + V(|x|)` on `R^n` sampled on a log grid.
#[derive(Debug, Clone)]
pub struct RadialOperator {
    pub n: usize,
    pub potential: RadialPotential,
    pub grid: Arc<LogGrid>,
}

impl RadialOperator {
    pub fn new(n: usize, potential: RadialPotential, grid: Arc<LogGrid>) -> Result<Self> {
        if n < 2 {
            return invalid("dimension must be ≥ 2");
        }
        potential.check_on(&grid)?;
        Ok(RadialOperator { n, potential, grid })
    }
}

/// Positive radial function stored as `log f` and `d log f / d log r` at the grid nodes.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    grid: Arc<LogGrid>,
    log_values: Vec<f64>,
    log_slopes: Vec<f64>,
}

impl RadialProfile {
    pub fn new(grid: Arc<LogGrid>, log_values: Vec<f64>, log_slopes: Vec<f64>) -> Result<Self> {
        if log_values.len() != grid.len() || log_slopes.len() != grid.len() {
            return invalid("profile arrays must match the grid");
        }
        Ok(RadialProfile { grid, log_values, log_slopes })
    }

    /// Profile from closed forms of `log f` and its log-slope `r f'/f`.
    pub fn from_fns(grid: Arc<LogGrid>, log_f: impl Fn(f64) -> f64, slope: impl Fn(f64) -> f64) -> Self {
        let log_values = grid.nodes().iter().map(|&r| log_f(r)).collect();
        let log_slopes = grid.nodes().iter().map(|&r| slope(r)).collect();
        RadialProfile { grid, log_values, log_slopes }
    }

    pub fn grid(&self) -> &Arc<LogGrid> {
        &self.grid
    }

    pub fn log_values(&self) -> &[f64] {
        &self.log_values
    }

    /// `r f'(r) / f(r)` at the nodes.
    pub fn log_slopes(&self) -> &[f64] {
        &self.log_slopes
    }

    /// Samples of `f`; may overflow to infinity for fast-growing profiles.
    pub fn samples(&self) -> SampledFunction {
        SampledFunction::new(self.grid.clone(), self.log_values.iter().map(|v| v.exp()).collect()).expect("sizes agree")
    }

    pub fn log_samples(&self) -> SampledFunction {
        SampledFunction::new(self.grid.clone(), self.log_values.clone()).expect("sizes agree")
    }

    /// `(log f)'` with respect to `r`.
    pub fn log_derivative(&self) -> SampledFunction {
        let v = self.log_slopes.iter().zip(self.grid.nodes()).map(|(s, r)| s / r).collect();
        SampledFunction::new(self.grid.clone(), v).expect("sizes agree")
    }

    /// `log f(r)` by cubic Hermite interpolation in `log r`.
    pub fn log_value_at(&self, r: f64) -> Result<f64> {
        let (k, u) = self.grid.locate(r)?;
        let h = self.grid.step();
        let (y0, y1) = (self.log_values[k], self.log_values[k + 1]);
        let (d0, d1) = (self.log_slopes[k] * h, self.log_slopes[k + 1] * h);
        let u2 = u * u;
        let u3 = u2 * u;
        Ok((2.0 * u3 - 3.0 * u2 + 1.0) * y0 + (u3 - 2.0 * u2 + u) * d0 + (-2.0 * u3 + 3.0 * u2) * y1 + (u3 - u2) * d1)
    }

    /// `r f'(r)/f(r)` by linear interpolation in `log r` of the derivative of the Hermite interpolant.
    pub fn log_slope_at(&self, r: f64) -> Result<f64> {
        let (k, u) = self.grid.locate(r)?;
        let h = self.grid.step();
        let (y0, y1) = (self.log_values[k], self.log_values[k + 1]);
        let (d0, d1) = (self.log_slopes[k] * h, self.log_slopes[k + 1] * h);
        let u2 = u * u;
        let dy = (6.0 * u2 - 6.0 * u) * y0
            + (3.0 * u2 - 4.0 * u + 1.0) * d0
            + (-6.0 * u2 + 6.0 * u) * y1
            + (3.0 * u2 - 2.0 * u) * d1;
        Ok(dy / h)
    }

    pub fn value_at(&self, r: f64) -> Result<f64> {
        Ok(self.log_value_at(r)?.exp())
    }
}

fn riccati(n: f64, v: &RadialPotential, s: f64, y: f64) -> f64 {
    let r = s.exp();
    r * r * v.eval(r) - y * y - (n - 2.0) * y
}

const STIFF_STEP: f64 = 0.15;
const MAX_SUBSTEPS: usize = 50_000_000;

/// Regular solution `ψ` with `ψ(0) = 1`, `ψ'(0) = 0`.
pub fn solve_radial_solution(op: &RadialOperator) -> Result<RadialProfile> {
    let n = op.n as f64;
    let grid = &op.grid;
    let m = grid.len();
    let h = grid.step();
    let r0 = grid.t_min();
    let mut y = op.potential.frobenius_start(op.n, r0)?;
    let mut l = match &op.potential {
        RadialPotential::Power { b, .. } if (*b + 2.0).abs() < 1e-14 => y * r0.ln(),
        RadialPotential::Power { b, .. } => y / (b + 2.0),
        // ψ = 1 + c r² with y = 2c r² / (1 + c r²)
        _ => (y / (2.0 - y)).ln_1p(),
    };
    let mut logs = Vec::with_capacity(m);
    let mut slopes = Vec::with_capacity(m);
    logs.push(l);
    slopes.push(y);
    let mut total = 0usize;
    for k in 0..m - 1 {
        let s0 = grid.s(k);
        let stiff = (2.0 * y + n - 2.0).abs() + 1.0;
        let ns = ((h * stiff / STIFF_STEP).ceil() as usize).max(1);
        total += ns;
        if total > MAX_SUBSTEPS {
            return Err(Error::NoConvergence { iterations: total, residual: f64::NAN });
        }
        let dh = h / ns as f64;
        for j in 0..ns {
            let s = s0 + j as f64 * dh;
            let k1 = riccati(n, &op.potential, s, y);
            let k2 = riccati(n, &op.potential, s + 0.5 * dh, y + 0.5 * dh * k1);
            let k3 = riccati(n, &op.potential, s + 0.5 * dh, y + 0.5 * dh * k2);
            let k4 = riccati(n, &op.potential, s + dh, y + dh * k3);
            l += dh / 6.0 * (y + 2.0 * (y + 0.5 * dh * k1) + 2.0 * (y + 0.5 * dh * k2) + (y + dh * k3));
            y += dh / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            if !y.is_finite() || y < -1e10 {
                return Err(Error::NotNonnegative((s + dh).exp()));
            }
        }
        logs.push(l);
        slopes.push(y);
    }
    RadialProfile::new(grid.clone(), logs, slopes)
}

/// Relative residual of the Riccati form of `Pψ = 0` at interior nodes.
pub fn solution_residual(op: &RadialOperator, psi: &RadialProfile) -> f64 {
    let n = op.n as f64;
    let y = psi.log_slopes();
    let dy = log_variable_derivative(y, op.grid.step());
    let mut worst: f64 = 0.0;
    for k in 2..y.len().saturating_sub(2) {
        let r = op.grid.node(k);
        let rv = r * r * op.potential.eval(r);
        let res = dy[k] + y[k] * y[k] + (n - 2.0) * y[k] - rv;
        let scale = dy[k].abs() + y[k] * y[k] + ((n - 2.0) * y[k]).abs() + rv.abs();
        if res != 0.0 {
            worst = worst.max(res.abs() / scale);
        }
    }
    worst
}

/// Outcome of the integral test `∫_1^∞ t^{1-n} ψ^{-2} dt < ∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MurataTest {
    /// Value of the integral from the reference radius (infinite when divergent).
    pub integral: f64,
    /// Slope of partial integrals against `log R` over the outer decades.
    pub growth_slope: f64,
    pub subcritical: bool,
    pub reference_radius: f64,
}

fn reference_radius(grid: &LogGrid) -> f64 {
    if grid.contains(1.0) {
        1.0
    } else {
        (grid.t_min() * grid.t_max()).sqrt()
    }
}

/// Partial integrals of `exp(q(s))` from node `k0` upwards, exact for piecewise-linear `q`.
fn exp_linear_partials(q: &[f64], h: f64, k0: usize) -> Vec<f64> {
    let mut out = vec![0.0; q.len()];
    let mut acc = 0.0;
    for k in k0..q.len() - 1 {
        acc += exp_linear_cell(q[k], q[k + 1], h);
        out[k + 1] = acc;
    }
    out
}

fn exp_linear_cell(q0: f64, q1: f64, h: f64) -> f64 {
    let b = q1 - q0;
    if b.abs() < 1e-8 {
        h * (q0 + 0.5 * b).exp()
    } else {
        h * (q1.exp() - q0.exp()) / b
    }
}

/// Slope of `values` against `xs` restricted to indices in `range`.
fn regression_slope(xs: &[f64], values: &[f64], range: std::ops::Range<usize>) -> f64 {
    if range.len() < 2 {
        return f64::NAN;
    }
    linear_fit(&xs[range.clone()], &values[range]).slope
}

/// Index window covering the outer three decades above `k0` (or the outer half if shorter).
fn outer_window(grid: &LogGrid, k0: usize) -> std::ops::Range<usize> {
    let m = grid.len();
    let decades = (3.0 * std::f64::consts::LN_10 / grid.step()).round() as usize;
    let avail = m - 1 - k0;
    let width = decades.min(avail / 2);
    (m - 1 - width)..m
}

fn inner_window(grid: &LogGrid, k0: usize) -> std::ops::Range<usize> {
    let decades = (3.0 * std::f64::consts::LN_10 / grid.step()).round() as usize;
    let width = decades.min(k0 / 2);
    0..width + 1
}

pub fn murata_test(n: usize, psi: &RadialProfile) -> MurataTest {
    let grid = psi.grid();
    let h = grid.step();
    let r_ref = reference_radius(grid);
    let k0 = grid.locate(r_ref).map(|(k, _)| k).unwrap_or(0);
    let nf = n as f64;
    let q: Vec<f64> = (0..grid.len()).map(|k| (2.0 - nf) * grid.s(k) - 2.0 * psi.log_values()[k]).collect();
    let partial = exp_linear_partials(&q, h, k0);
    let xs: Vec<f64> = (0..grid.len()).map(|k| grid.s(k)).collect();
    let slope = regression_slope(&xs, &partial, outer_window(grid, k0));
    let subcritical = !(slope > DIVERGENCE_SLOPE);
    let integral = if subcritical {
        let last = grid.len() - 1;
        let b = (2.0 - nf) - 2.0 * psi.log_slopes()[last];
        let tail = if b < 0.0 { q[last].exp() / -b } else { f64::INFINITY };
        partial[last] + tail
    } else {
        f64::INFINITY
    };
    MurataTest { integral, growth_slope: slope, subcritical, reference_radius: r_ref }
}

/// Minimal positive solution at infinity, `g₀ = ψ ∫_r^∞ t^{1-n} ψ^{-2} dt`.
#[derive(Debug, Clone)]
pub struct GreenSolution {
    pub n: usize,
    pub g0: RadialProfile,
    /// `κ = r^{2-n} / (ψ g₀)` as a profile.
    pub kappa: RadialProfile,
    pub murata: MurataTest,
}

#[derive(Debug, Clone)]
pub enum GreenOutcome {
    Subcritical(GreenSolution),
    Critical(MurataTest),
}

impl GreenOutcome {
    pub fn subcritical(self) -> Result<GreenSolution> {
        match self {
            GreenOutcome::Subcritical(g) => Ok(g),
            GreenOutcome::Critical(m) => {
                invalid(format!("operator is critical: partial integrals grow with slope {:.4}", m.growth_slope))
            }
        }
    }
}

fn hermite_eval(y0: f64, y1: f64, d0: f64, d1: f64, u: f64) -> f64 {
    let u2 = u * u;
    let u3 = u2 * u;
    (2.0 * u3 - 3.0 * u2 + 1.0) * y0 + (u3 - 2.0 * u2 + u) * d0 + (-2.0 * u3 + 3.0 * u2) * y1 + (u3 - u2) * d1
}

pub fn green_from_psi(op: &RadialOperator, psi: &RadialProfile) -> Result<GreenOutcome> {
    let murata = murata_test(op.n, psi);
    if !murata.subcritical {
        return Ok(GreenOutcome::Critical(murata));
    }
    let n = op.n as f64;
    let grid = psi.grid();
    let m = grid.len();
    let h = grid.step();
    let y = psi.log_slopes();
    let dy: Vec<f64> = (0..m).map(|k| riccati(n, &op.potential, grid.s(k), y[k])).collect();
    let mut kappa = vec![0.0; m];
    let mut kap = n - 2.0 + 2.0 * y[m - 1];
    if !(kap > 0.0) {
        return invalid("tail of the Green integral is not decaying at the outer end of the grid");
    }
    kappa[m - 1] = kap;
    let rhs = |u: f64, k: usize, kap: f64| {
        let yy = hermite_eval(y[k], y[k + 1], dy[k] * h, dy[k + 1] * h, u);
        kap * (2.0 - n - 2.0 * yy + kap)
    };
    let mut total = 0usize;
    for k in (0..m - 1).rev() {
        let stiff = (2.0 - n - 2.0 * y[k + 1] + 2.0 * kap).abs() + 1.0;
        let ns = ((h * stiff / STIFF_STEP).ceil() as usize).max(1);
        total += ns;
        if total > MAX_SUBSTEPS {
            return Err(Error::NoConvergence { iterations: total, residual: f64::NAN });
        }
        let du = 1.0 / ns as f64;
        let dh = -h * du;
        for j in 0..ns {
            let u = 1.0 - j as f64 * du;
            let k1 = rhs(u, k, kap);
            let k2 = rhs(u - 0.5 * du, k, kap + 0.5 * dh * k1);
            let k3 = rhs(u - 0.5 * du, k, kap + 0.5 * dh * k2);
            let k4 = rhs(u - du, k, kap + dh * k3);
            kap += dh / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        if !(kap > 0.0) || !kap.is_finite() {
            return Err(Error::NotNonnegative(grid.node(k)));
        }
        kappa[k] = kap;
    }
    let log_kappa: Vec<f64> = kappa.iter().map(|v| v.ln()).collect();
    let kappa_slope: Vec<f64> = (0..m).map(|k| 2.0 - n - 2.0 * y[k] + kappa[k]).collect();
    let log_g0: Vec<f64> = (0..m).map(|k| (2.0 - n) * grid.s(k) - log_kappa[k] - psi.log_values()[k]).collect();
    let g0_slope: Vec<f64> = (0..m).map(|k| y[k] - kappa[k]).collect();
    Ok(GreenOutcome::Subcritical(GreenSolution {
        n: op.n,
        g0: RadialProfile::new(grid.clone(), log_g0, g0_slope)?,
        kappa: RadialProfile::new(grid.clone(), log_kappa, kappa_slope)?,
        murata,
    }))
}

/// Optimal weight `W = 1/4 |(log(g₀/ψ))'|²` on the grid.
#[derive(Debug, Clone)]
pub struct WeightProfile {
    pub n: usize,
    pub kappa: RadialProfile,
    /// `W` at the grid nodes.
    pub values: Vec<f64>,
    /// Largest relative disagreement between the two expressions for `W` at interior nodes.
    pub consistency: f64,
}

impl WeightProfile {
    pub fn grid(&self) -> &Arc<LogGrid> {
        self.kappa.grid()
    }

    /// `W(r)` between nodes.
    pub fn at(&self, r: f64) -> Result<f64> {
        let k = self.kappa.value_at(r)?;
        Ok(k * k / (4.0 * r * r))
    }

    /// `r² W(r)` at the nodes.
    pub fn r2w(&self) -> Vec<f64> {
        self.kappa.log_values().iter().map(|l| 0.25 * (2.0 * l).exp()).collect()
    }

    pub fn samples(&self) -> SampledFunction {
        SampledFunction::new(self.grid().clone(), self.values.clone()).expect("sizes agree")
    }

    /// `((n-2)/2)²`, the limit of `r² W` at the origin for bounded potentials.
    pub fn near_pole_target(&self) -> f64 {
        let c = (self.n as f64 - 2.0) / 2.0;
        c * c
    }
}

pub fn optimal_weight_radial(psi: &RadialProfile, green: &GreenSolution) -> Result<WeightProfile> {
    let grid = psi.grid();
    let m = grid.len();
    let h = grid.step();
    let log_ratio: Vec<f64> = (0..m).map(|k| green.g0.log_values()[k] - psi.log_values()[k]).collect();
    let d = log_variable_derivative(&log_ratio, h);
    let kappa: Vec<f64> = green.kappa.log_values().iter().map(|v| v.exp()).collect();
    let values: Vec<f64> = (0..m).map(|k| kappa[k] * kappa[k] / (4.0 * grid.node(k).powi(2))).collect();
    let mut consistency: f64 = 0.0;
    for k in 2..m.saturating_sub(2) {
        let r = grid.node(k);
        let from_derivative = 0.25 * (d[k] / r).powi(2);
        consistency = consistency.max((from_derivative - values[k]).abs() / values[k]);
    }
    if consistency > 1e-6 {
        return invalid(format!("weight expressions disagree by {consistency:e}; refine the grid"));
    }
    Ok(WeightProfile { n: green.n, kappa: green.kappa.clone(), values, consistency })
}

/// Divergence of `∫ t^{1-n} / (ψ g₀) dt` toward both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalityVerdict {
    pub slope_zero: f64,
    pub slope_infinity: f64,
    pub divergent_zero: bool,
    pub divergent_infinity: bool,
}

impl CriticalityVerdict {
    /// Both integrals diverge: the weight is critical.
    pub fn critical(&self) -> bool {
        self.divergent_zero && self.divergent_infinity
    }
}

pub fn criticality_integrals(n: usize, psi: &RadialProfile, g0: &RadialProfile) -> Result<CriticalityVerdict> {
    let grid = psi.grid();
    if !Arc::ptr_eq(grid, g0.grid()) && grid.as_ref() != g0.grid().as_ref() {
        return invalid("profiles must share a grid");
    }
    let h = grid.step();
    let m = grid.len();
    let nf = n as f64;
    let q: Vec<f64> = (0..m).map(|k| (2.0 - nf) * grid.s(k) - psi.log_values()[k] - g0.log_values()[k]).collect();
    let r_ref = reference_radius(grid);
    let k0 = grid.locate(r_ref).map(|(k, _)| k).unwrap_or(0);
    let xs: Vec<f64> = (0..m).map(|k| grid.s(k)).collect();
    let outward = exp_linear_partials(&q, h, k0);
    let slope_infinity = regression_slope(&xs, &outward, outer_window(grid, k0));
    let mut inward = vec![0.0; m];
    let mut acc = 0.0;
    for k in (0..k0).rev() {
        acc += exp_linear_cell(q[k], q[k + 1], h);
        inward[k] = acc;
    }
    let neg: Vec<f64> = xs.iter().map(|s| -s).collect();
    let slope_zero = regression_slope(&neg, &inward, inner_window(grid, k0));
    Ok(CriticalityVerdict {
        slope_zero,
        slope_infinity,
        divergent_zero: slope_zero > DIVERGENCE_SLOPE,
        divergent_infinity: slope_infinity > DIVERGENCE_SLOPE,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillationReport {
    pub sign_changes: usize,
    /// `limsup (-λW)/(4W)` over the outer decade of the window.
    pub gu_quotient: f64,
    pub gu_oscillatory: bool,
}

/// Sign changes of the solution of `-u'' - (n-1)/r u' + (V - λW) u = 0`, `u(r_lo) = 0`, `u'(r_lo) = 1`.
///
/// Counted with a Prüfer angle for `w = r^{(n-2)/2} u` in `s = log r`.
pub fn oscillation_count(
    n: usize,
    potential: &dyn Fn(f64) -> f64,
    weight: &dyn Fn(f64) -> f64,
    lambda: f64,
    r_lo: f64,
    r_hi: f64,
) -> Result<OscillationReport> {
    if n < 2 {
        return invalid("dimension must be ≥ 2");
    }
    if !(r_lo > 0.0 && r_hi > r_lo) {
        return invalid(format!("bad window [{r_lo}, {r_hi}]"));
    }
    let c = (n as f64 - 2.0) / 2.0;
    let f = |s: f64| {
        let r = s.exp();
        -c * c - r * r * (potential(r) - lambda * weight(r))
    };
    let rhs = |s: f64, th: f64| {
        let (sn, cs) = th.sin_cos();
        cs * cs + f(s) * sn * sn
    };
    let (s0, s1) = (r_lo.ln(), r_hi.ln());
    let mut s = s0;
    let mut th = 0.0;
    let mut steps = 0usize;
    while s < s1 {
        let fs = f(s).abs();
        let mut dh = (0.3 / (1.0 + fs).sqrt()).min(0.01 * (s1 - s0).max(1e-12)).min(0.02);
        if s + dh > s1 {
            dh = s1 - s;
        }
        let k1 = rhs(s, th);
        let k2 = rhs(s + 0.5 * dh, th + 0.5 * dh * k1);
        let k3 = rhs(s + 0.5 * dh, th + 0.5 * dh * k2);
        let k4 = rhs(s + dh, th + dh * k3);
        th += dh / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        s += dh;
        steps += 1;
        if steps > MAX_SUBSTEPS {
            return Err(Error::NoConvergence { iterations: steps, residual: f64::NAN });
        }
    }
    let sign_changes = (th / PI).floor().max(0.0) as usize;
    let mut gu: f64 = f64::NEG_INFINITY;
    let lo = (s1 - std::f64::consts::LN_10).max(s0);
    for i in 0..=50 {
        let r = (lo + (s1 - lo) * i as f64 / 50.0).exp();
        let w = weight(r);
        if w > 0.0 {
            gu = gu.max(-lambda * w / (4.0 * w));
        }
    }
    Ok(OscillationReport { sign_changes, gu_quotient: gu, gu_oscillatory: gu < -0.25 })
}

/// Surface area of the unit sphere in `R^n`.
pub fn sphere_area(n: usize) -> f64 {
    match n {
        0 => 0.0,
        1 => 2.0,
        2 => 2.0 * PI,
        _ => 2.0 * PI / (n as f64 - 2.0) * sphere_area(n - 2),
    }
}

fn log_sinh(r: f64) -> f64 {
    if r > 20.0 {
        r - std::f64::consts::LN_2 + (-(-2.0 * r).exp()).ln_1p()
    } else {
        r.sinh().ln()
    }
}

/// `r coth r - 1`.
fn rcoth_minus_one(r: f64) -> f64 {
    if r < 1e-3 {
        let r2 = r * r;
        r2 / 3.0 - r2 * r2 / 45.0 + 2.0 * r2 * r2 * r2 / 945.0
    } else {
        r / r.tanh() - 1.0
    }
}

/// Radial solution pair `(u, G)` of `P = -Δ + V`: `u` regular with `u(0) = 1`
/// and `G` the Green function with unit flux.
#[derive(Debug, Clone)]
pub enum RadialPair {
    /// `V = 0`, `u = 1`, `G = r^{2-n} / ((n-2) |S^{n-1}|)`.
    Classical { n: usize },
    /// `n = 3`, `V = 1`, `u = sinh r / r`, `G = e^{-r} / (4π r)`.
    Yukawa,
    /// From the radial engine; `G = g₀ / |S^{n-1}|`.
    Profiles { n: usize, potential: RadialPotential, psi: RadialProfile, g0: RadialProfile },
}

impl RadialPair {
    pub fn from_green(op: &RadialOperator, psi: &RadialProfile, green: &GreenSolution) -> Self {
        RadialPair::Profiles { n: op.n, potential: op.potential.clone(), psi: psi.clone(), g0: green.g0.clone() }
    }

    pub fn classical(n: usize) -> Result<Self> {
        if n < 3 {
            return invalid("the punctured-space pair needs n ≥ 3");
        }
        Ok(RadialPair::Classical { n })
    }

    pub fn dim(&self) -> usize {
        match self {
            RadialPair::Classical { n } | RadialPair::Profiles { n, .. } => *n,
            RadialPair::Yukawa => 3,
        }
    }

    pub fn potential(&self, r: f64) -> f64 {
        match self {
            RadialPair::Classical { .. } => 0.0,
            RadialPair::Yukawa => 1.0,
            RadialPair::Profiles { potential, .. } => potential.eval(r),
        }
    }

    /// Radii where the pair is available.
    pub fn range(&self) -> (f64, f64) {
        match self {
            RadialPair::Classical { .. } | RadialPair::Yukawa => (0.0, f64::INFINITY),
            RadialPair::Profiles { psi, .. } => (psi.grid().t_min(), psi.grid().t_max()),
        }
    }

    pub fn log_u(&self, r: f64) -> Result<f64> {
        match self {
            RadialPair::Classical { .. } => Ok(0.0),
            RadialPair::Yukawa => Ok(log_sinh(r) - r.ln()),
            RadialPair::Profiles { psi, .. } => psi.log_value_at(r),
        }
    }

    /// `r u'/u`.
    pub fn slope_u(&self, r: f64) -> Result<f64> {
        match self {
            RadialPair::Classical { .. } => Ok(0.0),
            RadialPair::Yukawa => Ok(rcoth_minus_one(r)),
            RadialPair::Profiles { psi, .. } => psi.log_slope_at(r),
        }
    }

    pub fn log_g(&self, r: f64) -> Result<f64> {
        match self {
            RadialPair::Classical { n } => {
                let nf = *n as f64;
                Ok((2.0 - nf) * r.ln() - ((nf - 2.0) * sphere_area(*n)).ln())
            }
            RadialPair::Yukawa => Ok(-r - r.ln() - (4.0 * PI).ln()),
            RadialPair::Profiles { n, g0, .. } => Ok(g0.log_value_at(r)? - sphere_area(*n).ln()),
        }
    }

    /// `r G'/G`.
    pub fn slope_g(&self, r: f64) -> Result<f64> {
        match self {
            RadialPair::Classical { n } => Ok(2.0 - *n as f64),
            RadialPair::Yukawa => Ok(-r - 1.0),
            RadialPair::Profiles { g0, .. } => g0.log_slope_at(r),
        }
    }

    /// `τ = log(G/u)`, strictly decreasing in `r`.
    pub fn tau(&self, r: f64) -> Result<f64> {
        Ok(self.log_g(r)? - self.log_u(r)?)
    }

    /// `r dτ/dr`.
    pub fn tau_slope(&self, r: f64) -> Result<f64> {
        Ok(self.slope_g(r)? - self.slope_u(r)?)
    }

    /// `W = 1/4 |∇ log(G/u)|²`.
    pub fn weight(&self, r: f64) -> Result<f64> {
        let t = self.tau_slope(r)?;
        Ok(t * t / (4.0 * r * r))
    }

    /// Radius with `τ(r) = level`.
    pub fn radius_at_level(&self, level: f64) -> Result<f64> {
        let (lo, hi) = self.range();
        let (mut a, mut b) = if lo > 0.0 { (lo.ln(), hi.ln()) } else { (-700.0, 700.0) };
        if let RadialPair::Classical { n } = self {
            let nf = *n as f64;
            let r = ((-level - ((nf - 2.0) * sphere_area(*n)).ln()) / (nf - 2.0)).exp();
            return Ok(r);
        }
        let f = |s: f64| self.tau(s.exp()).map(|t| t - level);
        if lo == 0.0 {
            a = -60.0;
            b = 60.0;
            while f(a)? < 0.0 && a > -700.0 {
                a -= 20.0;
            }
            while f(b)? > 0.0 && b < 700.0 {
                b += 20.0;
            }
        }
        let fa = f(a)?;
        let fb = f(b)?;
        if fa < 0.0 || fb > 0.0 {
            return invalid(format!("level {level} is not attained on the available range"));
        }
        let mut x0 = a;
        let mut x1 = b;
        for _ in 0..200 {
            let mid = 0.5 * (x0 + x1);
            if f(mid)? > 0.0 {
                x0 = mid;
            } else {
                x1 = mid;
            }
            if x1 - x0 < 1e-15 * (1.0 + mid.abs()) {
                break;
            }
        }
        Ok((0.5 * (x0 + x1)).exp())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn op(n: usize, v: RadialPotential) -> RadialOperator {
        RadialOperator::new(n, v, Arc::new(LogGrid::new(1e-6, 1e6, 8001).unwrap())).unwrap()
    }

    #[test]
    fn dimension_one_is_rejected() {
        let g = Arc::new(LogGrid::new(1e-3, 1e3, 100).unwrap());
        let e = RadialOperator::new(1, RadialPotential::Zero, g).unwrap_err();
        assert!(e.to_string().contains("dimension must be ≥ 2"));
    }

    #[test]
    fn zero_potential_gives_constant_psi() {
        for n in [2, 3, 5] {
            let o = op(n, RadialPotential::Zero);
            let psi = solve_radial_solution(&o).unwrap();
            assert!(psi.log_values().iter().all(|v| *v == 0.0));
        }
    }

    #[test]
    fn murata_decides_planar_critical_and_spatial_subcritical() {
        let psi2 = solve_radial_solution(&op(2, RadialPotential::Zero)).unwrap();
        let m2 = murata_test(2, &psi2);
        assert!(!m2.subcritical);
        assert!((m2.growth_slope - 1.0).abs() < 1e-9);
        let psi3 = solve_radial_solution(&op(3, RadialPotential::Zero)).unwrap();
        let m3 = murata_test(3, &psi3);
        assert!(m3.subcritical);
        assert!((m3.integral - 1.0).abs() < 1e-12);
        assert!(matches!(green_from_psi(&op(2, RadialPotential::Zero), &psi2).unwrap(), GreenOutcome::Critical(_)));
    }

    #[test]
    fn yukawa_psi_matches_sinh() {
        let o = op(3, RadialPotential::Constant(1.0));
        let psi = solve_radial_solution(&o).unwrap();
        for (k, &r) in o.grid.nodes().iter().enumerate() {
            let exact = log_sinh(r) - r.ln();
            let scale = exact.abs().max(1.0);
            assert!((psi.log_values()[k] - exact).abs() < 1e-6 * scale, "r={r}");
        }
        assert!(solution_residual(&o, &psi) < 1e-6);
    }

    #[test]
    fn log_slopes_match_differentiated_log_samples() {
        let o = op(3, RadialPotential::Constant(1.0));
        let psi = solve_radial_solution(&o).unwrap();
        let d = crate::numgrid::differentiate(&psi.log_samples());
        let ld = psi.log_derivative();
        for k in 2..o.grid.len() - 2 {
            let a = d.values()[k];
            let b = ld.values()[k];
            assert!((a - b).abs() <= 1e-8 * b.abs().max(1e-6), "k={k} {a} {b}");
        }
    }

    #[test]
    fn negative_potential_loses_positivity() {
        let o = op(3, RadialPotential::Constant(-10.0));
        assert!(matches!(solve_radial_solution(&o), Err(Error::NotNonnegative(_))));
    }

    #[test]
    fn inverse_square_start_uses_indicial_root() {
        let g = Arc::new(LogGrid::new(1e-4, 1e4, 2001).unwrap());
        let o = RadialOperator::new(3, RadialPotential::Power { c: 2.0, b: -2.0 }, g).unwrap();
        let psi = solve_radial_solution(&o).unwrap();
        assert!(psi.log_slopes().iter().all(|y| (y - 1.0).abs() < 1e-12));
        let sub = RadialOperator::new(3, RadialPotential::Power { c: -0.3, b: -2.0 }, o.grid.clone()).unwrap();
        assert!(matches!(solve_radial_solution(&sub), Err(Error::NotNonnegative(_))));
    }

    #[test]
    fn classical_weight_is_exact() {
        let o = op(3, RadialPotential::Zero);
        let psi = solve_radial_solution(&o).unwrap();
        let green = green_from_psi(&o, &psi).unwrap().subcritical().unwrap();
        let w = optimal_weight_radial(&psi, &green).unwrap();
        for x in w.r2w() {
            assert!((x - 0.25).abs() < 1e-10);
        }
        let verdict = criticality_integrals(3, &psi, &green.g0).unwrap();
        assert!(verdict.critical());
        assert!((verdict.slope_zero - 1.0).abs() < 1e-3 && (verdict.slope_infinity - 1.0).abs() < 1e-3);
    }

    #[test]
    fn yukawa_green_and_weight() {
        let o = op(3, RadialPotential::Constant(1.0));
        let psi = solve_radial_solution(&o).unwrap();
        let green = green_from_psi(&o, &psi).unwrap().subcritical().unwrap();
        assert!((green.g0.value_at(1.0).unwrap() - (-1f64).exp()).abs() < 1e-6);
        let w = optimal_weight_radial(&psi, &green).unwrap();
        let coth1 = 1.0 / 1f64.tanh();
        assert!((w.at(1.0).unwrap() - (1.0 + coth1).powi(2) / 4.0).abs() < 1e-6);
        assert!((w.at(20.0).unwrap() - 1.0).abs() < 1e-6);
        assert!((w.r2w()[10] - 0.25).abs() < 1e-4);
    }

    #[test]
    fn hermite_lookup_between_nodes() {
        let g = Arc::new(LogGrid::new(0.1, 10.0, 400).unwrap());
        let p = RadialProfile::from_fns(g, |r| r.sin(), |r| r * r.cos());
        for r in [0.1234, 1.0, 3.3, 9.99] {
            assert!((p.log_value_at(r).unwrap() - r.sin()).abs() < 1e-6);
            assert!((p.log_slope_at(r).unwrap() - r * r.cos()).abs() < 1e-3);
        }
        assert!(p.log_value_at(20.0).is_err());
    }

    #[test]
    fn oscillation_counts_for_classical_weight() {
        let w = |r: f64| 0.25 / (r * r);
        let zero = |_: f64| 0.0;
        let hi = (20.0 * PI).exp();
        let rep = oscillation_count(3, &zero, &w, 2.0, 1.0, hi).unwrap();
        assert!((rep.sign_changes as i64 - 10).abs() <= 1, "{}", rep.sign_changes);
        assert!(rep.gu_oscillatory);
        let crit = oscillation_count(3, &zero, &w, 1.0, 1.0, hi).unwrap();
        assert_eq!(crit.sign_changes, 0);
        assert!(!crit.gu_oscillatory);
        let sub = oscillation_count(3, &zero, &w, 0.5, 1e-3, 1e3).unwrap();
        assert_eq!(sub.sign_changes, 0);
    }

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_area(4) - 2.0 * PI * PI).abs() < 1e-13);
        assert!((sphere_area(5) - 8.0 * PI * PI / 3.0).abs() < 1e-13);
    }

    #[test]
    fn yukawa_pair_matches_engine_pair() {
        let o = op(3, RadialPotential::Constant(1.0));
        let psi = solve_radial_solution(&o).unwrap();
        let green = green_from_psi(&o, &psi).unwrap().subcritical().unwrap();
        let engine = RadialPair::from_green(&o, &psi, &green);
        for r in [1e-3, 0.5, 1.0, 7.0, 30.0] {
            assert!((engine.tau(r).unwrap() - RadialPair::Yukawa.tau(r).unwrap()).abs() < 1e-7);
            let (a, b) = (engine.weight(r).unwrap(), RadialPair::Yukawa.weight(r).unwrap());
            assert!((a - b).abs() < 1e-6 * b);
        }
    }

    #[test]
    fn level_radius_inverts_tau() {
        for pair in [RadialPair::classical(3).unwrap(), RadialPair::Yukawa] {
            for level in [-5.0, 0.0, 1.0, 3.0] {
                let r = pair.radius_at_level(level).unwrap();
                assert!((pair.tau(r).unwrap() - level).abs() < 1e-10);
            }
        }
    }
}
