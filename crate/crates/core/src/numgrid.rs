//! Geometric grids, sampled functions and quadrature in the log variable.

use std::sync::Arc;

use crate::error::{invalid, Error, Result};

/// Geometric grid `t_k = t_min * exp(k h)` with both endpoints included.
#[derive(Debug, Clone, PartialEq)]
pub struct LogGrid {
    t_min: f64,
    t_max: f64,
    h: f64,
    nodes: Vec<f64>,
}

impl LogGrid {
    pub fn new(t_min: f64, t_max: f64, m: usize) -> Result<Self> {
        if !(t_min > 0.0) || !t_min.is_finite() {
            return invalid(format!("grid lower end must be positive, got {t_min}"));
        }
        if !(t_max > t_min) || !t_max.is_finite() {
            return invalid(format!("grid upper end {t_max} must exceed lower end {t_min}"));
        }
        if m < 3 {
            return invalid(format!("grid needs at least 3 nodes, got {m}"));
        }
        let s0 = t_min.ln();
        let h = (t_max.ln() - s0) / (m - 1) as f64;
        let mut nodes: Vec<f64> = (0..m).map(|k| (s0 + k as f64 * h).exp()).collect();
        nodes[0] = t_min;
        nodes[m - 1] = t_max;
        Ok(LogGrid { t_min, t_max, h, nodes })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn t_min(&self) -> f64 {
        self.t_min
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    /// Step in the log variable.
    pub fn step(&self) -> f64 {
        self.h
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn node(&self, k: usize) -> f64 {
        self.nodes[k]
    }

    /// Log-coordinate of node `k`, computed without rounding drift.
    pub fn s(&self, k: usize) -> f64 {
        self.t_min.ln() + k as f64 * self.h
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.t_min * (1.0 - 1e-14) && t <= self.t_max * (1.0 + 1e-14)
    }

    /// Cell index and fractional position (in the log variable) of `t`.
    pub fn locate(&self, t: f64) -> Result<(usize, f64)> {
        if !self.contains(t) {
            return Err(Error::OutsideGrid(t, self.t_min, self.t_max));
        }
        let x = ((t.ln() - self.t_min.ln()) / self.h).clamp(0.0, (self.len() - 1) as f64);
        let k = (x.floor() as usize).min(self.len() - 2);
        Ok((k, x - k as f64))
    }
}

/// Values of a function at the nodes of a [`LogGrid`].
#[derive(Debug, Clone)]
pub struct SampledFunction {
    grid: Arc<LogGrid>,
    values: Vec<f64>,
    positive: bool,
}

impl SampledFunction {
    pub fn new(grid: Arc<LogGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return invalid(format!("sample count {} does not match grid size {}", values.len(), grid.len()));
        }
        let positive = values.iter().all(|v| *v > 0.0);
        Ok(SampledFunction { grid, values, positive })
    }

    pub fn from_fn(grid: Arc<LogGrid>, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.nodes().iter().map(|&t| f(t)).collect();
        Self::new(grid, values).expect("sizes agree by construction")
    }

    pub fn grid(&self) -> &Arc<LogGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_positive(&self) -> bool {
        self.positive
    }

    /// Shape-preserving cubic interpolation in the log variable.
    pub fn interpolate(&self, t: f64) -> Result<f64> {
        let (k, frac) = self.grid.locate(t)?;
        let h = self.grid.step();
        let y = &self.values;
        let tangent = |j: usize| pchip_tangent_uniform(y, j, h);
        Ok(hermite(y[k], y[k + 1], tangent(k) * h, tangent(k + 1) * h, frac))
    }
}

fn hermite(y0: f64, y1: f64, d0: f64, d1: f64, u: f64) -> f64 {
    let u2 = u * u;
    let u3 = u2 * u;
    (2.0 * u3 - 3.0 * u2 + 1.0) * y0 + (u3 - 2.0 * u2 + u) * d0 + (-2.0 * u3 + 3.0 * u2) * y1 + (u3 - u2) * d1
}

fn pchip_tangent_uniform(y: &[f64], j: usize, h: f64) -> f64 {
    let n = y.len();
    let d = |i: usize| (y[i + 1] - y[i]) / h;
    if j == 0 {
        return pchip_end(d(0), if n > 2 { d(1) } else { d(0) }, h, h);
    }
    if j == n - 1 {
        return pchip_end(d(n - 2), if n > 2 { d(n - 3) } else { d(n - 2) }, h, h);
    }
    let (a, b) = (d(j - 1), d(j));
    if a * b <= 0.0 {
        0.0
    } else {
        2.0 / (1.0 / a + 1.0 / b)
    }
}

fn pchip_end(d0: f64, d1: f64, h0: f64, h1: f64) -> f64 {
    let m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if m * d0 <= 0.0 {
        0.0
    } else if d0 * d1 <= 0.0 && m.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        m
    }
}

/// Monotone piecewise-cubic interpolant over arbitrary increasing abscissae.
#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() || x.len() < 2 {
            return invalid("interpolation needs at least two (x, y) pairs of equal length");
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return invalid("interpolation abscissae must be strictly increasing");
        }
        let n = x.len();
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let d: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
        let mut m = vec![0.0; n];
        if n == 2 {
            m[0] = d[0];
            m[1] = d[0];
        } else {
            m[0] = pchip_end(d[0], d[1], h[0], h[1]);
            m[n - 1] = pchip_end(d[n - 2], d[n - 3], h[n - 2], h[n - 3]);
            for i in 1..n - 1 {
                if d[i - 1] * d[i] > 0.0 {
                    let w1 = 2.0 * h[i] + h[i - 1];
                    let w2 = h[i] + 2.0 * h[i - 1];
                    m[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
                }
            }
        }
        Ok(MonotoneCubic { x, y, m })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        let (lo, hi) = self.domain();
        if !(t >= lo && t <= hi) {
            return Err(Error::OutsideGrid(t, lo, hi));
        }
        let k = match self.x.partition_point(|&v| v <= t) {
            0 => 0,
            p => (p - 1).min(self.x.len() - 2),
        };
        let h = self.x[k + 1] - self.x[k];
        let u = (t - self.x[k]) / h;
        Ok(hermite(self.y[k], self.y[k + 1], self.m[k] * h, self.m[k + 1] * h, u))
    }
}

/// `∫_a^b f(t) dt` by the trapezoid rule in `s = log t`, endpoints linearly interpolated.
pub fn integrate(f: &SampledFunction, a: f64, b: f64) -> Result<f64> {
    if a > b {
        return Ok(-integrate(f, b, a)?);
    }
    let grid = f.grid();
    let (ka, ua) = grid.locate(a)?;
    let (kb, ub) = grid.locate(b)?;
    let h = grid.step();
    let g: Vec<f64> = f.values().iter().zip(grid.nodes()).map(|(v, t)| v * t).collect();
    let lerp = |k: usize, u: f64| g[k] + u * (g[k + 1] - g[k]);
    let ga = lerp(ka, ua);
    let gb = lerp(kb, ub);
    if ka == kb {
        return Ok(0.5 * (ga + gb) * (ub - ua) * h);
    }
    let mut sum = 0.5 * (ga + g[ka + 1]) * (1.0 - ua) * h;
    for k in ka + 1..kb {
        sum += 0.5 * (g[k] + g[k + 1]) * h;
    }
    sum += 0.5 * (g[kb] + gb) * ub * h;
    Ok(sum)
}

/// Running integral `∫_{t_min}^{t_k} f dt` at every node.
pub fn cumulative_integral(f: &SampledFunction) -> SampledFunction {
    let grid = f.grid().clone();
    let h = grid.step();
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(grid.len());
    out.push(0.0);
    for k in 0..grid.len() - 1 {
        let g0 = f.values()[k] * grid.node(k);
        let g1 = f.values()[k + 1] * grid.node(k + 1);
        acc += 0.5 * (g0 + g1) * h;
        out.push(acc);
    }
    SampledFunction::new(grid, out).expect("sizes agree")
}

/// `df/dt` from centered differences in the log variable.
///
/// Fourth-order stencils in the interior, second-order centered next to the
/// ends and second-order one-sided at the ends.
pub fn differentiate(f: &SampledFunction) -> SampledFunction {
    let grid = f.grid().clone();
    let ds = log_variable_derivative(f.values(), grid.step());
    let values = ds.iter().zip(grid.nodes()).map(|(d, t)| d / t).collect();
    SampledFunction::new(grid, values).expect("sizes agree")
}

/// Derivative with respect to the log variable of samples on a uniform mesh.
pub fn log_variable_derivative(y: &[f64], h: f64) -> Vec<f64> {
    let n = y.len();
    let mut d = vec![0.0; n];
    if n < 3 {
        if n == 2 {
            d[0] = (y[1] - y[0]) / h;
            d[1] = d[0];
        }
        return d;
    }
    d[0] = (-3.0 * y[0] + 4.0 * y[1] - y[2]) / (2.0 * h);
    d[n - 1] = (3.0 * y[n - 1] - 4.0 * y[n - 2] + y[n - 3]) / (2.0 * h);
    for k in 1..n - 1 {
        d[k] = if k >= 2 && k + 2 < n {
            (y[k - 2] - 8.0 * y[k - 1] + 8.0 * y[k + 1] - y[k + 2]) / (12.0 * h)
        } else {
            (y[k + 1] - y[k - 1]) / (2.0 * h)
        };
    }
    d
}

/// Power-law tail `∫_{t_max}^∞ f dt` with the exponent fitted on the last decade.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailEstimate {
    pub exponent: f64,
    pub integral: f64,
}

pub fn tail_estimate(f: &SampledFunction) -> Result<TailEstimate> {
    let grid = f.grid();
    let n = grid.len();
    let t_end = grid.t_max();
    let start = grid.nodes().partition_point(|&t| t < t_end / 10.0).min(n - 2);
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for k in start..n {
        let v = f.values()[k];
        if v == 0.0 {
            continue;
        }
        xs.push(grid.node(k).ln());
        ys.push(v.abs().ln());
    }
    let last = f.values()[n - 1];
    if last == 0.0 {
        return Ok(TailEstimate { exponent: f64::NEG_INFINITY, integral: 0.0 });
    }
    if xs.len() < 2 {
        return invalid("tail estimate needs at least two nonzero samples in the last decade");
    }
    let fit = linear_fit(&xs, &ys);
    let p = fit.slope;
    let integral = if p < -1.0 { -last * t_end / (p + 1.0) } else { f64::INFINITY * last.signum() };
    Ok(TailEstimate { exponent: p, integral })
}

/// Least-squares line `y = slope x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> LinearFit {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        sxy += (a - mx) * (b - my);
        syy += (b - my) * (b - my);
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let r_squared = if syy > 0.0 && sxx > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    LinearFit { slope, intercept: my - slope * mx, r_squared }
}

const GL5_NODES: [f64; 5] =
    [-0.906_179_845_938_664, -0.538_469_310_105_683, 0.0, 0.538_469_310_105_683, 0.906_179_845_938_664];
const GL5_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

/// Composite five-point Gauss-Legendre rule on `panels` equal panels.
pub fn gauss_legendre<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, panels: usize) -> f64 {
    let panels = panels.max(1);
    let w = (b - a) / panels as f64;
    let mut sum = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * w;
        for (x, c) in GL5_NODES.iter().zip(GL5_WEIGHTS) {
            sum += c * f(mid + 0.5 * w * x);
        }
    }
    0.5 * w * sum
}

/// Fallible variant of [`gauss_legendre`].
pub fn try_gauss_legendre<F: FnMut(f64) -> Result<f64>>(mut f: F, a: f64, b: f64, panels: usize) -> Result<f64> {
    let panels = panels.max(1);
    let w = (b - a) / panels as f64;
    let mut sum = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * w;
        for (x, c) in GL5_NODES.iter().zip(GL5_WEIGHTS) {
            sum += c * f(mid + 0.5 * w * x)?;
        }
    }
    Ok(0.5 * w * sum)
}

/// Adaptive Gauss-Legendre with interval bisection until the absolute change is below `tol`.
pub fn adaptive_gauss<F: FnMut(f64) -> Result<f64>>(mut f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    fn rec<F: FnMut(f64) -> Result<f64>>(f: &mut F, a: f64, b: f64, whole: f64, tol: f64, depth: usize) -> Result<f64> {
        let m = 0.5 * (a + b);
        let left = try_gauss_legendre(&mut *f, a, m, 1)?;
        let right = try_gauss_legendre(&mut *f, m, b, 1)?;
        if depth == 0 || (left + right - whole).abs() <= tol {
            return Ok(left + right);
        }
        Ok(rec(f, a, m, left, 0.5 * tol, depth - 1)? + rec(f, m, b, right, 0.5 * tol, depth - 1)?)
    }
    let whole = try_gauss_legendre(&mut f, a, b, 1)?;
    rec(&mut f, a, b, whole, tol, 40)
}

/// Bisection root of a continuous function with a sign change on `[a, b]`.
pub fn bisect<F: FnMut(f64) -> Result<f64>>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> Result<f64> {
    let mut fa = f(a)?;
    let fb = f(b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa * fb > 0.0 {
        return invalid(format!("no sign change on [{a}, {b}]"));
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (b - a).abs() <= tol * (1.0 + m.abs()) {
            return Ok(m);
        }
        let fm = f(m)?;
        if fm == 0.0 {
            return Ok(m);
        }
        if fa * fm < 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    Ok(0.5 * (a + b))
}
