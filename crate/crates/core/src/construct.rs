//! Hardy weights built from pairs (or families) of positive solutions.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{invalid, Error, Result};

pub type FieldFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type GradFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
pub type MatrixFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
type WeightFn = Arc<dyn Fn(&[f64]) -> Result<f64> + Send + Sync>;

/// Positive function on a domain of `R^n`, optionally with a closed-form gradient.
#[derive(Clone)]
pub struct ScalarField {
    n: usize,
    label: String,
    value: FieldFn,
    gradient: Option<GradFn>,
    probes: Vec<Vec<f64>>,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("n", &self.n)
            .field("label", &self.label)
            .field("closed_form_gradient", &self.gradient.is_some())
            .finish()
    }
}

impl ScalarField {
    pub fn new(n: usize, label: impl Into<String>, value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        ScalarField { n, label: label.into(), value: Arc::new(value), gradient: None, probes: Vec::new() }
    }

    pub fn with_gradient(mut self, grad: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static) -> Self {
        self.gradient = Some(Arc::new(grad));
        self
    }

    /// Points used to check positivity and degeneracy when a weight is built.
    pub fn with_probes(mut self, probes: Vec<Vec<f64>>) -> Self {
        self.probes = probes;
        self
    }

    pub fn constant(n: usize, c: f64) -> Self {
        ScalarField::new(n, format!("{c}"), move |_| c).with_gradient(move |x| vec![0.0; x.len()])
    }

    /// `|x - center|^p`.
    pub fn radial_power(n: usize, center: Vec<f64>, p: f64) -> Self {
        let c2 = center.clone();
        ScalarField::new(n, format!("|x-{center:?}|^{p}"), move |x| dist(x, &center).powf(p)).with_gradient(move |x| {
            let r2 = dist2(x, &c2);
            let f = p * r2.powf(0.5 * p - 1.0);
            x.iter().zip(&c2).map(|(a, b)| f * (a - b)).collect()
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn probes(&self) -> &[Vec<f64>] {
        &self.probes
    }

    /// Raw value without the positivity check.
    pub fn raw(&self, x: &[f64]) -> f64 {
        (self.value)(x)
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        let v = (self.value)(x);
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::NonPositive { point: x.to_vec(), value: v });
        }
        Ok(v)
    }

    pub fn grad(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        if let Some(g) = &self.gradient {
            return Ok(g(x));
        }
        let scale = x.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-3);
        let h = 1e-3 * scale;
        let mut out = Vec::with_capacity(self.n);
        let mut y = x.to_vec();
        for i in 0..self.n {
            let at = |y: &mut Vec<f64>, d: f64| {
                y[i] = x[i] + d;
                (self.value)(y)
            };
            let v =
                (-at(&mut y, 2.0 * h) + 8.0 * at(&mut y, h) - 8.0 * at(&mut y, -h) + at(&mut y, -2.0 * h)) / (12.0 * h);
            y[i] = x[i];
            out.push(v);
        }
        Ok(out)
    }

    /// Gradient of `log v`.
    pub fn grad_log(&self, x: &[f64]) -> Result<Vec<f64>> {
        let v = self.eval(x)?;
        Ok(self.grad(x)?.into_iter().map(|g| g / v).collect())
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n {
            return invalid(format!("point has dimension {}, field expects {}", x.len(), self.n));
        }
        Ok(())
    }
}

pub(crate) fn dist2(x: &[f64], c: &[f64]) -> f64 {
    x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum()
}

pub(crate) fn dist(x: &[f64], c: &[f64]) -> f64 {
    dist2(x, c).sqrt()
}

/// Coefficient matrix `A(x)` of the principal part and an optional density.
#[derive(Clone)]
pub struct MetricSpec {
    n: usize,
    matrix: Option<MatrixFn>,
    density: Option<FieldFn>,
}

impl fmt::Debug for MetricSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricSpec").field("n", &self.n).field("identity", &self.matrix.is_none()).finish()
    }
}

impl MetricSpec {
    pub fn identity(n: usize) -> Self {
        MetricSpec { n, matrix: None, density: None }
    }

    /// `a(x)` returns the `n*n` entries in row-major order.
    pub fn variable(n: usize, a: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static) -> Self {
        MetricSpec { n, matrix: Some(Arc::new(a)), density: None }
    }

    pub fn with_density(mut self, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        self.density = Some(Arc::new(f));
        self
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn density(&self, x: &[f64]) -> f64 {
        self.density.as_ref().map_or(1.0, |f| f(x))
    }

    pub fn matrix_at(&self, x: &[f64]) -> DMatrix<f64> {
        match &self.matrix {
            None => DMatrix::identity(self.n, self.n),
            Some(a) => DMatrix::from_row_slice(self.n, self.n, &a(x)),
        }
    }

    /// Symmetry and positive definiteness of `A(x)`.
    pub fn validate_at(&self, x: &[f64]) -> Result<()> {
        let a = self.matrix_at(x);
        let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
        if (&a - a.transpose()).iter().any(|v| v.abs() > 1e-12 * scale) {
            return invalid(format!("coefficient matrix is not symmetric at {x:?}"));
        }
        if a.cholesky().is_none() {
            return invalid(format!("coefficient matrix is not positive definite at {x:?}"));
        }
        Ok(())
    }

    /// `xi^T A(x) xi`.
    pub fn norm_sq(&self, x: &[f64], xi: &[f64]) -> f64 {
        match &self.matrix {
            None => xi.iter().map(|v| v * v).sum(),
            Some(a) => {
                let m = a(x);
                let n = self.n;
                let mut s = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        s += xi[i] * m[i * n + j] * xi[j];
                    }
                }
                s
            }
        }
    }

    /// `d^T A(x)^{-1} d`.
    pub fn dual_norm_sq(&self, x: &[f64], d: &[f64]) -> Result<f64> {
        match &self.matrix {
            None => Ok(d.iter().map(|v| v * v).sum()),
            Some(_) => {
                let a = self.matrix_at(x);
                let chol =
                    a.cholesky().ok_or_else(|| Error::InvalidInput(format!("coefficient matrix singular at {x:?}")))?;
                let v = nalgebra::DVector::from_column_slice(d);
                let w = chol.solve(&v);
                Ok(v.dot(&w))
            }
        }
    }
}

/// Where a weight came from.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Provenance {
    pub formula: String,
    pub generators: Vec<String>,
    pub degenerate: bool,
}

/// Nonnegative weight `W(x)`.
#[derive(Clone)]
pub struct HardyWeight {
    n: usize,
    eval: WeightFn,
    provenance: Provenance,
}

impl fmt::Debug for HardyWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HardyWeight").field("n", &self.n).field("provenance", &self.provenance).finish()
    }
}

impl HardyWeight {
    pub fn from_fn(
        n: usize,
        formula: impl Into<String>,
        f: impl Fn(&[f64]) -> Result<f64> + Send + Sync + 'static,
    ) -> Self {
        HardyWeight { n, eval: Arc::new(f), provenance: Provenance { formula: formula.into(), ..Default::default() } }
    }

    /// Weight depending on `|x|` only.
    pub fn radial(n: usize, formula: impl Into<String>, w: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        HardyWeight::from_fn(n, formula, move |x| Ok(w(x.iter().map(|v| v * v).sum::<f64>().sqrt())))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n {
            return invalid(format!("point has dimension {}, weight expects {}", x.len(), self.n));
        }
        (self.eval)(x)
    }

    /// Value at `r e_1`.
    pub fn at_radius(&self, r: f64) -> Result<f64> {
        let mut x = vec![0.0; self.n];
        x[0] = r;
        self.value(&x)
    }

    pub fn scaled(&self, c: f64) -> HardyWeight {
        let inner = self.eval.clone();
        let mut provenance = self.provenance.clone();
        provenance.formula = format!("{c} * ({})", provenance.formula);
        HardyWeight { n: self.n, eval: Arc::new(move |x| Ok(c * inner(x)?)), provenance }
    }
}

/// `W = 1/4 |grad log(v0/v1)|_A^2`.
pub fn hardy_weight_pair(v0: &ScalarField, v1: &ScalarField, metric: &MetricSpec) -> Result<HardyWeight> {
    if v0.dim() != v1.dim() || v0.dim() != metric.dim() {
        return invalid("fields and metric must share a dimension");
    }
    let (a, b, m) = (v0.clone(), v1.clone(), metric.clone());
    let eval = move |x: &[f64]| -> Result<f64> {
        let ga = a.grad_log(x)?;
        let gb = b.grad_log(x)?;
        let d: Vec<f64> = ga.iter().zip(&gb).map(|(p, q)| p - q).collect();
        Ok(0.25 * m.norm_sq(x, &d))
    };
    let probes: Vec<Vec<f64>> = v0.probes().iter().chain(v1.probes()).cloned().collect();
    let mut degenerate = !probes.is_empty();
    for p in &probes {
        if eval(p)? > 1e-24 {
            degenerate = false;
        }
    }
    Ok(HardyWeight {
        n: v0.dim(),
        eval: Arc::new(eval),
        provenance: Provenance {
            formula: "1/4 |grad log(v0/v1)|_A^2".into(),
            generators: vec![v0.label().to_string(), v1.label().to_string()],
            degenerate,
        },
    })
}

/// `W = sum_{i<j} a_i a_j |grad log(u_i/u_j)|_A^2` for convex weights `a`.
pub fn hardy_weight_multi(fields: &[ScalarField], alpha: &[f64], metric: &MetricSpec) -> Result<HardyWeight> {
    if fields.len() < 2 {
        return invalid("at least two solutions are required");
    }
    if fields.len() != alpha.len() {
        return invalid(format!("{} solutions but {} weights", fields.len(), alpha.len()));
    }
    if alpha.iter().any(|a| !(*a >= 0.0)) {
        return invalid("weights must be nonnegative");
    }
    let total: f64 = alpha.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return invalid(format!("weights must sum to 1, got {total}"));
    }
    let n = metric.dim();
    if fields.iter().any(|f| f.dim() != n) {
        return invalid("fields and metric must share a dimension");
    }
    let fs = fields.to_vec();
    let al = alpha.to_vec();
    let m = metric.clone();
    let eval = move |x: &[f64]| -> Result<f64> {
        let grads = fs.iter().map(|f| f.grad_log(x)).collect::<Result<Vec<_>>>()?;
        let mut w = 0.0;
        for i in 0..grads.len() {
            for j in i + 1..grads.len() {
                let d: Vec<f64> = grads[i].iter().zip(&grads[j]).map(|(p, q)| p - q).collect();
                w += al[i] * al[j] * m.norm_sq(x, &d);
            }
        }
        Ok(w)
    };
    Ok(HardyWeight {
        n,
        eval: Arc::new(eval),
        provenance: Provenance {
            formula: "sum_{i<j} a_i a_j |grad log(u_i/u_j)|_A^2".into(),
            generators: fields.iter().map(|f| f.label().to_string()).collect(),
            degenerate: false,
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regime {
    /// `lambda < 1`: two positive power-type solutions.
    Subcritical,
    /// `lambda = 1`: geometric mean and its logarithmic partner.
    Critical,
    /// `lambda > 1`: sign-changing solutions in amplitude/phase form.
    Oscillatory,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MemberKind {
    /// `v1^alpha v0^(1-alpha)`.
    Power { alpha: f64 },
    /// `sqrt(v0 v1)`.
    GeometricMean,
    /// `sqrt(v0 v1) log(v0/v1)`.
    GeometricMeanLog,
    /// `sqrt(v0 v1) cos(xi log(v1/v0))` or the sine variant.
    Oscillatory { xi: f64, sine: bool },
}

/// A solution of `(P - lambda W) w = 0` expressed through the generators.
#[derive(Debug, Clone)]
pub struct SolutionMember {
    pub kind: MemberKind,
    v0: ScalarField,
    v1: ScalarField,
}

impl SolutionMember {
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        let a = self.v0.eval(x)?;
        let b = self.v1.eval(x)?;
        Ok(match self.kind {
            MemberKind::Power { alpha } => b.powf(alpha) * a.powf(1.0 - alpha),
            MemberKind::GeometricMean => (a * b).sqrt(),
            MemberKind::GeometricMeanLog => (a * b).sqrt() * (a / b).ln(),
            MemberKind::Oscillatory { xi, sine } => {
                let (amp, phase) = ((a * b).sqrt(), xi * (b / a).ln());
                amp * if sine { phase.sin() } else { phase.cos() }
            }
        })
    }

    /// Amplitude and phase for oscillatory members.
    pub fn amplitude_phase(&self, x: &[f64]) -> Result<Option<(f64, f64)>> {
        match self.kind {
            MemberKind::Oscillatory { xi, .. } => {
                let a = self.v0.eval(x)?;
                let b = self.v1.eval(x)?;
                Ok(Some(((a * b).sqrt(), xi * (b / a).ln())))
            }
            _ => Ok(None),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolutionBasis {
    pub lambda: f64,
    pub regime: Regime,
    pub members: [SolutionMember; 2],
}

/// Two independent solutions of `(P - lambda W) w = 0` with `W` the pair weight of `(v0, v1)`.
pub fn associated_solutions(v0: &ScalarField, v1: &ScalarField, lambda: f64) -> Result<SolutionBasis> {
    if !lambda.is_finite() {
        return invalid("lambda must be finite");
    }
    if v0.dim() != v1.dim() {
        return invalid("fields must share a dimension");
    }
    let member = |kind| SolutionMember { kind, v0: v0.clone(), v1: v1.clone() };
    let (regime, kinds) = if (lambda - 1.0).abs() <= 1e-12 {
        (Regime::Critical, [MemberKind::GeometricMean, MemberKind::GeometricMeanLog])
    } else if lambda < 1.0 {
        let root = (1.0 - lambda).sqrt();
        (
            Regime::Subcritical,
            [MemberKind::Power { alpha: 0.5 * (1.0 + root) }, MemberKind::Power { alpha: 0.5 * (1.0 - root) }],
        )
    } else {
        let xi = 0.5 * (lambda - 1.0).sqrt();
        (Regime::Oscillatory, [MemberKind::Oscillatory { xi, sine: false }, MemberKind::Oscillatory { xi, sine: true }])
    };
    Ok(SolutionBasis { lambda, regime, members: [member(kinds[0]), member(kinds[1])] })
}

/// Fourth-order finite-difference Laplacian with step `h`.
pub fn fd_laplacian(f: &dyn Fn(&[f64]) -> Result<f64>, x: &[f64], h: f64) -> Result<f64> {
    let mut y = x.to_vec();
    let centre = f(x)?;
    let mut lap = 0.0;
    for i in 0..x.len() {
        let mut at = |d: f64| -> Result<f64> {
            y[i] = x[i] + d;
            f(&y)
        };
        let v = -at(2.0 * h)? + 16.0 * at(h)? - 30.0 * centre + 16.0 * at(-h)? - at(-2.0 * h)?;
        y[i] = x[i];
        lap += v / (12.0 * h * h);
    }
    Ok(lap)
}

/// Relative residual of `-Δw + V w - lambda W w` at `x` (identity coefficients).
///
/// Normalised by the size of the terms, floored at `|w| / (1000 h)²`.
pub fn operator_residual(
    w: &dyn Fn(&[f64]) -> Result<f64>,
    potential: &dyn Fn(&[f64]) -> f64,
    weight: &HardyWeight,
    lambda: f64,
    x: &[f64],
    h: f64,
) -> Result<f64> {
    let lap = fd_laplacian(w, x, h)?;
    let val = w(x)?;
    let zeroth = (potential(x) - lambda * weight.value(x)?) * val;
    let floor = val.abs() / (1e3 * h).powi(2);
    Ok((-lap + zeroth).abs() / (lap.abs() + zeroth.abs() + floor + 1e-300))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn classical(n: usize) -> (ScalarField, ScalarField) {
        (ScalarField::radial_power(n, vec![0.0; n], 2.0 - n as f64), ScalarField::constant(n, 1.0))
    }

    #[test]
    fn classical_pair_gives_inverse_square() {
        let (g, one) = classical(3);
        let w = hardy_weight_pair(&g, &one, &MetricSpec::identity(3)).unwrap();
        for x in [[1.0, 0.0, 0.0], [0.3, -2.0, 0.7], [1e-3, 2e-3, 0.0]] {
            let r2: f64 = x.iter().map(|v| v * v).sum();
            assert!((w.value(&x).unwrap() * r2 - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn pair_is_symmetric_and_scale_invariant() {
        let (g, one) = classical(4);
        let m = MetricSpec::identity(4);
        let a = hardy_weight_pair(&g, &one, &m).unwrap();
        let b = hardy_weight_pair(&one, &g, &m).unwrap();
        let three = ScalarField::constant(4, 3.0);
        let c = hardy_weight_pair(&g, &three, &m).unwrap();
        let x = [0.2, 0.4, -0.1, 0.9];
        let wa = a.value(&x).unwrap();
        assert!((wa - b.value(&x).unwrap()).abs() < 1e-14 * wa);
        assert!((wa - c.value(&x).unwrap()).abs() < 1e-14 * wa);
    }

    #[test]
    fn degenerate_pair_is_flagged() {
        let v = ScalarField::radial_power(3, vec![0.0; 3], -1.0).with_probes(vec![vec![1.0, 0.0, 0.0]]);
        let twice = ScalarField::new(3, "2|x|^-1", |x| 2.0 / dist(x, &[0.0; 3])).with_gradient(|x| {
            let r2 = dist2(x, &[0.0; 3]);
            x.iter().map(|v| -2.0 * v / r2.powf(1.5)).collect()
        });
        let w = hardy_weight_pair(&v, &twice, &MetricSpec::identity(3)).unwrap();
        assert!(w.provenance().degenerate);
        assert!(w.value(&[0.5, 0.5, 0.0]).unwrap().abs() < 1e-20);
    }

    #[test]
    fn nonpositive_probe_names_point() {
        let bad = ScalarField::new(2, "x0", |x| x[0]).with_probes(vec![vec![-1.0, 0.0]]);
        let one = ScalarField::constant(2, 1.0);
        match hardy_weight_pair(&bad, &one, &MetricSpec::identity(2)) {
            Err(Error::NonPositive { point, .. }) => assert_eq!(point, vec![-1.0, 0.0]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn multi_with_two_halves_matches_pair() {
        let (g, one) = classical(3);
        let m = MetricSpec::identity(3);
        let pair = hardy_weight_pair(&g, &one, &m).unwrap();
        let multi = hardy_weight_multi(&[g, one], &[0.5, 0.5], &m).unwrap();
        let x = [0.7, 0.1, -0.4];
        assert!((pair.value(&x).unwrap() - multi.value(&x).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn multi_validates_alpha() {
        let (g, one) = classical(3);
        let m = MetricSpec::identity(3);
        assert!(hardy_weight_multi(&[g.clone(), one.clone()], &[0.6, 0.5], &m).is_err());
        assert!(hardy_weight_multi(std::slice::from_ref(&g), &[1.0], &m).is_err());
        assert!(hardy_weight_multi(&[g, one], &[1.2, -0.2], &m).is_err());
    }

    #[test]
    fn variable_metric_is_validated() {
        let m = MetricSpec::variable(2, |_| vec![2.0, 1.0, 1.0, 2.0]);
        assert!(m.validate_at(&[0.0, 0.0]).is_ok());
        let bad = MetricSpec::variable(2, |_| vec![1.0, 2.0, 2.0, 1.0]);
        assert!(bad.validate_at(&[0.0, 0.0]).is_err());
        let d = m.dual_norm_sq(&[0.0, 0.0], &[1.0, 0.0]).unwrap();
        assert!((d - 2.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn associated_solutions_solve_the_scaled_equation() {
        let (g, one) = classical(3);
        let w = hardy_weight_pair(&g, &one, &MetricSpec::identity(3)).unwrap();
        let zero = |_: &[f64]| 0.0;
        for lambda in [0.0, 0.5, 0.99, 1.0, 2.0, 7.5] {
            let basis = associated_solutions(&g, &one, lambda).unwrap();
            for m in &basis.members {
                for x in [[0.8, 0.3, 0.2], [2.0, -1.0, 0.5], [0.05, 0.02, 0.1]] {
                    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                    let res = operator_residual(&|y| m.eval(y), &zero, &w, lambda, &x, 1e-3 * r).unwrap();
                    assert!(res < 1e-5, "lambda {lambda} kind {:?} residual {res}", m.kind);
                }
            }
        }
    }

    #[test]
    fn oscillatory_regime_at_two() {
        let (g, one) = classical(3);
        let basis = associated_solutions(&g, &one, 2.0).unwrap();
        assert_eq!(basis.regime, Regime::Oscillatory);
        let x = [5.0, 0.0, 0.0];
        let v = basis.members[0].eval(&x).unwrap();
        let expect = 5f64.powf(-0.5) * (0.5 * (1.0 / 5f64).ln()).cos();
        assert!((v - expect).abs() < 1e-14);
        let (amp, phase) = basis.members[1].amplitude_phase(&x).unwrap().unwrap();
        assert!((amp - 5f64.powf(-0.5)).abs() < 1e-15 && (phase - 0.5 * 5f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn regime_switch_points() {
        let (g, one) = classical(3);
        assert_eq!(associated_solutions(&g, &one, 1.0).unwrap().regime, Regime::Critical);
        assert_eq!(associated_solutions(&g, &one, 1.0 - 1e-9).unwrap().regime, Regime::Subcritical);
        assert_eq!(associated_solutions(&g, &one, 1.0 + 1e-9).unwrap().regime, Regime::Oscillatory);
    }
}
