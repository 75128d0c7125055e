//! Command-line batteries and the JSON report.

use std::f64::consts::{E, PI};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use clap::Parser;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::agmon::{self, AgmonMetric, RadialBump};
use crate::catalog::{self, HalfspaceConfig, MultipoleConfig, MultipoleVariant};
use crate::construct::{fd_laplacian, HardyWeight, MetricSpec, ScalarField};
use crate::error::{Error, Result};
use crate::numgrid::{linear_fit, LogGrid};
use crate::radial::{self, RadialOperator, RadialPair, RadialPotential};
use crate::spectral::{self, Bump, LevelFunction, ModeFunction, RadialSpectralMap, XiGrid};
use crate::varify;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Subcommand {
    Radial,
    Verify,
    Catalog,
    Multipolar,
    Spectrum,
    Rellich,
    Report,
}

impl Subcommand {
    pub fn as_str(self) -> &'static str {
        match self {
            Subcommand::Radial => "radial",
            Subcommand::Verify => "verify",
            Subcommand::Catalog => "catalog",
            Subcommand::Multipolar => "multipolar",
            Subcommand::Spectrum => "spectrum",
            Subcommand::Rellich => "rellich",
            Subcommand::Report => "report",
        }
    }
}

impl FromStr for Subcommand {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "radial" => Subcommand::Radial,
            "verify" => Subcommand::Verify,
            "catalog" => Subcommand::Catalog,
            "multipolar" => Subcommand::Multipolar,
            "spectrum" => Subcommand::Spectrum,
            "rellich" => Subcommand::Rellich,
            "report" => Subcommand::Report,
            other => return Err(Error::Config(format!("unknown subcommand '{other}'"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default = "d_rmin")]
    pub r_min: f64,
    #[serde(default = "d_rmax")]
    pub r_max: f64,
    #[serde(default = "d_points")]
    pub points: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { r_min: d_rmin(), r_max: d_rmax(), points: d_points() }
    }
}

impl GridSpec {
    pub fn build(&self) -> Result<Arc<LogGrid>> {
        Ok(Arc::new(LogGrid::new(self.r_min, self.r_max, self.points)?))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct XiSpec {
    #[serde(default = "d_xi_count")]
    pub count: usize,
    #[serde(default = "d_xi_lo")]
    pub lo: f64,
    #[serde(default = "d_xi_hi")]
    pub hi: f64,
}

impl Default for XiSpec {
    fn default() -> Self {
        XiSpec { count: d_xi_count(), lo: d_xi_lo(), hi: d_xi_hi() }
    }
}

fn d_rmin() -> f64 {
    1e-6
}
fn d_rmax() -> f64 {
    1e6
}
fn d_points() -> usize {
    8001
}
fn d_xi_count() -> usize {
    512
}
fn d_xi_lo() -> f64 {
    -8.0
}
fn d_xi_hi() -> f64 {
    8.0
}
fn d_zero() -> String {
    "zero".into()
}
fn d_classical() -> String {
    "classical".into()
}
fn d_three() -> usize {
    3
}
fn d_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadialParams {
    pub subcommand: Subcommand,
    pub n: usize,
    #[serde(default = "d_zero")]
    pub potential: String,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default = "d_true")]
    pub csv: bool,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyParams {
    pub subcommand: Subcommand,
    #[serde(default = "d_three")]
    pub n: usize,
    /// `classical`, `yukawa` or `engine` (radial engine on `potential`).
    #[serde(default = "d_classical")]
    pub pair: String,
    #[serde(default = "d_zero")]
    pub potential: String,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default = "d_annulus")]
    pub annulus: [f64; 2],
    #[serde(default = "d_elements")]
    pub elements: usize,
    #[serde(default = "d_sweep")]
    pub sweep_radii: Vec<f64>,
    #[serde(default = "d_window")]
    pub sweep_window: f64,
    #[serde(default = "d_sweep_elements")]
    pub sweep_elements: usize,
    #[serde(default = "d_lambda")]
    pub lambda: f64,
    #[serde(default)]
    pub oscillation_window: Option<[f64; 2]>,
    #[serde(default = "d_cutoffs")]
    pub cutoffs: Vec<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
}

fn d_annulus() -> [f64; 2] {
    [1e-4, 1e4]
}
fn d_elements() -> usize {
    4000
}
fn d_sweep() -> Vec<f64> {
    vec![1.0, 10.0, 100.0]
}
fn d_window() -> f64 {
    1e3
}
fn d_sweep_elements() -> usize {
    1000
}
fn d_lambda() -> f64 {
    2.0
}
fn d_cutoffs() -> Vec<f64> {
    vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogBattery {
    pub subcommand: Subcommand,
    #[serde(default = "d_three")]
    pub n: usize,
    #[serde(default = "d_catalog_names")]
    pub names: Vec<String>,
    #[serde(default = "d_mus")]
    pub halfspace_mu: Vec<f64>,
    #[serde(default = "d_points_1000")]
    pub points: usize,
    #[serde(default)]
    pub seed: Option<u64>,
}

fn d_catalog_names() -> Vec<String> {
    catalog::CATALOG_NAMES.iter().map(|s| s.to_string()).collect()
}
fn d_mus() -> Vec<f64> {
    vec![0.0, 0.125, 0.25]
}
fn d_points_1000() -> usize {
    1000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultipolarParams {
    pub subcommand: Subcommand,
    #[serde(default = "d_three")]
    pub n: usize,
    #[serde(default = "d_poles")]
    pub poles: Vec<Vec<f64>>,
    #[serde(default = "d_variants")]
    pub variants: Vec<String>,
    #[serde(default)]
    pub alpha: Option<Vec<f64>>,
    #[serde(default = "d_points_1000")]
    pub points: usize,
    #[serde(default)]
    pub seed: Option<u64>,
}

fn d_poles() -> Vec<Vec<f64>> {
    vec![vec![1.0, 0.0, 0.0], vec![-1.0, 0.0, 0.0]]
}
fn d_variants() -> Vec<String> {
    vec!["uniform".into(), "bde".into(), "cz".into()]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumParams {
    pub subcommand: Subcommand,
    #[serde(default = "d_three")]
    pub n: usize,
    #[serde(default = "d_classical")]
    pub pair: String,
    #[serde(default = "d_zero")]
    pub potential: String,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub xi: XiSpec,
    #[serde(default = "d_bumps")]
    pub bumps: usize,
    #[serde(default)]
    pub seed: Option<u64>,
}

fn d_bumps() -> usize {
    8
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RellichParams {
    pub subcommand: Subcommand,
    #[serde(default = "d_five")]
    pub n: usize,
    #[serde(default = "d_mu")]
    pub mu: f64,
    #[serde(default = "d_one")]
    pub lambda: f64,
    #[serde(default = "d_half")]
    pub alpha: f64,
    #[serde(default = "d_tests")]
    pub tests: usize,
    #[serde(default = "d_three")]
    pub agmon_n: usize,
    #[serde(default)]
    pub seed: Option<u64>,
}

fn d_five() -> usize {
    5
}
fn d_mu() -> f64 {
    2.0 / 3.0
}
fn d_one() -> f64 {
    1.0
}
fn d_half() -> f64 {
    0.5
}
fn d_tests() -> usize {
    100
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportParams {
    pub subcommand: Subcommand,
    pub dir: PathBuf,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Params {
    Radial(RadialParams),
    Verify(VerifyParams),
    Catalog(CatalogBattery),
    Multipolar(MultipolarParams),
    Spectrum(SpectrumParams),
    Rellich(RellichParams),
    Report(ReportParams),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub subcommand: Subcommand,
    pub params: Params,
}

impl RunConfig {
    pub fn seed(&self) -> u64 {
        let s = match &self.params {
            Params::Radial(p) => p.seed,
            Params::Verify(p) => p.seed,
            Params::Catalog(p) => p.seed,
            Params::Multipolar(p) => p.seed,
            Params::Spectrum(p) => p.seed,
            Params::Rellich(p) => p.seed,
            Params::Report(p) => p.seed,
        };
        s.unwrap_or(DEFAULT_SEED)
    }

    pub fn set_seed(&mut self, seed: u64) {
        let slot = match &mut self.params {
            Params::Radial(p) => &mut p.seed,
            Params::Verify(p) => &mut p.seed,
            Params::Catalog(p) => &mut p.seed,
            Params::Multipolar(p) => &mut p.seed,
            Params::Spectrum(p) => &mut p.seed,
            Params::Rellich(p) => &mut p.seed,
            Params::Report(p) => &mut p.seed,
        };
        *slot = Some(seed);
    }

    /// Config with defaults applied, as echoed in the report.
    pub fn echo(&self) -> Value {
        let mut v = serde_json::to_value(&self.params).unwrap_or(Value::Null);
        if let Value::Object(m) = &mut v {
            m.insert("seed".into(), json!(self.seed()));
        }
        v
    }
}

fn config_err(e: impl std::fmt::Display) -> Error {
    Error::Config(e.to_string().trim_end().to_string())
}

/// Parses a config document; `fallback` supplies the subcommand when the document has none.
pub fn parse_config_with(text: &str, fallback: Option<Subcommand>) -> Result<RunConfig> {
    let mut table: toml::Table = text.parse().map_err(config_err)?;
    let sub = match table.get("subcommand") {
        Some(toml::Value::String(s)) => {
            let sub = Subcommand::from_str(s)?;
            if let Some(f) = fallback {
                if f != sub {
                    return Err(Error::Config(format!(
                        "config is for subcommand '{}' but '{}' was requested",
                        sub.as_str(),
                        f.as_str()
                    )));
                }
            }
            sub
        }
        Some(_) => return Err(Error::Config("key 'subcommand' must be a string".into())),
        None => {
            let f = fallback.ok_or_else(|| Error::Config("missing key 'subcommand'".into()))?;
            table.insert("subcommand".into(), toml::Value::String(f.as_str().into()));
            f
        }
    };
    let value = toml::Value::Table(table);
    let params = match sub {
        Subcommand::Radial => Params::Radial(value.try_into().map_err(config_err)?),
        Subcommand::Verify => Params::Verify(value.try_into().map_err(config_err)?),
        Subcommand::Catalog => Params::Catalog(value.try_into().map_err(config_err)?),
        Subcommand::Multipolar => Params::Multipolar(value.try_into().map_err(config_err)?),
        Subcommand::Spectrum => Params::Spectrum(value.try_into().map_err(config_err)?),
        Subcommand::Rellich => Params::Rellich(value.try_into().map_err(config_err)?),
        Subcommand::Report => Params::Report(value.try_into().map_err(config_err)?),
    };
    let cfg = RunConfig { subcommand: sub, params };
    validate(&cfg)?;
    Ok(cfg)
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    parse_config_with(text, None)
}

fn validate(cfg: &RunConfig) -> Result<()> {
    let dim = match &cfg.params {
        Params::Radial(p) => Some(p.n),
        Params::Verify(p) => Some(p.n),
        Params::Catalog(p) => Some(p.n),
        Params::Multipolar(p) => Some(p.n),
        Params::Spectrum(p) => Some(p.n),
        Params::Rellich(p) => Some(p.n),
        Params::Report(_) => None,
    };
    if let Some(n) = dim {
        if n < 2 {
            return Err(Error::Config("dimension must be ≥ 2".into()));
        }
    }
    match &cfg.params {
        Params::Radial(p) => {
            parse_potential(&p.potential)?;
        }
        Params::Verify(p) => {
            parse_pair_kind(&p.pair)?;
            parse_potential(&p.potential)?;
        }
        Params::Spectrum(p) => {
            parse_pair_kind(&p.pair)?;
            parse_potential(&p.potential)?;
        }
        Params::Multipolar(p) => {
            for v in &p.variants {
                MultipoleVariant::parse(v).map_err(config_err)?;
            }
        }
        _ => {}
    }
    Ok(())
}

/// `zero`, `constant:c`, `power:c,b` (meaning `c r^b`) or `csv:path` with columns `r,value`.
pub fn parse_potential(spec: &str) -> Result<RadialPotential> {
    let num =
        |s: &str| s.trim().parse::<f64>().map_err(|_| Error::Config(format!("bad number '{s}' in potential '{spec}'")));
    match spec.split_once(':') {
        None if spec == "zero" => Ok(RadialPotential::Zero),
        Some(("constant", c)) => Ok(RadialPotential::Constant(num(c)?)),
        Some(("power", rest)) => {
            let (c, b) =
                rest.split_once(',').ok_or_else(|| Error::Config(format!("power potential needs 'c,b': '{spec}'")))?;
            Ok(RadialPotential::Power { c: num(c)?, b: num(b)? })
        }
        Some(("csv", path)) => {
            let (r, v) = read_two_columns(Path::new(path))?;
            RadialPotential::sampled(&r, &v)
        }
        _ => Err(Error::Config(format!("unknown potential spec '{spec}'"))),
    }
}

fn read_two_columns(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let text = fs::read_to_string(path)?;
    let mut r = Vec::new();
    let mut v = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || (i == 0 && line.starts_with('r')) {
            continue;
        }
        let (a, b) = line
            .split_once(',')
            .ok_or_else(|| Error::Config(format!("{}:{}: expected 'r,value'", path.display(), i + 1)))?;
        let parse = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("{}:{}: bad number '{s}'", path.display(), i + 1)))
        };
        r.push(parse(a)?);
        v.push(parse(b)?);
    }
    Ok((r, v))
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum PairKind {
    Classical,
    Yukawa,
    Engine,
}

fn parse_pair_kind(s: &str) -> Result<PairKind> {
    match s {
        "classical" => Ok(PairKind::Classical),
        "yukawa" => Ok(PairKind::Yukawa),
        "engine" => Ok(PairKind::Engine),
        other => Err(Error::Config(format!("unknown pair '{other}' (classical, yukawa, engine)"))),
    }
}

fn build_pair(kind: PairKind, n: usize, potential: &str, grid: &GridSpec) -> Result<RadialPair> {
    match kind {
        PairKind::Classical => RadialPair::classical(n),
        PairKind::Yukawa => {
            if n != 3 {
                return Err(Error::InvalidInput("the Yukawa pair is three-dimensional".into()));
            }
            Ok(RadialPair::Yukawa)
        }
        PairKind::Engine => {
            let op = RadialOperator::new(n, parse_potential(potential)?, grid.build()?)?;
            let psi = radial::solve_radial_solution(&op)?;
            let green = radial::green_from_psi(&op, &psi)?.subcritical()?;
            Ok(RadialPair::from_green(&op, &psi, &green))
        }
    }
}

/// One per-check record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub anchor: String,
    pub value: Value,
    pub expected: Value,
    pub tol: Option<f64>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub version: String,
    pub config: Value,
    pub checks: Vec<Check>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timestamp: Option<u64>,
}

impl VerdictReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Collects checks; numerical failures become failed checks.
struct Battery {
    checks: Vec<Check>,
    seed: u64,
}

impl Battery {
    fn new(seed: u64) -> Self {
        Battery { checks: Vec::new(), seed }
    }

    fn push(&mut self, name: &str, anchor: &str, value: Value, expected: Value, tol: Option<f64>, pass: bool) {
        self.checks.push(Check {
            name: name.into(),
            anchor: anchor.into(),
            value,
            expected,
            tol,
            pass,
            seed: None,
            note: None,
        });
    }

    fn seeded(&mut self) {
        if let Some(c) = self.checks.last_mut() {
            c.seed = Some(self.seed);
        }
    }

    fn fail(&mut self, name: &str, anchor: &str, err: &Error) {
        self.checks.push(Check {
            name: name.into(),
            anchor: anchor.into(),
            value: Value::Null,
            expected: Value::Null,
            tol: None,
            pass: false,
            seed: None,
            note: Some(err.to_string()),
        });
    }

    /// `|value - expected| ≤ tol`.
    fn close(&mut self, name: &str, anchor: &str, value: Result<f64>, expected: f64, tol: f64) {
        match value {
            Ok(v) => {
                let pass = (v - expected).abs() <= tol;
                self.push(name, anchor, num(v), num(expected), Some(tol), pass)
            }
            Err(e) => self.fail(name, anchor, &e),
        }
    }

    /// `value ≤ bound`.
    fn below(&mut self, name: &str, anchor: &str, value: Result<f64>, bound: f64) {
        match value {
            Ok(v) => self.push(name, anchor, num(v), json!(format!("<= {bound:e}")), Some(bound), v <= bound),
            Err(e) => self.fail(name, anchor, &e),
        }
    }

    fn flag(&mut self, name: &str, anchor: &str, value: Result<(Value, bool)>, expected: Value) {
        match value {
            Ok((v, pass)) => self.push(name, anchor, v, expected, None, pass),
            Err(e) => self.fail(name, anchor, &e),
        }
    }
}

fn num(v: f64) -> Value {
    serde_json::Number::from_f64(v).map(Value::Number).unwrap_or_else(|| json!(v.to_string()))
}

/// Options from the command line.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out: Option<PathBuf>,
    pub timestamp: bool,
}

/// Output of a battery: the report and CSV tables by file name.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: VerdictReport,
    pub tables: Vec<(String, String)>,
    pub warnings: Vec<String>,
}

pub fn run(cfg: &RunConfig, opts: &RunOptions) -> Result<RunOutput> {
    let mut battery = Battery::new(cfg.seed());
    let mut tables = Vec::new();
    let mut warnings = Vec::new();
    match &cfg.params {
        Params::Radial(p) => radial_battery(p, &mut battery, &mut tables),
        Params::Verify(p) => verify_battery(p, &mut battery),
        Params::Catalog(p) => catalog_battery(p, &mut battery),
        Params::Multipolar(p) => multipolar_battery(p, &mut battery),
        Params::Spectrum(p) => spectrum_battery(p, &mut battery),
        Params::Rellich(p) => rellich_battery(p, &mut battery),
        Params::Report(p) => report_battery(p, &mut battery, &mut warnings)?,
    }
    let pass = battery.checks.iter().all(|c| c.pass);
    let timestamp = if opts.timestamp {
        std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).ok().map(|d| d.as_secs())
    } else {
        None
    };
    let report = VerdictReport { version: VERSION.into(), config: cfg.echo(), checks: battery.checks, pass, timestamp };
    Ok(RunOutput { report, tables, warnings })
}

fn radial_battery(p: &RadialParams, b: &mut Battery, tables: &mut Vec<(String, String)>) {
    let setup = || -> Result<_> {
        let potential = parse_potential(&p.potential)?;
        let op = RadialOperator::new(p.n, potential, p.grid.build()?)?;
        let psi = radial::solve_radial_solution(&op)?;
        Ok((op, psi))
    };
    let (op, psi) = match setup() {
        Ok(v) => v,
        Err(e) => return b.fail("radial_solution", "radial.regular_solution", &e),
    };
    b.below("radial_solution_residual", "radial.regular_solution", Ok(radial::solution_residual(&op, &psi)), 1e-6);
    let outcome = match radial::green_from_psi(&op, &psi) {
        Ok(o) => o,
        Err(e) => return b.fail("green_function", "radial.murata_quadrature", &e),
    };
    let green = match outcome {
        radial::GreenOutcome::Subcritical(g) => {
            b.push(
                "murata_subcritical",
                "radial.murata_quadrature",
                json!({"integral": num(g.murata.integral), "growth_slope": num(g.murata.growth_slope)}),
                json!(true),
                None,
                true,
            );
            g
        }
        radial::GreenOutcome::Critical(m) => {
            b.push(
                "murata_subcritical",
                "radial.murata_quadrature",
                json!({"growth_slope": num(m.growth_slope)}),
                json!(true),
                None,
                false,
            );
            return;
        }
    };
    let weight = match radial::optimal_weight_radial(&psi, &green) {
        Ok(w) => w,
        Err(e) => return b.fail("optimal_weight", "radial.optimal_weight", &e),
    };
    b.below("weight_consistency", "radial.optimal_weight", Ok(weight.consistency), 1e-6);
    let r2w = weight.r2w();
    b.close("near_pole_limit", "radial.near_pole_limit", Ok(r2w[0]), weight.near_pole_target(), 1e-6);
    if matches!(op.potential, RadialPotential::Zero) {
        let target = weight.near_pole_target();
        let worst = r2w.iter().map(|v| (v - target).abs()).fold(0.0, f64::max);
        b.below("classical_profile_deviation", "radial.inverse_square_profile", Ok(worst), 1e-10);
    }
    match radial::criticality_integrals(p.n, &psi, &green.g0) {
        Ok(v) => b.push(
            "weight_is_critical",
            "radial.criticality_integrals",
            json!({"slope_zero": num(v.slope_zero), "slope_infinity": num(v.slope_infinity)}),
            json!("both divergent"),
            Some(radial::DIVERGENCE_SLOPE),
            v.critical(),
        ),
        Err(e) => b.fail("weight_is_critical", "radial.criticality_integrals", &e),
    }
    if p.csv {
        let grid = psi.grid();
        let mut csv = String::from("r,psi,g0,W\n");
        for k in 0..grid.len() {
            let _ = writeln!(
                csv,
                "{:.16e},{:.16e},{:.16e},{:.16e}",
                grid.node(k),
                psi.log_values()[k].exp(),
                green.g0.log_values()[k].exp(),
                weight.values[k]
            );
        }
        tables.push(("radial_samples.csv".into(), csv));
    }
}

fn verify_battery(p: &VerifyParams, b: &mut Battery) {
    let kind = match parse_pair_kind(&p.pair) {
        Ok(k) => k,
        Err(e) => return b.fail("pair", "verify.pair", &e),
    };
    let pair = match build_pair(kind, p.n, &p.potential, &p.grid) {
        Ok(pair) => pair,
        Err(e) => return b.fail("pair", "verify.pair", &e),
    };
    let n = pair.dim();
    let pot = |r: f64| pair.potential(r);
    let w = |r: f64| pair.weight(r).unwrap_or(f64::NAN);

    let [r_lo, r_hi] = p.annulus;
    let lam0 = (|| -> Result<(f64, f64)> {
        let prob = varify::AnnulusProblem::assemble(n, &pot, &w, r_lo, r_hi, p.elements)?;
        let est = varify::principal_eigenvalue(&prob)?;
        let length = pair.tau(r_lo)? - pair.tau(r_hi)?;
        Ok((est.lambda0, varify::optimal_annulus_prediction(length)))
    })();
    match lam0 {
        Ok((v, pred)) => {
            let tol = 0.01 * pred;
            b.push(
                "lambda0_annulus",
                "varify.annulus_eigenvalue",
                num(v),
                num(pred),
                Some(tol),
                (v - pred).abs() <= tol,
            )
        }
        Err(e) => b.fail("lambda0_annulus", "varify.annulus_eigenvalue", &e),
    }

    match varify::lambda_infinity_sweep(n, &pot, &w, &p.sweep_radii, p.sweep_window, p.sweep_elements) {
        Ok(s) => b.push(
            "lambda_infinity_plateau",
            "varify.exterior_sweep",
            json!({"lambda0": s.lambda0.iter().map(|v| num(*v)).collect::<Vec<_>>(), "drift": num(s.drift)}),
            json!("drift <= 5e-3"),
            Some(5e-3),
            s.drift <= 5e-3,
        ),
        Err(e) => b.fail("lambda_infinity_plateau", "varify.exterior_sweep", &e),
    }

    let window = p.oscillation_window.unwrap_or(match kind {
        PairKind::Classical => [1.0, (20.0 * PI).exp()],
        _ => [1.0, 100.0],
    });
    let window = match kind {
        PairKind::Engine => {
            let (lo, hi) = pair.range();
            [window[0].max(lo), window[1].min(hi)]
        }
        _ => window,
    };
    let above = radial::oscillation_count(n, &pot, &w, p.lambda, window[0], window[1]);
    match (kind, above) {
        (PairKind::Classical, Ok(rep)) => {
            let ls = (window[1] / window[0]).ln();
            let expected = (ls * (p.lambda - 1.0).max(0.0).sqrt() / (2.0 * PI)).floor();
            let v = rep.sign_changes as f64;
            b.push(
                "oscillation_above_one",
                "varify.oscillation",
                num(v),
                num(expected),
                Some(1.0),
                (v - expected).abs() <= 1.0,
            )
        }
        (_, Ok(rep)) => b.push(
            "oscillation_above_one",
            "varify.oscillation",
            json!(rep.sign_changes),
            json!(">= 1"),
            None,
            rep.sign_changes >= 1 || p.lambda <= 1.0,
        ),
        (_, Err(e)) => b.fail("oscillation_above_one", "varify.oscillation", &e),
    }
    match radial::oscillation_count(n, &pot, &w, 1.0, window[0], window[1]) {
        Ok(rep) => b.push(
            "oscillation_at_one",
            "varify.oscillation",
            json!(rep.sign_changes),
            json!(0),
            Some(0.0),
            rep.sign_changes == 0,
        ),
        Err(e) => b.fail("oscillation_at_one", "varify.oscillation", &e),
    }

    let levels: Vec<f64> = (1..=10).map(|k| (-(k as f64)).exp()).collect();
    b.close(
        "null_criticality_slope",
        "varify.null_criticality",
        varify::null_criticality_probe(&pair, &levels),
        0.25,
        1e-3,
    );

    let center = match kind {
        PairKind::Engine => {
            let (lo, hi) = pair.range();
            pair.tau((lo * hi).sqrt()).unwrap_or(0.0)
        }
        _ => 0.0,
    };
    match varify::null_sequence_probe(&pair, center, &p.cutoffs) {
        Ok(ns) => {
            b.push(
                "null_sequence_fit",
                "varify.null_sequence",
                num(ns.fit_r2),
                json!(">= 0.999"),
                Some(0.999),
                ns.fit_r2 >= 0.999,
            );
            b.close("null_sequence_mass_slope", "varify.null_sequence", Ok(ns.mass_slope), 0.5, 1e-3);
        }
        Err(e) => b.fail("null_sequence_fit", "varify.null_sequence", &e),
    }

    match varify::average_domination_check(&pair, &w, 5.0, 50.0) {
        Ok(a) => b.push(
            "average_domination",
            "varify.average_domination",
            json!({"lhs": num(a.lhs), "rhs": num(a.rhs), "rhs_level_scale": num(a.rhs_level_scale)}),
            json!("lhs <= rhs"),
            None,
            a.holds,
        ),
        Err(e) => b.fail("average_domination", "varify.average_domination", &e),
    }

    for (a, c) in [(1.0, E), (E, E.powi(3))] {
        let name = format!("coarea_{:.3}_{:.3}", a, c);
        match spectral::coarea_identity(&pair, a, c) {
            Ok((lhs, rhs)) => b.close(&name, "spectral.coarea", Ok(lhs), rhs, 1e-6),
            Err(e) => b.fail(&name, "spectral.coarea", &e),
        }
    }
}

fn catalog_battery(p: &CatalogBattery, b: &mut Battery) {
    let rows = match catalog::constants_table() {
        Ok(r) => r,
        Err(e) => return b.fail("constants_table", "catalog.constants", &e),
    };
    for name in &p.names {
        let n = match name.as_str() {
            "leray_disk" => 2,
            "one_dim_halfline" | "one_dim_massive" => 1,
            _ => p.n,
        };
        let check = format!("catalog_{name}");
        let res = catalog::classical(name, &catalog::CatalogParams { n, ..Default::default() }).and_then(|e| {
            let mut x = vec![0.0; n];
            x[n - 1] = 0.5;
            let w = e.weight.value(&x)?;
            Ok((e.constant, w))
        });
        match res {
            Ok((c, w)) => {
                let row = rows.iter().find(|r| r.name == *name && r.n == n);
                let expected = row.map(|r| r.constant);
                let pass = w > 0.0 && expected.is_none_or(|e| (e - c).abs() <= 1e-12);
                b.push(
                    &check,
                    &format!("catalog.{name}"),
                    num(c),
                    expected.map_or(Value::Null, num),
                    Some(1e-12),
                    pass,
                );
            }
            Err(e) => b.fail(&check, &format!("catalog.{name}"), &e),
        }
    }
    for row in &rows {
        let name = format!("constants_{}_{}", row.name, row.n);
        b.close(&name, &row.anchor, catalog::recompute_constant(row), row.constant, 1e-8);
    }
    let n = p.n.max(2);
    b.close(
        "cap_hemisphere_eigenvalue",
        "catalog.cone_cap",
        catalog::cap_eigenvalue(n, PI / 2.0),
        (n - 1) as f64,
        1e-7,
    );

    for &mu in &p.halfspace_mu {
        let name = format!("halfspace_ground_state_mu_{mu}");
        let res = (|| -> Result<f64> {
            let (w, psi) = catalog::halfspace_weight(&HalfspaceConfig { n, mu })?;
            let mut rng = ChaCha8Rng::seed_from_u64(b.seed);
            let mut worst: f64 = 0.0;
            for _ in 0..p.points {
                let mut x: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-2.0..2.0)).collect();
                x.push(rng.gen_range(0.1..2.0));
                let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                let h = 1e-2 * x[n - 1].min(r);
                let lap = fd_laplacian(&|y| psi.eval(y), &x, h)?;
                let wv = w.value(&x)? * psi.eval(&x)?;
                worst = worst.max((lap + wv).abs() / (lap.abs() + wv.abs()));
            }
            Ok(worst)
        })();
        b.below(&name, "catalog.halfspace_ground_state", res, 1e-6);
        b.seeded();
    }
    let value = catalog::halfspace_weight(&HalfspaceConfig { n, mu: 0.25 }).and_then(|(w, _)| {
        let mut e = vec![0.0; n];
        e[n - 1] = 1.0;
        w.value(&e)
    });
    let expected = 0.25 + (1.0 - n as f64).powi(2) / 4.0;
    b.close("halfspace_mu_quarter_at_unit_normal", "catalog.halfspace_ground_state", value, expected, 1e-12);

    let c3 = catalog::caccioppoli_constant(3.0);
    b.push("caccioppoli_p3", "catalog.caccioppoli", num(c3), num(8.0 / 27.0), Some(0.0), c3 == 8.0 / 27.0);
    let g = catalog::p_green_constant(p.n.max(3), 2.0);
    let classical = catalog::hardy_constant(p.n.max(3));
    b.push("p_green_weight_p2", "catalog.p_green", num(g), num(classical), Some(0.0), g == classical);
}

fn multipolar_battery(p: &MultipolarParams, b: &mut Battery) {
    let mut rng = ChaCha8Rng::seed_from_u64(b.seed);
    let scale = p.poles.iter().flat_map(|q| q.iter()).fold(1.0f64, |a, v| a.max(v.abs()));
    let points: Vec<Vec<f64>> =
        (0..p.points).map(|_| (0..p.n).map(|_| rng.gen_range(-3.0 * scale..3.0 * scale)).collect()).collect();
    let mut constants = Vec::new();
    for v in &p.variants {
        let variant = match MultipoleVariant::parse(v) {
            Ok(x) => x,
            Err(e) => {
                b.fail(&format!("multipolar_{v}"), "multipolar.closed_form", &e);
                continue;
            }
        };
        let mut cfg = MultipoleConfig::new(p.n, p.poles.clone(), variant);
        cfg.alpha = p.alpha.clone();
        let res = (|| -> Result<(f64, f64, f64, f64)> {
            let (w, k) = catalog::multipolar_weight(&cfg)?;
            let brute = catalog::multipolar_brute_force(&cfg)?;
            let mut worst: f64 = 0.0;
            for x in &points {
                let (a, c) = (w.value(x)?, brute.value(x)?);
                worst = worst.max((a - c).abs() / c.abs().max(1e-300));
            }
            let dir: Vec<f64> = (0..p.n).map(|i| 0.3 + 0.1 * i as f64).collect();
            let mut near: f64 = 0.0;
            for pole in &p.poles {
                let lim = catalog::near_pole_limit(&w, pole, &dir, 1e-2)?;
                near = near.max((lim - k.near_pole).abs());
            }
            Ok((worst, k.near_pole, near, k.at_infinity))
        })();
        match res {
            Ok((worst, c, near_err, _)) => {
                b.below(&format!("multipolar_{v}_closed_vs_sum"), "multipolar.pairwise_sum", Ok(worst), 1e-10);
                b.seeded();
                b.push(
                    &format!("multipolar_{v}_near_pole"),
                    "multipolar.near_pole_constant",
                    num(c),
                    json!({"extrapolation_error": num(near_err)}),
                    Some(1e-3),
                    near_err <= 1e-3,
                );
                constants.push((variant, c));
            }
            Err(e) => b.fail(&format!("multipolar_{v}"), "multipolar.closed_form", &e),
        }
    }
    let get = |v: MultipoleVariant| constants.iter().find(|(x, _)| *x == v).map(|(_, c)| *c);
    if let (Some(c), Some(c1), Some(c2)) =
        (get(MultipoleVariant::Uniform), get(MultipoleVariant::Bde), get(MultipoleVariant::Cz))
    {
        let ch = catalog::hardy_constant(p.n);
        let pass = c1 <= c && c < c2 && c2 <= ch;
        b.push(
            "multipolar_constant_ordering",
            "multipolar.constant_ordering",
            json!({"C": num(c), "C1": num(c1), "C2": num(c2), "C_H": num(ch)}),
            json!("C1 <= C < C2 <= C_H"),
            None,
            pass,
        );
    }
}

fn spectrum_battery(p: &SpectrumParams, b: &mut Battery) {
    let kind = match parse_pair_kind(&p.pair) {
        Ok(k) => k,
        Err(e) => return b.fail("pair", "spectral.pair", &e),
    };
    let pair = match build_pair(kind, p.n, &p.potential, &p.grid) {
        Ok(pair) => pair,
        Err(e) => return b.fail("pair", "spectral.pair", &e),
    };
    let map = RadialSpectralMap::new(pair.clone());
    let xi = match XiGrid::uniform(p.xi.lo, p.xi.hi, p.xi.count) {
        Ok(x) => x,
        Err(e) => return b.fail("xi_grid", "spectral.xi_grid", &e),
    };

    let mellin = (|| -> Result<f64> {
        let grid = Arc::new(LogGrid::new(1e-20, 60.0, 8001)?);
        let f = crate::numgrid::SampledFunction::from_fn(grid, |r| (-r).exp());
        Ok(spectral::mellin_transform(&f, &[0.0])?[0].re)
    })();
    b.close("mellin_exponential_at_zero", "spectral.mellin", mellin, 0.5f64.sqrt(), 1e-5);

    let bumps = Bump::family(b.seed, p.bumps);
    let mut worst = [0.0f64; 4];
    let mut err = None;
    for (i, bump) in bumps.iter().enumerate() {
        match spectral::bump_checks(&map, bump, &xi, b.seed.wrapping_add(i as u64))
            .and_then(|r| Ok((r, spectral::composed_unitarity(&map, bump, &xi)?)))
        {
            Ok((r, (a, m))) => {
                worst[0] = worst[0].max(r.plancherel_error);
                worst[1] = worst[1].max(r.inversion_error);
                worst[2] = worst[2].max(r.multiplier_error);
                worst[3] = worst[3].max((a - m).abs() / a);
            }
            Err(e) => {
                err = Some(e);
                break;
            }
        }
    }
    let names = ["plancherel", "inversion", "multiplier_1_plus_4xi2", "composed_unitarity"];
    for (k, name) in names.iter().enumerate() {
        match &err {
            None => b.below(name, "spectral.generalized_transform", Ok(worst[k]), 1e-4),
            Some(e) => b.fail(name, "spectral.generalized_transform", e),
        }
        b.seeded();
    }

    let probes = [0.2, 0.7, 1.0, 3.0, 9.0];
    let probes: Vec<f64> = match kind {
        PairKind::Engine => {
            let (lo, hi) = pair.range();
            let c = (lo * hi).sqrt();
            probes.iter().map(|r| r * c).collect()
        }
        _ => probes.to_vec(),
    };
    let quarter = |t: f64| t.powf(0.25);
    let quarter2 = |t: f64| 0.25 * (0.25 - 1.0) * t.powf(0.25 - 2.0);
    b.below(
        "conjugation_t_quarter",
        "spectral.conjugation",
        spectral::conjugation_check(&map, &LevelFunction { f: &quarter, d2: &quarter2 }, &probes),
        1e-8,
    );
    let lin = |t: f64| t;
    let zero = |_: f64| 0.0;
    b.below(
        "conjugation_t",
        "spectral.conjugation",
        spectral::conjugation_check(&map, &LevelFunction { f: &lin, d2: &zero }, &probes),
        1e-8,
    );
    let osc = |t: f64| t.sqrt() * (0.5 * t.ln()).cos();
    let osc2 = |t: f64| -0.5 * t.powf(-1.5) * (0.5 * t.ln()).cos();
    b.below(
        "conjugation_oscillatory",
        "spectral.conjugation",
        spectral::conjugation_check(&map, &LevelFunction { f: &osc, d2: &osc2 }, &probes),
        1e-6,
    );
    b.below(
        "d_operator_cubic",
        "spectral.conjugated_operator",
        spectral::d_operator_check(&map, &[1.0, -0.5, 0.25, 0.1], &probes),
        1e-6,
    );

    let h = |t: f64| (-(t.ln()).powi(2)).exp();
    let dh = |t: f64| -2.0 * t.ln() / t * h(t);
    let d2h = |t: f64| {
        let l = t.ln();
        h(t) * (4.0 * l * l - 2.0 + 2.0 * l) / (t * t)
    };
    b.below(
        "inversion_intertwining",
        "spectral.inversion",
        spectral::inversion_intertwining(&h, &dh, &d2h, &[0.3, 1.0, 2.5]),
        1e-8,
    );

    let modes = (|| -> Result<f64> {
        let mut worst: f64 = 0.0;
        for x in [0.0, 0.5, 2.0] {
            let mode = ModeFunction::new(x, pair.clone());
            for &r in &probes {
                worst = worst.max(mode.residual(r)?);
            }
        }
        Ok(worst)
    })();
    b.below("mode_eigen_relation", "spectral.mode_functions", modes, 1e-5);

    let torus = (|| -> Result<f64> {
        let mut worst: f64 = 0.0;
        for rho in [0.5, 1.0] {
            for k in -2..=2 {
                for l in -2..=2 {
                    let z = spectral::torus_orthonormality(&map, rho, k, l)?;
                    let want = if k == l { 1.0 } else { 0.0 };
                    worst = worst.max((z - num_complex::Complex64::new(want, 0.0)).norm());
                }
            }
        }
        Ok(worst)
    })();
    b.below("torus_orthonormality", "spectral.torus_modes", torus, 1e-6);

    for (a, c) in [(1.0, E), (E, E.powi(3))] {
        let name = format!("coarea_{:.3}_{:.3}", a, c);
        match spectral::coarea_identity(&pair, a, c) {
            Ok((lhs, rhs)) => b.close(&name, "spectral.coarea", Ok(lhs), rhs, 1e-6),
            Err(e) => b.fail(&name, "spectral.coarea", &e),
        }
    }
}

fn rellich_battery(p: &RellichParams, b: &mut Battery) {
    let constant = agmon::euclidean_rellich_constant(p.n, p.mu, p.lambda);
    if (p.mu - 2.0 / (p.n as f64 - 2.0)).abs() < 1e-15 && p.lambda == 1.0 {
        let classical = agmon::classical_rellich_constant(p.n);
        b.push(
            "rellich_constant",
            "agmon.rellich_constant",
            num(constant),
            num(classical),
            Some(0.0),
            constant == classical,
        );
    } else {
        b.push(
            "rellich_constant",
            "agmon.rellich_constant",
            num(constant),
            num(constant),
            Some(0.0),
            constant.is_finite(),
        );
    }
    let mono = (1..100).map(|k| agmon::rellich_prefactor(k as f64 / 100.0, 1.0)).collect::<Vec<_>>();
    let decreasing = mono.windows(2).all(|w| w[1] < w[0]);
    b.push("rellich_prefactor_monotone", "agmon.rellich_prefactor", json!(decreasing), json!(true), None, decreasing);

    match agmon::euclidean_rellich_config(p.n, p.mu, p.lambda, p.alpha)
        .and_then(|cfg| agmon::rellich_check(&cfg, &RadialBump::family(b.seed, p.tests)))
    {
        Ok(rep) => {
            b.push(
                "rellich_inequality",
                "agmon.rellich_inequality",
                num(rep.worst_ratio),
                json!("<= 1"),
                Some(1e-9),
                rep.holds,
            );
            b.seeded();
            b.push(
                "hardy_rellich_inequality",
                "agmon.hardy_rellich_inequality",
                num(rep.worst_ratio_convex),
                json!("<= 1"),
                Some(1e-9),
                rep.holds_convex,
            );
            b.seeded();
        }
        Err(e) => b.fail("rellich_inequality", "agmon.rellich_inequality", &e),
    }

    let an = p.agmon_n.max(3);
    let c = catalog::hardy_constant(an);
    let metric =
        AgmonMetric::new(HardyWeight::radial(an, "((n-2)/2)^2/|x|^2", move |r| c / (r * r)), MetricSpec::identity(an))
            .map(|m| {
                m.with_pair(
                    ScalarField::radial_power(an, vec![0.0; an], 2.0 - an as f64),
                    ScalarField::constant(an, 1.0),
                )
            });
    match metric {
        Ok(m) => {
            let seg = agmon::agmon_length(&m, &agmon::radial_segment(an, 1.0, 4f64.exp()));
            let expected = 0.5 * (an as f64 - 2.0) * 4.0;
            match seg {
                Ok(l) => {
                    b.close("agmon_radial_segment", "agmon.length", Ok(l.length), expected, 1e-8);
                    let lb = l.lower_bound.unwrap_or(f64::NAN);
                    b.push(
                        "agmon_lower_bound",
                        "agmon.length_lower_bound",
                        num(lb),
                        json!("<= length"),
                        Some(1e-10),
                        lb <= l.length + 1e-10,
                    );
                }
                Err(e) => b.fail("agmon_radial_segment", "agmon.length", &e),
            }
            let slope = (|| -> Result<f64> {
                let rs = [10.0, 100.0, 1000.0, 10000.0];
                let mut xs = Vec::new();
                let mut ys = Vec::new();
                for r in rs {
                    xs.push(f64::ln(r));
                    ys.push(agmon::agmon_length(&m, &agmon::radial_segment(an, 1.0, r))?.length);
                }
                Ok(linear_fit(&xs, &ys).slope)
            })();
            b.close("agmon_divergence_slope", "agmon.completeness", slope, 0.5 * (an as f64 - 2.0), 1e-6);
        }
        Err(e) => b.fail("agmon_radial_segment", "agmon.length", &e),
    }

    let g = ScalarField::radial_power(3, vec![0.0; 3], -1.0);
    let v = ScalarField::radial_power(3, vec![0.0; 3], -0.75);
    let one = ScalarField::constant(3, 1.0);
    let probes: Vec<Vec<f64>> = (0..=60).map(|k| vec![10f64.powf(k as f64 / 10.0), 0.0, 0.0]).collect();
    b.close("decay_bound_exact", "agmon.decay_bound", agmon::decay_bound(&v, &one, &g, 0.75, &probes), 1.0, 1e-12);
    let half = agmon::decay_bound(&v, &one, &g, 0.5, &probes).and_then(|all| {
        let far = agmon::decay_bound(&v, &one, &g, 0.5, &probes[30..])?;
        Ok((json!({"sup": num(all), "sup_far": num(far)}), far <= all && all.is_finite()))
    });
    b.flag("decay_bound_half", "agmon.decay_bound", half, json!("bounded, nonincreasing outward"));

    let u = |r: f64| {
        let s = r.ln();
        if s.abs() < 1.0 {
            (PI * s / 2.0).cos().powi(4)
        } else {
            0.0
        }
    };
    let vv = |r: f64| (0.3 * r.ln()).sin().exp();
    let ibp = agmon::ibp_identity_residual(3, &u, &vv, (0.2, 5.0), 401).and_then(|e1| {
        let e2 = agmon::ibp_identity_residual(3, &u, &vv, (0.2, 5.0), 801)?;
        Ok((json!({"coarse": num(e1), "fine": num(e2), "order": num((e1 / e2).log2())}), e2 < e1 / 3.0))
    });
    b.flag("product_rule_identity_convergence", "agmon.product_rule_identity", ibp, json!("second order"));
}

fn report_battery(p: &ReportParams, b: &mut Battery, warnings: &mut Vec<String>) -> Result<()> {
    let mut files: Vec<PathBuf> = fs::read_dir(&p.dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|path| path.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    if files.is_empty() {
        warnings.push(format!("no reports found in {}", p.dir.display()));
    }
    for path in files {
        let name = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let text = fs::read_to_string(&path)?;
        match serde_json::from_str::<VerdictReport>(&text) {
            Ok(r) => {
                let failed: Vec<String> = r.checks.iter().filter(|c| !c.pass).map(|c| c.name.clone()).collect();
                b.push(
                    &name,
                    "report.aggregate",
                    json!({"checks": r.checks.len(), "failed": failed}),
                    json!(true),
                    None,
                    r.pass,
                );
            }
            Err(e) => b.fail(&name, "report.aggregate", &Error::Config(format!("{}: {e}", path.display()))),
        }
    }
    Ok(())
}

#[derive(Debug, Parser)]
#[command(name = "hardy-forge", version, about = "Construct and certify optimal Hardy weights")]
struct Cli {
    /// One of radial, verify, catalog, multipolar, spectrum, rellich, report.
    subcommand: String,
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    no_timestamp: bool,
}

/// Runs the command line and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(pass) => {
            if pass {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("hardy-forge: {e}");
            2
        }
    }
}

fn execute(cli: &Cli) -> Result<bool> {
    let sub = Subcommand::from_str(&cli.subcommand)?;
    let text = fs::read_to_string(&cli.config)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", cli.config.display())))?;
    let mut cfg = parse_config_with(&text, Some(sub))?;
    if let Some(s) = cli.seed {
        cfg.set_seed(s);
    }
    let out = run(&cfg, &RunOptions { out: cli.out.clone(), timestamp: !cli.no_timestamp })?;
    for w in &out.warnings {
        eprintln!("warning: {w}");
    }
    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir)?;
    fs::write(dir.join("report.json"), out.report.to_json())?;
    for (name, body) in &out.tables {
        fs::write(dir.join(name), body)?;
    }
    for c in &out.report.checks {
        println!("{} {}", if c.pass { "PASS" } else { "FAIL" }, c.name);
    }
    println!("{}", if out.report.pass { "overall: PASS" } else { "overall: FAIL" });
    Ok(out.report.pass)
}
