//! Experiment configs, the pipeline dispatcher and the versioned run report.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context};
use hyperalg_core::dynamics::verify_witness;
use hyperalg_core::growth::default_step_grid;
use hyperalg_core::witness::{
    construct_witness_multi_with, construct_witness_t2_with, ExponentSet, MultiOptions, MultiTargets, T2Options, TargetSpec,
    WitnessReport,
};
use hyperalg_core::{
    check_t2, classify, derivs_at_zero, estimate_order_type, geometric_grid, ray_scan, summarize_zeros, Catalog, Confidence,
    Cplx, Derivatives, DiskGrid, Error, GrowthClass, GrowthEstimate, Outcome, RayScan, SecondDerivativeEvidence, SymbolSpec,
    Verdict, Verification, ZeroSetSummary,
};
use serde::{Deserialize, Serialize};

pub const SCHEMA: &str = "hyperalg-report/1";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub symbol: SymbolSpec,
    pub experiment: Experiment,
    /// recorded for reproducibility; every search in the pipelines is deterministic
    #[serde(default)]
    pub seed: u64,
    /// directory for the report and side files
    #[serde(default)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", content = "params", rename_all = "kebab-case")]
pub enum Experiment {
    Analyze(AnalyzeParams),
    Classify(ClassifyParams),
    Witness(WitnessConfig),
    WitnessMulti(MultiConfig),
    Verify(VerifyParams),
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Analyze(_) => "analyze",
            Experiment::Classify(_) => "classify",
            Experiment::Witness(_) => "witness",
            Experiment::WitnessMulti(_) => "witness-multi",
            Experiment::Verify(_) => "verify",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalyzeParams {
    /// radii for the order/type fit, geometric from `r_min` to `r_max`
    pub r_min: f64,
    pub r_max: f64,
    pub r_points: usize,
    /// number of equispaced rays scanned for `|phi|`
    pub rays: usize,
    pub ray_t_max: f64,
    /// progressions are searched up to this length
    pub m_max: usize,
}

impl Default for AnalyzeParams {
    fn default() -> Self {
        AnalyzeParams { r_min: 1.0, r_max: 16.0, r_points: 32, rays: 8, ray_t_max: 4.0, m_max: 4 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifyParams {
    /// zero list to summarize instead of the one carried by the symbol
    pub zeros: Option<Vec<Cplx>>,
    pub truncation: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct WitnessConfig {
    #[serde(default)]
    pub targets: TargetSpec,
    #[serde(default)]
    pub options: T2Options,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultiConfig {
    pub exponents: ExponentSet,
    #[serde(default)]
    pub targets: MultiTargets,
    #[serde(default)]
    pub options: MultiOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyParams {
    /// a run report from `witness`/`witness-multi`, or a bare witness report
    pub report: PathBuf,
    #[serde(default)]
    pub grid: Option<DiskGrid>,
    #[serde(default)]
    pub epsilon: Option<f64>,
}

/// Command-line values that replace config entries.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub grid_radius: Option<f64>,
    pub grid_samples: Option<usize>,
    pub epsilon: Option<f64>,
    pub n_max: Option<u64>,
    pub output: Option<PathBuf>,
}

fn patch_grid(g: &mut DiskGrid, o: &Overrides) {
    if let Some(r) = o.grid_radius {
        g.radius = r;
    }
    if let Some(s) = o.grid_samples {
        g.samples = s;
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> anyhow::Result<Self> {
        serde_json::from_str(text).context("schema error")
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_json(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(p) = &o.output {
            self.output = Some(p.clone());
        }
        match &mut self.experiment {
            Experiment::Witness(w) => {
                patch_grid(&mut w.options.grid, o);
                if let Some(e) = o.epsilon {
                    w.options.epsilon = e;
                }
                if let Some(n) = o.n_max {
                    w.options.n_max = n;
                }
            }
            Experiment::WitnessMulti(w) => {
                patch_grid(&mut w.options.grid, o);
                if let Some(e) = o.epsilon {
                    w.options.epsilon = e;
                }
                if let Some(n) = o.n_max {
                    w.options.n_max = n;
                }
            }
            Experiment::Verify(v) => {
                if o.grid_radius.is_some() || o.grid_samples.is_some() {
                    let mut g = v.grid.unwrap_or_default();
                    patch_grid(&mut g, o);
                    v.grid = Some(g);
                }
                if let Some(e) = o.epsilon {
                    v.epsilon = Some(e);
                }
            }
            Experiment::Analyze(_) | Experiment::Classify(_) => {}
        }
    }

    /// Checks everything that can be checked before running.
    pub fn validate(&self) -> anyhow::Result<()> {
        self.symbol.validate().context("schema error: symbol")?;
        match &self.experiment {
            Experiment::Analyze(p) => {
                if !(p.r_min > 0.0 && p.r_max > p.r_min) || p.r_points < 8 {
                    bail!("schema error: analyze needs 0 < r_min < r_max and r_points >= 8");
                }
                if p.rays == 0 || p.ray_t_max.is_nan() || p.ray_t_max <= 0.0 || p.m_max < 2 {
                    bail!("schema error: analyze needs rays >= 1, ray_t_max > 0 and m_max >= 2");
                }
            }
            Experiment::Classify(p) => {
                if p.truncation.is_some() && p.zeros.is_none() {
                    bail!("schema error: truncation given without zeros");
                }
            }
            Experiment::Witness(w) => w.options.validate().context("schema error: witness options")?,
            Experiment::WitnessMulti(w) => w.options.validate().context("schema error: witness-multi options")?,
            Experiment::Verify(v) => {
                if let Some(g) = &v.grid {
                    g.validate().context("schema error: verify grid")?;
                }
                if v.epsilon.is_some_and(|e| e.is_nan() || e <= 0.0) {
                    bail!("schema error: epsilon must be positive");
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Analysis {
    pub growth_class: GrowthClass,
    pub growth: Option<GrowthEstimate>,
    pub derivatives: Option<Derivatives>,
    pub second_derivative: Option<SecondDerivativeEvidence>,
    pub rays: Vec<RayScan>,
    pub zeros: Option<ZeroSetSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    /// the check or stage that tripped
    pub check: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<(u64, f64)>,
}

impl Failure {
    fn from_error(e: &Error) -> Self {
        let check = match e {
            Error::Hypothesis { check, .. } => check.clone(),
            Error::Range { .. } => "range".into(),
            Error::NonFinite(_) => "non_finite".into(),
            Error::Invalid(_) => "invalid_input".into(),
            Error::NonConvergence { .. } => "non_convergence".into(),
            Error::Normalization(_) => "normalization".into(),
            Error::SearchFailure(_) => "search".into(),
            Error::Placement(_) => "placement".into(),
            Error::PowerOverflow { .. } => "power_overflow".into(),
            Error::TaylorLength { .. } => "taylor_length".into(),
            Error::Exhausted { .. } => "budget_exhausted".into(),
            Error::Io(_) => "io".into(),
        };
        let trace = match e {
            Error::Exhausted { trace, .. } => trace.clone(),
            _ => Vec::new(),
        };
        Failure { check, message: e.to_string(), trace }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "snake_case")]
pub enum RunOutcome {
    Analysis(Box<Analysis>),
    Verdict(Verdict),
    Witness(Box<WitnessReport>),
    Verification(Verification),
    Failure(Failure),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: String,
    pub version: String,
    pub config: ExperimentConfig,
    pub wall_time_s: f64,
    pub outcome: RunOutcome,
    pub warnings: Vec<String>,
    /// side files written next to the report, relative to the output directory
    pub side_files: Vec<String>,
}

/// Exit status for a finished run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    PipelineFailed,
    VerificationFailed,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::PipelineFailed => 1,
            Status::VerificationFailed => 2,
        }
    }
}

impl RunReport {
    pub fn status(&self) -> Status {
        match &self.outcome {
            RunOutcome::Failure(_) => Status::PipelineFailed,
            RunOutcome::Verification(v) if !v.passed => Status::VerificationFailed,
            _ => Status::Ok,
        }
    }

    /// The outcome alone, serialized; equal across runs of the same config.
    pub fn outcome_json(&self) -> anyhow::Result<String> {
        Ok(serde_json::to_string_pretty(&self.outcome)?)
    }

    pub fn to_json(&self) -> anyhow::Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Writes `report.json` and the pending side files into `dir`.
    pub fn write(&mut self, dir: &Path) -> anyhow::Result<PathBuf> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let mut files = Vec::new();
        match &self.outcome {
            RunOutcome::Analysis(a) => {
                if let Some(g) = &a.growth {
                    g.write_csv(fs::File::create(dir.join("growth.csv"))?)?;
                    files.push("growth.csv".to_string());
                }
                for (k, r) in a.rays.iter().enumerate() {
                    let name = format!("ray_{k}.csv");
                    r.write_csv(fs::File::create(dir.join(&name))?)?;
                    files.push(name);
                }
            }
            RunOutcome::Witness(w) => {
                w.write_theta_csv(&dir.join("theta.csv"))?;
                w.write_trace_csv(&dir.join("trace.csv"))?;
                files.extend(["theta.csv".to_string(), "trace.csv".to_string()]);
            }
            RunOutcome::Verification(v) => {
                for (k, t) in v.traces.iter().enumerate() {
                    let name = format!("orbit_{k}.csv");
                    t.write_csv(&dir.join(&name))?;
                    files.push(name);
                }
            }
            RunOutcome::Verdict(_) | RunOutcome::Failure(_) => {}
        }
        self.side_files = files;
        let path = dir.join("report.json");
        fs::write(&path, self.to_json()?).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }
}

/// Named presets with the verdict each is expected to get.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Preset {
    pub name: String,
    pub symbol: SymbolSpec,
    pub expected: Outcome,
}

pub fn catalog_list() -> Vec<Preset> {
    let one = Cplx::new(1.0, 0.0);
    let p = |name: &str, symbol, expected| Preset { name: name.into(), symbol, expected };
    vec![
        p("cos", SymbolSpec::cos(), Outcome::HasAlgebra),
        p("sin+exp(-z)", SymbolSpec::sin_plus_exp_neg(), Outcome::HasAlgebra),
        p("sin(pi z)/(pi z)", SymbolSpec::sinc_pi(), Outcome::HasAlgebra),
        p("exp(a z)", SymbolSpec::Catalog(Catalog::Exp { a: one }), Outcome::NoAlgebra),
        p("exp(z)(1+iz)", SymbolSpec::exp_times_poly(one, vec![one, Cplx::new(0.0, 1.0)]), Outcome::HasAlgebra),
        p("exp(z^2)", SymbolSpec::exp_square(one), Outcome::HasAlgebra),
    ]
}

pub fn preset(name: &str) -> Option<SymbolSpec> {
    catalog_list().into_iter().find(|p| p.name == name).map(|p| p.symbol)
}

fn analyze(phi: &SymbolSpec, p: &AnalyzeParams, warnings: &mut Vec<String>) -> Analysis {
    let mut note = |stage: &str, e: Error| warnings.push(format!("{stage}: {e}"));
    let growth = estimate_order_type(phi, &geometric_grid(p.r_min, p.r_max, p.r_points)).map_err(|e| note("growth", e)).ok();
    let derivatives = derivs_at_zero(phi, 2).map_err(|e| note("derivatives", e)).ok();
    let second_derivative = check_t2(phi, p.m_max).map_err(|e| note("second_derivative", e)).ok();
    let t_grid = default_step_grid(p.ray_t_max);
    let rays = (0..p.rays)
        .filter_map(|k| {
            let theta = std::f64::consts::TAU * k as f64 / p.rays as f64;
            ray_scan(phi, theta, &t_grid).map_err(|e| note("ray_scan", e)).ok()
        })
        .collect();
    let zeros = match phi {
        SymbolSpec::HadamardTrunc { zeros, truncation, .. } => Some(summarize_zeros(zeros, *truncation)),
        _ => None,
    };
    Analysis { growth_class: phi.growth_class(), growth, derivatives, second_derivative, rays, zeros }
}

fn load_witness(path: &Path) -> anyhow::Result<WitnessReport> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if let Ok(run) = serde_json::from_str::<RunReport>(&text) {
        return match run.outcome {
            RunOutcome::Witness(w) => Ok(*w),
            _ => bail!("{} holds no witness", path.display()),
        };
    }
    serde_json::from_str(&text).with_context(|| format!("{} is neither a run report nor a witness report", path.display()))
}

/// Runs the configured pipeline. Schema and input errors are returned; pipeline
/// failures become a `Failure` outcome so they still leave a report behind.
pub fn run(config: &ExperimentConfig) -> anyhow::Result<RunReport> {
    config.validate()?;
    let start = Instant::now();
    let mut warnings = Vec::new();
    let phi = &config.symbol;
    let outcome = match &config.experiment {
        Experiment::Analyze(p) => RunOutcome::Analysis(Box::new(analyze(phi, p, &mut warnings))),
        Experiment::Classify(p) => {
            let summary = p.zeros.as_ref().map(|z| summarize_zeros(z, p.truncation.unwrap_or(z.len())));
            let v = classify(phi, summary.as_ref());
            if v.confidence == Confidence::Numerical {
                warnings.push("verdict rests on numerical evidence".into());
            }
            RunOutcome::Verdict(v)
        }
        Experiment::Witness(w) => match construct_witness_t2_with(phi, &w.targets, &w.options) {
            Ok(r) => RunOutcome::Witness(Box::new(r)),
            Err(e) => RunOutcome::Failure(Failure::from_error(&e)),
        },
        Experiment::WitnessMulti(w) => match construct_witness_multi_with(phi, &w.exponents, &w.targets, &w.options) {
            Ok(r) => RunOutcome::Witness(Box::new(r)),
            Err(e) => RunOutcome::Failure(Failure::from_error(&e)),
        },
        Experiment::Verify(v) => {
            let report = load_witness(&v.report)?;
            let grid = v.grid.unwrap_or(*report.params.grid());
            let epsilon = v.epsilon.unwrap_or(report.params.epsilon());
            match verify_witness(phi, &report, &grid, epsilon) {
                Ok(ver) => RunOutcome::Verification(ver),
                Err(e) => RunOutcome::Failure(Failure::from_error(&e)),
            }
        }
    };
    Ok(RunReport {
        schema: SCHEMA.into(),
        version: VERSION.into(),
        config: config.clone(),
        wall_time_s: start.elapsed().as_secs_f64(),
        outcome,
        warnings,
        side_files: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn classify_cos() -> &'static str {
        r#"{"symbol": {"kind": "catalog", "name": "cos", "scale": [1.0, 0.0]},
            "experiment": {"command": "classify", "params": {}}}"#
    }

    #[test]
    fn classify_cos_has_algebra() {
        let r = run(&ExperimentConfig::from_json(classify_cos()).unwrap()).unwrap();
        let RunOutcome::Verdict(v) = &r.outcome else { panic!("{:?}", r.outcome) };
        assert_eq!(v.outcome, Outcome::HasAlgebra);
        assert_eq!(r.schema, SCHEMA);
        assert_eq!(r.status(), Status::Ok);
    }

    #[test]
    fn unknown_fields_rejected() {
        let bad = classify_cos().replace(r#""params": {}"#, r#""params": {"zeroes": []}"#);
        assert!(ExperimentConfig::from_json(&bad).is_err());
        let bad = classify_cos().replace(r#""experiment""#, r#""colour": 1, "experiment""#);
        assert!(ExperimentConfig::from_json(&bad).is_err());
    }

    #[test]
    fn single_power_is_a_schema_error() {
        let text = r#"{"symbol": {"kind": "catalog", "name": "exp_square", "a": [1.0, 0.0]},
            "experiment": {"command": "witness", "params": {"options": {"m": 1}}}}"#;
        let err = run(&ExperimentConfig::from_json(text).unwrap()).unwrap_err();
        assert!(format!("{err:#}").contains("schema error"), "{err:#}");
    }

    #[test]
    fn config_echo_has_every_default() {
        let text = r#"{"symbol": {"kind": "catalog", "name": "exp_square", "a": [1.0, 0.0]},
            "experiment": {"command": "witness", "params": {}}}"#;
        let cfg = ExperimentConfig::from_json(text).unwrap();
        let echo = serde_json::to_value(&cfg).unwrap();
        let opts = &echo["experiment"]["params"]["options"];
        for key in ["m", "epsilon", "grid", "n_max", "theta_margin", "max_step", "window_lo", "replace_rounds"] {
            assert!(!opts[key].is_null(), "{key} missing from echo");
        }
        assert_eq!(echo["experiment"]["params"]["targets"]["mode"], "auto");
    }

    #[test]
    fn overrides_reach_the_options() {
        let text = r#"{"symbol": {"kind": "catalog", "name": "exp_square", "a": [1.0, 0.0]},
            "experiment": {"command": "witness-multi", "params": {"exponents": [[1, 0], [0, 1]]}}}"#;
        let mut cfg = ExperimentConfig::from_json(text).unwrap();
        cfg.apply(&Overrides { epsilon: Some(1e-3), n_max: Some(1024), grid_radius: Some(1.0), seed: Some(7), ..Default::default() });
        let Experiment::WitnessMulti(w) = &cfg.experiment else { panic!() };
        assert_eq!((w.options.epsilon, w.options.n_max, w.options.grid.radius, cfg.seed), (1e-3, 1024, 1.0, 7));
    }

    #[test]
    fn catalog_round_trips_exactly() {
        for p in catalog_list() {
            let text = serde_json::to_string(&p.symbol).unwrap();
            let back: SymbolSpec = serde_json::from_str(&text).unwrap();
            assert_eq!(back, p.symbol);
            assert_eq!(serde_json::to_string(&back).unwrap(), text);
        }
        let names: Vec<_> = catalog_list().into_iter().map(|p| (p.name, p.expected)).collect();
        assert!(names.contains(&("cos".into(), Outcome::HasAlgebra)));
        assert!(names.contains(&("exp(a z)".into(), Outcome::NoAlgebra)));
    }

    #[test]
    fn pipeline_failure_names_the_check() {
        let text = r#"{"symbol": {"kind": "catalog", "name": "exp", "a": [1.0, 0.0]},
            "experiment": {"command": "witness", "params": {}}}"#;
        let r = run(&ExperimentConfig::from_json(text).unwrap()).unwrap();
        let RunOutcome::Failure(f) = &r.outcome else { panic!("{:?}", r.outcome) };
        assert!(!f.check.is_empty() && !f.message.is_empty());
        assert_eq!(r.status(), Status::PipelineFailed);
    }
}
