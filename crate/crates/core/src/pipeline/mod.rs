//! End-to-end replication pipeline: descriptives, break unit-root tests,
//! cointegration, long-run estimation, ARDL and residual diagnostics, with
//! rendering to Markdown, CSV and SVG and comparison against expectations.

mod config;
mod render;
mod replicate;
mod tables;
pub mod wdi;

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::ardl::{ardl_longrun, ardl_select, bounds_test, ecm_reparameterize, BoundsDecision, EcmForm};
use crate::cointegration::{hatemi_j_test, johansen_test, select_var_lag_bic, HatemiJResult, HatemiJSpec, JohansenCase, JohansenResult};
use crate::diagnostics::{diagnose, DiagnosticsBundle};
use crate::error::{Error, Result};
use crate::longrun::{dols, dols_select_bic, fmols, Estimator, LongRunEstimate};
use crate::montecarlo::{simulate_critical_values, CriticalValueTest, SimulationSummary};
use crate::numerics::Kernel;
use crate::timeseries::{describe, BreakModel, Dataset, Descriptive, TimeSeries, Transform};
use crate::unit_root::{ls_test, za_test, AdfSpec, BreakTestReport, Deterministic, LsModel};

pub use config::*;
pub use render::{render, svg_stability_chart, OutputFormat};
pub use replicate::{parse_expectations, replicate, CheckOutcome, Expectation, ReplicationReport, ToleranceKind};
pub use tables::{load_table_csv, tables, Cell, Row, Table};

/// Name of the marker written next to a partial bundle.
pub const FAILURE_MARKER: &str = "FAILED";
const LOCK_FILE: &str = ".breakcoint.lock";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Load,
    Describe,
    UnitRoot,
    Cointegration,
    LongRun,
    Ardl,
    Diagnostics,
    Simulation,
}

impl Stage {
    pub fn name(&self) -> &'static str {
        match self {
            Stage::Load => "load",
            Stage::Describe => "describe",
            Stage::UnitRoot => "unit_root",
            Stage::Cointegration => "cointegration",
            Stage::LongRun => "long_run",
            Stage::Ardl => "ardl",
            Stage::Diagnostics => "diagnostics",
            Stage::Simulation => "simulation",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitRootRow {
    pub variable: String,
    /// `"ZA"` or `"LS"`.
    pub test: String,
    pub model: BreakModel,
    pub level: BreakTestReport,
    pub difference: BreakTestReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantHatemiJ {
    pub variant: ModelVariant,
    pub result: HatemiJResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantLongRun {
    pub variant: ModelVariant,
    pub dols: LongRunEstimate,
    pub fmols: LongRunEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArdlReport {
    pub variant: ModelVariant,
    pub order: String,
    pub p: usize,
    pub q: Vec<usize>,
    pub bounds: BoundsDecision,
    pub ecm: EcmForm,
    pub long_run: LongRunEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorDiagnostics {
    pub variant: ModelVariant,
    pub estimator: Estimator,
    /// Regression the residual tests examine.
    pub regression: String,
    pub bundle: DiagnosticsBundle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_sha256: String,
    pub data_sha256: String,
    pub crate_version: String,
    pub seed: u64,
    /// Seconds since the Unix epoch; only set in the written provenance file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generated_at_unix: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageFailure {
    pub stage: Stage,
    pub error: String,
}

/// Everything the pipeline computes. Stages that did not run are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportBundle {
    pub provenance: Provenance,
    pub variables: Variables,
    pub tuning: PipelineTuning,
    pub sample: (i32, i32),
    pub descriptives: Option<Vec<Descriptive>>,
    pub unit_roots: Option<Vec<UnitRootRow>>,
    /// Systems without and with the interaction column.
    pub johansen: Option<Vec<JohansenResult>>,
    pub hatemi_j: Option<Vec<VariantHatemiJ>>,
    pub long_run: Option<Vec<VariantLongRun>>,
    pub ardl: Option<Vec<ArdlReport>>,
    pub diagnostics: Option<Vec<EstimatorDiagnostics>>,
    pub finite_sample_critical_values: Option<Vec<SimulationSummary>>,
    pub failure: Option<StageFailure>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn stage<T>(s: Stage, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::Stage { stage: s.name().into(), source: Box::new(e) })
}

/// Run every stage. Validation problems are returned before any computation;
/// a stage error stops the run and is returned alongside the partial bundle.
pub fn run_pipeline_partial(config: &PipelineConfig) -> Result<(ReportBundle, Option<Error>)> {
    config.validate()?;
    let bytes = config.data_bytes()?;
    let data = config.prepare_dataset(&bytes)?;
    let mut bundle = ReportBundle {
        provenance: Provenance {
            config_sha256: sha256_hex(config.canonical_json().as_bytes()),
            data_sha256: sha256_hex(&bytes),
            crate_version: env!("CARGO_PKG_VERSION").into(),
            seed: config.seed,
            generated_at_unix: None,
        },
        variables: config.variables.clone(),
        tuning: config.tuning.clone(),
        sample: (*data.years().start(), *data.years().end()),
        descriptives: None,
        unit_roots: None,
        johansen: None,
        hatemi_j: None,
        long_run: None,
        ardl: None,
        diagnostics: None,
        finite_sample_critical_values: None,
        failure: None,
    };
    let err = run_stages(config, &data, &mut bundle).err();
    if let Some(Error::Stage { stage, source }) = &err {
        let stage = serde_json::from_value(serde_json::Value::String(stage.clone())).unwrap_or(Stage::Load);
        bundle.failure = Some(StageFailure { stage, error: source.to_string() });
    }
    Ok((bundle, err))
}

/// Run every stage, failing on the first stage error.
pub fn run_pipeline(config: &PipelineConfig) -> Result<ReportBundle> {
    match run_pipeline_partial(config)? {
        (_, Some(e)) => Err(e),
        (b, None) => Ok(b),
    }
}

fn observed(config: &PipelineConfig) -> Vec<String> {
    let mut v = vec![config.variables.dependent.clone()];
    v.extend(config.variables.regressors.iter().cloned());
    v
}

fn run_stages(config: &PipelineConfig, data: &Dataset, bundle: &mut ReportBundle) -> Result<()> {
    let t = &config.tuning;
    let base = observed(config);
    let base_refs: Vec<&str> = base.iter().map(String::as_str).collect();

    bundle.descriptives = Some(stage(Stage::Describe, data.select(&base_refs).map(|d| describe(&d)))?);

    bundle.unit_roots = Some(stage(Stage::UnitRoot, unit_roots(data, &base, &t.unit_root))?);

    let mut systems = vec![base.clone()];
    if let Some(i) = &config.variables.interaction {
        let mut five = base.clone();
        five.push(i.name.clone());
        systems.push(five);
    }
    let johansen = systems
        .iter()
        .map(|names| {
            let refs: Vec<&str> = names.iter().map(String::as_str).collect();
            let d = data.select(&refs)?;
            let lag = match t.johansen.lag_order {
                Some(l) => l,
                None => select_var_lag_bic(&d, t.johansen.max_lag)?,
            };
            johansen_test(&d, lag, JohansenCase::UnrestrictedConstant)
        })
        .collect::<Result<Vec<_>>>();
    bundle.johansen = Some(stage(Stage::Cointegration, johansen)?);

    let y = stage(Stage::Cointegration, data.column(&config.variables.dependent))?;
    let mut hj = Vec::new();
    for &variant in &config.model_variants {
        let x = stage(Stage::Cointegration, regressor_set(data, config, variant))?;
        let spec = HatemiJSpec {
            trim: t.hatemi_j.trim,
            shift: t.hatemi_j.shift,
            bandwidth: t.hatemi_j.bandwidth,
            adf: AdfSpec { max_lag: t.hatemi_j.max_lag, ..HatemiJSpec::default().adf },
        };
        hj.push(VariantHatemiJ { variant, result: stage(Stage::Cointegration, hatemi_j_test(y, &x, &spec))? });
    }
    bundle.hatemi_j = Some(hj);

    let mut lr = Vec::new();
    for &variant in &config.model_variants {
        let x = stage(Stage::LongRun, regressor_set(data, config, variant))?;
        let d = match (t.dols.leads, t.dols.lags) {
            (Some(a), Some(b)) => dols(y, &x, a, b),
            _ => dols_select_bic(y, &x, t.dols.max),
        };
        let d = stage(Stage::LongRun, d)?;
        let f = stage(Stage::LongRun, fmols(y, &x, Kernel::Bartlett, t.fmols.bandwidth))?;
        lr.push(VariantLongRun { variant, dols: d, fmols: f });
    }
    bundle.long_run = Some(lr);

    let mut ardl = Vec::new();
    let mut ardl_fits = Vec::new();
    for &variant in &config.model_variants {
        let x = stage(Stage::Ardl, regressor_set(data, config, variant))?;
        let fit = stage(Stage::Ardl, ardl_select(y, &x, t.ardl.p_max, t.ardl.q_max, t.ardl.criterion))?;
        let report = ArdlReport {
            variant,
            order: fit.order_label(),
            p: fit.p,
            q: fit.q.clone(),
            bounds: stage(Stage::Ardl, bounds_test(&fit))?,
            ecm: stage(Stage::Ardl, ecm_reparameterize(&fit))?,
            long_run: stage(Stage::Ardl, ardl_longrun(&fit))?,
        };
        ardl.push(report);
        ardl_fits.push((variant, fit));
    }
    bundle.ardl = Some(ardl);

    let mut diags = Vec::new();
    for v in bundle.long_run.iter().flatten() {
        for est in [&v.dols, &v.fmols] {
            let reg = est.regression.as_ref().ok_or_else(|| Error::InvalidArgument("estimate lacks its regression".into()));
            let reg = stage(Stage::Diagnostics, reg)?;
            let label = match est.estimator {
                Estimator::Fmols => "first-stage OLS of the FMOLS sample",
                _ => "DOLS regression including lead and lag differences",
            };
            diags.push(EstimatorDiagnostics {
                variant: v.variant,
                estimator: est.estimator,
                regression: label.into(),
                bundle: stage(Stage::Diagnostics, diagnose(&reg.y, &reg.x, &t.diagnostics))?,
            });
        }
    }
    for (variant, fit) in &ardl_fits {
        diags.push(EstimatorDiagnostics {
            variant: *variant,
            estimator: Estimator::Ardl,
            regression: format!("{} in levels", fit.order_label()),
            bundle: stage(Stage::Diagnostics, diagnose(&fit.y[fit.start..], &fit.design, &t.diagnostics))?,
        });
    }
    bundle.diagnostics = Some(diags);

    if t.simulation.reps > 0 {
        let n = data.len();
        let tests = [
            CriticalValueTest::DfConstant,
            CriticalValueTest::ZaModelA,
            CriticalValueTest::LsTwoBreakModelA,
            CriticalValueTest::JohansenTrace { k: base.len() },
        ];
        let sims = tests
            .iter()
            .enumerate()
            .map(|(i, test)| simulate_critical_values(*test, n, t.simulation.reps, config.seed.wrapping_add(i as u64 * 1_000_000_007)))
            .collect::<Result<Vec<_>>>();
        bundle.finite_sample_critical_values = Some(stage(Stage::Simulation, sims)?);
    }
    Ok(())
}

fn regressor_set(data: &Dataset, config: &PipelineConfig, variant: ModelVariant) -> Result<Dataset> {
    let names = config.regressors_for(variant);
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    data.select(&refs)
}

fn unit_roots(data: &Dataset, names: &[String], t: &UnitRootTuning) -> Result<Vec<UnitRootRow>> {
    let spec = |det| AdfSpec { deterministic: det, max_lag: t.max_lag, lag_rule: t.lag_rule };
    let mut rows = Vec::new();
    for name in names {
        let level = data.column(name)?.clone();
        let diff: TimeSeries = level.transform(Transform::Diff)?;
        for model in [BreakModel::A, BreakModel::C] {
            rows.push(UnitRootRow {
                variable: name.clone(),
                test: "ZA".into(),
                model,
                level: za_test(&level, model, t.trim, &spec(Deterministic::ConstantTrend))?,
                difference: za_test(&diff, model, t.trim, &spec(Deterministic::ConstantTrend))?,
            });
        }
        for model in [LsModel::A, LsModel::C] {
            rows.push(UnitRootRow {
                variable: name.clone(),
                test: "LS".into(),
                model: model.into(),
                level: ls_test(&level, model, 2, t.trim, &spec(Deterministic::ConstantTrend))?,
                difference: ls_test(&diff, model, 2, t.trim, &spec(Deterministic::ConstantTrend))?,
            });
        }
    }
    Ok(rows)
}

/// Exclusive claim on an output directory, released on drop.
pub struct OutputLock {
    path: PathBuf,
}

impl OutputLock {
    pub fn acquire(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
        let path = dir.join(LOCK_FILE);
        fs::OpenOptions::new().write(true).create_new(true).open(&path).map_err(|e| {
            if e.kind() == std::io::ErrorKind::AlreadyExists {
                Error::Io(format!("{} is in use by another run ({} exists)", dir.display(), path.display()))
            } else {
                Error::Io(format!("{}: {e}", path.display()))
            }
        })?;
        Ok(OutputLock { path })
    }
}

impl Drop for OutputLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(p) = path.parent() {
        fs::create_dir_all(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
    }
    fs::write(path, bytes).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Write `bundle.json`, `provenance.json` (the only file with a timestamp),
/// the rendered formats, and the failure marker for a partial bundle.
pub fn write_outputs(bundle: &ReportBundle, dir: &Path, formats: &[OutputFormat]) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    let json = serde_json::to_string_pretty(bundle).map_err(|e| Error::Io(e.to_string()))?;
    let p = dir.join("bundle.json");
    write(&p, json.as_bytes())?;
    files.push(p);
    let mut prov = bundle.provenance.clone();
    prov.generated_at_unix = std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).ok().map(|d| d.as_secs());
    let p = dir.join("provenance.json");
    write(&p, serde_json::to_string_pretty(&prov).map_err(|e| Error::Io(e.to_string()))?.as_bytes())?;
    files.push(p);
    for f in formats {
        for (rel, bytes) in render(bundle, *f)? {
            let p = dir.join(rel);
            write(&p, &bytes)?;
            files.push(p);
        }
    }
    let marker = dir.join(FAILURE_MARKER);
    match &bundle.failure {
        Some(f) => {
            write(&marker, format!("stage: {}\nerror: {}\n", f.stage.name(), f.error).as_bytes())?;
            files.push(marker);
        }
        None if marker.exists() => fs::remove_file(&marker).map_err(|e| Error::Io(e.to_string()))?,
        None => {}
    }
    Ok(files)
}

/// Lock `dir`, run the pipeline, and persist whatever was computed.
pub fn execute(config: &PipelineConfig, dir: &Path, formats: &[OutputFormat]) -> Result<ReportBundle> {
    let _lock = OutputLock::acquire(dir)?;
    let (bundle, err) = run_pipeline_partial(config)?;
    write_outputs(&bundle, dir, formats)?;
    match err {
        Some(e) => Err(e),
        None => Ok(bundle),
    }
}

/// Read a bundle written by [`write_outputs`].
pub fn read_bundle(path: &Path) -> Result<ReportBundle> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::MalformedPayload(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config() -> PipelineConfig {
        PipelineConfig::from_json(
            r#"{"variables": {"dependent": "INF", "regressors": ["IMP", "REN", "EXC"],
                "interaction": {"factors": ["REN", "IMP"]}}}"#,
        )
        .unwrap()
    }

    #[test]
    fn snapshot_run_fills_every_stage() {
        let b = run_pipeline(&config()).unwrap();
        assert_eq!(b.sample, (1980, 2022));
        assert_eq!(b.unit_roots.as_ref().unwrap().len(), 16);
        let j = b.johansen.as_ref().unwrap();
        assert_eq!(j.len(), 2);
        assert_eq!(j[0].variables, vec!["INF", "IMP", "REN", "EXC"]);
        assert_eq!(j[1].variables.len(), 5);
        assert_eq!(b.long_run.as_ref().unwrap().len(), 2);
        assert_eq!(b.diagnostics.as_ref().unwrap().len(), 6);
        assert!(b.finite_sample_critical_values.is_none());
        assert!(b.failure.is_none());
        let lr = &b.long_run.as_ref().unwrap()[0];
        assert_eq!(lr.dols.names(), vec!["IMP", "REN", "EXC", "TERM", "C"]);
    }

    #[test]
    fn stage_error_names_the_stage_and_keeps_earlier_output() {
        let mut c = config();
        c.tuning.ardl.p_max = 0;
        let (b, err) = run_pipeline_partial(&c).unwrap();
        match err {
            Some(Error::Stage { stage, .. }) => assert_eq!(stage, "ardl"),
            e => panic!("{e:?}"),
        }
        assert!(b.long_run.is_some() && b.ardl.is_none() && b.diagnostics.is_none());
        assert!(b.hatemi_j.is_some());
        assert_eq!(b.failure.as_ref().unwrap().stage, Stage::Ardl);
    }

    #[test]
    fn lock_is_exclusive() {
        let dir = tempfile::tempdir().unwrap();
        let a = OutputLock::acquire(dir.path()).unwrap();
        assert!(OutputLock::acquire(dir.path()).is_err());
        drop(a);
        assert!(OutputLock::acquire(dir.path()).is_ok());
    }
}
