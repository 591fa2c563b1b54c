use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::ardl::Criterion;
use crate::cointegration::ShiftSpec;
use crate::diagnostics::DiagnosticsOptions;
use crate::error::{Error, Result};
use crate::timeseries::{load_dataset, Dataset, TURKIYE_SNAPSHOT};
use crate::unit_root::LagRule;

/// JSON schema for [`PipelineConfig`] files.
pub const CONFIG_SCHEMA: &str = include_str!("../../../../configs/pipeline.schema.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    /// CSV with a `year` column. Relative paths resolve against the config
    /// file's directory; absent means the bundled snapshot.
    #[serde(default)]
    pub data_path: Option<PathBuf>,
    pub variables: Variables,
    #[serde(default = "default_variants")]
    pub model_variants: Vec<ModelVariant>,
    #[serde(default)]
    pub tuning: PipelineTuning,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
}

fn default_variants() -> Vec<ModelVariant> {
    vec![ModelVariant::WithTerm, ModelVariant::WithoutTerm]
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Variables {
    pub dependent: String,
    pub regressors: Vec<String>,
    #[serde(default)]
    pub interaction: Option<Interaction>,
}

/// Elementwise product of two regressors, added as a column named `name`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Interaction {
    pub factors: (String, String),
    #[serde(default = "default_term_name")]
    pub name: String,
}

fn default_term_name() -> String {
    "TERM".into()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelVariant {
    WithTerm,
    WithoutTerm,
}

impl ModelVariant {
    pub fn label(&self) -> &'static str {
        match self {
            ModelVariant::WithTerm => "with_term",
            ModelVariant::WithoutTerm => "without_term",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineTuning {
    pub unit_root: UnitRootTuning,
    pub johansen: JohansenTuning,
    pub hatemi_j: HatemiJTuning,
    pub dols: DolsTuning,
    pub fmols: FmolsTuning,
    pub ardl: ArdlTuning,
    pub diagnostics: DiagnosticsOptions,
    pub simulation: SimulationTuning,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct UnitRootTuning {
    pub trim: f64,
    pub max_lag: Option<usize>,
    pub lag_rule: LagRule,
}

impl Default for UnitRootTuning {
    fn default() -> Self {
        UnitRootTuning { trim: 0.15, max_lag: None, lag_rule: LagRule::TSig10Pct }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct JohansenTuning {
    /// Fixed VAR lag order; `None` selects by BIC up to `max_lag`.
    pub lag_order: Option<usize>,
    pub max_lag: usize,
}

impl Default for JohansenTuning {
    fn default() -> Self {
        JohansenTuning { lag_order: None, max_lag: 2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HatemiJTuning {
    pub trim: f64,
    pub shift: ShiftSpec,
    pub max_lag: Option<usize>,
    pub bandwidth: Option<usize>,
}

impl Default for HatemiJTuning {
    fn default() -> Self {
        HatemiJTuning { trim: 0.15, shift: ShiftSpec::default(), max_lag: None, bandwidth: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DolsTuning {
    /// Fixed leads and lags; both absent selects `leads = lags` by BIC up to `max`.
    pub leads: Option<usize>,
    pub lags: Option<usize>,
    pub max: usize,
}

impl Default for DolsTuning {
    fn default() -> Self {
        DolsTuning { leads: None, lags: None, max: 1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct FmolsTuning {
    pub bandwidth: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ArdlTuning {
    pub p_max: usize,
    pub q_max: usize,
    pub criterion: Criterion,
}

impl Default for ArdlTuning {
    fn default() -> Self {
        ArdlTuning { p_max: 2, q_max: 2, criterion: Criterion::Aic }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct SimulationTuning {
    /// Replications for finite-sample critical values at the data's length;
    /// zero skips the stage.
    pub reps: usize,
}

impl PipelineConfig {
    /// Parse strict JSON. Unknown keys are rejected.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: PipelineConfig = serde_json::from_str(text).map_err(|e| Error::Validation(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Read a config file; a relative `data_path` is made relative to its directory.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::from_json(&text)?;
        if let (Some(data), Some(dir)) = (&cfg.data_path, path.parent()) {
            if data.is_relative() {
                cfg.data_path = Some(dir.join(data));
            }
        }
        Ok(cfg)
    }

    /// Canonical serialization hashed into the provenance record.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    /// Checks that need no data.
    pub fn validate(&self) -> Result<()> {
        let v = &self.variables;
        let invalid = |m: String| Err(Error::Validation(m));
        if v.dependent.is_empty() {
            return invalid("dependent variable is empty".into());
        }
        if v.regressors.is_empty() {
            return invalid("at least one regressor is required".into());
        }
        if v.regressors.contains(&v.dependent) {
            return invalid(format!("dependent variable {} is listed among the regressors", v.dependent));
        }
        let mut seen = BTreeSet::new();
        for r in &v.regressors {
            if !seen.insert(r) {
                return invalid(format!("regressor {r} is listed twice"));
            }
        }
        if let Some(i) = &v.interaction {
            if i.factors.0 == i.factors.1 {
                return invalid("interaction factors must differ".into());
            }
            if i.name == v.dependent || v.regressors.contains(&i.name) {
                return invalid(format!("interaction name {} collides with a variable", i.name));
            }
        }
        if self.model_variants.is_empty() {
            return invalid("no model variants requested".into());
        }
        let variants: BTreeSet<_> = self.model_variants.iter().collect();
        if variants.len() != self.model_variants.len() {
            return invalid("model variants are repeated".into());
        }
        if self.model_variants.contains(&ModelVariant::WithTerm) && v.interaction.is_none() {
            return invalid("the with_term variant needs an interaction".into());
        }
        let d = &self.tuning.dols;
        if d.leads.is_some() != d.lags.is_some() {
            return invalid("DOLS leads and lags must both be set or both be absent".into());
        }
        if self.tuning.simulation.reps != 0 && self.tuning.simulation.reps < 1000 {
            return invalid("simulation.reps must be 0 or at least 1000".into());
        }
        Ok(())
    }

    /// Raw data bytes: the file at `data_path`, or the bundled snapshot.
    pub fn data_bytes(&self) -> Result<Vec<u8>> {
        match &self.data_path {
            Some(p) => std::fs::read(p).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
            None => Ok(TURKIYE_SNAPSHOT.as_bytes().to_vec()),
        }
    }

    /// Dependent, regressors in config order, then the interaction column if any.
    pub fn prepare_dataset(&self, bytes: &[u8]) -> Result<Dataset> {
        let raw = load_dataset(bytes)?;
        let v = &self.variables;
        let mut names: Vec<&str> = vec![v.dependent.as_str()];
        names.extend(v.regressors.iter().map(String::as_str));
        let mut d = raw.select(&names)?;
        if let Some(i) = &v.interaction {
            let a = raw.column(&i.factors.0)?;
            let b = raw.column(&i.factors.1)?;
            let mut term = crate::timeseries::interaction(a, b)?;
            term.name = i.name.clone();
            d = d.with_column(term)?;
        }
        Ok(d)
    }

    /// Regressor names used by one model variant.
    pub fn regressors_for(&self, variant: ModelVariant) -> Vec<String> {
        let mut r = self.variables.regressors.clone();
        if let (ModelVariant::WithTerm, Some(i)) = (variant, &self.variables.interaction) {
            r.push(i.name.clone());
        }
        r
    }
}
