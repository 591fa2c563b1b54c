//! Unit-root tests: augmented Dickey-Fuller, Zivot-Andrews (one endogenous
//! break) and the Lee-Strazicich minimum LM test (one or two breaks).

pub(crate) mod adf;
mod critical;
mod ls;
mod za;

pub use adf::{adf_regression, adf_test, default_max_lag, mackinnon_critical_values, select_lag, AdfRegression};
pub use critical::{ls_critical_values, za_critical_values};
pub use ls::{ls_statistic_at, ls_test, LsModel};
pub use za::{za_statistic_at, za_test};

pub(crate) use ls::ls_model_a_two_break_min_lag0;
pub(crate) use za::za_model_a_min_lag0;

use serde::{Deserialize, Serialize};

use crate::timeseries::BreakModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Deterministic {
    None,
    Constant,
    ConstantTrend,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LagRule {
    Fixed(usize),
    /// General-to-specific: drop the last lag while it is insignificant at 10%.
    TSig10Pct,
    Aic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdfSpec {
    pub deterministic: Deterministic,
    /// `None` selects `floor(12 (T/100)^0.25)`.
    pub max_lag: Option<usize>,
    pub lag_rule: LagRule,
}

impl Default for AdfSpec {
    fn default() -> Self {
        AdfSpec { deterministic: Deterministic::Constant, max_lag: None, lag_rule: LagRule::TSig10Pct }
    }
}

impl AdfSpec {
    pub fn fixed(deterministic: Deterministic, lag: usize) -> Self {
        AdfSpec { deterministic, max_lag: Some(lag), lag_rule: LagRule::Fixed(lag) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TestKind {
    #[serde(rename = "ADF")]
    Adf,
    #[serde(rename = "ZA")]
    Za,
    #[serde(rename = "LS")]
    Ls,
}

/// Lower-tail critical values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalValues {
    pub pct1: f64,
    pub pct5: f64,
    pub pct10: f64,
}

impl CriticalValues {
    pub const fn new(pct1: f64, pct5: f64, pct10: f64) -> Self {
        CriticalValues { pct1, pct5, pct10 }
    }

    /// Reject when the statistic lies strictly below the critical value.
    pub fn decide(&self, statistic: f64) -> Rejections {
        Rejections { pct1: statistic < self.pct1, pct5: statistic < self.pct5, pct10: statistic < self.pct10 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rejections {
    pub pct1: bool,
    pub pct5: bool,
    pub pct10: bool,
}

impl Rejections {
    /// `***`, `**`, `*` or empty.
    pub fn stars(&self) -> &'static str {
        if self.pct1 {
            "***"
        } else if self.pct5 {
            "**"
        } else if self.pct10 {
            "*"
        } else {
            ""
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub breaks: Vec<usize>,
    pub statistic: f64,
    pub lag: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BreakTestReport {
    pub test: TestKind,
    pub model: Option<BreakModel>,
    pub series: String,
    pub statistic: f64,
    /// 1-based index of the last observation before each break.
    pub break_indices: Vec<usize>,
    pub break_years: Vec<i32>,
    pub chosen_lag: usize,
    pub candidate_profile: Vec<Candidate>,
    pub critical_values: CriticalValues,
    pub reject_at: Rejections,
}

impl BreakTestReport {
    /// True when the stored flags follow from the stored critical values.
    pub fn is_consistent(&self) -> bool {
        self.critical_values.decide(self.statistic) == self.reject_at
    }

    pub(crate) fn from_profile(
        test: TestKind,
        model: Option<BreakModel>,
        series: &crate::timeseries::TimeSeries,
        profile: Vec<Candidate>,
        critical_values: CriticalValues,
    ) -> crate::Result<Self> {
        let stats: Vec<f64> = profile.iter().map(|c| c.statistic).collect();
        let best = crate::breaks::argmin_first(&stats)
            .ok_or_else(|| crate::Error::DegenerateRegression("no admissible break candidate could be estimated".into()))?;
        let winner = &profile[best];
        Ok(BreakTestReport {
            test,
            model,
            series: series.name.clone(),
            statistic: winner.statistic,
            break_indices: winner.breaks.clone(),
            break_years: winner.breaks.iter().map(|&b| series.year_of(b)).collect(),
            chosen_lag: winner.lag,
            reject_at: critical_values.decide(winner.statistic),
            critical_values,
            candidate_profile: profile,
        })
    }
}
