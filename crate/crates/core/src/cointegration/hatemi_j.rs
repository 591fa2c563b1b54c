use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::breaks::{argmin_first, break_pairs};
use crate::error::{Error, Result};
use crate::numerics::{matrix_from_columns, newey_west_bandwidth, ols_fit, Kernel};
use crate::timeseries::{level_dummy, Dataset, TimeSeries};
use crate::unit_root::{adf_regression, select_lag, AdfSpec, CriticalValues, Deterministic, LagRule, Rejections};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ShiftSpec {
    /// Intercept shifts only.
    LevelShifts,
    /// Intercept and slope shifts.
    #[default]
    LevelAndSlopeShifts,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HatemiJSpec {
    pub trim: f64,
    pub shift: ShiftSpec,
    /// Lag rule for the residual ADF regression (deterministic terms are ignored).
    pub adf: AdfSpec,
    /// Bartlett bandwidth for the Phillips corrections; `None` uses the Newey-West rule.
    pub bandwidth: Option<usize>,
}

impl Default for HatemiJSpec {
    fn default() -> Self {
        HatemiJSpec {
            trim: 0.15,
            shift: ShiftSpec::default(),
            adf: AdfSpec { deterministic: Deterministic::None, max_lag: None, lag_rule: LagRule::TSig10Pct },
            bandwidth: None,
        }
    }
}

/// Residual statistics at one break pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairStatistics {
    pub breaks: (usize, usize),
    pub adf: f64,
    pub adf_lag: usize,
    pub zt: f64,
    pub za: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HatemiJCriticalValues {
    pub adf: CriticalValues,
    pub zt: CriticalValues,
    pub za: CriticalValues,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HatemiJRejections {
    pub adf: Rejections,
    pub zt: Rejections,
    pub za: Rejections,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HatemiJResult {
    pub dependent: String,
    pub regressors: Vec<String>,
    pub shift: ShiftSpec,
    pub adf_star: f64,
    pub zt_star: f64,
    pub za_star: f64,
    pub adf_lag: usize,
    /// 1-based last pre-break observations.
    pub breaks_adf_indices: (usize, usize),
    pub breaks_zt_indices: (usize, usize),
    pub breaks_za_indices: (usize, usize),
    pub breaks_adf: (i32, i32),
    pub breaks_zt: (i32, i32),
    pub breaks_za: (i32, i32),
    pub critical_values: HatemiJCriticalValues,
    pub reject_at: HatemiJRejections,
    pub profile: Vec<PairStatistics>,
}

/// Critical values printed with the two-break results for four regressors.
pub fn hatemi_j_critical_values() -> HatemiJCriticalValues {
    let t = CriticalValues::new(-6.503, -6.015, -5.653);
    HatemiJCriticalValues { adf: t, zt: t, za: CriticalValues::new(-90.794, -76.003, -52.232) }
}

/// Phillips `(Z_alpha, Z_t)` for a residual series, Bartlett-weighted with `bandwidth` lags.
pub fn phillips_z(u: &[f64], bandwidth: usize) -> Result<(f64, f64)> {
    let t = u.len();
    if t < 3 || bandwidth >= t - 1 {
        return Err(Error::BandwidthTooLarge { bandwidth, t });
    }
    let n = t as f64;
    let sxx: f64 = u[..t - 1].iter().map(|v| v * v).sum();
    if !(sxx > 0.0) {
        return Err(Error::ZeroVariance);
    }
    let sxy: f64 = u.windows(2).map(|w| w[0] * w[1]).sum();
    let rho = sxy / sxx;
    let v: Vec<f64> = u.windows(2).map(|w| w[1] - rho * w[0]).collect();
    let gamma = |j: usize| v[j..].iter().zip(&v).map(|(a, b)| a * b).sum::<f64>() / n;
    let lambda: f64 = (1..=bandwidth).map(|j| Kernel::Bartlett.weight(j, bandwidth) * gamma(j)).sum();
    let sigma2 = gamma(0) + 2.0 * lambda;
    if !(sigma2 > 0.0) {
        return Err(Error::ZeroVariance);
    }
    let rho_star = (sxy - (t - 1) as f64 * lambda) / sxx;
    let za = n * (rho_star - 1.0);
    let zt = (rho_star - 1.0) / (sigma2 / sxx).sqrt();
    Ok((za, zt))
}

fn design(t: usize, x: &[Vec<f64>], (tb1, tb2): (usize, usize), shift: ShiftSpec) -> Vec<Vec<f64>> {
    let d1 = level_dummy(t, tb1);
    let d2 = level_dummy(t, tb2);
    let mut cols = vec![vec![1.0; t], d1.clone(), d2.clone()];
    cols.extend(x.iter().cloned());
    if shift == ShiftSpec::LevelAndSlopeShifts {
        for d in [&d1, &d2] {
            for c in x {
                cols.push(d.iter().zip(c).map(|(a, b)| a * b).collect());
            }
        }
    }
    cols
}

/// Residual-based statistics for the regime-shift regression at a fixed pair.
pub fn hatemi_j_statistics_at(y: &[f64], x: &[Vec<f64>], breaks: (usize, usize), spec: &HatemiJSpec) -> Result<PairStatistics> {
    let t = y.len();
    let cols = design(t, x, breaks, spec.shift);
    let fit = ols_fit(y, &matrix_from_columns(&cols)?)?;
    let u = fit.residuals;
    let kmax = crate::unit_root::adf::resolve_max_lag(&spec.adf, t)?;
    let reg = select_lag(kmax, spec.adf.lag_rule, |k, trim| adf_regression(&u, Deterministic::None, k, &[], 1 + trim))?;
    let bw = spec.bandwidth.unwrap_or_else(|| newey_west_bandwidth(t));
    let (za, zt) = phillips_z(&u, bw)?;
    Ok(PairStatistics { breaks, adf: reg.statistic(), adf_lag: reg.lag, zt, za })
}

/// Two-regime-shift cointegration test: minimum residual ADF, `Z_t` and
/// `Z_alpha` statistics over every admissible pair of break dates.
pub fn hatemi_j_test(y: &TimeSeries, x: &Dataset, spec: &HatemiJSpec) -> Result<HatemiJResult> {
    let t = y.len();
    if x.columns.is_empty() {
        return Err(Error::InvalidArgument("at least one regressor is required".into()));
    }
    if x.len() != t || x.start_year != y.start_year {
        return Err(Error::AlignmentMismatch("regressors must cover the same years as the dependent series".into()));
    }
    let pairs = break_pairs(t, spec.trim)?;
    let kmax = crate::unit_root::adf::resolve_max_lag(&spec.adf, t)?;
    let slopes = if spec.shift == ShiftSpec::LevelAndSlopeShifts { 3 } else { 1 };
    let k = 3 + slopes * x.columns.len();
    if t < 2 + kmax || t - 1 - kmax < crate::unit_root::adf::MIN_ADF_OBS || t <= k + 2 {
        return Err(Error::InsufficientSample(format!("{t} observations for {k} regressors and {kmax} lags")));
    }
    let xv = x.values();
    let evaluated: Vec<Result<PairStatistics>> =
        pairs.par_iter().map(|&p| hatemi_j_statistics_at(&y.values, &xv, p, spec)).collect();
    let mut profile = Vec::with_capacity(evaluated.len());
    for e in evaluated {
        match e {
            Ok(s) => profile.push(s),
            Err(Error::RankDeficient { .. } | Error::DegenerateRegression(_) | Error::ZeroVariance) => {}
            Err(e) => return Err(e),
        }
    }
    let pick = |f: fn(&PairStatistics) -> f64| -> Result<&PairStatistics> {
        let v: Vec<f64> = profile.iter().map(f).collect();
        argmin_first(&v)
            .map(|i| &profile[i])
            .ok_or_else(|| Error::DegenerateRegression("no admissible break pair could be estimated".into()))
    };
    let a = *pick(|s| s.adf)?;
    let zt = *pick(|s| s.zt)?;
    let za = *pick(|s| s.za)?;
    let years = |(b1, b2): (usize, usize)| (y.year_of(b1), y.year_of(b2));
    let cv = hatemi_j_critical_values();
    Ok(HatemiJResult {
        dependent: y.name.clone(),
        regressors: x.names().into_iter().map(String::from).collect(),
        shift: spec.shift,
        adf_star: a.adf,
        zt_star: zt.zt,
        za_star: za.za,
        adf_lag: a.adf_lag,
        breaks_adf_indices: a.breaks,
        breaks_zt_indices: zt.breaks,
        breaks_za_indices: za.breaks,
        breaks_adf: years(a.breaks),
        breaks_zt: years(zt.breaks),
        breaks_za: years(za.breaks),
        reject_at: HatemiJRejections { adf: cv.adf.decide(a.adf), zt: cv.zt.decide(zt.zt), za: cv.za.decide(za.za) },
        critical_values: cv,
        profile,
    })
}
