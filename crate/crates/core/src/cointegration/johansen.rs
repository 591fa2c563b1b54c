use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{generalized_eigen, matrix_from_columns, ols_fit, Matrix};
use crate::timeseries::Dataset;
use crate::unit_root::CriticalValues;

/// Deterministic specification of the VECM.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum JohansenCase {
    /// Unrestricted constant (linear trends in the levels allowed).
    #[default]
    UnrestrictedConstant,
}

/// Upper-tail critical values for a rank test (reject when the statistic exceeds them).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankCriticalValues {
    pub pct10: f64,
    pub pct5: f64,
    pub pct1: f64,
}

/// Trace and maximum-eigenvalue critical values for an unrestricted
/// constant, indexed by `k - r` (1..=6).
const TRACE_CV: [[f64; 3]; 6] = [
    [2.705545, 3.841466, 6.634897],
    [13.42878, 15.49471, 19.93711],
    [27.06695, 29.79707, 35.45817],
    [44.49359, 47.85613, 54.68150],
    [65.81970, 69.81889, 77.81884],
    [91.10970, 95.75366, 104.9615],
];
const MAXEIG_CV: [[f64; 3]; 6] = [
    [2.705545, 3.841466, 6.634897],
    [12.29652, 14.26460, 18.52001],
    [18.89282, 21.13162, 25.86121],
    [25.12408, 27.58434, 32.71527],
    [31.23922, 33.87687, 39.37049],
    [37.27779, 40.07757, 45.86900],
];

pub const MAX_JOHANSEN_VARIABLES: usize = 6;

pub fn trace_critical_values(k_minus_r: usize) -> Option<RankCriticalValues> {
    cv_row(&TRACE_CV, k_minus_r)
}

pub fn maxeig_critical_values(k_minus_r: usize) -> Option<RankCriticalValues> {
    cv_row(&MAXEIG_CV, k_minus_r)
}

fn cv_row(table: &[[f64; 3]; 6], k_minus_r: usize) -> Option<RankCriticalValues> {
    let row = table.get(k_minus_r.checked_sub(1)?)?;
    Some(RankCriticalValues { pct10: row[0], pct5: row[1], pct1: row[2] })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectedRank {
    pub pct1: usize,
    pub pct5: usize,
    pub pct10: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JohansenResult {
    pub variables: Vec<String>,
    pub eigenvalues: Vec<f64>,
    /// `trace_stats[r]` tests `rank <= r` against `rank = k`.
    pub trace_stats: Vec<f64>,
    /// `maxeig_stats[r]` tests `rank = r` against `rank = r + 1`.
    pub maxeig_stats: Vec<f64>,
    pub critical_values_trace: Vec<RankCriticalValues>,
    pub critical_values_maxeig: Vec<RankCriticalValues>,
    /// Rank chosen by the sequential trace procedure.
    pub selected_rank: SelectedRank,
    pub selected_rank_maxeig: SelectedRank,
    pub lag_order: usize,
    pub det_case: JohansenCase,
    pub effective_t: usize,
}

fn sequential_rank(stats: &[f64], cvs: &[RankCriticalValues], pick: impl Fn(&RankCriticalValues) -> f64) -> usize {
    stats
        .iter()
        .zip(cvs)
        .position(|(s, cv)| *s <= pick(cv))
        .unwrap_or(stats.len())
}

/// Residuals of each column of `targets` regressed on `z` (or demeaned when `z` is only a constant).
fn concentrate(targets: &[Vec<f64>], z: &Matrix) -> Result<Vec<Vec<f64>>> {
    targets.iter().map(|y| ols_fit(y, z).map(|f| f.residuals)).collect()
}

fn moment(a: &[Vec<f64>], b: &[Vec<f64>], n: f64) -> Matrix {
    Matrix::from_fn(a.len(), b.len(), |i, j| a[i].iter().zip(&b[j]).map(|(x, y)| x * y).sum::<f64>() / n)
}

/// Johansen reduced-rank test on a VAR of order `lag_order` in levels.
pub fn johansen_test(d: &Dataset, lag_order: usize, det_case: JohansenCase) -> Result<JohansenResult> {
    let k = d.columns.len();
    let t = d.len();
    if k < 2 {
        return Err(Error::InvalidArgument("Johansen test needs at least two variables".into()));
    }
    if k > MAX_JOHANSEN_VARIABLES {
        return Err(Error::InvalidArgument(format!(
            "critical values are tabulated for at most {MAX_JOHANSEN_VARIABLES} variables"
        )));
    }
    if lag_order < 1 {
        return Err(Error::InvalidArgument("lag order must be at least 1".into()));
    }
    if t <= lag_order || t - lag_order <= k * lag_order + k + 1 {
        return Err(Error::InsufficientSample(format!(
            "{t} observations cannot support a {k}-variable VECM with {lag_order} lags"
        )));
    }
    let p = lag_order;
    let y = d.values();
    let rows = p..t;
    let n = (t - p) as f64;
    let dy = |c: usize, i: usize| y[c][i] - y[c][i - 1];

    let r0_target: Vec<Vec<f64>> = (0..k).map(|c| rows.clone().map(|i| dy(c, i)).collect()).collect();
    let r1_target: Vec<Vec<f64>> = (0..k).map(|c| rows.clone().map(|i| y[c][i - 1]).collect()).collect();
    let mut zcols: Vec<Vec<f64>> = vec![vec![1.0; t - p]];
    for j in 1..p {
        for c in 0..k {
            zcols.push(rows.clone().map(|i| dy(c, i - j)).collect());
        }
    }
    let z = matrix_from_columns(&zcols)?;
    let r0 = concentrate(&r0_target, &z)?;
    let r1 = concentrate(&r1_target, &z)?;

    let s00 = moment(&r0, &r0, n);
    let s11 = moment(&r1, &r1, n);
    let s01 = moment(&r0, &r1, n);
    let s00_inv = s00.clone().cholesky().ok_or(Error::RankDeficient { rcond: 0.0 })?.inverse();
    let a = s01.transpose() * s00_inv * &s01;
    let a = (&a + a.transpose()) * 0.5;
    let eigenvalues: Vec<f64> = generalized_eigen(&a, &s11)
        .map_err(|_| Error::RankDeficient { rcond: 0.0 })?
        .into_iter()
        .map(|l| l.clamp(0.0, 1.0 - f64::EPSILON))
        .collect();

    let logs: Vec<f64> = eigenvalues.iter().map(|l| -n * (1.0 - l).ln()).collect();
    let maxeig_stats = logs.clone();
    let trace_stats: Vec<f64> = (0..k).map(|r| logs[r..].iter().sum()).collect();
    let critical_values_trace: Vec<RankCriticalValues> =
        (0..k).map(|r| trace_critical_values(k - r).expect("k <= 6")).collect();
    let critical_values_maxeig: Vec<RankCriticalValues> =
        (0..k).map(|r| maxeig_critical_values(k - r).expect("k <= 6")).collect();

    let select = |stats: &[f64], cvs: &[RankCriticalValues]| SelectedRank {
        pct1: sequential_rank(stats, cvs, |c| c.pct1),
        pct5: sequential_rank(stats, cvs, |c| c.pct5),
        pct10: sequential_rank(stats, cvs, |c| c.pct10),
    };
    Ok(JohansenResult {
        variables: d.names().into_iter().map(String::from).collect(),
        selected_rank: select(&trace_stats, &critical_values_trace),
        selected_rank_maxeig: select(&maxeig_stats, &critical_values_maxeig),
        eigenvalues,
        trace_stats,
        maxeig_stats,
        critical_values_trace,
        critical_values_maxeig,
        lag_order,
        det_case,
        effective_t: t - p,
    })
}

/// VAR lag order (in levels) minimising the Schwarz criterion over `1..=max_lag`,
/// all candidates fitted on the sample left after `max_lag` lags.
pub fn select_var_lag_bic(d: &Dataset, max_lag: usize) -> Result<usize> {
    let k = d.columns.len();
    let t = d.len();
    if max_lag < 1 || t <= max_lag + k * max_lag + 2 {
        return Err(Error::InsufficientSample(format!("cannot compare VAR lags up to {max_lag} with {t} observations")));
    }
    let y = d.values();
    let rows = max_lag..t;
    let n = (t - max_lag) as f64;
    let mut best = (1, f64::INFINITY);
    for p in 1..=max_lag {
        let mut cols = vec![vec![1.0; t - max_lag]];
        for j in 1..=p {
            for c in 0..k {
                cols.push(rows.clone().map(|i| y[c][i - j]).collect());
            }
        }
        let x = matrix_from_columns(&cols)?;
        let resid: Vec<Vec<f64>> = (0..k)
            .map(|c| ols_fit(&rows.clone().map(|i| y[c][i]).collect::<Vec<_>>(), &x).map(|f| f.residuals))
            .collect::<Result<_>>()?;
        let sigma = moment(&resid, &resid, n);
        let det = sigma.determinant();
        if !(det > 0.0) {
            continue;
        }
        let params = (k * (k * p + 1)) as f64;
        let bic = det.ln() + params * n.ln() / n;
        if bic < best.1 {
            best = (p, bic);
        }
    }
    Ok(best.0)
}

impl JohansenResult {
    /// 5% trace critical values, for table output.
    pub fn trace_cv5(&self) -> Vec<f64> {
        self.critical_values_trace.iter().map(|c| c.pct5).collect()
    }

    pub fn maxeig_cv5(&self) -> Vec<f64> {
        self.critical_values_maxeig.iter().map(|c| c.pct5).collect()
    }
}

/// Lower-tail representation used when a rank statistic is reported next to unit-root tests.
impl From<RankCriticalValues> for CriticalValues {
    fn from(c: RankCriticalValues) -> Self {
        CriticalValues::new(c.pct1, c.pct5, c.pct10)
    }
}
