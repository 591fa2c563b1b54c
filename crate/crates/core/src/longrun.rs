//! Long-run coefficient estimators for a single cointegrating equation:
//! dynamic OLS and fully modified OLS. ARDL long-run coefficients share the
//! same report type.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::numerics::{
    information_criteria, long_run_covariance, long_run_variance, matrix_from_columns, newey_west_bandwidth, ols_fit,
    Kernel, Matrix, OlsFit,
};
use crate::timeseries::{Dataset, TimeSeries};

/// Condition number of the regressors' long-run covariance above which the
/// FMOLS correction is flagged as unreliable.
pub const FMOLS_CONDITION_WARNING: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Estimator {
    #[serde(rename = "DOLS")]
    Dols,
    #[serde(rename = "FMOLS")]
    Fmols,
    #[serde(rename = "ARDL")]
    Ardl,
}

impl std::fmt::Display for Estimator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Estimator::Dols => "DOLS",
            Estimator::Fmols => "FMOLS",
            Estimator::Ardl => "ARDL",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct Tuning {
    pub leads: Option<usize>,
    pub lags: Option<usize>,
    pub kernel: Kernel,
    pub bandwidth: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub name: String,
    pub coefficient: f64,
    pub std_error: f64,
    pub t_stat: f64,
    /// Two-sided Student-t p-value.
    pub p_value: f64,
}

/// The regression whose residuals the diagnostics should examine.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionData {
    pub y: Vec<f64>,
    /// Design including the constant.
    pub x: Matrix,
    pub residuals: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LongRunEstimate {
    pub estimator: Estimator,
    pub dependent: String,
    /// Regressors in input order followed by the constant `C`.
    pub terms: Vec<Term>,
    pub effective_t: usize,
    pub tuning: Tuning,
    #[serde(default)]
    pub warnings: Vec<String>,
    #[serde(skip)]
    pub regression: Option<RegressionData>,
}

impl LongRunEstimate {
    pub fn term(&self, name: &str) -> Option<&Term> {
        self.terms.iter().find(|t| t.name == name)
    }

    pub fn coefficient(&self, name: &str) -> Option<f64> {
        self.term(name).map(|t| t.coefficient)
    }

    pub fn names(&self) -> Vec<&str> {
        self.terms.iter().map(|t| t.name.as_str()).collect()
    }
}

pub(crate) fn make_terms(names: &[String], coef: &[f64], se: &[f64], df: usize) -> Result<Vec<Term>> {
    let dist = StudentsT::new(0.0, 1.0, df.max(1) as f64).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(names
        .iter()
        .zip(coef.iter().zip(se))
        .map(|(n, (&c, &s))| {
            let t = c / s;
            Term { name: n.clone(), coefficient: c, std_error: s, t_stat: t, p_value: 2.0 * dist.sf(t.abs()) }
        })
        .collect())
}

fn check_alignment(y: &TimeSeries, x: &Dataset) -> Result<()> {
    if x.columns.is_empty() {
        return Err(Error::InvalidArgument("at least one regressor is required".into()));
    }
    if x.len() != y.len() || x.start_year != y.start_year {
        return Err(Error::AlignmentMismatch(format!("`{}` and the regressors cover different years", y.name)));
    }
    Ok(())
}

/// Column names in reporting order: regressors then `C`.
fn term_names(x: &Dataset) -> Vec<String> {
    x.names().into_iter().map(String::from).chain(std::iter::once("C".to_string())).collect()
}

/// Reorder a `[C, X...]` vector to `[X..., C]`.
fn constant_last(v: &[f64], m: usize) -> Vec<f64> {
    v[1..=m].iter().copied().chain(std::iter::once(v[0])).collect()
}

struct DolsRegression {
    fit: OlsFit,
    y: Vec<f64>,
    x: Matrix,
    rows: usize,
}

/// `rows` is the sample `[start, end)`. With no leads and no lags the
/// regression is the static one; otherwise `ΔX_{t-lags..t+leads}` are added.
fn dols_regression(y: &[f64], x: &[Vec<f64>], leads: usize, lags: usize, start: usize, end: usize) -> Result<DolsRegression> {
    let rows = start..end;
    let mut cols = vec![vec![1.0; end - start]];
    for c in x {
        cols.push(rows.clone().map(|i| c[i]).collect());
    }
    if leads + lags > 0 {
        for c in x {
            for j in -(lags as isize)..=(leads as isize) {
                cols.push(rows.clone().map(|i| {
                    let s = (i as isize + j) as usize;
                    c[s] - c[s - 1]
                }).collect());
            }
        }
    }
    let dep: Vec<f64> = rows.map(|i| y[i]).collect();
    let xm = matrix_from_columns(&cols)?;
    let fit = ols_fit(&dep, &xm)?;
    Ok(DolsRegression { fit, y: dep, x: xm, rows: end - start })
}

fn dols_sample(t: usize, leads: usize, lags: usize) -> (usize, usize) {
    if leads + lags == 0 {
        (0, t)
    } else {
        (1 + lags, t.saturating_sub(leads))
    }
}

/// Dynamic OLS with `leads` and `lags` of the differenced regressors.
///
/// Coefficient standard errors replace the OLS residual variance by the
/// Bartlett long-run variance of the residuals.
pub fn dols(y: &TimeSeries, x: &Dataset, leads: usize, lags: usize) -> Result<LongRunEstimate> {
    check_alignment(y, x)?;
    let t = y.len();
    let m = x.columns.len();
    let (start, end) = dols_sample(t, leads, lags);
    let k = 1 + m + if leads + lags > 0 { m * (leads + lags + 1) } else { 0 };
    if end <= start || end - start <= k {
        return Err(Error::InsufficientSample(format!(
            "{} usable observations for {k} DOLS parameters",
            end.saturating_sub(start)
        )));
    }
    let reg = dols_regression(&y.values, &x.values(), leads, lags, start, end)?;
    let bw = newey_west_bandwidth(reg.rows);
    let lrv = long_run_variance(&reg.fit.residuals, bw)?;
    if !(lrv > 0.0) {
        return Err(Error::DegenerateFit);
    }
    // OLS residual variance uses T - k; the long-run variance divides by T
    let se: Vec<f64> = (0..=m).map(|i| (lrv * reg.fit.xtx_inv[(i, i)]).sqrt()).collect();
    let coef = constant_last(&reg.fit.coefficients, m);
    let se = constant_last(&se, m);
    Ok(LongRunEstimate {
        estimator: Estimator::Dols,
        dependent: y.name.clone(),
        terms: make_terms(&term_names(x), &coef, &se, reg.rows - k)?,
        effective_t: reg.rows,
        tuning: Tuning { leads: Some(leads), lags: Some(lags), kernel: Kernel::Bartlett, bandwidth: Some(bw) },
        warnings: vec![],
        regression: Some(RegressionData { y: reg.y, x: reg.x, residuals: reg.fit.residuals }),
    })
}

/// DOLS with `leads = lags = p`, `p` chosen by BIC over `0..=max` on the
/// sample trimmed for `max`.
pub fn dols_select_bic(y: &TimeSeries, x: &Dataset, max: usize) -> Result<LongRunEstimate> {
    check_alignment(y, x)?;
    let t = y.len();
    let (start, end) = dols_sample(t, max.max(1), max.max(1));
    let mut best: Option<(usize, f64)> = None;
    for p in 0..=max {
        let Ok(reg) = dols_regression(&y.values, &x.values(), p, p, start, end) else { continue };
        let bic = information_criteria(reg.fit.ssr, reg.rows, reg.fit.k)?.bic;
        if best.is_none_or(|(_, b)| bic < b) {
            best = Some((p, bic));
        }
    }
    let p = best.ok_or_else(|| Error::InsufficientSample("no DOLS candidate could be estimated".into()))?.0;
    dols(y, x, p, p)
}

/// Fully modified OLS with a Bartlett kernel. `bandwidth = None` applies
/// the Newey-West rule to the `T - 1` usable observations.
pub fn fmols(y: &TimeSeries, x: &Dataset, kernel: Kernel, bandwidth: Option<usize>) -> Result<LongRunEstimate> {
    check_alignment(y, x)?;
    let t = y.len();
    let m = x.columns.len();
    if t < m + 4 {
        return Err(Error::InsufficientSample(format!("{t} observations for {} FMOLS parameters", m + 1)));
    }
    let n = t - 1;
    let xv = x.values();
    // the first observation is lost to differencing
    let mut cols = vec![vec![1.0; n]];
    for c in &xv {
        cols.push(c[1..].to_vec());
    }
    let z = matrix_from_columns(&cols)?;
    let yy = y.values[1..].to_vec();
    let stage1 = ols_fit(&yy, &z)?;

    let dx: Vec<Vec<f64>> = xv.iter().map(|c| c.windows(2).map(|w| w[1] - w[0]).collect()).collect();
    let w = Matrix::from_fn(n, m + 1, |i, j| if j == 0 { stage1.residuals[i] } else { dx[j - 1][i] });
    let bw = bandwidth.unwrap_or_else(|| newey_west_bandwidth(n));
    let lr = long_run_covariance(&w, kernel, bw)?;
    let omega22 = lr.omega.view((1, 1), (m, m)).into_owned();
    let omega12 = lr.omega.view((0, 1), (1, m)).into_owned();
    let lambda12 = lr.lambda_one_sided.view((0, 1), (1, m)).into_owned();
    let lambda22 = lr.lambda_one_sided.view((1, 1), (m, m)).into_owned();
    let chol = omega22.clone().cholesky().ok_or(Error::NotPositiveDefinite)?;
    let omega22_inv = chol.inverse();

    let mut warnings = Vec::new();
    let sv = omega22.singular_values();
    let cond = sv.max() / sv.min();
    if !(cond < FMOLS_CONDITION_WARNING) {
        warnings.push(format!(
            "long-run covariance of the regressor differences is ill-conditioned (condition number {cond:.3e}); \
             regressors may be cointegrated among themselves"
        ));
    }

    let a = &omega12 * &omega22_inv; // 1 x m
    let y_plus: Vec<f64> = (0..n).map(|i| yy[i] - (0..m).map(|j| a[(0, j)] * dx[j][i]).sum::<f64>()).collect();
    let lambda_plus = &lambda12 - &a * &lambda22;
    let zty = z.transpose() * nalgebra::DVector::from_column_slice(&y_plus);
    let mut rhs = zty;
    for j in 0..m {
        rhs[1 + j] -= n as f64 * lambda_plus[(0, j)];
    }
    let beta = &stage1.xtx_inv * rhs;
    let omega_1_2 = lr.omega[(0, 0)] - (&a * omega12.transpose())[(0, 0)];
    if !(omega_1_2 > 0.0) {
        return Err(Error::NotPositiveDefinite);
    }
    let se: Vec<f64> = (0..=m).map(|i| (omega_1_2 * stage1.xtx_inv[(i, i)]).sqrt()).collect();
    let coef: Vec<f64> = beta.iter().copied().collect();
    Ok(LongRunEstimate {
        estimator: Estimator::Fmols,
        dependent: y.name.clone(),
        terms: make_terms(&term_names(x), &constant_last(&coef, m), &constant_last(&se, m), n - m - 1)?,
        effective_t: n,
        tuning: Tuning { leads: None, lags: None, kernel, bandwidth: Some(bw) },
        warnings,
        regression: Some(RegressionData { y: yy, x: z, residuals: stage1.residuals }),
    })
}
