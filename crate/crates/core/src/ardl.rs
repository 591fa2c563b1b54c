//! Autoregressive distributed lag models: estimation, lag search, the
//! bounds test for a level relationship, the error-correction form and
//! long-run coefficients.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::longrun::{make_terms, Estimator, LongRunEstimate, RegressionData, Term, Tuning};
use crate::numerics::{information_criteria, matrix_from_columns, ols_fit, Matrix, OlsFit};
use crate::timeseries::{Dataset, TimeSeries};

/// Own-lag sums closer to one than this have no long-run solution.
pub const UNIT_ROOT_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct ArdlFit {
    pub dependent: String,
    pub regressors: Vec<String>,
    pub p: usize,
    pub q: Vec<usize>,
    /// 0-based index of the first observation used.
    pub start: usize,
    pub levels_fit: OlsFit,
    /// Column names in design order.
    pub variable_layout: Vec<String>,
    pub y: Vec<f64>,
    pub x: Vec<Vec<f64>>,
    pub design: Matrix,
}

impl ArdlFit {
    pub fn effective_t(&self) -> usize {
        self.levels_fit.t
    }

    /// Coefficient on `y_{t-i}`, `i >= 1`.
    pub fn own_lag(&self, i: usize) -> f64 {
        self.levels_fit.coefficients[i]
    }

    /// Coefficient on `x_{j,t-l}`.
    pub fn distributed_lag(&self, j: usize, l: usize) -> f64 {
        self.levels_fit.coefficients[self.column_of(j, l)]
    }

    fn column_of(&self, j: usize, l: usize) -> usize {
        1 + self.p + self.q[..j].iter().map(|q| q + 1).sum::<usize>() + l
    }

    pub fn order_label(&self) -> String {
        let q: Vec<String> = self.q.iter().map(|v| v.to_string()).collect();
        format!("ARDL({}, {})", self.p, q.join(", "))
    }

    pub fn terms(&self) -> Result<Vec<Term>> {
        let f = &self.levels_fit;
        make_terms(&self.variable_layout, &f.coefficients, &f.std_errors(), f.t - f.k)
    }
}

fn validate(y: &TimeSeries, x: &Dataset, p: usize, q: &[usize]) -> Result<()> {
    if p == 0 {
        return Err(Error::InvalidArgument("the dependent lag order p must be at least 1".into()));
    }
    if x.columns.is_empty() {
        return Err(Error::InvalidArgument("at least one regressor is required".into()));
    }
    if q.len() != x.columns.len() {
        return Err(Error::DimensionMismatch(format!("{} lag orders for {} regressors", q.len(), x.columns.len())));
    }
    if x.len() != y.len() || x.start_year != y.start_year {
        return Err(Error::AlignmentMismatch(format!("`{}` and the regressors cover different years", y.name)));
    }
    Ok(())
}

fn max_order(p: usize, q: &[usize]) -> usize {
    q.iter().copied().fold(p, usize::max)
}

fn fit_on(y: &TimeSeries, x: &Dataset, p: usize, q: &[usize], start: usize) -> Result<ArdlFit> {
    let t = y.len();
    let params = 1 + p + q.iter().map(|v| v + 1).sum::<usize>();
    if start >= t || t - start <= params {
        return Err(Error::InsufficientSample(format!(
            "{} usable observations for {params} ARDL parameters",
            t.saturating_sub(start)
        )));
    }
    let rows = start..t;
    let yv = &y.values;
    let xv = x.values();
    let mut cols = vec![vec![1.0; t - start]];
    let mut layout = vec!["C".to_string()];
    for i in 1..=p {
        cols.push(rows.clone().map(|r| yv[r - i]).collect());
        layout.push(format!("{}(-{i})", y.name));
    }
    for (j, c) in xv.iter().enumerate() {
        for l in 0..=q[j] {
            cols.push(rows.clone().map(|r| c[r - l]).collect());
            let name = &x.columns[j].name;
            layout.push(if l == 0 { name.clone() } else { format!("{name}(-{l})") });
        }
    }
    let design = matrix_from_columns(&cols)?;
    let dep: Vec<f64> = rows.map(|r| yv[r]).collect();
    let levels_fit = ols_fit(&dep, &design)?;
    Ok(ArdlFit {
        dependent: y.name.clone(),
        regressors: x.names().into_iter().map(String::from).collect(),
        p,
        q: q.to_vec(),
        start,
        levels_fit,
        variable_layout: layout,
        y: yv.clone(),
        x: xv,
        design,
    })
}

/// Levels ARDL(p, q_1, ..., q_k) with a constant, on the maximal sample.
pub fn ardl_fit(y: &TimeSeries, x: &Dataset, p: usize, q: &[usize]) -> Result<ArdlFit> {
    validate(y, x, p, q)?;
    fit_on(y, x, p, q, max_order(p, q))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    #[default]
    Aic,
    Bic,
}

/// Every `(p, q)` in the search grid, in lexicographic order.
pub fn ardl_candidates(k: usize, p_max: usize, q_max: usize) -> Vec<(usize, Vec<usize>)> {
    let mut qs: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..k {
        qs = qs.into_iter().flat_map(|q| (0..=q_max).map(move |v| {
            let mut n = q.clone();
            n.push(v);
            n
        })).collect();
    }
    (1..=p_max).flat_map(|p| qs.iter().map(move |q| (p, q.clone()))).collect()
}

/// Exhaustive lag search. Candidates are compared on the sample left after
/// `max(p_max, q_max)` lags; the winner is refit on its own sample. Ties go
/// to the lexicographically smallest order.
pub fn ardl_select(y: &TimeSeries, x: &Dataset, p_max: usize, q_max: usize, criterion: Criterion) -> Result<ArdlFit> {
    let k = x.columns.len();
    validate(y, x, p_max, &vec![q_max; k])?;
    let start = p_max.max(q_max);
    let grid = ardl_candidates(k, p_max, q_max);
    let scores: Vec<Option<f64>> = grid
        .par_iter()
        .map(|(p, q)| {
            let f = fit_on(y, x, *p, q, start).ok()?;
            let ic = information_criteria(f.levels_fit.ssr, f.levels_fit.t, f.levels_fit.k).ok()?;
            Some(match criterion {
                Criterion::Aic => ic.aic,
                Criterion::Bic => ic.bic,
            })
        })
        .collect();
    let mut best: Option<(usize, f64)> = None;
    for (i, s) in scores.iter().enumerate() {
        if let Some(s) = *s {
            if best.is_none_or(|(_, b)| s < b) {
                best = Some((i, s));
            }
        }
    }
    let (i, _) = best.ok_or_else(|| Error::InsufficientSample("no ARDL candidate could be estimated".into()))?;
    let (p, q) = &grid[i];
    fit_on(y, x, *p, q, max_order(*p, q))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundsVerdict {
    Cointegrated,
    NotCointegrated,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundsTable {
    pub pct10: Bounds,
    pub pct5: Bounds,
    pub pct1: Bounds,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsDecision {
    pub f_statistic: f64,
    pub k: usize,
    pub lower_bound_5pct: f64,
    pub upper_bound_5pct: f64,
    pub table: BoundsTable,
    pub verdict: BoundsVerdict,
}

/// Asymptotic F bounds, unrestricted intercept and no trend, `k = 1..=6`.
const PSS_CASE_III: [[(f64, f64); 3]; 6] = [
    [(4.04, 4.78), (4.94, 5.73), (6.84, 7.84)],
    [(3.17, 4.14), (3.79, 4.85), (5.15, 6.36)],
    [(2.72, 3.77), (3.23, 4.35), (4.29, 5.61)],
    [(2.45, 3.52), (2.86, 4.01), (3.74, 5.06)],
    [(2.26, 3.35), (2.62, 3.79), (3.41, 4.68)],
    [(2.12, 3.23), (2.45, 3.61), (3.15, 4.43)],
];

pub fn bounds_critical_values(k: usize) -> Option<BoundsTable> {
    let row = PSS_CASE_III.get(k.checked_sub(1)?)?;
    let b = |(lower, upper): (f64, f64)| Bounds { lower, upper };
    Some(BoundsTable { pct10: b(row[0]), pct5: b(row[1]), pct1: b(row[2]) })
}

pub fn bounds_verdict(f: f64, b: Bounds) -> BoundsVerdict {
    if f > b.upper {
        BoundsVerdict::Cointegrated
    } else if f < b.lower {
        BoundsVerdict::NotCointegrated
    } else {
        BoundsVerdict::Inconclusive
    }
}

/// Conditional error-correction regression on the fit's sample. Returns the
/// fit, the column names and the indices of the lagged level terms.
fn uecm(fit: &ArdlFit) -> Result<(OlsFit, Vec<String>, Vec<usize>, Vec<f64>, Matrix)> {
    let t = fit.y.len();
    let rows = fit.start..t;
    let y = &fit.y;
    let dy = |i: usize| y[i] - y[i - 1];
    let mut cols = vec![vec![1.0; t - fit.start]];
    let mut names = vec!["C".to_string()];
    cols.push(rows.clone().map(|r| y[r - 1]).collect());
    names.push(format!("{}(-1)", fit.dependent));
    for (j, c) in fit.x.iter().enumerate() {
        let lagged = fit.q[j] >= 1;
        cols.push(rows.clone().map(|r| if lagged { c[r - 1] } else { c[r] }).collect());
        names.push(if lagged { format!("{}(-1)", fit.regressors[j]) } else { fit.regressors[j].clone() });
    }
    let levels: Vec<usize> = (1..=1 + fit.x.len()).collect();
    for i in 1..fit.p {
        cols.push(rows.clone().map(|r| dy(r - i)).collect());
        names.push(format!("D({}(-{i}))", fit.dependent));
    }
    for (j, c) in fit.x.iter().enumerate() {
        for l in 0..fit.q[j] {
            cols.push(rows.clone().map(|r| c[r - l] - c[r - l - 1]).collect());
            let n = &fit.regressors[j];
            names.push(if l == 0 { format!("D({n})") } else { format!("D({n}(-{l}))") });
        }
    }
    let dep: Vec<f64> = rows.map(dy).collect();
    let x = matrix_from_columns(&cols)?;
    Ok((ols_fit(&dep, &x)?, names, levels, dep, x))
}

/// Wald F test that every lagged level coefficient is zero in the
/// conditional error-correction form.
pub fn bounds_test(fit: &ArdlFit) -> Result<BoundsDecision> {
    let k = fit.x.len();
    let table = bounds_critical_values(k)
        .ok_or_else(|| Error::InvalidArgument(format!("bounds are tabulated for 1..=6 regressors, got {k}")))?;
    let (unrestricted, _, levels, dep, x) = uecm(fit)?;
    let keep: Vec<usize> = (0..x.ncols()).filter(|c| !levels.contains(c)).collect();
    let xr = x.select_columns(&keep);
    let restricted = ols_fit(&dep, &xr)?;
    let n = unrestricted.t as f64;
    let df = n - unrestricted.k as f64;
    if df <= 0.0 {
        return Err(Error::InsufficientSample("no residual degrees of freedom in the bounds regression".into()));
    }
    if !(unrestricted.ssr > 0.0) {
        return Err(Error::DegenerateFit);
    }
    let f = ((restricted.ssr - unrestricted.ssr) / levels.len() as f64) / (unrestricted.ssr / df);
    Ok(BoundsDecision {
        f_statistic: f,
        k,
        lower_bound_5pct: table.pct5.lower,
        upper_bound_5pct: table.pct5.upper,
        verdict: bounds_verdict(f, table.pct5),
        table,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EcmForm {
    /// Constant and differenced terms, with inference from the
    /// conditional error-correction regression.
    pub short_run: Vec<Term>,
    /// Coefficient on the lagged equilibrium error, `-(1 - sum of own lags)`.
    pub adjustment: Term,
    /// Long-run coefficients; empty when the own lags sum to one.
    pub long_run: Vec<(String, f64)>,
    /// Fitted `Δy_t` of the error-correction form.
    pub fitted_differences: Vec<f64>,
}

impl EcmForm {
    pub fn short_run_term(&self, name: &str) -> Option<&Term> {
        self.short_run.iter().find(|t| t.name == name)
    }
}

/// Exact rearrangement of the levels ARDL into
/// `Δy_t = c + φ (y_{t-1} - θ'x_{t-1}) + Σ γ_i Δy_{t-i} + Σ δ_{j,l} Δx_{j,t-l}`.
pub fn ecm_reparameterize(fit: &ArdlFit) -> Result<EcmForm> {
    let b = &fit.levels_fit.coefficients;
    let p = fit.p;
    let a_sum: f64 = (1..=p).map(|i| fit.own_lag(i)).sum();
    let phi = a_sum - 1.0;
    let b_sum: Vec<f64> = (0..fit.x.len()).map(|j| (0..=fit.q[j]).map(|l| fit.distributed_lag(j, l)).sum()).collect();
    let gamma: Vec<f64> = (1..p).map(|i| -((i + 1)..=p).map(|m| fit.own_lag(m)).sum::<f64>()).collect();
    let delta: Vec<Vec<f64>> = (0..fit.x.len())
        .map(|j| {
            let qj = fit.q[j];
            let mut d = vec![fit.distributed_lag(j, 0)];
            d.extend((1..qj).map(|l| -((l + 1)..=qj).map(|m| fit.distributed_lag(j, m)).sum::<f64>()));
            d
        })
        .collect();

    // fitted Δy_t from the rearranged coefficients
    let t = fit.y.len();
    let y = &fit.y;
    let fitted_differences: Vec<f64> = (fit.start..t)
        .map(|r| {
            let mut v = b[0] + phi * y[r - 1];
            for (j, c) in fit.x.iter().enumerate() {
                v += b_sum[j] * c[r - 1];
                for (l, d) in delta[j].iter().enumerate() {
                    v += d * (c[r - l] - c[r - l - 1]);
                }
            }
            for (i, g) in gamma.iter().enumerate() {
                v += g * (y[r - i - 1] - y[r - i - 2]);
            }
            v
        })
        .collect();

    // inference from the conditional ECM regression, which shares every
    // short-run parameter (a `q = 0` level term carries the Δx_t coefficient)
    let (u, names, _, _, _) = uecm(fit)?;
    let se = u.std_errors();
    let df = u.t - u.k;
    let uecm_terms = make_terms(&names, &u.coefficients, &se, df)?;
    let mut short_run = vec![uecm_terms[0].clone()];
    for (j, n) in fit.regressors.iter().enumerate() {
        if fit.q[j] == 0 {
            let mut term = uecm_terms[2 + j].clone();
            term.name = format!("D({n})");
            short_run.push(term);
        }
    }
    short_run.extend(uecm_terms[2 + fit.x.len()..].iter().cloned());
    let mut adjustment = uecm_terms[1].clone();
    adjustment.name = "ECT(-1)".into();

    let long_run = if phi.abs() > UNIT_ROOT_TOLERANCE {
        fit.regressors.iter().zip(&b_sum).map(|(n, s)| (n.clone(), -s / phi)).collect()
    } else {
        vec![]
    };
    Ok(EcmForm { short_run, adjustment, long_run, fitted_differences })
}

/// Long-run coefficients `θ_j = B_j / (1 - A)` and `C = c / (1 - A)` with
/// delta-method standard errors.
pub fn ardl_longrun(fit: &ArdlFit) -> Result<LongRunEstimate> {
    let k = fit.levels_fit.k;
    let a_sum: f64 = (1..=fit.p).map(|i| fit.own_lag(i)).sum();
    let denom = 1.0 - a_sum;
    if denom.abs() <= UNIT_ROOT_TOLERANCE {
        return Err(Error::UnitRootDenominator(denom));
    }
    let v = &fit.levels_fit.coef_covariance;
    let mut names = Vec::new();
    let mut coef = Vec::new();
    let mut se = Vec::new();
    let mut push = |name: String, numerator: f64, own: Vec<usize>| {
        let mut g = nalgebra::DVector::<f64>::zeros(k);
        for c in own {
            g[c] = 1.0 / denom;
        }
        for i in 1..=fit.p {
            g[i] = numerator / (denom * denom);
        }
        names.push(name);
        coef.push(numerator / denom);
        se.push((g.transpose() * v * &g)[(0, 0)].max(0.0).sqrt());
    };
    for (j, n) in fit.regressors.iter().enumerate() {
        let cols: Vec<usize> = (0..=fit.q[j]).map(|l| fit.column_of(j, l)).collect();
        let b: f64 = cols.iter().map(|&c| fit.levels_fit.coefficients[c]).sum();
        push(n.clone(), b, cols);
    }
    push("C".into(), fit.levels_fit.coefficients[0], vec![0]);
    let f = &fit.levels_fit;
    Ok(LongRunEstimate {
        estimator: Estimator::Ardl,
        dependent: fit.dependent.clone(),
        terms: make_terms(&names, &coef, &se, f.t - f.k)?,
        effective_t: f.t,
        tuning: Tuning { leads: None, lags: Some(fit.p), kernel: Default::default(), bandwidth: None },
        warnings: vec![],
        regression: Some(RegressionData {
            y: fit.y[fit.start..].to_vec(),
            x: fit.design.clone(),
            residuals: f.residuals.clone(),
        }),
    })
}
