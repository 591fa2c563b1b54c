use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::adf::{check_length, degenerate, resolve_max_lag, select_lag, LagFit};
use super::{ls_critical_values, AdfSpec, BreakTestReport, Candidate, TestKind};
use crate::breaks::{break_pairs, single_breaks};
use crate::error::{Error, Result};
use crate::numerics::{matrix_from_columns, ols_fit, OlsFit};
use crate::timeseries::{level_dummy, trend_dummy, BreakModel, TimeSeries};

/// Lee-Strazicich specifications: level shifts (crash) or level and trend shifts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LsModel {
    A,
    C,
}

impl From<LsModel> for BreakModel {
    fn from(m: LsModel) -> Self {
        match m {
            LsModel::A => BreakModel::A,
            LsModel::C => BreakModel::C,
        }
    }
}

struct LmRegression {
    fit: OlsFit,
    level_index: usize,
    lag: usize,
    nobs: usize,
}

impl LagFit for LmRegression {
    fn last_lag_t(&self) -> Option<f64> {
        (self.lag > 0).then(|| self.fit.t_stat(self.fit.k - 1))
    }
    fn fit_size(&self) -> (f64, usize, usize) {
        (self.fit.ssr, self.nobs, self.fit.k)
    }
}

/// Detrended series `S_t = y_t - psi - Z_t delta` with `delta` estimated
/// from the regression in first differences. Also returns the columns of
/// `ΔZ_t` (index 0 is observation 1, which has no difference).
fn lm_detrend(y: &[f64], model: LsModel, breaks: &[usize]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let t = y.len();
    let mut z: Vec<Vec<f64>> = vec![(1..=t).map(|i| i as f64).collect()];
    let mut dz: Vec<Vec<f64>> = vec![vec![1.0; t]];
    for &tb in breaks {
        if tb < 1 || tb >= t {
            return Err(Error::BreakOutOfRange { tb, t });
        }
        z.push(level_dummy(t, tb));
        dz.push((1..=t).map(|i| if i == tb + 1 { 1.0 } else { 0.0 }).collect());
    }
    if model == LsModel::C {
        for &tb in breaks {
            z.push(trend_dummy(t, tb));
            dz.push(level_dummy(t, tb));
        }
    }
    let dy: Vec<f64> = y.windows(2).map(|w| w[1] - w[0]).collect();
    let x = matrix_from_columns(&dz.iter().map(|c| c[1..].to_vec()).collect::<Vec<_>>())?;
    let delta = ols_fit(&dy, &x)?.coefficients;
    let zd = |i: usize| z.iter().zip(&delta).map(|(c, d)| c[i] * d).sum::<f64>();
    let psi = y[0] - zd(0);
    let s: Vec<f64> = (0..t).map(|i| y[i] - psi - zd(i)).collect();
    Ok((s, dz))
}

fn lm_regression(y: &[f64], s: &[f64], dz: &[Vec<f64>], lag: usize, trim_lag: usize) -> Result<LmRegression> {
    let t = y.len();
    // 0-based rows i with Δy_i = y_i - y_{i-1}; ΔS_{i-j} needs i - j >= 1
    let start = 1 + trim_lag;
    if start >= t {
        return Err(Error::SeriesTooShort { needed: start + 1, have: t });
    }
    let rows = start..t;
    let mut cols: Vec<Vec<f64>> = dz
        .iter()
        .map(|c| rows.clone().map(|i| c[i]).collect::<Vec<f64>>())
        .filter(|c: &Vec<f64>| c.iter().any(|v| *v != 0.0))
        .collect();
    let level_index = cols.len();
    cols.push(rows.clone().map(|i| s[i - 1]).collect());
    for j in 1..=lag {
        cols.push(rows.clone().map(|i| s[i - j] - s[i - j - 1]).collect());
    }
    let dep: Vec<f64> = rows.map(|i| y[i] - y[i - 1]).collect();
    let fit = ols_fit(&dep, &matrix_from_columns(&cols)?)?;
    if !(fit.sigma2 > 0.0) {
        return Err(Error::DegenerateRegression("zero residual variance".into()));
    }
    Ok(LmRegression { nobs: dep.len(), fit, level_index, lag })
}

/// LM t-statistic for a fixed set of breaks, with the selected lag.
pub fn ls_statistic_at(y: &[f64], model: LsModel, breaks: &[usize], spec: &AdfSpec) -> Result<(f64, usize)> {
    let t = y.len();
    let kmax = resolve_max_lag(spec, t)?;
    check_length(t, kmax)?;
    let (s, dz) = lm_detrend(y, model, breaks)?;
    let reg = select_lag(kmax, spec.lag_rule, |k, trim| lm_regression(y, &s, &dz, k, trim))?;
    Ok((reg.fit.t_stat(reg.level_index), reg.lag))
}

/// Lee-Strazicich minimum LM test with one or two endogenous breaks.
pub fn ls_test(y: &TimeSeries, model: LsModel, n_breaks: usize, trim: f64, spec: &AdfSpec) -> Result<BreakTestReport> {
    let t = y.len();
    let combos: Vec<Vec<usize>> = match n_breaks {
        1 => single_breaks(t, trim)?.into_iter().map(|b| vec![b]).collect(),
        2 => break_pairs(t, trim)?.into_iter().map(|(a, b)| vec![a, b]).collect(),
        n => return Err(Error::InvalidArgument(format!("LS test supports 1 or 2 breaks, got {n}"))),
    };
    let kmax = resolve_max_lag(spec, t)?;
    check_length(t, kmax)?;
    let evaluated: Vec<Result<Candidate>> = combos
        .into_par_iter()
        .map(|breaks| {
            ls_statistic_at(&y.values, model, &breaks, spec).map(|(statistic, lag)| Candidate { breaks, statistic, lag })
        })
        .collect();
    let mut profile = Vec::with_capacity(evaluated.len());
    for c in evaluated {
        match c {
            Ok(c) => profile.push(c),
            Err(Error::RankDeficient { .. }) => {}
            Err(e) => return Err(degenerate(e)),
        }
    }
    BreakTestReport::from_profile(TestKind::Ls, Some(model.into()), y, profile, ls_critical_values(model, n_breaks))
}

/// Minimum two-break crash-model LM statistic without lag augmentation,
/// evaluated in O(1) per pair from cumulative sums.
///
/// With impulse dummies at `a = tb1+1` and `b = tb2+1`, the LM regression
/// is a simple regression of `Δy_t` on `S_{t-1}` over the differenced
/// sample with `a` and `b` removed, where
/// `S_{t-1} = u_t - g v_t - c1 1{t > a} - c2 1{t > b}`,
/// `u_t = y_{t-1} - y_1`, `v_t = t - 2`, `g` is the mean difference
/// outside the impulses and `c_j = Δy_{a_j} - g`.
pub(crate) fn ls_model_a_two_break_min_lag0(y: &[f64], trim: f64) -> Result<f64> {
    let t = y.len();
    let pairs = break_pairs(t, trim)?;
    // 1-based t in 2..=T stored at index t
    const ONE: usize = 0;
    const U: usize = 1;
    const V: usize = 2;
    const D: usize = 3;
    const UU: usize = 4;
    const VV: usize = 5;
    const UV: usize = 6;
    const UD: usize = 7;
    const VD: usize = 8;
    const DD: usize = 9;
    let val = |s: usize| -> [f64; 10] {
        let u = y[s - 2] - y[0];
        let v = s as f64 - 2.0;
        let d = y[s - 1] - y[s - 2];
        [1.0, u, v, d, u * u, v * v, u * v, u * d, v * d, d * d]
    };
    let mut pre = vec![[0.0f64; 10]; t + 1];
    for s in 2..=t {
        let x = val(s);
        for k in 0..10 {
            pre[s][k] = pre[s - 1][k] + x[k];
        }
    }
    let full = |k: usize| pre[t][k];
    let from = |k: usize, lo: usize| if lo > t { 0.0 } else { pre[t][k] - pre[lo - 1][k] };

    let n = (t - 1) as f64;
    let m = n - 2.0;
    let mut best = f64::INFINITY;
    for (tb1, tb2) in pairs {
        let (a, b) = (tb1 + 1, tb2 + 1);
        let (xa, xb) = (val(a), val(b));
        let g = (full(D) - xa[D] - xb[D]) / (n - 2.0);
        let c1 = xa[D] - g;
        let c2 = xb[D] - g;
        let su = |k: usize| full(k) - xa[k] - xb[k];
        let r1 = |k: usize| from(k, a + 1) - xb[k];
        let r2 = |k: usize| from(k, b + 1);
        let n1 = (t - a - 1) as f64;
        let n2 = (t - b) as f64;

        let sx = su(U) - g * su(V) - c1 * n1 - c2 * n2;
        let sxx = su(UU) + g * g * su(VV) + c1 * c1 * n1 + c2 * c2 * n2 - 2.0 * g * su(UV) - 2.0 * c1 * r1(U)
            - 2.0 * c2 * r2(U)
            + 2.0 * g * c1 * r1(V)
            + 2.0 * g * c2 * r2(V)
            + 2.0 * c1 * c2 * n2;
        let sxd = su(UD) - g * su(VD) - c1 * r1(D) - c2 * r2(D);
        let sd = su(D);
        let sdd = su(DD);
        debug_assert!((su(ONE) - m).abs() < 1e-9);

        let sxx_c = sxx - sx * sx / m;
        let sxd_c = sxd - sx * sd / m;
        let sdd_c = sdd - sd * sd / m;
        let phi = sxd_c / sxx_c;
        let ssr = sdd_c - sxd_c * phi;
        let sigma2 = ssr / (n - 4.0);
        let stat = phi / (sigma2 / sxx_c).sqrt();
        if stat < best {
            best = stat;
        }
    }
    Ok(best)
}
