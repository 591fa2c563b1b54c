use nalgebra::{Matrix4, Vector4};
use rayon::prelude::*;

use super::adf::{adf_regression, check_length, degenerate, resolve_max_lag, select_lag};
use super::{za_critical_values, AdfSpec, BreakTestReport, Candidate, Deterministic, TestKind};
use crate::breaks::single_breaks;
use crate::error::{Error, Result};
use crate::timeseries::{break_dummies, BreakModel, TimeSeries};

/// Dickey-Fuller t-statistic with the break dummies of `model` at `tb`.
/// Returns the statistic and the selected lag. The regression always
/// carries a constant and a linear trend.
pub fn za_statistic_at(y: &[f64], model: BreakModel, tb: usize, spec: &AdfSpec) -> Result<(f64, usize)> {
    let t = y.len();
    let kmax = resolve_max_lag(spec, t)?;
    check_length(t, kmax)?;
    let dummies = break_dummies(t, tb, model)?.columns();
    let reg = select_lag(kmax, spec.lag_rule, |k, trim| {
        adf_regression(y, Deterministic::ConstantTrend, k, &dummies, 1 + trim)
    })?;
    Ok((reg.statistic(), reg.lag))
}

/// Zivot-Andrews test: minimum break-augmented ADF statistic over every
/// admissible single break.
pub fn za_test(y: &TimeSeries, model: BreakModel, trim: f64, spec: &AdfSpec) -> Result<BreakTestReport> {
    let t = y.len();
    let candidates = single_breaks(t, trim)?;
    let kmax = resolve_max_lag(spec, t)?;
    check_length(t, kmax)?;
    let evaluated: Vec<Result<Candidate>> = candidates
        .par_iter()
        .map(|&tb| {
            za_statistic_at(&y.values, model, tb, spec).map(|(statistic, lag)| Candidate { breaks: vec![tb], statistic, lag })
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
    BreakTestReport::from_profile(TestKind::Za, Some(model), y, profile, za_critical_values(model))
}

/// Model A minimum statistic with no lag augmentation, computed from
/// cumulative sums instead of one regression per break. Used by the
/// critical-value simulator; agrees with [`za_statistic_at`] at lag 0.
pub(crate) fn za_model_a_min_lag0(y: &[f64], trim: f64) -> Result<f64> {
    let t = y.len();
    let candidates = single_breaks(t, trim)?;
    let n = (t - 1) as f64;
    // rows i = 1..t-1 (0-based): trend i+1 and y_{i-1}, both centred
    let tm = (2..=t).map(|v| v as f64).sum::<f64>() / n;
    let ym = y[..t - 1].iter().sum::<f64>() / n;
    let mut g = Matrix4::<f64>::zeros();
    let mut r = Vector4::<f64>::zeros();
    let mut sdd = 0.0;
    // suffix sums over i >= i0 of (1, trend, y_{i-1}, d_i)
    let mut suf = vec![[0.0f64; 4]; t + 1];
    for i in (1..t).rev() {
        let tr = (i + 1) as f64 - tm;
        let yl = y[i - 1] - ym;
        let d = y[i] - y[i - 1];
        let x = [1.0, tr, 0.0, yl];
        for a in [0, 1, 3] {
            for b in [0, 1, 3] {
                g[(a, b)] += x[a] * x[b];
            }
            r[a] += x[a] * d;
        }
        sdd += d * d;
        suf[i] = [suf[i + 1][0] + 1.0, suf[i + 1][1] + tr, suf[i + 1][2] + yl, suf[i + 1][3] + d];
    }
    let mut best = f64::INFINITY;
    for tb in candidates {
        // DU_i = 1 for 0-based rows i >= tb
        let s = suf[tb];
        let mut gm = g;
        gm[(2, 0)] = s[0];
        gm[(0, 2)] = s[0];
        gm[(2, 1)] = s[1];
        gm[(1, 2)] = s[1];
        gm[(2, 2)] = s[0];
        gm[(2, 3)] = s[2];
        gm[(3, 2)] = s[2];
        let mut rm = r;
        rm[2] = s[3];
        let Some(chol) = gm.cholesky() else { continue };
        let b = chol.solve(&rm);
        let inv = chol.inverse();
        let ssr = sdd - b.dot(&rm);
        let sigma2 = ssr / (n - 4.0);
        let stat = b[3] / (sigma2 * inv[(3, 3)]).sqrt();
        if stat < best {
            best = stat;
        }
    }
    Ok(best)
}
