use super::{AdfSpec, BreakTestReport, Candidate, CriticalValues, Deterministic, LagRule, TestKind};
use crate::error::{Error, Result};
use crate::numerics::{information_criteria, matrix_from_columns, ols_fit, OlsFit};
use crate::timeseries::TimeSeries;

/// Two-sided 10% normal quantile used by the general-to-specific rule.
const T_SIG_10: f64 = 1.645;

/// Minimum usable observations once lags are accounted for.
pub const MIN_ADF_OBS: usize = 15;

#[derive(Debug, Clone)]
pub struct AdfRegression {
    pub fit: OlsFit,
    /// Column of the tested coefficient (lagged level).
    pub level_index: usize,
    pub lag: usize,
    pub nobs: usize,
}

impl AdfRegression {
    pub fn statistic(&self) -> f64 {
        self.fit.t_stat(self.level_index)
    }

    /// t-ratio of the longest lagged difference, if any.
    pub fn last_lag_t(&self) -> Option<f64> {
        (self.lag > 0).then(|| self.fit.t_stat(self.fit.k - 1))
    }
}

/// `floor(12 (T/100)^(1/4))`, kept below `T/3`.
pub fn default_max_lag(t: usize) -> usize {
    let rule = (12.0 * (t as f64 / 100.0).powf(0.25)).floor() as usize;
    let cap = (t as f64 / 3.0).ceil() as usize - 1;
    rule.min(cap)
}

pub(crate) fn resolve_max_lag(spec: &AdfSpec, t: usize) -> Result<usize> {
    let kmax = match (spec.lag_rule, spec.max_lag) {
        (LagRule::Fixed(k), _) => k,
        (_, Some(k)) => k,
        (_, None) => default_max_lag(t),
    };
    if kmax as f64 >= t as f64 / 3.0 {
        return Err(Error::InvalidArgument(format!("max lag {kmax} must be below T/3 = {:.1}", t as f64 / 3.0)));
    }
    Ok(kmax)
}

/// Dickey-Fuller regression of `Δy_t` for `t >= start` (0-based) on the
/// deterministic terms, the `extra` columns, `y_{t-1}` and `lag` lagged
/// differences. Extra columns are full-length and indexed like `y`.
pub fn adf_regression(
    y: &[f64],
    deterministic: Deterministic,
    lag: usize,
    extra: &[Vec<f64>],
    start: usize,
) -> Result<AdfRegression> {
    let t = y.len();
    if start < 1 + lag || start >= t {
        return Err(Error::InvalidArgument(format!("sample start {start} incompatible with lag {lag}")));
    }
    let rows = start..t;
    let dy = |i: usize| y[i] - y[i - 1];
    let mut cols: Vec<Vec<f64>> = Vec::new();
    match deterministic {
        Deterministic::None => {}
        Deterministic::Constant => cols.push(vec![1.0; t - start]),
        Deterministic::ConstantTrend => {
            cols.push(vec![1.0; t - start]);
            cols.push(rows.clone().map(|i| (i + 1) as f64).collect());
        }
    }
    for e in extra {
        cols.push(rows.clone().map(|i| e[i]).collect());
    }
    let level_index = cols.len();
    cols.push(rows.clone().map(|i| y[i - 1]).collect());
    for j in 1..=lag {
        cols.push(rows.clone().map(|i| dy(i - j)).collect());
    }
    let dep: Vec<f64> = rows.map(dy).collect();
    let x = matrix_from_columns(&cols)?;
    let fit = ols_fit(&dep, &x)?;
    if !(fit.sigma2 > 0.0) {
        return Err(Error::DegenerateRegression("zero residual variance".into()));
    }
    Ok(AdfRegression { nobs: dep.len(), fit, level_index, lag })
}

/// Lag selection shared by every Dickey-Fuller style regression.
///
/// `fit(lag, trim_lag)` must estimate with `lag` lagged differences on the
/// sample that would be available with `trim_lag` lags. Selection compares
/// candidates on the `kmax`-trimmed sample; the winner is re-estimated on
/// its own maximal sample.
pub fn select_lag<R, F>(kmax: usize, rule: LagRule, fit: F) -> Result<R>
where
    F: Fn(usize, usize) -> Result<R>,
    R: LagFit,
{
    match rule {
        LagRule::Fixed(k) => fit(k, k),
        LagRule::TSig10Pct => {
            for k in (1..=kmax).rev() {
                let r = fit(k, kmax)?;
                if r.last_lag_t().is_some_and(|t| t.abs() > T_SIG_10) {
                    return if k == kmax { Ok(r) } else { fit(k, k) };
                }
            }
            fit(0, 0)
        }
        LagRule::Aic => {
            let mut best: Option<(usize, f64)> = None;
            for k in 0..=kmax {
                let r = fit(k, kmax)?;
                let (ssr, n, p) = r.fit_size();
                let aic = information_criteria(ssr, n, p)?.aic;
                if best.is_none_or(|(_, b)| aic < b) {
                    best = Some((k, aic));
                }
            }
            let k = best.map(|b| b.0).unwrap_or(0);
            fit(k, k)
        }
    }
}

/// What lag selection needs to know about a candidate regression.
pub trait LagFit {
    fn last_lag_t(&self) -> Option<f64>;
    /// (ssr, observations, parameters)
    fn fit_size(&self) -> (f64, usize, usize);
}

impl LagFit for AdfRegression {
    fn last_lag_t(&self) -> Option<f64> {
        AdfRegression::last_lag_t(self)
    }
    fn fit_size(&self) -> (f64, usize, usize) {
        (self.fit.ssr, self.nobs, self.fit.k)
    }
}

pub(crate) fn check_length(t: usize, kmax: usize) -> Result<()> {
    if t < 2 + kmax || t - 1 - kmax < MIN_ADF_OBS {
        return Err(Error::SeriesTooShort { needed: MIN_ADF_OBS + 1 + kmax, have: t });
    }
    Ok(())
}

pub(crate) fn degenerate(e: Error) -> Error {
    match e {
        Error::RankDeficient { .. } => {
            Error::DegenerateRegression("series is collinear with the deterministic terms".into())
        }
        other => other,
    }
}

/// Augmented Dickey-Fuller t-test on the lagged level.
pub fn adf_test(y: &TimeSeries, spec: &AdfSpec) -> Result<BreakTestReport> {
    let t = y.len();
    let kmax = resolve_max_lag(spec, t)?;
    check_length(t, kmax)?;
    let reg = select_lag(kmax, spec.lag_rule, |k, trim| {
        adf_regression(&y.values, spec.deterministic, k, &[], 1 + trim)
    })
    .map_err(degenerate)?;
    let stat = reg.statistic();
    let cv = mackinnon_critical_values(spec.deterministic, reg.nobs);
    BreakTestReport::from_profile(
        TestKind::Adf,
        None,
        y,
        vec![Candidate { breaks: vec![], statistic: stat, lag: reg.lag }],
        cv,
    )
}

/// MacKinnon (2010) response surfaces for the single-series Dickey-Fuller
/// t-test: `b_inf + b1/T + b2/T^2 + b3/T^3`.
pub fn mackinnon_critical_values(det: Deterministic, nobs: usize) -> CriticalValues {
    let surf: [[f64; 4]; 3] = match det {
        Deterministic::None => [
            [-2.56574, -2.2358, -3.627, 0.0],
            [-1.94100, -0.2686, -3.365, 31.223],
            [-1.61682, 0.2656, -2.714, 25.364],
        ],
        Deterministic::Constant => [
            [-3.43035, -6.5393, -16.786, -79.433],
            [-2.86154, -2.8903, -4.234, -40.040],
            [-2.56677, -1.5384, -2.809, 0.0],
        ],
        Deterministic::ConstantTrend => [
            [-3.95877, -9.0531, -28.428, -134.155],
            [-3.41049, -4.3904, -9.036, -45.374],
            [-3.12705, -2.5856, -3.925, -22.380],
        ],
    };
    let n = nobs as f64;
    let eval = |b: [f64; 4]| b[0] + b[1] / n + b[2] / (n * n) + b[3] / (n * n * n);
    CriticalValues::new(eval(surf[0]), eval(surf[1]), eval(surf[2]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn ar1(phi: f64, t: usize, seed: u64) -> TimeSeries {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut y = vec![0.0; t];
        for i in 1..t {
            y[i] = phi * y[i - 1] + rng.sample::<f64, _>(StandardNormal);
        }
        TimeSeries::new("y", 1, y).unwrap()
    }

    #[test]
    fn linear_sequence_is_degenerate() {
        let y = TimeSeries::new("t", 1, (1..=40).map(|i| i as f64).collect()).unwrap();
        let spec = AdfSpec { deterministic: Deterministic::ConstantTrend, ..Default::default() };
        assert!(matches!(adf_test(&y, &spec), Err(Error::DegenerateRegression(_))));
    }

    #[test]
    fn too_short() {
        let y = ar1(0.5, 12, 1);
        assert!(matches!(adf_test(&y, &AdfSpec::fixed(Deterministic::Constant, 0)), Err(Error::SeriesTooShort { .. })));
    }

    #[test]
    fn max_lag_below_third() {
        let y = ar1(0.5, 30, 1);
        let spec = AdfSpec { max_lag: Some(10), ..Default::default() };
        assert!(matches!(adf_test(&y, &spec), Err(Error::InvalidArgument(_))));
        assert_eq!(default_max_lag(100), 12);
        assert_eq!(default_max_lag(43), 9);
    }

    #[test]
    fn df_statistic_by_hand() {
        // lag 0, constant: t = rho_hat / se, computed from centred sums.
        let y = ar1(0.7, 60, 9);
        let r = adf_regression(&y.values, Deterministic::Constant, 0, &[], 1).unwrap();
        let x: Vec<f64> = y.values[..59].to_vec();
        let d: Vec<f64> = y.values.windows(2).map(|w| w[1] - w[0]).collect();
        let n = 59.0;
        let (mx, md) = (x.iter().sum::<f64>() / n, d.iter().sum::<f64>() / n);
        let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
        let sxd: f64 = x.iter().zip(&d).map(|(a, b)| (a - mx) * (b - md)).sum();
        let sdd: f64 = d.iter().map(|v| (v - md).powi(2)).sum();
        let rho = sxd / sxx;
        let s2 = (sdd - rho * sxd) / (n - 2.0);
        let expect = rho / (s2 / sxx).sqrt();
        assert!((r.statistic() - expect).abs() < 1e-10);
    }

    #[test]
    fn fixed_lag_is_respected() {
        let y = ar1(0.3, 80, 2);
        let rep = adf_test(&y, &AdfSpec::fixed(Deterministic::Constant, 3)).unwrap();
        assert_eq!(rep.chosen_lag, 3);
        assert!(rep.is_consistent());
        assert!(rep.break_indices.is_empty());
    }

    #[test]
    fn aic_rule_picks_within_bounds() {
        let y = ar1(0.3, 120, 4);
        let spec = AdfSpec { deterministic: Deterministic::Constant, max_lag: Some(6), lag_rule: LagRule::Aic };
        let rep = adf_test(&y, &spec).unwrap();
        assert!(rep.chosen_lag <= 6);
    }

    #[test]
    fn mackinnon_asymptotic_values() {
        let cv = mackinnon_critical_values(Deterministic::Constant, 1_000_000_000);
        assert!((cv.pct5 + 2.86154).abs() < 1e-6);
        let cv = mackinnon_critical_values(Deterministic::Constant, 100);
        assert!(cv.pct1 < cv.pct5 && cv.pct5 < cv.pct10);
        assert!((cv.pct5 + 2.8906).abs() < 1e-3);
    }

    #[test]
    fn random_walk_and_stationary_separation() {
        let spec = AdfSpec::default();
        let mut rw_accept = 0;
        let mut ar_reject = 0;
        let reps = 200;
        for s in 0..reps {
            if !adf_test(&ar1(1.0, 200, 1000 + s), &spec).unwrap().reject_at.pct5 {
                rw_accept += 1;
            }
            if adf_test(&ar1(0.2, 200, 5000 + s), &spec).unwrap().reject_at.pct5 {
                ar_reject += 1;
            }
        }
        assert!(rw_accept as f64 >= 0.9 * reps as f64, "{rw_accept}");
        assert!(ar_reject as f64 >= 0.9 * reps as f64, "{ar_reject}");
    }
}
