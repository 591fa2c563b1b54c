//! Residual diagnostics and recursive-residual stability tests.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, FisherSnedecor};

use crate::error::{Error, Result};
use crate::numerics::{matrix_from_columns, ols_fit, Matrix, OlsFit};

/// 5% CUSUM band constant.
pub const CUSUM_BAND_5PCT: f64 = 0.948;
/// Asymptotic 5% Kolmogorov-Smirnov constant used for the CUSUMSQ band.
pub const CUSUMSQ_KS_5PCT: f64 = 1.358;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestStatistic {
    pub statistic: f64,
    pub p_value: f64,
    pub df: usize,
}

pub fn chi2_sf(x: f64, df: usize) -> f64 {
    if !(x > 0.0) {
        return 1.0;
    }
    ChiSquared::new(df as f64).map(|d| d.sf(x)).unwrap_or(f64::NAN).clamp(0.0, 1.0)
}

pub fn f_sf(x: f64, df1: usize, df2: usize) -> f64 {
    if !(x > 0.0) {
        return 1.0;
    }
    FisherSnedecor::new(df1 as f64, df2 as f64).map(|d| d.sf(x)).unwrap_or(f64::NAN).clamp(0.0, 1.0)
}

fn columns_of(x: &Matrix) -> Vec<Vec<f64>> {
    x.column_iter().map(|c| c.iter().copied().collect()).collect()
}

fn is_constant(c: &[f64]) -> bool {
    c.iter().all(|v| *v == c[0])
}

/// `1 - SSR/Σe²`: the share of `e` explained by the auxiliary design.
fn explained_share(e: &[f64], aux: &OlsFit) -> f64 {
    let tss: f64 = e.iter().map(|v| v * v).sum();
    if tss == 0.0 {
        return 0.0;
    }
    (1.0 - aux.ssr / tss).max(0.0)
}

/// Breusch-Godfrey LM test for serial correlation up to order `lags`.
/// Pre-sample lagged residuals are set to zero.
pub fn breusch_godfrey(fit: &OlsFit, x: &Matrix, lags: usize) -> Result<TestStatistic> {
    let u = &fit.residuals;
    let t = u.len();
    let k = x.ncols();
    if lags == 0 {
        return Err(Error::InvalidArgument("serial-correlation test needs at least one lag".into()));
    }
    if x.nrows() != t || t <= k + lags {
        return Err(Error::InsufficientSample(format!("{t} observations for {k} regressors and {lags} lags")));
    }
    let mut cols = columns_of(x);
    for j in 1..=lags {
        cols.push((0..t).map(|i| if i >= j { u[i - j] } else { 0.0 }).collect());
    }
    let aux = ols_fit(u, &matrix_from_columns(&cols)?)?;
    let lm = t as f64 * explained_share(u, &aux);
    Ok(TestStatistic { statistic: lm, p_value: chi2_sf(lm, lags), df: lags })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum HeteroskedasticityTest {
    #[default]
    BreuschPagan,
    White,
}

/// Studentized Breusch-Pagan (or White) LM test: `T R²` of the squared
/// residuals on the regressors (and, for White, their squares and cross products).
pub fn heteroskedasticity_test(fit: &OlsFit, x: &Matrix, variant: HeteroskedasticityTest) -> Result<TestStatistic> {
    let u2: Vec<f64> = fit.residuals.iter().map(|v| v * v).collect();
    let t = u2.len();
    let base = columns_of(x);
    let mut cols: Vec<Vec<f64>> = vec![vec![1.0; t]];
    let varying: Vec<Vec<f64>> = base.into_iter().filter(|c| !is_constant(c)).collect();
    cols.extend(varying.iter().cloned());
    if variant == HeteroskedasticityTest::White {
        for i in 0..varying.len() {
            for j in i..varying.len() {
                let c: Vec<f64> = varying[i].iter().zip(&varying[j]).map(|(a, b)| a * b).collect();
                if !cols.iter().any(|o| *o == c) {
                    cols.push(c);
                }
            }
        }
    }
    let df = cols.len() - 1;
    if df == 0 || t <= 2 * cols.len() {
        return Err(Error::InsufficientSample(format!("{t} observations for {} auxiliary regressors", cols.len())));
    }
    let aux = ols_fit(&u2, &matrix_from_columns(&cols)?)?;
    let lm = (t as f64 * aux.r_squared(&u2)).max(0.0);
    Ok(TestStatistic { statistic: lm, p_value: chi2_sf(lm, df), df })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JarqueBera {
    pub statistic: f64,
    pub p_value: f64,
    pub skewness: f64,
    pub kurtosis: f64,
}

/// Jarque-Bera normality test with population (divide-by-T) moments.
pub fn jarque_bera(residuals: &[f64]) -> Result<JarqueBera> {
    let t = residuals.len();
    if t < 3 {
        return Err(Error::SeriesTooShort { needed: 3, have: t });
    }
    let n = t as f64;
    let mean = residuals.iter().sum::<f64>() / n;
    let m = |p: i32| residuals.iter().map(|e| (e - mean).powi(p)).sum::<f64>() / n;
    let m2 = m(2);
    if !(m2 > 0.0) {
        return Err(Error::ZeroVariance);
    }
    let skewness = m(3) / m2.powf(1.5);
    let kurtosis = m(4) / (m2 * m2);
    let statistic = n * (skewness * skewness / 6.0 + (kurtosis - 3.0).powi(2) / 24.0);
    Ok(JarqueBera { statistic, p_value: chi2_sf(statistic, 2), skewness, kurtosis })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reset {
    pub f: TestStatistic,
    /// `T (SSR_r - SSR_u) / SSR_r`, chi-square with `|powers|` degrees of freedom.
    pub lm: TestStatistic,
    pub df_denominator: usize,
    /// Set when the fitted-value powers are collinear with the regressors;
    /// both statistics are then 0 with p = 1.
    pub collinear_augmentation: bool,
}

/// Ramsey RESET: significance of powers of the fitted values added to the regression.
pub fn ramsey_reset(fit: &OlsFit, x: &Matrix, powers: &[u32], y: &[f64]) -> Result<Reset> {
    if powers.is_empty() || powers.iter().any(|p| !(2..=3).contains(p)) {
        return Err(Error::InvalidArgument("RESET powers must be a non-empty subset of {2, 3}".into()));
    }
    let mut powers = powers.to_vec();
    powers.sort_unstable();
    powers.dedup();
    let t = y.len();
    let k = x.ncols();
    let m = powers.len();
    if t <= k + m {
        return Err(Error::InsufficientSample(format!("{t} observations for {} RESET regressors", k + m)));
    }
    let mut cols = columns_of(x);
    for &p in &powers {
        cols.push(fit.fitted.iter().map(|v| v.powi(p as i32)).collect());
    }
    let df2 = t - k - m;
    let degenerate = Reset {
        f: TestStatistic { statistic: 0.0, p_value: 1.0, df: m },
        lm: TestStatistic { statistic: 0.0, p_value: 1.0, df: m },
        df_denominator: df2,
        collinear_augmentation: true,
    };
    let aug = match ols_fit(y, &matrix_from_columns(&cols)?) {
        Ok(f) => f,
        Err(Error::RankDeficient { .. }) => return Ok(degenerate),
        Err(e) => return Err(e),
    };
    let (ssr_r, ssr_u) = (fit.ssr, aug.ssr);
    if !(ssr_u > 0.0) || !(ssr_r > 0.0) {
        return Ok(degenerate);
    }
    let drop = (ssr_r - ssr_u).max(0.0);
    let f = (drop / m as f64) / (ssr_u / df2 as f64);
    let lm = t as f64 * drop / ssr_r;
    Ok(Reset {
        f: TestStatistic { statistic: f, p_value: f_sf(f, m, df2), df: m },
        lm: TestStatistic { statistic: lm, p_value: chi2_sf(lm, m), df: m },
        df_denominator: df2,
        collinear_augmentation: false,
    })
}

/// Standardised one-step-ahead prediction errors, one per observation after the first `k`.
pub fn recursive_residuals(y: &[f64], x: &Matrix) -> Result<Vec<f64>> {
    let (t, k) = x.shape();
    if y.len() != t {
        return Err(Error::DimensionMismatch(format!("y has {} rows, X has {t}", y.len())));
    }
    if t <= k {
        return Ok(vec![]);
    }
    let head = x.rows(0, k).into_owned();
    // the initial k x k block must be well conditioned
    let fit0 = ols_fit_square(&y[..k], &head)?;
    let mut p = fit0.1;
    let mut beta = fit0.0;
    let mut w = Vec::with_capacity(t - k);
    for i in k..t {
        let xi = x.row(i).transpose();
        let px = &p * &xi;
        let f = 1.0 + xi.dot(&px);
        let e = y[i] - xi.dot(&beta);
        w.push(e / f.sqrt());
        beta += &px * (e / f);
        p -= &px * px.transpose() / f;
    }
    Ok(w)
}

/// Exact solve of a square system plus `(X'X)^-1`, rejecting ill-conditioned starts.
fn ols_fit_square(y: &[f64], x: &Matrix) -> Result<(nalgebra::DVector<f64>, Matrix)> {
    let k = x.ncols();
    let norms: Vec<f64> = x.column_iter().map(|c| c.norm()).collect();
    if norms.iter().any(|n| *n == 0.0) {
        return Err(Error::RankDeficient { rcond: 0.0 });
    }
    let mut xs = x.clone();
    for (j, n) in norms.iter().enumerate() {
        xs.column_mut(j).scale_mut(1.0 / n);
    }
    let sv = xs.singular_values();
    let rcond = (sv.min() / sv.max()).powi(2);
    if !(rcond >= crate::numerics::RCOND_THRESHOLD) {
        return Err(Error::RankDeficient { rcond });
    }
    let inv = x.clone().try_inverse().ok_or(Error::RankDeficient { rcond })?;
    let beta = &inv * nalgebra::DVector::from_column_slice(y);
    let p = &inv * inv.transpose();
    debug_assert_eq!(p.nrows(), k);
    Ok((beta, p))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    Stable,
    Unstable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityPath {
    /// 1-based observation index of each point.
    pub t: Vec<usize>,
    pub values: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub verdict: Stability,
}

impl StabilityPath {
    fn new(t: Vec<usize>, values: Vec<f64>, lower: Vec<f64>, upper: Vec<f64>) -> Self {
        let inside = values.iter().zip(lower.iter().zip(&upper)).all(|(v, (l, u))| *v >= *l && *v <= *u);
        let verdict = if inside { Stability::Stable } else { Stability::Unstable };
        StabilityPath { t, values, lower, upper, verdict }
    }

    /// CSV with columns `t,value,lower_band,upper_band`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,value,lower_band,upper_band\n");
        for i in 0..self.t.len() {
            out.push_str(&format!("{},{},{},{}\n", self.t[i], self.values[i], self.lower[i], self.upper[i]));
        }
        out
    }
}

/// CUSUM and CUSUM-of-squares paths of the recursive residuals `w` from a
/// regression with `k` coefficients. Points are labelled `k+1..=k+len(w)`.
pub fn cusum_paths(w: &[f64], k: usize) -> Result<(StabilityPath, StabilityPath)> {
    let n = w.len();
    if n < 2 {
        return Err(Error::SeriesTooShort { needed: 2, have: n });
    }
    let nf = n as f64;
    let mean = w.iter().sum::<f64>() / nf;
    let sd = (w.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (nf - 1.0)).sqrt();
    let total: f64 = w.iter().map(|v| v * v).sum();
    if !(sd > 0.0) || !(total > 0.0) {
        return Err(Error::ZeroVariance);
    }
    let t: Vec<usize> = (1..=n).map(|r| k + r).collect();
    let mut acc = 0.0;
    let cusum: Vec<f64> = w.iter().map(|v| { acc += v / sd; acc }).collect();
    let band: Vec<f64> = (1..=n).map(|r| CUSUM_BAND_5PCT * nf.sqrt() * (1.0 + 2.0 * r as f64 / nf)).collect();
    let lower: Vec<f64> = band.iter().map(|b| -b).collect();
    let cusum = StabilityPath::new(t.clone(), cusum, lower, band);

    let mut acc = 0.0;
    let mut sq: Vec<f64> = w.iter().map(|v| { acc += v * v; acc / total }).collect();
    sq[n - 1] = 1.0;
    let c0 = CUSUMSQ_KS_5PCT / (nf / 2.0).sqrt();
    let lower: Vec<f64> = (1..=n).map(|r| r as f64 / nf - c0).collect();
    let upper: Vec<f64> = (1..=n).map(|r| r as f64 / nf + c0).collect();
    let cusumsq = StabilityPath::new(t, sq, lower, upper);
    Ok((cusum, cusumsq))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiagnosticsOptions {
    pub serial_lags: usize,
    pub heteroskedasticity: HeteroskedasticityTest,
    pub reset_powers: Vec<u32>,
}

impl Default for DiagnosticsOptions {
    fn default() -> Self {
        DiagnosticsOptions { serial_lags: 2, heteroskedasticity: HeteroskedasticityTest::BreuschPagan, reset_powers: vec![2] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsBundle {
    pub serial_correlation: TestStatistic,
    pub heteroskedasticity: TestStatistic,
    pub normality: TestStatistic,
    /// LM form of RESET.
    pub functional_form: TestStatistic,
    pub reset: Reset,
    pub cusum: StabilityPath,
    pub cusumsq: StabilityPath,
}

impl DiagnosticsBundle {
    /// Smallest p-value among the four residual tests.
    pub fn min_p_value(&self) -> f64 {
        [&self.serial_correlation, &self.heteroskedasticity, &self.normality, &self.functional_form]
            .iter()
            .map(|s| s.p_value)
            .fold(1.0, f64::min)
    }

    pub fn all_stable(&self) -> bool {
        self.cusum.verdict == Stability::Stable && self.cusumsq.verdict == Stability::Stable
    }
}

/// Every diagnostic for the OLS regression of `y` on `x`.
pub fn diagnose(y: &[f64], x: &Matrix, options: &DiagnosticsOptions) -> Result<DiagnosticsBundle> {
    let fit = ols_fit(y, x)?;
    let jb = jarque_bera(&fit.residuals)?;
    let reset = ramsey_reset(&fit, x, &options.reset_powers, y)?;
    let w = recursive_residuals(y, x)?;
    let (cusum, cusumsq) = cusum_paths(&w, x.ncols())?;
    Ok(DiagnosticsBundle {
        serial_correlation: breusch_godfrey(&fit, x, options.serial_lags)?,
        heteroskedasticity: heteroskedasticity_test(&fit, x, options.heteroskedasticity)?,
        normality: TestStatistic { statistic: jb.statistic, p_value: jb.p_value, df: 2 },
        functional_form: reset.lm,
        reset,
        cusum,
        cusumsq,
    })
}
