//! Linear-algebra and regression kernel shared by every test and estimator.
//!
//! Everything here is a pure function of its inputs. Matrices are
//! `nalgebra::DMatrix<f64>`; vectors are plain slices or `Vec<f64>`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Matrix = DMatrix<f64>;

/// Reciprocal condition number of the (column-equilibrated) cross-product
/// matrix below which a design is treated as singular.
pub const RCOND_THRESHOLD: f64 = 1e-12;

/// Result of an ordinary least-squares regression.
#[derive(Debug, Clone, PartialEq)]
pub struct OlsFit {
    pub coefficients: Vec<f64>,
    pub residuals: Vec<f64>,
    pub fitted: Vec<f64>,
    /// `sigma2 * (X'X)^-1`
    pub coef_covariance: Matrix,
    /// `(X'X)^-1`, kept so callers can rescale with a long-run variance.
    pub xtx_inv: Matrix,
    pub ssr: f64,
    pub sigma2: f64,
    pub t: usize,
    pub k: usize,
}

impl OlsFit {
    pub fn std_errors(&self) -> Vec<f64> {
        (0..self.k).map(|i| self.coef_covariance[(i, i)].max(0.0).sqrt()).collect()
    }

    pub fn t_stat(&self, i: usize) -> f64 {
        self.coefficients[i] / self.coef_covariance[(i, i)].sqrt()
    }

    /// Centered R^2 of the regression. `y` must be the regressand used to fit.
    pub fn r_squared(&self, y: &[f64]) -> f64 {
        let mean = y.iter().sum::<f64>() / y.len() as f64;
        let tss: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
        if tss == 0.0 {
            return 0.0;
        }
        1.0 - self.ssr / tss
    }
}

/// Build a `T x k` matrix from column vectors.
pub fn matrix_from_columns(columns: &[Vec<f64>]) -> Result<Matrix> {
    let k = columns.len();
    if k == 0 {
        return Err(Error::DimensionMismatch("no columns".into()));
    }
    let t = columns[0].len();
    if columns.iter().any(|c| c.len() != t) {
        return Err(Error::DimensionMismatch("columns of unequal length".into()));
    }
    Ok(Matrix::from_fn(t, k, |i, j| columns[j][i]))
}

/// Least squares through a Householder QR of the column-equilibrated design.
pub fn ols_fit(y: &[f64], x: &Matrix) -> Result<OlsFit> {
    let (t, k) = x.shape();
    if y.len() != t {
        return Err(Error::DimensionMismatch(format!(
            "y has {} observations, X has {} rows",
            y.len(),
            t
        )));
    }
    if k == 0 || t <= k {
        return Err(Error::DimensionMismatch(format!(
            "need T > k, got T = {t}, k = {k}"
        )));
    }
    if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("non-finite regression input".into()));
    }

    let norms: Vec<f64> = x.column_iter().map(|c| c.norm()).collect();
    if norms.iter().any(|&n| n == 0.0) {
        return Err(Error::RankDeficient { rcond: 0.0 });
    }
    let mut xs = x.clone();
    for (j, n) in norms.iter().enumerate() {
        xs.column_mut(j).scale_mut(1.0 / n);
    }

    let qr = xs.qr();
    let r = qr.r();
    let sv = r.singular_values();
    let smax = sv.max();
    let smin = sv.min();
    let rcond = if smax > 0.0 { (smin / smax).powi(2) } else { 0.0 };
    if !(rcond >= RCOND_THRESHOLD) {
        return Err(Error::RankDeficient { rcond });
    }

    let yv = DVector::from_column_slice(y);
    let qty = qr.q().transpose() * &yv;
    let bs = r
        .solve_upper_triangular(&qty)
        .ok_or(Error::RankDeficient { rcond })?;
    let r_inv = r
        .solve_upper_triangular(&Matrix::identity(k, k))
        .ok_or(Error::RankDeficient { rcond })?;
    let inv_scaled = &r_inv * r_inv.transpose();
    let xtx_inv = Matrix::from_fn(k, k, |i, j| inv_scaled[(i, j)] / (norms[i] * norms[j]));

    let coefficients: Vec<f64> = bs.iter().zip(&norms).map(|(b, n)| b / n).collect();
    let fitted_v = x * DVector::from_column_slice(&coefficients);
    let fitted: Vec<f64> = fitted_v.iter().copied().collect();
    let residuals: Vec<f64> = y.iter().zip(&fitted).map(|(a, b)| a - b).collect();
    let ssr: f64 = residuals.iter().map(|e| e * e).sum();
    let sigma2 = ssr / (t - k) as f64;
    Ok(OlsFit {
        coefficients,
        residuals,
        fitted,
        coef_covariance: &xtx_inv * sigma2,
        xtx_inv,
        ssr,
        sigma2,
        t,
        k,
    })
}

/// Kernel used to weight autocovariances in long-run covariance estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Kernel {
    #[default]
    Bartlett,
}

impl Kernel {
    pub fn weight(self, lag: usize, bandwidth: usize) -> f64 {
        match self {
            Kernel::Bartlett => 1.0 - lag as f64 / (bandwidth as f64 + 1.0),
        }
    }
}

/// Newey-West fixed bandwidth rule, `floor(4 (T/100)^(2/9))`.
pub fn newey_west_bandwidth(t: usize) -> usize {
    (4.0 * (t as f64 / 100.0).powf(2.0 / 9.0)).floor() as usize
}

/// Two-sided and one-sided long-run covariance of a multivariate series.
#[derive(Debug, Clone, PartialEq)]
pub struct LongRunCovariance {
    /// `Gamma_0 + sum_j w_j (Gamma_j + Gamma_j')`
    pub omega: Matrix,
    /// `sum_{j=0..bw} w_j Gamma_j`
    pub lambda_one_sided: Matrix,
    pub bandwidth: usize,
    pub kernel: Kernel,
}

/// `Gamma_j = (1/T) sum_{t>j} u_t u_{t-j}'`. Rows of `u` are observations.
pub fn autocovariance(u: &Matrix, lag: usize) -> Matrix {
    let (t, m) = u.shape();
    let mut g = Matrix::zeros(m, m);
    for s in lag..t {
        for a in 0..m {
            let ua = u[(s, a)];
            for b in 0..m {
                g[(a, b)] += ua * u[(s - lag, b)];
            }
        }
    }
    g / t as f64
}

pub fn long_run_covariance(u: &Matrix, kernel: Kernel, bandwidth: usize) -> Result<LongRunCovariance> {
    let t = u.nrows();
    if t < 2 {
        return Err(Error::SeriesTooShort { needed: 2, have: t });
    }
    if bandwidth >= t {
        return Err(Error::BandwidthTooLarge { bandwidth, t });
    }
    let g0 = autocovariance(u, 0);
    let mut omega = g0.clone();
    let mut lambda = g0;
    for j in 1..=bandwidth {
        let w = kernel.weight(j, bandwidth);
        let gj = autocovariance(u, j);
        omega += (&gj + gj.transpose()) * w;
        lambda += gj * w;
    }
    // exact symmetry; the two triangles only differ by rounding
    let omega = (&omega + omega.transpose()) * 0.5;
    Ok(LongRunCovariance { omega, lambda_one_sided: lambda, bandwidth, kernel })
}

/// Scalar long-run variance of a single series.
pub fn long_run_variance(u: &[f64], bandwidth: usize) -> Result<f64> {
    let m = Matrix::from_column_slice(u.len(), 1, u);
    Ok(long_run_covariance(&m, Kernel::Bartlett, bandwidth)?.omega[(0, 0)])
}

/// Eigenvalues of the pencil `det(A - lambda B) = 0`, sorted descending.
///
/// `B` is factored as `L L'` and the symmetric matrix `L^-1 A L^-T` is
/// diagonalised, so every returned root is real.
pub fn generalized_eigen(a: &Matrix, b: &Matrix) -> Result<Vec<f64>> {
    let m = a.nrows();
    if a.shape() != (m, m) || b.shape() != (m, m) {
        return Err(Error::DimensionMismatch("pencil matrices must be square and equal size".into()));
    }
    let chol = b.clone().cholesky().ok_or(Error::NotPositiveDefinite)?;
    let l = chol.l();
    let linv_a = l
        .solve_lower_triangular(a)
        .ok_or(Error::NotPositiveDefinite)?;
    let c = l
        .solve_lower_triangular(&linv_a.transpose())
        .ok_or(Error::NotPositiveDefinite)?;
    let c = (&c + c.transpose()) * 0.5;
    let mut values: Vec<f64> = c.symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(|x, y| y.total_cmp(x));
    Ok(values)
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_symmetric_eigenvalue(a: &Matrix) -> f64 {
    let s = (a + a.transpose()) * 0.5;
    s.symmetric_eigenvalues().min()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InformationCriteria {
    pub aic: f64,
    pub bic: f64,
    pub hq: f64,
    /// Set when `ssr == 0`; all criteria are then `-inf`.
    pub degenerate: bool,
}

/// Likelihood-based criteria in the `T ln(SSR/T) + penalty` form.
pub fn information_criteria(ssr: f64, t: usize, k: usize) -> Result<InformationCriteria> {
    if t <= k {
        return Err(Error::InsufficientSample(format!("T = {t} must exceed k = {k}")));
    }
    if !(ssr >= 0.0) {
        return Err(Error::InvalidArgument(format!("negative ssr {ssr}")));
    }
    if ssr == 0.0 {
        return Ok(InformationCriteria {
            aic: f64::NEG_INFINITY,
            bic: f64::NEG_INFINITY,
            hq: f64::NEG_INFINITY,
            degenerate: true,
        });
    }
    let tf = t as f64;
    let kf = k as f64;
    let base = tf * (ssr / tf).ln();
    Ok(InformationCriteria {
        aic: base + 2.0 * kf,
        bic: base + kf * tf.ln(),
        hq: base + 2.0 * kf * tf.ln().ln(),
        degenerate: false,
    })
}

/// Empirical quantile with linear interpolation (type 7). `sorted` must be ascending.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}
