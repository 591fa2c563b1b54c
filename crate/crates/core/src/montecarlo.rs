//! Seeded simulation engine: data-generating processes, null distributions
//! of the test statistics, and size/power experiments.
//!
//! Replication `i` of a run with base seed `s` draws from
//! `ChaCha8Rng::seed_from_u64(s + i)`, so results never depend on how the
//! replications are scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ardl::{ardl_fit, bounds_critical_values, bounds_test, BoundsVerdict};
use crate::cointegration::{johansen_test, trace_critical_values, JohansenCase};
use crate::error::{Error, Result};
use crate::numerics::quantile_sorted;
use crate::timeseries::{Dataset, TimeSeries};
use crate::unit_root::{
    adf_regression, adf_test, ls_critical_values, ls_model_a_two_break_min_lag0, mackinnon_critical_values,
    za_critical_values, za_model_a_min_lag0, AdfSpec, Deterministic, LsModel,
};
use crate::timeseries::BreakModel;

pub const MIN_DGP_LENGTH: usize = 10;
/// Batches used for Monte Carlo standard errors of quantiles.
pub const MC_BATCHES: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DgpKind {
    /// `y_t = y_{t-1} + drift + e_t`, `y_0 = drift + e_0`.
    RandomWalk {
        #[serde(default)]
        drift: f64,
    },
    /// Stationary AR(1) started from its stationary distribution.
    Ar1 { rho: f64 },
    /// White noise plus a level shift of `magnitude` after observation `tb` (1-based).
    TrendBreak { tb: usize, magnitude: f64 },
    /// Columns `y, x`: `x` a random walk with `drift`, `y = beta x + e`.
    CointegratedPair {
        beta: f64,
        #[serde(default)]
        drift: f64,
    },
    /// Columns `y1..yr, x1..xm`: `x` independent random walks, `y = B x + e`.
    CointegratedSystem { b: Vec<Vec<f64>> },
    /// Columns `y1..y{rank+1}`: `Δy_j = a_j (y_{j,t-1} - y_{last,t-1}) + e_j`
    /// for `j < rank`; the last column is a random walk with `drift`.
    Ecm {
        rank: usize,
        loadings: Vec<f64>,
        #[serde(default)]
        drift: f64,
    },
    /// Columns `y1..yk`, independent random walks with a common drift.
    IndependentWalks {
        k: usize,
        #[serde(default)]
        drift: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DgpSpec {
    pub kind: DgpKind,
    pub t: usize,
    pub innovation_sd: f64,
    pub seed: u64,
}

impl DgpSpec {
    pub fn new(kind: DgpKind, t: usize, seed: u64) -> Self {
        DgpSpec { kind, t, innovation_sd: 1.0, seed }
    }

    fn validate(&self) -> Result<()> {
        if self.t < MIN_DGP_LENGTH {
            return Err(Error::InvalidSpec(format!("T = {} is below {MIN_DGP_LENGTH}", self.t)));
        }
        if !(self.innovation_sd >= 0.0) || !self.innovation_sd.is_finite() {
            return Err(Error::InvalidSpec("innovation_sd must be finite and non-negative".into()));
        }
        match &self.kind {
            DgpKind::Ar1 { rho } if !(rho.abs() < 1.0) => Err(Error::InvalidSpec(format!("AR coefficient {rho} is not stationary"))),
            DgpKind::TrendBreak { tb, .. } if *tb == 0 || *tb >= self.t => {
                Err(Error::InvalidSpec(format!("break {tb} outside 1..{}", self.t)))
            }
            DgpKind::CointegratedSystem { b } if b.is_empty() || b[0].is_empty() || b.iter().any(|r| r.len() != b[0].len()) => {
                Err(Error::InvalidSpec("B must be a non-empty rectangular matrix".into()))
            }
            DgpKind::Ecm { rank, loadings, .. } if *rank == 0 || loadings.len() != *rank => {
                Err(Error::InvalidSpec("ECM needs rank >= 1 and one loading per cointegrating relation".into()))
            }
            DgpKind::IndependentWalks { k, .. } if *k == 0 => Err(Error::InvalidSpec("k must be positive".into())),
            _ => Ok(()),
        }
    }
}

fn walk(rng: &mut ChaCha8Rng, t: usize, sd: f64, drift: f64) -> Vec<f64> {
    let mut acc = 0.0;
    (0..t)
        .map(|_| {
            acc += drift + sd * rng.sample::<f64, _>(StandardNormal);
            acc
        })
        .collect()
}

fn noise(rng: &mut ChaCha8Rng, t: usize, sd: f64) -> Vec<f64> {
    (0..t).map(|_| sd * rng.sample::<f64, _>(StandardNormal)).collect()
}

fn generate(spec: &DgpSpec, rng: &mut ChaCha8Rng) -> Vec<(String, Vec<f64>)> {
    let (t, sd) = (spec.t, spec.innovation_sd);
    match &spec.kind {
        DgpKind::RandomWalk { drift } => vec![("y".into(), walk(rng, t, sd, *drift))],
        DgpKind::Ar1 { rho } => {
            let e = noise(rng, t, sd);
            let mut y = Vec::with_capacity(t);
            y.push(e[0] / (1.0 - rho * rho).sqrt());
            for i in 1..t {
                y.push(rho * y[i - 1] + e[i]);
            }
            vec![("y".into(), y)]
        }
        DgpKind::TrendBreak { tb, magnitude } => {
            let e = noise(rng, t, sd);
            vec![("y".into(), e.iter().enumerate().map(|(i, v)| v + if i + 1 > *tb { *magnitude } else { 0.0 }).collect())]
        }
        DgpKind::CointegratedPair { beta, drift } => {
            let x = walk(rng, t, sd, *drift);
            let e = noise(rng, t, sd);
            let y = x.iter().zip(&e).map(|(a, b)| beta * a + b).collect();
            vec![("y".into(), y), ("x".into(), x)]
        }
        DgpKind::CointegratedSystem { b } => {
            let m = b[0].len();
            let xs: Vec<Vec<f64>> = (0..m).map(|_| walk(rng, t, sd, 0.0)).collect();
            let mut out = Vec::new();
            for (i, row) in b.iter().enumerate() {
                let e = noise(rng, t, sd);
                let y = (0..t).map(|s| row.iter().zip(&xs).map(|(c, x)| c * x[s]).sum::<f64>() + e[s]).collect();
                out.push((format!("y{}", i + 1), y));
            }
            out.extend(xs.into_iter().enumerate().map(|(j, x)| (format!("x{}", j + 1), x)));
            out
        }
        DgpKind::Ecm { rank, loadings, drift } => {
            let rank = *rank;
            let k = rank + 1;
            let e: Vec<Vec<f64>> = (0..k).map(|_| noise(rng, t, sd)).collect();
            let mut y = vec![vec![0.0; t]; k];
            for j in 0..k {
                y[j][0] = e[j][0];
            }
            for s in 1..t {
                y[rank][s] = y[rank][s - 1] + drift + e[rank][s];
                for j in 0..rank {
                    let gap = y[j][s - 1] - y[rank][s - 1];
                    y[j][s] = y[j][s - 1] + loadings[j] * gap + drift + e[j][s];
                }
            }
            y.into_iter().enumerate().map(|(j, v)| (format!("y{}", j + 1), v)).collect()
        }
        DgpKind::IndependentWalks { k, drift } => (0..*k).map(|j| (format!("y{}", j + 1), walk(rng, t, sd, *drift))).collect(),
    }
}

/// Draw one dataset. Identical specs give bit-identical data.
pub fn simulate_dgp(spec: &DgpSpec) -> Result<Dataset> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let cols = generate(spec, &mut rng)
        .into_iter()
        .map(|(n, v)| TimeSeries::new(n, 1, v))
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(cols)
}

/// Run `reps` independent replications, replication `i` seeded with
/// `seed_base + i`. Output order is replication order for any thread count.
pub fn run_replications<T, F>(reps: usize, seed_base: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, &mut ChaCha8Rng) -> T + Sync,
{
    (0..reps as u64)
        .into_par_iter()
        .map(|i| {
            let seed = seed_base.wrapping_add(i);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            f(seed, &mut rng)
        })
        .collect()
}

/// Which tail of the null distribution leads to rejection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tail {
    Lower,
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "test", rename_all = "snake_case")]
pub enum CriticalValueTest {
    /// Dickey-Fuller t, constant, no augmentation.
    DfConstant,
    /// Zivot-Andrews intercept-shift model, no augmentation.
    ZaModelA,
    /// Lee-Strazicich two-break crash model, no augmentation.
    LsTwoBreakModelA,
    /// Johansen trace statistic for `H0: r = 0` with `k` variables,
    /// drifting random walks, one lag.
    JohansenTrace { k: usize },
    /// Bounds F with `k` regressors in ARDL(1, 1, ..., 1); the regressors
    /// are random walks when `integrated`, white noise otherwise.
    BoundsF { k: usize, integrated: bool },
}

impl CriticalValueTest {
    pub fn id(&self) -> &'static str {
        match self {
            CriticalValueTest::DfConstant => "DF",
            CriticalValueTest::ZaModelA => "ZA",
            CriticalValueTest::LsTwoBreakModelA => "LS2",
            CriticalValueTest::JohansenTrace { .. } => "JOHANSEN_TRACE",
            CriticalValueTest::BoundsF { .. } => "BOUNDS_F",
        }
    }

    pub fn model(&self) -> String {
        match self {
            CriticalValueTest::DfConstant => "constant".into(),
            CriticalValueTest::ZaModelA | CriticalValueTest::LsTwoBreakModelA => "A".into(),
            CriticalValueTest::JohansenTrace { k } => format!("k-r={k}"),
            CriticalValueTest::BoundsF { k, integrated } => format!("k={k},{}", if *integrated { "I(1)" } else { "I(0)" }),
        }
    }

    pub fn tail(&self) -> Tail {
        match self {
            CriticalValueTest::JohansenTrace { .. } | CriticalValueTest::BoundsF { .. } => Tail::Upper,
            _ => Tail::Lower,
        }
    }

    /// The tabulated 5% value the simulation is compared with.
    pub fn embedded_5pct(&self, t: usize) -> Option<f64> {
        match self {
            CriticalValueTest::DfConstant => Some(mackinnon_critical_values(Deterministic::Constant, t - 1).pct5),
            CriticalValueTest::ZaModelA => Some(za_critical_values(BreakModel::A).pct5),
            CriticalValueTest::LsTwoBreakModelA => Some(ls_critical_values(LsModel::A, 2).pct5),
            CriticalValueTest::JohansenTrace { k } => trace_critical_values(*k).map(|c| c.pct5),
            CriticalValueTest::BoundsF { k, integrated } => {
                bounds_critical_values(*k).map(|b| if *integrated { b.pct5.upper } else { b.pct5.lower })
            }
        }
    }

    fn validate(&self, t: usize) -> Result<()> {
        match self {
            CriticalValueTest::JohansenTrace { k } if !(2..=6).contains(k) => {
                Err(Error::InvalidSpec(format!("Johansen simulation supports 2..=6 variables, got {k}")))
            }
            CriticalValueTest::BoundsF { k, .. } if !(1..=6).contains(k) => {
                Err(Error::InvalidSpec(format!("bounds simulation supports 1..=6 regressors, got {k}")))
            }
            _ if t < 20 => Err(Error::InvalidSpec(format!("T = {t} is too short for a null simulation"))),
            _ => Ok(()),
        }
    }

    /// One draw of the statistic under the null.
    pub fn draw(&self, t: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
        match *self {
            CriticalValueTest::DfConstant => {
                let y = walk(rng, t, 1.0, 0.0);
                Ok(adf_regression(&y, Deterministic::Constant, 0, &[], 1)?.statistic())
            }
            CriticalValueTest::ZaModelA => za_model_a_min_lag0(&walk(rng, t, 1.0, 0.0), 0.15),
            CriticalValueTest::LsTwoBreakModelA => ls_model_a_two_break_min_lag0(&walk(rng, t, 1.0, 0.0), 0.15),
            CriticalValueTest::JohansenTrace { k } => {
                let cols = (0..k)
                    .map(|j| TimeSeries::new(format!("y{j}"), 1, walk(rng, t, 1.0, 1.0)))
                    .collect::<Result<Vec<_>>>()?;
                Ok(johansen_test(&Dataset::new(cols)?, 1, JohansenCase::UnrestrictedConstant)?.trace_stats[0])
            }
            CriticalValueTest::BoundsF { k, integrated } => {
                let y = TimeSeries::new("y", 1, walk(rng, t, 1.0, 0.0))?;
                let cols = (0..k)
                    .map(|j| {
                        let v = if integrated { walk(rng, t, 1.0, 0.0) } else { noise(rng, t, 1.0) };
                        TimeSeries::new(format!("x{j}"), 1, v)
                    })
                    .collect::<Result<Vec<_>>>()?;
                let fit = ardl_fit(&y, &Dataset::new(cols)?, 1, &vec![1; k])?;
                Ok(bounds_test(&fit)?.f_statistic)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelTriple {
    pub pct1: f64,
    pub pct5: f64,
    pub pct10: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSummary {
    pub test_id: String,
    pub model: String,
    pub t: usize,
    pub reps: usize,
    pub seed_base: u64,
    pub tail: Tail,
    /// Critical values at each significance level (lower or upper quantiles by tail).
    pub quantiles: LevelTriple,
    pub mc_stderr: LevelTriple,
    /// Share of replications rejecting at the embedded 5% value (or, for
    /// size/power experiments, share of replications where the event occurred).
    pub rejection_rate: f64,
    /// Draws that failed (degenerate regressions); excluded from the quantiles.
    pub failed: usize,
}

fn level_probability(level: f64, tail: Tail) -> f64 {
    match tail {
        Tail::Lower => level,
        Tail::Upper => 1.0 - level,
    }
}

fn quantile_triple(values: &[f64], tail: Tail) -> LevelTriple {
    let mut s = values.to_vec();
    s.sort_by(f64::total_cmp);
    let q = |l: f64| quantile_sorted(&s, level_probability(l, tail));
    LevelTriple { pct1: q(0.01), pct5: q(0.05), pct10: q(0.10) }
}

/// Quantiles with batch-means standard errors.
pub fn summarize_draws(values: &[f64], tail: Tail) -> (LevelTriple, LevelTriple) {
    let q = quantile_triple(values, tail);
    let per = values.len() / MC_BATCHES;
    if per < 2 {
        return (q, LevelTriple { pct1: f64::NAN, pct5: f64::NAN, pct10: f64::NAN });
    }
    let batches: Vec<LevelTriple> = (0..MC_BATCHES).map(|b| quantile_triple(&values[b * per..(b + 1) * per], tail)).collect();
    let se = |f: fn(&LevelTriple) -> f64| {
        let m = batches.iter().map(f).sum::<f64>() / MC_BATCHES as f64;
        let var = batches.iter().map(|b| (f(b) - m).powi(2)).sum::<f64>() / (MC_BATCHES - 1) as f64;
        (var / MC_BATCHES as f64).sqrt()
    };
    (q, LevelTriple { pct1: se(|l| l.pct1), pct5: se(|l| l.pct5), pct10: se(|l| l.pct10) })
}

/// Empirical null distribution of a test statistic.
pub fn simulate_critical_values(test: CriticalValueTest, t: usize, reps: usize, seed_base: u64) -> Result<SimulationSummary> {
    if reps < 1000 {
        return Err(Error::InvalidSpec(format!("at least 1000 replications are required, got {reps}")));
    }
    test.validate(t)?;
    let draws = run_replications(reps, seed_base, |_, rng| test.draw(t, rng));
    let mut values = Vec::with_capacity(reps);
    let mut failed = 0;
    for d in draws {
        match d {
            Ok(v) if v.is_finite() => values.push(v),
            Ok(_) | Err(Error::RankDeficient { .. } | Error::DegenerateRegression(_)) => failed += 1,
            Err(e) => return Err(e),
        }
    }
    if values.len() < reps / 2 {
        return Err(Error::InvalidSpec(format!("{failed} of {reps} replications failed")));
    }
    let tail = test.tail();
    let (quantiles, mc_stderr) = summarize_draws(&values, tail);
    let rejection_rate = match test.embedded_5pct(t) {
        Some(cv) => {
            values.iter().filter(|v| if tail == Tail::Lower { **v < cv } else { **v > cv }).count() as f64 / values.len() as f64
        }
        None => f64::NAN,
    };
    Ok(SimulationSummary {
        test_id: test.id().into(),
        model: test.model(),
        t,
        reps,
        seed_base,
        tail,
        quantiles,
        mc_stderr,
        rejection_rate,
        failed,
    })
}

/// Decision rule applied in a size/power experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "test", rename_all = "snake_case")]
pub enum SizePowerTest {
    /// ADF on the first column, rejecting at the 5% response-surface value.
    Adf { spec: AdfSpec },
    /// Event: the 5% trace procedure selects exactly `rank`.
    JohansenRank { lag_order: usize, rank: usize },
    /// Event: the bounds test on ARDL(p, q, ..., q) of the first column on
    /// the rest concludes cointegration at 5%.
    BoundsCointegrated { p: usize, q: usize },
}

impl SizePowerTest {
    fn id(&self) -> &'static str {
        match self {
            SizePowerTest::Adf { .. } => "ADF",
            SizePowerTest::JohansenRank { .. } => "JOHANSEN_RANK",
            SizePowerTest::BoundsCointegrated { .. } => "BOUNDS",
        }
    }

    pub fn event(&self, d: &Dataset) -> Result<bool> {
        match self {
            SizePowerTest::Adf { spec } => Ok(adf_test(&d.columns[0], spec)?.reject_at.pct5),
            SizePowerTest::JohansenRank { lag_order, rank } => {
                Ok(johansen_test(d, *lag_order, JohansenCase::UnrestrictedConstant)?.selected_rank.pct5 == *rank)
            }
            SizePowerTest::BoundsCointegrated { p, q } => {
                let rest = Dataset::new(d.columns[1..].to_vec())?;
                let fit = ardl_fit(&d.columns[0], &rest, *p, &vec![*q; rest.columns.len()])?;
                Ok(bounds_test(&fit)?.verdict == BoundsVerdict::Cointegrated)
            }
        }
    }
}

fn event_rate(test: &SizePowerTest, spec: &DgpSpec, reps: usize, seed_base: u64) -> Result<SimulationSummary> {
    spec.validate()?;
    let outcomes = run_replications(reps, seed_base, |seed, _| {
        simulate_dgp(&DgpSpec { seed, ..spec.clone() }).and_then(|d| test.event(&d))
    });
    let mut hits = 0;
    let mut failed = 0;
    for o in outcomes {
        match o {
            Ok(true) => hits += 1,
            Ok(false) => {}
            Err(Error::RankDeficient { .. } | Error::DegenerateRegression(_)) => failed += 1,
            Err(e) => return Err(e),
        }
    }
    let nan = LevelTriple { pct1: f64::NAN, pct5: f64::NAN, pct10: f64::NAN };
    Ok(SimulationSummary {
        test_id: test.id().into(),
        model: format!("{:?}", spec.kind),
        t: spec.t,
        reps,
        seed_base,
        tail: Tail::Lower,
        quantiles: nan,
        mc_stderr: nan,
        rejection_rate: hits as f64 / (reps - failed).max(1) as f64,
        failed,
    })
}

/// Rejection (event) rates under a null and an alternative DGP. The two
/// runs use disjoint seed ranges.
pub fn size_power_experiment(
    test: &SizePowerTest,
    null: &DgpSpec,
    alternative: &DgpSpec,
    reps: usize,
    seed_base: u64,
) -> Result<(SimulationSummary, SimulationSummary)> {
    if reps < 200 {
        return Err(Error::InvalidSpec(format!("at least 200 replications are required, got {reps}")));
    }
    let n = event_rate(test, null, reps, seed_base)?;
    let a = event_rate(test, alternative, reps, seed_base.wrapping_add(reps as u64))?;
    Ok((n, a))
}

/// CSV with columns `test_id,model,T,reps,level,quantile,mc_stderr`.
pub fn summaries_to_csv(summaries: &[SimulationSummary]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(["test_id", "model", "T", "reps", "level", "quantile", "mc_stderr"]).map_err(io)?;
    for s in summaries {
        for (level, q, se) in [
            ("0.01", s.quantiles.pct1, s.mc_stderr.pct1),
            ("0.05", s.quantiles.pct5, s.mc_stderr.pct5),
            ("0.10", s.quantiles.pct10, s.mc_stderr.pct10),
        ] {
            w.write_record([
                s.test_id.clone(),
                s.model.clone(),
                s.t.to_string(),
                s.reps.to_string(),
                level.to_string(),
                format!("{q:.6}"),
                format!("{se:.6}"),
            ])
            .map_err(io)?;
        }
    }
    String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.to_string()))?).map_err(|e| Error::Io(e.to_string()))
}
