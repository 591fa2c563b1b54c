//! Cointegration tests: Johansen's reduced-rank procedure and the
//! residual-based test with two endogenous regime shifts.

mod hatemi_j;
mod johansen;

pub use hatemi_j::{
    hatemi_j_critical_values, hatemi_j_statistics_at, hatemi_j_test, phillips_z, HatemiJCriticalValues,
    HatemiJRejections, HatemiJResult, HatemiJSpec, PairStatistics, ShiftSpec,
};
pub use johansen::{
    johansen_test, maxeig_critical_values, select_var_lag_bic, trace_critical_values, JohansenCase, JohansenResult,
    RankCriticalValues, SelectedRank, MAX_JOHANSEN_VARIABLES,
};
