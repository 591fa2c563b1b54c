//! Structural-break unit-root tests, cointegration with regime shifts and
//! long-run estimators (DOLS, FMOLS, ARDL) for short annual series, with a
//! seeded Monte Carlo engine and a reproducible reporting pipeline.
//!
//! ```
//! use breakcoint::timeseries::{snapshot, BreakModel};
//! use breakcoint::unit_root::{za_test, AdfSpec};
//!
//! let inf = snapshot().column("INF").unwrap().clone();
//! let r = za_test(&inf, BreakModel::C, 0.15, &AdfSpec::default()).unwrap();
//! println!("ZA = {:.3}, break after {}", r.statistic, r.break_years[0]);
//! ```

pub mod ardl;
pub mod breaks;
pub mod cointegration;
pub mod diagnostics;
pub mod error;
pub mod longrun;
pub mod montecarlo;
pub mod numerics;
pub mod pipeline;
pub mod timeseries;
pub mod unit_root;

pub use error::{Error, Result};

// README and guide code blocks run as doctests.
#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
mod readme {}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/data.md")]
    mod data {}
    #[doc = include_str!("../../../book/src/unit_roots.md")]
    mod unit_roots {}
    #[doc = include_str!("../../../book/src/cointegration.md")]
    mod cointegration {}
    #[doc = include_str!("../../../book/src/long_run.md")]
    mod long_run {}
    #[doc = include_str!("../../../book/src/ardl.md")]
    mod ardl {}
    #[doc = include_str!("../../../book/src/diagnostics.md")]
    mod diagnostics {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    mod simulation {}
    #[doc = include_str!("../../../book/src/pipeline.md")]
    mod pipeline {}
}
