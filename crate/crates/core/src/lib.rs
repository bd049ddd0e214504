//! Beveridge-curve estimation and the sufficient-statistic unemployment gap.
//!
//! The pipeline runs monthly series through [`ingest`] into a quarterly
//! [`LaborMarketPanel`], fits an isoelastic curve per regime in [`fit`],
//! calibrates recruiting cost and the value of nonwork in [`calibration`],
//! and computes the efficient unemployment rate in [`gap`]. [`planner`]
//! re-derives the same optimum numerically from a matching model.
//!
//! ```
//! use beveridge_gap::{efficient_unemployment, SufficientStats};
//!
//! let stats = SufficientStats::new(1.0, 0.72, 0.25).unwrap();
//! let u_star = efficient_unemployment(0.058, 0.034, &stats).unwrap();
//! assert!((u_star - 0.0435).abs() < 1e-4);
//! ```

// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calibration;
pub mod fit;
pub mod gap;
pub mod ingest;
pub mod planner;
pub mod quarter;
pub mod regimes;

pub use calibration::{CalibrationProfile, SufficientStats};
pub use fit::{fit_elasticity, ElasticityEstimate, RegimeFit};
pub use gap::{efficient_tightness, efficient_unemployment, gap_series, Classification, GapPoint};
pub use ingest::{LaborMarketPanel, PanelRow};
pub use planner::{solve_planner_numeric, DmpEconomy, IsoelasticCurve, PlannerSolution};
pub use quarter::QuarterKey;
pub use regimes::{ElasticitySchedule, Regime, RegimeTable};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/quickstart.md")]
    mod quickstart {}
    #[doc = include_str!("../../../book/src/panel.md")]
    mod panel {}
    #[doc = include_str!("../../../book/src/elasticity.md")]
    mod elasticity {}
    #[doc = include_str!("../../../book/src/calibration.md")]
    mod calibration {}
    #[doc = include_str!("../../../book/src/gap.md")]
    mod gap {}
    #[doc = include_str!("../../../book/src/planner.md")]
    mod planner {}
}
