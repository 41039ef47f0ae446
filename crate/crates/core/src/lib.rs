//! Design and evaluation engine for the flexible seamless 2-in-1 adaptive trial.
//!
//! A 2-in-1 trial starts as a small phase 2 study and, depending on an interim
//! surrogate statistic `X`, either stays in phase 2 or expands into a phase 3
//! study. The flexible variant re-estimates the phase 3 event count from the
//! interim primary-endpoint statistic `Z1` (promising-zone re-estimation, capped
//! at `m_max`) and still tests with the conventional pooled statistic, which is
//! only valid for interim cutoffs above `C_min`.
//!
//! The crate is `no_std` and needs only `alloc`:
//!
//! - [`numerics`]: normal distribution, unit-interval quadrature, bracketed roots.
//! - [`design`]: design parameters, conditional power, re-estimation, CHW weights,
//!   event-count and drift helpers.
//! - [`type1`]: analytic overall type-I error in the cutoff and the `C_min` solvers.
//! - [`sim`]: counter-based Monte Carlo engine for F2in1, S2in1 and CHW arms.
//!
//! IO, configuration, the CLI and thread-parallel execution live in the `twoin1`
//! crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod design;
mod error;
pub mod numerics;
pub mod sim;
pub mod type1;

pub use design::{
    logrank_drift, logrank_events, orr_z_cutoff, Design, DesignParams, EffectScenario, SsrResult,
};
pub use error::{Error, Result};
pub use sim::{
    AccrualModel, Branch, DesignLabel, DurationModel, OcSummary, SimulationPlan, StatisticDraw,
    Tally, TrialOutcome,
};
pub use type1::{Cmin, CminMethod, CminResult, NullSample, Type1Breakdown, Type1Calculator};
