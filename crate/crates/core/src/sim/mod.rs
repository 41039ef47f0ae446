//! Statistic-level Monte Carlo engine.
//!
//! Each replicate draws (X, Y, Z1, Z̃2-innovation) once from its own
//! counter-based stream; every design arm is then evaluated on that shared
//! draw. Per-design tallies hold only integer counts, so merging blocks is
//! exact and the result does not depend on how replicates are scheduled.

mod draw;
mod duration;
mod plan;
mod summary;

use alloc::string::{String, ToString};
use core::fmt;
use core::str::FromStr;

pub use draw::{draw_replicate, replicate_rng, ReplicateGenerator, StatisticDraw};
pub use duration::{
    calibrate_median, expected_duration, expected_events, AccrualModel, DurationModel, Endpoint,
};
pub use plan::{blocks, merge_tallies, SimulationPlan, BLOCK_SIZE};
pub use summary::{aggregate, OcSummary, Tally};

use crate::design::{logrank_drift, Design, EffectScenario};
use crate::error::{Error, Result};

/// Which design a [`TrialOutcome`] belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(into = "String", try_from = "String")
)]
pub enum DesignLabel {
    /// Flexible design, conventional final test.
    F2in1,
    /// Fixed-size 2-in-1 with the given total phase 3 events.
    S2in1 { events: u32 },
    /// Flexible design, CHW final test.
    F2in1Chw,
}

impl fmt::Display for DesignLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DesignLabel::F2in1 => f.write_str("F2in1"),
            DesignLabel::S2in1 { events } => write!(f, "S2in1-{events}"),
            DesignLabel::F2in1Chw => f.write_str("F2in1-CHW"),
        }
    }
}

impl FromStr for DesignLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "F2in1" => Ok(DesignLabel::F2in1),
            "F2in1-CHW" => Ok(DesignLabel::F2in1Chw),
            _ => s
                .strip_prefix("S2in1-")
                .and_then(|n| n.parse().ok())
                .map(|events| DesignLabel::S2in1 { events })
                .ok_or(Error::InvalidDesign(
                    "design label must be F2in1, F2in1-CHW or S2in1-<events>",
                )),
        }
    }
}

impl From<DesignLabel> for String {
    fn from(l: DesignLabel) -> String {
        l.to_string()
    }
}

impl TryFrom<String> for DesignLabel {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Where the trial ended up after the interim.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Branch {
    Phase2,
    Phase3,
}

/// Decision path of one replicate under one design.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    pub label: DesignLabel,
    /// X > c.
    pub expanded: bool,
    /// Events at the final analysis.
    pub m_final: u32,
    pub rejected: bool,
    pub duration_months: Option<f64>,
}

impl TrialOutcome {
    pub fn branch(&self) -> Branch {
        if self.expanded {
            Branch::Phase3
        } else {
            Branch::Phase2
        }
    }

    pub fn with_duration(mut self, model: &DurationModel) -> Result<Self> {
        self.duration_months = Some(model.duration(self.branch(), self.m_final)?);
        Ok(self)
    }
}

fn phase2_outcome(label: DesignLabel, draw: &StatisticDraw, design: &Design) -> TrialOutcome {
    TrialOutcome {
        label,
        expanded: false,
        m_final: design.params().m_phase2,
        rejected: draw.y > design.z_alpha(),
        duration_months: None,
    }
}

/// Re-estimated final events and the post-interim statistic with its drift.
fn adapted_increment(
    draw: &StatisticDraw,
    scenario: &EffectScenario,
    design: &Design,
) -> Result<(u32, f64)> {
    let m_final = design.reestimate(draw.z1)?.final_events();
    let m2 = m_final - design.params().m1;
    let z_incr = draw.z2_incr_unit + logrank_drift(scenario.hr_os, f64::from(m2));
    Ok((m_final, z_incr))
}

fn pooled(z1: f64, z_incr: f64, m1: u32, m_final: u32) -> f64 {
    let n = f64::from(m_final);
    let n1 = f64::from(m1);
    z1 * libm::sqrt(n1 / n) + z_incr * libm::sqrt((n - n1) / n)
}

/// Whether the F2in1 phase 3 test rejects on this draw, ignoring the cutoff.
pub fn f2in1_phase3_rejects(
    draw: &StatisticDraw,
    scenario: &EffectScenario,
    design: &Design,
) -> Result<bool> {
    let (m_final, z_incr) = adapted_increment(draw, scenario, design)?;
    Ok(pooled(draw.z1, z_incr, design.params().m1, m_final) > design.z_alpha())
}

/// Flexible design: expand on X > c, re-estimate from z1, conventional pooled test.
pub fn run_f2in1(
    draw: &StatisticDraw,
    scenario: &EffectScenario,
    design: &Design,
) -> Result<TrialOutcome> {
    if draw.x <= design.params().c {
        return Ok(phase2_outcome(DesignLabel::F2in1, draw, design));
    }
    let (m_final, z_incr) = adapted_increment(draw, scenario, design)?;
    let z2 = pooled(draw.z1, z_incr, design.params().m1, m_final);
    Ok(TrialOutcome {
        label: DesignLabel::F2in1,
        expanded: true,
        m_final,
        rejected: z2 > design.z_alpha(),
        duration_months: None,
    })
}

/// Fixed-size 2-in-1: expand on X > c to exactly `m_phase3` total events.
pub fn run_s2in1(
    draw: &StatisticDraw,
    scenario: &EffectScenario,
    design: &Design,
    m_phase3: u32,
) -> Result<TrialOutcome> {
    let m1 = design.params().m1;
    if m_phase3 <= m1 {
        return Err(Error::InvalidDesign("S2in1 phase 3 events must exceed m1"));
    }
    let label = DesignLabel::S2in1 { events: m_phase3 };
    if draw.x <= design.params().c {
        return Ok(phase2_outcome(label, draw, design));
    }
    let z_incr = draw.z2_incr_unit + logrank_drift(scenario.hr_os, f64::from(m_phase3 - m1));
    let z2 = pooled(draw.z1, z_incr, m1, m_phase3);
    Ok(TrialOutcome {
        label,
        expanded: true,
        m_final: m_phase3,
        rejected: z2 > design.z_alpha(),
        duration_months: None,
    })
}

/// Flexible design with the CHW final test (planned weights).
pub fn run_chw(
    draw: &StatisticDraw,
    scenario: &EffectScenario,
    design: &Design,
) -> Result<TrialOutcome> {
    if draw.x <= design.params().c {
        return Ok(phase2_outcome(DesignLabel::F2in1Chw, draw, design));
    }
    let (m_final, z_incr) = adapted_increment(draw, scenario, design)?;
    Ok(TrialOutcome {
        label: DesignLabel::F2in1Chw,
        expanded: true,
        m_final,
        rejected: design.chw_statistic(draw.z1, z_incr) > design.z_alpha(),
        duration_months: None,
    })
}

/// Dispatch on `label`.
pub fn run_design(
    label: DesignLabel,
    draw: &StatisticDraw,
    scenario: &EffectScenario,
    design: &Design,
) -> Result<TrialOutcome> {
    match label {
        DesignLabel::F2in1 => run_f2in1(draw, scenario, design),
        DesignLabel::S2in1 { events } => run_s2in1(draw, scenario, design, events),
        DesignLabel::F2in1Chw => run_chw(draw, scenario, design),
    }
}
