//! Calendar time needed to reach an event target under uniform accrual and
//! exponential survival. None of this is pinned down by the design itself:
//! every duration it produces depends on the configured accrual model.

use crate::design::EffectScenario;
use crate::error::{Error, Result};
use crate::numerics::{find_root, Bracket};
use crate::sim::Branch;

/// Uniform enrolment with 1:1 randomisation and exponential control survival.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(deny_unknown_fields)
)]
pub struct AccrualModel {
    /// Patients enrolled per month.
    pub rate: f64,
    /// Median OS on control, months.
    pub control_median_os: f64,
    /// Median PFS on control, months.
    pub control_median_pfs: f64,
    /// Enrolment cap when the trial stays in phase 2.
    pub phase2_patients: u32,
    /// Enrolment cap when the trial expands to phase 3.
    pub phase3_patients: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoint {
    Os,
    Pfs,
}

impl AccrualModel {
    pub fn validate(&self) -> Result<()> {
        let positive = [self.rate, self.control_median_os, self.control_median_pfs]
            .iter()
            .all(|v| *v > 0.0 && v.is_finite());
        if !positive || self.phase2_patients == 0 || self.phase3_patients == 0 {
            return Err(Error::Domain {
                what: "accrual model parameter",
                value: self.rate,
            });
        }
        Ok(())
    }

    /// Default calibration: 120 patients enrolled by month 20 (rate 6/month)
    /// with 60 OS events at that point, and 118 PFS events at month 31 from a
    /// 180-patient phase 2; 500 patients if expanded.
    pub fn calibrated() -> Result<Self> {
        let rate = 6.0;
        Ok(Self {
            rate,
            control_median_os: calibrate_median(60.0, 20.0, rate, 120)?,
            control_median_pfs: calibrate_median(118.0, 31.0, rate, 180)?,
            phase2_patients: 180,
            phase3_patients: 500,
        })
    }

    pub fn control_hazard(&self, endpoint: Endpoint) -> f64 {
        let median = match endpoint {
            Endpoint::Os => self.control_median_os,
            Endpoint::Pfs => self.control_median_pfs,
        };
        core::f64::consts::LN_2 / median
    }
}

/// Expected events by calendar time `time` when `n_cap` patients enrol at
/// `rate` per month, half per arm, with arm hazards λ and λ·hr.
pub fn expected_events(time: f64, rate: f64, n_cap: u32, control_hazard: f64, hr: f64) -> f64 {
    if time <= 0.0 {
        return 0.0;
    }
    let accrual_end = time.min(f64::from(n_cap) / rate);
    let per_arm_rate = 0.5 * rate;
    let arm = |lambda: f64| {
        // ∫₀^A (1 − e^{−λ(T−e)}) de
        let tail = -libm::exp(-lambda * (time - accrual_end)) * libm::expm1(-lambda * accrual_end)
            / lambda;
        per_arm_rate * (accrual_end - tail)
    };
    arm(control_hazard) + arm(control_hazard * hr)
}

/// Smallest calendar time with `m_target` expected events.
pub fn expected_duration(
    m_target: f64,
    scenario: &EffectScenario,
    accrual: &AccrualModel,
    endpoint: Endpoint,
    n_cap: u32,
) -> Result<f64> {
    accrual.validate()?;
    if m_target.is_nan() || m_target < 0.0 {
        return Err(Error::Domain {
            what: "event target",
            value: m_target,
        });
    }
    if m_target == 0.0 {
        return Ok(0.0);
    }
    let max_events = f64::from(n_cap);
    if m_target >= max_events {
        return Err(Error::Saturation {
            target: m_target,
            max_events,
        });
    }
    let hr = match endpoint {
        Endpoint::Os => scenario.hr_os,
        Endpoint::Pfs => scenario.hr_pfs,
    };
    let lambda = accrual.control_hazard(endpoint);
    let g = |t: f64| expected_events(t, accrual.rate, n_cap, lambda, hr) - m_target;
    let mut hi = 1.0;
    while g(hi) < 0.0 {
        hi *= 2.0;
        if hi > 1e9 {
            return Err(Error::Saturation {
                target: m_target,
                max_events,
            });
        }
    }
    find_root(g, Bracket::new(0.0, hi, g)?, 1e-9)
}

/// Control median for which `events` are expected at `time` under hr = 1.
pub fn calibrate_median(events: f64, time: f64, rate: f64, n_cap: u32) -> Result<f64> {
    let g = |lambda: f64| expected_events(time, rate, n_cap, lambda, 1.0) - events;
    let lambda = find_root(g, Bracket::new(1e-6, 50.0, g)?, 1e-14)?;
    Ok(core::f64::consts::LN_2 / lambda)
}

/// Durations for the two branches of one scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DurationModel {
    pub scenario: EffectScenario,
    pub accrual: AccrualModel,
}

impl DurationModel {
    pub fn duration(&self, branch: Branch, events: u32) -> Result<f64> {
        let (endpoint, cap) = match branch {
            Branch::Phase2 => (Endpoint::Pfs, self.accrual.phase2_patients),
            Branch::Phase3 => (Endpoint::Os, self.accrual.phase3_patients),
        };
        expected_duration(
            f64::from(events),
            &self.scenario,
            &self.accrual,
            endpoint,
            cap,
        )
    }
}
