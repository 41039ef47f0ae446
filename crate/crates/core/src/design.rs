//! Design parameters and closed-form design calculators.
//!
//! Every size is on one information scale: events for the time-to-event
//! endpoints. The formulas only ever see information fractions, so the same
//! code serves subject counts.

use crate::error::{Error, Result};
use crate::numerics::{norm_cdf, std_normal_quantile};

/// Fixed design quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(deny_unknown_fields)
)]
pub struct DesignParams {
    /// One-sided significance level.
    pub alpha: f64,
    /// Target power 1 − β for re-estimation.
    pub power_target: f64,
    /// Events at the interim analysis.
    pub m1: u32,
    /// Planned post-interim events for phase 3.
    pub m2: u32,
    /// Cap on total phase 3 events after re-estimation.
    pub m_max: u32,
    /// Final event count when the trial stays in phase 2.
    pub m_phase2: u32,
    /// corr(X, Y): surrogate vs phase 2 endpoint.
    pub rho_xy: f64,
    /// corr(X, Z1): surrogate vs interim phase 3 endpoint.
    pub rho_xz: f64,
    /// Interim cutoff on X; the trial expands when X > c.
    pub c: f64,
}

impl DesignParams {
    pub fn m_total(&self) -> u32 {
        self.m1 + self.m2
    }

    /// Ratio m_max / m_total.
    pub fn cap_ratio(&self) -> f64 {
        f64::from(self.m_max) / f64::from(self.m_total())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 0.5) {
            return Err(Error::InvalidDesign("alpha must lie in (0, 0.5)"));
        }
        if !(self.power_target > 0.0 && self.power_target < 1.0) {
            return Err(Error::InvalidDesign("power_target must lie in (0, 1)"));
        }
        if self.m1 == 0 || self.m2 == 0 {
            return Err(Error::InvalidDesign("m1 and m2 must be positive"));
        }
        if self.m_max < self.m_total() {
            return Err(Error::InvalidDesign("m_max must be at least m1 + m2"));
        }
        if self.m_phase2 < self.m1 {
            return Err(Error::InvalidDesign("m_phase2 must be at least m1"));
        }
        for rho in [self.rho_xy, self.rho_xz] {
            if !(0.0..1.0).contains(&rho) {
                return Err(Error::InvalidDesign("correlations must lie in [0, 1)"));
            }
        }
        if self.c.is_nan() {
            return Err(Error::InvalidDesign("cutoff c is NaN"));
        }
        Ok(())
    }

    /// ρ_XY ≥ ρ_XZ, under which the fixed-size design never inflates type-I error.
    /// Violations are allowed but worth a warning.
    pub fn correlation_ordering_holds(&self) -> bool {
        self.rho_xy >= self.rho_xz
    }
}

/// True state of nature for one simulation scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(deny_unknown_fields)
)]
pub struct EffectScenario {
    /// Hazard ratio of the phase 3 endpoint (OS).
    pub hr_os: f64,
    /// Hazard ratio of the phase 2 endpoint (PFS).
    pub hr_pfs: f64,
    /// Control-arm response probability.
    pub orr_c: f64,
    /// Treatment-arm response probability.
    pub orr_t: f64,
    /// Subjects per arm contributing to the interim ORR statistic.
    pub n_per_arm_interim: u32,
}

impl EffectScenario {
    /// Global null with a common response rate.
    pub fn null(orr: f64, n_per_arm_interim: u32) -> Self {
        Self {
            hr_os: 1.0,
            hr_pfs: 1.0,
            orr_c: orr,
            orr_t: orr,
            n_per_arm_interim,
        }
    }

    pub fn is_null(&self) -> bool {
        self.hr_os == 1.0 && self.hr_pfs == 1.0 && self.orr_c == self.orr_t
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.hr_os > 0.0 && self.hr_pfs > 0.0)
            || !self.hr_os.is_finite()
            || !self.hr_pfs.is_finite()
        {
            return Err(Error::InvalidScenario(
                "hazard ratios must be positive and finite",
            ));
        }
        for p in [self.orr_c, self.orr_t] {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::InvalidScenario("response rates must lie in (0, 1)"));
            }
        }
        if self.n_per_arm_interim == 0 {
            return Err(Error::InvalidScenario("n_per_arm_interim must be positive"));
        }
        Ok(())
    }

    /// Mean of the interim ORR statistic.
    pub fn x_drift(&self) -> f64 {
        orr_z_cutoff(self.orr_c, self.orr_t, self.n_per_arm_interim)
    }
}

/// Outcome of event-size re-estimation at the interim.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SsrResult {
    /// Post-interim events after the cap, before rounding.
    pub m2_star: f64,
    /// Post-interim events from the re-estimation formula before the cap
    /// (`m2` in the promising region, +∞ for non-positive z1).
    pub m2_star_uncapped: f64,
    /// Total events after the cap, before rounding.
    pub m_star: f64,
    /// Whether m_max was the binding constraint.
    pub cap_hit: bool,
    /// Conditional power if the planned m2 were kept.
    pub cp_at_planned: f64,
}

impl SsrResult {
    /// Total events at the final analysis, rounded to the nearest integer.
    pub fn final_events(&self) -> u32 {
        libm::round(self.m_star) as u32
    }
}

/// Validated design with the quantiles and threshold it keeps needing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Design {
    params: DesignParams,
    z_alpha: f64,
    z_beta: f64,
    t: f64,
    w: f64,
}

impl Design {
    pub fn new(params: DesignParams) -> Result<Self> {
        params.validate()?;
        let z_alpha = std_normal_quantile(1.0 - params.alpha)?;
        let z_beta = std_normal_quantile(params.power_target)?;
        let t = f64::from(params.m1) / f64::from(params.m_total());
        let w = z_alpha * libm::sqrt(t) + z_beta * libm::sqrt(t * (1.0 - t));
        Ok(Self {
            params,
            z_alpha,
            z_beta,
            t,
            w,
        })
    }

    pub fn params(&self) -> &DesignParams {
        &self.params
    }

    /// Copy of this design with a different interim cutoff.
    pub fn with_cutoff(&self, c: f64) -> Result<Self> {
        Self::new(DesignParams { c, ..self.params })
    }

    /// Z_{1−α}.
    pub fn z_alpha(&self) -> f64 {
        self.z_alpha
    }

    /// Z_{1−β}.
    pub fn z_beta(&self) -> f64 {
        self.z_beta
    }

    /// t = m1 / (m1 + m2).
    pub fn info_fraction(&self) -> f64 {
        self.t
    }

    /// W = Z_{1−α}√t + Z_{1−β}√(t(1−t)): the interim z1 below which the
    /// conditional power at the planned size falls short of the target.
    pub fn promising_threshold(&self) -> f64 {
        self.w
    }

    /// Conditional power of the final test given z1 and `m2_star` post-interim
    /// events, under the current-trend drift z1/√m1.
    ///
    /// The critical-value term keeps the planned sizes, so this is the exact
    /// inverse of [`Design::reestimate`]: CP(z1, m2*(z1)) = 1 − β.
    pub fn conditional_power(&self, z1: f64, m2_star: f64) -> Result<f64> {
        if m2_star.is_nan() || m2_star <= 0.0 {
            return Err(Error::Domain {
                what: "post-interim events",
                value: m2_star,
            });
        }
        if z1.is_nan() {
            return Err(Error::Domain {
                what: "interim statistic",
                value: z1,
            });
        }
        let p = &self.params;
        let n = f64::from(p.m_total());
        let n1 = f64::from(p.m1);
        let n2 = f64::from(p.m2);
        let arg = (self.z_alpha * libm::sqrt(n) - z1 * libm::sqrt(n1)) / libm::sqrt(n2)
            - z1 * libm::sqrt(m2_star) / libm::sqrt(n1);
        Ok(norm_cdf(-arg))
    }

    /// Promising-zone event re-estimation with the m_max cap.
    ///
    /// z1 ≥ W keeps the planned m2. Below W the post-interim events solve
    /// CP = 1 − β; a non-positive z1 has no finite solution and takes the cap.
    pub fn reestimate(&self, z1: f64) -> Result<SsrResult> {
        let cp_at_planned = self.conditional_power(z1, f64::from(self.params.m2))?;
        let uncapped = self.m2_star_uncapped(z1);
        let m1 = f64::from(self.params.m1);
        let m_max = f64::from(self.params.m_max);
        let wanted = m1 + uncapped;
        let (m_star, cap_hit) = if wanted > m_max {
            (m_max, true)
        } else {
            (wanted, false)
        };
        Ok(SsrResult {
            m2_star: m_star - m1,
            m2_star_uncapped: uncapped,
            m_star,
            cap_hit,
            cp_at_planned,
        })
    }

    fn m2_star_uncapped(&self, z1: f64) -> f64 {
        let p = &self.params;
        if z1 >= self.w {
            return f64::from(p.m2);
        }
        if z1 <= 0.0 {
            return f64::INFINITY;
        }
        let n = f64::from(p.m_total());
        let n1 = f64::from(p.m1);
        let n2 = f64::from(p.m2);
        let inner =
            (self.z_alpha * libm::sqrt(n) - z1 * libm::sqrt(n1)) / libm::sqrt(n2) + self.z_beta;
        n1 / (z1 * z1) * inner * inner
    }

    /// The z1 in (0, W] at which re-estimation starts hitting m_max; below it
    /// the final size is m_max. Equals W when m_max = m1 + m2.
    pub fn cap_onset(&self) -> f64 {
        let t = self.t;
        let r = self.params.cap_ratio();
        let b = self.w / libm::sqrt(t * (1.0 - t));
        let k = libm::sqrt(t / (1.0 - t));
        let z = libm::sqrt(t) * b / (libm::sqrt(r - t) + libm::sqrt(t) * k);
        z.min(self.w)
    }

    /// CHW combination statistic with weights fixed by the planned m1 and m2.
    pub fn chw_statistic(&self, z1: f64, z2_incr: f64) -> f64 {
        let n = f64::from(self.params.m_total());
        z1 * libm::sqrt(f64::from(self.params.m1) / n)
            + z2_incr * libm::sqrt(f64::from(self.params.m2) / n)
    }

    /// Events needed for the target power against `hr` at this design's α.
    pub fn logrank_events(&self, hr: f64) -> Result<u32> {
        logrank_events(hr, self.params.alpha, self.params.power_target)
    }
}

/// Schoenfeld event count 4(Z_{1−α} + Z_{1−β})² / (ln hr)² for 1:1
/// allocation, rounded to the nearest integer.
pub fn logrank_events(hr: f64, alpha: f64, power: f64) -> Result<u32> {
    if !(hr > 0.0 && hr < 1.0) {
        return Err(Error::Domain {
            what: "hazard ratio",
            value: hr,
        });
    }
    let za = std_normal_quantile(1.0 - alpha)?;
    let zb = std_normal_quantile(power)?;
    let l = libm::log(hr);
    Ok(libm::round(4.0 * (za + zb) * (za + zb) / (l * l)) as u32)
}

/// Expected log-rank statistic (√events / 2)·ln(1/hr) under 1:1 allocation.
pub fn logrank_drift(hr: f64, events: f64) -> f64 {
    0.5 * libm::sqrt(events) * -libm::log(hr)
}

/// Two-proportion z statistic with unpooled variance.
pub fn orr_z_cutoff(orr_c: f64, orr_t: f64, n_per_arm: u32) -> f64 {
    let n = f64::from(n_per_arm);
    let var = (orr_t * (1.0 - orr_t) + orr_c * (1.0 - orr_c)) / n;
    (orr_t - orr_c) / libm::sqrt(var)
}
