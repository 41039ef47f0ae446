//! Overall type-I error of the flexible design as a function of the interim
//! cutoff, and the minimal safe cutoff `C_min`.
//!
//! Under the global null the error splits into
//!
//! - a phase 2 term, Pr(Y > Z_{1−α}, X ≤ c), integrated over the lower tail of X;
//! - a phase 3 term, Pr(Z2 > Z_{1−α}, X > c), integrated over Z1. Given Z1, the
//!   expansion decision and the final test are independent, and the integral is
//!   split at W (above W the planned size is kept) and at the z1 where m_max
//!   starts binding.
//!
//! Each semi-infinite piece is mapped onto (0, 1) with
//! `x = a + s/(1−s)` (upper tail) or `x = a − (1−s)/s` (lower tail).

use alloc::vec::Vec;
use core::ops::Range;

use crate::design::{Design, EffectScenario};
use crate::error::{Error, Result};
use crate::numerics::{
    find_root, integrate_range, integrate_unit, norm_cdf, norm_pdf, Bracket, QuadratureRule,
};
use crate::sim::{f2in1_phase3_rejects, ReplicateGenerator};

/// Lower end of the cutoff scan.
pub const SCAN_LO: f64 = -6.0;
/// Upper end of the cutoff scan.
pub const SCAN_HI: f64 = 6.0;
/// Analytic scan step before root polishing.
pub const SCAN_STEP: f64 = 0.05;
/// Empirical grid step.
pub const EMPIRICAL_STEP: f64 = 0.005;
/// Type-I excess below this counts as no inflation. Keeps quadrature round-off
/// in the far tails from registering as crossings.
pub const EXCESS_SLACK: f64 = 1e-12;
/// Empirical grid points need at least this many replicates with X > c.
pub const EMPIRICAL_MIN_TAIL: usize = 100;
/// Smallest replicate count accepted by [`empirical_cmin`].
pub const EMPIRICAL_MIN_REPLICATES: u64 = 100_000;
/// Stand-in for m_max / m = ∞ in analytic evaluation.
pub const UNBOUNDED_CAP_RATIO: f64 = 1e6;

/// The two parts of the overall type-I error at one cutoff.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Type1Breakdown {
    pub c: f64,
    pub phase2_term: f64,
    pub phase3_term: f64,
    pub total: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cmin {
    Finite(f64),
    /// Type-I error stays below α for every cutoff in the search range.
    UnboundedBelow,
}

impl Cmin {
    pub fn value(&self) -> Option<f64> {
        match *self {
            Cmin::Finite(c) => Some(c),
            Cmin::UnboundedBelow => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CminMethod {
    Analytic,
    Empirical,
}

impl CminMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            CminMethod::Analytic => "analytic",
            CminMethod::Empirical => "empirical",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CminResult {
    pub c_min: Cmin,
    /// |type-I(c_min) − α|; zero for the unbounded sentinel.
    pub residual: f64,
    pub method: CminMethod,
    /// Every cutoff where the curve crosses α, ascending. `c_min` is the largest.
    pub crossings: Vec<f64>,
}

impl CminResult {
    /// Rejects results whose curve crosses α more than once.
    pub fn require_unique(self) -> Result<Self> {
        if self.crossings.len() > 1 {
            return Err(Error::AmbiguousCrossing {
                crossings: self.crossings,
            });
        }
        Ok(self)
    }
}

/// Analytic type-I error for one design.
#[derive(Debug, Clone)]
pub struct Type1Calculator {
    design: Design,
    rule: QuadratureRule,
    sd_xy: f64,
    sd_xz: f64,
    cap_onset: f64,
}

impl Type1Calculator {
    pub fn new(design: Design) -> Self {
        Self::with_rule(design, QuadratureRule::default())
    }

    pub fn with_rule(design: Design, rule: QuadratureRule) -> Self {
        let p = design.params();
        Self {
            sd_xy: libm::sqrt(1.0 - p.rho_xy * p.rho_xy),
            sd_xz: libm::sqrt(1.0 - p.rho_xz * p.rho_xz),
            cap_onset: design.cap_onset(),
            design,
            rule,
        }
    }

    pub fn design(&self) -> &Design {
        &self.design
    }

    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    /// Pr(Y > Z_{1−α} | X = x).
    fn phase2_reject_given_x(&self, x: f64) -> f64 {
        norm_cdf((self.design.params().rho_xy * x - self.design.z_alpha()) / self.sd_xy)
    }

    /// Pr(X > c | Z1 = z1).
    fn expand_given_z1(&self, z1: f64, c: f64) -> f64 {
        norm_cdf((self.design.params().rho_xz * z1 - c) / self.sd_xz)
    }

    /// Pr(Z2 > Z_{1−α} | Z1 = z1) with the continuous re-estimated size.
    fn phase3_reject_given_z1(&self, z1: f64) -> f64 {
        let p = self.design.params();
        let m_star = match self.design.reestimate(z1) {
            Ok(r) => r.m_star,
            Err(_) => return f64::NAN,
        };
        let m1 = f64::from(p.m1);
        norm_cdf(
            (z1 * libm::sqrt(m1) - self.design.z_alpha() * libm::sqrt(m_star))
                / libm::sqrt(m_star - m1),
        )
    }

    /// Pr(Y > Z_{1−α}, X ≤ c), integrated over the lower tail of X.
    pub fn phase2_term(&self, c: f64) -> Result<f64> {
        integrate_unit(
            |s| {
                let x = c - (1.0 - s) / s;
                self.phase2_reject_given_x(x) * norm_pdf(x) / (s * s)
            },
            &self.rule,
        )
    }

    /// Pr(Y > Z_{1−α}, X > c), the complement of [`Self::phase2_term`] within α,
    /// integrated over the upper tail of X.
    pub fn phase2_upper(&self, c: f64) -> Result<f64> {
        integrate_unit(
            |s| {
                let x = c + s / (1.0 - s);
                let d = 1.0 - s;
                self.phase2_reject_given_x(x) * norm_pdf(x) / (d * d)
            },
            &self.rule,
        )
    }

    /// Pr(Z2 > Z_{1−α}, X > c) with re-estimation active.
    pub fn phase3_term(&self, c: f64) -> Result<f64> {
        let w = self.design.promising_threshold();
        // z1 ∈ [W, ∞): planned size kept.
        let upper = integrate_unit(
            |s| {
                let z1 = w + s / (1.0 - s);
                let d = 1.0 - s;
                self.phase3_reject_given_z1(z1) * self.expand_given_z1(z1, c) * norm_pdf(z1)
                    / (d * d)
            },
            &self.rule,
        )?;
        // z1 ∈ (−∞, W): re-estimated, capped below the cap onset.
        let lower_integrand = |s: f64| {
            let z1 = w - (1.0 - s) / s;
            self.phase3_reject_given_z1(z1) * self.expand_given_z1(z1, c) * norm_pdf(z1) / (s * s)
        };
        let lower = if self.cap_onset < w {
            let s_cap = 1.0 / (1.0 + w - self.cap_onset);
            integrate_range(lower_integrand, 0.0, s_cap, &self.rule)?
                + integrate_range(lower_integrand, s_cap, 1.0, &self.rule)?
        } else {
            integrate_unit(lower_integrand, &self.rule)?
        };
        Ok(upper + lower)
    }

    pub fn overall(&self, c: f64) -> Result<Type1Breakdown> {
        let phase2_term = self.phase2_term(c)?;
        let phase3_term = self.phase3_term(c)?;
        Ok(Type1Breakdown {
            c,
            phase2_term,
            phase3_term,
            total: phase2_term + phase3_term,
        })
    }

    /// type-I(c) − α, formed as Pr(Z2 rejects, X > c) − Pr(Y rejects, X > c)
    /// so it stays accurate where both parts are tiny.
    pub fn excess(&self, c: f64) -> Result<f64> {
        Ok(self.phase3_term(c)? - self.phase2_upper(c)?)
    }

    /// Largest cutoff at which the type-I error crosses α.
    ///
    /// Scans `[SCAN_LO, SCAN_HI]` in steps of `SCAN_STEP`, polishes every
    /// crossing with the bracketed root finder and reports the largest.
    pub fn solve_cmin(&self) -> Result<CminResult> {
        let steps = libm::round((SCAN_HI - SCAN_LO) / SCAN_STEP) as usize;
        let grid: Vec<f64> = (0..=steps)
            .map(|k| SCAN_LO + k as f64 * SCAN_STEP)
            .collect();
        let mut values = Vec::with_capacity(grid.len());
        for &c in &grid {
            values.push(self.excess(c)? - EXCESS_SLACK);
        }
        if *values.last().expect("grid is non-empty") > 0.0 {
            return Err(Error::InflatedAtUpperBound { c_hi: SCAN_HI });
        }
        let mut crossings = Vec::new();
        for k in 0..grid.len() - 1 {
            let (a, b) = (values[k], values[k + 1]);
            if (a > 0.0) != (b > 0.0) {
                let bracket = Bracket::from_values(grid[k], grid[k + 1], a, b)?;
                let root = find_root(
                    |c| self.excess(c).map_or(f64::NAN, |e| e - EXCESS_SLACK),
                    bracket,
                    crate::numerics::DEFAULT_TOL,
                )?;
                crossings.push(root);
            }
        }
        let alpha = self.design.params().alpha;
        match crossings.last() {
            None => Ok(CminResult {
                c_min: Cmin::UnboundedBelow,
                residual: 0.0,
                method: CminMethod::Analytic,
                crossings,
            }),
            Some(&c) => Ok(CminResult {
                c_min: Cmin::Finite(c),
                residual: (self.overall(c)?.total - alpha).abs(),
                method: CminMethod::Analytic,
                crossings,
            }),
        }
    }
}

/// One null replicate reduced to what the type-I curve needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NullRecord {
    pub x: f64,
    /// Y > Z_{1−α}.
    pub phase2_reject: bool,
    /// The F2in1 phase 3 test would reject (independent of the cutoff).
    pub phase3_reject: bool,
    /// Pr(Y > Z_{1−α} | X = x).
    pub phase2_prob: f64,
    /// Pr(Z2 > Z_{1−α} | Z1 = z1) at the rounded re-estimated size.
    pub phase3_prob: f64,
}

/// Simulated null replicates sorted by X.
///
/// Raw rejection indicators give the empirical type-I error with its binomial
/// standard error. The C_min search instead averages the conditional rejection
/// probabilities given the simulated X and Z1, which removes the noise of the
/// Y and Z̃2 draws.
#[derive(Debug, Clone)]
pub struct NullSample {
    xs: Vec<f64>,
    /// `phase2_le[k]`: phase 2 rejections among the k smallest X.
    phase2_le: Vec<u32>,
    /// `phase3_gt[k]`: phase 3 rejections among replicates k.. (sorted order).
    phase3_gt: Vec<u32>,
    /// Suffix sums of `phase3_prob − phase2_prob` and of its square.
    diff_gt: Vec<f64>,
    diff_sq_gt: Vec<f64>,
}

/// Grid points whose excess is below this many standard errors are treated
/// as noise when deciding whether any inflation exists.
pub const EMPIRICAL_SIGNIFICANCE: f64 = 3.0;

impl NullSample {
    /// Null records for replicate indices `range`, keyed by `(seed, index)`.
    pub fn simulate_range(
        design: &Design,
        seed: u64,
        range: Range<u64>,
    ) -> Result<Vec<NullRecord>> {
        let scenario = EffectScenario::null(0.1, 60);
        let generator = ReplicateGenerator::new(design, &scenario)?;
        let p = design.params();
        let za = design.z_alpha();
        let sd_xy = libm::sqrt(1.0 - p.rho_xy * p.rho_xy);
        let m1 = f64::from(p.m1);
        let mut out = Vec::with_capacity((range.end - range.start) as usize);
        for i in range {
            let draw = generator.draw(&mut crate::sim::replicate_rng(seed, i));
            let m = f64::from(design.reestimate(draw.z1)?.final_events());
            out.push(NullRecord {
                x: draw.x,
                phase2_reject: draw.y > za,
                phase3_reject: f2in1_phase3_rejects(&draw, &scenario, design)?,
                phase2_prob: norm_cdf((p.rho_xy * draw.x - za) / sd_xy),
                phase3_prob: norm_cdf(
                    (draw.z1 * libm::sqrt(m1) - za * libm::sqrt(m)) / libm::sqrt(m - m1),
                ),
            });
        }
        Ok(out)
    }

    pub fn simulate(design: &Design, replicates: u64, seed: u64) -> Result<Self> {
        let records = Self::simulate_range(design, seed, 0..replicates)?;
        Ok(Self::from_records(records))
    }

    pub fn from_records(mut records: Vec<NullRecord>) -> Self {
        records.sort_by(|a, b| a.x.total_cmp(&b.x));
        let n = records.len();
        let mut phase2_le = Vec::with_capacity(n + 1);
        let mut acc = 0u32;
        phase2_le.push(0);
        for r in &records {
            acc += u32::from(r.phase2_reject);
            phase2_le.push(acc);
        }
        let mut phase3_gt = alloc::vec![0u32; n + 1];
        let mut diff_gt = alloc::vec![0.0; n + 1];
        let mut diff_sq_gt = alloc::vec![0.0; n + 1];
        for k in (0..n).rev() {
            let r = &records[k];
            let d = r.phase3_prob - r.phase2_prob;
            phase3_gt[k] = phase3_gt[k + 1] + u32::from(r.phase3_reject);
            diff_gt[k] = diff_gt[k + 1] + d;
            diff_sq_gt[k] = diff_sq_gt[k + 1] + d * d;
        }
        Self {
            xs: records.into_iter().map(|r| r.x).collect(),
            phase2_le,
            phase3_gt,
            diff_gt,
            diff_sq_gt,
        }
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// Number of replicates with X ≤ c.
    fn split(&self, c: f64) -> usize {
        self.xs.partition_point(|&x| x <= c)
    }

    /// Empirical overall type-I error at cutoff c from the raw indicators.
    pub fn type1(&self, c: f64) -> f64 {
        let k = self.split(c);
        f64::from(self.phase2_le[k] + self.phase3_gt[k]) / self.len() as f64
    }

    /// Binomial standard error of [`Self::type1`].
    pub fn standard_error(&self, c: f64) -> f64 {
        let p = self.type1(c);
        libm::sqrt(p * (1.0 - p) / self.len() as f64)
    }

    /// Estimated type-I(c) − α: the mean over replicates with X > c of
    /// Pr(phase 3 rejects | Z1) − Pr(phase 2 rejects | X). The phase 2 part
    /// uses that Pr(Y > Z_{1−α}) = α exactly under the null.
    pub fn excess(&self, c: f64) -> f64 {
        self.diff_gt[self.split(c)] / self.len() as f64
    }

    /// Standard error of [`Self::excess`].
    pub fn excess_standard_error(&self, c: f64) -> f64 {
        let k = self.split(c);
        let n = self.len() as f64;
        let mean = self.diff_gt[k] / n;
        libm::sqrt((self.diff_sq_gt[k] / n - mean * mean).max(0.0) / n)
    }

    /// Grid search for the largest crossing on steps of `EMPIRICAL_STEP`,
    /// interpolated linearly between the bracketing grid points. Returns the
    /// unbounded sentinel when no grid point shows significant inflation.
    pub fn cmin(&self) -> Result<CminResult> {
        let steps = libm::round((SCAN_HI - SCAN_LO) / EMPIRICAL_STEP) as usize;
        let n = self.len();
        let grid: Vec<f64> = (0..=steps)
            .map(|k| SCAN_LO + k as f64 * EMPIRICAL_STEP)
            .take_while(|&c| n - self.split(c) >= EMPIRICAL_MIN_TAIL)
            .collect();
        if grid.len() < 2 {
            return Err(Error::Domain {
                what: "null sample size",
                value: n as f64,
            });
        }
        let values: Vec<f64> = grid.iter().map(|&c| self.excess(c)).collect();
        let significant =
            |k: usize| values[k] > EMPIRICAL_SIGNIFICANCE * self.excess_standard_error(grid[k]);
        let last = grid.len() - 1;
        if significant(last) {
            return Err(Error::InflatedAtUpperBound { c_hi: grid[last] });
        }
        let mut crossings = Vec::new();
        for k in 0..last {
            let (a, b) = (values[k], values[k + 1]);
            if (a > 0.0) != (b > 0.0) {
                crossings.push(grid[k] + EMPIRICAL_STEP * a / (a - b));
            }
        }
        if values[last] > 0.0 {
            crossings.push(grid[last]);
        }
        let inflated = (0..=last).any(significant);
        Ok(match crossings.last() {
            Some(&c) if inflated => CminResult {
                c_min: Cmin::Finite(c),
                residual: libm::fabs(self.excess(c)),
                method: CminMethod::Empirical,
                crossings,
            },
            _ => CminResult {
                c_min: Cmin::UnboundedBelow,
                residual: 0.0,
                method: CminMethod::Empirical,
                crossings,
            },
        })
    }
}

/// C_min by grid search on `replicates` simulated null trials.
pub fn empirical_cmin(design: &Design, replicates: u64, seed: u64) -> Result<CminResult> {
    if replicates < EMPIRICAL_MIN_REPLICATES {
        return Err(Error::Domain {
            what: "empirical replicate count",
            value: replicates as f64,
        });
    }
    NullSample::simulate(design, replicates, seed)?.cmin()
}
