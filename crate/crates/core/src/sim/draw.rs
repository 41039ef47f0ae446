use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::design::{logrank_drift, Design, EffectScenario};
use crate::error::Result;

/// Test statistics of one replicate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatisticDraw {
    /// Interim surrogate (ORR) statistic.
    pub x: f64,
    /// Final phase 2 (PFS) statistic.
    pub y: f64,
    /// Interim phase 3 (OS) statistic.
    pub z1: f64,
    /// Standard-normal innovation of the post-interim increment; its drift is
    /// added once the post-interim size is known.
    pub z2_incr_unit: f64,
}

/// The RNG stream of replicate `index` under `seed`. Streams are independent
/// of each other and of the order in which replicates run.
pub fn replicate_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Draws correlated statistics for a fixed design and scenario.
///
/// X, Y and Z1 are unit-variance normals with corr(X, Y) = ρ_XY,
/// corr(X, Z1) = ρ_XZ and Y ⟂ Z1 given X, i.e. corr(Y, Z1) = ρ_XY·ρ_XZ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplicateGenerator {
    x_mean: f64,
    y_mean: f64,
    z1_mean: f64,
    rho_xy: f64,
    rho_xz: f64,
    sd_y: f64,
    sd_z1: f64,
}

impl ReplicateGenerator {
    pub fn new(design: &Design, scenario: &EffectScenario) -> Result<Self> {
        scenario.validate()?;
        let p = design.params();
        Ok(Self {
            x_mean: scenario.x_drift(),
            y_mean: logrank_drift(scenario.hr_pfs, f64::from(p.m_phase2)),
            z1_mean: logrank_drift(scenario.hr_os, f64::from(p.m1)),
            rho_xy: p.rho_xy,
            rho_xz: p.rho_xz,
            sd_y: libm::sqrt(1.0 - p.rho_xy * p.rho_xy),
            sd_z1: libm::sqrt(1.0 - p.rho_xz * p.rho_xz),
        })
    }

    /// (E[X], E[Y], E[Z1]).
    pub fn means(&self) -> (f64, f64, f64) {
        (self.x_mean, self.y_mean, self.z1_mean)
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> StatisticDraw {
        let e: [f64; 4] = core::array::from_fn(|_| StandardNormal.sample(rng));
        StatisticDraw {
            x: self.x_mean + e[0],
            y: self.y_mean + self.rho_xy * e[0] + self.sd_y * e[1],
            z1: self.z1_mean + self.rho_xz * e[0] + self.sd_z1 * e[2],
            z2_incr_unit: e[3],
        }
    }
}

/// One replicate for `scenario` under `design`.
pub fn draw_replicate<R: Rng + ?Sized>(
    scenario: &EffectScenario,
    design: &Design,
    rng: &mut R,
) -> Result<StatisticDraw> {
    Ok(ReplicateGenerator::new(design, scenario)?.draw(rng))
}
