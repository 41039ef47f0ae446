use alloc::vec::Vec;
use core::ops::Range;

use super::{replicate_rng, run_design, DesignLabel, ReplicateGenerator, Tally};
use crate::design::{Design, EffectScenario};
use crate::error::{Error, Result};

/// Replicates per work unit.
pub const BLOCK_SIZE: u64 = 4096;

/// Partition of `0..replicates` into consecutive blocks.
pub fn blocks(replicates: u64) -> impl Iterator<Item = Range<u64>> {
    (0..replicates.div_ceil(BLOCK_SIZE))
        .map(move |b| b * BLOCK_SIZE..((b + 1) * BLOCK_SIZE).min(replicates))
}

/// Adds `other` into `acc` label by label.
pub fn merge_tallies(acc: &mut [Tally], other: &[Tally]) -> Result<()> {
    if acc.len() != other.len() {
        return Err(Error::MixedLabels);
    }
    for (a, b) in acc.iter_mut().zip(other) {
        a.merge(b)?;
    }
    Ok(())
}

/// Several design arms evaluated on common draws for one scenario.
#[derive(Debug, Clone)]
pub struct SimulationPlan {
    design: Design,
    scenario: EffectScenario,
    labels: Vec<DesignLabel>,
    generator: ReplicateGenerator,
}

impl SimulationPlan {
    pub fn new(design: Design, scenario: EffectScenario, labels: Vec<DesignLabel>) -> Result<Self> {
        let generator = ReplicateGenerator::new(&design, &scenario)?;
        for l in &labels {
            if let DesignLabel::S2in1 { events } = l {
                if *events <= design.params().m1 {
                    return Err(Error::InvalidDesign("S2in1 phase 3 events must exceed m1"));
                }
            }
        }
        Ok(Self {
            design,
            scenario,
            labels,
            generator,
        })
    }

    pub fn design(&self) -> &Design {
        &self.design
    }

    pub fn scenario(&self) -> &EffectScenario {
        &self.scenario
    }

    pub fn labels(&self) -> &[DesignLabel] {
        &self.labels
    }

    pub fn empty_tallies(&self) -> Vec<Tally> {
        self.labels.iter().map(|&l| Tally::new(l)).collect()
    }

    /// Tallies for replicate indices `range`, one per label.
    pub fn run_block(&self, seed: u64, range: Range<u64>) -> Result<Vec<Tally>> {
        let mut tallies = self.empty_tallies();
        for i in range {
            let draw = self.generator.draw(&mut replicate_rng(seed, i));
            for (tally, &label) in tallies.iter_mut().zip(&self.labels) {
                tally.record(&run_design(label, &draw, &self.scenario, &self.design)?)?;
            }
        }
        Ok(tallies)
    }

    /// All replicates on the calling thread.
    pub fn run(&self, seed: u64, replicates: u64) -> Result<Vec<Tally>> {
        let mut acc = self.empty_tallies();
        for range in blocks(replicates) {
            merge_tallies(&mut acc, &self.run_block(seed, range)?)?;
        }
        Ok(acc)
    }
}
