//! Work-stealing execution of replicate blocks and grid points.
//!
//! Every block is keyed by replicate indices, not by worker, and tallies merge
//! exactly, so results do not depend on the thread count.

use rayon::prelude::*;
use twoin1_core::sim::{blocks, merge_tallies};
use twoin1_core::type1::NullRecord;
use twoin1_core::{Design, NullSample, SimulationPlan, Tally};

use crate::error::Result;

pub struct Runner {
    pool: rayon::ThreadPool,
}

impl Runner {
    /// `None` lets rayon pick the thread count.
    pub fn new(threads: Option<usize>) -> Result<Self> {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = threads {
            builder = builder.num_threads(n);
        }
        Ok(Self {
            pool: builder.build()?,
        })
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }

    pub fn run_plan(
        &self,
        plan: &SimulationPlan,
        seed: u64,
        replicates: u64,
    ) -> Result<Vec<Tally>> {
        let ranges: Vec<_> = blocks(replicates).collect();
        let parts = self.pool.install(|| {
            ranges
                .into_par_iter()
                .map(|r| plan.run_block(seed, r))
                .collect::<Result<Vec<_>, _>>()
        })?;
        let mut acc = plan.empty_tallies();
        for part in &parts {
            merge_tallies(&mut acc, part)?;
        }
        Ok(acc)
    }

    pub fn null_sample(&self, design: &Design, replicates: u64, seed: u64) -> Result<NullSample> {
        let ranges: Vec<_> = blocks(replicates).collect();
        let parts = self.pool.install(|| {
            ranges
                .into_par_iter()
                .map(|r| NullSample::simulate_range(design, seed, r))
                .collect::<Result<Vec<_>, _>>()
        })?;
        let records: Vec<NullRecord> = parts.into_iter().flatten().collect();
        Ok(NullSample::from_records(records))
    }

    /// Applies `f` to every item in parallel, keeping input order.
    pub fn map<T, U, F>(&self, items: &[T], f: F) -> Result<Vec<U>>
    where
        T: Sync,
        U: Send,
        F: Fn(&T) -> Result<U> + Sync,
    {
        self.pool
            .install(|| items.par_iter().map(&f).collect::<Result<Vec<_>>>())
    }
}
