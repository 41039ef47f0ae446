use alloc::collections::BTreeMap;

use super::{Branch, DesignLabel, DurationModel, TrialOutcome};
use crate::error::{Error, Result};

/// Integer counts for one design label. Merging is exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tally {
    pub label: DesignLabel,
    pub replicates: u64,
    pub expanded: u64,
    pub rejected_phase2: u64,
    pub rejected_phase3: u64,
    /// Replicate counts per (branch, final events).
    pub events: BTreeMap<(Branch, u32), u64>,
}

impl Tally {
    pub fn new(label: DesignLabel) -> Self {
        Self {
            label,
            replicates: 0,
            expanded: 0,
            rejected_phase2: 0,
            rejected_phase3: 0,
            events: BTreeMap::new(),
        }
    }

    pub fn record(&mut self, outcome: &TrialOutcome) -> Result<()> {
        if outcome.label != self.label {
            return Err(Error::MixedLabels);
        }
        self.replicates += 1;
        if outcome.expanded {
            self.expanded += 1;
            self.rejected_phase3 += u64::from(outcome.rejected);
        } else {
            self.rejected_phase2 += u64::from(outcome.rejected);
        }
        *self
            .events
            .entry((outcome.branch(), outcome.m_final))
            .or_insert(0) += 1;
        Ok(())
    }

    pub fn merge(&mut self, other: &Tally) -> Result<()> {
        if other.label != self.label {
            return Err(Error::MixedLabels);
        }
        self.replicates += other.replicates;
        self.expanded += other.expanded;
        self.rejected_phase2 += other.rejected_phase2;
        self.rejected_phase3 += other.rejected_phase3;
        for (k, v) in &other.events {
            *self.events.entry(*k).or_insert(0) += v;
        }
        Ok(())
    }

    fn branch_sum<F: FnMut(u32) -> Result<f64>>(&self, branch: Branch, mut f: F) -> Result<f64> {
        let mut sum = 0.0;
        for (&(b, m), &count) in &self.events {
            if b == branch {
                sum += count as f64 * f(m)?;
            }
        }
        Ok(sum)
    }

    /// Operating characteristics; durations only when a model is supplied.
    pub fn summary(&self, durations: Option<&DurationModel>) -> Result<OcSummary> {
        if self.replicates == 0 {
            return Err(Error::EmptyOutcomes);
        }
        let n = self.replicates as f64;
        let n3 = self.expanded as f64;
        let n2 = n - n3;
        let events2 = self.branch_sum(Branch::Phase2, |m| Ok(f64::from(m)))?;
        let events3 = self.branch_sum(Branch::Phase3, |m| Ok(f64::from(m)))?;
        let (dur2, dur3) = match durations {
            Some(model) => (
                Some(self.branch_sum(Branch::Phase2, |m| model.duration(Branch::Phase2, m))?),
                Some(self.branch_sum(Branch::Phase3, |m| model.duration(Branch::Phase3, m))?),
            ),
            None => (None, None),
        };
        Ok(OcSummary::from_parts(
            self.label,
            self.replicates,
            self.expanded,
            self.rejected_phase2,
            self.rejected_phase3,
            (events2, events3),
            dur2.zip(dur3),
            n2,
        ))
    }
}

/// Operating characteristics of one design label, with binomial Monte Carlo
/// standard errors for every probability. Conditional quantities are `None`
/// when no replicate took that branch.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct OcSummary {
    pub label: DesignLabel,
    pub replicates: u64,
    pub p_expand: f64,
    pub se_p_expand: f64,
    pub power_overall: f64,
    pub se_power_overall: f64,
    pub power_phase2: Option<f64>,
    pub se_power_phase2: Option<f64>,
    pub power_phase3: Option<f64>,
    pub se_power_phase3: Option<f64>,
    pub expected_events_overall: f64,
    pub expected_events_phase2: Option<f64>,
    pub expected_events_phase3: Option<f64>,
    pub expected_duration_overall: Option<f64>,
    pub expected_duration_phase2: Option<f64>,
    pub expected_duration_phase3: Option<f64>,
}

fn binomial_se(p: f64, n: f64) -> f64 {
    libm::sqrt(p * (1.0 - p) / n)
}

fn ratio(num: f64, den: f64) -> Option<f64> {
    (den > 0.0).then(|| num / den)
}

impl OcSummary {
    #[allow(clippy::too_many_arguments)]
    fn from_parts(
        label: DesignLabel,
        replicates: u64,
        expanded: u64,
        rejected2: u64,
        rejected3: u64,
        (events2, events3): (f64, f64),
        durations: Option<(f64, f64)>,
        n2: f64,
    ) -> Self {
        let n = replicates as f64;
        let n3 = expanded as f64;
        let p_expand = n3 / n;
        let power_overall = (rejected2 + rejected3) as f64 / n;
        let power_phase2 = ratio(rejected2 as f64, n2);
        let power_phase3 = ratio(rejected3 as f64, n3);
        OcSummary {
            label,
            replicates,
            p_expand,
            se_p_expand: binomial_se(p_expand, n),
            power_overall,
            se_power_overall: binomial_se(power_overall, n),
            power_phase2,
            se_power_phase2: power_phase2.map(|p| binomial_se(p, n2)),
            power_phase3,
            se_power_phase3: power_phase3.map(|p| binomial_se(p, n3)),
            expected_events_overall: (events2 + events3) / n,
            expected_events_phase2: ratio(events2, n2),
            expected_events_phase3: ratio(events3, n3),
            expected_duration_overall: durations.map(|(d2, d3)| (d2 + d3) / n),
            expected_duration_phase2: durations.and_then(|(d2, _)| ratio(d2, n2)),
            expected_duration_phase3: durations.and_then(|(_, d3)| ratio(d3, n3)),
        }
    }

    /// p_expand·power₃ + (1 − p_expand)·power₂, which equals `power_overall`.
    pub fn mixture_power(&self) -> f64 {
        self.p_expand * self.power_phase3.unwrap_or(0.0)
            + (1.0 - self.p_expand) * self.power_phase2.unwrap_or(0.0)
    }
}

/// Summarises outcomes of a single design label. Durations are averaged when
/// every outcome carries one.
pub fn aggregate(outcomes: &[TrialOutcome]) -> Result<OcSummary> {
    let first = outcomes.first().ok_or(Error::EmptyOutcomes)?;
    let mut tally = Tally::new(first.label);
    let mut durations = Some((0.0, 0.0));
    for o in outcomes {
        tally.record(o)?;
        durations = match (durations, o.duration_months) {
            (Some((d2, d3)), Some(d)) if o.expanded => Some((d2, d3 + d)),
            (Some((d2, d3)), Some(d)) => Some((d2 + d, d3)),
            _ => None,
        };
    }
    let mut summary = tally.summary(None)?;
    if let Some((d2, d3)) = durations {
        let n = tally.replicates as f64;
        let n3 = tally.expanded as f64;
        summary.expected_duration_overall = Some((d2 + d3) / n);
        summary.expected_duration_phase2 = ratio(d2, n - n3);
        summary.expected_duration_phase3 = ratio(d3, n3);
    }
    Ok(summary)
}
