//! The four analysis commands. Each returns a [`Report`] with one row per
//! grid point, scenario or design label.

use serde::Serialize;
use twoin1_core::type1::Type1Calculator;
use twoin1_core::{
    Cmin, CminResult, Design, DesignLabel, DurationModel, EffectScenario, OcSummary, SimulationPlan,
};

use crate::config::{design_variant, RunConfig};
use crate::error::{CliError, Result};
use crate::report::Report;
use crate::runner::Runner;

const SENTINEL: &str = "unbounded-below";
const ANALYTIC: &str = "analytic";
const DURATION_BASIS: &str = "assumption-dependent";

fn fmt_cmin(c: &Cmin) -> String {
    match c {
        Cmin::Finite(v) => format!("{v}"),
        Cmin::UnboundedBelow => SENTINEL.to_string(),
    }
}

fn or_default<T: Copy>(values: &[T], default: T) -> Vec<T> {
    if values.is_empty() {
        vec![default]
    } else {
        values.to_vec()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CminRow {
    pub info_fraction: f64,
    pub m1: u32,
    pub m2: u32,
    pub m_max: u32,
    pub cap_ratio: f64,
    pub rho_xy: f64,
    pub rho_xz: f64,
    pub c_min: String,
    pub residual: f64,
    pub crossings: usize,
    pub source: &'static str,
    pub empirical_c_min: Option<String>,
    pub empirical_residual: Option<f64>,
    pub empirical_replicates: Option<u64>,
}

fn cmin_row(
    design: &Design,
    analytic: &CminResult,
    empirical: Option<(&CminResult, u64)>,
) -> CminRow {
    let p = design.params();
    CminRow {
        info_fraction: design.info_fraction(),
        m1: p.m1,
        m2: p.m2,
        m_max: p.m_max,
        cap_ratio: p.cap_ratio(),
        rho_xy: p.rho_xy,
        rho_xz: p.rho_xz,
        c_min: fmt_cmin(&analytic.c_min),
        residual: analytic.residual,
        crossings: analytic.crossings.len(),
        source: ANALYTIC,
        empirical_c_min: empirical.map(|(r, _)| fmt_cmin(&r.c_min)),
        empirical_residual: empirical.map(|(r, _)| r.residual),
        empirical_replicates: empirical.map(|(_, n)| n),
    }
}

/// Analytic (and optionally empirical) C_min for the configured design, or
/// for every (t, ρ pair, cap ratio) combination when sweeps are given.
pub fn cmin(config: &RunConfig, runner: &Runner) -> Result<Report<CminRow>> {
    let base = config.base_design()?;
    let sw = &config.sweeps;
    let designs: Vec<Design> =
        if sw.rho_pairs.is_empty() && sw.cap_ratios.is_empty() && sw.info_fractions.is_empty() {
            vec![base]
        } else {
            let p = base.params();
            let mut out = Vec::new();
            for &t in &or_default(&sw.info_fractions, base.info_fraction()) {
                for &rho in &or_default(&sw.rho_pairs, [p.rho_xy, p.rho_xz]) {
                    for &cap in &or_default(&sw.cap_ratios, p.cap_ratio()) {
                        let t = (!sw.info_fractions.is_empty()).then_some(t);
                        let cap = (!sw.cap_ratios.is_empty()).then_some(cap);
                        out.push(design_variant(p, t, cap, Some(rho))?);
                    }
                }
            }
            out
        };
    let analytic = runner.map(&designs, |d| Ok(Type1Calculator::new(*d).solve_cmin()?))?;
    let mut empirical = Vec::with_capacity(designs.len());
    if let Some(n) = config.replicates.empirical_cmin {
        if n < twoin1_core::type1::EMPIRICAL_MIN_REPLICATES {
            return Err(CliError::Invalid(format!(
                "empirical_cmin needs at least {} replicates",
                twoin1_core::type1::EMPIRICAL_MIN_REPLICATES
            )));
        }
        for d in &designs {
            empirical.push(Some(runner.null_sample(d, n, config.seed)?.cmin()?));
        }
    } else {
        empirical.resize(designs.len(), None);
    }
    let rows = designs
        .iter()
        .zip(&analytic)
        .zip(&empirical)
        .map(|((d, a), e)| cmin_row(d, a, e.as_ref().zip(config.replicates.empirical_cmin)))
        .collect();
    Ok(Report {
        command: "cmin",
        rows,
        notes: vec![
            format!("c_min is the largest cutoff where type-I error crosses alpha; {SENTINEL} means it never does on [-6, 6]"),
            format!("cap ratios at or above {} stand for an unbounded cap", twoin1_core::type1::UNBOUNDED_CAP_RATIO),
        ],
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CurveRow {
    pub rho_xy: f64,
    pub rho_xz: f64,
    pub cap_ratio: f64,
    pub m_max: u32,
    pub c: f64,
    pub phase2_term: f64,
    pub phase3_term: f64,
    pub total: f64,
    pub source: &'static str,
}

/// Type-I error split over a grid of cutoffs for each (ρ pair, cap ratio).
pub fn type1_curve(config: &RunConfig, runner: &Runner) -> Result<Report<CurveRow>> {
    let c_values = config.c_values();
    if c_values.is_empty() {
        return Err(CliError::Invalid(
            "type1-curve needs sweeps.c_grid or sweeps.c_range".into(),
        ));
    }
    if c_values.windows(2).any(|w| w[0].is_nan() || w[0] >= w[1]) {
        return Err(CliError::Invalid(
            "cutoff grid must be strictly increasing".into(),
        ));
    }
    let base = config.base_design()?;
    let p = base.params();
    let sw = &config.sweeps;
    let mut calcs = Vec::new();
    for &rho in &or_default(&sw.rho_pairs, [p.rho_xy, p.rho_xz]) {
        for &cap in &or_default(&sw.cap_ratios, p.cap_ratio()) {
            let cap = (!sw.cap_ratios.is_empty()).then_some(cap);
            calcs.push(Type1Calculator::new(design_variant(
                p,
                None,
                cap,
                Some(rho),
            )?));
        }
    }
    let jobs: Vec<(usize, f64)> = (0..calcs.len())
        .flat_map(|i| c_values.iter().map(move |&c| (i, c)))
        .collect();
    let rows = runner.map(&jobs, |&(i, c)| {
        let calc = &calcs[i];
        let d = calc.design().params();
        let b = calc.overall(c)?;
        Ok(CurveRow {
            rho_xy: d.rho_xy,
            rho_xz: d.rho_xz,
            cap_ratio: d.cap_ratio(),
            m_max: d.m_max,
            c,
            phase2_term: b.phase2_term,
            phase3_term: b.phase3_term,
            total: b.total,
            source: ANALYTIC,
        })
    })?;
    Ok(Report {
        command: "type1-curve",
        rows,
        notes: vec!["all terms evaluated by quadrature under the global null".into()],
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct OcRow {
    pub c: f64,
    pub m_max: u32,
    pub rho_xz: f64,
    pub scenario: String,
    pub design: DesignLabel,
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
    pub duration_basis: Option<&'static str>,
}

impl OcRow {
    fn new(design: &Design, scenario: &str, s: &OcSummary) -> Self {
        let p = design.params();
        OcRow {
            c: p.c,
            m_max: p.m_max,
            rho_xz: p.rho_xz,
            scenario: scenario.to_string(),
            design: s.label,
            replicates: s.replicates,
            p_expand: s.p_expand,
            se_p_expand: s.se_p_expand,
            power_overall: s.power_overall,
            se_power_overall: s.se_power_overall,
            power_phase2: s.power_phase2,
            se_power_phase2: s.se_power_phase2,
            power_phase3: s.power_phase3,
            se_power_phase3: s.se_power_phase3,
            expected_events_overall: s.expected_events_overall,
            expected_events_phase2: s.expected_events_phase2,
            expected_events_phase3: s.expected_events_phase3,
            expected_duration_overall: s.expected_duration_overall,
            expected_duration_phase2: s.expected_duration_phase2,
            expected_duration_phase3: s.expected_duration_phase3,
            duration_basis: s.expected_duration_overall.map(|_| DURATION_BASIS),
        }
    }
}

/// Runs every configured design label on common draws and summarises.
fn simulate(
    design: Design,
    scenario: EffectScenario,
    config: &RunConfig,
    runner: &Runner,
) -> Result<Vec<OcSummary>> {
    let plan = SimulationPlan::new(design, scenario, config.designs.clone())?;
    let replicates = config.replicates.for_scenario(&scenario);
    let tallies = runner.run_plan(&plan, config.seed, replicates)?;
    let durations = config
        .accrual_model()?
        .map(|accrual| DurationModel { scenario, accrual });
    tallies
        .iter()
        .map(|t| Ok(t.summary(durations.as_ref())?))
        .collect()
}

/// Operating characteristics per (cutoff, m_max, ρ_XZ, scenario, design).
pub fn oc(config: &RunConfig, runner: &Runner) -> Result<Report<OcRow>> {
    if config.scenarios.is_empty() {
        return Err(CliError::Invalid("oc needs at least one scenario".into()));
    }
    let base = config.base_design()?;
    let p = *base.params();
    let sw = &config.sweeps;
    let mut rows = Vec::new();
    for &c in &or_default(&sw.cutoffs, p.c) {
        for &m_max in &or_default(&sw.m_max_values, p.m_max) {
            for &rho_xz in &or_default(&sw.rho_xz_values, p.rho_xz) {
                let design = Design::new(twoin1_core::DesignParams {
                    c,
                    m_max,
                    rho_xz,
                    ..p
                })?;
                for named in &config.scenarios {
                    for s in simulate(design, named.scenario(), config, runner)? {
                        rows.push(OcRow::new(&design, &named.name, &s));
                    }
                }
            }
        }
    }
    let mut notes = vec!["designs within a scenario share draws (common random numbers)".into()];
    if config.accrual.is_some() {
        notes.push("durations depend on the configured accrual and survival model".into());
    }
    Ok(Report {
        command: "oc",
        rows,
        notes,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PowerRow {
    pub hr: f64,
    pub orr_c: f64,
    pub orr_t: f64,
    pub c: f64,
    pub design: DesignLabel,
    pub replicates: u64,
    pub p_expand: f64,
    pub se_p_expand: f64,
    pub power_overall: f64,
    pub se_power_overall: f64,
    pub power_phase3: Option<f64>,
    pub se_power_phase3: Option<f64>,
}

/// Power and expansion probability over HR, ORR and cutoff grids around the
/// first configured scenario. HR sweeps set OS and PFS alike.
pub fn power_study(config: &RunConfig, runner: &Runner) -> Result<Report<PowerRow>> {
    let template = config
        .scenarios
        .first()
        .ok_or_else(|| CliError::Invalid("power-study needs a template scenario".into()))?
        .scenario();
    let base = config.base_design()?;
    let p = *base.params();
    let sw = &config.sweeps;
    let orr_pairs: Vec<[f64; 2]> = if sw.orr_pairs.is_empty() {
        let cs = or_default(&sw.orr_c, template.orr_c);
        let ts = or_default(&sw.orr_t, template.orr_t);
        cs.iter()
            .flat_map(|&c| ts.iter().map(move |&t| [c, t]))
            .collect()
    } else {
        sw.orr_pairs.clone()
    };
    let mut rows = Vec::new();
    for &c in &or_default(&sw.cutoffs, p.c) {
        let design = base.with_cutoff(c)?;
        for &hr in &or_default(&sw.hr, template.hr_os) {
            for &[orr_c, orr_t] in &orr_pairs {
                let scenario = EffectScenario {
                    hr_os: if sw.hr.is_empty() { template.hr_os } else { hr },
                    hr_pfs: if sw.hr.is_empty() {
                        template.hr_pfs
                    } else {
                        hr
                    },
                    orr_c,
                    orr_t,
                    ..template
                };
                scenario.validate()?;
                let plan = SimulationPlan::new(design, scenario, config.designs.clone())?;
                let replicates = config.replicates.for_scenario(&scenario);
                for t in runner.run_plan(&plan, config.seed, replicates)? {
                    let s = t.summary(None)?;
                    rows.push(PowerRow {
                        hr,
                        orr_c,
                        orr_t,
                        c,
                        design: s.label,
                        replicates: s.replicates,
                        p_expand: s.p_expand,
                        se_p_expand: s.se_p_expand,
                        power_overall: s.power_overall,
                        se_power_overall: s.se_power_overall,
                        power_phase3: s.power_phase3,
                        se_power_phase3: s.se_power_phase3,
                    });
                }
            }
        }
    }
    Ok(Report {
        command: "power-study",
        rows,
        notes: vec!["hr applies to both OS and PFS".into()],
    })
}
