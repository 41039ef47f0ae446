//! Run configuration. TOML or JSON, chosen by file extension; unknown keys
//! are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use twoin1_core::type1::UNBOUNDED_CAP_RATIO;
use twoin1_core::{AccrualModel, Design, DesignLabel, DesignParams, EffectScenario};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub design: DesignParams,
    #[serde(default)]
    pub scenarios: Vec<NamedScenario>,
    #[serde(default = "default_designs")]
    pub designs: Vec<DesignLabel>,
    #[serde(default)]
    pub replicates: Replicates,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accrual: Option<AccrualSpec>,
    #[serde(default)]
    pub sweeps: Sweeps,
    #[serde(default)]
    pub output: Output,
}

fn default_designs() -> Vec<DesignLabel> {
    vec![
        DesignLabel::F2in1,
        DesignLabel::S2in1 { events: 180 },
        DesignLabel::S2in1 { events: 330 },
        DesignLabel::F2in1Chw,
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedScenario {
    pub name: String,
    pub hr_os: f64,
    pub hr_pfs: f64,
    pub orr_c: f64,
    pub orr_t: f64,
    #[serde(default = "default_interim_per_arm")]
    pub n_per_arm_interim: u32,
}

fn default_interim_per_arm() -> u32 {
    60
}

impl NamedScenario {
    pub fn scenario(&self) -> EffectScenario {
        EffectScenario {
            hr_os: self.hr_os,
            hr_pfs: self.hr_pfs,
            orr_c: self.orr_c,
            orr_t: self.orr_t,
            n_per_arm_interim: self.n_per_arm_interim,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Replicates {
    #[serde(default = "default_null")]
    pub null: u64,
    #[serde(default = "default_alternative")]
    pub alternative: u64,
    /// Null replicates for the empirical C_min; skipped when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub empirical_cmin: Option<u64>,
}

fn default_null() -> u64 {
    100_000
}

fn default_alternative() -> u64 {
    10_000
}

impl Default for Replicates {
    fn default() -> Self {
        Self {
            null: default_null(),
            alternative: default_alternative(),
            empirical_cmin: None,
        }
    }
}

impl Replicates {
    pub fn for_scenario(&self, s: &EffectScenario) -> u64 {
        if s.is_null() {
            self.null
        } else {
            self.alternative
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AccrualPreset {
    /// 6 patients/month; medians solved from 60 OS events at month 20 and
    /// 118 PFS events at month 31.
    Calibrated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AccrualSpec {
    Preset { preset: AccrualPreset },
    Explicit(AccrualModel),
}

impl AccrualSpec {
    pub fn resolve(&self) -> Result<AccrualModel> {
        let model = match self {
            AccrualSpec::Preset {
                preset: AccrualPreset::Calibrated,
            } => AccrualModel::calibrated()?,
            AccrualSpec::Explicit(m) => *m,
        };
        model.validate()?;
        Ok(model)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweeps {
    /// (ρ_XY, ρ_XZ) pairs.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rho_pairs: Vec<[f64; 2]>,
    /// m_max / m_total; values at or above 10^6 stand for no cap.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cap_ratios: Vec<f64>,
    /// Interim information fractions, applied at the configured m_total.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub info_fractions: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub c_grid: Vec<f64>,
    /// `[start, stop, step]`, appended to `c_grid`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_range: Option<[f64; 3]>,
    /// Interim cutoffs for `oc` and `power-study`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cutoffs: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub m_max_values: Vec<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rho_xz_values: Vec<f64>,
    /// Common hazard ratio for OS and PFS.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub hr: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub orr_c: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub orr_t: Vec<f64>,
    /// (ORR_c, ORR_t) pairs; replaces the `orr_c` × `orr_t` product.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub orr_pairs: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format {s:?} (expected csv or json)")),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Output {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let config_err = |message: String| CliError::Config {
            path: path.to_path_buf(),
            message,
        };
        let text = std::fs::read_to_string(path).map_err(|e| config_err(e.to_string()))?;
        let config: RunConfig = match path.extension().and_then(|e| e.to_str()) {
            Some("toml") => toml::from_str(&text).map_err(|e| config_err(e.to_string()))?,
            Some("json") => serde_json::from_str(&text).map_err(|e| config_err(e.to_string()))?,
            _ => return Err(config_err("expected a .toml or .json file".into())),
        };
        config.validate().map_err(|e| config_err(e.to_string()))?;
        Ok(config)
    }

    /// Checks everything that can be checked before computing.
    pub fn validate(&self) -> Result<()> {
        Design::new(self.design)?;
        for s in &self.scenarios {
            s.scenario().validate()?;
        }
        for label in &self.designs {
            if let DesignLabel::S2in1 { events } = label {
                if *events <= self.design.m1 {
                    return Err(CliError::Invalid(format!(
                        "{label}: phase 3 events must exceed m1 = {}",
                        self.design.m1
                    )));
                }
            }
        }
        if let Some(a) = &self.accrual {
            a.resolve()?;
        }
        let r = &self.replicates;
        if r.null == 0 || r.alternative == 0 {
            return Err(CliError::Invalid(
                "replicate counts must be positive".into(),
            ));
        }
        let sw = &self.sweeps;
        for &[xy, xz] in &sw.rho_pairs {
            if !(0.0..1.0).contains(&xy) || !(0.0..1.0).contains(&xz) {
                return Err(CliError::Invalid(format!("correlation pair ({xy}, {xz})")));
            }
        }
        if let Some(&r) = sw.cap_ratios.iter().find(|r| r.is_nan() || **r < 1.0) {
            return Err(CliError::Invalid(format!("cap ratio {r} is below 1")));
        }
        if let Some(&t) = sw.info_fractions.iter().find(|t| !(**t > 0.0 && **t < 1.0)) {
            return Err(CliError::Invalid(format!("information fraction {t}")));
        }
        if let Some([start, stop, step]) = sw.c_range {
            if !(step > 0.0 && stop >= start) {
                return Err(CliError::Invalid(
                    "c_range needs start ≤ stop and step > 0".into(),
                ));
            }
        }
        if sw.c_grid.windows(2).any(|w| w[0].is_nan() || w[0] >= w[1]) {
            return Err(CliError::Invalid(
                "c_grid must be strictly increasing".into(),
            ));
        }
        Ok(())
    }

    pub fn base_design(&self) -> Result<Design> {
        Ok(Design::new(self.design)?)
    }

    /// `c_grid` followed by the points of `c_range`.
    pub fn c_values(&self) -> Vec<f64> {
        let mut out = self.sweeps.c_grid.clone();
        if let Some([start, stop, step]) = self.sweeps.c_range {
            let n = ((stop - start) / step + 1e-9).floor() as usize;
            out.extend((0..=n).map(|k| start + k as f64 * step));
        }
        out
    }

    pub fn accrual_model(&self) -> Result<Option<AccrualModel>> {
        self.accrual.as_ref().map(AccrualSpec::resolve).transpose()
    }
}

/// Design at information fraction `t` and cap ratio `cap`, holding m_total.
pub fn design_variant(
    base: &DesignParams,
    t: Option<f64>,
    cap: Option<f64>,
    rho: Option<[f64; 2]>,
) -> Result<Design> {
    let m_total = base.m_total();
    let mut p = *base;
    if let Some(t) = t {
        let m1 = (t * f64::from(m_total)).round() as u32;
        if m1 == 0 || m1 >= m_total {
            return Err(CliError::Invalid(format!(
                "information fraction {t} leaves no events on one side of m_total = {m_total}"
            )));
        }
        p.m1 = m1;
        p.m2 = m_total - m1;
        p.m_phase2 = p.m_phase2.max(m1);
    }
    if let Some(cap) = cap {
        let cap = cap.min(UNBOUNDED_CAP_RATIO);
        let m_max = (cap * f64::from(m_total)).round();
        if m_max > f64::from(u32::MAX) {
            return Err(CliError::Invalid(format!(
                "cap ratio {cap} overflows the event count"
            )));
        }
        p.m_max = m_max as u32;
    }
    if let Some([xy, xz]) = rho {
        p.rho_xy = xy;
        p.rho_xz = xz;
    }
    Ok(Design::new(p)?)
}
