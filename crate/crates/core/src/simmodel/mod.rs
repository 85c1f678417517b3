//! Joint normal law of the standardized score statistics.
//!
//! Statistics are indexed by endpoint (early, final), stage and unit, where a
//! unit is an experimental arm compared with control (treatment selection)
//! or a population, subgroup first and full population second (subgroup
//! selection). Vectors are laid out endpoint-major, then stage, then unit.

mod covariance;
mod effects;
mod model;

pub use covariance::{
    compound_symmetry, endpoint_stage_block, group_sequential_correlation, kronecker,
    nested_population_correlation,
};
pub use effects::{effect_to_expectation, expected_z};
pub use model::{
    build_cumulative_score_model, build_score_model, resolve_prevalence, sample_replication,
    PrevalenceDraw, ScoreLayout, ScoreModel, StageStatistics,
};

use crate::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OutcomeType {
    /// Normally distributed outcome; effects are standardized mean differences.
    Normal,
    /// Time to event under an exponential model.
    TimeToEvent,
    /// Binary event indicator; effects are event rates.
    Binary,
}

impl OutcomeType {
    pub fn code(self) -> &'static str {
        match self {
            OutcomeType::Normal => "N",
            OutcomeType::TimeToEvent => "T",
            OutcomeType::Binary => "B",
        }
    }

    pub fn from_code(code: &str) -> Option<Self> {
        match code {
            "N" => Some(OutcomeType::Normal),
            "T" => Some(OutcomeType::TimeToEvent),
            "B" => Some(OutcomeType::Binary),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Endpoint {
    Early = 0,
    Final = 1,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DesignKind {
    TreatmentSelection,
    SubgroupSelection,
}

/// Who contributes to a block of statistics.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cohort {
    /// Stage-1 patients; subgroup designs see τ·n₁ subgroup patients.
    Stage1,
    /// Stage-2 patients recruited from the full population (all arms).
    Stage2Full,
    /// Stage-2 recruitment restricted to the subgroup at its natural size τ·n₂.
    Stage2SubgroupOnly,
    /// Stage-2 recruitment restricted to the subgroup at the enrichment size.
    Stage2Enriched,
}

/// Effect parameters for both endpoints.
///
/// Treatment designs list the control arm first, then the K experimental
/// arms. Subgroup designs list the subgroup effect first, then the full
/// population, with control parameters in `subgroup_control`.
///
/// Parameter scales per outcome type:
///
/// | outcome | treatment design | subgroup design |
/// |---|---|---|
/// | N | mean | mean difference (control default 0) |
/// | T | minus log hazard rate | hazard ratio (control minus log hazard, default 0) |
/// | B | event rate | event rate (control rate required) |
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EffectSpec {
    pub design: DesignKind,
    pub early_effects: Vec<f64>,
    pub final_effects: Vec<f64>,
    pub early_outcome: OutcomeType,
    pub final_outcome: OutcomeType,
    /// Control parameters (early, final); subgroup designs only.
    pub subgroup_control: Option<(f64, f64)>,
    /// Patient-level correlation between the early and the final outcome.
    pub correlation: f64,
}

impl EffectSpec {
    /// Number of compared units: experimental arms or populations.
    pub fn units(&self) -> usize {
        match self.design {
            DesignKind::TreatmentSelection => self.final_effects.len().saturating_sub(1),
            DesignKind::SubgroupSelection => self.final_effects.len(),
        }
    }

    pub fn effects(&self, endpoint: Endpoint) -> &[f64] {
        match endpoint {
            Endpoint::Early => &self.early_effects,
            Endpoint::Final => &self.final_effects,
        }
    }

    pub fn outcome(&self, endpoint: Endpoint) -> OutcomeType {
        match endpoint {
            Endpoint::Early => self.early_outcome,
            Endpoint::Final => self.final_outcome,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: String| Err(Error::InvalidScenario(msg));
        if self.early_effects.len() != self.final_effects.len() {
            return invalid(format!(
                "early and final effect vectors differ in length ({} vs {})",
                self.early_effects.len(),
                self.final_effects.len()
            ));
        }
        match self.design {
            DesignKind::TreatmentSelection => {
                if self.final_effects.len() < 2 {
                    return invalid("treatment designs need a control and at least one arm".into());
                }
                if self.subgroup_control.is_some() {
                    return invalid("control parameters belong to subgroup designs only".into());
                }
            }
            DesignKind::SubgroupSelection => {
                if self.final_effects.len() != 2 {
                    return invalid("subgroup designs take exactly two effects (subgroup, full)".into());
                }
            }
        }
        if !(self.correlation.abs() <= 1.0) {
            return invalid(format!("correlation {} outside [-1, 1]", self.correlation));
        }
        for endpoint in [Endpoint::Early, Endpoint::Final] {
            let outcome = self.outcome(endpoint);
            let values = self.effects(endpoint);
            if values.iter().any(|v| !v.is_finite()) {
                return invalid("effects must be finite".into());
            }
            match (self.design, outcome) {
                (_, OutcomeType::Binary) => {
                    if values.iter().any(|&p| !(p > 0.0 && p < 1.0)) {
                        return invalid("binary effects are event rates in (0, 1)".into());
                    }
                }
                (DesignKind::SubgroupSelection, OutcomeType::TimeToEvent) => {
                    if values.iter().any(|&h| h <= 0.0) {
                        return invalid("hazard ratios must be positive".into());
                    }
                }
                _ => {}
            }
            if self.design == DesignKind::SubgroupSelection && outcome == OutcomeType::Binary {
                match self.subgroup_control {
                    Some((early, fin)) => {
                        let c = if endpoint == Endpoint::Early { early } else { fin };
                        if !(c > 0.0 && c < 1.0) {
                            return invalid("binary control rate must lie in (0, 1)".into());
                        }
                    }
                    None => {
                        return invalid("binary outcomes in subgroup designs need control rates".into())
                    }
                }
            }
        }
        Ok(())
    }
}

/// Per-arm sample sizes and population structure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSizePlan {
    /// Patients per experimental arm in stage 1.
    pub stage1: u32,
    /// Patients per experimental arm in stage 2.
    pub stage2: u32,
    /// Stage-2 patients per arm when only the subgroup continues.
    pub enrich: Option<u32>,
    /// Subgroup prevalence τ.
    pub prevalence: Option<f64>,
    pub prevalence_fixed: bool,
    /// Control patients per experimental-arm patient (1:λ randomisation).
    pub allocation_ratio: f64,
}

impl SampleSizePlan {
    pub fn treatment(stage1: u32, stage2: u32) -> Self {
        SampleSizePlan {
            stage1,
            stage2,
            enrich: None,
            prevalence: None,
            prevalence_fixed: true,
            allocation_ratio: 1.0,
        }
    }

    pub fn subgroup(stage1: u32, stage2: u32, prevalence: f64) -> Self {
        SampleSizePlan { prevalence: Some(prevalence), ..Self::treatment(stage1, stage2) }
    }

    pub fn with_enrichment(mut self, enrich: u32) -> Self {
        self.enrich = Some(enrich);
        self
    }

    /// Copy with the prevalence replaced by a realized value.
    pub fn with_prevalence(&self, tau: f64) -> Self {
        SampleSizePlan { prevalence: Some(tau), ..self.clone() }
    }

    pub fn tau(&self) -> Result<f64> {
        self.prevalence
            .ok_or_else(|| Error::InvalidScenario("subgroup design needs a prevalence".into()))
    }

    pub fn validate(&self, design: DesignKind) -> Result<()> {
        let invalid = |msg: &str| Err(Error::InvalidScenario(msg.into()));
        if self.stage1 == 0 || self.stage2 == 0 {
            return invalid("stage sample sizes must be positive");
        }
        if !(self.allocation_ratio > 0.0 && self.allocation_ratio.is_finite()) {
            return invalid("allocation ratio must be positive");
        }
        match design {
            DesignKind::TreatmentSelection => {
                if self.enrich.is_some() {
                    return invalid("enrichment size applies to subgroup designs only");
                }
                if self.prevalence.is_some() {
                    return invalid("prevalence applies to subgroup designs only");
                }
            }
            DesignKind::SubgroupSelection => {
                let tau = self.tau()?;
                if !(tau > 0.0 && tau < 1.0) {
                    return invalid("prevalence must lie in (0, 1)");
                }
                if self.enrich == Some(0) {
                    return invalid("enrichment size must be positive");
                }
            }
        }
        Ok(())
    }
}
