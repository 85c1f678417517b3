use crate::closedtest::{CombinationConfig, CombinationMethod, IntersectionTest};
use crate::selection::SelectionRule;
use crate::simmodel::{DesignKind, EffectSpec, SampleSizePlan};
use crate::{Error, Result, MAX_ARMS};
use serde::{Deserialize, Serialize};

/// Largest number of replications a scenario may request.
pub const MAX_REPLICATIONS: u64 = 10_000_000;

/// How intersection hypotheses are tested.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IntersectionMethod {
    Dunnett,
    Simes,
    Bonferroni,
    SpiessensDebois,
}

impl IntersectionMethod {
    pub fn name(self) -> &'static str {
        match self {
            IntersectionMethod::Dunnett => "dunnett",
            IntersectionMethod::Simes => "simes",
            IntersectionMethod::Bonferroni => "bonferroni",
            IntersectionMethod::SpiessensDebois => "spiessens-debois",
        }
    }
}

/// Everything needed to simulate one design.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub effect: EffectSpec,
    pub plan: SampleSizePlan,
    pub rule: SelectionRule,
    pub intersection: IntersectionMethod,
    pub combination: CombinationConfig,
    pub replications: u64,
    pub master_seed: u64,
    /// 0-based arms whose joint rejection is counted separately.
    pub ptest: Vec<usize>,
    /// Dropped arms stay in follow-up and keep their stage-1 final-outcome
    /// statistics in the stage-1 p-values.
    pub follow_up: bool,
}

impl Scenario {
    pub fn design(&self) -> DesignKind {
        self.effect.design
    }

    pub fn units(&self) -> usize {
        self.effect.units()
    }

    /// The intersection test with its design constant filled in.
    pub fn intersection_test(&self) -> Result<IntersectionTest> {
        Ok(match self.intersection {
            IntersectionMethod::Dunnett => IntersectionTest::Dunnett { allocation_ratio: self.plan.allocation_ratio },
            IntersectionMethod::Simes => IntersectionTest::Simes,
            IntersectionMethod::Bonferroni => IntersectionTest::Bonferroni,
            IntersectionMethod::SpiessensDebois => IntersectionTest::SpiessensDebois { prevalence: self.plan.tau()? },
        })
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: String| Err(Error::InvalidScenario(msg));
        self.effect.validate()?;
        self.plan.validate(self.design())?;
        self.rule.validate()?;
        self.combination.validate()?;
        let k = self.units();
        if k > MAX_ARMS {
            return invalid(format!("at most {MAX_ARMS} arms are supported, got {k}"));
        }
        if self.replications == 0 || self.replications > MAX_REPLICATIONS {
            return invalid(format!(
                "replications must lie in 1..={MAX_REPLICATIONS}, got {}",
                self.replications
            ));
        }
        if let Some(&bad) = self.ptest.iter().find(|&&a| a >= k) {
            return invalid(format!("ptest arm {} does not exist (K = {k})", bad + 1));
        }
        match self.design() {
            DesignKind::TreatmentSelection => {
                if self.rule.is_population_rule() {
                    return Err(Error::InvalidRule("population rules need a subgroup design".into()));
                }
                if self.intersection == IntersectionMethod::SpiessensDebois {
                    return Err(Error::InvalidTest("the Spiessens-Debois test needs a subgroup design".into()));
                }
            }
            DesignKind::SubgroupSelection => {
                if !self.rule.is_population_rule() {
                    return Err(Error::InvalidRule("subgroup designs take a threshold-pair or futility-pair rule".into()));
                }
                if self.intersection == IntersectionMethod::Dunnett {
                    return Err(Error::InvalidTest("the Dunnett test needs a treatment design".into()));
                }
                if self.follow_up {
                    return invalid("the follow-up option applies to treatment designs only".into());
                }
            }
        }
        if self.combination.method == CombinationMethod::Fisher && self.combination.spending.is_some() {
            return Err(Error::InvalidTest("alpha spending needs the inverse-normal method".into()));
        }
        self.intersection_test()?.validate()
    }
}
