use super::{run_scenario, OperatingCharacteristics, Scenario};
use crate::closedtest::CombinationMethod;
use crate::selection::SelectionRule;
use crate::statdist::derive_seed;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum SweepAxis {
    /// Stage-1 sizes under a fixed patient budget
    /// (K + λ)·n₁ + (m + λ)·n₂ = budget, where m arms continue.
    Stage1Allocation { budget: f64 },
    Threshold,
    FutilityLimitsGrid,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum SweepValue {
    Stage1(u32),
    Threshold(f64),
    FutilityLimits { subgroup: f64, full: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub index: usize,
    pub value: SweepValue,
    pub scenario: Scenario,
    pub characteristics: OperatingCharacteristics,
}

fn arms_continuing(base: &Scenario) -> Result<f64> {
    let k = base.units();
    match base.rule {
        SelectionRule::Best(m) => Ok(m.min(k) as f64),
        SelectionRule::All => Ok(k as f64),
        SelectionRule::RandomOne => Ok(1.0),
        _ => Err(Error::InvalidScenario(
            "a stage-1 allocation sweep needs a rule that keeps a fixed number of arms".into(),
        )),
    }
}

fn stage1_share(s: &Scenario) -> f64 {
    s.plan.stage1 as f64 / (s.plan.stage1 + s.plan.stage2) as f64
}

/// The scenario for one sweep value, seeded with the point's sub-master.
pub fn sweep_scenario(base: &Scenario, axis: &SweepAxis, index: usize, value: &SweepValue) -> Result<Scenario> {
    let mut s = base.clone();
    s.master_seed = derive_seed(base.master_seed, index as u64);
    match (axis, value) {
        (SweepAxis::Stage1Allocation { budget }, SweepValue::Stage1(n1)) => {
            let lambda = base.plan.allocation_ratio;
            let k = base.units() as f64;
            let m = arms_continuing(base)?;
            let n2 = (budget - (k + lambda) * *n1 as f64) / (m + lambda);
            if !(n2 >= 1.0) || (n2 - n2.round()).abs() > 1e-9 {
                return Err(Error::InvalidScenario(format!(
                    "stage-1 size {n1} leaves {n2} patients per arm in stage 2 of a budget of {budget}"
                )));
            }
            s.plan.stage1 = *n1;
            s.plan.stage2 = n2.round() as u32;
            // default weights follow the allocation
            if s.combination.method == CombinationMethod::InverseNormal
                && (s.combination.weights.0.powi(2) - stage1_share(base)).abs() < 1e-12
            {
                let w = stage1_share(&s);
                s.combination.weights = (w.sqrt(), (1.0 - w).sqrt());
            }
        }
        (SweepAxis::Threshold, SweepValue::Threshold(t)) => {
            if !matches!(base.rule, SelectionRule::Threshold(_)) {
                return Err(Error::InvalidScenario("a threshold sweep needs the threshold rule".into()));
            }
            s.rule = SelectionRule::Threshold(*t);
        }
        (SweepAxis::FutilityLimitsGrid, SweepValue::FutilityLimits { subgroup, full }) => {
            if !matches!(base.rule, SelectionRule::FutilityPair { .. }) {
                return Err(Error::InvalidScenario("a futility-limit sweep needs the futility rule".into()));
            }
            s.rule = SelectionRule::FutilityPair { subgroup: *subgroup, full: *full };
        }
        _ => return Err(Error::InvalidScenario(format!("sweep value {value:?} does not fit axis {axis:?}"))),
    }
    Ok(s)
}

/// One run per value, each with a seed derived from (master seed, index).
pub fn sweep(base: &Scenario, axis: &SweepAxis, values: &[SweepValue]) -> Result<Vec<SweepPoint>> {
    let scenarios = values
        .iter()
        .enumerate()
        .map(|(i, v)| sweep_scenario(base, axis, i, v))
        .collect::<Result<Vec<_>>>()?;
    scenarios
        .into_iter()
        .zip(values)
        .enumerate()
        .map(|(index, (scenario, value))| {
            let characteristics = run_scenario(&scenario)?;
            Ok(SweepPoint { index, value: *value, scenario, characteristics })
        })
        .collect()
}
