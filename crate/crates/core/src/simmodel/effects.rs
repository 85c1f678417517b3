use super::{Cohort, DesignKind, EffectSpec, Endpoint, OutcomeType, SampleSizePlan};
use crate::{Error, Result};

/// Expected standardized statistic for one comparison with control.
///
/// `control` and `treatment` are on the internal "larger is better" scale:
/// means (N), minus log hazard rates (T) or minus log odds of the event (B).
/// `n` is the experimental-arm size; the control arm has `ratio·n` patients.
pub fn expected_z(outcome: OutcomeType, control: f64, treatment: f64, n: f64, ratio: f64) -> Result<f64> {
    let diff = treatment - control;
    let n0 = ratio * n;
    match outcome {
        OutcomeType::Normal => Ok(diff / (1.0 / n + 1.0 / n0).sqrt()),
        OutcomeType::TimeToEvent => {
            let events = n0 * (1.0 - (-(-control).exp()).exp()) + n * (1.0 - (-(-treatment).exp()).exp());
            let share = 1.0 / (1.0 + ratio);
            Ok(diff * (events * share * (1.0 - share)).sqrt())
        }
        OutcomeType::Binary => {
            let o_k = n / (1.0 + treatment.exp());
            let o_0 = n0 / (1.0 + control.exp());
            if !(o_k > 0.0 && o_k < n && o_0 > 0.0 && o_0 < n0) {
                return Err(Error::InvalidScenario(format!(
                    "degenerate expected event counts ({o_0:.3e} control, {o_k:.3e} treatment)"
                )));
            }
            let var = 1.0 / o_k + 1.0 / (n - o_k) + 1.0 / o_0 + 1.0 / (n0 - o_0);
            Ok(diff / var.sqrt())
        }
    }
}

fn minus_logit(p: f64) -> f64 {
    -(p / (1.0 - p)).ln()
}

/// (control, experimental) parameters per unit on the internal scale.
pub(super) fn unit_parameters(spec: &EffectSpec, endpoint: Endpoint) -> Vec<(f64, f64)> {
    let outcome = spec.outcome(endpoint);
    let values = spec.effects(endpoint);
    match spec.design {
        DesignKind::TreatmentSelection => {
            let map = |v: f64| match outcome {
                OutcomeType::Binary => minus_logit(v),
                _ => v,
            };
            let control = map(values[0]);
            values[1..].iter().map(|&v| (control, map(v))).collect()
        }
        DesignKind::SubgroupSelection => {
            let control = spec
                .subgroup_control
                .map(|(e, f)| if endpoint == Endpoint::Early { e } else { f });
            values
                .iter()
                .map(|&v| match outcome {
                    OutcomeType::Normal => {
                        (control.unwrap_or(0.0), v)
                    }
                    OutcomeType::TimeToEvent => {
                        let c = control.unwrap_or(0.0);
                        (c, c - v.ln())
                    }
                    OutcomeType::Binary => {
                        let c = control.unwrap_or(f64::NAN);
                        (minus_logit(c), minus_logit(v))
                    }
                })
                .collect()
        }
    }
}

/// Per-arm sample size of each unit in a cohort (experimental arm count).
pub(super) fn cohort_sizes(spec: &EffectSpec, plan: &SampleSizePlan, cohort: Cohort) -> Result<Vec<f64>> {
    let (n1, n2) = (plan.stage1 as f64, plan.stage2 as f64);
    match spec.design {
        DesignKind::TreatmentSelection => match cohort {
            Cohort::Stage1 => Ok(vec![n1; spec.units()]),
            Cohort::Stage2Full => Ok(vec![n2; spec.units()]),
            _ => Err(Error::InvalidScenario(
                "subgroup-only cohorts do not exist in treatment designs".into(),
            )),
        },
        DesignKind::SubgroupSelection => {
            let tau = plan.tau()?;
            match cohort {
                Cohort::Stage1 => Ok(vec![tau * n1, n1]),
                Cohort::Stage2Full => Ok(vec![tau * n2, n2]),
                Cohort::Stage2SubgroupOnly => Ok(vec![tau * n2]),
                Cohort::Stage2Enriched => plan
                    .enrich
                    .map(|e| vec![e as f64])
                    .ok_or_else(|| Error::InvalidScenario("no enrichment size set".into())),
            }
        }
    }
}

pub(super) fn expectations_for_sizes(
    spec: &EffectSpec,
    plan: &SampleSizePlan,
    endpoint: Endpoint,
    sizes: &[f64],
) -> Result<Vec<f64>> {
    let params = unit_parameters(spec, endpoint);
    let outcome = spec.outcome(endpoint);
    sizes
        .iter()
        .zip(params)
        .map(|(&n, (c, t))| expected_z(outcome, c, t, n, plan.allocation_ratio))
        .collect()
}

/// Expected standardized statistics for the units present in `cohort`.
///
/// Values are on the internal scale where larger means a more favourable
/// experimental arm. Subgroup-only cohorts return a single entry.
pub fn effect_to_expectation(
    spec: &EffectSpec,
    plan: &SampleSizePlan,
    endpoint: Endpoint,
    cohort: Cohort,
) -> Result<Vec<f64>> {
    spec.validate()?;
    plan.validate(spec.design)?;
    let sizes = cohort_sizes(spec, plan, cohort)?;
    expectations_for_sizes(spec, plan, endpoint, &sizes)
}
