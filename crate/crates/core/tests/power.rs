use seamless_core::closedtest::CombinationConfig;
use seamless_core::engine::{run_scenario, IntersectionMethod, Scenario};
use seamless_core::selection::SelectionRule;
use seamless_core::simmodel::{DesignKind, EffectSpec, OutcomeType, SampleSizePlan};

const R: u64 = 100_000;

fn treatment(rule: SelectionRule, intersection: IntersectionMethod, finals: Vec<f64>) -> Scenario {
    Scenario {
        effect: EffectSpec {
            design: DesignKind::TreatmentSelection,
            early_effects: vec![0.0, 0.2, 0.3, 0.35],
            final_effects: finals,
            early_outcome: OutcomeType::Normal,
            final_outcome: OutcomeType::Normal,
            subgroup_control: None,
            correlation: 0.5,
        },
        plan: SampleSizePlan::treatment(50, 100),
        rule,
        intersection,
        combination: CombinationConfig::inverse_normal(50.0, 100.0, 0.025),
        replications: R,
        master_seed: 99,
        ptest: vec![],
        follow_up: false,
    }
}

fn subgroup(rule: SelectionRule, intersection: IntersectionMethod, finals: Vec<f64>) -> Scenario {
    Scenario {
        effect: EffectSpec {
            design: DesignKind::SubgroupSelection,
            early_effects: vec![0.3, 0.1],
            final_effects: finals,
            early_outcome: OutcomeType::Normal,
            final_outcome: OutcomeType::Normal,
            subgroup_control: None,
            correlation: 0.5,
        },
        plan: SampleSizePlan::subgroup(60, 120, 0.4),
        rule,
        intersection,
        combination: CombinationConfig::inverse_normal(60.0, 120.0, 0.025),
        replications: R,
        master_seed: 99,
        ptest: vec![],
        follow_up: false,
    }
}

fn power(s: &Scenario) -> f64 {
    let oc = run_scenario(s).unwrap();
    oc.any_rejected as f64 / oc.replications as f64
}

fn scaled(values: &[f64]) -> Vec<f64> {
    values.iter().map(|&v| if v > 0.0 { 1.5 * v } else { v }).collect()
}

#[test]
fn larger_effects_do_not_lose_power() {
    let finals = vec![0.0, 0.1, 0.15, 0.2];
    let mut cases = Vec::new();
    for rule in [SelectionRule::All, SelectionRule::Best(1), SelectionRule::Epsilon(0.5), SelectionRule::Threshold(1.0)] {
        for method in [IntersectionMethod::Dunnett, IntersectionMethod::Simes] {
            cases.push((treatment(rule.clone(), method, finals.clone()), treatment(rule.clone(), method, scaled(&finals))));
        }
    }
    let sub = vec![0.25, 0.1];
    for rule in [SelectionRule::FutilityPair { subgroup: 0.0, full: 0.0 }, SelectionRule::ThresholdPair { lower: -0.5, upper: 0.5 }] {
        cases.push((
            subgroup(rule.clone(), IntersectionMethod::SpiessensDebois, sub.clone()),
            subgroup(rule, IntersectionMethod::SpiessensDebois, scaled(&sub)),
        ));
    }
    for (base, stronger) in cases {
        let (p0, p1) = (power(&base), power(&stronger));
        let se = (2.0 * p0 * (1.0 - p0) / R as f64).sqrt();
        assert!(p1 >= p0 - 3.0 * se, "{:?}: {p0} -> {p1}", base.rule);
    }
}
