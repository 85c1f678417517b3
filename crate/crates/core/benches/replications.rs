use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use seamless_core::closedtest::CombinationConfig;
use seamless_core::engine::{run_scenario, run_scenario_sequential, IntersectionMethod, Scenario};
use seamless_core::selection::SelectionRule;
use seamless_core::simmodel::{DesignKind, EffectSpec, OutcomeType, SampleSizePlan};
use std::hint::black_box;

fn treatment() -> Scenario {
    Scenario {
        effect: EffectSpec {
            design: DesignKind::TreatmentSelection,
            early_effects: vec![0.0, 0.68, 0.82, 0.95, 0.91],
            final_effects: vec![0.0, 0.13, 0.17, 0.23, 0.20],
            early_outcome: OutcomeType::Normal,
            final_outcome: OutcomeType::Normal,
            subgroup_control: None,
            correlation: 0.4,
        },
        plan: SampleSizePlan::treatment(100, 300),
        rule: SelectionRule::Best(2),
        intersection: IntersectionMethod::Dunnett,
        combination: CombinationConfig::inverse_normal(100.0, 300.0, 0.025),
        replications: 20_000,
        master_seed: 145514,
        ptest: vec![2, 3],
        follow_up: false,
    }
}

fn subgroup() -> Scenario {
    Scenario {
        effect: EffectSpec {
            design: DesignKind::SubgroupSelection,
            early_effects: vec![0.6, 0.9],
            final_effects: vec![0.6, 0.9],
            early_outcome: OutcomeType::TimeToEvent,
            final_outcome: OutcomeType::TimeToEvent,
            subgroup_control: None,
            correlation: 0.5,
        },
        plan: SampleSizePlan::subgroup(100, 300, 0.3).with_enrichment(200),
        rule: SelectionRule::FutilityPair { subgroup: 0.0, full: 0.0 },
        intersection: IntersectionMethod::SpiessensDebois,
        combination: CombinationConfig::inverse_normal(100.0, 300.0, 0.025),
        replications: 20_000,
        master_seed: 1234,
        ptest: vec![],
        follow_up: false,
    }
}

fn bench(c: &mut Criterion) {
    let mut group = c.benchmark_group("replications");
    group.sample_size(10);
    for (name, scenario) in [("treatment", treatment()), ("subgroup", subgroup())] {
        group.bench_with_input(BenchmarkId::new("parallel", name), &scenario, |b, s| {
            b.iter(|| run_scenario(black_box(s)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("sequential", name), &scenario, |b, s| {
            b.iter(|| run_scenario_sequential(black_box(s)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
