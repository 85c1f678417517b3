//! Replication loop, operating characteristics and parameter sweeps.

mod scenario;
mod sweep;
mod tally;

pub use scenario::{IntersectionMethod, Scenario, MAX_REPLICATIONS};
pub use sweep::{sweep, sweep_scenario, SweepAxis, SweepPoint, SweepValue};
pub use tally::{expected_sample_size, OperatingCharacteristics, SubgroupRow, SubgroupTable};

use crate::closedtest::ClosedTester;
use crate::selection::{select_population, select_treatments, PopulationChoice, FULL_POPULATION, SUBGROUP};
use crate::simmodel::{
    build_score_model, effect_to_expectation, resolve_prevalence, Cohort, DesignKind, Endpoint, ScoreModel,
};
use crate::statdist::{replication_stream, ReplicationStream};
use crate::{ArmSet, Result, MAX_ARMS};

/// Replications per work unit.
const CHUNK: u64 = 1024;

struct Context<'a> {
    scenario: &'a Scenario,
    model: ScoreModel,
    tester: ClosedTester,
    ptest: ArmSet,
    /// Expected stage-2 subgroup statistic when only the subgroup continues.
    subgroup_only_mean: f64,
}

fn subgroup_only_mean(scenario: &Scenario, plan: &crate::simmodel::SampleSizePlan) -> Result<f64> {
    let cohort = if plan.enrich.is_some() { Cohort::Stage2Enriched } else { Cohort::Stage2SubgroupOnly };
    Ok(effect_to_expectation(&scenario.effect, plan, Endpoint::Final, cohort)?[0])
}

impl<'a> Context<'a> {
    fn new(scenario: &'a Scenario) -> Result<Self> {
        scenario.validate()?;
        let model = build_score_model(&scenario.effect, &scenario.plan)?;
        let tester = ClosedTester::new(scenario.units(), scenario.intersection_test()?, scenario.combination)?;
        let subgroup_only_mean = match scenario.design() {
            DesignKind::SubgroupSelection => subgroup_only_mean(scenario, &scenario.plan)?,
            DesignKind::TreatmentSelection => 0.0,
        };
        Ok(Context { scenario, model, tester, ptest: scenario.ptest.iter().copied().collect(), subgroup_only_mean })
    }

    fn empty(&self) -> OperatingCharacteristics {
        OperatingCharacteristics::empty(self.scenario.design(), self.scenario.units(), &self.scenario.ptest)
    }

    fn run_chunk(&self, chunk: u64) -> Result<OperatingCharacteristics> {
        let start = chunk * CHUNK;
        let end = (start + CHUNK).min(self.scenario.replications);
        let mut oc = self.empty();
        let dim = self.model.layout().dim();
        let mut noise = vec![0.0; dim];
        let mut values = vec![0.0; dim];
        for index in start..end {
            let mut stream = replication_stream(self.scenario.master_seed, index);
            match self.scenario.design() {
                DesignKind::TreatmentSelection => self.treatment(&mut stream, &mut noise, &mut values, &mut oc)?,
                DesignKind::SubgroupSelection => self.subgroup(&mut stream, &mut noise, &mut values, &mut oc)?,
            }
        }
        oc.replications = end - start;
        Ok(oc)
    }

    fn treatment(
        &self,
        stream: &mut ReplicationStream,
        noise: &mut [f64],
        values: &mut [f64],
        oc: &mut OperatingCharacteristics,
    ) -> Result<()> {
        let layout = self.model.layout();
        let k = layout.units;
        self.model.sample_into(stream, noise, values);
        let block = |e, s| &values[layout.index(e, s, 0)..layout.index(e, s, 0) + k];
        let selection = select_treatments(block(Endpoint::Early, 0), &self.scenario.rule, stream)?;
        let continued = selection.continued;
        if continued.is_empty() {
            oc.futility_count += 1;
            return Ok(());
        }
        oc.count_selected_sizes[continued.len() - 1] += 1;
        for arm in continued.iter() {
            oc.per_arm_selected[arm] += 1;
        }
        let mut z1 = [0.0; MAX_ARMS];
        z1[..k].copy_from_slice(block(Endpoint::Final, 0));
        if !self.scenario.follow_up {
            for (arm, z) in z1[..k].iter_mut().enumerate() {
                if !continued.contains(arm) {
                    *z = f64::NEG_INFINITY;
                }
            }
        }
        let rejected = self.tester.rejected(&z1[..k], block(Endpoint::Final, 1), continued);
        tally_rejections(oc, rejected, self.ptest);
        Ok(())
    }

    fn subgroup(
        &self,
        stream: &mut ReplicationStream,
        noise: &mut [f64],
        values: &mut [f64],
        oc: &mut OperatingCharacteristics,
    ) -> Result<()> {
        let draw = resolve_prevalence(&self.scenario.plan, stream)?;
        oc.prevalence_redraws += draw.redraws as u64;
        let realized;
        let (model, tester, sub_only) = if self.scenario.plan.prevalence_fixed {
            (&self.model, &self.tester, self.subgroup_only_mean)
        } else {
            let plan = self.scenario.plan.with_prevalence(draw.tau);
            realized = (
                build_score_model(&self.scenario.effect, &plan)?,
                self.tester.with_prevalence(draw.tau),
                subgroup_only_mean(self.scenario, &plan)?,
            );
            (&realized.0, &realized.1, realized.2)
        };
        let layout = model.layout();
        model.sample_into(stream, noise, values);
        let at = |e, s, u| values[layout.index(e, s, u)];
        // rules see the smaller-is-better orientation
        let selection = select_population(
            -at(Endpoint::Early, 0, SUBGROUP),
            -at(Endpoint::Early, 0, FULL_POPULATION),
            &self.scenario.rule,
        )?;
        let Some(choice) = selection.population_choice() else {
            oc.futility_count += 1;
            return Ok(());
        };
        let continued = selection.continued;
        oc.count_selected_sizes[continued.len() - 1] += 1;
        for unit in continued.iter() {
            oc.per_arm_selected[unit] += 1;
        }
        let z1 = [at(Endpoint::Final, 0, SUBGROUP), at(Endpoint::Final, 0, FULL_POPULATION)];
        let mut z2 = [at(Endpoint::Final, 1, SUBGROUP), at(Endpoint::Final, 1, FULL_POPULATION)];
        if choice == PopulationChoice::SubgroupOnly {
            // same unit-variance noise, recentred on the subgroup-only cohort
            z2[SUBGROUP] += sub_only - model.mean_block(Endpoint::Final, 1)[SUBGROUP];
        }
        let result = tester.run(&z1, &z2, continued);
        let rejected = result.rejected;
        tally_rejections(oc, rejected, self.ptest);
        let table = oc.subgroup_table.get_or_insert_with(Default::default);
        let row = match choice {
            PopulationChoice::SubgroupOnly => &mut table.subgroup,
            PopulationChoice::FullOnly => &mut table.full,
            PopulationChoice::Both => &mut table.both,
        };
        row.selected += 1;
        let (s, f) = (rejected.contains(SUBGROUP), rejected.contains(FULL_POPULATION));
        row.hs += s as u64;
        row.hf += f as u64;
        row.hs_and_hf += (s && f) as u64;
        let global = result.decision(ArmSet::full(2)).is_some_and(|d| d.combined.reject);
        row.hsf += global as u64;
        Ok(())
    }
}

fn tally_rejections(oc: &mut OperatingCharacteristics, rejected: ArmSet, ptest: ArmSet) {
    for arm in rejected.iter() {
        oc.per_hypothesis_rejected[arm] += 1;
    }
    if !rejected.is_empty() {
        oc.any_rejected += 1;
    }
    if let Some(count) = oc.ptest_any_rejected.as_mut() {
        if !rejected.intersection(ptest).is_empty() {
            *count += 1;
        }
    }
}

fn run_chunks(ctx: &Context<'_>) -> Result<OperatingCharacteristics> {
    let chunks = ctx.scenario.replications.div_ceil(CHUNK);
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..chunks)
            .into_par_iter()
            .map(|c| ctx.run_chunk(c))
            .try_reduce(|| ctx.empty(), |a, b| Ok(a.merge(b)))
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..chunks).try_fold(ctx.empty(), |acc, c| Ok(acc.merge(ctx.run_chunk(c)?)))
    }
}

/// Run every replication of `scenario` and aggregate the results.
///
/// Uses the global rayon pool when the `parallel` feature is on.
pub fn run_scenario(scenario: &Scenario) -> Result<OperatingCharacteristics> {
    let ctx = Context::new(scenario)?;
    let mut oc = run_chunks(&ctx)?;
    oc.expected_total_sample_size = expected_sample_size(&oc, &scenario.plan);
    Ok(oc)
}

/// Run `f` on a dedicated pool of `threads` workers so that the engine's
/// parallel loops use exactly that many threads.
///
/// Without the `parallel` feature `f` runs on the calling thread.
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    #[cfg(feature = "parallel")]
    {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build()
            .map_err(|e| crate::Error::Unsupported(format!("cannot start worker pool: {e}")))?;
        Ok(pool.install(f))
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        Ok(f())
    }
}

/// Like [`run_scenario`] with `threads` workers; results do not depend on it.
pub fn run_scenario_with_threads(scenario: &Scenario, threads: usize) -> Result<OperatingCharacteristics> {
    with_threads(threads, || run_scenario(scenario))?
}

/// Sequential reference loop, independent of the `parallel` feature.
pub fn run_scenario_sequential(scenario: &Scenario) -> Result<OperatingCharacteristics> {
    let ctx = Context::new(scenario)?;
    let chunks = scenario.replications.div_ceil(CHUNK);
    let mut oc = (0..chunks).try_fold(ctx.empty(), |acc, c| ctx.run_chunk(c).map(|x| acc.merge(x)))?;
    oc.expected_total_sample_size = expected_sample_size(&oc, &scenario.plan);
    Ok(oc)
}
