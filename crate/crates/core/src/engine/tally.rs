use crate::simmodel::{DesignKind, SampleSizePlan};
use serde::{Deserialize, Serialize};

/// Rejection counts for one selection branch of a subgroup design.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgroupRow {
    /// Replications that continued with this branch.
    pub selected: u64,
    /// H_S rejected.
    pub hs: u64,
    /// H_F rejected.
    pub hf: u64,
    /// Both H_S and H_F rejected.
    pub hs_and_hf: u64,
    /// The intersection H_S ∩ H_F rejected.
    pub hsf: u64,
}

impl SubgroupRow {
    fn merge(&mut self, other: &SubgroupRow) {
        self.selected += other.selected;
        self.hs += other.hs;
        self.hf += other.hf;
        self.hs_and_hf += other.hs_and_hf;
        self.hsf += other.hsf;
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgroupTable {
    pub subgroup: SubgroupRow,
    pub full: SubgroupRow,
    pub both: SubgroupRow,
}

impl SubgroupTable {
    pub fn total(&self) -> SubgroupRow {
        let mut t = self.subgroup;
        t.merge(&self.full);
        t.merge(&self.both);
        t
    }
}

/// Aggregated results of a scenario run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatingCharacteristics {
    pub design: DesignKind,
    pub replications: u64,
    /// Entry m−1 counts replications that continued with m arms.
    pub count_selected_sizes: Vec<u64>,
    pub per_arm_selected: Vec<u64>,
    pub per_hypothesis_rejected: Vec<u64>,
    /// Replications rejecting at least one elementary hypothesis.
    pub any_rejected: u64,
    /// 0-based arms of the ptest set.
    pub ptest: Vec<usize>,
    pub ptest_any_rejected: Option<u64>,
    pub subgroup_table: Option<SubgroupTable>,
    pub futility_count: u64,
    pub expected_total_sample_size: f64,
    /// Prevalence draws discarded for putting everyone (or no one) in the subgroup.
    pub prevalence_redraws: u64,
}

impl OperatingCharacteristics {
    pub(crate) fn empty(design: DesignKind, units: usize, ptest: &[usize]) -> Self {
        OperatingCharacteristics {
            design,
            replications: 0,
            count_selected_sizes: vec![0; units],
            per_arm_selected: vec![0; units],
            per_hypothesis_rejected: vec![0; units],
            any_rejected: 0,
            ptest: ptest.to_vec(),
            ptest_any_rejected: (!ptest.is_empty()).then_some(0),
            subgroup_table: (design == DesignKind::SubgroupSelection).then(SubgroupTable::default),
            futility_count: 0,
            expected_total_sample_size: 0.0,
            prevalence_redraws: 0,
        }
    }

    /// Adds the counts of `other`; the result does not depend on merge order.
    pub(crate) fn merge(mut self, other: OperatingCharacteristics) -> Self {
        fn add(a: &mut [u64], b: &[u64]) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        self.replications += other.replications;
        add(&mut self.count_selected_sizes, &other.count_selected_sizes);
        add(&mut self.per_arm_selected, &other.per_arm_selected);
        add(&mut self.per_hypothesis_rejected, &other.per_hypothesis_rejected);
        self.any_rejected += other.any_rejected;
        if let (Some(a), Some(b)) = (self.ptest_any_rejected.as_mut(), other.ptest_any_rejected) {
            *a += b;
        }
        if let (Some(a), Some(b)) = (self.subgroup_table.as_mut(), other.subgroup_table) {
            a.subgroup.merge(&b.subgroup);
            a.full.merge(&b.full);
            a.both.merge(&b.both);
        }
        self.futility_count += other.futility_count;
        self.prevalence_redraws += other.prevalence_redraws;
        self
    }

    /// Percentage of replications, for report tables.
    pub fn percent(&self, count: u64) -> f64 {
        100.0 * count as f64 / self.replications as f64
    }

    pub fn continued_count(&self) -> u64 {
        self.replications - self.futility_count
    }
}

/// Expected total number of patients (all arms, control included).
///
/// Treatment designs: (K + λ)·n₁ + (m + λ)·n₂ for m continuing arms; the
/// stage-2 control cohort is counted even after a futility stop. Subgroup designs: (1 + λ)·n₁ plus (1 + λ) times the stage-2
/// per-arm size of the branch taken. A subgroup-only continuation recruits the
/// enrichment size, or τ·n₂ at the nominal prevalence when none is set.
pub fn expected_sample_size(oc: &OperatingCharacteristics, plan: &SampleSizePlan) -> f64 {
    let r = oc.replications as f64;
    if r == 0.0 {
        return 0.0;
    }
    let lambda = plan.allocation_ratio;
    let (n1, n2) = (plan.stage1 as f64, plan.stage2 as f64);
    match oc.design {
        DesignKind::TreatmentSelection => {
            let k = oc.per_arm_selected.len() as f64;
            let arms: u64 = oc.per_arm_selected.iter().sum();
            (k + lambda) * n1 + (arms as f64 / r + lambda) * n2
        }
        DesignKind::SubgroupSelection => {
            let table = oc.subgroup_table.unwrap_or_default();
            let tau = plan.prevalence.unwrap_or(0.0);
            let enriched = plan.enrich.map_or(tau * n2, |e| e as f64);
            let stage2 = (table.full.selected + table.both.selected) as f64 * n2 + table.subgroup.selected as f64 * enriched;
            (1.0 + lambda) * (n1 + stage2 / r)
        }
    }
}
