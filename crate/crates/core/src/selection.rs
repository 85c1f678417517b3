//! Interim selection rules.
//!
//! Treatment rules act on the early-outcome statistics of the experimental
//! arms, larger being better. Population rules take statistics oriented so
//! that smaller is better (the log-hazard-ratio orientation used when
//! reporting survival designs); the engine negates internal statistics
//! before calling them.

use crate::statdist::ReplicationStream;
use crate::{ArmSet, Error, Result};
use serde::{Deserialize, Serialize};

/// Index of the subgroup in population-level sets.
pub const SUBGROUP: usize = 0;
/// Index of the full population in population-level sets.
pub const FULL_POPULATION: usize = 1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum SelectionRule {
    /// Every arm continues.
    All,
    /// The `m` arms with the largest statistics continue.
    Best(usize),
    /// Arms within `ε` of the best continue.
    Epsilon(f64),
    /// One arm chosen uniformly at random.
    RandomOne,
    /// Arms strictly above the threshold continue; none above stops the trial.
    Threshold(f64),
    /// Δ = S_sub − S_full: Δ ≤ lower keeps the subgroup only, Δ > upper the
    /// full population only, anything in between keeps both.
    ThresholdPair { lower: f64, upper: f64 },
    /// Futility limits: a population continues while its statistic is below
    /// its limit; neither continuing stops the trial.
    FutilityPair { subgroup: f64, full: f64 },
}

impl SelectionRule {
    pub fn is_population_rule(&self) -> bool {
        matches!(self, SelectionRule::ThresholdPair { .. } | SelectionRule::FutilityPair { .. })
    }

    /// Whether the rule can stop the trial at the interim.
    pub fn can_stop_for_futility(&self) -> bool {
        matches!(self, SelectionRule::Threshold(_) | SelectionRule::FutilityPair { .. })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            SelectionRule::Best(0) => Err(Error::InvalidRule("best-m needs m ≥ 1".into())),
            SelectionRule::Epsilon(e) if !(e >= 0.0) => {
                Err(Error::InvalidRule(format!("epsilon must be nonnegative, got {e}")))
            }
            SelectionRule::Threshold(t) if t.is_nan() => Err(Error::InvalidRule("threshold is NaN".into())),
            SelectionRule::ThresholdPair { lower, upper } if !(lower <= upper) => Err(Error::InvalidRule(
                format!("threshold limits must satisfy l1 ≤ l2, got ({lower}, {upper})"),
            )),
            SelectionRule::FutilityPair { subgroup, full } if subgroup.is_nan() || full.is_nan() => {
                Err(Error::InvalidRule("futility limits are NaN".into()))
            }
            _ => Ok(()),
        }
    }
}

/// The set carried into stage 2; an empty set means a futility stop.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionOutcome {
    pub continued: ArmSet,
}

/// Which populations a subgroup design continues with.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PopulationChoice {
    SubgroupOnly,
    FullOnly,
    Both,
}

impl SelectionOutcome {
    pub fn futility() -> Self {
        SelectionOutcome { continued: ArmSet::EMPTY }
    }

    pub fn stopped_for_futility(&self) -> bool {
        self.continued.is_empty()
    }

    pub fn population(choice: PopulationChoice) -> Self {
        let continued = match choice {
            PopulationChoice::SubgroupOnly => ArmSet::singleton(SUBGROUP),
            PopulationChoice::FullOnly => ArmSet::singleton(FULL_POPULATION),
            PopulationChoice::Both => ArmSet::full(2),
        };
        SelectionOutcome { continued }
    }

    pub fn population_choice(&self) -> Option<PopulationChoice> {
        match (self.continued.contains(SUBGROUP), self.continued.contains(FULL_POPULATION)) {
            (true, true) => Some(PopulationChoice::Both),
            (true, false) => Some(PopulationChoice::SubgroupOnly),
            (false, true) => Some(PopulationChoice::FullOnly),
            (false, false) => None,
        }
    }
}

/// Arms ordered by decreasing statistic, ties to the lower index.
fn ranked(z: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..z.len()).collect();
    order.sort_by(|&a, &b| z[b].total_cmp(&z[a]).then(a.cmp(&b)));
    order
}

/// Apply a treatment rule to the early-outcome statistics of the K arms.
pub fn select_treatments(z_early: &[f64], rule: &SelectionRule, stream: &mut ReplicationStream) -> Result<SelectionOutcome> {
    let k = z_early.len();
    if k == 0 {
        return Err(Error::InvalidRule("no arms to select from".into()));
    }
    let continued = match *rule {
        SelectionRule::All => ArmSet::full(k),
        SelectionRule::Best(m) => ranked(z_early).into_iter().take(m.min(k)).collect(),
        SelectionRule::Epsilon(eps) if eps == 0.0 => ArmSet::singleton(ranked(z_early)[0]),
        SelectionRule::Epsilon(eps) => {
            let best = z_early.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            (0..k).filter(|&i| z_early[i] >= best - eps).collect()
        }
        SelectionRule::RandomOne => ArmSet::singleton(stream.index_below(k)),
        SelectionRule::Threshold(t) => (0..k).filter(|&i| z_early[i] > t).collect(),
        SelectionRule::ThresholdPair { .. } | SelectionRule::FutilityPair { .. } => {
            return Err(Error::InvalidRule("population rule used for treatment selection".into()))
        }
    };
    Ok(SelectionOutcome { continued })
}

/// Apply a population rule to (subgroup, full) statistics oriented so that
/// smaller is better.
pub fn select_population(s_sub: f64, s_full: f64, rule: &SelectionRule) -> Result<SelectionOutcome> {
    rule.validate()?;
    let choice = match *rule {
        SelectionRule::ThresholdPair { lower, upper } => {
            let delta = s_sub - s_full;
            if delta <= lower {
                PopulationChoice::SubgroupOnly
            } else if delta > upper {
                PopulationChoice::FullOnly
            } else {
                PopulationChoice::Both
            }
        }
        SelectionRule::FutilityPair { subgroup, full } => match (s_sub < subgroup, s_full < full) {
            (true, true) => PopulationChoice::Both,
            (true, false) => PopulationChoice::SubgroupOnly,
            (false, true) => PopulationChoice::FullOnly,
            (false, false) => return Ok(SelectionOutcome::futility()),
        },
        _ => return Err(Error::InvalidRule("treatment rule used for population selection".into())),
    };
    Ok(SelectionOutcome::population(choice))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statdist::replication_stream;
    use proptest::prelude::*;

    fn set(v: &[usize]) -> ArmSet {
        v.iter().copied().collect()
    }

    fn pick(z: &[f64], rule: SelectionRule) -> ArmSet {
        select_treatments(z, &rule, &mut replication_stream(0, 0)).unwrap().continued
    }

    #[test]
    fn best_two_of_copd_expectations() {
        // arms 3 and 4 in 1-based labels
        assert_eq!(pick(&[4.8, 5.8, 6.7, 6.4], SelectionRule::Best(2)), set(&[2, 3]));
    }

    #[test]
    fn epsilon_rule() {
        assert_eq!(pick(&[2.0, 1.5, 1.0], SelectionRule::Epsilon(0.6)), set(&[0, 1]));
        assert_eq!(pick(&[1.0, 3.0, 3.0], SelectionRule::Epsilon(0.0)), set(&[1]));
        assert_eq!(pick(&[1.0, -3.0, 3.0], SelectionRule::Epsilon(f64::INFINITY)), ArmSet::full(3));
    }

    #[test]
    fn threshold_rule_is_strict() {
        assert_eq!(pick(&[3.0, 3.7, 4.2, 4.1], SelectionRule::Threshold(3.0)), set(&[1, 2, 3]));
        let out = select_treatments(&[2.9, 2.5], &SelectionRule::Threshold(3.0), &mut replication_stream(0, 0)).unwrap();
        assert!(out.stopped_for_futility());
    }

    #[test]
    fn random_one_is_a_singleton_from_the_stream() {
        let mut counts = [0usize; 4];
        for i in 0..4000 {
            let s = select_treatments(&[0.0; 4], &SelectionRule::RandomOne, &mut replication_stream(1, i)).unwrap();
            assert_eq!(s.continued.len(), 1);
            counts[s.continued.iter().next().unwrap()] += 1;
        }
        assert!(counts.iter().all(|&c| c > 850 && c < 1150), "{counts:?}");
        let a = select_treatments(&[0.0; 4], &SelectionRule::RandomOne, &mut replication_stream(1, 9)).unwrap();
        let b = select_treatments(&[0.0; 4], &SelectionRule::RandomOne, &mut replication_stream(1, 9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn population_rules() {
        let fut = SelectionRule::FutilityPair { subgroup: 0.0, full: 0.0 };
        let both = SelectionOutcome::population(PopulationChoice::Both);
        assert_eq!(select_population(-1.2, -0.5, &fut).unwrap(), both);
        assert_eq!(
            select_population(-1.2, 0.5, &fut).unwrap().population_choice(),
            Some(PopulationChoice::SubgroupOnly)
        );
        assert_eq!(
            select_population(0.0, -0.1, &fut).unwrap().population_choice(),
            Some(PopulationChoice::FullOnly)
        );
        assert!(select_population(0.0, 0.0, &fut).unwrap().stopped_for_futility());

        let wide = SelectionRule::ThresholdPair { lower: -10.0, upper: 10.0 };
        for d in [-9.0, -1.0, 0.0, 3.0, 9.9] {
            assert_eq!(select_population(d, 0.0, &wide).unwrap(), both);
        }
        let tight = SelectionRule::ThresholdPair { lower: 0.0, upper: 0.0 };
        assert_eq!(
            select_population(1.3, 1.0, &tight).unwrap().population_choice(),
            Some(PopulationChoice::FullOnly)
        );
        assert_eq!(
            select_population(1.0, 1.0, &tight).unwrap().population_choice(),
            Some(PopulationChoice::SubgroupOnly)
        );
    }

    #[test]
    fn invalid_rules() {
        let bad = SelectionRule::ThresholdPair { lower: 1.0, upper: 0.0 };
        assert!(matches!(select_population(0.0, 0.0, &bad), Err(Error::InvalidRule(_))));
        assert!(SelectionRule::Best(0).validate().is_err());
        assert!(SelectionRule::Epsilon(-0.1).validate().is_err());
        assert!(select_population(0.0, 0.0, &SelectionRule::All).is_err());
        assert!(select_treatments(&[1.0], &bad, &mut replication_stream(0, 0)).is_err());
    }

    fn deterministic_rules() -> impl Strategy<Value = SelectionRule> {
        prop_oneof![
            Just(SelectionRule::All),
            (1usize..5).prop_map(SelectionRule::Best),
            (0.0f64..3.0).prop_map(SelectionRule::Epsilon),
            (-2.0f64..2.0).prop_map(SelectionRule::Threshold),
        ]
    }

    proptest! {
        #[test]
        fn best_m_size(z in proptest::collection::vec(-5.0f64..5.0, 1..8), m in 1usize..10) {
            prop_assert_eq!(pick(&z, SelectionRule::Best(m)).len(), m.min(z.len()));
        }

        #[test]
        fn raising_an_arm_keeps_it(z in proptest::collection::vec(-5.0f64..5.0, 1..7), rule in deterministic_rules(), bump in 0.0f64..3.0) {
            let before = pick(&z, rule);
            for k in before.iter() {
                let mut raised = z.clone();
                raised[k] += bump;
                prop_assert!(pick(&raised, rule).contains(k));
            }
        }

        #[test]
        fn permutation_equivariance(z in proptest::collection::hash_set(-500i32..500, 2..7), rule in deterministic_rules(), rot in 0usize..7) {
            // distinct values so that tie-breaking plays no role
            let z: Vec<f64> = z.into_iter().map(|v| v as f64 / 100.0).collect();
            let k = z.len();
            let perm: Vec<usize> = (0..k).map(|i| (i + rot) % k).collect();
            let permuted: Vec<f64> = perm.iter().map(|&p| z[p]).collect();
            let a = pick(&z, rule);
            let b = pick(&permuted, rule);
            for i in 0..k {
                prop_assert_eq!(b.contains(i), a.contains(perm[i]));
            }
        }
    }
}
