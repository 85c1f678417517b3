//! Closed testing of the elementary hypotheses with combination tests.
//!
//! Each intersection hypothesis is tested by combining a stage-1 p-value over
//! the whole intersection with a stage-2 p-value over the part of it that was
//! carried forward. Hypotheses dropped at the interim are never rejected.

mod combination;
mod table;

pub use combination::{
    chi_square4_quantile, chi_square4_sf, combine, combine_with, spending_boundaries, Boundaries, CombinationConfig,
    CombinationMethod, Combined, P_CLAMP,
};

use crate::statdist::{bvn_cdf, equicorr_max_cdf, norm_sf};
use crate::{ArmSet, Error, Result, MAX_ARMS};
use serde::{Deserialize, Serialize};
use std::sync::Arc;
use table::{max_table, MaxTable};

/// The elementary hypotheses H_1…H_K and their intersections.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HypothesisFamily {
    k: usize,
}

impl HypothesisFamily {
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 || k > MAX_ARMS {
            return Err(Error::InvalidTest(format!("closed testing supports 1 to {MAX_ARMS} hypotheses, got {k}")));
        }
        Ok(HypothesisFamily { k })
    }

    pub fn len(&self) -> usize {
        self.k
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// All 2^K − 1 nonempty intersections.
    pub fn intersections(&self) -> impl Iterator<Item = ArmSet> {
        (1u16..(1 << self.k)).map(ArmSet::from_mask)
    }
}

/// Test of an intersection hypothesis, with the design constant it needs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum IntersectionTest {
    /// Many-to-one comparison; arms share the control so statistics have
    /// correlation 1/(1+λ).
    Dunnett { allocation_ratio: f64 },
    Simes,
    Bonferroni,
    /// Subgroup and full population, correlated √τ; at most two hypotheses.
    SpiessensDebois { prevalence: f64 },
}

impl IntersectionTest {
    pub fn validate(&self) -> Result<()> {
        match *self {
            IntersectionTest::Dunnett { allocation_ratio } if !(allocation_ratio > 0.0 && allocation_ratio.is_finite()) => {
                Err(Error::InvalidTest(format!("allocation ratio must be positive, got {allocation_ratio}")))
            }
            IntersectionTest::SpiessensDebois { prevalence } if !(prevalence > 0.0 && prevalence <= 1.0) => {
                Err(Error::InvalidTest(format!("prevalence must lie in (0, 1], got {prevalence}")))
            }
            _ => Ok(()),
        }
    }

    fn max_correlation(&self) -> Option<f64> {
        match *self {
            IntersectionTest::Dunnett { allocation_ratio } => Some(1.0 / (1.0 + allocation_ratio)),
            IntersectionTest::SpiessensDebois { prevalence } => Some(prevalence.sqrt()),
            _ => None,
        }
    }
}

/// One-sided p-value 1 − Φ(z).
pub fn stage_pvalue(z: f64) -> f64 {
    norm_sf(z)
}

fn simes(z: &mut [f64]) -> f64 {
    // descending z is ascending p
    z.sort_unstable_by(|a, b| b.total_cmp(a));
    let m = z.len() as f64;
    z.iter()
        .enumerate()
        .map(|(i, &zi)| m * norm_sf(zi) / (i + 1) as f64)
        .fold(1.0, f64::min)
}

fn max_of(z: &[f64]) -> f64 {
    z.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// p-value of the intersection of the hypotheses whose statistics are `z`.
pub fn intersection_pvalue(z: &[f64], test: &IntersectionTest) -> Result<f64> {
    if z.is_empty() {
        return Err(Error::InvalidTest("intersection of no hypotheses".into()));
    }
    test.validate()?;
    if matches!(test, IntersectionTest::SpiessensDebois { .. }) && z.len() > 2 {
        return Err(Error::Unsupported(format!(
            "the Spiessens-Debois test covers at most two populations, got {}",
            z.len()
        )));
    }
    let mut buf = z.to_vec();
    Ok(evaluate(&mut buf, test, None))
}

fn evaluate(z: &mut [f64], test: &IntersectionTest, table: Option<&MaxTable>) -> f64 {
    let m = z.len();
    if m == 1 {
        return stage_pvalue(z[0]);
    }
    let zmax = max_of(z);
    match *test {
        IntersectionTest::Bonferroni => (m as f64 * norm_sf(zmax)).min(1.0),
        IntersectionTest::Simes => simes(z),
        IntersectionTest::Dunnett { .. } | IntersectionTest::SpiessensDebois { .. } => match table {
            Some(t) => t.upper_tail(m, zmax),
            None => {
                let r = test.max_correlation().unwrap();
                if m == 2 {
                    // P(max ≥ z) = 1 − P(Z₁ ≤ z, Z₂ ≤ z)
                    1.0 - bvn_cdf(zmax, zmax, r)
                } else {
                    1.0 - equicorr_max_cdf(m, r, zmax)
                }
            }
        },
    }
}

/// Decision on one intersection hypothesis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntersectionDecision {
    pub set: ArmSet,
    pub p1: f64,
    pub p2: f64,
    pub combined: Combined,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClosedTestResult {
    pub rejected: ArmSet,
    /// Every intersection, in increasing mask order.
    pub intersections: Vec<IntersectionDecision>,
}

impl ClosedTestResult {
    pub fn decision(&self, set: ArmSet) -> Option<&IntersectionDecision> {
        self.intersections.iter().find(|d| d.set == set)
    }
}

/// A closed testing procedure prepared for repeated use with one design.
#[derive(Clone, Debug)]
pub struct ClosedTester {
    family: HypothesisFamily,
    test: IntersectionTest,
    config: CombinationConfig,
    bounds: Boundaries,
    table: Option<Arc<MaxTable>>,
}

impl ClosedTester {
    pub fn new(k: usize, test: IntersectionTest, config: CombinationConfig) -> Result<Self> {
        let family = HypothesisFamily::new(k)?;
        test.validate()?;
        if matches!(test, IntersectionTest::SpiessensDebois { .. }) && k > 2 {
            return Err(Error::Unsupported(format!(
                "the Spiessens-Debois test covers at most two populations, got {k}"
            )));
        }
        let bounds = Boundaries::new(&config)?;
        let table = test.max_correlation().map(|r| max_table(k, r));
        Ok(ClosedTester { family, test, config, bounds, table })
    }

    /// The same procedure for a realized subgroup prevalence, evaluated
    /// without a lookup table.
    pub fn with_prevalence(&self, prevalence: f64) -> Self {
        match self.test {
            IntersectionTest::SpiessensDebois { .. } => ClosedTester {
                test: IntersectionTest::SpiessensDebois { prevalence },
                table: None,
                ..self.clone()
            },
            _ => self.clone(),
        }
    }

    pub fn family(&self) -> HypothesisFamily {
        self.family
    }

    pub fn test(&self) -> &IntersectionTest {
        &self.test
    }

    pub fn config(&self) -> &CombinationConfig {
        &self.config
    }

    pub fn boundaries(&self) -> &Boundaries {
        &self.bounds
    }

    fn pvalue(&self, z: &[f64], set: ArmSet) -> f64 {
        if set.is_empty() {
            return 1.0;
        }
        let mut buf = [0.0; MAX_ARMS];
        let mut m = 0;
        for k in set.iter() {
            buf[m] = z[k];
            m += 1;
        }
        evaluate(&mut buf[..m], &self.test, self.table.as_deref())
    }

    fn decide(&self, z1: &[f64], z2: &[f64], continued: ArmSet, set: ArmSet) -> IntersectionDecision {
        let p1 = self.pvalue(z1, set);
        let p2 = self.pvalue(z2, set.intersection(continued));
        let combined = combine_with(p1, p2, &self.config, &self.bounds);
        IntersectionDecision { set, p1, p2, combined }
    }

    fn check(&self, z1: &[f64], z2: &[f64]) {
        assert!(
            z1.len() == self.family.len() && z2.len() == self.family.len(),
            "statistics have length {} and {}, expected {}",
            z1.len(),
            z2.len(),
            self.family.len()
        );
    }

    /// Rejected elementary hypotheses, testing only the intersections needed.
    pub fn rejected(&self, z1: &[f64], z2: &[f64], continued: ArmSet) -> ArmSet {
        self.check(z1, z2);
        let k = self.family.len();
        let all = (1u16 << k) - 1;
        // 0 unknown, 1 rejected, 2 retained
        let mut memo = [0u8; 1 << MAX_ARMS];
        let mut rejected = ArmSet::EMPTY;
        for arm in continued.iter().filter(|&a| a < k) {
            let bit = 1u16 << arm;
            let mut ok = true;
            // walk supersets of {arm}, largest first
            let rest = all & !bit;
            let mut sub = rest;
            loop {
                let mask = sub | bit;
                let state = &mut memo[mask as usize];
                if *state == 0 {
                    let d = self.decide(z1, z2, continued, ArmSet::from_mask(mask));
                    *state = if d.combined.reject { 1 } else { 2 };
                }
                if *state == 2 {
                    ok = false;
                    break;
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & rest;
            }
            if ok {
                rejected.insert(arm);
            }
        }
        rejected
    }

    /// Full closed test with every intersection decision.
    pub fn run(&self, z1: &[f64], z2: &[f64], continued: ArmSet) -> ClosedTestResult {
        self.check(z1, z2);
        let intersections: Vec<_> = self
            .family
            .intersections()
            .map(|set| self.decide(z1, z2, continued, set))
            .collect();
        let mut rejected = ArmSet::EMPTY;
        for arm in continued.iter().filter(|&a| a < self.family.len()) {
            if intersections.iter().filter(|d| d.set.contains(arm)).all(|d| d.combined.reject) {
                rejected.insert(arm);
            }
        }
        ClosedTestResult { rejected, intersections }
    }
}

/// Closed test of H_1…H_K given stage-wise final-outcome statistics and the
/// set carried into stage 2.
pub fn closed_test(
    stage1_z: &[f64],
    stage2_z: &[f64],
    continued: ArmSet,
    test: IntersectionTest,
    config: CombinationConfig,
) -> Result<ClosedTestResult> {
    if stage1_z.len() != stage2_z.len() {
        return Err(Error::InvalidTest(format!(
            "stage statistics differ in length ({} and {})",
            stage1_z.len(),
            stage2_z.len()
        )));
    }
    let tester = ClosedTester::new(stage1_z.len(), test, config)?;
    Ok(tester.run(stage1_z, stage2_z, continued))
}

#[cfg(test)]
mod tests;
