use super::*;
use crate::statdist::{norm_quantile, replication_stream};
use proptest::prelude::*;

fn z_of(p: f64) -> f64 {
    norm_quantile(1.0 - p).unwrap()
}

fn inv_normal() -> CombinationConfig {
    CombinationConfig::inverse_normal(100.0, 300.0, 0.025)
}

const DUNNETT: IntersectionTest = IntersectionTest::Dunnett { allocation_ratio: 1.0 };

#[test]
fn stage_pvalue_examples() {
    assert_eq!(stage_pvalue(0.0), 0.5);
    assert!((stage_pvalue(1.959964) - 0.025).abs() < 1e-8);
    for z in [-2.5, -0.3, 0.7, 3.1] {
        assert!((stage_pvalue(-z) - (1.0 - stage_pvalue(z))).abs() < 1e-15);
    }
}

#[test]
fn singletons_reduce_to_stage_pvalue() {
    for t in [DUNNETT, IntersectionTest::Simes, IntersectionTest::Bonferroni, IntersectionTest::SpiessensDebois { prevalence: 0.3 }] {
        assert_eq!(intersection_pvalue(&[1.7], &t).unwrap(), stage_pvalue(1.7));
    }
}

#[test]
fn bonferroni_and_simes_arithmetic() {
    let z = [z_of(0.01), z_of(0.04)];
    assert!((intersection_pvalue(&z, &IntersectionTest::Bonferroni).unwrap() - 0.02).abs() < 1e-12);
    assert!((intersection_pvalue(&z, &IntersectionTest::Simes).unwrap() - 0.02).abs() < 1e-12);
    let z = [z_of(0.03), z_of(0.02), z_of(0.9)];
    assert!((intersection_pvalue(&z, &IntersectionTest::Simes).unwrap() - 0.045).abs() < 1e-12);
    assert!((intersection_pvalue(&z, &IntersectionTest::Bonferroni).unwrap() - 0.06).abs() < 1e-12);
}

#[test]
fn spiessens_debois_limits() {
    let sd = IntersectionTest::SpiessensDebois { prevalence: 0.3 };
    assert!(matches!(intersection_pvalue(&[1.0, 2.0, 3.0], &sd), Err(Error::Unsupported(_))));
    assert!(matches!(
        ClosedTester::new(3, sd, inv_normal()),
        Err(Error::Unsupported(_))
    ));
    assert!(intersection_pvalue(&[], &DUNNETT).is_err());
}

/// Fraction of `n` equicorrelated draws whose maximum reaches `z`.
fn mc_max_tail(m: usize, r: f64, z: f64, n: u64, seed: u64) -> f64 {
    let mut s = replication_stream(seed, 0);
    let (c, d) = (r.sqrt(), (1.0 - r).sqrt());
    let mut hits = 0u64;
    for _ in 0..n {
        let u = c * s.standard_normal();
        if (0..m).any(|_| u + d * s.standard_normal() >= z) {
            hits += 1;
        }
    }
    hits as f64 / n as f64
}

fn mc_bound(p: f64, n: u64) -> f64 {
    3.0 * (p * (1.0 - p) / n as f64).sqrt()
}

#[test]
fn dunnett_against_brute_force() {
    let p = intersection_pvalue(&[2.0, 1.5], &DUNNETT).unwrap();
    assert!((p - (1.0 - equicorr_max_cdf(2, 0.5, 2.0))).abs() < 1e-12);
    let n = 10_000_000;
    let mc = mc_max_tail(2, 0.5, 2.0, n, 11);
    assert!((p - mc).abs() < mc_bound(p, n), "p={p} mc={mc}");
}

#[test]
fn spiessens_debois_critical_value_against_brute_force() {
    let sd = IntersectionTest::SpiessensDebois { prevalence: 0.3 };
    let (mut lo, mut hi) = (1.0, 4.0);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if intersection_pvalue(&[mid, mid], &sd).unwrap() > 0.025 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let c = 0.5 * (lo + hi);
    assert!(c > 1.96 && c < 2.2414, "c={c}");
    let n = 10_000_000;
    let mc = mc_max_tail(2, 0.3f64.sqrt(), c, n, 12);
    assert!((mc - 0.025).abs() < mc_bound(0.025, n), "c={c} mc={mc}");
}

#[test]
fn spending_boundary_against_joint_sampling() {
    let c = inv_normal().with_spending(0.0125);
    let (u1, u2) = spending_boundaries(&c).unwrap();
    let mut s = replication_stream(13, 0);
    let n = 10_000_000u64;
    let w1 = c.weights.0;
    let w2 = c.weights.1;
    let mut hits = 0u64;
    for _ in 0..n {
        let c1 = s.standard_normal();
        let c2 = w1 * c1 + w2 * s.standard_normal();
        if c1 < u1 && c2 >= u2 {
            hits += 1;
        }
    }
    let mc = hits as f64 / n as f64;
    assert!((mc - 0.0125).abs() < mc_bound(0.0125, n), "mc={mc}");
}

#[test]
fn orderings_on_random_inputs() {
    let mut s = replication_stream(14, 0);
    for _ in 0..1000 {
        let m = 2 + s.index_below(5);
        let z: Vec<f64> = (0..m).map(|_| 1.0 + 1.5 * s.standard_normal()).collect();
        let d = intersection_pvalue(&z, &DUNNETT).unwrap();
        let b = intersection_pvalue(&z, &IntersectionTest::Bonferroni).unwrap();
        let si = intersection_pvalue(&z, &IntersectionTest::Simes).unwrap();
        assert!(d <= b + 1e-12, "{z:?}");
        assert!(si <= b + 1e-15, "{z:?}");
    }
}

#[test]
fn single_hypothesis_reduces_to_combination() {
    let c = inv_normal();
    for (z1, z2) in [(1.0, 1.5), (2.0, 1.0), (0.0, 3.0), (-1.0, 2.0)] {
        let r = closed_test(&[z1], &[z2], ArmSet::singleton(0), DUNNETT, c).unwrap();
        let direct = combine(stage_pvalue(z1), stage_pvalue(z2), &c).unwrap();
        assert_eq!(r.rejected.contains(0), direct.reject);
    }
}

#[test]
fn dropped_arms_are_never_rejected() {
    let big = [9.0, 9.0, 9.0];
    let continued = ArmSet::singleton(1);
    for t in [DUNNETT, IntersectionTest::Simes, IntersectionTest::Bonferroni] {
        let r = closed_test(&big, &big, continued, t, inv_normal()).unwrap();
        assert_eq!(r.rejected, continued);
        let f = closed_test(&big, &big, continued, t, CombinationConfig::fisher(0.025)).unwrap();
        assert_eq!(f.rejected, continued);
    }
    let r = closed_test(&big, &big, ArmSet::EMPTY, DUNNETT, inv_normal()).unwrap();
    assert!(r.rejected.is_empty());
}

#[test]
fn large_statistics_reject_everything() {
    let sd = IntersectionTest::SpiessensDebois { prevalence: 0.3 };
    let r = closed_test(&[6.0, 6.0], &[6.0, 6.0], ArmSet::full(2), sd, inv_normal()).unwrap();
    assert_eq!(r.rejected, ArmSet::full(2));
    assert_eq!(r.intersections.len(), 3);
}

#[test]
fn empty_stage2_intersection_has_unit_pvalue() {
    let r = closed_test(&[3.0, 0.0], &[0.0, 2.0], ArmSet::singleton(1), DUNNETT, inv_normal()).unwrap();
    let d = r.decision(ArmSet::singleton(0)).unwrap();
    assert_eq!(d.p2, 1.0);
    assert!(!d.combined.reject);
    let both = r.decision(ArmSet::full(2)).unwrap();
    assert_eq!(both.p2, stage_pvalue(2.0));
}

#[test]
fn prepared_tester_with_realized_prevalence() {
    let t = ClosedTester::new(2, IntersectionTest::SpiessensDebois { prevalence: 0.3 }, inv_normal()).unwrap();
    let u = t.with_prevalence(0.3);
    let z1 = [2.1, 1.4];
    let z2 = [1.9, 2.2];
    let a = t.run(&z1, &z2, ArmSet::full(2));
    let b = u.run(&z1, &z2, ArmSet::full(2));
    for (x, y) in a.intersections.iter().zip(&b.intersections) {
        assert!((x.p1 - y.p1).abs() < 1e-11 && (x.p2 - y.p2).abs() < 1e-11);
    }
}

fn tests_strategy() -> impl Strategy<Value = IntersectionTest> {
    prop_oneof![
        (0.5f64..2.0).prop_map(|l| IntersectionTest::Dunnett { allocation_ratio: l }),
        Just(IntersectionTest::Simes),
        Just(IntersectionTest::Bonferroni),
    ]
}

proptest! {
    #[test]
    fn lazy_and_full_procedures_agree(
        z in proptest::collection::vec((-1.0f64..4.5, -1.0f64..4.5), 1..6),
        mask in 0u16..64,
        test in tests_strategy(),
        fisher in any::<bool>(),
    ) {
        let k = z.len();
        let z1: Vec<f64> = z.iter().map(|p| p.0).collect();
        let z2: Vec<f64> = z.iter().map(|p| p.1).collect();
        let continued = ArmSet::from_mask(mask & ((1 << k) - 1));
        let config = if fisher { CombinationConfig::fisher(0.025) } else { inv_normal() };
        let tester = ClosedTester::new(k, test, config).unwrap();
        let full = tester.run(&z1, &z2, continued);
        prop_assert_eq!(tester.rejected(&z1, &z2, continued), full.rejected);
        prop_assert!(full.rejected.is_subset(continued));
        for arm in full.rejected.iter() {
            prop_assert!(full.decision(ArmSet::singleton(arm)).unwrap().combined.reject);
            for d in full.intersections.iter().filter(|d| d.set.contains(arm)) {
                prop_assert!(d.combined.reject);
            }
        }
    }
}
