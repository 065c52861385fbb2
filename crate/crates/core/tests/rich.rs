mod common;

use std::collections::BTreeSet;

use common::{ids, space, table};
use proptest::prelude::*;
use sepdet_core::families::{BallPairQuotient, PuncturedBall, TorusSlope};
use sepdet_core::rich::FamilyHandle;
use sepdet_core::{ClosureConfig, Error, Mode, PointId, PointSet, WitnessProblem};

fn spread_line(n: usize) -> sepdet_core::FiniteSpace {
    sepdet_core::FiniteSpace::line(&(0..n).map(|i| (i * i) as f64 / 4.0).collect::<Vec<_>>()).unwrap()
}

#[test]
fn whole_space_is_a_member_and_a_lone_point_usually_is_not() {
    let s = spread_line(6);
    let f = sepdet_core::Tabulated::from_reals(&[3.0, -1.0, 2.0, 0.5, 4.0, -2.0]).unwrap();
    let pairs = BallPairQuotient::new(&s, 6, &f, Mode::Sup);
    let family = FamilyHandle::new(vec![&pairs], ClosureConfig::default()).unwrap();
    assert!(family.is_member(&ids(6).collect()).unwrap());
    assert!(!family.is_member(&PointSet::from([PointId(2)])).unwrap());
    let closed = family.cofinal_extend(&[PointId(2)]).unwrap();
    assert!(closed.contains(&PointId(2)));
    assert!(family.is_member(&closed).unwrap());
}

#[test]
fn chains_must_increase() {
    let s = spread_line(3);
    let f = sepdet_core::Tabulated::from_reals(&[0.0, 1.0, 0.0]).unwrap();
    let ball = PuncturedBall::new(&s, 3, &f, Mode::Inf);
    let family = FamilyHandle::new(vec![&ball], ClosureConfig::default()).unwrap();
    let a = PointSet::from([PointId(0)]);
    let b = PointSet::from([PointId(0), PointId(1)]);
    let c = PointSet::from([PointId(2)]);
    assert_eq!(family.sigma_union(&[a.clone(), b.clone()]).unwrap(), b);
    assert_eq!(family.sigma_union(&[a, b, c]), Err(Error::NotAChain(1)));
    assert_eq!(family.sigma_union(&[]).unwrap(), PointSet::new());
}

#[test]
fn families_on_different_spaces_do_not_intersect() {
    let s = spread_line(3);
    let t = spread_line(3);
    let f = sepdet_core::Tabulated::from_reals(&[0.0, 1.0, 0.0]).unwrap();
    let a = PuncturedBall::new(&s, 3, &f, Mode::Inf);
    let b = PuncturedBall::new(&t, 3, &f, Mode::Inf);
    let fa = FamilyHandle::new(vec![&a], ClosureConfig::default()).unwrap();
    let fb = FamilyHandle::new(vec![&b], ClosureConfig::default()).unwrap();
    assert!(matches!(fa.intersect(&fb), Err(Error::SpaceMismatch)));
    assert!(matches!(FamilyHandle::new(vec![&a, &b], ClosureConfig::default()), Err(Error::SpaceMismatch)));
}

#[test]
fn shallow_depth_limits_surface_as_errors() {
    let s = spread_line(8);
    let f = sepdet_core::Tabulated::from_reals(&[7.0, 6.0, 5.0, 4.0, 3.0, 2.0, 1.0, 0.0]).unwrap();
    let ball = PuncturedBall::new(&s, 8, &f, Mode::Inf);
    let cfg = ClosureConfig { max_depth: 1, ..ClosureConfig::default() };
    let family = FamilyHandle::new(vec![&ball], cfg).unwrap();
    assert_eq!(family.cofinal_extend(&[PointId(0)]), Err(Error::DepthExceeded(1)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn members_are_exactly_the_closed_sets(s in space(1, 8), fseed: u64, mask: u16) {
        let n = s.len();
        let f = table(n, fseed, true);
        let pairs = BallPairQuotient::new(&s, n, &f, Mode::Sup);
        let torus = TorusSlope::at_point_level(&s, n, &f, Mode::Sup);
        let family = FamilyHandle::new(vec![&pairs, &torus], ClosureConfig::default()).unwrap();
        let z: PointSet = ids(n).filter(|u| mask >> u.0 & 1 == 1).collect();
        let member = family.is_member(&z).unwrap();
        let seed: Vec<PointId> = z.iter().copied().collect();
        if !seed.is_empty() {
            prop_assert_eq!(member, family.cofinal_extend(&seed).unwrap() == z);
        }
    }

    #[test]
    fn cofinal_extension_is_a_smallest_member(s in space(1, 12), fseed: u64, xi: usize, yi: usize) {
        let n = s.len();
        let f = table(n, fseed, false);
        let pairs = BallPairQuotient::new(&s, n, &f, Mode::Sup);
        let family = FamilyHandle::new(vec![&pairs as &dyn WitnessProblem], ClosureConfig::default()).unwrap();
        let a = [PointId(xi % n)];
        let z = family.cofinal_extend(&a).unwrap();
        prop_assert!(family.is_member(&z).unwrap());
        prop_assert_eq!(&family.cofinal_extend(&z.iter().copied().collect::<Vec<_>>()).unwrap(), &z);
        // Any member containing `a` contains its extension.
        let bigger = family.cofinal_extend(&[a[0], PointId(yi % n)]).unwrap();
        prop_assert!(z.is_subset(&bigger));
    }

    #[test]
    fn unions_of_member_chains_are_members(s in space(2, 12), fseed: u64, order in Just((0..12).collect::<Vec<usize>>()).prop_shuffle()) {
        let n = s.len();
        let f = table(n, fseed, true);
        let ball = PuncturedBall::new(&s, n, &f, Mode::Sup);
        let family = FamilyHandle::new(vec![&ball as &dyn WitnessProblem], ClosureConfig::default()).unwrap();
        let seeds: Vec<PointId> = order.into_iter().filter(|&i| i < n).map(PointId).collect();
        let chain: Vec<PointSet> = (1..=seeds.len()).map(|k| family.cofinal_extend(&seeds[..k]).unwrap()).collect();
        let union = family.sigma_union(&chain).unwrap();
        prop_assert!(family.is_member(&union).unwrap());
    }

    #[test]
    fn intersected_families_contain_common_members(s in space(1, 12), fseed: u64, xi: usize) {
        let n = s.len();
        let f = table(n, fseed, false);
        let pairs = BallPairQuotient::new(&s, n, &f, Mode::Sup);
        let torus = TorusSlope::with_function_levels(&s, n, &f, Mode::Sup);
        let a = FamilyHandle::new(vec![&pairs as &dyn WitnessProblem], ClosureConfig::default()).unwrap();
        let b = FamilyHandle::new(vec![&torus as &dyn WitnessProblem], ClosureConfig::default()).unwrap();
        let both = a.intersect(&b).unwrap();
        let z = both.cofinal_extend(&[PointId(xi % n)]).unwrap();
        prop_assert!(a.is_member(&z).unwrap() && b.is_member(&z).unwrap());
        let union: BTreeSet<PointId> = a.cofinal_extend(&[PointId(xi % n)]).unwrap().union(&b.cofinal_extend(&[PointId(xi % n)]).unwrap()).copied().collect();
        prop_assert!(union.is_subset(&z));
    }
}
