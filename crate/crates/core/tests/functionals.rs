mod common;

use common::{ids, line, space, table};
use proptest::prelude::*;
use sepdet_core::families::{BallPairQuotient, PuncturedBall, TorusSlope};
use sepdet_core::function::{ClosedForm, Shape};
use sepdet_core::functionals::{
    continuity_check, liminf_at, limsup_at, lip_local_sup, lip_modulus, partial_slope, slope_at, torus_sup,
    verify_lipschitz_second, Domain, ProductDomain, ScaleGrid,
};
use sepdet_core::{
    ClosureConfig, Error, ExtReal, FiniteSpace, FunctionOracle, MetricSpace, Mode, PointId, PointSet, ProductFunction,
    Tabulated,
};

fn p(i: usize) -> PointId {
    PointId(i)
}

fn fin(v: f64) -> ExtReal {
    ExtReal::Finite(v)
}

fn coord(s: &FiniteSpace) -> Tabulated {
    ClosedForm::COORD.tabulate(s, s.len()).unwrap()
}

/// Points at the smallest positive distance from `x`, with that distance.
fn nearest_ring(s: &FiniteSpace, x: PointId) -> Option<(f64, Vec<PointId>)> {
    let e1 = ids(s.len()).filter(|&u| u != x).map(|u| s.raw_distance(x, u)).fold(f64::INFINITY, f64::min);
    e1.is_finite().then(|| (e1, ids(s.len()).filter(|&u| u != x && s.raw_distance(x, u) == e1).collect()))
}

fn close_enough(a: ExtReal, b: ExtReal) -> bool {
    match (a, b) {
        (ExtReal::Finite(a), ExtReal::Finite(b)) => (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs())),
        _ => a == b,
    }
}

#[test]
fn torus_sup_on_a_three_point_line() {
    let s = line(&[0.0, 1.0, 3.0]);
    let f = coord(&s);
    let dom = Domain::full(&s, 3);
    assert_eq!(torus_sup(&f, dom, p(0), fin(2.0), 0.5, 3.5).unwrap(), fin(1.0));
    assert_eq!(torus_sup(&f, dom, p(0), fin(2.0), 1.5, 3.5).unwrap(), fin(0.0));
    assert_eq!(torus_sup(&f, dom, p(0), fin(2.0), 1.5, 2.5), Err(Error::EmptyRegion { x: p(0) }));
    assert_eq!(torus_sup(&f, dom, p(0), fin(2.0), 2.0, 1.0), Err(Error::BadShell { inner: 2.0, outer: 1.0 }));
}

#[test]
fn slope_of_a_cone_on_a_symmetric_line() {
    let s = line(&[-2.0, -1.0, 0.0, 1.0, 2.0]);
    let grid = ScaleGrid::realized(&s, 5, p(2));
    let dom = Domain::full(&s, 5);
    let valley = ClosedForm::new(Shape::Abs { scale: 1.0 }).tabulate(&s, 5).unwrap();
    assert_eq!(slope_at(&valley, dom, p(2), &grid.shells).unwrap(), fin(0.0));
    assert_eq!(slope_at(&valley.negated(), dom, p(2), &grid.shells).unwrap(), fin(1.0));
    assert_eq!(slope_at(&coord(&s), dom, p(2), &grid.shells).unwrap(), fin(1.0));
}

#[test]
fn constants_are_flat() {
    let s = line(&[0.0, 0.5, 2.0, 3.0]);
    let f = Tabulated::from_reals(&[1.25; 4]).unwrap();
    let dom = Domain::full(&s, 4);
    for x in ids(4) {
        let grid = ScaleGrid::realized(&s, 4, x);
        assert_eq!(slope_at(&f, dom, x, &grid.shells).unwrap(), fin(0.0));
        assert_eq!(lip_modulus(&f, dom, x, &grid.radii).unwrap(), fin(0.0));
        assert_eq!(liminf_at(&f, dom, x, &grid.radii).unwrap(), fin(1.25));
        assert!(continuity_check(&f, dom, x, &grid.radii, 0.0).unwrap());
    }
}

#[test]
fn doubling_the_coordinate_has_modulus_two() {
    let s = line(&[0.0, 1.0, 3.0, 4.0]);
    let f = coord(&s).scaled(2.0);
    let dom = Domain::full(&s, 4);
    for x in ids(4) {
        let grid = ScaleGrid::realized(&s, 4, x);
        assert_eq!(lip_modulus(&f, dom, x, &grid.radii).unwrap(), fin(2.0));
    }
    let local = lip_local_sup(&f, dom, p(0), 0.5).unwrap();
    assert!(local.no_pairs());
    assert_eq!(local.value, fin(0.0));
    assert_eq!(lip_local_sup(&f, dom, p(0), 5.0).unwrap().pairs, 12);
}

#[test]
fn a_jump_is_not_continuous() {
    let s = line(&[-1.0, -0.5, 0.0, 0.5, 1.0]);
    let step = ClosedForm::new(Shape::Step { threshold: 0.0, below: 0.0, above: 1.0 }).tabulate(&s, 5).unwrap();
    let dom = Domain::full(&s, 5);
    let grid = ScaleGrid::realized(&s, 5, p(2));
    assert!(!continuity_check(&step, dom, p(2), &grid.radii, 1e-9).unwrap());
    assert_eq!(liminf_at(&step, dom, p(2), &grid.radii).unwrap(), fin(0.0));
    assert_eq!(limsup_at(&step, dom, p(2), &grid.radii).unwrap(), fin(1.0));
    let grid = ScaleGrid::realized(&s, 5, p(4));
    assert!(continuity_check(&step, dom, p(4), &grid.radii, 1e-9).unwrap());
}

#[test]
fn isolated_centers_and_empty_grids() {
    let s = line(&[0.0, 1.0]);
    let f = coord(&s);
    let dom = Domain::full(&s, 2);
    let grid = ScaleGrid::below_spectrum(&s, 2, p(0));
    assert_eq!(liminf_at(&f, dom, p(0), &grid.radii), Err(Error::IsolatedPoint(p(0))));
    assert_eq!(slope_at(&f, dom, p(0), &grid.shells), Err(Error::IsolatedPoint(p(0))));
    assert_eq!(lip_modulus(&f, dom, p(0), &grid.radii).unwrap(), fin(0.0));
    let only = PointSet::from([p(1)]);
    assert_eq!(liminf_at(&f, Domain::restricted(&s, 2, &only), p(0), &[2.0]), Err(Error::NotInSubspace(p(0))));
    assert_eq!(ScaleGrid::new(vec![0.0], vec![], vec![]), Err(Error::NonPositiveRadius(0.0)));
}

#[test]
fn lipschitz_in_the_second_variable() {
    let right = line(&[0.0, 1.0, 2.5]);
    let f = ProductFunction::from_fn(2, 3, |x, y| fin(x.0 as f64 + 2.0 * right.coords(y).unwrap()[0]));
    let verdict = verify_lipschitz_second(&f, &right, 1.0, None);
    assert!(!verdict.holds);
    assert_eq!(verdict.witness, Some((p(0), p(0), p(1))));
    assert!(verify_lipschitz_second(&f, &right, 2.0, None).holds);
    assert_eq!(verify_lipschitz_second(&f, &right, 2.0, None).checked, 6);

    let left = line(&[0.0, 1.0]);
    let dom = ProductDomain { left: &left, right: &right, left_subset: None, right_subset: None };
    let shells = ScaleGrid::realized(&left, 2, p(0)).shells;
    assert_eq!(
        partial_slope(&f, dom, p(0), p(1), &shells, Some(1.0)),
        Err(Error::LipschitzViolation { x: p(0), y1: p(0), y2: p(1) })
    );
    assert_eq!(
        partial_slope(&f, dom, p(1), p(1), &ScaleGrid::realized(&left, 2, p(1)).shells, Some(2.0)).unwrap(),
        fin(1.0)
    );
}

#[test]
fn infinite_values_follow_the_extended_conventions() {
    let s = line(&[0.0, 1.0, 2.0]);
    let f = Tabulated::new(vec![fin(0.0), ExtReal::PosInf, fin(3.0)]).unwrap();
    let dom = Domain::full(&s, 3);
    let grid = ScaleGrid::realized(&s, 3, p(1));
    assert_eq!(slope_at(&f, dom, p(1), &grid.shells).unwrap(), ExtReal::PosInf);
    assert_eq!(lip_modulus(&f, dom, p(0), &ScaleGrid::realized(&s, 3, p(0)).radii).unwrap(), ExtReal::PosInf);
    assert_eq!(liminf_at(&f, dom, p(1), &grid.radii).unwrap(), fin(0.0));
}

fn closed(problem: &dyn sepdet_core::WitnessProblem, x: PointId) -> PointSet {
    sepdet_core::scheme::closure_iterate(problem, &[x], &ClosureConfig::default()).unwrap().to_set()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn limits_are_the_nearest_ring_extremes(s in space(2, 16), fseed: u64, inf: bool, xi: usize) {
        let f = table(s.len(), fseed, inf);
        let x = PointId(xi % s.len());
        let (_, ring) = nearest_ring(&s, x).unwrap();
        let radii = ScaleGrid::realized(&s, s.len(), x).radii;
        let dom = Domain::full(&s, s.len());
        prop_assert_eq!(liminf_at(&f, dom, x, &radii).unwrap(), ring.iter().map(|&u| f.eval(u)).min().unwrap());
        prop_assert_eq!(limsup_at(&f, dom, x, &radii).unwrap(), ring.iter().map(|&u| f.eval(u)).max().unwrap());
    }

    #[test]
    fn slope_and_modulus_live_on_the_nearest_ring(s in space(2, 16), fseed: u64, xi: usize) {
        let f = table(s.len(), fseed, false);
        let x = PointId(xi % s.len());
        let (e1, ring) = nearest_ring(&s, x).unwrap();
        let grid = ScaleGrid::realized(&s, s.len(), x);
        let dom = Domain::full(&s, s.len());
        let fx = f.eval(x).to_f64();
        let slope = ring.iter().map(|&u| (fx - f.eval(u).to_f64()).max(0.0) / e1).fold(0.0, f64::max);
        prop_assert!(close_enough(slope_at(&f, dom, x, &grid.shells).unwrap(), fin(slope)));
        let mut ball = ring.clone();
        ball.push(x);
        let mut lip = 0.0f64;
        for &a in &ball {
            for &b in &ball {
                if a != b {
                    lip = lip.max((f.eval(a).to_f64() - f.eval(b).to_f64()).abs() / s.raw_distance(a, b));
                }
            }
        }
        prop_assert!(close_enough(lip_modulus(&f, dom, x, &grid.radii).unwrap(), fin(lip)));
    }

    #[test]
    fn limsup_is_dual_to_liminf(s in space(2, 14), fseed: u64, inf: bool, xi: usize) {
        let f = table(s.len(), fseed, inf);
        let x = PointId(xi % s.len());
        let radii = ScaleGrid::realized(&s, s.len(), x).radii;
        let dom = Domain::full(&s, s.len());
        prop_assert_eq!(limsup_at(&f, dom, x, &radii).unwrap(), -liminf_at(&f.negated(), dom, x, &radii).unwrap());
    }

    #[test]
    fn slope_and_modulus_are_positively_homogeneous(s in space(2, 14), fseed: u64, k in 1u32..16, xi: usize) {
        let f = table(s.len(), fseed, false);
        let c = k as f64 / 4.0;
        let x = PointId(xi % s.len());
        let grid = ScaleGrid::realized(&s, s.len(), x);
        let dom = Domain::full(&s, s.len());
        let g = f.scaled(c);
        prop_assert!(close_enough(slope_at(&g, dom, x, &grid.shells).unwrap(), slope_at(&f, dom, x, &grid.shells).unwrap().scale(c)));
        prop_assert!(close_enough(lip_modulus(&g, dom, x, &grid.radii).unwrap(), lip_modulus(&f, dom, x, &grid.radii).unwrap().scale(c)));
        prop_assert!(close_enough(lip_modulus(&f.negated(), dom, x, &grid.radii).unwrap(), lip_modulus(&f, dom, x, &grid.radii).unwrap()));
    }

    #[test]
    fn slope_vanishes_at_a_global_minimizer(s in space(2, 14), fseed: u64) {
        let f = table(s.len(), fseed, true);
        let x = ids(s.len()).min_by_key(|&u| f.eval(u)).unwrap();
        let shells = ScaleGrid::realized(&s, s.len(), x).shells;
        prop_assert_eq!(slope_at(&f, Domain::full(&s, s.len()), x, &shells).unwrap(), fin(0.0));
    }

    #[test]
    fn closed_subsets_see_the_full_values(s in space(2, 14), fseed: u64, inf: bool, xi: usize) {
        let n = s.len();
        let f = table(n, fseed, inf);
        let x = PointId(xi % n);
        let full = Domain::full(&s, n);
        let y = closed(&PuncturedBall::new(&s, n, &f, Mode::Inf), x);
        for &u in &y {
            let radii = ScaleGrid::realized(&s, n, u).radii;
            prop_assert_eq!(liminf_at(&f, Domain::restricted(&s, n, &y), u, &radii), liminf_at(&f, full, u, &radii));
        }
        let y = closed(&PuncturedBall::new(&s, n, &f, Mode::Sup), x);
        for &u in &y {
            let radii = ScaleGrid::realized(&s, n, u).radii;
            prop_assert_eq!(limsup_at(&f, Domain::restricted(&s, n, &y), u, &radii), limsup_at(&f, full, u, &radii));
        }
        let y = closed(&BallPairQuotient::new(&s, n, &f, Mode::Sup), x);
        for &u in &y {
            let radii = ScaleGrid::realized(&s, n, u).radii;
            prop_assert_eq!(lip_modulus(&f, Domain::restricted(&s, n, &y), u, &radii), lip_modulus(&f, full, u, &radii));
        }
        let y = closed(&TorusSlope::at_point_level(&s, n, &f, Mode::Sup), x);
        for &u in &y {
            let shells = ScaleGrid::realized(&s, n, u).shells;
            let restricted = slope_at(&f, Domain::restricted(&s, n, &y), u, &shells);
            prop_assert_eq!(restricted, slope_at(&f, full, u, &shells));
        }
    }
}
