use sepdet_core::harness::generate::{random_finite_metric, MetricMethod};
use sepdet_core::harness::{
    generate_instance, replay, run_indexed, run_instance, run_suite, GridRule, InstanceStatus, Suite, SuiteConfig,
};
use sepdet_core::metric::validate_metric;
use sepdet_core::{Error, COMPARE_TOL};

fn small(suite: Suite, sizes: &[usize], instances: usize) -> SuiteConfig {
    SuiteConfig { sizes: sizes.to_vec(), instances, ..SuiteConfig::new(suite) }
}

#[test]
fn suite_ids_roundtrip() {
    for suite in Suite::ALL {
        assert_eq!(Suite::parse(suite.id()).unwrap(), suite);
    }
    assert!(matches!(Suite::parse("nope"), Err(Error::UnknownSuite(_))));
}

#[test]
fn sup_reduction_on_five_points_passes() {
    let report = run_suite(Suite::SupReduction, &small(Suite::SupReduction, &[5], 3)).unwrap();
    assert_eq!((report.instances, report.passed, report.failed), (3, 3, 0));
    assert_eq!(report.monotone_violations, 0);
    assert!(report.failures.is_empty());
}

#[test]
fn every_suite_passes_on_small_instances() {
    for suite in Suite::ALL {
        let sizes: &[usize] = if suite.is_product() { &[4, 6] } else { &[3, 7] };
        let report = run_suite(suite, &small(suite, sizes, 4)).unwrap();
        assert_eq!(report.failed, 0, "{}: {:?}", suite.id(), report.failures.first());
        assert_eq!(report.planted, report.planted_rejected, "{}", suite.id());
    }
}

#[test]
fn one_point_spaces_are_skipped_for_local_lipschitz() {
    let report = run_suite(Suite::LocalLipschitz, &small(Suite::LocalLipschitz, &[1], 4)).unwrap();
    assert_eq!(report.skipped, 4);
    assert_eq!(report.failed, 0);
}

#[test]
fn empty_tori_are_skipped() {
    let config = SuiteConfig { grid: GridRule::BelowSpectrum, ..small(Suite::TorusSup, &[5, 8], 4) };
    let report = run_suite(Suite::TorusSup, &config).unwrap();
    assert_eq!((report.skipped, report.failed), (4, 0));
}

#[test]
fn runs_are_deterministic() {
    for suite in [Suite::InfReduction, Suite::ProductReduction, Suite::Slope] {
        let config = small(suite, &[6, 9], 3);
        assert_eq!(run_suite(suite, &config).unwrap(), run_suite(suite, &config).unwrap());
        let (a, _) = run_indexed(suite, &config, 2);
        let (b, _) = run_indexed(suite, &config, 2);
        assert_eq!(a, b);
        let other = SuiteConfig { seed: 1, ..config.clone() };
        assert_ne!(run_indexed(suite, &other, 2).0.digest, a.digest);
    }
}

#[test]
fn loose_selection_fails_and_replays() {
    let mut config = small(Suite::SupReduction, &[8, 12], 10);
    config.closure.eps = 100.0;
    let report = run_suite(Suite::SupReduction, &config).unwrap();
    assert!(report.failed > 0);
    let witness = report.failures.first().unwrap();
    let again = replay(witness);
    assert_eq!(again.status(), InstanceStatus::Fail);
    assert_eq!(again.first_failure(), witness.check.as_ref());
    assert_eq!(again, run_instance(&witness.instance, &config));
}

#[test]
fn generated_instances_are_valid() {
    for suite in Suite::ALL {
        let config = small(suite, &[2, 10], 4);
        for i in 0..4 {
            let inst = generate_instance(suite, &config, i);
            assert_eq!(inst, generate_instance(suite, &config, i));
            assert!(validate_metric(&inst.space, inst.space.len(), COMPARE_TOL).is_ok());
        }
    }
    for method in [MetricMethod::Euclidean, MetricMethod::ShortestPath] {
        assert_eq!(random_finite_metric(30, 9, method), random_finite_metric(30, 9, method));
    }
}

#[test]
fn bad_configurations_are_rejected() {
    let mut config = SuiteConfig::new(Suite::Limits);
    config.sizes.clear();
    assert!(matches!(run_suite(Suite::Limits, &config), Err(Error::InvalidConfig(_))));
    let config = SuiteConfig { tolerance: -1.0, ..SuiteConfig::new(Suite::Limits) };
    assert!(config.validate().is_err());
}
