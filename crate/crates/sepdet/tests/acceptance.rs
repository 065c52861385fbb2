//! Runs every acceptance criterion at its stated scale and tolerance and
//! prints one line per criterion. Exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use sepdet::parallel::{available_workers, run_suite_parallel};
use sepdet_core::families::{BallPairQuotient, PuncturedBall, TorusSlope};
use sepdet_core::harness::generate::FunctionKind;
use sepdet_core::harness::{generate_instance, run_indexed, Suite, SuiteConfig, SuiteReport};
use sepdet_core::scheme::closure_iterate;
use sepdet_core::{ClosureConfig, Mode, WitnessProblem};

struct Criterion {
    id: usize,
    name: &'static str,
    passed: bool,
    detail: String,
}

fn run(suite: Suite) -> (SuiteReport, f64) {
    let config = SuiteConfig::new(suite);
    let start = Instant::now();
    let report = run_suite_parallel(suite, &config, available_workers()).expect("default configs are valid");
    (report, start.elapsed().as_secs_f64())
}

/// Every instance passed (none failed or was entirely skipped), every
/// closure reached a fixed point and no one-sided bound was violated.
fn clean(report: &SuiteReport, min_instances: usize) -> bool {
    report.instances >= min_instances
        && report.passed == report.instances
        && report.failed == 0
        && report.failed_checks == 0
        && report.monotone_violations == 0
}

fn describe(report: &SuiteReport, seconds: f64) -> String {
    format!(
        "{} instances, {} passed, {} failed, {} checks ({} failed), {} monotone violations, {:.1}s",
        report.instances,
        report.passed,
        report.failed,
        report.checks,
        report.failed_checks,
        report.monotone_violations,
        seconds
    )
}

fn main() -> ExitCode {
    let mut results = Vec::new();
    let mut reports = Vec::new();
    let mut report_line = |c: Criterion| {
        println!("[{}] {} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.id, c.name, c.detail);
        results.push(c.passed);
    };

    let (sup, secs) = run(Suite::SupReduction);
    let max_n = sup.config.sizes.iter().copied().max().unwrap_or(0);
    report_line(Criterion {
        id: 1,
        name: "sup reduction",
        passed: clean(&sup, 100) && max_n <= 100 && secs < 60.0,
        detail: describe(&sup, secs),
    });
    reports.push(sup);

    let (inf, secs) = run(Suite::InfReduction);
    report_line(Criterion { id: 2, name: "inf reduction", passed: clean(&inf, 100), detail: describe(&inf, secs) });
    reports.push(inf);

    let (inter, secs) = run(Suite::Intersection);
    report_line(Criterion {
        id: 3,
        name: "intersection of ball-pair and torus families",
        passed: clean(&inter, 50),
        detail: describe(&inter, secs),
    });
    reports.push(inter);

    let (sigma, secs) = run(Suite::SigmaClosedness);
    report_line(Criterion {
        id: 4,
        name: "unions of increasing chains of fixed points",
        passed: clean(&sigma, 50),
        detail: describe(&sigma, secs),
    });
    reports.push(sigma);

    let (limits, secs) = run(Suite::Limits);
    let config = SuiteConfig::new(Suite::Limits);
    let steps = (0..config.instances)
        .filter(|&i| generate_instance(Suite::Limits, &config, i).function_kind == FunctionKind::Step)
        .count();
    report_line(Criterion {
        id: 5,
        name: "liminf, limsup and continuity",
        passed: clean(&limits, 100) && steps > 0,
        detail: format!("{}, {steps} step functions", describe(&limits, secs)),
    });
    reports.push(limits);

    let (local, s1) = run(Suite::LocalLipschitz);
    let (modulus, s2) = run(Suite::LipschitzModulus);
    report_line(Criterion {
        id: 6,
        name: "local Lipschitz constants and Lipschitz modulus",
        passed: clean(&local, 100) && clean(&modulus, 100),
        detail: format!("local: {}; modulus: {}", describe(&local, s1), describe(&modulus, s2)),
    });
    reports.push(local);
    reports.push(modulus);

    let (torus, s1) = run(Suite::TorusSup);
    let (slope, s2) = run(Suite::Slope);
    let hits = torus.convention_hits + slope.convention_hits;
    report_line(Criterion {
        id: 7,
        name: "torus suprema and slopes",
        passed: clean(&torus, 100) && clean(&slope, 100) && torus.convention_hits > 0 && slope.convention_hits > 0,
        detail: format!(
            "torus: {}; slope: {}; {hits} infinite-value branches, {} classification disagreements",
            describe(&torus, s1),
            describe(&slope, s2),
            torus.branch_disagreements + slope.branch_disagreements
        ),
    });
    reports.push(torus);
    reports.push(slope);

    let (partial, secs) = run(Suite::PartialSlope);
    let sizes_ok = partial.config.sizes.iter().all(|&n| n <= 30);
    report_line(Criterion {
        id: 8,
        name: "partial slopes on products",
        passed: clean(&partial, 30) && sizes_ok && partial.planted >= 10 && partial.planted_rejected == partial.planted,
        detail: format!(
            "{}, planted violations rejected {}/{}",
            describe(&partial, secs),
            partial.planted_rejected,
            partial.planted
        ),
    });
    reports.push(partial);

    let start = Instant::now();
    let monotone: usize = reports.iter().map(|r| r.monotone_violations).sum();
    let checks: usize = reports.iter().map(|r| r.checks).sum();
    let (replays, mismatched) = replay_determinism();
    let (closures, not_idempotent) = replay_idempotence();
    report_line(Criterion {
        id: 9,
        name: "structural invariants",
        passed: monotone == 0 && replays >= 100 && mismatched == 0 && closures >= 100 && not_idempotent == 0,
        detail: format!(
            "{monotone} monotone violations in {checks} checks; {replays} instance replays, {mismatched} differ; \
             {closures} reclosures, {not_idempotent} not idempotent; {:.1}s",
            start.elapsed().as_secs_f64()
        ),
    });

    if results.iter().all(|&ok| ok) {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

/// Reruns instances of every suite and compares the outcomes.
fn replay_determinism() -> (usize, usize) {
    let mut replays = 0;
    let mut mismatched = 0;
    for suite in Suite::ALL {
        let config = SuiteConfig { sizes: vec![5, 12, 20], instances: 10, seed: 7, ..SuiteConfig::new(suite) };
        for i in 0..config.instances {
            let first = run_indexed(suite, &config, i);
            let again = run_indexed(suite, &config, i);
            replays += 1;
            mismatched += usize::from(first != again);
        }
    }
    (replays, mismatched)
}

/// Closes random seeds under each shipped problem, then closes the result
/// again: it must come back unchanged after one round.
fn replay_idempotence() -> (usize, usize) {
    let mut closures = 0;
    let mut bad = 0;
    let config =
        SuiteConfig { sizes: vec![5, 20, 60], instances: 40, seed: 11, ..SuiteConfig::new(Suite::SupReduction) };
    let closure = ClosureConfig::default();
    for i in 0..config.instances {
        let inst = generate_instance(Suite::SupReduction, &config, i);
        let f = inst.function.as_ref().expect("reduction instances carry a function");
        let n = inst.space.len();
        let problems: [Box<dyn WitnessProblem + '_>; 3] = [
            Box::new(BallPairQuotient::new(&inst.space, n, f, Mode::Sup)),
            Box::new(TorusSlope::at_point_level(&inst.space, n, f, Mode::Inf)),
            Box::new(PuncturedBall::new(&inst.space, n, f, Mode::Inf)),
        ];
        for problem in &problems {
            let y = closure_iterate(&**problem, &inst.seed_points, &closure).expect("valid seed");
            let again = closure_iterate(&**problem, y.points(), &closure).expect("valid seed");
            let twice = closure_iterate(&**problem, &inst.seed_points, &closure).expect("valid seed");
            closures += 1;
            let ok =
                y.fixed_point && again.fixed_point && again.depth() == 1 && again.points() == y.points() && twice == y;
            bad += usize::from(!ok);
        }
    }
    (closures, bad)
}
