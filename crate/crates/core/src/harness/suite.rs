//! The property suites: generate an instance, close a seed, compare full and
//! restricted values, and aggregate verdicts into a replayable report.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::Rng;

use super::generate::{
    instance_seed, lipschitz_product, plant_violation, random_finite_metric, random_function, random_subset, rng,
    with_infinite_subset, FunctionKind, MetricMethod,
};
use super::oracle::brute_force_optimum;
use crate::error::Error;
use crate::ext_real::ExtReal;
use crate::families::{function_levels, BallPairQuotient, ProductTorusSlope, PuncturedBall, TorusSlope};
use crate::function::{FunctionOracle, ProductFunction, Tabulated};
use crate::functionals::{
    continuity_check, liminf_at, limsup_at, lip_local_sup, lip_modulus, partial_slope, slope_at, torus_sup,
    verify_lipschitz_second, Domain, ProductDomain, ScaleGrid,
};
use crate::metric::{FiniteSpace, MetricSpace, PointId, PointSet};
use crate::rich::FamilyHandle;
use crate::scheme::product::{check_product_reduction, product_closure};
use crate::scheme::{check_point, intersect_problems, ClosureConfig, Mode, Param, Truncation, Verdict, WitnessProblem};

/// The shipped suites.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Suite {
    #[cfg_attr(feature = "serde", serde(rename = "prop-1.1"))]
    Intersection,
    #[cfg_attr(feature = "serde", serde(rename = "thm-2.1"))]
    SupReduction,
    #[cfg_attr(feature = "serde", serde(rename = "thm-2.2"))]
    InfReduction,
    #[cfg_attr(feature = "serde", serde(rename = "thm-2.3"))]
    ProductReduction,
    #[cfg_attr(feature = "serde", serde(rename = "sigma-closedness"))]
    SigmaClosedness,
    #[cfg_attr(feature = "serde", serde(rename = "thm-3.1"))]
    Limits,
    #[cfg_attr(feature = "serde", serde(rename = "prop-3.2"))]
    LocalLipschitz,
    #[cfg_attr(feature = "serde", serde(rename = "thm-3.3"))]
    LipschitzModulus,
    #[cfg_attr(feature = "serde", serde(rename = "prop-4.1"))]
    TorusSup,
    #[cfg_attr(feature = "serde", serde(rename = "thm-4.2"))]
    Slope,
    #[cfg_attr(feature = "serde", serde(rename = "thm-4.3"))]
    PartialSlope,
}

impl Suite {
    pub const ALL: [Suite; 11] = [
        Suite::Intersection,
        Suite::SupReduction,
        Suite::InfReduction,
        Suite::ProductReduction,
        Suite::SigmaClosedness,
        Suite::Limits,
        Suite::LocalLipschitz,
        Suite::LipschitzModulus,
        Suite::TorusSup,
        Suite::Slope,
        Suite::PartialSlope,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Suite::Intersection => "prop-1.1",
            Suite::SupReduction => "thm-2.1",
            Suite::InfReduction => "thm-2.2",
            Suite::ProductReduction => "thm-2.3",
            Suite::SigmaClosedness => "sigma-closedness",
            Suite::Limits => "thm-3.1",
            Suite::LocalLipschitz => "prop-3.2",
            Suite::LipschitzModulus => "thm-3.3",
            Suite::TorusSup => "prop-4.1",
            Suite::Slope => "thm-4.2",
            Suite::PartialSlope => "thm-4.3",
        }
    }

    pub fn parse(name: &str) -> Result<Suite, Error> {
        Suite::ALL.into_iter().find(|s| s.id() == name).ok_or_else(|| Error::UnknownSuite(name.into()))
    }

    pub fn is_product(self) -> bool {
        matches!(self, Suite::ProductReduction | Suite::PartialSlope)
    }

    /// Pair scans and slopes are capped at 100 points, torus suprema over
    /// several levels at 50, products at 30 points per factor.
    pub fn default_sizes(self) -> Vec<usize> {
        match self {
            Suite::Limits => alloc::vec![5, 20, 100, 200],
            Suite::ProductReduction | Suite::PartialSlope => alloc::vec![5, 12, 20, 30],
            Suite::TorusSup => alloc::vec![5, 20, 50],
            _ => alloc::vec![5, 20, 100],
        }
    }

    fn default_instances(self) -> usize {
        match self {
            Suite::Intersection | Suite::SigmaClosedness => 50,
            Suite::ProductReduction | Suite::PartialSlope => 30,
            _ => 100,
        }
    }
}

/// Which radii and shells the functional checks sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "kebab-case"))]
pub enum GridRule {
    /// Every distinct ball and torus around each point.
    Realized,
    /// Only scales below the nearest distance: every punctured ball and torus
    /// is empty.
    BelowSpectrum,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SuiteConfig {
    /// Instance `i` uses `sizes[i % sizes.len()]` points (per factor for
    /// products).
    pub sizes: Vec<usize>,
    pub instances: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub closure: ClosureConfig,
    pub truncation: Truncation,
    pub grid: GridRule,
    /// `None` alternates between the two methods.
    pub metric: Option<MetricMethod>,
    /// Reductions on spaces with at most this many points are also checked
    /// against the brute-force oracle.
    pub oracle_limit: usize,
}

impl SuiteConfig {
    pub fn new(suite: Suite) -> Self {
        SuiteConfig {
            sizes: suite.default_sizes(),
            instances: suite.default_instances(),
            seed: 0,
            tolerance: 0.0,
            closure: ClosureConfig::default(),
            truncation: Truncation::Realized,
            grid: GridRule::Realized,
            metric: None,
            oracle_limit: 12,
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.sizes.is_empty() || self.sizes.contains(&0) {
            return Err(Error::InvalidConfig("sizes must be nonempty and positive"));
        }
        if !(self.tolerance >= 0.0) {
            return Err(Error::InvalidConfig("tolerance must be nonnegative"));
        }
        if !(self.closure.eps >= 0.0) {
            return Err(Error::InvalidConfig("eps must be nonnegative"));
        }
        Ok(())
    }

    fn size(&self, index: usize, shift: usize) -> usize {
        self.sizes[(index + shift) % self.sizes.len()]
    }

    fn method(&self, index: usize) -> MetricMethod {
        self.metric.unwrap_or(if index.is_multiple_of(2) {
            MetricMethod::Euclidean
        } else {
            MetricMethod::ShortestPath
        })
    }
}

/// The second factor of a product instance.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ProductData {
    pub right: FiniteSpace,
    pub function: ProductFunction,
    pub right_seed: Vec<PointId>,
    pub lipschitz: Option<f64>,
    /// `(x*, y′, y″)` of a planted violation of the Lipschitz bound.
    pub planted: Option<(PointId, PointId, PointId)>,
}

/// Everything a suite needs to rerun one instance.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Instance {
    pub suite: Suite,
    pub index: usize,
    pub seed: u64,
    pub space: FiniteSpace,
    pub function_kind: FunctionKind,
    pub function: Option<Tabulated>,
    /// Levels `t` swept by the torus suite.
    pub levels: Vec<ExtReal>,
    pub seed_points: Vec<PointId>,
    /// Nested seeds (chain suite only).
    pub chain: Vec<Vec<PointId>>,
    pub product: Option<ProductData>,
}

/// One comparison between a full-space and a restricted value.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CheckRecord {
    pub kind: String,
    pub x: Option<PointId>,
    pub y: Option<PointId>,
    pub param: Option<Param>,
    pub lhs: Option<ExtReal>,
    pub rhs: Option<ExtReal>,
    pub monotone: bool,
    /// Structural checks (fixed point, idempotence, membership) do not count
    /// towards the pass/skip classification of an instance.
    pub structural: bool,
    pub verdict: Verdict,
}

impl CheckRecord {
    fn structural(kind: &str, ok: bool) -> Self {
        CheckRecord {
            kind: kind.into(),
            x: None,
            y: None,
            param: None,
            lhs: None,
            rhs: None,
            monotone: true,
            structural: true,
            verdict: if ok { Verdict::Pass } else { Verdict::Fail },
        }
    }

    fn at(mut self, x: PointId) -> Self {
        self.x = Some(x);
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "kebab-case"))]
pub enum InstanceStatus {
    Pass,
    Fail,
    Skipped,
}

/// Verdict counts over the checks of one instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CheckCounts {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    pub monotone_violations: usize,
    /// Passed checks that compare values (as opposed to structural ones).
    pub value_passes: usize,
}

/// At most this many failing records are kept per instance.
pub const MAX_FAILURES: usize = 16;

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InstanceOutcome {
    pub index: usize,
    pub seed: u64,
    pub size: usize,
    /// Level sizes of every closure computed, in order.
    pub closures: Vec<Vec<usize>>,
    pub counts: CheckCounts,
    /// The first failing records.
    pub failures: Vec<CheckRecord>,
    /// FNV-1a hash of every record in order; equal digests on a rerun mean
    /// the same checks produced the same values.
    pub digest: u64,
    pub convention_hits: usize,
    pub branch_disagreements: usize,
    pub planted: bool,
    pub planted_rejected: bool,
    pub error: Option<String>,
}

impl InstanceOutcome {
    pub fn status(&self) -> InstanceStatus {
        if self.error.is_some() || self.counts.failed > 0 {
            InstanceStatus::Fail
        } else if self.counts.value_passes > 0 {
            InstanceStatus::Pass
        } else {
            InstanceStatus::Skipped
        }
    }

    pub fn first_failure(&self) -> Option<&CheckRecord> {
        self.failures.first()
    }
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;

fn fnv(mut h: u64, bytes: &[u8]) -> u64 {
    for &b in bytes {
        h = (h ^ b as u64).wrapping_mul(0x100_0000_01b3);
    }
    h
}

fn hash_ext(h: u64, v: Option<ExtReal>) -> u64 {
    match v {
        None => fnv(h, &[0]),
        Some(ExtReal::NegInf) => fnv(h, &[1]),
        Some(ExtReal::PosInf) => fnv(h, &[2]),
        Some(ExtReal::Finite(f)) => fnv(fnv(h, &[3]), &f.to_bits().to_le_bytes()),
    }
}

fn hash_record(mut h: u64, r: &CheckRecord) -> u64 {
    h = fnv(h, r.kind.as_bytes());
    for id in [r.x, r.y] {
        h = fnv(h, &id.map_or(u64::MAX, |p| p.0 as u64).to_le_bytes());
    }
    match &r.param {
        None => h = fnv(h, &[0]),
        Some(Param::Radius { r }) => h = fnv(fnv(h, &[1]), &r.to_bits().to_le_bytes()),
        Some(Param::Shell { t, r, s }) => {
            h = hash_ext(fnv(h, &[2]), Some(*t));
            h = fnv(h, &r.to_bits().to_le_bytes());
            h = fnv(h, &s.to_bits().to_le_bytes());
        }
    }
    h = hash_ext(h, r.lhs);
    h = hash_ext(h, r.rhs);
    let verdict = match r.verdict {
        Verdict::Pass => 0,
        Verdict::Fail => 1,
        Verdict::SkippedEmptyRegion => 2,
    };
    fnv(h, &[r.monotone as u8, r.structural as u8, verdict])
}

/// A failing instance together with the data needed to rerun it.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FailureWitness {
    pub suite: Suite,
    pub config: SuiteConfig,
    pub instance: Instance,
    pub check: Option<CheckRecord>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClosureStats {
    pub closures: usize,
    pub mean_size: f64,
    pub max_size: usize,
    pub mean_depth: f64,
    pub max_depth: usize,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InstanceSummary {
    pub index: usize,
    pub seed: u64,
    pub size: usize,
    pub status: InstanceStatus,
    pub checks: usize,
    pub level_sizes: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SuiteReport {
    pub suite: Suite,
    pub config: SuiteConfig,
    pub instances: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    pub checks: usize,
    pub passed_checks: usize,
    pub failed_checks: usize,
    pub skipped_checks: usize,
    pub monotone_violations: usize,
    pub convention_hits: usize,
    pub branch_disagreements: usize,
    pub planted: usize,
    pub planted_rejected: usize,
    pub closure: ClosureStats,
    pub outcomes: Vec<InstanceSummary>,
    pub failures: Vec<FailureWitness>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

/// At most this many failure witnesses are kept in a report.
pub const MAX_WITNESSES: usize = 20;

/// Runs every instance of `suite` in order.
pub fn run_suite(suite: Suite, config: &SuiteConfig) -> Result<SuiteReport, Error> {
    config.validate()?;
    let outcomes = (0..config.instances).map(|i| run_indexed(suite, config, i)).collect();
    Ok(assemble_report(suite, config, outcomes))
}

/// Generates and runs instance `index`; the instance is attached on failure.
pub fn run_indexed(suite: Suite, config: &SuiteConfig, index: usize) -> (InstanceOutcome, Option<Instance>) {
    let instance = generate_instance(suite, config, index);
    let outcome = run_instance(&instance, config);
    let dump = (outcome.status() == InstanceStatus::Fail).then_some(instance);
    (outcome, dump)
}

/// Merges per-instance outcomes (in index order) into a report.
pub fn assemble_report(
    suite: Suite,
    config: &SuiteConfig,
    mut outcomes: Vec<(InstanceOutcome, Option<Instance>)>,
) -> SuiteReport {
    outcomes.sort_by_key(|(o, _)| o.index);
    let mut report = SuiteReport {
        suite,
        config: config.clone(),
        instances: outcomes.len(),
        passed: 0,
        failed: 0,
        skipped: 0,
        checks: 0,
        passed_checks: 0,
        failed_checks: 0,
        skipped_checks: 0,
        monotone_violations: 0,
        convention_hits: 0,
        branch_disagreements: 0,
        planted: 0,
        planted_rejected: 0,
        closure: ClosureStats::default(),
        outcomes: Vec::with_capacity(outcomes.len()),
        failures: Vec::new(),
    };
    let (mut size_sum, mut depth_sum) = (0usize, 0usize);
    for (outcome, dump) in outcomes {
        let status = outcome.status();
        match status {
            InstanceStatus::Pass => report.passed += 1,
            InstanceStatus::Fail => report.failed += 1,
            InstanceStatus::Skipped => report.skipped += 1,
        }
        report.checks += outcome.counts.total;
        report.passed_checks += outcome.counts.passed;
        report.failed_checks += outcome.counts.failed;
        report.skipped_checks += outcome.counts.skipped;
        report.monotone_violations += outcome.counts.monotone_violations;
        report.convention_hits += outcome.convention_hits;
        report.branch_disagreements += outcome.branch_disagreements;
        report.planted += usize::from(outcome.planted);
        report.planted_rejected += usize::from(outcome.planted_rejected);
        for levels in &outcome.closures {
            let size = levels.last().copied().unwrap_or(0);
            report.closure.closures += 1;
            size_sum += size;
            depth_sum += levels.len();
            report.closure.max_size = report.closure.max_size.max(size);
            report.closure.max_depth = report.closure.max_depth.max(levels.len());
        }
        if let (Some(instance), true) = (dump, report.failures.len() < MAX_WITNESSES) {
            report.failures.push(FailureWitness {
                suite,
                config: config.clone(),
                instance,
                check: outcome.first_failure().cloned(),
                error: outcome.error.clone(),
            });
        }
        report.outcomes.push(InstanceSummary {
            index: outcome.index,
            seed: outcome.seed,
            size: outcome.size,
            status,
            checks: outcome.counts.total,
            level_sizes: outcome.closures,
        });
    }
    if report.closure.closures > 0 {
        report.closure.mean_size = size_sum as f64 / report.closure.closures as f64;
        report.closure.mean_depth = depth_sum as f64 / report.closure.closures as f64;
    }
    report
}

/// Reruns the instance stored in a failure witness.
pub fn replay(witness: &FailureWitness) -> InstanceOutcome {
    run_instance(&witness.instance, &witness.config)
}

/// Builds instance `index` of `suite`; deterministic in `(config, index)`.
pub fn generate_instance(suite: Suite, config: &SuiteConfig, index: usize) -> Instance {
    let seed = instance_seed(config.seed ^ suite_salt(suite), index);
    let mut rng = rng(seed);
    let n = config.size(index, 0);
    let space = random_finite_metric(n, rng.gen(), config.method(index));
    let kind = match suite {
        Suite::Limits if index.is_multiple_of(3) => FunctionKind::Step,
        _ => FunctionKind::ALL[index % FunctionKind::ALL.len()],
    };
    let mut instance = Instance {
        suite,
        index,
        seed,
        space,
        function_kind: kind,
        function: None,
        levels: Vec::new(),
        seed_points: random_subset(n, 1, &mut rng),
        chain: Vec::new(),
        product: None,
    };

    if suite.is_product() {
        let n2 = config.size(index, 1);
        let right = random_finite_metric(n2, rng.gen(), config.method(index + 1));
        let (function, lipschitz, planted) = if suite == Suite::PartialSlope {
            let k = [1.0, 2.0, 4.0][index % 3];
            let mut f = lipschitz_product(&instance.space, &right, k, &mut rng);
            let planted = if index.is_multiple_of(3) { plant_violation(&mut f, &right, k, &mut rng) } else { None };
            (f, Some(k), planted)
        } else {
            let values: Vec<ExtReal> = (0..n * n2)
                .map(|_| {
                    if rng.gen_bool(0.1) {
                        ExtReal::PosInf
                    } else {
                        ExtReal::Finite(super::generate::dyadic(&mut rng, -10.0, 10.0))
                    }
                })
                .collect();
            (ProductFunction::new(n, n2, values).expect("sizes match"), None, None)
        };
        let seed_len = rng.gen_range(1..=3);
        instance.product = Some(ProductData {
            right_seed: random_subset(n2, seed_len, &mut rng),
            right,
            function,
            lipschitz,
            planted,
        });
        return instance;
    }

    let mut f = random_function(&instance.space, kind, &mut rng);
    if matches!(suite, Suite::TorusSup | Suite::Slope) && index % 2 == 1 {
        f = with_infinite_subset(&f, &mut rng);
        if let Some(x) = (0..n).find(|&i| f.values()[i] == ExtReal::PosInf) {
            if !instance.seed_points.contains(&PointId(x)) {
                instance.seed_points.push(PointId(x));
                instance.seed_points.sort();
            }
        }
    }
    if suite == Suite::TorusSup {
        let values = function_levels(&f, n);
        let mut levels: Vec<ExtReal> = (0..3).map(|_| values[rng.gen_range(0..values.len())]).collect();
        levels.push(ExtReal::Finite(super::generate::dyadic(&mut rng, -10.0, 10.0)));
        if values.contains(&ExtReal::PosInf) {
            levels.push(ExtReal::PosInf);
        }
        levels.sort();
        levels.dedup();
        instance.levels = levels;
    }
    instance.function = Some(f);

    if suite == Suite::SigmaClosedness {
        let order = random_subset(n, n, &mut rng);
        let links = rng.gen_range(2..=4).min(n);
        let mut shuffled = order;
        for i in (1..shuffled.len()).rev() {
            shuffled.swap(i, rng.gen_range(0..=i));
        }
        instance.chain = (1..=links)
            .map(|k| {
                let mut seed: Vec<PointId> = shuffled[..k].to_vec();
                seed.sort();
                seed
            })
            .collect();
    }
    instance
}

fn suite_salt(suite: Suite) -> u64 {
    suite.id().bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3))
}

/// Runs the checks of `instance.suite`.
pub fn run_instance(instance: &Instance, config: &SuiteConfig) -> InstanceOutcome {
    let mut run = Run {
        config,
        outcome: InstanceOutcome {
            index: instance.index,
            seed: instance.seed,
            size: instance.space.len(),
            closures: Vec::new(),
            counts: CheckCounts::default(),
            failures: Vec::new(),
            digest: FNV_OFFSET,
            convention_hits: 0,
            branch_disagreements: 0,
            planted: false,
            planted_rejected: false,
            error: None,
        },
    };
    if let Err(e) = run.dispatch(instance) {
        run.outcome.error = Some(e.to_string());
    }
    run.outcome
}

struct Run<'c> {
    config: &'c SuiteConfig,
    outcome: InstanceOutcome,
}

/// Which way restriction may move a value.
#[derive(Clone, Copy)]
enum Bound {
    /// Restricted value ≤ full value.
    Below,
    /// Restricted value ≥ full value.
    Above,
    Free,
}

fn is_skip(e: &Error) -> bool {
    matches!(e, Error::IsolatedPoint(_) | Error::EmptyRegion { .. })
}

impl Run<'_> {
    fn push(&mut self, record: CheckRecord) {
        let out = &mut self.outcome;
        out.digest = hash_record(out.digest, &record);
        out.counts.total += 1;
        out.counts.monotone_violations += usize::from(!record.monotone);
        match record.verdict {
            Verdict::Pass => {
                out.counts.passed += 1;
                out.counts.value_passes += usize::from(!record.structural);
            }
            Verdict::Fail => {
                out.counts.failed += 1;
                if out.failures.len() < MAX_FAILURES {
                    out.failures.push(record);
                }
            }
            Verdict::SkippedEmptyRegion => out.counts.skipped += 1,
        }
    }

    fn dispatch(&mut self, inst: &Instance) -> Result<(), Error> {
        if inst.suite.is_product() {
            return self.product(inst);
        }
        let space = &inst.space;
        let n = space.len();
        let f = inst.function.as_ref().ok_or(Error::ImproperFunction("instance has no function"))?;
        let t = self.config.truncation;
        match inst.suite {
            Suite::SupReduction | Suite::InfReduction => {
                let mode = if inst.suite == Suite::SupReduction { Mode::Sup } else { Mode::Inf };
                let pairs = BallPairQuotient::new(space, n, f, mode).with_truncation(t);
                let ball = PuncturedBall::new(space, n, f, mode).with_truncation(t);
                let torus = TorusSlope::at_point_level(space, n, f, mode).with_truncation(t);
                for problem in [&pairs as &dyn WitnessProblem, &ball, &torus] {
                    let y = self.close(&[problem], &inst.seed_points)?;
                    self.reductions(problem, &y)?;
                }
            }
            Suite::Intersection => {
                let pairs = BallPairQuotient::new(space, n, f, Mode::Sup).with_truncation(t);
                let torus = TorusSlope::at_point_level(space, n, f, Mode::Sup).with_truncation(t);
                let first = FamilyHandle::new(alloc::vec![&pairs as &dyn WitnessProblem], self.config.closure)?;
                let second = FamilyHandle::new(alloc::vec![&torus as &dyn WitnessProblem], self.config.closure)?;
                let both = first.intersect(&second)?;
                let z = both.cofinal_extend(&inst.seed_points)?;
                self.outcome.closures.push(alloc::vec![z.len()]);
                let contains_seed = inst.seed_points.iter().all(|u| z.contains(u));
                self.push(CheckRecord::structural("contains-seed", contains_seed));
                self.push(CheckRecord::structural("membership:ball-pairs", first.is_member(&z)?));
                self.push(CheckRecord::structural("membership:torus-slope", second.is_member(&z)?));
                self.push(CheckRecord::structural("membership:intersection", both.is_member(&z)?));
                self.idempotent(&[&pairs, &torus], &z)?;
                self.reductions(&pairs, &z)?;
                self.reductions(&torus, &z)?;
            }
            Suite::SigmaClosedness => {
                let pairs = BallPairQuotient::new(space, n, f, Mode::Sup).with_truncation(t);
                let ball = PuncturedBall::new(space, n, f, Mode::Sup).with_truncation(t);
                let family = FamilyHandle::new(alloc::vec![&pairs as &dyn WitnessProblem, &ball], self.config.closure)?;
                let mut members = Vec::new();
                for seed in &inst.chain {
                    let z = family.cofinal_extend(seed)?;
                    self.outcome.closures.push(alloc::vec![z.len()]);
                    self.push(CheckRecord::structural("membership:link", family.is_member(&z)?));
                    members.push(z);
                }
                let increasing = members.windows(2).all(|w| w[0].is_subset(&w[1]));
                self.push(CheckRecord::structural("chain", increasing));
                let union = family.sigma_union(&members)?;
                let member = family.is_member(&union)?;
                self.push(CheckRecord::structural("membership:union", member));
                self.reductions(&pairs, &union)?;
                self.reductions(&ball, &union)?;
            }
            Suite::Limits => {
                let low = PuncturedBall::new(space, n, f, Mode::Inf).with_truncation(t);
                let high = PuncturedBall::new(space, n, f, Mode::Sup).with_truncation(t);
                let y = self.close(&[&low, &high], &inst.seed_points)?;
                self.reductions(&low, &y)?;
                self.reductions(&high, &y)?;
                let full = Domain::full(space, n);
                let restricted = Domain::restricted(space, n, &y);
                for &x in &y {
                    let grid = self.grid(space, n, x);
                    let a = liminf_at(f, full, x, &grid.radii);
                    let b = liminf_at(f, restricted, x, &grid.radii);
                    self.compare("liminf", x, None, a, b, Bound::Above)?;
                    let a = limsup_at(f, full, x, &grid.radii);
                    let b = limsup_at(f, restricted, x, &grid.radii);
                    self.compare("limsup", x, None, a, b, Bound::Below)?;
                    let tol = self.config.tolerance;
                    let a = continuity_check(f, full, x, &grid.radii, tol);
                    let b = continuity_check(f, restricted, x, &grid.radii, tol);
                    self.compare_flags("continuity", x, a, b)?;
                }
            }
            Suite::LocalLipschitz | Suite::LipschitzModulus => {
                let pairs = BallPairQuotient::new(space, n, f, Mode::Sup).with_truncation(t);
                let y = self.close(&[&pairs], &inst.seed_points)?;
                self.reductions(&pairs, &y)?;
                let full = Domain::full(space, n);
                let restricted = Domain::restricted(space, n, &y);
                for &x in &y {
                    let grid = self.grid(space, n, x);
                    let mut any_pairs = false;
                    for &r in &grid.radii {
                        let a = lip_local_sup(f, full, x, r)?;
                        any_pairs |= !a.no_pairs();
                        if inst.suite == Suite::LocalLipschitz {
                            let b = lip_local_sup(f, restricted, x, r)?;
                            let param = Some(Param::radius(r));
                            if a.no_pairs() && b.no_pairs() {
                                self.push(skipped("lip-local", x, param));
                            } else {
                                self.compare("lip-local", x, param, Ok(a.value), Ok(b.value), Bound::Below)?;
                            }
                        }
                    }
                    if inst.suite == Suite::LipschitzModulus {
                        let b = lip_modulus(f, restricted, x, &grid.radii)?;
                        if any_pairs {
                            let a = lip_modulus(f, full, x, &grid.radii)?;
                            self.compare("lip-modulus", x, None, Ok(a), Ok(b), Bound::Free)?;
                        } else {
                            self.push(skipped("lip-modulus", x, None));
                        }
                    }
                }
            }
            Suite::TorusSup => {
                let torus = TorusSlope::new(space, n, f, inst.levels.clone(), Mode::Sup).with_truncation(t);
                let y = self.close(&[&torus], &inst.seed_points)?;
                self.reductions(&torus, &y)?;
                let full = Domain::full(space, n);
                let restricted = Domain::restricted(space, n, &y);
                for &x in &y {
                    let grid = self.grid(space, n, x);
                    for &level in &inst.levels {
                        for &(r, s) in &grid.shells {
                            let a = torus_sup(f, full, x, level, r, s);
                            let b = torus_sup(f, restricted, x, level, r, s);
                            if level == ExtReal::PosInf && a.is_ok() {
                                self.outcome.convention_hits += 1;
                            }
                            self.compare("torus-sup", x, Some(Param::shell(level, r, s)), a, b, Bound::Below)?;
                        }
                    }
                }
            }
            Suite::Slope => {
                let torus = TorusSlope::at_point_level(space, n, f, Mode::Sup).with_truncation(t);
                let y = self.close(&[&torus], &inst.seed_points)?;
                self.reductions(&torus, &y)?;
                let full = Domain::full(space, n);
                let restricted = Domain::restricted(space, n, &y);
                for &x in &y {
                    let grid = self.grid(space, n, x);
                    let a = slope_at(f, full, x, &grid.shells);
                    let b = slope_at(f, restricted, x, &grid.shells);
                    self.classify_branch(f.eval(x), &a, &b);
                    self.compare("slope", x, None, a, b, Bound::Free)?;
                }
            }
            Suite::ProductReduction | Suite::PartialSlope => unreachable!("handled above"),
        }
        Ok(())
    }

    fn product(&mut self, inst: &Instance) -> Result<(), Error> {
        let data = inst.product.as_ref().ok_or(Error::SpaceMismatch)?;
        let (left, right, f) = (&inst.space, &data.right, &data.function);
        let mut problem = ProductTorusSlope::new(left, right, f).with_truncation(self.config.truncation);
        if let Some(k) = data.lipschitz {
            problem = problem.with_lipschitz(k);
            let verdict = verify_lipschitz_second(f, right, k, None);
            if data.planted.is_some() {
                self.outcome.planted = true;
                let rejected = matches!(
                    product_closure(&problem, &inst.seed_points, &data.right_seed, &self.config.closure),
                    Err(Error::LipschitzViolation { .. })
                );
                self.outcome.planted_rejected = rejected && !verdict.holds;
                let mut record = CheckRecord::structural("planted-rejected", self.outcome.planted_rejected);
                record.structural = false;
                self.push(record);
                return Ok(());
            }
            self.push(CheckRecord::structural("lipschitz-second", verdict.holds));
        }
        let closure = product_closure(&problem, &inst.seed_points, &data.right_seed, &self.config.closure)?;
        self.outcome.closures.push(closure.left.level_sizes());
        self.push(CheckRecord::structural("fixed-point", closure.left.fixed_point));
        let again = product_closure(&problem, closure.left.points(), &data.right_seed, &self.config.closure)?;
        self.push(CheckRecord::structural("idempotent", again.left.to_set() == closure.left.to_set()));
        for check in check_product_reduction(&problem, &closure, self.config.tolerance)? {
            let mut record = from_check("reduction:product-torus", &check.check);
            record.y = Some(check.y);
            if self.config.grid == GridRule::Realized || record.verdict == Verdict::SkippedEmptyRegion {
                self.push(record);
            }
        }
        let y1 = closure.left.to_set();
        let y2: PointSet = closure.right.iter().copied().collect();
        let full = ProductDomain { left, right, left_subset: None, right_subset: None };
        let restricted = ProductDomain { left, right, left_subset: Some(&y1), right_subset: Some(&y2) };
        for &y in &y2 {
            for &x in &y1 {
                let grid = self.grid(left, left.len(), x);
                let a = partial_slope(f, full, x, y, &grid.shells, None);
                let b = partial_slope(f, restricted, x, y, &grid.shells, None);
                self.classify_branch(f.get(x, y), &a, &b);
                let mut record = self.comparison("partial-slope", x, None, a, b, Bound::Free)?;
                record.y = Some(y);
                self.push(record);
            }
        }
        Ok(())
    }

    fn grid(&self, space: &dyn MetricSpace, horizon: usize, x: PointId) -> ScaleGrid {
        match self.config.grid {
            GridRule::Realized => ScaleGrid::realized(space, horizon, x),
            GridRule::BelowSpectrum => ScaleGrid::below_spectrum(space, horizon, x),
        }
    }

    /// Closes `seed`, recording the fixed point and idempotence checks.
    fn close(&mut self, problems: &[&dyn WitnessProblem], seed: &[PointId]) -> Result<PointSet, Error> {
        let closed = intersect_problems(problems, seed, &self.config.closure)?;
        self.outcome.closures.push(closed.level_sizes());
        self.push(CheckRecord::structural("fixed-point", closed.fixed_point));
        let y = closed.to_set();
        self.idempotent(problems, &y)?;
        Ok(y)
    }

    fn idempotent(&mut self, problems: &[&dyn WitnessProblem], y: &PointSet) -> Result<(), Error> {
        let seed: Vec<PointId> = y.iter().copied().collect();
        let again = intersect_problems(problems, &seed, &self.config.closure)?;
        self.push(CheckRecord::structural("idempotent", again.fixed_point && again.to_set() == *y));
        Ok(())
    }

    /// Reduction checks for every `x ∈ y`, plus oracle cross-checks on small
    /// spaces.
    fn reductions(&mut self, problem: &dyn WitnessProblem, y: &PointSet) -> Result<(), Error> {
        let realized = self.config.grid == GridRule::Realized;
        let with_oracle = problem.horizon() <= self.config.oracle_limit;
        for &x in y {
            let mut params = if realized { problem.params(x) } else { Vec::new() };
            params.extend(problem.probes(x));
            let checks = check_point(problem, y, x, &params, self.config.tolerance)?;
            for (p, check) in params.into_iter().zip(checks) {
                let record = from_check(&alloc::format!("reduction:{}", problem.label()), &check);
                if with_oracle {
                    let full = brute_force_optimum(problem, x, &p, None);
                    let restricted = brute_force_optimum(problem, x, &p, Some(y));
                    let kind = alloc::format!("oracle:{}", problem.label());
                    let agree = match (&full, &restricted, check.verdict) {
                        (Err(_), Err(_), Verdict::SkippedEmptyRegion) => None,
                        (Ok(a), Ok(b), v) if v != Verdict::SkippedEmptyRegion => {
                            Some(*a == check.lhs && *b == check.rhs)
                        }
                        _ => Some(false),
                    };
                    let mut oracle = match agree {
                        None => skipped(&kind, x, Some(p.clone())),
                        Some(ok) => CheckRecord::structural(&kind, ok).at(x),
                    };
                    oracle.param = Some(p.clone());
                    oracle.lhs = full.ok();
                    oracle.rhs = Some(check.lhs);
                    self.push(oracle);
                }
                self.push(record);
            }
        }
        Ok(())
    }

    fn compare(
        &mut self,
        kind: &str,
        x: PointId,
        param: Option<Param>,
        full: Result<ExtReal, Error>,
        restricted: Result<ExtReal, Error>,
        bound: Bound,
    ) -> Result<(), Error> {
        let record = self.comparison(kind, x, param, full, restricted, bound)?;
        self.push(record);
        Ok(())
    }

    fn comparison(
        &self,
        kind: &str,
        x: PointId,
        param: Option<Param>,
        full: Result<ExtReal, Error>,
        restricted: Result<ExtReal, Error>,
        bound: Bound,
    ) -> Result<CheckRecord, Error> {
        let mut record = CheckRecord {
            kind: kind.into(),
            x: Some(x),
            y: None,
            param,
            lhs: None,
            rhs: None,
            monotone: true,
            structural: false,
            verdict: Verdict::Fail,
        };
        match (full, restricted) {
            (Ok(a), Ok(b)) => {
                record.lhs = Some(a);
                record.rhs = Some(b);
                record.monotone = match bound {
                    Bound::Below => b <= a,
                    Bound::Above => b >= a,
                    Bound::Free => true,
                };
                if record.monotone && (a - b).abs() <= ExtReal::Finite(self.config.tolerance) {
                    record.verdict = Verdict::Pass;
                }
            }
            (Err(a), Err(b)) if is_skip(&a) && is_skip(&b) => record.verdict = Verdict::SkippedEmptyRegion,
            (Err(e), _) | (_, Err(e)) if !is_skip(&e) => return Err(e),
            (a, b) => {
                record.lhs = a.ok();
                record.rhs = b.ok();
            }
        }
        Ok(record)
    }

    fn compare_flags(
        &mut self,
        kind: &str,
        x: PointId,
        full: Result<bool, Error>,
        restricted: Result<bool, Error>,
    ) -> Result<(), Error> {
        let as_real = |r: Result<bool, Error>| r.map(|b| ExtReal::Finite(if b { 1.0 } else { 0.0 }));
        self.compare(kind, x, None, as_real(full), as_real(restricted), Bound::Free)
    }

    /// Logs slopes taken at points where `f = +∞`, and any disagreement
    /// between the full and restricted `{0, +∞}` classification there.
    fn classify_branch(&mut self, fx: ExtReal, full: &Result<ExtReal, Error>, restricted: &Result<ExtReal, Error>) {
        if fx != ExtReal::PosInf {
            return;
        }
        self.outcome.convention_hits += 1;
        let class = |r: &Result<ExtReal, Error>| match r {
            Ok(v) if *v == ExtReal::ZERO => 0,
            Ok(ExtReal::PosInf) => 1,
            Ok(_) => 2,
            Err(_) => 3,
        };
        if class(full) != class(restricted) {
            self.outcome.branch_disagreements += 1;
        }
    }
}

fn skipped(kind: &str, x: PointId, param: Option<Param>) -> CheckRecord {
    CheckRecord {
        kind: kind.into(),
        x: Some(x),
        y: None,
        param,
        lhs: None,
        rhs: None,
        monotone: true,
        structural: false,
        verdict: Verdict::SkippedEmptyRegion,
    }
}

fn from_check(kind: &str, check: &crate::scheme::DeterminacyCheck) -> CheckRecord {
    CheckRecord {
        kind: kind.into(),
        x: Some(check.x),
        y: None,
        param: Some(check.param.clone()),
        lhs: Some(check.lhs),
        rhs: Some(check.rhs),
        monotone: check.monotone,
        structural: false,
        verdict: check.verdict,
    }
}
