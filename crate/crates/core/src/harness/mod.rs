//! Random instances, brute-force oracles and the property suites.

pub mod generate;
pub mod oracle;
pub mod suite;

pub use generate::{random_finite_metric, FunctionKind, MetricMethod};
pub use oracle::brute_force_optimum;
pub use suite::{
    assemble_report, generate_instance, replay, run_indexed, run_instance, run_suite, CheckCounts, CheckRecord,
    FailureWitness, GridRule, Instance, InstanceOutcome, InstanceStatus, Suite, SuiteConfig, SuiteReport,
};
