//! Runs suite instances on several threads and merges them by index.

use std::num::NonZeroUsize;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::thread;

use sepdet_core::harness::{assemble_report, run_indexed, Suite, SuiteConfig, SuiteReport};
use sepdet_core::Error;

pub fn available_workers() -> usize {
    thread::available_parallelism().map_or(1, NonZeroUsize::get)
}

/// Same report as [`sepdet_core::harness::run_suite`], computed by `workers`
/// threads pulling instance indices from a shared counter.
pub fn run_suite_parallel(suite: Suite, config: &SuiteConfig, workers: usize) -> Result<SuiteReport, Error> {
    config.validate()?;
    let next = AtomicUsize::new(0);
    let workers = workers.clamp(1, config.instances.max(1));
    let outcomes = thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|_| {
                scope.spawn(|| {
                    let mut done = Vec::new();
                    loop {
                        let i = next.fetch_add(1, Ordering::Relaxed);
                        if i >= config.instances {
                            return done;
                        }
                        done.push(run_indexed(suite, config, i));
                    }
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("suite worker panicked")).collect()
    });
    Ok(assemble_report(suite, config, outcomes))
}
