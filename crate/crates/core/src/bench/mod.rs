//! Benchmark harness: timing, cache bucketing and best-of selection.

pub mod config;
pub mod suite;
pub mod timer;

pub use config::{parse_config, parse_size, BenchConfig, CacheSpec, FileSettings};
pub use suite::{
    cache_bucket, mark_best, run_suite, CacheBucket, FailureKind, JobKey, KernelTimer, NamedMatrix,
    SuiteFailure, SuiteReport, WallClockTimer,
};
pub use timer::{
    time_kernel, time_kernel_epochs, time_kernel_epochs_with_reset, Clock, MonotonicClock, Timing,
};
