//! Benchmark sweeps over matrices, formats, variants and thread counts.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::{BenchConfig, CacheSpec};
use super::timer::{time_kernel_epochs, time_kernel_epochs_with_reset, MonotonicClock};
use crate::error::Error;
use crate::format::{build_operator, FormatSpec, WideCsr};
use crate::io::results::ResultRecord;
use crate::model::spmv_traffic;
use crate::spmv::{spmv, work_flops, SerialVariant, SparseMatVec, SpmvProblem, SpmvVariant};
use crate::width::{Scalar, ScalarWidth};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CacheBucket {
    L1d,
    L2,
    L3,
    Large,
}

impl fmt::Display for CacheBucket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CacheBucket::L1d => "L1d",
            CacheBucket::L2 => "L2",
            CacheBucket::L3 => "L3",
            CacheBucket::Large => "Large",
        })
    }
}

/// Smallest cache level whose capacity holds `traffic` bytes. The L3 bucket
/// counts L2 and L3 together.
pub fn cache_bucket(traffic: u64, spec: &CacheSpec) -> CacheBucket {
    if traffic <= spec.l1d {
        CacheBucket::L1d
    } else if traffic <= spec.l2_total {
        CacheBucket::L2
    } else if traffic <= spec.l2_total.saturating_add(spec.l3) {
        CacheBucket::L3
    } else {
        CacheBucket::Large
    }
}

/// A benchmark input, kept in the widest layout until each format is built.
#[derive(Clone, Debug, PartialEq)]
pub struct NamedMatrix {
    pub name: String,
    pub matrix: WideCsr,
}

impl NamedMatrix {
    pub fn new(name: impl Into<String>, matrix: WideCsr) -> Self {
        NamedMatrix {
            name: name.into(),
            matrix,
        }
    }
}

/// Identifies one timed combination.
#[derive(Clone, Copy, Debug)]
pub struct JobKey<'a> {
    pub matrix: &'a str,
    pub format: &'a FormatSpec,
    pub variant: SpmvVariant,
    /// `y` must be restored before each run (`beta != 0`).
    pub needs_reset: bool,
}

/// Measures one kernel. The suite owns the data; the timer decides how (and
/// whether) to run `kernel`.
pub trait KernelTimer {
    /// Minimum per-iteration seconds.
    fn measure(
        &mut self,
        key: &JobKey<'_>,
        reset: &mut dyn FnMut(),
        kernel: &mut dyn FnMut(),
    ) -> f64;
}

/// Min-of-epochs wall-clock timing.
pub struct WallClockTimer {
    pub config: BenchConfig,
    clock: MonotonicClock,
}

impl WallClockTimer {
    pub fn new(config: BenchConfig) -> Self {
        WallClockTimer {
            config,
            clock: MonotonicClock::new(),
        }
    }
}

impl KernelTimer for WallClockTimer {
    fn measure(
        &mut self,
        key: &JobKey<'_>,
        reset: &mut dyn FnMut(),
        kernel: &mut dyn FnMut(),
    ) -> f64 {
        let timing = if key.needs_reset {
            time_kernel_epochs_with_reset(&mut self.clock, &self.config, reset, kernel)
        } else {
            time_kernel_epochs(&mut self.clock, &self.config, kernel)
        };
        timing.min_seconds()
    }
}

/// A combination that produced no record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteFailure {
    pub matrix_name: String,
    pub format: String,
    pub variant: Option<String>,
    pub kind: FailureKind,
    pub reason: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FailureKind {
    ConversionFailed,
    VerificationFailed,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SuiteReport {
    pub records: Vec<ResultRecord>,
    pub failures: Vec<SuiteFailure>,
}

/// Deterministic inputs in `[-1, 1)`.
pub fn bench_vector<S: Scalar>(len: usize, seed: u64) -> Vec<S> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len)
        .map(|_| S::from_f64(rng.gen_range(-1.0..1.0)))
        .collect()
}

/// Row-wise comparison against a straightforward CSR product in `S`. Each
/// row may differ by `2 (len + 2) eps` times its absolute-value sum.
fn verify<S: Scalar>(
    base: &WideCsr,
    alpha: S,
    beta: S,
    x: &[S],
    y0: &[S],
    y: &[S],
) -> Result<(), String> {
    let eps = S::EPSILON.to_f64();
    for r in 0..base.nrows() {
        let (cols, vals) = base.row(r);
        let mut sum = S::ZERO;
        let mut scale = 0.0f64;
        for (&c, &v) in cols.iter().zip(vals) {
            let a = S::from_f64(v);
            let xc = x[c as usize];
            sum = sum + a * xc;
            scale += (a * xc).abs().to_f64();
        }
        let mut expected = alpha * sum;
        if beta != S::ZERO {
            expected = expected + beta * y0[r];
        }
        scale = alpha.abs().to_f64() * scale + (beta * y0[r]).abs().to_f64();
        let tol = 2.0 * (cols.len() as f64 + 2.0) * eps * scale;
        let got = y[r].to_f64();
        if got.is_nan() || (got - expected.to_f64()).abs() > tol {
            return Err(format!("row {r}: expected {expected}, got {}", y[r]));
        }
    }
    Ok(())
}

fn variants_for(variants: &[SerialVariant], threads: &[usize]) -> Vec<SpmvVariant> {
    let mut out = Vec::new();
    for &t in threads {
        for &v in variants {
            out.push(if t == 1 {
                SpmvVariant::Serial(v)
            } else {
                SpmvVariant::ParallelRowBlock {
                    threads: t,
                    inner: v,
                }
            });
        }
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn run_format<S: Scalar>(
    m: &NamedMatrix,
    spec: &FormatSpec,
    variants: &[SpmvVariant],
    cfg: &BenchConfig,
    cache: &CacheSpec,
    timer: &mut dyn KernelTimer,
    report: &mut SuiteReport,
) {
    let failure = |variant: Option<String>, kind, reason: String| SuiteFailure {
        matrix_name: m.name.clone(),
        format: spec.to_string(),
        variant,
        kind,
        reason,
    };
    let op = match build_operator::<S>(&m.matrix, spec) {
        Ok(op) => op,
        Err(e) => {
            report
                .failures
                .push(failure(None, FailureKind::ConversionFailed, e.to_string()));
            return;
        }
    };
    let (nrows, ncols, nnz) = (op.nrows(), op.ncols(), op.nnz());
    let alpha = S::from_f64(cfg.alpha);
    let beta = S::from_f64(cfg.beta);
    let x: Vec<S> = bench_vector(ncols, 0x5eed);
    let y0: Vec<S> = bench_vector(nrows, 0x5eed + 1);
    let traffic = spmv_traffic(nrows as u64, ncols as u64, nnz as u64, &spec.widths()).total_bytes;
    let work = work_flops(nrows, nnz);

    for &variant in variants {
        let mut y = y0.clone();
        let checked = spmv(&*op, SpmvProblem::new(alpha, beta, &x, &mut y), variant)
            .map_err(|e| e.to_string())
            .and_then(|_| verify(&m.matrix, alpha, beta, &x, &y0, &y));
        if let Err(reason) = checked {
            report.failures.push(failure(
                Some(variant.to_string()),
                FailureKind::VerificationFailed,
                reason,
            ));
            continue;
        }

        let key = JobKey {
            matrix: &m.name,
            format: spec,
            variant,
            needs_reset: beta != S::ZERO,
        };
        let op_ref: &dyn SparseMatVec<S> = &*op;
        let y_cell = std::cell::RefCell::new(y0.clone());
        let seconds = timer.measure(
            &key,
            &mut || y_cell.borrow_mut().copy_from_slice(&y0),
            &mut || {
                let mut y = y_cell.borrow_mut();
                // Dimensions were checked above.
                let _ = spmv(op_ref, SpmvProblem::new(alpha, beta, &x, &mut y), variant);
            },
        );
        report.records.push(ResultRecord {
            matrix_name: m.name.clone(),
            format: spec.kind.to_string(),
            widths: spec.widths().to_string(),
            variant: variant.inner().to_string(),
            threads: variant.threads(),
            traffic_bytes: traffic,
            work_flops: work,
            time_seconds: seconds,
            performance_flops_per_s: work as f64 / seconds,
            throughput_bytes_per_s: traffic as f64 / seconds,
            cache_bucket: cache_bucket(traffic, cache).to_string(),
            best: false,
        });
    }
}

/// Sets `best` on the highest-performance record of each
/// (matrix, format, widths) group. Ties keep the first record.
pub fn mark_best(records: &mut [ResultRecord]) {
    for r in records.iter_mut() {
        r.best = false;
    }
    let mut groups: Vec<((String, String, String), usize)> = Vec::new();
    for (i, r) in records.iter().enumerate() {
        let key = (r.matrix_name.clone(), r.format.clone(), r.widths.clone());
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, best)) => {
                if r.performance_flops_per_s > records[*best].performance_flops_per_s {
                    *best = i;
                }
            }
            None => groups.push((key, i)),
        }
    }
    for (_, i) in groups {
        records[i].best = true;
    }
}

/// Verifies and times every (matrix, format, variant, thread count)
/// combination. Conversion or verification failures are recorded and the
/// sweep continues.
pub fn run_suite(
    matrices: &[NamedMatrix],
    formats: &[FormatSpec],
    variants: &[SerialVariant],
    cfg: &BenchConfig,
    cache: &CacheSpec,
    timer: &mut dyn KernelTimer,
) -> SuiteReport {
    let mut report = SuiteReport::default();
    let variants = variants_for(variants, &cfg.thread_counts);
    for m in matrices {
        for spec in formats {
            match spec.scalar {
                ScalarWidth::F64 => {
                    run_format::<f64>(m, spec, &variants, cfg, cache, timer, &mut report)
                }
                ScalarWidth::F32 => {
                    run_format::<f32>(m, spec, &variants, cfg, cache, timer, &mut report)
                }
                other => report.failures.push(SuiteFailure {
                    matrix_name: m.name.clone(),
                    format: spec.to_string(),
                    variant: None,
                    kind: FailureKind::ConversionFailed,
                    reason: Error::UnsupportedScalarWidth(other).to_string(),
                }),
            }
        }
    }
    mark_best(&mut report.records);
    report
}
