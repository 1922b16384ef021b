//! Min-of-epochs kernel timing.

use std::time::{Duration, Instant};

use super::config::BenchConfig;

/// Source of monotonic timestamps. Injected so tests can script timings.
pub trait Clock {
    fn now(&mut self) -> Duration;
}

/// Wall-clock time since construction.
#[derive(Clone, Copy, Debug)]
pub struct MonotonicClock {
    origin: Instant,
}

impl MonotonicClock {
    pub fn new() -> Self {
        MonotonicClock {
            origin: Instant::now(),
        }
    }
}

impl Default for MonotonicClock {
    fn default() -> Self {
        Self::new()
    }
}

impl Clock for MonotonicClock {
    fn now(&mut self) -> Duration {
        self.origin.elapsed()
    }
}

/// Per-epoch mean iteration times plus their minimum.
#[derive(Clone, Debug, PartialEq)]
pub struct Timing {
    pub epoch_seconds: Vec<f64>,
    pub iterations: Vec<usize>,
}

impl Timing {
    pub fn min_seconds(&self) -> f64 {
        self.epoch_seconds
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn mean_seconds(&self) -> f64 {
        self.epoch_seconds.iter().sum::<f64>() / self.epoch_seconds.len() as f64
    }
}

/// Runs `kernel` `warmup_iters` times untimed, then `epochs` epochs. An epoch
/// repeats the kernel back to back until it has run at least
/// `min_epoch_iters` times and `min_epoch_time` has elapsed, and records
/// elapsed time over iterations.
pub fn time_kernel_epochs(
    clock: &mut impl Clock,
    cfg: &BenchConfig,
    mut kernel: impl FnMut(),
) -> Timing {
    for _ in 0..cfg.warmup_iters {
        kernel();
    }
    let epochs = cfg.epochs.max(1);
    let mut timing = Timing {
        epoch_seconds: Vec::with_capacity(epochs),
        iterations: Vec::with_capacity(epochs),
    };
    for _ in 0..epochs {
        let start = clock.now();
        let mut iters = 0usize;
        let elapsed = loop {
            kernel();
            iters += 1;
            let elapsed = clock.now().saturating_sub(start);
            if iters >= cfg.min_epoch_iters && elapsed >= cfg.min_epoch_time {
                break elapsed;
            }
        };
        timing
            .epoch_seconds
            .push(elapsed.as_secs_f64() / iters as f64);
        timing.iterations.push(iters);
    }
    timing
}

/// Like [`time_kernel_epochs`], but calls `reset` before every iteration
/// and excludes it from the measured time.
pub fn time_kernel_epochs_with_reset(
    clock: &mut impl Clock,
    cfg: &BenchConfig,
    mut reset: impl FnMut(),
    mut kernel: impl FnMut(),
) -> Timing {
    for _ in 0..cfg.warmup_iters {
        reset();
        kernel();
    }
    let epochs = cfg.epochs.max(1);
    let mut timing = Timing {
        epoch_seconds: Vec::with_capacity(epochs),
        iterations: Vec::with_capacity(epochs),
    };
    for _ in 0..epochs {
        let mut iters = 0usize;
        let mut elapsed = Duration::ZERO;
        loop {
            reset();
            let t0 = clock.now();
            kernel();
            elapsed += clock.now().saturating_sub(t0);
            iters += 1;
            if iters >= cfg.min_epoch_iters && elapsed >= cfg.min_epoch_time {
                break;
            }
        }
        timing
            .epoch_seconds
            .push(elapsed.as_secs_f64() / iters as f64);
        timing.iterations.push(iters);
    }
    timing
}

/// Minimum per-iteration time over epochs, in seconds.
pub fn time_kernel(clock: &mut impl Clock, cfg: &BenchConfig, kernel: impl FnMut()) -> f64 {
    time_kernel_epochs(clock, cfg, kernel).min_seconds()
}

#[cfg(test)]
mod tests {
    use std::hint::black_box;

    use super::*;

    /// Advances by a scripted step on every read, cycling.
    struct ScriptedClock {
        now: Duration,
        steps: Vec<Duration>,
        next: usize,
    }

    impl ScriptedClock {
        fn new(steps_us: &[u64]) -> Self {
            ScriptedClock {
                now: Duration::ZERO,
                steps: steps_us.iter().map(|&u| Duration::from_micros(u)).collect(),
                next: 0,
            }
        }
    }

    impl Clock for ScriptedClock {
        fn now(&mut self) -> Duration {
            self.now += self.steps[self.next % self.steps.len()];
            self.next += 1;
            self.now
        }
    }

    fn cfg(epochs: usize, iters: usize, min_us: u64) -> BenchConfig {
        BenchConfig {
            epochs,
            warmup_iters: 4,
            min_epoch_iters: iters,
            min_epoch_time: Duration::from_micros(min_us),
            ..BenchConfig::default()
        }
    }

    #[test]
    fn warmup_and_iteration_counts() {
        let mut clock = ScriptedClock::new(&[1]);
        let mut calls = 0;
        let t = time_kernel_epochs(&mut clock, &cfg(3, 5, 0), || calls += 1);
        assert_eq!(calls, 4 + 3 * 5);
        assert_eq!(t.iterations, vec![5, 5, 5]);
    }

    #[test]
    fn epoch_runs_until_time_is_met() {
        // One start read then one read per iteration, each 10 us apart.
        let mut clock = ScriptedClock::new(&[10]);
        let t = time_kernel_epochs(&mut clock, &cfg(1, 2, 55), || {});
        assert_eq!(t.iterations, vec![6]);
        assert!((t.epoch_seconds[0] - 10e-6).abs() < 1e-12);
    }

    #[test]
    fn returns_epoch_minimum() {
        // Clock reads per epoch: start + one per iteration (1 iteration).
        // Epoch durations: 30, 10, 20 us.
        let mut clock = ScriptedClock::new(&[0, 30, 0, 10, 0, 20]);
        let t = time_kernel_epochs(&mut clock, &cfg(3, 1, 0), || {});
        assert_eq!(t.epoch_seconds.len(), 3);
        assert!((t.min_seconds() - 10e-6).abs() < 1e-12);
        assert!(t.min_seconds() <= t.mean_seconds());
    }

    #[test]
    fn reset_is_excluded() {
        let mut clock = ScriptedClock::new(&[7]);
        let mut resets = 0;
        let mut runs = 0;
        let t =
            time_kernel_epochs_with_reset(&mut clock, &cfg(2, 3, 0), || resets += 1, || runs += 1);
        assert_eq!((resets, runs), (4 + 6, 4 + 6));
        // Only the read pair around each kernel call counts: 7 us each.
        assert!((t.min_seconds() - 7e-6).abs() < 1e-12);
    }

    fn spin(n: u64) -> u64 {
        let mut acc = 0u64;
        for i in 0..n {
            acc = black_box(acc.wrapping_mul(6364136223846793005).wrapping_add(i));
        }
        acc
    }

    #[test]
    fn wall_clock_min_is_bounded_by_single_shot() {
        let mut clock = MonotonicClock::new();
        let c = BenchConfig {
            epochs: 5,
            warmup_iters: 2,
            min_epoch_iters: 3,
            min_epoch_time: Duration::from_millis(1),
            ..BenchConfig::default()
        };
        let t = time_kernel_epochs(&mut clock, &c, || {
            black_box(spin(20_000));
        });
        assert!(t.min_seconds() >= 0.0);
        assert!(t.min_seconds() <= t.mean_seconds());
        let start = Instant::now();
        black_box(spin(20_000));
        let single = start.elapsed().as_secs_f64();
        // A single shot may itself land on a fast run; allow scheduler noise.
        assert!(
            t.min_seconds() <= single * 1.5 + 1e-6,
            "{} vs {single}",
            t.min_seconds()
        );
        let noop = time_kernel(&mut clock, &c, || {});
        assert!(noop >= 0.0);
    }

    #[test]
    fn doubled_work_roughly_doubles_time() {
        let mut clock = MonotonicClock::new();
        let c = BenchConfig {
            epochs: 7,
            warmup_iters: 3,
            min_epoch_iters: 5,
            min_epoch_time: Duration::from_millis(5),
            ..BenchConfig::default()
        };
        let one = time_kernel(&mut clock, &c, || {
            black_box(spin(200_000));
        });
        let two = time_kernel(&mut clock, &c, || {
            black_box(spin(400_000));
        });
        let ratio = two / one;
        assert!((1.5..=2.5).contains(&ratio), "ratio {ratio}");
    }
}
