//! Timing parameters and cache geometry.

use std::fs;
use std::path::Path;
use std::time::Duration;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct BenchConfig {
    /// Timed epochs; the reported time is the minimum over them.
    pub epochs: usize,
    /// Untimed runs before the first epoch.
    pub warmup_iters: usize,
    pub min_epoch_iters: usize,
    pub min_epoch_time: Duration,
    pub thread_counts: Vec<usize>,
    pub alpha: f64,
    pub beta: f64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            epochs: 11,
            warmup_iters: 10,
            min_epoch_iters: 10,
            min_epoch_time: Duration::from_millis(100),
            thread_counts: vec![1, 2, 4, 6, 8],
            alpha: 1.0,
            beta: 0.0,
        }
    }
}

impl BenchConfig {
    /// Short epochs for smoke runs.
    pub fn quick() -> Self {
        BenchConfig {
            epochs: 3,
            warmup_iters: 2,
            min_epoch_iters: 3,
            min_epoch_time: Duration::from_millis(10),
            thread_counts: vec![1],
            ..BenchConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 || self.min_epoch_iters == 0 {
            return Err(Error::Config(
                "epochs and iterations per epoch must be positive".into(),
            ));
        }
        if self.thread_counts.is_empty() || self.thread_counts.contains(&0) {
            return Err(Error::Config(
                "thread counts must be non-empty and positive".into(),
            ));
        }
        if !self.alpha.is_finite() || !self.beta.is_finite() {
            return Err(Error::Config("alpha and beta must be finite".into()));
        }
        Ok(())
    }
}

/// Cache capacities in bytes used to bucket matrices by footprint.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CacheSpec {
    pub l1d: u64,
    /// Combined L2 over all cores.
    pub l2_total: u64,
    pub l3: u64,
}

impl Default for CacheSpec {
    fn default() -> Self {
        CacheSpec {
            l1d: 32 << 10,
            l2_total: 8 << 20,
            l3: 11 << 20,
        }
    }
}

fn read_sysfs_size(path: &Path) -> Option<u64> {
    parse_size(fs::read_to_string(path).ok()?.trim()).ok()
}

impl CacheSpec {
    /// Reads cpu0's cache hierarchy from sysfs. Missing levels keep their
    /// default; L2 is multiplied by the online core count.
    pub fn detect() -> Self {
        let mut spec = CacheSpec::default();
        let base = Path::new("/sys/devices/system/cpu/cpu0/cache");
        let Ok(entries) = fs::read_dir(base) else {
            return spec;
        };
        let cores = std::thread::available_parallelism().map_or(1, |n| n.get() as u64);
        for entry in entries.flatten() {
            let dir = entry.path();
            let level = fs::read_to_string(dir.join("level")).unwrap_or_default();
            let kind = fs::read_to_string(dir.join("type")).unwrap_or_default();
            let Some(size) = read_sysfs_size(&dir.join("size")) else {
                continue;
            };
            match (level.trim(), kind.trim()) {
                ("1", "Data") => spec.l1d = size,
                ("2", "Unified") => spec.l2_total = size * cores,
                ("3", "Unified") => spec.l3 = size,
                _ => {}
            }
        }
        spec
    }

    /// Last-level cache size.
    pub fn llc(&self) -> u64 {
        self.l3.max(self.l2_total)
    }
}

/// Parses `123`, `48K`, `2M`, `1G` (powers of 1024, optional `iB`/`B`).
pub fn parse_size(s: &str) -> Result<u64> {
    let t = s.trim();
    let t = t
        .strip_suffix("iB")
        .or_else(|| t.strip_suffix('B'))
        .unwrap_or(t);
    let (digits, shift) = match t.chars().last() {
        Some('K' | 'k') => (&t[..t.len() - 1], 10),
        Some('M' | 'm') => (&t[..t.len() - 1], 20),
        Some('G' | 'g') => (&t[..t.len() - 1], 30),
        _ => (t, 0),
    };
    digits
        .trim()
        .parse::<u64>()
        .ok()
        .and_then(|v| v.checked_mul(1u64 << shift))
        .ok_or_else(|| Error::Config(format!("bad size `{s}`")))
}

/// Settings read from a `key = value` file. Unset keys keep their defaults.
#[derive(Clone, Debug, PartialEq)]
pub struct FileSettings {
    pub bench: BenchConfig,
    pub cache: CacheSpec,
}

/// Keys: `epochs`, `warmup`, `min_epoch_iters`, `min_epoch_ms`, `threads`
/// (comma separated), `alpha`, `beta`, `l1d`, `l2`, `l3`. `#` starts a comment.
pub fn parse_config(text: &str, base: FileSettings) -> Result<FileSettings> {
    let mut out = base;
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected key = value", no + 1)))?;
        let (key, value) = (key.trim(), value.trim());
        let bad = || Error::Config(format!("line {}: bad value `{value}` for `{key}`", no + 1));
        let int = || value.parse::<usize>().map_err(|_| bad());
        let float = || value.parse::<f64>().map_err(|_| bad());
        match key {
            "epochs" => out.bench.epochs = int()?,
            "warmup" => out.bench.warmup_iters = int()?,
            "min_epoch_iters" => out.bench.min_epoch_iters = int()?,
            "min_epoch_ms" => {
                out.bench.min_epoch_time = Duration::from_millis(value.parse().map_err(|_| bad())?)
            }
            "threads" => {
                out.bench.thread_counts = value
                    .split(',')
                    .map(|t| t.trim().parse::<usize>().map_err(|_| bad()))
                    .collect::<Result<_>>()?
            }
            "alpha" => out.bench.alpha = float()?,
            "beta" => out.bench.beta = float()?,
            "l1d" => out.cache.l1d = parse_size(value)?,
            "l2" => out.cache.l2_total = parse_size(value)?,
            "l3" => out.cache.l3 = parse_size(value)?,
            _ => {
                return Err(Error::Config(format!(
                    "line {}: unknown key `{key}`",
                    no + 1
                )))
            }
        }
    }
    out.bench.validate()?;
    Ok(out)
}
