//! Benchmark result tables.

use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One timed (matrix, format, variant) measurement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub matrix_name: String,
    pub format: String,
    /// `oindex/iindex/scalar`, e.g. `i32/i16/f64`.
    pub widths: String,
    pub variant: String,
    pub threads: usize,
    pub traffic_bytes: u64,
    pub work_flops: u64,
    pub time_seconds: f64,
    pub performance_flops_per_s: f64,
    pub throughput_bytes_per_s: f64,
    pub cache_bucket: String,
    /// Fastest variant for this matrix and format.
    pub best: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResultFormat {
    Csv,
    Json,
}

impl FromStr for ResultFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(ResultFormat::Csv),
            "json" => Ok(ResultFormat::Json),
            other => Err(Error::Config(format!("unknown result format `{other}`"))),
        }
    }
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => Error::Io(e),
        other => Error::Config(format!("csv: {other:?}")),
    }
}

/// Writes a header row followed by one row per record, or a JSON array.
pub fn write_results(
    records: &[ResultRecord],
    sink: impl Write,
    format: ResultFormat,
) -> Result<()> {
    match format {
        ResultFormat::Csv => {
            let mut w = csv::WriterBuilder::new()
                .has_headers(false)
                .from_writer(sink);
            w.write_record([
                "matrix_name",
                "format",
                "widths",
                "variant",
                "threads",
                "traffic_bytes",
                "work_flops",
                "time_seconds",
                "performance_flops_per_s",
                "throughput_bytes_per_s",
                "cache_bucket",
                "best",
            ])
            .map_err(csv_error)?;
            for r in records {
                w.serialize(r).map_err(csv_error)?;
            }
            w.flush()?;
        }
        ResultFormat::Json => {
            let mut sink = sink;
            serde_json::to_writer_pretty(&mut sink, records)
                .map_err(|e| Error::Config(format!("json: {e}")))?;
            writeln!(sink)?;
        }
    }
    Ok(())
}

pub fn read_results_csv(source: impl Read) -> Result<Vec<ResultRecord>> {
    csv::Reader::from_reader(source)
        .deserialize()
        .map(|r| r.map_err(csv_error))
        .collect()
}

pub fn read_results_json(source: impl Read) -> Result<Vec<ResultRecord>> {
    serde_json::from_reader(source).map_err(|e| Error::Config(format!("json: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Vec<ResultRecord> {
        vec![
            ResultRecord {
                matrix_name: "tridiag-100".into(),
                format: "dacsr".into(),
                widths: "i32/i16/f64".into(),
                variant: "multi-acc-3".into(),
                threads: 1,
                traffic_bytes: 4_404,
                work_flops: 796,
                time_seconds: 1.234_567_890_123_456_7e-7,
                performance_flops_per_s: 796.0 / 1.234_567_890_123_456_7e-7,
                throughput_bytes_per_s: 0.1 + 0.2,
                cache_bucket: "L1d".into(),
                best: true,
            },
            ResultRecord {
                matrix_name: "with,comma".into(),
                format: "csr".into(),
                widths: "i32/i32/f32".into(),
                variant: "parallel:2:naive".into(),
                threads: 2,
                traffic_bytes: 0,
                work_flops: 0,
                time_seconds: 1e-300,
                performance_flops_per_s: 0.0,
                throughput_bytes_per_s: f64::MAX,
                cache_bucket: "Large".into(),
                best: false,
            },
        ]
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let mut out = Vec::new();
        write_results(&sample(), &mut out, ResultFormat::Csv).unwrap();
        let text = String::from_utf8(out.clone()).unwrap();
        assert!(text.starts_with("matrix_name,format,widths,variant,threads,traffic_bytes,"));
        assert_eq!(read_results_csv(out.as_slice()).unwrap(), sample());
    }

    #[test]
    fn json_round_trip_is_exact() {
        let mut out = Vec::new();
        write_results(&sample(), &mut out, ResultFormat::Json).unwrap();
        assert_eq!(read_results_json(out.as_slice()).unwrap(), sample());
    }

    #[test]
    fn empty_csv_still_has_header() {
        let mut out = Vec::new();
        write_results(&[], &mut out, ResultFormat::Csv).unwrap();
        assert_eq!(String::from_utf8(out).unwrap().lines().count(), 1);
    }
}
