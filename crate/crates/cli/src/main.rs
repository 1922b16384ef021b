use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use dacsr::analysis::{analyze, summarize, write_analysis, AnalysisRecord};
use dacsr::bench::{
    parse_config, parse_size, run_suite, BenchConfig, CacheSpec, FileSettings, NamedMatrix,
    WallClockTimer,
};
use dacsr::format::write_converted;
use dacsr::gen::generate;
use dacsr::io::{read_any, write_matrix_market, write_results, ResultFormat, ResultRecord};
use dacsr::model::{format_ratio, predicted_speedup, StorageWidths, TrafficBasis};
use dacsr::{
    build_operator, permute_symmetric, rcm, spmv, FormatSpec, IndexWidth, Scalar, ScalarWidth,
    SerialVariant, SpmvProblem, SpmvVariant, WideCsr,
};

mod table;

#[derive(Parser)]
#[command(
    name = "dacsr",
    version,
    about = "Sparse storage analysis, conversion and SpMV benchmarking"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report bandwidth before and after RCM and whether narrow indices fit.
    Analyze(AnalyzeArgs),
    /// Apply RCM reordering and write Matrix Market.
    Reorder(ReorderArgs),
    /// Convert a matrix to a storage format, or back to Matrix Market.
    Convert(ConvertArgs),
    /// Predicted speedup from reduced memory traffic.
    Predict(PredictArgs),
    /// Compute y = alpha*A*x + beta*y and print y.
    Spmv(SpmvArgs),
    /// Verify and time SpMV across formats, kernels and thread counts.
    Bench(BenchArgs),
}

#[derive(Args)]
struct Inputs {
    /// Matrix Market or storage files.
    paths: Vec<PathBuf>,
    /// Generated matrix, e.g. tridiag:100, banded:N:B[:SEED], scrambled:N:B[:SEED],
    /// band:N:W, arrow:N, random:R:C:DENSITY[:SEED]. Repeatable.
    #[arg(long = "generate", value_name = "SPEC")]
    generate: Vec<String>,
}

impl Inputs {
    fn is_empty(&self) -> bool {
        self.paths.is_empty() && self.generate.is_empty()
    }

    /// One result per input, in order: files first, then generated matrices.
    fn load(&self) -> Vec<(String, Result<WideCsr>)> {
        let files = self.paths.iter().map(|p| {
            let loaded = read_any(p).with_context(|| p.display().to_string());
            (matrix_name(p), loaded)
        });
        let generated = self.generate.iter().map(|spec| match generate(spec) {
            Ok(m) => (m.name, Ok(m.matrix)),
            Err(e) => (spec.clone(), Err(anyhow!(e).context(spec.clone()))),
        });
        files.chain(generated).collect()
    }
}

#[derive(Args)]
struct OutputFormat {
    #[arg(long, conflicts_with = "json")]
    csv: bool,
    #[arg(long)]
    json: bool,
}

impl OutputFormat {
    fn machine(&self) -> Option<ResultFormat> {
        if self.csv {
            Some(ResultFormat::Csv)
        } else if self.json {
            Some(ResultFormat::Json)
        } else {
            None
        }
    }
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    inputs: Inputs,
    /// Narrow column index width.
    #[arg(long, default_value = "i16")]
    iindex: IndexWidth,
    #[command(flatten)]
    output: OutputFormat,
}

#[derive(Args)]
struct ReorderArgs {
    input: PathBuf,
    output: PathBuf,
    /// Also write the permutation, one old row index per line (0-based).
    #[arg(long, value_name = "FILE")]
    permutation: Option<PathBuf>,
}

#[derive(Args)]
struct ConvertArgs {
    input: PathBuf,
    output: PathBuf,
    /// Target: `mtx`, or KIND:IINDEX:SCALAR / KIND:OINDEX:IINDEX:SCALAR with
    /// KIND csr or dacsr, e.g. dacsr:i16:f64.
    #[arg(long, value_name = "FORMAT")]
    to: String,
}

#[derive(Args)]
struct PredictArgs {
    /// Baseline widths: SCALAR,IINDEX[,OINDEX], e.g. f64,i32. IINDEX may be `dense`.
    #[arg(long, value_name = "WIDTHS")]
    from: String,
    /// Candidate widths, same syntax.
    #[arg(long, value_name = "WIDTHS")]
    to: String,
    /// Count only index and value bytes per nonzero.
    #[arg(long, conflicts_with_all = ["nrows", "nnz", "ncols"])]
    approx: bool,
    #[arg(long, required_unless_present = "approx")]
    nrows: Option<u64>,
    #[arg(long, required_unless_present = "approx")]
    nnz: Option<u64>,
    /// Include x and y vector traffic for this many columns.
    #[arg(long)]
    ncols: Option<u64>,
}

#[derive(Args)]
struct SpmvArgs {
    matrix: Option<PathBuf>,
    #[arg(
        long,
        value_name = "SPEC",
        conflicts_with = "matrix",
        required_unless_present = "matrix"
    )]
    generate: Option<String>,
    /// Whitespace-separated x values; all ones when omitted.
    #[arg(long, value_name = "FILE")]
    x: Option<PathBuf>,
    /// Initial y; zeros when omitted.
    #[arg(long, value_name = "FILE")]
    y: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    alpha: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    beta: f64,
    /// Kernel name, or parallel:THREADS:KERNEL.
    #[arg(long, default_value = "naive")]
    variant: SpmvVariant,
    #[arg(long, default_value = "csr:i32:i32:f64")]
    format: FormatSpec,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    inputs: Inputs,
    /// Storage format to time. Repeatable.
    #[arg(long = "format", default_values = ["csr:i32:i32:f64", "dacsr:i32:i16:f64"])]
    formats: Vec<FormatSpec>,
    /// Serial kernel to time. Repeatable; all kernels when omitted.
    #[arg(long = "variant")]
    variants: Vec<SerialVariant>,
    /// key = value settings file, applied before flags.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Short epochs for smoke runs.
    #[arg(long)]
    quick: bool,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    warmup: Option<usize>,
    #[arg(long)]
    min_epoch_iters: Option<usize>,
    #[arg(long)]
    min_epoch_ms: Option<u64>,
    /// Comma-separated thread counts.
    #[arg(long, value_delimiter = ',')]
    threads: Option<Vec<usize>>,
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,
    /// Cache sizes with K/M/G suffixes (1024 base).
    #[arg(long, value_parser = parse_size_arg)]
    l1d: Option<u64>,
    #[arg(long, value_parser = parse_size_arg)]
    l2: Option<u64>,
    #[arg(long, value_parser = parse_size_arg)]
    l3: Option<u64>,
    /// Read cache sizes from sysfs instead of the built-in defaults.
    #[arg(long)]
    detect_cache: bool,
    /// Write results here instead of stdout.
    #[arg(long, short, value_name = "FILE")]
    output: Option<PathBuf>,
    #[command(flatten)]
    format_flags: OutputFormat,
}

fn parse_size_arg(s: &str) -> std::result::Result<u64, String> {
    parse_size(s).map_err(|e| e.to_string())
}

fn matrix_name(path: &Path) -> String {
    path.file_stem().map_or_else(
        || path.display().to_string(),
        |s| s.to_string_lossy().into_owned(),
    )
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze(a) => run_analyze(a),
        Command::Reorder(a) => run_reorder(a),
        Command::Convert(a) => run_convert(a),
        Command::Predict(a) => run_predict(a),
        Command::Spmv(a) => run_spmv(a),
        Command::Bench(a) => run_bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run_analyze(args: AnalyzeArgs) -> Result<()> {
    if args.inputs.is_empty() {
        bail!("no matrices given");
    }
    let mut records = Vec::new();
    let mut failed = 0;
    for (name, loaded) in args.inputs.load() {
        match loaded.and_then(|a| Ok(analyze(&name, &a, args.iindex)?)) {
            Ok(r) => records.push(r),
            Err(e) => {
                eprintln!("error: {e:#}");
                failed += 1;
            }
        }
    }
    if records.is_empty() {
        bail!("all {failed} inputs failed");
    }
    let out = &mut io::stdout().lock();
    let summary = summary_line(&records, args.iindex);
    match args.output.machine() {
        Some(format) => {
            write_analysis(&records, &mut *out, format)?;
            eprintln!("{summary}");
        }
        None => {
            let bits = args.iindex.bits();
            let yes_no = |b: bool| if b { "yes" } else { "no" }.to_string();
            let rows: Vec<Vec<String>> = records
                .iter()
                .map(|r| {
                    vec![
                        r.matrix_name.clone(),
                        r.nrows.to_string(),
                        r.ncols.to_string(),
                        r.nnz.to_string(),
                        r.bandwidth.to_string(),
                        r.rcm_bandwidth.to_string(),
                        yes_no(r.fits_csr),
                        yes_no(r.fits_dacsr),
                    ]
                })
                .collect();
            let csr = format!("csr-i{bits}");
            let da = format!("dacsr-i{bits}");
            let header = [
                "matrix",
                "nrows",
                "ncols",
                "nnz",
                "bandwidth",
                "rcm-bandwidth",
                &csr,
                &da,
            ];
            table::write_table(out, &header, &rows)?;
            writeln!(out, "{summary}")?;
        }
    }
    Ok(())
}

fn summary_line(records: &[AnalysisRecord], width: IndexWidth) -> String {
    let (total, csr, da) = summarize(records);
    let pct = |k: usize| 100.0 * k as f64 / total as f64;
    let bits = width.bits();
    format!(
        "{total} matrices: csr-i{bits} fits {csr} ({:.1}%), dacsr-i{bits} fits {da} ({:.1}%)",
        pct(csr),
        pct(da)
    )
}

fn run_reorder(args: ReorderArgs) -> Result<()> {
    let a = read_any(&args.input).with_context(|| args.input.display().to_string())?;
    let p = rcm(&a)?;
    let b = permute_symmetric(&a, &p)?;
    write_matrix_market(&b, create(&args.output)?)?;
    if let Some(path) = &args.permutation {
        let mut w = create(path)?;
        for old in p.perm() {
            writeln!(w, "{old}")?;
        }
        w.flush()?;
    }
    println!("bandwidth {} -> {}", a.bandwidth().0, b.bandwidth().0);
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| path.display().to_string())?,
    ))
}

fn run_convert(args: ConvertArgs) -> Result<()> {
    let a = read_any(&args.input).with_context(|| args.input.display().to_string())?;
    if args.to.trim() == "mtx" {
        write_matrix_market(&a, create(&args.output)?)?;
    } else {
        let spec: FormatSpec = args.to.parse()?;
        let mut w = create(&args.output)?;
        write_converted(&a, &spec, &mut w)?;
        w.flush()?;
    }
    Ok(())
}

/// `SCALAR,IINDEX[,OINDEX]`; OINDEX defaults to i32.
fn parse_widths(s: &str, approx: bool) -> Result<StorageWidths> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if !(2..=3).contains(&parts.len()) {
        bail!("expected SCALAR,IINDEX[,OINDEX], got `{s}`");
    }
    let scalar: ScalarWidth = parts[0].parse().map_err(|e: String| anyhow!(e))?;
    let iindex = match parts[1] {
        "dense" => None,
        w => Some(w.parse::<IndexWidth>().map_err(|e| anyhow!(e))?),
    };
    let oindex: IndexWidth = parts
        .get(2)
        .copied()
        .unwrap_or("i32")
        .parse()
        .map_err(|e: String| anyhow!(e))?;
    Ok(match iindex {
        _ if approx => StorageWidths::per_nonzero(iindex, scalar),
        Some(i) => StorageWidths::new(oindex, i, scalar),
        None => bail!("`dense` only applies with --approx"),
    })
}

fn run_predict(args: PredictArgs) -> Result<()> {
    let from = parse_widths(&args.from, args.approx).context("--from")?;
    let to = parse_widths(&args.to, args.approx).context("--to")?;
    let basis = match (args.approx, args.nrows, args.nnz, args.ncols) {
        (true, ..) => TrafficBasis::PerNonzero,
        (false, Some(nrows), Some(nnz), None) => TrafficBasis::Matrix { nrows, nnz },
        (false, Some(nrows), Some(nnz), Some(ncols)) => TrafficBasis::Spmv { nrows, ncols, nnz },
        _ => bail!("--nrows and --nnz are required without --approx"),
    };
    println!("{}", format_ratio(&predicted_speedup(&from, &to, basis)?));
    Ok(())
}

fn read_vector(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).with_context(|| path.display().to_string())?;
    text.lines()
        .filter(|l| !l.trim_start().starts_with(['%', '#']))
        .flat_map(str::split_whitespace)
        .map(|t| {
            t.parse::<f64>()
                .with_context(|| format!("{}: bad number `{t}`", path.display()))
        })
        .collect()
}

fn run_spmv(args: SpmvArgs) -> Result<()> {
    let a = match (&args.matrix, &args.generate) {
        (Some(p), _) => read_any(p).with_context(|| p.display().to_string())?,
        (None, Some(spec)) => generate(spec)?.matrix,
        (None, None) => unreachable!("clap requires one input"),
    };
    let x = match &args.x {
        Some(p) => read_vector(p)?,
        None => vec![1.0; a.ncols()],
    };
    let y = match &args.y {
        Some(p) => read_vector(p)?,
        None => vec![0.0; a.nrows()],
    };
    let out = &mut BufWriter::new(io::stdout().lock());
    match args.format.scalar {
        ScalarWidth::F64 => apply::<f64>(&a, &args, &x, y, out)?,
        ScalarWidth::F32 => apply::<f32>(&a, &args, &x, y, out)?,
        other => bail!("no kernel for {other} scalars"),
    }
    out.flush()?;
    Ok(())
}

fn apply<S: Scalar + std::fmt::Display>(
    a: &WideCsr,
    args: &SpmvArgs,
    x: &[f64],
    y: Vec<f64>,
    out: &mut impl Write,
) -> Result<()> {
    let op = build_operator::<S>(a, &args.format)?;
    let x: Vec<S> = x.iter().map(|&v| S::from_f64(v)).collect();
    let mut y: Vec<S> = y.iter().map(|&v| S::from_f64(v)).collect();
    let problem = SpmvProblem::new(S::from_f64(args.alpha), S::from_f64(args.beta), &x, &mut y);
    spmv(op.as_ref(), problem, args.variant)?;
    for v in &y {
        writeln!(out, "{v}")?;
    }
    Ok(())
}

fn bench_settings(args: &BenchArgs) -> Result<FileSettings> {
    let mut s = FileSettings {
        bench: if args.quick {
            BenchConfig::quick()
        } else {
            BenchConfig::default()
        },
        cache: if args.detect_cache {
            CacheSpec::detect()
        } else {
            CacheSpec::default()
        },
    };
    if let Some(path) = &args.config {
        let text = fs::read_to_string(path).with_context(|| path.display().to_string())?;
        s = parse_config(&text, s).with_context(|| path.display().to_string())?;
    }
    let b = &mut s.bench;
    b.epochs = args.epochs.unwrap_or(b.epochs);
    b.warmup_iters = args.warmup.unwrap_or(b.warmup_iters);
    b.min_epoch_iters = args.min_epoch_iters.unwrap_or(b.min_epoch_iters);
    if let Some(ms) = args.min_epoch_ms {
        b.min_epoch_time = Duration::from_millis(ms);
    }
    if let Some(t) = &args.threads {
        b.thread_counts = t.clone();
    }
    b.alpha = args.alpha.unwrap_or(b.alpha);
    b.beta = args.beta.unwrap_or(b.beta);
    let c = &mut s.cache;
    c.l1d = args.l1d.unwrap_or(c.l1d);
    c.l2_total = args.l2.unwrap_or(c.l2_total);
    c.l3 = args.l3.unwrap_or(c.l3);
    s.bench.validate()?;
    Ok(s)
}

fn run_bench(args: BenchArgs) -> Result<()> {
    if args.inputs.is_empty() {
        bail!("no matrices given");
    }
    let settings = bench_settings(&args)?;
    let mut matrices = Vec::new();
    for (name, loaded) in args.inputs.load() {
        match loaded {
            Ok(m) => matrices.push(NamedMatrix::new(name, m)),
            Err(e) => eprintln!("error: {e:#}"),
        }
    }
    if matrices.is_empty() {
        bail!("no matrix could be loaded");
    }
    let variants = if args.variants.is_empty() {
        SerialVariant::ALL.to_vec()
    } else {
        args.variants.clone()
    };
    let mut timer = WallClockTimer::new(settings.bench.clone());
    let report = run_suite(
        &matrices,
        &args.formats,
        &variants,
        &settings.bench,
        &settings.cache,
        &mut timer,
    );
    for f in &report.failures {
        let variant = f
            .variant
            .as_deref()
            .map(|v| format!(" {v}"))
            .unwrap_or_default();
        eprintln!(
            "{}: {}{variant}: {:?}: {}",
            f.matrix_name, f.format, f.kind, f.reason
        );
    }

    let mut sink: Box<dyn Write> = match &args.output {
        Some(path) => Box::new(create(path)?),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    match args.format_flags.machine() {
        Some(format) => write_results(&report.records, &mut sink, format)?,
        None => write_bench_table(&mut sink, &report.records)?,
    }
    sink.flush()?;
    if report.records.is_empty() {
        bail!("no combination produced a result");
    }
    Ok(())
}

fn write_bench_table(out: &mut impl Write, records: &[ResultRecord]) -> io::Result<()> {
    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| {
            vec![
                r.matrix_name.clone(),
                r.format.clone(),
                r.widths.clone(),
                r.variant.clone(),
                r.threads.to_string(),
                format!("{:.3e}", r.time_seconds),
                format!("{:.3}", r.performance_flops_per_s / 1e9),
                format!("{:.3}", r.throughput_bytes_per_s / 1e9),
                r.cache_bucket.to_string(),
                if r.best { "*" } else { "" }.to_string(),
            ]
        })
        .collect();
    let header = [
        "matrix", "format", "widths", "variant", "threads", "time-s", "gflop/s", "gb/s", "cache",
        "best",
    ];
    table::write_table(out, &header, &rows)
}
