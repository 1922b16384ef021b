use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const EXAMPLE_ONE: &str = "%%MatrixMarket matrix coordinate real general
4 4 5
1 1 1
2 3 2
3 2 3
3 4 4
4 4 5
";

fn dacsr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dacsr"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let o = dacsr(args);
    assert!(o.status.success(), "{args:?} failed: {}", stderr(&o));
    stdout(&o)
}

fn example_file(dir: &TempDir) -> PathBuf {
    let p = dir.path().join("ex1.mtx");
    fs::write(&p, EXAMPLE_ONE).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn predict_approx_int32_to_int16() {
    assert_eq!(
        ok(&["predict", "--from", "f64,i32", "--to", "f64,i16", "--approx"]),
        "6/5 = 1.2\n"
    );
}

#[test]
fn predict_dense_and_full_shape() {
    assert_eq!(
        ok(&[
            "predict",
            "--from",
            "f64,dense",
            "--to",
            "f32,i8",
            "--approx"
        ]),
        "8/5 = 1.6\n"
    );
    // (101*4 + 1000*12) / (101*4 + 1000*10) = 12404 / 10404
    assert_eq!(
        ok(
            &[
                "predict", "--from", "f64,i32", "--to", "f64,i16", "--nrows", "100", "--nnz",
                "1000"
            ]
        ),
        format!("3101/2601 = {}\n", 3101.0 / 2601.0)
    );
}

#[test]
fn spmv_example_with_ones() {
    let dir = TempDir::new().unwrap();
    let m = example_file(&dir);
    assert_eq!(ok(&["spmv", s(&m)]), "1\n2\n7\n5\n");
    for format in ["dacsr:i16:f64", "dacsr:i8:i8:f32", "csr:i8:i8:f64"] {
        for variant in [
            "naive",
            "shifted-base",
            "multi-acc-3",
            "strip-mined-4",
            "parallel:3:naive",
        ] {
            let out = ok(&["spmv", s(&m), "--format", format, "--variant", variant]);
            assert_eq!(out, "1\n2\n7\n5\n", "{format} {variant}");
        }
    }
}

#[test]
fn spmv_with_vectors_alpha_beta() {
    let dir = TempDir::new().unwrap();
    let m = example_file(&dir);
    let x = dir.path().join("x.txt");
    let y = dir.path().join("y.txt");
    fs::write(&x, "1 2\n% comment\n3 4\n").unwrap();
    fs::write(&y, "1 1 1 1\n").unwrap();
    // A x = (1, 6, 22, 20); 2 A x - y
    let out = ok(&[
        "spmv",
        s(&m),
        "--x",
        s(&x),
        "--y",
        s(&y),
        "--alpha",
        "2",
        "--beta",
        "-1",
    ]);
    assert_eq!(out, "1\n11\n43\n39\n");
}

#[test]
fn spmv_rejects_wrong_vector_length() {
    let dir = TempDir::new().unwrap();
    let m = example_file(&dir);
    let x = dir.path().join("x.txt");
    fs::write(&x, "1 2 3").unwrap();
    let o = dacsr(&["spmv", s(&m), "--x", s(&x)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error:"));
}

#[test]
fn convert_round_trip_is_byte_identical() {
    let dir = TempDir::new().unwrap();
    let m = example_file(&dir);
    let canonical = dir.path().join("canonical.csr");
    let da = dir.path().join("ex1.da");
    let back = dir.path().join("back.csr");
    ok(&["convert", s(&m), s(&canonical), "--to", "csr:i32:i32:f64"]);
    ok(&["convert", s(&m), s(&da), "--to", "dacsr:i16:f64"]);
    ok(&["convert", s(&da), s(&back), "--to", "csr:i32:i32:f64"]);
    assert_eq!(fs::read(&canonical).unwrap(), fs::read(&back).unwrap());
    assert!(fs::read_to_string(&da).unwrap().contains("\n0 1 -1 1 0\n"));

    let mtx = dir.path().join("back.mtx");
    let mtx2 = dir.path().join("back2.mtx");
    ok(&["convert", s(&da), s(&mtx), "--to", "mtx"]);
    ok(&["convert", s(&mtx), s(&mtx2), "--to", "mtx"]);
    assert_eq!(fs::read(&mtx).unwrap(), fs::read(&mtx2).unwrap());
    assert_eq!(ok(&["spmv", s(&mtx)]), "1\n2\n7\n5\n");
}

#[test]
fn convert_reports_bandwidth_overflow() {
    let dir = TempDir::new().unwrap();
    let m = dir.path().join("wide.mtx");
    fs::write(
        &m,
        "%%MatrixMarket matrix coordinate real general\n200 200 1\n1 200 1\n",
    )
    .unwrap();
    let o = dacsr(&[
        "convert",
        s(&m),
        s(&dir.path().join("o")),
        "--to",
        "dacsr:i8:f64",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("bandwidth 199"), "{}", stderr(&o));
}

#[test]
fn analyze_verdicts() {
    let out = ok(&[
        "analyze",
        "--generate",
        "tridiag:100",
        "--generate",
        "scrambled:40000:4:5",
        "--generate",
        "arrow:70000",
        "--csv",
    ]);
    let mut rdr = csv::Reader::from_reader(out.as_bytes());
    let header = rdr.headers().unwrap().clone();
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let (bw, rcm_bw, fc, fd) = (
        col("bandwidth"),
        col("rcm_bandwidth"),
        col("fits_csr"),
        col("fits_dacsr"),
    );

    assert_eq!(
        (&rows[0][bw], &rows[0][rcm_bw], &rows[0][fc], &rows[0][fd]),
        ("1", "1", "true", "true")
    );

    let scrambled_bw: u64 = rows[1][bw].parse().unwrap();
    let scrambled_rcm: u64 = rows[1][rcm_bw].parse().unwrap();
    assert!(scrambled_bw > 32767 && scrambled_rcm <= 32767);
    assert_eq!((&rows[1][fc], &rows[1][fd]), ("false", "true"));

    assert!(rows[2][rcm_bw].parse::<u64>().unwrap() > 32767);
    assert_eq!((&rows[2][fc], &rows[2][fd]), ("false", "false"));
}

#[test]
fn analyze_table_and_partial_failure() {
    let dir = TempDir::new().unwrap();
    let m = example_file(&dir);
    let o = dacsr(&["analyze", s(&m), "/does/not/exist.mtx", "--iindex", "8"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.lines().next().unwrap().contains("csr-i8"));
    assert!(out.contains("ex1"));
    assert!(out.ends_with("1 matrices: csr-i8 fits 1 (100.0%), dacsr-i8 fits 1 (100.0%)\n"));
    assert!(stderr(&o).contains("exist.mtx"));
}

#[test]
fn analyze_fails_when_every_input_fails() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.mtx");
    fs::write(
        &bad,
        "%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1\n",
    )
    .unwrap();
    let o = dacsr(&["analyze", s(&bad), "--generate", "nonsense:1"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr(&o).matches("error:").count(), 3);
}

#[test]
fn analyze_json() {
    let out = ok(&["analyze", "--generate", "tridiag:10", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v[0]["matrix_name"], "tridiag-10");
    assert_eq!(v[0]["fits_dacsr"], true);
}

#[test]
fn reorder_recovers_band() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("r.mtx");
    let perm = dir.path().join("p.txt");
    let scrambled = dir.path().join("s.mtx");
    fs::write(&scrambled, scrambled_mtx(500)).unwrap();
    let line = ok(&["reorder", s(&scrambled), s(&out), "--permutation", s(&perm)]);
    let (before, after) = line
        .trim()
        .strip_prefix("bandwidth ")
        .unwrap()
        .split_once(" -> ")
        .unwrap();
    let (before, after): (u64, u64) = (before.parse().unwrap(), after.parse().unwrap());
    assert!(after <= 2 && after < before, "{line}");

    let mut p: Vec<usize> = fs::read_to_string(&perm)
        .unwrap()
        .lines()
        .map(|l| l.parse().unwrap())
        .collect();
    p.sort_unstable();
    assert_eq!(p, (0..500).collect::<Vec<_>>());
    let analyzed = ok(&["analyze", s(&out), "--csv"]);
    assert!(analyzed
        .lines()
        .nth(1)
        .unwrap()
        .contains(&format!(",{after},{after},")));
}

/// Tridiagonal pattern under the index map `i -> (7 i) mod n` (n coprime to 7).
fn scrambled_mtx(n: usize) -> String {
    let map = |i: usize| (7 * i) % n + 1;
    let mut entries = Vec::new();
    for i in 0..n {
        for j in i.saturating_sub(1)..(i + 2).min(n) {
            entries.push((map(i), map(j), if i == j { 2.0 } else { -1.0 }));
        }
    }
    let mut s = format!(
        "%%MatrixMarket matrix coordinate real general\n{n} {n} {}\n",
        entries.len()
    );
    for (r, c, v) in entries {
        s.push_str(&format!("{r} {c} {v}\n"));
    }
    s
}

#[test]
fn bench_quick_csv() {
    let dir = TempDir::new().unwrap();
    let results = dir.path().join("r.csv");
    let o = dacsr(&[
        "bench",
        "--generate",
        "banded:300:4",
        "--quick",
        "--min-epoch-ms",
        "1",
        "--threads",
        "1,2",
        "--variant",
        "naive",
        "--variant",
        "strip-mined-4",
        "--format",
        "csr:i32:i32:f64",
        "--format",
        "dacsr:i32:i8:f32",
        "--csv",
        "-o",
        s(&results),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let mut rdr = csv::Reader::from_path(&results).unwrap();
    let records: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(records.len(), 2 * 2 * 2);
    let best = rdr
        .headers()
        .unwrap()
        .iter()
        .position(|h| h == "best")
        .unwrap();
    assert_eq!(records.iter().filter(|r| &r[best] == "true").count(), 2);
}

#[test]
fn bench_records_conversion_failure_and_continues() {
    let dir = TempDir::new().unwrap();
    let config = dir.path().join("bench.conf");
    fs::write(
        &config,
        "epochs = 2\nwarmup = 1\nmin_epoch_iters = 1\nmin_epoch_ms = 1\nthreads = 1\nl2 = 1M\n",
    )
    .unwrap();
    let o = dacsr(&[
        "bench",
        "--generate",
        "random:40:300:0.05",
        "--config",
        s(&config),
        "--format",
        "dacsr:i32:i8:f64",
        "--format",
        "csr:i32:i16:f64",
        "--variant",
        "naive",
        "--json",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("ConversionFailed"));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 1);
    assert_eq!(v[0]["format"], "csr");
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["frobnicate"][..],
        &["predict", "--from", "f64,i32"],
        &["spmv"],
        &["spmv", "x.mtx", "--variant", "bogus"],
        &["bench", "--format", "coo:i32:f64"],
    ] {
        assert_eq!(dacsr(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn operational_errors_exit_1() {
    for args in [
        &["analyze"][..],
        &["spmv", "/does/not/exist.mtx"],
        &[
            "predict",
            "--from",
            "f64,dense",
            "--to",
            "f64,i16",
            "--nrows",
            "1",
            "--nnz",
            "1",
        ],
        &["bench", "--generate", "tridiag:10", "--epochs", "0"],
    ] {
        let o = dacsr(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(stderr(&o).starts_with("error:"), "{args:?}");
    }
}
