use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use tempfile::TempDir;
use tfum_cli::{run, EXIT_MISMATCH, EXIT_OK, EXIT_PARSE, EXIT_USAGE};

fn example(file: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data/running-example")
        .join(file)
        .to_string_lossy()
        .into_owned()
}

struct Invocation {
    code: i32,
    stdout: String,
    stderr: String,
}

fn tfum(args: &[&str]) -> Invocation {
    let mut stdout = Vec::new();
    let mut stderr = Vec::new();
    let code = run(
        std::iter::once("tfum").chain(args.iter().copied()),
        &mut stdout,
        &mut stderr,
    );
    Invocation {
        code,
        stdout: String::from_utf8(stdout).unwrap(),
        stderr: String::from_utf8(stderr).unwrap(),
    }
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn example_input<'a>(data: &'a str, profits: &'a str, rounding: &'a str) -> Vec<&'a str> {
    vec![
        "--data",
        data,
        "--profits",
        profits,
        "--gamma",
        "0.2",
        "--rounding",
        rounding,
    ]
}

#[test]
fn mine_reproduces_the_bundled_fixtures() {
    let (data, profits) = (example("dataset.txt"), example("profits.txt"));
    for (rounding, fixture) in [
        ("2-decimals", "expected-2-decimals.csv"),
        ("exact", "expected-exact.csv"),
    ] {
        let mut args = vec!["mine"];
        args.extend(example_input(&data, &profits, rounding));
        let out = tfum(&args);
        assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
        assert_eq!(out.stdout, fs::read_to_string(example(fixture)).unwrap());
        assert!(out.stderr.starts_with("7 itemsets"), "{}", out.stderr);
    }
}

#[test]
fn explicit_membership_file_matches_default() {
    let (data, profits, membership) = (
        example("dataset.txt"),
        example("profits.txt"),
        example("membership.json"),
    );
    let mut args = vec!["mine"];
    args.extend(example_input(&data, &profits, "2-decimals"));
    let default = tfum(&args);
    args.extend(["--membership", &membership]);
    assert_eq!(tfum(&args).stdout, default.stdout);
}

#[test]
fn oracle_and_diff_agree_on_the_example() {
    let (data, profits) = (example("dataset.txt"), example("profits.txt"));
    let mut args = vec!["oracle"];
    args.extend(example_input(&data, &profits, "2-decimals"));
    let oracle = tfum(&args);
    assert_eq!(oracle.code, EXIT_OK);
    assert_eq!(
        oracle.stdout,
        fs::read_to_string(example("expected-2-decimals.csv")).unwrap()
    );

    args[0] = "diff";
    let diff = tfum(&args);
    assert_eq!(diff.code, EXIT_OK, "{}", diff.stderr);
    assert_eq!(diff.stdout, "agree: 7 itemsets\n");
    args.extend(["--no-s2", "--no-s3", "--parallel"]);
    assert_eq!(tfum(&args).code, EXIT_OK);
}

#[test]
fn diff_flags_lossy_retention() {
    let dir = TempDir::new().unwrap();
    let data = write(
        &dir,
        "data.txt",
        "periods: 1\n1 | c:3\n1 | b:5 c:6\n1 | a:1 b:5 c:1\n",
    );
    let profits = write(&dir, "profits.txt", "a 1\nb 1\nc 1\n");
    let base = [
        "diff",
        "--data",
        &data,
        "--profits",
        &profits,
        "--gamma",
        "0.05",
    ];
    assert_eq!(tfum(&base).code, EXIT_OK);

    let mut lossy = base.to_vec();
    lossy.extend(["--retention", "upper-bound"]);
    let out = tfum(&lossy);
    assert_eq!(out.code, EXIT_MISMATCH);
    assert!(
        out.stderr
            .contains("only the oracle reports c.Low&b.Low&a.Low"),
        "{}",
        out.stderr
    );
}

#[test]
fn usage_errors_exit_one() {
    let (data, profits) = (example("dataset.txt"), example("profits.txt"));
    let cases: [&[&str]; 5] = [
        &[
            "mine",
            "--data",
            &data,
            "--profits",
            &profits,
            "--gamma",
            "1.5",
        ],
        &["mine", "--data", &data, "--profits", &profits, "--bogus"],
        &[
            "mine",
            "--data",
            "/nonexistent/data.txt",
            "--profits",
            &profits,
        ],
        &[
            "mine",
            "--data",
            &data,
            "--profits",
            &profits,
            "--rounding",
            "3-decimals",
        ],
        &["frobnicate"],
    ];
    for args in cases {
        let out = tfum(args);
        assert_eq!(out.code, EXIT_USAGE, "{args:?}: {}", out.stderr);
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn malformed_input_exits_two_with_location() {
    let dir = TempDir::new().unwrap();
    let profits = write(&dir, "profits.txt", "A 9\nB 5\n");
    let cases = [
        ("zero.txt", "periods: 2\n1 | A:1\n2 | B:0\n", "zero.txt:3"),
        (
            "range.txt",
            "periods: 2\n# comment\n3 | A:1\n",
            "range.txt:3",
        ),
        ("unknown.txt", "periods: 2\n1 | A:1 Z:2\n", "unknown.txt:2"),
        ("header.txt", "1 | A:1\n", "header.txt:1"),
    ];
    for (name, text, location) in cases {
        let data = write(&dir, name, text);
        let out = tfum(&["mine", "--data", &data, "--profits", &profits]);
        assert_eq!(out.code, EXIT_PARSE, "{name}: {}", out.stderr);
        assert!(out.stderr.contains(location), "{name}: {}", out.stderr);
    }

    let data = write(&dir, "ok.txt", "periods: 1\n1 | A:1\n");
    let membership = write(&dir, "mf.json", "{\"regions\": [");
    let out = tfum(&[
        "mine",
        "--data",
        &data,
        "--profits",
        &profits,
        "--membership",
        &membership,
    ]);
    assert_eq!(out.code, EXIT_PARSE, "{}", out.stderr);

    let bad_profits = write(&dir, "bad-profits.txt", "A -1\n");
    let out = tfum(&["mine", "--data", &data, "--profits", &bad_profits]);
    assert_eq!(out.code, EXIT_PARSE);
    assert!(out.stderr.contains("bad-profits.txt:1"), "{}", out.stderr);
}

fn generate(dir: &TempDir, tag: &str, seed: &str) -> (String, String) {
    let data = dir.path().join(format!("{tag}-data.txt"));
    let profits = dir.path().join(format!("{tag}-profits.txt"));
    let (d, p) = (
        data.to_string_lossy().into_owned(),
        profits.to_string_lossy().into_owned(),
    );
    let out = tfum(&[
        "gen",
        "--items",
        "7",
        "--transactions",
        "40",
        "--periods",
        "3",
        "--density",
        "3",
        "--seed",
        seed,
        "--out-data",
        &d,
        "--out-profits",
        &p,
    ]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    (d, p)
}

#[test]
fn gen_is_seeded_and_feeds_diff() {
    let dir = TempDir::new().unwrap();
    let (d1, p1) = generate(&dir, "a", "5");
    let (d2, p2) = generate(&dir, "b", "5");
    let (d3, _) = generate(&dir, "c", "6");
    assert_eq!(fs::read(&d1).unwrap(), fs::read(&d2).unwrap());
    assert_eq!(fs::read(&p1).unwrap(), fs::read(&p2).unwrap());
    assert_ne!(fs::read(&d1).unwrap(), fs::read(&d3).unwrap());

    for gamma in ["0", "0.05", "0.3"] {
        for rounding in ["exact", "2-decimals"] {
            let out = tfum(&[
                "diff",
                "--data",
                &d1,
                "--profits",
                &p1,
                "--gamma",
                gamma,
                "--rounding",
                rounding,
            ]);
            assert_eq!(out.code, EXIT_OK, "γ={gamma} {rounding}: {}", out.stderr);
        }
    }
}

#[test]
fn json_report_carries_metrics() {
    let dir = TempDir::new().unwrap();
    let json = dir.path().join("report.json");
    let csv = dir.path().join("out.csv");
    let (data, profits) = (example("dataset.txt"), example("profits.txt"));
    let mut args = vec!["mine"];
    args.extend(example_input(&data, &profits, "2-decimals"));
    let (json_s, csv_s) = (
        json.to_string_lossy().into_owned(),
        csv.to_string_lossy().into_owned(),
    );
    args.extend(["--json", &json_s, "--out", &csv_s]);
    let out = tfum(&args);
    assert_eq!(out.code, EXIT_OK);
    assert!(out.stdout.is_empty());
    assert_eq!(
        fs::read_to_string(&csv).unwrap(),
        fs::read_to_string(example("expected-2-decimals.csv")).unwrap()
    );

    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    for key in [
        "visitedNodes",
        "candidates",
        "constructedLists",
        "abortsByS3",
        "prunedByS2",
        "pruneRatio",
        "wallTimeMs",
    ] {
        assert!(report["metrics"][key].is_number(), "missing {key}");
    }
    assert_eq!(
        report["itemOrder"],
        serde_json::json!(["D", "B", "E", "A", "F", "C"])
    );
    assert_eq!(report["results"].as_array().unwrap().len(), 7);
    assert_eq!(report["rounding"], "2-decimals");
}

fn binary() -> Command {
    Command::new(PathBuf::from(env!("CARGO_BIN_EXE_tfum")))
}

#[test]
fn bench_prints_one_row_per_pair() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("bench.csv");
    let out = binary()
        .args([
            "bench",
            "--items",
            "8",
            "--transactions",
            "100",
            "--density",
            "3",
            "--gammas",
            "0.05,0.2",
        ])
        .args(["--periods", "1,3", "--csv"])
        .arg(&csv)
        .env("TFUM_BENCH_THREADS", "2")
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let table = String::from_utf8(out.stdout).unwrap();
    assert_eq!(table.lines().count(), 5, "{table}");
    assert!(table.lines().next().unwrap().contains("prune_ratio"));
    assert_eq!(fs::read_to_string(&csv).unwrap().lines().count(), 5);

    let bad = binary()
        .args([
            "bench",
            "--items",
            "8",
            "--transactions",
            "10",
            "--density",
            "2",
        ])
        .env("TFUM_BENCH_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_USAGE));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("TFUM_BENCH_THREADS"));
}

#[test]
fn binary_exit_codes_and_help() {
    let help = binary().arg("--help").output().unwrap();
    assert!(help.status.success());
    let text = String::from_utf8(help.stdout).unwrap();
    for sub in ["mine", "oracle", "diff", "gen", "bench"] {
        assert!(text.contains(sub), "{text}");
    }
    assert_eq!(tfum(&["mine", "--help"]).code, EXIT_OK);

    let missing = binary()
        .args(["mine", "--data", "nope.txt", "--profits", "nope.txt"])
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(EXIT_USAGE));

    let mined = binary()
        .args([
            "mine",
            "--data",
            &example("dataset.txt"),
            "--profits",
            &example("profits.txt"),
        ])
        .args(["--rounding", "exact"])
        .output()
        .unwrap();
    assert!(mined.status.success());
    assert_eq!(
        mined.stdout,
        fs::read(example("expected-exact.csv")).unwrap()
    );
}
