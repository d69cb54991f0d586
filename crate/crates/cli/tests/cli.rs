use std::io::Write;
use std::process::Command;

use frobkern::bench::BenchReport;
use frobkern::characters::CharacterPoly;
use frobkern::reduced_ring::ReducedBasis;
use frobkern_cli::{dispatch, ScalarOutput, SeriesOutput};

fn run(args: &str) -> (i32, String, String) {
    let argv = std::iter::once("frobkern").chain(args.split_whitespace());
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let status = dispatch(argv, &mut out, &mut err);
    (status, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn ok(args: &str) -> String {
    let (status, out, err) = run(args);
    assert_eq!(status, 0, "{args}: {err}");
    out
}

#[test]
fn count_plain() {
    assert_eq!(ok("count 3 5 0 10"), "439201\n");
    assert_eq!(ok("count 3 2 1 2"), "0\n");
    assert_eq!(ok("count 5 3 0 10"), "301\n");
    assert_eq!(ok("count 2 3 4 2 --p2"), ok("count 2 3 4 2"));
}

#[test]
fn count_with_oracle_agrees() {
    assert_eq!(ok("count 3 3 3 5 --oracle"), ok("count 3 3 3 5"));
    assert_eq!(ok("count 2 2 1 3 --oracle"), ok("count 2 2 1 3"));
}

#[test]
fn oracle_refusal_is_status_3() {
    let (status, out, err) = run("count 5 5 0 10 --oracle");
    assert_eq!(status, 3, "{err}");
    assert!(out.is_empty());
    assert!(err.contains("force"));
}

#[test]
fn usage_errors_are_status_2() {
    for args in [
        "count 3 5 0",
        "count 4 2 0 2",
        "count 3 0 0 2",
        "count 3 2 x 2",
        "count 3 2 0 2 --p2",
        "frobnicate",
        "count 3 2 0 2 --output xml",
        "bench custom /nonexistent/spec.json",
    ] {
        let (status, _, err) = run(args);
        assert_eq!(status, 2, "{args}");
        assert!(!err.is_empty(), "{args}");
    }
}

#[test]
fn help_goes_to_stdout() {
    let (status, out, _) = run("--help");
    assert_eq!(status, 0);
    assert!(out.contains("char-b"));
}

#[test]
fn basis_json() {
    assert_eq!(ok("basis 3 3 --output json"), "[[0,0],[3,2],[6,1]]\n");
    assert_eq!(ok("basis 3 2"), "1\n");
    let text = ok("basis 5 3 --output json");
    let back = ReducedBasis::from_json(5, 3, text.trim()).unwrap();
    assert_eq!(back.len(), 5);
    assert_eq!(back.to_json(), text.trim());
}

#[test]
fn scalar_json_round_trip() {
    for args in ["count 3 4 0 6", "quantum 3 2 4", "graded 3 3 1 3 4"] {
        let text = ok(&format!("{args} --output json"));
        let parsed: ScalarOutput = serde_json::from_str(&text).unwrap();
        assert_eq!(format!("{}\n", serde_json::to_string(&parsed).unwrap()), text);
        assert_eq!(format!("{}\n", parsed.value), ok(args));
    }
    let parsed: ScalarOutput = serde_json::from_str(&ok("count 3 4 0 6 --output json")).unwrap();
    assert_eq!(parsed.value, "1519");
}

#[test]
fn character_json_round_trip() {
    for args in ["char-b 3 2 4 --nmax 10", "char-g 5 2 3 --nmax 9", "char-b 2 3 2 --nmax 7"] {
        let text = ok(&format!("{args} --output json"));
        let ch = CharacterPoly::from_json(text.trim()).unwrap();
        assert_eq!(ch.to_json(), text.trim());
        assert!(!ch.is_zero(), "{args}");
    }
}

#[test]
fn series_outputs() {
    assert_eq!(ok("hilbert 3 2 --dmax 6"), "1 0 1 0 1 0 2\n");
    assert_eq!(ok("poincare-u 2 3 --dmax 4"), "1 3 6 10 15\n");
    let text = ok("hilbert 2 3 --dmax 10 --output json");
    let s: SeriesOutput = serde_json::from_str(&text).unwrap();
    assert_eq!(s.coeffs.len(), 11);
    let csv = ok("poincare-u 2 2 --dmax 2 --output csv");
    assert_eq!(csv, "degree,coeff\n0,1\n1,2\n2,3\n");
}

#[test]
fn scalar_csv_and_markdown() {
    assert_eq!(ok("count 3 5 0 10 --output csv"), "p,r,m,n,value\n3,5,0,10,439201\n");
    let md = ok("quantum 3 2 2 --output markdown");
    assert!(md.starts_with("| p | r | n | value |"), "{md}");
}

#[test]
fn bench_tables() {
    let md = ok("bench table1");
    assert!(md.contains("439201"));
    let text = ok("bench table2 --output json");
    let report = BenchReport::from_json(text.trim()).unwrap();
    assert_eq!(report.cells.len(), 24);
    assert_eq!(report.reference_mismatches(), Some(vec![]));
    let csv = ok("bench table1 --output csv");
    assert!(csv.starts_with("r,n=0,"));
}

#[test]
fn bench_custom_with_oracle() {
    let dir = std::env::temp_dir().join(format!("frobkern-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("spec.json");
    std::fs::write(
        &path,
        r#"{"p":3,"r_range":{"start":1,"end":3},"n_values":[1,3,5],"m":3,"engines":["fast","oracle"]}"#,
    )
    .unwrap();
    let text = ok(&format!("bench custom {} --output json", path.display()));
    let report = BenchReport::from_json(text.trim()).unwrap();
    assert!(report.passed());
    assert_eq!(report.cells.len(), 9);

    std::fs::write(&path, r#"{"p":6,"r_range":{"start":1,"end":2},"n_values":[0],"engines":["fast"]}"#).unwrap();
    assert_eq!(run(&format!("bench custom {}", path.display())).0, 2);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn audit_runs() {
    let out = ok("audit --primes 3 --r-max 2 --max-odd 5");
    assert!(out.contains("doubled equation matches"));
}

#[test]
fn config_file_and_precedence() {
    let dir = std::env::temp_dir().join(format!("frobkern-cfg-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("config.json");
    let mut f = std::fs::File::create(&path).unwrap();
    write!(f, r#"{{"output_format":"json","oracle_force":false,"memo_shared":true}}"#).unwrap();
    drop(f);

    let json = ok(&format!("count 3 2 0 2 --config {}", path.display()));
    assert!(json.starts_with('{'));
    let plain = ok(&format!("count 3 2 0 2 --config {} --output plain", path.display()));
    assert_eq!(plain, "3\n");

    std::fs::write(&path, r#"{"output_format":"yaml"}"#).unwrap();
    assert_eq!(run(&format!("count 3 2 0 2 --config {}", path.display())).0, 2);

    // the environment variable supplies the default path
    std::fs::write(&path, r#"{"output_format":"csv"}"#).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_frobkern"))
        .args(["count", "3", "5", "0", "10"])
        .env("FROBKERN_CONFIG", &path)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "p,r,m,n,value\n3,5,0,10,439201\n");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_frobkern");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap().status.code();
    assert_eq!(status(&["count", "3", "5", "0", "10"]), Some(0));
    assert_eq!(status(&["count", "9", "5", "0", "10"]), Some(2));
    assert_eq!(status(&["quantum", "5", "5", "10", "--output", "json"]), Some(0));
}
