use std::path::Path;
use std::process::{Command, Output};

fn mpbmc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mpbmc")).args(args).output().expect("spawn mpbmc")
}

fn ok(args: &[&str]) -> String {
    let out = mpbmc(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const RUN: [&str; 6] = ["--budget-conflicts", "300", "--mode", "init", "--max-depth", "10"];

fn generate_corpus(dir: &Path) -> Vec<String> {
    let specs: [(&str, &[&str]); 4] = [
        ("twin", &["two-counters", "--bits", "3"]),
        ("steer", &["steering", "--bits", "6", "--copies", "3", "--seed", "1"]),
        ("miter", &["miter", "--bits", "6", "--copies", "4", "--seed", "2"]),
        ("rand", &["random", "--bits", "5", "--copies", "4", "--seed", "3"]),
    ];
    specs
        .iter()
        .map(|(name, args)| {
            let path = dir.join(format!("{name}.aag"));
            let mut full = vec!["generate"];
            full.extend_from_slice(args);
            full.extend(["--out", s(&path)]);
            ok(&full);
            path.to_string_lossy().into_owned()
        })
        .collect()
}

#[test]
fn offline_verify_report() {
    let tmp = tempfile::tempdir().unwrap();
    let designs = generate_corpus(tmp.path());
    let db = tmp.path().join("db");
    let mut args = vec!["offline"];
    args.extend(designs.iter().map(String::as_str));
    args.extend(["--out", s(&db)]);
    args.extend(RUN);
    let summary = ok(&args);
    assert!(summary.starts_with("4 designs"), "{summary}");

    let unknown = tmp.path().join("unknown.aag");
    ok(&["generate", "steering", "--bits", "6", "--copies", "2", "--seed", "8", "--out", s(&unknown)]);
    let out = tmp.path().join("out");
    let mut args = vec!["verify", s(&unknown), "--db", s(&db), "--out", s(&out), "--baseline"];
    args.extend(RUN);
    let table = ok(&args);
    let header = table.lines().next().unwrap();
    assert!(header.ends_with("standalone_conflicts\ttransition\tgain"), "{header}");
    assert_eq!(table.lines().count(), 3);

    let files = ok(&["report", s(&out)]);
    assert!(files.lines().any(|l| l.ends_with("depth_scatter.csv")));
    assert!(files.lines().any(|l| l.ends_with("vtime_standalone.csv")));

    let again = tmp.path().join("again");
    let mut args = vec!["verify", s(&unknown), "--db", s(&db), "--out", s(&again), "--assoc", "greedy"];
    args.extend(RUN);
    let plain = ok(&args);
    assert!(!plain.contains("standalone_status"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(mpbmc(&["offline", "--out", "x"]).status.code(), Some(2));
    assert_eq!(mpbmc(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(mpbmc(&["generate", "counter", "--bits", "0", "--out", "x"]).status.code(), Some(2));
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path().join("d.aag");
    ok(&["generate", "counter", "--bits", "3", "--out", s(&d)]);
    let out = mpbmc(&["offline", s(&d), "--out", "x", "--time-budget", "-1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = mpbmc(&["offline", s(&d), "--out", "x", "--embed", "import"]);
    assert_eq!(out.status.code(), Some(2));
    let out = mpbmc(&["verify", s(&d), "--db", "x", "--out", "y", "--proof-bound", "5", "--max-depth", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn data_errors_exit_3() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path().join("d.aag");
    ok(&["generate", "counter", "--bits", "3", "--out", s(&d)]);
    let missing = tmp.path().join("missing");
    let out = mpbmc(&["verify", s(&d), "--db", s(&missing), "--out", s(&tmp.path().join("o"))]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing artifact"));

    let bad = tmp.path().join("bad.aag");
    std::fs::write(&bad, "not aiger\n").unwrap();
    let out = mpbmc(&["offline", s(&bad), "--out", s(&tmp.path().join("db"))]);
    assert_eq!(out.status.code(), Some(3));

    let out = mpbmc(&["report", s(&missing)]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn generated_designs_parse() {
    let tmp = tempfile::tempdir().unwrap();
    for path in generate_corpus(tmp.path()) {
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("aag "), "{path}");
        let n = mpbmc::Netlist::parse_aiger(&text).unwrap();
        assert!(n.num_properties() >= 1);
    }
}
