use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use mignotte_core::attack::{attack_report, CongruenceSystem, SearchMode};
use mignotte_core::{SecretBounds, SharesFile};
use tempfile::TempDir;

const GOLDEN: &str = "(set-logic ALL)
(declare-const S Int)
(declare-const I0 Int)
(declare-const I1 Int)
(assert (> S 0))
(assert (= I0 (mod S 9)))
(assert (= I0 6))
(assert (= I1 (mod S 11)))
(assert (= I1 0))
(check-sat)
(get-model)
";

fn mignotte(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mignotte"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Deals the session instance (7,9,11,13,17), t = 3, secret 330.
fn session_file(dir: &TempDir, format: &str) -> PathBuf {
    let path = dir.path().join(format!("secret-{format}.txt"));
    let o = mignotte(&[
        "deal", "--moduli", "7,9,11,13,17", "-t", "3", "--secret", "330",
        "--out", path_str(&path), "--format", format,
    ]);
    assert_eq!(code(&o), 0, "{o:?}");
    path
}

#[test]
fn deal_writes_paper_layout_and_prints_range() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("shares.txt");
    let o = mignotte(&[
        "deal", "--moduli", "7,9,11,13,17", "-t", "3", "--secret", "330",
        "--out", path_str(&path), "--format", "paper",
    ]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("Secret range: (221, 693)\n"));
    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().nth(1), Some("6 , 9 "));
    assert_eq!(text, "1 , 7 \n6 , 9 \n0 , 11 \n5 , 13 \n7 , 17 \n");
}

#[test]
fn deal_strict_rejects_worked_example_lax_accepts() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("shares.txt");
    let args = [
        "deal", "--moduli", "7,9,11,13,15", "-t", "3", "--secret", "450",
        "--out", path_str(&path), "--format", "paper",
    ];
    let strict = mignotte(&args);
    assert_eq!(code(&strict), 1);
    let err = String::from_utf8_lossy(&strict.stderr);
    assert!(err.contains("NotPairwiseCoprime(9,15)"), "{err}");
    assert!(!path.exists());

    let mut lax_args = args.to_vec();
    lax_args.extend(["--mode", "lax"]);
    let lax = mignotte(&lax_args);
    assert_eq!(code(&lax), 0);
    assert!(stdout(&lax).contains("Secret range: (195, 693)"));
    assert!(stdout(&lax).contains("lax"));
    let values: Vec<String> = fs::read_to_string(&path)
        .unwrap()
        .lines()
        .map(|l| l.split_whitespace().next().unwrap().to_string())
        .collect();
    assert_eq!(values, ["2", "0", "10", "8", "0"]);
}

#[test]
fn deal_validation_messages() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("x.txt");
    let o = mignotte(&["deal", "--moduli", "2,3,7", "-t", "2", "--secret", "5", "--out", path_str(&out)]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("NotMignotte"));
    let o = mignotte(&[
        "deal", "--moduli", "7,9,11,13,17", "-t", "3", "--secret", "221", "--out", path_str(&out),
    ]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("SecretOutOfRange"));
}

#[test]
fn deal_io_failure_exits_2() {
    let o = mignotte(&[
        "deal", "--moduli", "7,9,11,13,17", "-t", "3", "--secret", "330",
        "--out", "/nonexistent-dir/shares.txt",
    ]);
    assert_eq!(code(&o), 2);
}

#[test]
fn reconstruct_examples() {
    let dir = TempDir::new().unwrap();
    let paper = session_file(&dir, "paper");
    let o = mignotte(&["reconstruct", "--shares", path_str(&paper), "--ids", "1,2,4", "-t", "3"]);
    assert_eq!((code(&o), stdout(&o).as_str()), (0, "330\n"));

    let o = mignotte(&["reconstruct", "--shares", path_str(&paper), "--ids", "1,2", "-t", "3"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("InsufficientShares"));

    // Paper files carry no threshold.
    let o = mignotte(&["reconstruct", "--shares", path_str(&paper), "--ids", "1,2,4"]);
    assert_eq!(code(&o), 1);

    let structured = session_file(&dir, "structured");
    let o = mignotte(&["reconstruct", "--shares", path_str(&structured), "--ids", "0,1,2"]);
    assert_eq!((code(&o), stdout(&o).as_str()), (0, "330\n"));

    let tampered = dir.path().join("tampered.txt");
    fs::write(&tampered, "1 , 7 \n6 , 9 \n1 , 11 \n5 , 13 \n7 , 17 \n").unwrap();
    let o = mignotte(&["reconstruct", "--shares", path_str(&tampered), "--ids", "0,1,2", "-t", "3"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("CandidateOutOfRange"));

    let o = mignotte(&["reconstruct", "--shares", "/nonexistent/shares.txt", "--ids", "0,1,2", "-t", "3"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn attack_examples() {
    let dir = TempDir::new().unwrap();
    let paper = session_file(&dir, "paper");
    let p = path_str(&paper);

    let o = mignotte(&["attack", "--shares", p, "--ids", "1,2", "--positive", "--limit", "5"]);
    assert_eq!((code(&o), stdout(&o).as_str()), (0, "33\n132\n231\n330\n429\n"));

    let o = mignotte(&["attack", "--shares", p, "--ids", "1,2", "--range", "221:693"]);
    assert_eq!((code(&o), stdout(&o).as_str()), (0, "231\n330\n429\n528\n627\n"));

    let o = mignotte(&["attack", "--shares", p, "--ids", "1,2,4", "--range", "221:693"]);
    assert_eq!((code(&o), stdout(&o).as_str()), (0, "330\n"));

    // Default mode is the public range, which needs the threshold here.
    let o = mignotte(&["attack", "--shares", p, "--ids", "1,2", "-t", "3"]);
    assert_eq!(stdout(&o), "231\n330\n429\n528\n627\n");
}

#[test]
fn attack_output_matches_library() {
    let dir = TempDir::new().unwrap();
    let structured = session_file(&dir, "structured");
    let file = SharesFile::parse(&fs::read_to_string(&structured).unwrap()).unwrap();
    for ids in [vec![0usize, 1], vec![3, 4], vec![1, 2, 4], vec![2]] {
        let ids_arg = ids.iter().map(ToString::to_string).collect::<Vec<_>>().join(",");
        let system = CongruenceSystem::from_shares(&file.select(&ids).unwrap()).unwrap();
        for (flags, mode) in [
            (vec!["--range", "221:693"], SearchMode::Range(SecretBounds::new(221u32, 693u32).unwrap())),
            (vec![], SearchMode::Range(SecretBounds::new(221u32, 693u32).unwrap())),
            (vec!["--positive", "--limit", "7"], SearchMode::Positive { limit: 7 }),
        ] {
            let mut args = vec!["attack", "--shares", path_str(&structured), "--ids", &ids_arg];
            args.extend(flags);
            let report = attack_report(&system, &mode).unwrap();
            let expected: String = report.candidates.iter().map(|c| format!("{c}\n")).collect();
            assert_eq!(stdout(&mignotte(&args)), expected, "{args:?}");
        }
    }
}

#[test]
fn attack_json_and_empty_result() {
    let dir = TempDir::new().unwrap();
    let paper = session_file(&dir, "paper");
    let o = mignotte(&["attack", "--shares", path_str(&paper), "--ids", "1,2", "--range", "221:693", "--json"]);
    assert_eq!(code(&o), 0);
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["count"], "5");
    assert_eq!(doc["unique"], false);
    assert!((doc["residual_entropy_bits"].as_f64().unwrap() - 5f64.log2()).abs() < 1e-9);
    assert_eq!(doc["combined"]["modulus"], "99");

    // 330 mod 1683 has no representative in (400, 693).
    let o = mignotte(&["attack", "--shares", path_str(&paper), "--ids", "1,2,4", "--range", "400:693"]);
    assert_eq!((code(&o), stdout(&o).as_str()), (3, ""));
}

#[test]
fn attack_domain_errors() {
    let dir = TempDir::new().unwrap();
    let forged = dir.path().join("forged.txt");
    fs::write(&forged, "0 , 4 \n1 , 6 \n").unwrap();
    let o = mignotte(&["attack", "--shares", path_str(&forged), "--ids", "0,1", "--positive"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("Inconsistent"));

    let paper = session_file(&dir, "paper");
    for ids in ["1,1", "1,7"] {
        let o = mignotte(&["attack", "--shares", path_str(&paper), "--ids", ids, "--positive"]);
        assert_eq!(code(&o), 1, "{ids}");
    }
    let o = mignotte(&["attack", "--shares", path_str(&paper), "--ids", "1", "--range", "9:3"]);
    assert_eq!(code(&o), 1);

    let garbage = dir.path().join("garbage.txt");
    fs::write(&garbage, "not a shares file\n").unwrap();
    let o = mignotte(&["attack", "--shares", path_str(&garbage), "--ids", "0", "--positive"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn audit_examples() {
    let base = ["audit", "--moduli", "7,9,11,13,17", "-t", "3", "--secret", "330"];
    let run = |size: &str| {
        let mut args = base.to_vec();
        args.extend(["--size", size]);
        mignotte(&args)
    };
    let o = run("2");
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("{0,1}\t7\t"), "{text}");
    assert!(text.contains("{3,4}\t2\t"), "{text}");
    let rows: Vec<&str> = text.lines().filter(|l| l.starts_with('{')).collect();
    assert_eq!(rows.len(), 10);
    assert!(rows[0].starts_with("{0,1}") && rows[9].starts_with("{3,4}"));

    let o = run("3");
    let rows: Vec<String> = stdout(&o).lines().filter(|l| l.starts_with('{')).map(String::from).collect();
    assert_eq!(rows.len(), 10);
    assert!(rows.iter().all(|r| r.split('\t').nth(1) == Some("1")));

    assert_eq!(code(&run("0")), 1);
    assert_eq!(code(&run("9")), 1);

    let mut json_args = base.to_vec();
    json_args.extend(["--size", "2", "--json"]);
    let doc: serde_json::Value = serde_json::from_slice(&mignotte(&json_args).stdout).unwrap();
    assert_eq!(doc["coalitions"][0]["count"], "7");
    assert_eq!(doc["max"], "7");
}

#[test]
fn emit_smt_examples() {
    let dir = TempDir::new().unwrap();
    let paper = session_file(&dir, "paper");
    let out = dir.path().join("q.smt2");
    let o = mignotte(&[
        "emit-smt", "--shares", path_str(&paper), "--ids", "1,2", "--positive", "--out", path_str(&out),
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(fs::read(&out).unwrap(), GOLDEN.as_bytes());

    let o = mignotte(&["emit-smt", "--shares", path_str(&paper), "--ids", "1,2", "--range", "221:693"]);
    assert_eq!(
        stdout(&o),
        GOLDEN.replace("(assert (> S 0))", "(assert (and (> S 221) (< S 693)))")
    );

    let o = mignotte(&["emit-smt", "--shares", path_str(&paper), "--ids", "1,5", "--positive"]);
    assert_eq!(code(&o), 1);

    let o = mignotte(&[
        "emit-smt", "--shares", path_str(&paper), "--ids", "1,2", "--positive",
        "--out", "/nonexistent-dir/q.smt2",
    ]);
    assert_eq!(code(&o), 2);
}

fn z3_available() -> bool {
    Command::new("z3")
        .arg("--version")
        .stdout(Stdio::null())
        .stderr(Stdio::null())
        .status()
        .is_ok_and(|s| s.success())
}

#[test]
fn solve_smt_examples() {
    let dir = TempDir::new().unwrap();
    let golden = dir.path().join("golden.smt2");
    fs::write(&golden, GOLDEN).unwrap();

    let o = mignotte(&["solve-smt", "--script", path_str(&golden), "--solver-cmd", "no-such-solver-binary"]);
    assert_eq!(code(&o), 4);

    if !z3_available() {
        eprintln!("z3 not found; skipping live solver checks");
        return;
    }
    let o = mignotte(&["solve-smt", "--script", path_str(&golden), "--solver-cmd", "z3 -in", "--limit", "5"]);
    assert_eq!((code(&o), stdout(&o).as_str()), (0, "33\n132\n231\n330\n429\n"));

    let unsat = dir.path().join("unsat.smt2");
    fs::write(
        &unsat,
        GOLDEN.replace("(assert (= I1 0))", "(assert (= I1 0))\n(assert (< S 20))"),
    )
    .unwrap();
    let o = mignotte(&["solve-smt", "--script", path_str(&unsat)]);
    assert_eq!((code(&o), stdout(&o).as_str()), (3, ""));

    let broken = dir.path().join("broken.smt2");
    fs::write(&broken, "(assert (> x 0))\n(check-sat)\n(get-model)\n").unwrap();
    assert_eq!(code(&mignotte(&["solve-smt", "--script", path_str(&broken)])), 1);
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(code(&mignotte(&["deal"])), 1);
    assert_eq!(code(&mignotte(&["frobnicate"])), 1);
    assert_eq!(code(&mignotte(&["--help"])), 0);
}
