use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use zariski::cli::{ReportFile, EXIT_INPUT, EXIT_OK, EXIT_VERIFY};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(format!("{name}.json"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zariski"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn decompose_json(name: &str) -> ReportFile {
    let path = fixture(name);
    let out = run(&["decompose", "--json", path.to_str().unwrap()]);
    assert_eq!(
        code(&out),
        EXIT_OK,
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    ReportFile::from_json(&stdout(&out)).unwrap()
}

#[test]
fn decompose_fixtures() {
    let a2 = decompose_json("a2-chain");
    assert_eq!(a2.positive_part, ["0", "0"]);
    assert_eq!(a2.negative_part, ["1", "1"]);
    let fs = decompose_json("fiber-section");
    assert_eq!(fs.positive_part, ["1", "1/2"]);
    assert_eq!(fs.negative_part, ["0", "1/2"]);
    assert_eq!(fs.certificates.orthogonality_products[0].product, "0");
    let nef = decompose_json("nef-input");
    assert_eq!(nef.positive_part, ["1"]);
    assert_eq!(nef.negative_part, ["0"]);
    assert!(nef.certificates.inertia.is_none());
}

#[test]
fn text_report_and_oracle_flag() {
    let path = fixture("fiber-section");
    let out = run(&["decompose", "--oracle", path.to_str().unwrap()]);
    assert_eq!(code(&out), EXIT_OK);
    let text = stdout(&out);
    assert!(text.contains("P = (1, 1/2)"));
    assert!(text.contains("oracle agreement: true"));
    let out = run(&["decompose", "--json", "--oracle", path.to_str().unwrap()]);
    assert_eq!(
        ReportFile::from_json(&stdout(&out))
            .unwrap()
            .solver
            .oracle_agreement,
        Some(true)
    );
    let quiet = run(&["decompose", "--quiet", path.to_str().unwrap()]);
    assert_eq!(code(&quiet), EXIT_OK);
    assert!(quiet.stdout.is_empty());
}

#[test]
fn verify_round_trip_and_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let problem = fixture("fiber-section");
    let report = decompose_json("fiber-section");
    let report_path = dir.path().join("report.json");

    fs::write(&report_path, report.to_json()).unwrap();
    let ok = run(&[
        "verify",
        problem.to_str().unwrap(),
        report_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&ok), EXIT_OK);

    let mut swapped = report.clone();
    std::mem::swap(&mut swapped.positive_part, &mut swapped.negative_part);
    fs::write(&report_path, swapped.to_json()).unwrap();
    let bad = run(&[
        "verify",
        problem.to_str().unwrap(),
        report_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&bad), EXIT_VERIFY);
    assert!(stdout(&bad).contains("(i) fails"), "{}", stdout(&bad));

    let mut tampered = report;
    tampered.positive_part[1] = "1/3".into();
    fs::write(&report_path, tampered.to_json()).unwrap();
    let bad = run(&[
        "verify",
        problem.to_str().unwrap(),
        report_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&bad), EXIT_VERIFY);
    assert!(stdout(&bad).contains("sum fails"));

    fs::write(&report_path, "{ not json").unwrap();
    let bad = run(&[
        "verify",
        problem.to_str().unwrap(),
        report_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&bad), EXIT_INPUT);
}

#[test]
fn witness_command() {
    let out = run(&["witness", fixture("affine-a1").to_str().unwrap()]);
    assert_eq!(code(&out), EXIT_OK);
    assert!(stdout(&out).starts_with("witness (1, 1)"));
    let out = run(&["witness", fixture("a2-chain").to_str().unwrap()]);
    assert_eq!(stdout(&out).trim(), "negative definite (0,0,2)");
    let out = run(&["witness", fixture("zero-curve").to_str().unwrap()]);
    assert!(stdout(&out).starts_with("witness (1)"));
    let out = run(&[
        "witness",
        "--witness-support",
        "1",
        fixture("fiber-section").to_str().unwrap(),
    ]);
    assert_eq!(stdout(&out).trim(), "negative definite (0,0,1)");
    let out = run(&[
        "witness",
        "--witness-support",
        "7",
        fixture("fiber-section").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), EXIT_INPUT);
}

#[test]
fn malformed_inputs_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, body: &str| {
        let p = dir.path().join(name);
        fs::write(&p, body).unwrap();
        p
    };
    let cases = [
        write(
            "asym.json",
            r#"{"components":["A","B"],"intersection_matrix":[["-2","1"],["0","-2"]],"divisor":["1","1"]}"#,
        ),
        write(
            "neg.json",
            r#"{"components":["A","B"],"intersection_matrix":[["0","-1"],["-1","0"]],"divisor":["1","1"]}"#,
        ),
        write(
            "numbers.json",
            r#"{"components":["A"],"intersection_matrix":[[-1]],"divisor":["1"]}"#,
        ),
        write(
            "noneff.json",
            r#"{"components":["A"],"intersection_matrix":[["-1"]],"divisor":["-1/2"]}"#,
        ),
        write(
            "nodiv.json",
            r#"{"components":["A"],"intersection_matrix":[["-1"]]}"#,
        ),
        dir.path().join("missing.json"),
    ];
    for path in &cases {
        let out = run(&["decompose", path.to_str().unwrap()]);
        assert_eq!(code(&out), EXIT_INPUT, "{}", path.display());
        assert!(out.stdout.is_empty());
    }
    let neg = run(&["decompose", cases[1].to_str().unwrap()]);
    assert!(String::from_utf8_lossy(&neg.stderr).contains("intersection_matrix[0][1]"));
}

#[test]
fn generate_is_reproducible_and_decomposes() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [a.path(), b.path()] {
        let out = run(&[
            "generate",
            "--seed",
            "7",
            "--size",
            "4",
            "--count",
            "10",
            "--out-dir",
            dir.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), EXIT_OK);
    }
    let mut names: Vec<_> = fs::read_dir(a.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert_eq!(names.len(), 10);
    let report_dir = tempfile::tempdir().unwrap();
    for name in &names {
        let pa = a.path().join(name);
        assert_eq!(
            fs::read(&pa).unwrap(),
            fs::read(b.path().join(name)).unwrap()
        );
        let out = run(&["decompose", "--json", "--oracle", pa.to_str().unwrap()]);
        assert_eq!(code(&out), EXIT_OK);
        let report = ReportFile::from_json(&stdout(&out)).unwrap();
        assert_ne!(report.solver.oracle_agreement, Some(false));
        let rp = report_dir.path().join(name);
        fs::write(&rp, stdout(&out)).unwrap();
        assert_eq!(
            code(&run(&[
                "verify",
                pa.to_str().unwrap(),
                rp.to_str().unwrap()
            ])),
            EXIT_OK
        );
    }

    let one = tempfile::tempdir().unwrap();
    let out = run(&[
        "generate",
        "--seed",
        "1",
        "--size",
        "1",
        "--count",
        "1",
        "--out-dir",
        one.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), EXIT_OK);
    assert_eq!(fs::read_dir(one.path()).unwrap().count(), 1);

    let out = run(&[
        "generate",
        "--seed",
        "1",
        "--size",
        "0",
        "--out-dir",
        one.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), EXIT_INPUT);
}

#[test]
fn every_fixture_round_trips() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let tmp = tempfile::tempdir().unwrap();
    for entry in fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let problem: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
        if problem.get("divisor").is_none() {
            continue;
        }
        let out = run(&["decompose", "--json", path.to_str().unwrap()]);
        assert_eq!(code(&out), EXIT_OK, "{}", path.display());
        let rp = tmp.path().join("r.json");
        fs::write(&rp, &out.stdout).unwrap();
        assert_eq!(
            code(&run(&[
                "verify",
                path.to_str().unwrap(),
                rp.to_str().unwrap()
            ])),
            EXIT_OK
        );
    }
}
