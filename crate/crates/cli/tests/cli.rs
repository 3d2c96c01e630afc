use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

fn cdc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cdc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn cdc_stdin(args: &[&str], input: &[u8]) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_cdc"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn construct_8_4_4_then_verify_full() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("c.cdc");
    let o = cdc(&[
        "construct",
        "--recipe",
        "8_4_4",
        "--q",
        "2",
        "--out",
        p(&file),
    ]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    assert!(s.contains("expected: 4797"), "{s}");
    assert!(s.contains("generated: 4797"));
    assert!(s.contains("status: equal"));
    let body = fs::read_to_string(&file).unwrap();
    assert_eq!(body.lines().filter(|l| !l.starts_with('#')).count(), 4797);

    let o = cdc(&["verify", "--file", p(&file), "--mode", "full"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    assert!(s.contains("\"min_distance_found\":4"), "{s}");
    assert!(s.contains("\"violations_total\":0"));
}

#[test]
fn construct_to_stdout_keeps_status_off_the_stream() {
    let o = cdc(&[
        "construct",
        "--recipe",
        "9_4_3_lmrd",
        "--q",
        "2",
        "--out",
        "-",
    ]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    assert!(s.starts_with("#Q=2"));
    assert!(s.contains("#COUNT=4097"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("status: equal"));

    let v = cdc_stdin(
        &[
            "verify", "--file", "-", "--mode", "sample", "--pairs", "20000", "--seed", "3",
        ],
        &o.stdout,
    );
    assert_eq!(code(&v), 0, "{}", String::from_utf8_lossy(&v.stderr));
    assert!(stdout(&v).contains("\"pairs_checked\":20000"));
}

#[test]
fn construct_materialize_and_canonical_order() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.cdc");
    let b = dir.path().join("b.cdc");
    let o = cdc(&[
        "construct",
        "--recipe",
        "8_4_4",
        "--q",
        "2",
        "--materialize",
        "--order",
        "canonical",
        "--out",
        p(&a),
    ]);
    assert_eq!(code(&o), 0);
    let o = cdc(&["construct", "--recipe", "8_4_4", "--q", "2", "--out", p(&b)]);
    assert_eq!(code(&o), 0);
    let c = dir.path().join("c.cdc");
    assert_eq!(
        code(&cdc(&[
            "export",
            "--file",
            p(&b),
            "--order",
            "canonical",
            "--out",
            p(&c)
        ])),
        0
    );
    assert_eq!(fs::read(&a).unwrap(), fs::read(&c).unwrap());
}

#[test]
fn unknown_recipe_is_usage_error() {
    let o = cdc(&["construct", "--recipe", "no_such", "--q", "2"]);
    assert_eq!(code(&o), 2);
    assert_eq!(code(&cdc(&["construct", "--q", "2"])), 2);
    assert_eq!(code(&cdc(&["frobnicate"])), 2);
}

#[test]
fn missing_or_foreign_import_is_usage_error() {
    assert_eq!(
        code(&cdc(&["construct", "--recipe", "9_4_3", "--q", "2"])),
        2
    );
    let o = cdc(&[
        "construct",
        "--recipe",
        "8_4_4",
        "--q",
        "2",
        "--import",
        "x=/nonexistent",
    ]);
    assert_eq!(code(&o), 2);
}

#[test]
fn bad_import_shape_is_precondition_error() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("s.cdc");
    assert_eq!(
        code(&cdc(&[
            "export",
            "--object",
            "spread",
            "--q",
            "2",
            "--n",
            "6",
            "--k",
            "3",
            "--out",
            p(&f)
        ])),
        0
    );
    let o = cdc(&[
        "construct",
        "--recipe",
        "9_4_3",
        "--q",
        "2",
        "--import",
        &format!("c_6_4_3={}", p(&f)),
    ]);
    assert_eq!(code(&o), 4);
}

#[test]
fn bound_only_recipe_reports_expected() {
    let o = cdc(&["construct", "--recipe", "4k_2k_2k", "--q", "2", "--k", "4"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    assert!(s.contains("bound only"), "{s}");
    assert_eq!(
        code(&cdc(&["construct", "--recipe", "4k_2k_2k", "--q", "2"])),
        4
    );
}

#[test]
fn count_mismatch_exits_one() {
    let o = cdc(&[
        "construct",
        "--recipe",
        "10_4_5",
        "--q",
        "2",
        "--out",
        "/dev/null",
    ]);
    assert_eq!(code(&o), 1);
    let s = stdout(&o);
    assert!(s.contains("expected: 1179336"), "{s}");
    assert!(s.contains("generated: 1178856"));
    assert!(s.contains("status: mismatch"));
}

#[test]
fn verify_sample_zero_pairs() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("m.cdc");
    cdc(&[
        "export",
        "--object",
        "lifted-mrd",
        "--q",
        "2",
        "--n",
        "6",
        "--k",
        "3",
        "--d",
        "4",
        "--out",
        p(&f),
    ]);
    let o = cdc(&[
        "verify",
        "--file",
        p(&f),
        "--mode",
        "sample",
        "--pairs",
        "0",
    ]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    assert!(s.contains("\"pairs_checked\":0"));
    assert!(s.contains("\"min_distance_found\":null"));
}

#[test]
fn verify_output_is_independent_of_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("c.cdc");
    cdc(&["construct", "--recipe", "8_4_4", "--q", "2", "--out", p(&f)]);
    let run = |jobs: &str| {
        stdout(&cdc(&[
            "--jobs",
            jobs,
            "verify",
            "--file",
            p(&f),
            "--mode",
            "sample",
            "--pairs",
            "50000",
            "--seed",
            "11",
        ]))
    };
    let one = run("1");
    assert_eq!(one, run("4"));
    assert!(one.contains("\"seed\":11"));
}

#[test]
fn verify_detects_violation() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("m.cdc");
    cdc(&[
        "export",
        "--object",
        "lifted-mrd",
        "--q",
        "2",
        "--n",
        "6",
        "--k",
        "3",
        "--d",
        "4",
        "--out",
        p(&f),
    ]);
    // claim a distance the code does not have
    let text = fs::read_to_string(&f).unwrap().replace("#D=4", "#D=6");
    fs::write(&f, text).unwrap();
    let o = cdc(&["verify", "--file", p(&f), "--mode", "full"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("\"min_distance_found\":4"));
}

#[test]
fn verify_parse_errors_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("m.cdc");
    cdc(&[
        "export",
        "--object",
        "lifted-mrd",
        "--q",
        "2",
        "--n",
        "6",
        "--k",
        "3",
        "--d",
        "4",
        "--out",
        p(&f),
    ]);
    let good = fs::read_to_string(&f).unwrap();
    let last = good.lines().last().unwrap().to_string();
    fs::write(&f, good.replace(&last, "101|01x|111")).unwrap();
    assert_eq!(code(&cdc(&["verify", "--file", p(&f)])), 3);
    assert_eq!(
        code(&cdc(&[
            "verify",
            "--file",
            p(&dir.path().join("missing.cdc"))
        ])),
        3
    );
    assert_eq!(
        code(&cdc_stdin(&["verify", "--file", "-"], b"not a code\n")),
        3
    );
}

#[test]
fn verify_full_cap_exceeded_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("c.cdc");
    cdc(&["construct", "--recipe", "8_4_4", "--q", "2", "--out", p(&f)]);
    assert_eq!(
        code(&cdc(&[
            "verify",
            "--file",
            p(&f),
            "--mode",
            "full",
            "--cap",
            "100"
        ])),
        4
    );
}

#[test]
fn bound_table_and_csv() {
    let o = cdc(&["bound", "--q", "2", "--n", "6", "--d", "4", "--k", "3"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    for needle in [
        "exact      exact  77",
        "johnson    upper  81",
        "singleton  upper  93",
    ] {
        assert!(s.contains(needle), "{s}");
    }
    let o = cdc(&[
        "bound", "--q", "2", "--n", "6", "--d", "4", "--k", "3", "--csv",
    ]);
    let s = stdout(&o);
    let mut lines = s.lines();
    assert_eq!(lines.next(), Some("source,kind,value,derivation"));
    let rows: Vec<&str> = lines.collect();
    assert!(rows.iter().any(|r| r.starts_with("exact,Exact,77,")));
    assert!(rows.iter().any(|r| r.starts_with("johnson,Upper,81,")));
    assert!(rows.iter().any(|r| r.starts_with("singleton,Upper,93,")));
    assert_eq!(
        code(&cdc(&[
            "bound", "--q", "6", "--n", "6", "--d", "4", "--k", "3"
        ])),
        4
    );
}

#[test]
fn formula_values() {
    let f = |args: &[&str]| {
        let o = cdc(args);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        stdout(&o).trim().to_string()
    };
    assert_eq!(
        f(&["formula", "--name", "A_q(12,6;6)", "--q", "2"]),
        "16865629"
    );
    assert_eq!(
        f(&["formula", "--name", "A_2(12,4;4)_cor", "--q", "2"]),
        "19673822"
    );
    assert_eq!(
        f(&["formula", "--name", "A_2(12,4;4)", "--q", "2"]),
        "19676797"
    );
    assert_eq!(f(&["formula", "--name", "12_8_6", "--q", "2"]), "262165");
    assert!(f(&["formula", "--name", "list"]).lines().count() >= 10);
    assert_eq!(
        code(&cdc(&["formula", "--name", "A_q(1,1;1)", "--q", "2"])),
        2
    );
    assert_eq!(
        code(&cdc(&["formula", "--name", "A_q(4k,2k;2k)", "--q", "2"])),
        4
    );
}

#[test]
fn import_with_subcode_summary() {
    let dir = tempfile::tempdir().unwrap();
    let big = dir.path().join("big.cdc");
    let sub = dir.path().join("sub.cdc");
    cdc(&[
        "construct",
        "--recipe",
        "8_4_4",
        "--q",
        "2",
        "--out",
        p(&big),
    ]);
    let text = fs::read_to_string(&big).unwrap();
    // a one-codeword subcode has no pairs, so it may claim distance 2k
    let header: Vec<&str> = text.lines().filter(|l| l.starts_with('#')).collect();
    let rows: Vec<&str> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .take(1)
        .collect();
    let mut sub_text: String = header
        .iter()
        .map(|h| match *h {
            "#D=4" => "#D=8".to_string(),
            "#COUNT=4797" => "#COUNT=1".to_string(),
            _ => h.to_string(),
        })
        .collect::<Vec<_>>()
        .join("\n");
    sub_text.push('\n');
    sub_text.push_str(&rows.join("\n"));
    sub_text.push('\n');
    fs::write(&sub, sub_text).unwrap();

    let o = cdc(&["import", "--file", p(&big), "--subcode", p(&sub)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let s = stdout(&o);
    assert!(s.contains("count=4797"));
    assert!(s.contains("subcode: count=1 d=8"), "{s}");

    let o = cdc(&["import", "--file", p(&sub), "--subcode", p(&big)]);
    assert_eq!(code(&o), 4);
}

#[test]
fn export_objects() {
    let o = cdc(&[
        "export",
        "--object",
        "lifted-mrd",
        "--q",
        "2",
        "--n",
        "6",
        "--k",
        "3",
        "--d",
        "4",
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        stdout(&o).lines().filter(|l| !l.starts_with('#')).count(),
        64
    );
    let o = cdc(&["export", "--object", "parallelism", "--q", "2"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).matches("#FAMILY=").count(), 7);
    assert_eq!(
        code(&cdc(&[
            "export", "--object", "spread", "--q", "2", "--n", "8"
        ])),
        2
    );
    assert_eq!(
        code(&cdc(&[
            "export", "--object", "spread", "--q", "2", "--n", "7", "--k", "3"
        ])),
        4
    );
}

#[test]
fn oracles() {
    let o = cdc(&[
        "oracle",
        "rank-histogram",
        "--q",
        "2",
        "--m",
        "4",
        "--n",
        "4",
        "--d",
        "3",
    ]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("rank 3: 225 expected 225"));
    let o = cdc(&["oracle", "enumerate", "--q", "2", "--n", "5", "--k", "2"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("enumerated 155 expected 155"));
    assert_eq!(code(&cdc(&["oracle", "parallelism", "--q", "2"])), 0);

    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("s.cdc");
    cdc(&[
        "export",
        "--object",
        "spread",
        "--q",
        "2",
        "--n",
        "8",
        "--k",
        "4",
        "--out",
        p(&f),
    ]);
    let o = cdc(&["oracle", "coverage", "--file", p(&f)]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("universe 255 once 255"));

    // drop one spread element
    let text = fs::read_to_string(&f).unwrap();
    let last = text.lines().last().unwrap();
    let cut = text
        .replace(&format!("{last}\n"), "")
        .replace("#COUNT=17", "#COUNT=16");
    fs::write(&f, cut).unwrap();
    let o = cdc(&["oracle", "coverage", "--file", p(&f)]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("uncovered 15"));
}
