use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_additive-designs"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn generate(dir: &Path) -> String {
    let out = run(&["generate", "--out-dir", path(dir)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    fs::read_to_string(dir.join("design.json")).unwrap()
}

fn json_at(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

/// Rewrites the block list of a design file, keeping its header.
fn edit_blocks(text: &str, f: impl FnOnce(&mut Vec<&str>)) -> String {
    let mut lines: Vec<&str> = text.lines().collect();
    let start = lines.iter().position(|l| l.contains("\"blocks\"")).unwrap() + 1;
    let end = lines.iter().rposition(|l| l.trim() == "]").unwrap();
    let mut blocks: Vec<&str> = lines[start..end]
        .iter()
        .map(|l| l.trim_end_matches(','))
        .collect();
    f(&mut blocks);
    let body: Vec<String> = blocks
        .iter()
        .enumerate()
        .map(|(i, b)| {
            if i + 1 < blocks.len() {
                format!("{b},")
            } else {
                b.to_string()
            }
        })
        .collect();
    lines.splice(start..end, body.iter().map(String::as_str));
    lines.join("\n") + "\n"
}

#[test]
fn generate_is_byte_stable_and_records_verdicts() {
    let tmp = TempDir::new().unwrap();
    let a = generate(&tmp.path().join("a"));
    let b = generate(&tmp.path().join("b"));
    assert_eq!(a, b);
    assert_eq!(
        a.lines()
            .filter(|l| l.trim_start().starts_with("[["))
            .count(),
        432
    );
    let m = json_at(&tmp.path().join("a/manifest.json"));
    assert_eq!(m["verdicts"]["simple"], true);
    assert_eq!(m["verdicts"]["additive"], true);
    assert_eq!(m["verdicts"]["coverage"]["histogram"]["2"], 3240);
    assert_eq!(m["passed"], true);
}

#[test]
fn generated_file_verifies_on_its_own() {
    let tmp = TempDir::new().unwrap();
    generate(tmp.path());
    let design = tmp.path().join("design.json");
    let out = run(&["verify", path(&design), "--t", "2", "--lambda", "2"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("verdict      PASS"));
    let m = json_at(&tmp.path().join("design.json.verify.manifest.json"));
    assert_eq!(m["passed"], true);
}

#[test]
fn deleted_block_breaks_balance() {
    let tmp = TempDir::new().unwrap();
    let text = generate(tmp.path());
    let broken = tmp.path().join("broken.json");
    fs::write(
        &broken,
        edit_blocks(&text, |b| {
            b.remove(0);
        }),
    )
    .unwrap();
    let out = run(&["verify", path(&broken)]);
    assert_eq!(code(&out), 1);
    let text = stdout(&out);
    assert!(
        text.contains("coverage     t=2 lambda=2: histogram {1: 15, 2: 3225}  FAIL"),
        "{text}"
    );
    assert!(text.contains("covered 1 times"));

    let out = run(&["--format", "structured", "verify", path(&broken)]);
    let m: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(
        m["verdicts"]["coverage"]["offending"]
            .as_array()
            .unwrap()
            .len(),
        15
    );
    assert_eq!(m["passed"], false);
}

#[test]
fn duplicated_block_reports_multiplicity() {
    let tmp = TempDir::new().unwrap();
    let text = generate(tmp.path());
    let doubled = tmp.path().join("doubled.json");
    fs::write(&doubled, edit_blocks(&text, |b| b.push(b[7]))).unwrap();
    let out = run(&["--format", "structured", "verify", path(&doubled)]);
    assert_eq!(code(&out), 1);
    let m: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let rep = &m["verdicts"]["simplicity"]["repeated"];
    assert_eq!(rep.as_array().unwrap().len(), 1);
    assert_eq!(rep[0]["multiplicity"], 2);
    assert!(stdout(&run(&["verify", path(&doubled)])).contains("occurs 2 times"));
}

#[test]
fn malformed_input_exits_2_with_location() {
    let tmp = TempDir::new().unwrap();
    let bad = tmp.path().join("bad.json");
    fs::write(
        &bad,
        "{\n  \"p\": 3,\n  \"n\": 4,\n  \"v\": 81\n  \"k\": 6\n}\n",
    )
    .unwrap();
    let out = run(&["verify", path(&bad)]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 5"));

    fs::write(
        &bad,
        "{\"p\":3,\"n\":4,\"v\":81,\"k\":2,\"lambda\":1,\"blocks\":[[[0,0,0,0],[0,0,0,3]]]}",
    )
    .unwrap();
    let out = run(&["stats", path(&bad)]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("block 0, point 1"));
}

#[test]
fn stats_on_generated_and_empty_designs() {
    let tmp = TempDir::new().unwrap();
    generate(tmp.path());
    let out = run(&["stats", path(&tmp.path().join("design.json"))]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("b            432"));
    assert!(text.contains("replication  min 32 max 32"));

    let empty = tmp.path().join("empty.json");
    fs::write(
        &empty,
        "{\"p\":3,\"n\":2,\"v\":9,\"k\":3,\"lambda\":0,\"blocks\":[]}",
    )
    .unwrap();
    let out = run(&["--format", "structured", "stats", path(&empty)]);
    assert_eq!(code(&out), 0);
    let m: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(m["verdicts"]["b"], 0);
    assert_eq!(m["verdicts"]["replication"]["max"], 0);
    assert_eq!(m["verdicts"]["pair_histogram"]["0"], 36);
}

#[test]
fn ag2_builds_and_rejects() {
    let tmp = TempDir::new().unwrap();
    let out = run(&[
        "--format",
        "structured",
        "ag2",
        "--q",
        "5",
        "--out-dir",
        path(tmp.path()),
    ]);
    assert_eq!(code(&out), 0);
    let m: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(m["verdicts"]["blocks"], 60);
    assert_eq!(m["verdicts"]["lambda"], 9);
    assert_eq!(
        m["verdicts"]["intersection_profile"],
        serde_json::json!([0, 4, 5])
    );
    assert!(tmp.path().join("ag2-q5.json").exists());

    let out = run(&["ag2", "--q", "4", "--out-dir", path(tmp.path())]);
    assert_eq!(code(&out), 2);

    // every block is the whole plane
    let out = run(&[
        "--format",
        "structured",
        "ag2",
        "--q",
        "2",
        "--out-dir",
        path(tmp.path()),
    ]);
    let m: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(m["verdicts"]["simplicity"]["simple"], false);
    assert_eq!(
        m["verdicts"]["simplicity"]["repeated"][0]["multiplicity"],
        3
    );
}

#[test]
fn search_config_errors_exit_2() {
    let tmp = TempDir::new().unwrap();
    let dir = path(tmp.path());
    assert_eq!(code(&run(&["search", "--limit", "0", "--out-dir", dir])), 2);
    assert_eq!(
        code(&run(&["search", "--workers", "0", "--out-dir", dir])),
        2
    );
    assert_eq!(
        code(&run(&["search", "--family-size", "15", "--out-dir", dir])),
        2
    );
    assert_eq!(
        code(&run(&["search", "--target", "5", "--out-dir", dir])),
        2
    );
    assert_eq!(
        code(&run(&["search", "--limit", "some", "--out-dir", dir])),
        2
    );
}

#[test]
fn search_budget_exhaustion_exits_3() {
    let tmp = TempDir::new().unwrap();
    let out = run(&["search", "--budget", "0.05", "--out-dir", path(tmp.path())]);
    assert_eq!(code(&out), 3);
    let m = json_at(&tmp.path().join("manifest.json"));
    assert_eq!(m["verdicts"]["complete"], false);
    assert_eq!(m["verdicts"]["termination"], "budget_exhausted");
}

#[test]
fn search_workers_agree_on_first_solution() {
    let tmp = TempDir::new().unwrap();
    let mut families = Vec::new();
    for w in ["1", "4"] {
        let dir = tmp.path().join(w);
        let out = run(&["search", "--workers", w, "--out-dir", path(&dir)]);
        assert_eq!(code(&out), 0);
        let m = json_at(&dir.join("manifest.json"));
        assert_eq!(m["verdicts"]["complete"], true);
        assert_eq!(m["verdicts"]["families"][0]["passed"], true);
        families.push(fs::read_to_string(dir.join("family-0001.json")).unwrap());
        // the written design verifies independently
        let v = run(&["verify", path(&dir.join("design-0001.json"))]);
        assert_eq!(code(&v), 0);
    }
    assert_eq!(families[0], families[1]);
}
