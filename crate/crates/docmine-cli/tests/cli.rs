//! End-to-end checks of the `docmine` binary.

use std::fs;
use std::path::Path;
use std::process::Command;

fn docmine() -> Command {
    Command::new(env!("CARGO_BIN_EXE_docmine"))
}

/// One tiny repository plus a matching dump, self-contained in `dir`.
fn write_fixture(dir: &Path) {
    let repo = dir.join("repo");
    fs::create_dir_all(repo.join("src")).unwrap();
    fs::write(
        repo.join("README.md"),
        "Install the project, run the build and follow the setup instructions for every release branch.",
    )
    .unwrap();
    fs::write(
        repo.join("LICENSE"),
        "MIT license: copyright and permission notice, legal terms of the grant.",
    )
    .unwrap();
    fs::write(
        repo.join("src/main.py"),
        "\"\"\"Api module: one method per endpoint call.\"\"\"\n# Fix the crash when the request parameter is broken.\nx = 1\n",
    )
    .unwrap();

    let dump = dir.join("dumps/demo");
    fs::create_dir_all(&dump).unwrap();
    fs::write(
        dump.join("issues.jsonl"),
        r#"{"id": 1, "created_at": "2020-05-01T00:00:00Z", "title": "Crash on save", "body": "The error leaves a broken file and the bug needs a fix.", "comments": ["Crash confirmed."]}"#,
    )
    .unwrap();
    fs::write(
        dump.join("pulls.jsonl"),
        r#"{"id": 2, "created_at": "2020-06-01T00:00:00Z", "title": "Fix the crash", "body": "Repairs the error and the broken fault.", "comments": []}"#,
    )
    .unwrap();
    fs::write(
        dump.join("commits.jsonl"),
        r#"{"id": "c1", "created_at": "2020-07-01T00:00:00Z", "message": "Release: install and setup per version branch", "comments": []}"#,
    )
    .unwrap();

    fs::write(
        dir.join("repos.txt"),
        format!("demo {} python\n", repo.display()),
    )
    .unwrap();
}

#[test]
fn run_subcommand_produces_reports() {
    let tmp = tempfile::tempdir().unwrap();
    write_fixture(tmp.path());
    let out = tmp.path().join("out");
    let status = docmine()
        .args(["run", "--repos"])
        .arg(tmp.path().join("repos.txt"))
        .args(["--artifacts", "dump", "--dump-dir"])
        .arg(tmp.path().join("dumps"))
        .args([
            "--anchor-date",
            "2021-01-01",
            "--k-mode",
            "pinned",
            "--k-comments",
            "2",
            "--k-textual",
            "2",
            "--k-commits",
            "2",
            "--k-issues",
            "2",
            "--k-pulls",
            "2",
            "--alpha",
            "0.5",
            "--iterations",
            "40",
            "--burn-in",
            "5",
            "--seed",
            "1",
        ])
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    for file in ["report.json", "rq3.csv", "rq4.csv", "fig_commits.csv"] {
        assert!(out.join(file).exists(), "{file} missing");
    }
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["provenance"]["provider"], "dump");
    assert_eq!(report["provenance"]["global_seed"], 1);
}

#[test]
fn scan_subcommand_prints_snapshot_json() {
    let tmp = tempfile::tempdir().unwrap();
    write_fixture(tmp.path());
    let output = docmine()
        .arg("scan")
        .arg(tmp.path().join("repo"))
        .args([
            "--repo-id",
            "demo",
            "--language",
            "python",
            "--pull-requests",
            "3",
        ])
        .output()
        .unwrap();
    assert!(output.status.success());
    let snapshot: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(snapshot["repo_id"], "demo");
    assert_eq!(snapshot["pull_request_count"], 3);
    let files = snapshot["files"].as_array().unwrap();
    assert_eq!(files.len(), 3);
    assert!(files
        .iter()
        .any(|f| f["relative_path"] == "src/main.py" && f["category"] == "source_code"));
}

#[test]
fn failures_emit_machine_readable_error_json() {
    let tmp = tempfile::tempdir().unwrap();
    let output = docmine()
        .args([
            "run",
            "--repos",
            "/no/such/file",
            "--artifacts",
            "dump",
            "--dump-dir",
        ])
        .arg(tmp.path())
        .args(["--out"])
        .arg(tmp.path().join("out"))
        .output()
        .unwrap();
    assert!(!output.status.success());
    let err: serde_json::Value = serde_json::from_slice(&output.stderr).unwrap();
    assert!(err["error"].as_str().unwrap().contains("does not exist"));
}

#[test]
fn dump_mode_requires_dump_dir() {
    let tmp = tempfile::tempdir().unwrap();
    write_fixture(tmp.path());
    let output = docmine()
        .args(["run", "--repos"])
        .arg(tmp.path().join("repos.txt"))
        .args(["--artifacts", "dump", "--out"])
        .arg(tmp.path().join("out"))
        .output()
        .unwrap();
    assert!(!output.status.success());
    let err: serde_json::Value = serde_json::from_slice(&output.stderr).unwrap();
    assert!(err["error"].as_str().unwrap().contains("--dump-dir"));
}
