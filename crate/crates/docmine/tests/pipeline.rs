//! Integration tests for the run orchestration: eligibility filtering,
//! pinned topic counts, fault isolation and failure containment.

use std::fs;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;

use docmine::classify::TypeDistribution;
use docmine::lda::{LdaModel, LdaParams};
use docmine::pipeline::{run, KMode, ProviderChoice, RunConfig};
use docmine::types::Source;

fn fixtures() -> PathBuf {
    PathBuf::from("tests/fixtures")
}

fn fixture_config(out: &Path) -> RunConfig {
    let mut config = RunConfig::new(
        fixtures().join("repos.txt"),
        ProviderChoice::Dump {
            dir: fixtures().join("dumps"),
        },
        out,
    );
    config.anchor_date = NaiveDate::from_ymd_opt(2021, 1, 1).unwrap();
    config.k_mode = KMode::Pinned {
        commits: 4,
        issues: 5,
        pulls: 4,
        comments: Some(4),
        textual: Some(4),
    };
    config.lda = LdaParams {
        alpha: Some(0.5),
        beta: 0.01,
        iterations: 60,
        burn_in: 10,
        average_samples: false,
    };
    config.seed = 7;
    config.jobs = 2;
    config
}

#[test]
fn forked_repo_is_listed_with_reason() {
    let out = tempfile::tempdir().unwrap();
    let report = run(&fixture_config(out.path())).unwrap();
    assert_eq!(report.excluded.len(), 1);
    assert_eq!(report.excluded[0].repo_id, "forked");
    assert_eq!(report.excluded[0].reason, "excluded: fork");
    assert!(report.per_repo.iter().all(|d| d.repo_id != "forked"));
}

#[test]
fn pinned_k_values_are_used_per_source() {
    let out = tempfile::tempdir().unwrap();
    let models_dir = out.path().join("models");
    let mut config = fixture_config(out.path());
    config.save_models = Some(models_dir.clone());
    run(&config).unwrap();

    let expectations = [
        (Source::Commits, 4),
        (Source::Issues, 5),
        (Source::PullRequests, 4),
        (Source::SourceCodeComments, 4),
        (Source::TextualDocs, 4),
    ];
    for repo in ["alpha", "beta", "gamma"] {
        for (source, k) in expectations {
            let model =
                LdaModel::read_json(&models_dir.join(format!("{repo}__{source}.json"))).unwrap();
            assert_eq!(model.k, k, "{repo}/{source}");
        }
    }
}

fn repo_dists(report: &docmine::report::RunReport, repo: &str) -> Vec<TypeDistribution> {
    report
        .per_repo
        .iter()
        .filter(|d| d.repo_id == repo)
        .cloned()
        .collect()
}

#[test]
fn injected_fault_does_not_alter_other_repos() {
    let out_clean = tempfile::tempdir().unwrap();
    let clean = run(&fixture_config(out_clean.path())).unwrap();

    let out_faulty = tempfile::tempdir().unwrap();
    let mut faulty_config = fixture_config(out_faulty.path());
    faulty_config.fault_repo = Some("beta".to_string());
    let faulty = run(&faulty_config).unwrap();

    assert!(faulty
        .excluded
        .iter()
        .any(|e| e.repo_id == "beta" && e.reason.starts_with("failed:")));
    assert!(faulty.per_repo.iter().all(|d| d.repo_id != "beta"));
    for repo in ["alpha", "gamma"] {
        assert_eq!(
            repo_dists(&clean, repo),
            repo_dists(&faulty, repo),
            "{repo} numbers changed when another repo crashed"
        );
    }
}

#[test]
fn broken_checkout_is_contained_as_a_failure() {
    let tmp = tempfile::tempdir().unwrap();
    let repos = tmp.path().join("repos.txt");
    fs::write(
        &repos,
        "alpha tests/fixtures/repos/alpha cpp\nghost /definitely/not/a/path python\n",
    )
    .unwrap();
    let out = tempfile::tempdir().unwrap();
    let mut config = fixture_config(out.path());
    config.repos_file = repos;
    let report = run(&config).unwrap();
    assert!(report
        .excluded
        .iter()
        .any(|e| e.repo_id == "ghost" && e.reason.starts_with("failed:")));
    assert!(report.per_repo.iter().any(|d| d.repo_id == "alpha"));
}

#[test]
fn zero_eligible_repos_is_an_error() {
    let tmp = tempfile::tempdir().unwrap();
    let repos = tmp.path().join("repos.txt");
    fs::write(&repos, "forked tests/fixtures/repos/forked cpp\n").unwrap();
    let out = tempfile::tempdir().unwrap();
    let mut config = fixture_config(out.path());
    config.repos_file = repos;
    assert!(matches!(run(&config), Err(docmine::Error::NoEligibleRepos)));

    let empty = tmp.path().join("empty.txt");
    fs::write(&empty, "# nothing here\n").unwrap();
    let mut config = fixture_config(out.path());
    config.repos_file = empty;
    assert!(matches!(run(&config), Err(docmine::Error::NoEligibleRepos)));
}

#[test]
fn validation_rejects_missing_paths() {
    let out = tempfile::tempdir().unwrap();
    let mut config = fixture_config(out.path());
    config.repos_file = PathBuf::from("/no/such/list.txt");
    assert!(matches!(
        run(&config),
        Err(docmine::Error::InvalidConfig(_))
    ));

    let mut config = fixture_config(out.path());
    config.lexicon_path = Some(PathBuf::from("/no/such/lexicon.json"));
    assert!(matches!(
        run(&config),
        Err(docmine::Error::InvalidConfig(_))
    ));
}

#[test]
fn docstring_flag_changes_comment_mass() {
    let out_on = tempfile::tempdir().unwrap();
    let report_on = run(&fixture_config(out_on.path())).unwrap();

    let out_off = tempfile::tempdir().unwrap();
    let mut config = fixture_config(out_off.path());
    config.include_docstrings = false;
    let report_off = run(&config).unwrap();

    // gamma's comment corpus is docstring-heavy; its comment share of
    // total information must shrink when docstrings are excluded.
    let share_on = report_on.overall_source_share[&Source::SourceCodeComments];
    let share_off = report_off.overall_source_share[&Source::SourceCodeComments];
    assert!(
        share_off < share_on,
        "expected comment share to drop without docstrings ({share_off} vs {share_on})"
    );
}
