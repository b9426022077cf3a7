//! Result aggregation and report emission.
//!
//! Turns per-repository type distributions into the two result views:
//! documentation-type distribution per source (per language and overall)
//! and per-type source contributions, then writes `report.json` plus
//! CSV plot data with a pinned 4-decimal format so runs are
//! byte-reproducible.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::classify::{DocType, TypeDistribution};
use crate::error::{Error, Result};
use crate::types::{Language, Source};

pub type LanguageAverages = BTreeMap<Language, BTreeMap<Source, BTreeMap<DocType, f64>>>;

/// Token mass per (repository, source): the "amount of information"
/// weight used for source contributions.
pub type SourceMasses = BTreeMap<(String, Source), u64>;

/// Per-type source contributions; each row sums to 100 unless the type
/// has no mass anywhere (then it is all-zero and listed in
/// `zero_mass_types`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContributionMatrix {
    pub values: BTreeMap<DocType, BTreeMap<Source, f64>>,
    pub zero_mass_types: Vec<DocType>,
}

/// Average type percentages per language and source. Empty-flagged
/// distributions are excluded; with `weight_by_mass` the mean weights
/// each repository by its source token mass instead of equally.
pub fn aggregate_by_language(
    dists: &[TypeDistribution],
    repo_langs: &BTreeMap<String, Language>,
    masses: &SourceMasses,
    weight_by_mass: bool,
) -> LanguageAverages {
    let mut sums: BTreeMap<(Language, Source, DocType), f64> = BTreeMap::new();
    let mut weights: BTreeMap<(Language, Source), f64> = BTreeMap::new();
    for dist in dists {
        if dist.empty {
            continue;
        }
        let Some(&language) = repo_langs.get(&dist.repo_id) else {
            continue;
        };
        let weight = if weight_by_mass {
            masses
                .get(&(dist.repo_id.clone(), dist.source))
                .copied()
                .unwrap_or(0) as f64
        } else {
            1.0
        };
        if weight == 0.0 {
            continue;
        }
        *weights.entry((language, dist.source)).or_default() += weight;
        for (doc_type, pct) in &dist.percentages {
            *sums.entry((language, dist.source, *doc_type)).or_default() += pct * weight;
        }
    }

    let mut out: LanguageAverages = BTreeMap::new();
    for language in repo_langs
        .values()
        .copied()
        .collect::<std::collections::BTreeSet<_>>()
    {
        let per_source = out.entry(language).or_default();
        for source in Source::ALL {
            let per_type = per_source.entry(source).or_default();
            let weight = weights.get(&(language, source)).copied().unwrap_or(0.0);
            for doc_type in DocType::ALL {
                let value = if weight > 0.0 {
                    sums.get(&(language, source, doc_type))
                        .copied()
                        .unwrap_or(0.0)
                        / weight
                } else {
                    0.0
                };
                per_type.insert(doc_type, value);
            }
        }
    }
    out
}

/// Absolute information mass per (type, source):
/// sum over repositories of percentage x source token mass / 100.
fn type_source_masses(
    dists: &[TypeDistribution],
    masses: &SourceMasses,
) -> BTreeMap<(DocType, Source), f64> {
    let mut out: BTreeMap<(DocType, Source), f64> = BTreeMap::new();
    for doc_type in DocType::ALL {
        for source in Source::ALL {
            out.insert((doc_type, source), 0.0);
        }
    }
    for dist in dists {
        if dist.empty {
            continue;
        }
        let mass = masses
            .get(&(dist.repo_id.clone(), dist.source))
            .copied()
            .unwrap_or(0) as f64;
        for (doc_type, pct) in &dist.percentages {
            *out.get_mut(&(*doc_type, dist.source)).unwrap() += pct * mass / 100.0;
        }
    }
    out
}

/// Per-type source contributions: each cell is the share of the type's
/// total mass carried by that source.
pub fn source_contribution(
    dists: &[TypeDistribution],
    masses: &SourceMasses,
) -> ContributionMatrix {
    let cell_masses = type_source_masses(dists, masses);
    let mut values: BTreeMap<DocType, BTreeMap<Source, f64>> = BTreeMap::new();
    let mut zero_mass_types = Vec::new();
    for doc_type in DocType::ALL {
        let row_total: f64 = Source::ALL
            .iter()
            .map(|s| cell_masses[&(doc_type, *s)])
            .sum();
        let row = values.entry(doc_type).or_default();
        if row_total > 0.0 {
            for source in Source::ALL {
                row.insert(source, 100.0 * cell_masses[&(doc_type, source)] / row_total);
            }
        } else {
            zero_mass_types.push(doc_type);
            for source in Source::ALL {
                row.insert(source, 0.0);
            }
        }
    }
    ContributionMatrix {
        values,
        zero_mass_types,
    }
}

/// Share of total extracted information per documentation type.
pub fn overall_type_share(
    dists: &[TypeDistribution],
    masses: &SourceMasses,
) -> BTreeMap<DocType, f64> {
    let cell_masses = type_source_masses(dists, masses);
    let total: f64 = cell_masses.values().sum();
    DocType::ALL
        .iter()
        .map(|doc_type| {
            let type_mass: f64 = Source::ALL
                .iter()
                .map(|s| cell_masses[&(*doc_type, *s)])
                .sum();
            let share = if total > 0.0 {
                100.0 * type_mass / total
            } else {
                0.0
            };
            (*doc_type, share)
        })
        .collect()
}

/// Share of total extracted information per source.
pub fn overall_source_share(masses: &SourceMasses) -> BTreeMap<Source, f64> {
    let mut per_source: BTreeMap<Source, u64> = Source::ALL.iter().map(|s| (*s, 0)).collect();
    for ((_, source), mass) in masses {
        *per_source.get_mut(source).unwrap() += mass;
    }
    let total: u64 = per_source.values().sum();
    per_source
        .into_iter()
        .map(|(source, mass)| {
            let share = if total > 0 {
                100.0 * mass as f64 / total as f64
            } else {
                0.0
            };
            (source, share)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcludedRepo {
    pub repo_id: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepoFlag {
    pub repo_id: String,
    pub notes: Vec<String>,
}

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub anchor_date: NaiveDate,
    pub span_years: u32,
    pub provider: String,
    pub lexicon_name: String,
    pub lexicon_sha256: String,
    pub global_seed: u64,
    pub k_mode: String,
    pub similarity_metric: String,
    pub tie_eps: f64,
    pub min_df: u32,
    pub docstrings_included: bool,
    pub stemming: bool,
    pub hidden_files: String,
    pub notes: Vec<String>,
}

/// Headline numbers from the original 950-repository study, embedded
/// for side-by-side display only; never asserted, since they derive
/// from a corpus this tool cannot reproduce.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceValues {
    pub overall_type_share: BTreeMap<DocType, f64>,
    pub overall_source_share: BTreeMap<Source, f64>,
    pub note: String,
}

impl Default for ReferenceValues {
    fn default() -> Self {
        ReferenceValues {
            overall_type_share: BTreeMap::from([
                (DocType::ErrorRelated, 25.9),
                (DocType::ProjectRelated, 23.6),
                (DocType::FileRelated, 16.04),
                (DocType::LicenseRelated, 15.99),
                (DocType::ApiRelated, 5.63),
                (DocType::Others, 12.75),
            ]),
            overall_source_share: BTreeMap::from([
                (Source::SourceCodeComments, 23.04),
                (Source::TextualDocs, 22.58),
                (Source::Commits, 18.5),
                (Source::PullRequests, 18.21),
                (Source::Issues, 17.63),
            ]),
            note: "Reference values from the original 950-repository study; \
                   its discussion attributes both 18.21% and 17.63% to issues, \
                   while its abstract assigns 18.21% to pull requests. These \
                   annotations follow the abstract."
                .to_string(),
        }
    }
}

/// Full machine-readable result of one pipeline run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub provenance: Provenance,
    pub per_repo: Vec<TypeDistribution>,
    pub per_language_avg: LanguageAverages,
    pub contribution: ContributionMatrix,
    pub overall_type_share: BTreeMap<DocType, f64>,
    pub overall_source_share: BTreeMap<Source, f64>,
    pub excluded: Vec<ExcludedRepo>,
    pub flagged: Vec<RepoFlag>,
    pub reference_values: ReferenceValues,
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Write `report.json`, `rq3.csv`, `rq4.csv` and one `fig_<source>.csv`
/// per source into `out_dir`; returns the written paths.
pub fn emit_reports(report: &RunReport, out_dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut written = Vec::new();

    let json_path = out_dir.join("report.json");
    let mut json = serde_json::to_string_pretty(report).map_err(|e| Error::json("report", e))?;
    json.push('\n');
    write_file(&json_path, &json)?;
    written.push(json_path);

    let rq3_path = out_dir.join("rq3.csv");
    let mut rq3 = String::from("language,source,type,pct\n");
    for (language, per_source) in &report.per_language_avg {
        for (source, per_type) in per_source {
            for (doc_type, pct) in per_type {
                let _ = writeln!(rq3, "{language},{source},{doc_type},{pct:.4}");
            }
        }
    }
    write_file(&rq3_path, &rq3)?;
    written.push(rq3_path);

    let rq4_path = out_dir.join("rq4.csv");
    let mut rq4 = String::from("type,source,pct\n");
    for (doc_type, per_source) in &report.contribution.values {
        for (source, pct) in per_source {
            let _ = writeln!(rq4, "{doc_type},{source},{pct:.4}");
        }
    }
    write_file(&rq4_path, &rq4)?;
    written.push(rq4_path);

    for source in Source::ALL {
        let fig_path = out_dir.join(format!("fig_{source}.csv"));
        let mut fig = String::from("language,type,pct\n");
        for (language, per_source) in &report.per_language_avg {
            if let Some(per_type) = per_source.get(&source) {
                for (doc_type, pct) in per_type {
                    let _ = writeln!(fig, "{language},{doc_type},{pct:.4}");
                }
            }
        }
        write_file(&fig_path, &fig)?;
        written.push(fig_path);
    }

    Ok(written)
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn dist(repo: &str, source: Source, pcts: [f64; 6]) -> TypeDistribution {
        TypeDistribution {
            source,
            repo_id: repo.to_string(),
            percentages: DocType::ALL.iter().copied().zip(pcts).collect(),
            empty: false,
        }
    }

    fn error_heavy(repo: &str, source: Source, error_pct: f64) -> TypeDistribution {
        dist(
            repo,
            source,
            [0.0, 0.0, 0.0, 0.0, error_pct, 100.0 - error_pct],
        )
    }

    #[test]
    fn language_average_is_the_arithmetic_mean() {
        let dists = vec![
            error_heavy("a", Source::Issues, 20.0),
            error_heavy("b", Source::Issues, 40.0),
        ];
        let langs = BTreeMap::from([
            ("a".to_string(), Language::Java),
            ("b".to_string(), Language::Java),
        ]);
        let avg = aggregate_by_language(&dists, &langs, &BTreeMap::new(), false);
        let cell = &avg[&Language::Java][&Source::Issues];
        assert!((cell[&DocType::ErrorRelated] - 30.0).abs() < 1e-12);
    }

    #[test]
    fn single_repo_average_equals_the_repo() {
        let dists = vec![error_heavy("a", Source::Commits, 55.0)];
        let langs = BTreeMap::from([("a".to_string(), Language::Cpp)]);
        let avg = aggregate_by_language(&dists, &langs, &BTreeMap::new(), false);
        assert!(
            (avg[&Language::Cpp][&Source::Commits][&DocType::ErrorRelated] - 55.0).abs() < 1e-12
        );
    }

    #[test]
    fn six_repo_two_language_means_match_hand_computation() {
        // Java repos a, b, c: issues error = 10, 20, 60 -> mean 30.
        // Python repos d, e, f: issues error = 50, 50, 80 -> mean 60.
        let dists = vec![
            error_heavy("a", Source::Issues, 10.0),
            error_heavy("b", Source::Issues, 20.0),
            error_heavy("c", Source::Issues, 60.0),
            error_heavy("d", Source::Issues, 50.0),
            error_heavy("e", Source::Issues, 50.0),
            error_heavy("f", Source::Issues, 80.0),
        ];
        let langs: BTreeMap<String, Language> = [
            ("a", Language::Java),
            ("b", Language::Java),
            ("c", Language::Java),
            ("d", Language::Python),
            ("e", Language::Python),
            ("f", Language::Python),
        ]
        .iter()
        .map(|(r, l)| (r.to_string(), *l))
        .collect();
        let avg = aggregate_by_language(&dists, &langs, &BTreeMap::new(), false);
        assert!(
            (avg[&Language::Java][&Source::Issues][&DocType::ErrorRelated] - 30.0).abs() < 1e-9
        );
        assert!(
            (avg[&Language::Python][&Source::Issues][&DocType::ErrorRelated] - 60.0).abs() < 1e-9
        );
        assert!((avg[&Language::Java][&Source::Issues][&DocType::Others] - 70.0).abs() < 1e-9);
    }

    #[test]
    fn empty_distributions_are_excluded_from_means() {
        let mut empty = TypeDistribution::empty_for(Source::Issues, "b");
        empty.empty = true;
        let dists = vec![error_heavy("a", Source::Issues, 40.0), empty];
        let langs = BTreeMap::from([
            ("a".to_string(), Language::Java),
            ("b".to_string(), Language::Java),
        ]);
        let avg = aggregate_by_language(&dists, &langs, &BTreeMap::new(), false);
        assert!(
            (avg[&Language::Java][&Source::Issues][&DocType::ErrorRelated] - 40.0).abs() < 1e-12
        );
    }

    #[test]
    fn contribution_splits_by_mass() {
        // One type, two sources with masses 30 and 70.
        let dists = vec![
            dist("a", Source::Issues, [0.0, 0.0, 0.0, 0.0, 100.0, 0.0]),
            dist("a", Source::Commits, [0.0, 0.0, 0.0, 0.0, 100.0, 0.0]),
        ];
        let masses: SourceMasses = BTreeMap::from([
            (("a".to_string(), Source::Issues), 30),
            (("a".to_string(), Source::Commits), 70),
        ]);
        let matrix = source_contribution(&dists, &masses);
        let row = &matrix.values[&DocType::ErrorRelated];
        assert!((row[&Source::Issues] - 30.0).abs() < 1e-9);
        assert!((row[&Source::Commits] - 70.0).abs() < 1e-9);
        assert!(matrix.zero_mass_types.contains(&DocType::ApiRelated));
    }

    #[test]
    fn contribution_all_in_one_source() {
        let dists = vec![dist(
            "a",
            Source::TextualDocs,
            [0.0, 0.0, 0.0, 100.0, 0.0, 0.0],
        )];
        let masses: SourceMasses = BTreeMap::from([(("a".to_string(), Source::TextualDocs), 12)]);
        let matrix = source_contribution(&dists, &masses);
        assert!(
            (matrix.values[&DocType::LicenseRelated][&Source::TextualDocs] - 100.0).abs() < 1e-9
        );
    }

    #[test]
    fn contribution_three_sources_hand_computed() {
        // Error mass: issues 40% x 100 = 40, commits 20% x 50 = 10,
        // pulls 100% x 50 = 50. Row: 40%, 10%, 50%.
        let dists = vec![
            dist("a", Source::Issues, [0.0, 0.0, 0.0, 0.0, 40.0, 60.0]),
            dist("a", Source::Commits, [0.0, 0.0, 0.0, 0.0, 20.0, 80.0]),
            dist("a", Source::PullRequests, [0.0, 0.0, 0.0, 0.0, 100.0, 0.0]),
        ];
        let masses: SourceMasses = BTreeMap::from([
            (("a".to_string(), Source::Issues), 100),
            (("a".to_string(), Source::Commits), 50),
            (("a".to_string(), Source::PullRequests), 50),
        ]);
        let matrix = source_contribution(&dists, &masses);
        let row = &matrix.values[&DocType::ErrorRelated];
        assert!((row[&Source::Issues] - 40.0).abs() < 1e-9);
        assert!((row[&Source::Commits] - 10.0).abs() < 1e-9);
        assert!((row[&Source::PullRequests] - 50.0).abs() < 1e-9);
    }

    #[test]
    fn overall_shares_sum_to_100() {
        let dists = vec![
            dist("a", Source::Issues, [10.0, 20.0, 30.0, 15.0, 20.0, 5.0]),
            dist("a", Source::Commits, [5.0, 25.0, 30.0, 10.0, 20.0, 10.0]),
        ];
        let masses: SourceMasses = BTreeMap::from([
            (("a".to_string(), Source::Issues), 80),
            (("a".to_string(), Source::Commits), 20),
        ]);
        let types = overall_type_share(&dists, &masses);
        let sum: f64 = types.values().sum();
        assert!((sum - 100.0).abs() < 1e-6);
        let sources = overall_source_share(&masses);
        let sum: f64 = sources.values().sum();
        assert!((sum - 100.0).abs() < 1e-6);
        assert!((sources[&Source::Issues] - 80.0).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn closure_percentages_stay_in_range(
            raw in proptest::collection::vec(
                (proptest::array::uniform6(0.0f64..1.0), 0u64..500), 1..12),
        ) {
            let mut dists = Vec::new();
            let mut masses: SourceMasses = BTreeMap::new();
            for (i, (weights, mass)) in raw.iter().enumerate() {
                let repo = format!("r{}", i / 5);
                let source = Source::ALL[i % 5];
                let total: f64 = weights.iter().sum();
                if total == 0.0 {
                    continue;
                }
                let pcts: [f64; 6] = weights.map(|w| 100.0 * w / total);
                dists.push(dist(&repo, source, pcts));
                masses.insert((repo, source), *mass);
            }
            if dists.is_empty() {
                return Ok(());
            }
            let matrix = source_contribution(&dists, &masses);
            for (doc_type, row) in &matrix.values {
                let sum: f64 = row.values().sum();
                for pct in row.values() {
                    prop_assert!((0.0..=100.0 + 1e-9).contains(pct));
                }
                if !matrix.zero_mass_types.contains(doc_type) {
                    prop_assert!((sum - 100.0).abs() < 1e-6);
                }
            }
            let types = overall_type_share(&dists, &masses);
            let total_mass: u64 = masses.values().sum();
            if total_mass > 0 && types.values().sum::<f64>() > 0.0 {
                prop_assert!((types.values().sum::<f64>() - 100.0).abs() < 1e-6);
            }
        }
    }

    fn minimal_report() -> RunReport {
        let dists = vec![error_heavy("a", Source::Issues, 60.0)];
        let langs = BTreeMap::from([("a".to_string(), Language::Java)]);
        let masses: SourceMasses = BTreeMap::from([(("a".to_string(), Source::Issues), 10)]);
        RunReport {
            provenance: Provenance {
                anchor_date: NaiveDate::from_ymd_opt(2021, 1, 1).unwrap(),
                span_years: 3,
                provider: "dump".into(),
                lexicon_name: "lexicon_v1".into(),
                lexicon_sha256: "abc".into(),
                global_seed: 42,
                k_mode: "pinned".into(),
                similarity_metric: "overlap".into(),
                tie_eps: 0.05,
                min_df: 1,
                docstrings_included: true,
                stemming: false,
                hidden_files: "included (except .git)".into(),
                notes: vec![],
            },
            per_language_avg: aggregate_by_language(&dists, &langs, &masses, false),
            contribution: source_contribution(&dists, &masses),
            overall_type_share: overall_type_share(&dists, &masses),
            overall_source_share: overall_source_share(&masses),
            per_repo: dists,
            excluded: vec![],
            flagged: vec![],
            reference_values: ReferenceValues::default(),
        }
    }

    #[test]
    fn emitted_files_parse_back() {
        let report = minimal_report();
        let dir = tempfile::tempdir().unwrap();
        let files = emit_reports(&report, dir.path()).unwrap();
        assert_eq!(files.len(), 8);

        let json = fs::read_to_string(dir.path().join("report.json")).unwrap();
        let back: RunReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);

        let rq3 = fs::read_to_string(dir.path().join("rq3.csv")).unwrap();
        let lines: Vec<&str> = rq3.lines().collect();
        assert_eq!(lines[0], "language,source,type,pct");
        // 1 language x 5 sources x 6 types data rows.
        assert_eq!(lines.len(), 1 + 30);

        let rq4 = fs::read_to_string(dir.path().join("rq4.csv")).unwrap();
        assert_eq!(rq4.lines().count(), 1 + 30);
        assert!(rq4.lines().any(|l| l == "error_related,issues,100.0000"));
    }

    #[test]
    fn rq3_row_count_scales_with_languages() {
        let dists: Vec<TypeDistribution> = [
            ("a", Language::Cpp),
            ("b", Language::CSharp),
            ("c", Language::Java),
            ("d", Language::Python),
        ]
        .iter()
        .map(|(r, _)| error_heavy(r, Source::Issues, 50.0))
        .collect();
        let langs: BTreeMap<String, Language> = [
            ("a", Language::Cpp),
            ("b", Language::CSharp),
            ("c", Language::Java),
            ("d", Language::Python),
        ]
        .iter()
        .map(|(r, l)| (r.to_string(), *l))
        .collect();
        let mut report = minimal_report();
        report.per_language_avg = aggregate_by_language(&dists, &langs, &BTreeMap::new(), false);
        let dir = tempfile::tempdir().unwrap();
        emit_reports(&report, dir.path()).unwrap();
        let rq3 = fs::read_to_string(dir.path().join("rq3.csv")).unwrap();
        assert_eq!(rq3.lines().count(), 1 + 4 * 5 * 6);
    }
}
