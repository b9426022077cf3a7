//! Repository file scanning and classification.
//!
//! Walks a locally cloned repository, sorts every file into one of five
//! categories (textual, images, design diagrams, source code, others) and
//! collects the decoded contents of the textual ones.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use walkdir::WalkDir;

use crate::error::{Error, Result};
use crate::types::Language;

/// The five file categories every repository file maps into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FileCategory {
    Textual,
    Images,
    DesignDiagrams,
    SourceCode,
    Others,
}

impl FileCategory {
    pub const ALL: [FileCategory; 5] = [
        FileCategory::Textual,
        FileCategory::Images,
        FileCategory::DesignDiagrams,
        FileCategory::SourceCode,
        FileCategory::Others,
    ];
}

/// One repository file with its classification.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileRecord {
    pub relative_path: String,
    pub category: FileCategory,
    /// Set if and only if `category` is `SourceCode`.
    #[serde(skip_serializing_if = "Option::is_none")]
    #[serde(default)]
    pub language_hint: Option<Language>,
    pub byte_size: u64,
}

/// A scanned repository: identity, metadata used by the eligibility
/// filter, and the classified file list (sorted by relative path).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepoSnapshot {
    pub repo_id: String,
    pub primary_language: Language,
    pub files: Vec<FileRecord>,
    pub fork_flag: bool,
    pub pull_request_count: u64,
}

/// A textual document collected from a repository.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TextualDocument {
    pub relative_path: String,
    pub text: String,
}

/// Classify a repository file by its path alone.
///
/// Extension rules win over basename rules, so `readme.py` is source
/// code while `README.rst` is textual. Matching is case-insensitive.
pub fn classify_file(relative_path: &str) -> FileCategory {
    let basename = relative_path
        .rsplit(['/', '\\'])
        .next()
        .unwrap_or(relative_path);
    if let Some((_, ext)) = basename.rsplit_once('.') {
        match ext.to_ascii_lowercase().as_str() {
            "txt" | "md" => return FileCategory::Textual,
            "png" | "jpg" | "jpeg" => return FileCategory::Images,
            "xmi" | "uml" => return FileCategory::DesignDiagrams,
            "cpp" | "cs" | "py" | "java" => return FileCategory::SourceCode,
            _ => {}
        }
    }
    let lower = basename.to_ascii_lowercase();
    if lower.starts_with("readme") || lower.starts_with("license") {
        return FileCategory::Textual;
    }
    FileCategory::Others
}

/// Language hint for a classified file; `Some` exactly when the file is
/// source code.
fn language_hint(relative_path: &str) -> Option<Language> {
    let basename = relative_path
        .rsplit(['/', '\\'])
        .next()
        .unwrap_or(relative_path);
    let (_, ext) = basename.rsplit_once('.')?;
    Language::from_extension(&ext.to_ascii_lowercase())
}

/// Walk `root` and classify every regular file, excluding the `.git`
/// metadata directory. Hidden files are included. Symbolic links are not
/// followed. The resulting file list is sorted by relative path so scans
/// are order-normalized.
pub fn scan_repo(
    root: &Path,
    repo_id: &str,
    primary_language: Language,
    fork_flag: bool,
    pull_request_count: u64,
) -> Result<RepoSnapshot> {
    if !root.is_dir() {
        return Err(Error::io(
            root,
            std::io::Error::new(std::io::ErrorKind::NotFound, "not a readable directory"),
        ));
    }

    let mut files = Vec::new();
    let walker = WalkDir::new(root)
        .follow_links(false)
        .into_iter()
        .filter_entry(|e| e.file_name() != ".git");
    for entry in walker {
        let entry = match entry {
            Ok(e) => e,
            Err(err) => {
                log::warn!("skipping unreadable entry under {}: {err}", root.display());
                continue;
            }
        };
        if !entry.file_type().is_file() {
            continue;
        }
        let rel = entry
            .path()
            .strip_prefix(root)
            .unwrap_or(entry.path())
            .to_string_lossy()
            .replace('\\', "/");
        let byte_size = match entry.metadata() {
            Ok(meta) => meta.len(),
            Err(err) => {
                log::warn!("cannot stat {rel}: {err}; recording size 0");
                0
            }
        };
        let category = classify_file(&rel);
        let hint = if category == FileCategory::SourceCode {
            language_hint(&rel)
        } else {
            None
        };
        files.push(FileRecord {
            relative_path: rel,
            category,
            language_hint: hint,
            byte_size,
        });
    }
    files.sort_by(|a, b| a.relative_path.cmp(&b.relative_path));

    Ok(RepoSnapshot {
        repo_id: repo_id.to_string(),
        primary_language,
        files,
        fork_flag,
        pull_request_count,
    })
}

/// The corpus filter: forks and repositories without pull requests are
/// excluded as likely tutorial mirrors.
pub fn eligible_repo(snapshot: &RepoSnapshot) -> bool {
    !snapshot.fork_flag && snapshot.pull_request_count > 0
}

/// Read every `Textual` file of the snapshot. Non-UTF-8 bytes are
/// replaced; files that vanished since the scan are skipped with a
/// warning.
pub fn collect_textual_documents(snapshot: &RepoSnapshot, root: &Path) -> Vec<TextualDocument> {
    let mut docs = Vec::new();
    for record in &snapshot.files {
        if record.category != FileCategory::Textual {
            continue;
        }
        match fs::read(root.join(&record.relative_path)) {
            Ok(bytes) => docs.push(TextualDocument {
                relative_path: record.relative_path.clone(),
                text: String::from_utf8_lossy(&bytes).into_owned(),
            }),
            Err(err) => {
                log::warn!("textual file {} unreadable: {err}", record.relative_path);
            }
        }
    }
    docs
}

#[cfg(test)]
mod tests {
    use std::collections::{BTreeMap, BTreeSet};
    use std::fs;

    use proptest::prelude::*;

    use super::*;

    #[test]
    fn classify_table_rules() {
        assert_eq!(classify_file("docs/intro.md"), FileCategory::Textual);
        assert_eq!(classify_file("LICENSE"), FileCategory::Textual);
        assert_eq!(classify_file("src/main.cpp"), FileCategory::SourceCode);
        assert_eq!(classify_file("build.gradle"), FileCategory::Others);
        assert_eq!(classify_file("ARCH.UML"), FileCategory::DesignDiagrams);
    }

    #[test]
    fn classify_basename_prefix_and_extension_precedence() {
        assert_eq!(classify_file("README.rst"), FileCategory::Textual);
        assert_eq!(classify_file("license-MIT"), FileCategory::Textual);
        // Extension rules are more specific than the basename rule.
        assert_eq!(classify_file("readme.py"), FileCategory::SourceCode);
        assert_eq!(classify_file("a/b/ReadMe"), FileCategory::Textual);
    }

    #[test]
    fn classify_language_hints() {
        assert_eq!(language_hint("x/y.cpp"), Some(Language::Cpp));
        assert_eq!(language_hint("y.CS"), Some(Language::CSharp));
        assert_eq!(language_hint("y.java"), Some(Language::Java));
        assert_eq!(language_hint("y.py"), Some(Language::Python));
        assert_eq!(language_hint("y.md"), None);
    }

    proptest! {
        #[test]
        fn classify_is_total_and_case_insensitive(path in "\\PC{1,40}") {
            let cat = classify_file(&path);
            prop_assert_eq!(cat, classify_file(&path.to_uppercase()));
        }
    }

    fn fixture_repo() -> tempfile::TempDir {
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path();
        fs::create_dir_all(root.join("src")).unwrap();
        fs::create_dir_all(root.join(".git")).unwrap();
        fs::write(root.join("README.md"), "hello").unwrap();
        fs::write(root.join("src/a.py"), "# c").unwrap();
        fs::write(root.join("logo.png"), [0u8, 1]).unwrap();
        fs::write(root.join(".git/config"), "x").unwrap();
        dir
    }

    #[test]
    fn scan_classifies_and_excludes_git() {
        let dir = fixture_repo();
        let snap = scan_repo(dir.path(), "r1", Language::Python, false, 3).unwrap();
        let cats: BTreeSet<_> = snap.files.iter().map(|f| f.category).collect();
        assert_eq!(snap.files.len(), 3);
        assert_eq!(
            cats,
            BTreeSet::from([
                FileCategory::Textual,
                FileCategory::SourceCode,
                FileCategory::Images
            ])
        );
        assert!(snap
            .files
            .iter()
            .all(|f| !f.relative_path.starts_with(".git")));
        // Partition: category counts sum to |files|.
        let total: usize = FileCategory::ALL
            .iter()
            .map(|c| snap.files.iter().filter(|f| f.category == *c).count())
            .sum();
        assert_eq!(total, snap.files.len());
        // Hint present iff source code.
        for f in &snap.files {
            assert_eq!(
                f.language_hint.is_some(),
                f.category == FileCategory::SourceCode
            );
        }
    }

    #[test]
    fn scan_empty_dir_and_missing_root() {
        let dir = tempfile::tempdir().unwrap();
        let snap = scan_repo(dir.path(), "r", Language::Java, false, 1).unwrap();
        assert!(snap.files.is_empty());
        let err = scan_repo(&dir.path().join("nope"), "r", Language::Java, false, 1);
        assert!(matches!(err, Err(Error::Io { .. })));
    }

    #[test]
    fn scan_is_deterministic() {
        let dir = fixture_repo();
        let a = scan_repo(dir.path(), "r", Language::Cpp, false, 1).unwrap();
        let b = scan_repo(dir.path(), "r", Language::Cpp, false, 1).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn hidden_files_are_scanned() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join(".hidden.md"), "x").unwrap();
        fs::create_dir_all(dir.path().join(".config")).unwrap();
        fs::write(dir.path().join(".config/settings.txt"), "y").unwrap();
        let snap = scan_repo(dir.path(), "r", Language::Cpp, false, 1).unwrap();
        let paths: BTreeSet<&str> = snap
            .files
            .iter()
            .map(|f| f.relative_path.as_str())
            .collect();
        assert_eq!(paths, BTreeSet::from([".hidden.md", ".config/settings.txt"]));
        assert!(snap
            .files
            .iter()
            .all(|f| f.category == FileCategory::Textual));
    }

    #[test]
    fn nested_fixture_yields_the_enumerated_path_set() {
        // Hand-enumerated 12-file fixture across nested directories.
        let known: [&str; 12] = [
            "README.md",
            "LICENSE",
            "Makefile",
            "assets/logo.png",
            "design/arch.uml",
            "docs/guide.md",
            "docs/deep/notes.txt",
            "src/main.cpp",
            "src/util.cs",
            "src/app/App.java",
            "src/app/helper.py",
            "data.json",
        ];
        let dir = tempfile::tempdir().unwrap();
        for path in known {
            let full = dir.path().join(path);
            fs::create_dir_all(full.parent().unwrap()).unwrap();
            fs::write(full, "x").unwrap();
        }
        let snap = scan_repo(dir.path(), "r", Language::Cpp, false, 1).unwrap();
        assert_eq!(snap.files.len(), 12);
        let scanned: BTreeSet<&str> = snap
            .files
            .iter()
            .map(|f| f.relative_path.as_str())
            .collect();
        assert_eq!(scanned, BTreeSet::from(known));
    }

    #[test]
    fn textual_document_lengths_match_fixture_byte_counts() {
        // Three textual files with byte counts measured beforehand.
        let contents: [(&str, &str); 3] = [
            ("README.md", "twelve bytes"),
            ("docs/a.txt", "exactly twenty bytes"),
            ("LICENSE", "mit"),
        ];
        let dir = tempfile::tempdir().unwrap();
        for (path, text) in contents {
            let full = dir.path().join(path);
            fs::create_dir_all(full.parent().unwrap()).unwrap();
            fs::write(full, text).unwrap();
        }
        let snap = scan_repo(dir.path(), "r", Language::Java, false, 1).unwrap();
        let docs = collect_textual_documents(&snap, dir.path());
        assert_eq!(docs.len(), 3);
        let lengths: BTreeMap<&str, usize> = docs
            .iter()
            .map(|d| (d.relative_path.as_str(), d.text.len()))
            .collect();
        assert_eq!(lengths["README.md"], 12);
        assert_eq!(lengths["docs/a.txt"], 20);
        assert_eq!(lengths["LICENSE"], 3);
        for record in snap
            .files
            .iter()
            .filter(|f| f.category == FileCategory::Textual)
        {
            assert_eq!(
                lengths[record.relative_path.as_str()] as u64,
                record.byte_size
            );
        }
    }

    #[test]
    fn eligibility_filter() {
        let dir = fixture_repo();
        let snap = |fork, prs| scan_repo(dir.path(), "r", Language::Cpp, fork, prs).unwrap();
        assert!(!eligible_repo(&snap(true, 50)));
        assert!(!eligible_repo(&snap(false, 0)));
        assert!(eligible_repo(&snap(false, 1)));
    }

    #[test]
    fn textual_documents_are_decoded() {
        let dir = fixture_repo();
        let snap = scan_repo(dir.path(), "r", Language::Python, false, 1).unwrap();
        let docs = collect_textual_documents(&snap, dir.path());
        assert_eq!(docs.len(), 1);
        assert_eq!(docs[0].text, "hello");

        // Non-UTF-8 content is replaced, never fatal.
        fs::write(dir.path().join("notes.txt"), [0xffu8, 0x68, 0x69]).unwrap();
        let snap = scan_repo(dir.path(), "r", Language::Python, false, 1).unwrap();
        let docs = collect_textual_documents(&snap, dir.path());
        assert_eq!(docs.len(), 2);
        assert!(docs.iter().any(|d| d.text.contains('\u{fffd}')));

        // A file that vanishes between scan and read is skipped.
        fs::remove_file(dir.path().join("notes.txt")).unwrap();
        let docs = collect_textual_documents(&snap, dir.path());
        assert_eq!(docs.len(), 1);
    }

    #[test]
    fn snapshot_round_trips_as_json() {
        let dir = fixture_repo();
        let snap = scan_repo(dir.path(), "r1", Language::Python, false, 3).unwrap();
        let json = serde_json::to_string(&snap).unwrap();
        let back: RepoSnapshot = serde_json::from_str(&json).unwrap();
        assert_eq!(back, snap);
    }
}
