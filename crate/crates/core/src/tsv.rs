//! The six-column TSV output format, its parser, per-language corpus files,
//! and corpus-level statistics.
//!
//! Columns: grapheme, phoneme, features, example_word, transcription,
//! unclassified. Absent fields hold the literal `(n/a)`. Features join with
//! `", "`; unclassified pairs render as `header=value` joined with `"; "`.

use crate::extract::{LanguageDoc, PronEntry};
use serde::Serialize;
use std::collections::BTreeSet;
use std::fs;
use std::io;
use std::path::Path;
use thiserror::Error;

pub const TSV_HEADER: &str = "grapheme\tphoneme\tfeatures\texample_word\ttranscription\tunclassified";
pub const NA: &str = "(n/a)";

/// One parsed TSV line; `None` stands for the `(n/a)` fill.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TsvRow {
    pub grapheme: Option<String>,
    pub phoneme: Option<String>,
    pub features: Option<String>,
    pub example_word: Option<String>,
    pub transcription: Option<String>,
    pub unclassified: Option<String>,
}

impl TsvRow {
    /// The row a [`PronEntry`] serializes to, with the documented in-cell
    /// join encodings applied.
    pub fn from_entry(entry: &PronEntry) -> TsvRow {
        let join_features = (!entry.features.is_empty()).then(|| entry.features.join(", "));
        let join_unclassified = (!entry.unclassified.is_empty()).then(|| {
            entry
                .unclassified
                .iter()
                .map(|(header, value)| format!("{header}={value}"))
                .collect::<Vec<_>>()
                .join("; ")
        });
        TsvRow {
            grapheme: entry.grapheme.clone(),
            phoneme: entry.phoneme.clone(),
            features: join_features,
            example_word: entry.example_word.clone(),
            transcription: entry.transcription.clone(),
            unclassified: join_unclassified,
        }
    }

    fn columns(&self) -> [&Option<String>; 6] {
        [
            &self.grapheme,
            &self.phoneme,
            &self.features,
            &self.example_word,
            &self.transcription,
            &self.unclassified,
        ]
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TsvError {
    #[error("missing header line (expected `{TSV_HEADER}`)")]
    MissingHeader,
    #[error("line {line}: expected 6 tab-separated columns, found {found}")]
    ColumnCount { line: usize, found: usize },
    #[error("entry {entry}: field contains a tab or newline (cell cleaning bug)")]
    DirtyField { entry: usize },
}

/// Serializes a document to TSV: header line, then one line per entry, each
/// terminated by a newline.
pub fn emit_tsv(doc: &LanguageDoc) -> Result<String, TsvError> {
    let mut out = String::from(TSV_HEADER);
    out.push('\n');
    for (i, entry) in doc.entries.iter().enumerate() {
        let row = TsvRow::from_entry(entry);
        let mut line = Vec::with_capacity(6);
        for column in row.columns() {
            let value = column.as_deref().unwrap_or(NA);
            if value.contains('\t') || value.contains('\n') {
                return Err(TsvError::DirtyField { entry: i + 1 });
            }
            line.push(value.to_string());
        }
        out.push_str(&line.join("\t"));
        out.push('\n');
    }
    Ok(out)
}

fn decode_field(field: &str) -> Option<String> {
    (field != NA).then(|| field.to_string())
}

/// Parses text in the schema [`emit_tsv`] writes. Line numbers in errors are
/// 1-based; the header is line 1.
pub fn parse_tsv(text: &str) -> Result<Vec<TsvRow>, TsvError> {
    let mut lines = text.lines();
    if lines.next() != Some(TSV_HEADER) {
        return Err(TsvError::MissingHeader);
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 6 {
            return Err(TsvError::ColumnCount {
                line: i + 2,
                found: fields.len(),
            });
        }
        rows.push(TsvRow {
            grapheme: decode_field(fields[0]),
            phoneme: decode_field(fields[1]),
            features: decode_field(fields[2]),
            example_word: decode_field(fields[3]),
            transcription: decode_field(fields[4]),
            unclassified: decode_field(fields[5]),
        });
    }
    Ok(rows)
}

/// Lowercases a page title into a safe file stem.
pub fn sanitize_title(title: &str) -> String {
    let mut stem = String::new();
    for ch in title.to_lowercase().chars() {
        if ch.is_alphanumeric() {
            stem.push(ch);
        } else if !stem.ends_with('_') {
            stem.push('_');
        }
    }
    let stem = stem.trim_matches('_').to_string();
    if stem.is_empty() {
        "page".to_string()
    } else {
        stem
    }
}

/// What [`write_corpus`] did: files in write order, collision renames, and
/// per-file failures (which do not stop the remaining files).
#[derive(Debug, Clone, Default, Serialize)]
pub struct WriteReport {
    pub files: Vec<String>,
    pub collisions: Vec<String>,
    pub errors: Vec<String>,
}

/// Writes one `<iso>.tsv` (or `<sanitized_title>.tsv`) per document plus a
/// sorted, deduplicated `links.txt` of every source URL.
pub fn write_corpus(docs: &[LanguageDoc], out_dir: &Path) -> io::Result<WriteReport> {
    fs::create_dir_all(out_dir)?;
    let mut report = WriteReport::default();
    let mut taken = BTreeSet::new();

    for doc in docs {
        let base = doc
            .iso_code
            .clone()
            .unwrap_or_else(|| sanitize_title(&doc.page_title));
        let mut name = format!("{base}.tsv");
        let mut suffix = 2;
        while taken.contains(&name) {
            name = format!("{base}-{suffix}.tsv");
            suffix += 1;
        }
        if suffix > 2 {
            report
                .collisions
                .push(format!("{base}.tsv already written; using {name}"));
        }
        taken.insert(name.clone());
        match emit_tsv(doc) {
            Ok(text) => match fs::write(out_dir.join(&name), text) {
                Ok(()) => report.files.push(name),
                Err(err) => report.errors.push(format!("{name}: {err}")),
            },
            Err(err) => report.errors.push(format!("{name}: {err}")),
        }
    }

    let links: BTreeSet<&str> = docs.iter().map(|d| d.source_url.as_str()).collect();
    let mut links_text = String::new();
    for link in links {
        links_text.push_str(link);
        links_text.push('\n');
    }
    fs::write(out_dir.join("links.txt"), links_text)?;
    Ok(report)
}

/// Corpus-level counts over a directory of TSV files.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct CorpusStats {
    pub n_languages: usize,
    pub n_with_phonemes: usize,
    pub n_with_g2p: usize,
    pub n_unclassified_only: usize,
}

/// Stats plus the files that failed to parse (excluded from the counts).
#[derive(Debug, Clone, Default, Serialize)]
pub struct StatsReport {
    pub stats: CorpusStats,
    pub parse_failures: Vec<String>,
}

fn present(field: &Option<String>) -> bool {
    field.as_deref().is_some_and(|s| !s.is_empty())
}

/// Reads every `*.tsv` in `dir` (sorted by name) and counts languages, those
/// with any phoneme, those with a grapheme-phoneme pair in one row, and those
/// whose rows hold nothing but unclassified data.
pub fn corpus_stats(dir: &Path) -> io::Result<StatsReport> {
    let mut paths: Vec<_> = fs::read_dir(dir)?
        .collect::<io::Result<Vec<_>>>()?
        .into_iter()
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|ext| ext == "tsv"))
        .collect();
    paths.sort();

    let mut report = StatsReport::default();
    for path in paths {
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        let rows = match fs::read_to_string(&path) {
            Ok(text) => match parse_tsv(&text) {
                Ok(rows) => rows,
                Err(err) => {
                    report.parse_failures.push(format!("{name}: {err}"));
                    continue;
                }
            },
            Err(err) => {
                report.parse_failures.push(format!("{name}: {err}"));
                continue;
            }
        };
        report.stats.n_languages += 1;
        if rows.iter().any(|r| present(&r.phoneme)) {
            report.stats.n_with_phonemes += 1;
        }
        if rows.iter().any(|r| present(&r.grapheme) && present(&r.phoneme)) {
            report.stats.n_with_g2p += 1;
        }
        let only_unclassified = |r: &TsvRow| {
            present(&r.unclassified)
                && !present(&r.grapheme)
                && !present(&r.phoneme)
                && !present(&r.features)
                && !present(&r.example_word)
                && !present(&r.transcription)
        };
        if !rows.is_empty() && rows.iter().all(only_unclassified) {
            report.stats.n_unclassified_only += 1;
        }
    }
    Ok(report)
}
