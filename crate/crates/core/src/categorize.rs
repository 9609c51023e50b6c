//! Keyword-based classification of header text into the six data categories.

use crate::grid::TableGrid;
use crate::structure::{column_header_path, row_header_path, HeaderLayout};
use thiserror::Error;

/// The category of data found under one header.
///
/// Headers matching no keyword fall back to `Unclassified`, which keeps the
/// verbatim header text so the (header, value) pair survives into the output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Category {
    Grapheme,
    Phoneme,
    PronFeature,
    ExampleWord,
    Transcription,
    Unclassified(String),
}

type KeywordBucket = fn() -> Category;

#[derive(Debug, Error)]
pub enum KeywordConfigError {
    #[error("line {line}: expected `category<TAB>keyword`")]
    BadLine { line: usize },
    #[error("line {line}: unknown category `{name}`")]
    UnknownCategory { line: usize, name: String },
}

/// The keyword lists driving [`classify_header`], stored lowercase.
///
/// Matching is case-insensitive substring matching, evaluated in the fixed
/// priority order transcription, grapheme, example word, pronunciation
/// feature, phoneme; the first list containing a matching keyword wins.
/// `caption` keywords mark a whole table as vowel/consonant data via
/// [`classify_caption`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeywordTable {
    pub transcription: Vec<String>,
    pub grapheme: Vec<String>,
    pub example_word: Vec<String>,
    pub pron_feature: Vec<String>,
    pub phoneme: Vec<String>,
    pub caption: Vec<String>,
}

impl Default for KeywordTable {
    fn default() -> Self {
        let list = |kw: &[&str]| kw.iter().map(|s| s.to_string()).collect();
        KeywordTable {
            transcription: list(&["transcription"]),
            grapheme: list(&["letter", "grapheme", "alphabet", "written"]),
            example_word: list(&["example", "word"]),
            pron_feature: list(&["description", "vowel", "consonant"]),
            phoneme: list(&["ipa", "pronunciation"]),
            caption: list(&["vowel", "consonant"]),
        }
    }
}

impl KeywordTable {
    /// Merges override lines (`category<TAB>keyword`, `#` comments allowed)
    /// over the defaults. Category names: `transcription`, `grapheme`,
    /// `example_word`, `pron_feature`, `phoneme`, `caption`.
    pub fn with_overrides(text: &str) -> Result<Self, KeywordConfigError> {
        let mut table = KeywordTable::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (name, keyword) = line
                .split_once('\t')
                .ok_or(KeywordConfigError::BadLine { line: i + 1 })?;
            let keyword = keyword.trim().to_lowercase();
            if keyword.is_empty() {
                return Err(KeywordConfigError::BadLine { line: i + 1 });
            }
            let bucket = match name.trim().to_lowercase().as_str() {
                "transcription" => &mut table.transcription,
                "grapheme" => &mut table.grapheme,
                "example_word" | "example" => &mut table.example_word,
                "pron_feature" | "feature" => &mut table.pron_feature,
                "phoneme" => &mut table.phoneme,
                "caption" => &mut table.caption,
                other => {
                    return Err(KeywordConfigError::UnknownCategory {
                        line: i + 1,
                        name: other.to_string(),
                    })
                }
            };
            if !bucket.contains(&keyword) {
                bucket.push(keyword);
            }
        }
        Ok(table)
    }

    fn buckets(&self) -> [(&[String], KeywordBucket); 5] {
        [
            (&self.transcription, || Category::Transcription),
            (&self.grapheme, || Category::Grapheme),
            (&self.example_word, || Category::ExampleWord),
            (&self.pron_feature, || Category::PronFeature),
            (&self.phoneme, || Category::Phoneme),
        ]
    }
}

/// Classifies one header text; never fails. Unmatched text comes back as
/// `Unclassified` carrying the input verbatim.
pub fn classify_header(text: &str, table: &KeywordTable) -> Category {
    let lowered = text.to_lowercase();
    for (keywords, make) in table.buckets() {
        if keywords.iter().any(|kw| lowered.contains(kw.as_str())) {
            return make();
        }
    }
    Category::Unclassified(text.to_string())
}

/// Returns the caption keyword ("vowel" / "consonant") found in a table
/// caption, used as an extra pronunciation feature for the table's entries.
pub fn classify_caption(caption: &str, table: &KeywordTable) -> Option<String> {
    let lowered = caption.to_lowercase();
    table
        .caption
        .iter()
        .find(|kw| lowered.contains(kw.as_str()))
        .cloned()
}

/// Per-column header text for a Type A grid: the column's header cells top to
/// bottom joined with single spaces (span copies deduplicated by origin).
pub fn column_header_text(grid: &TableGrid, layout: &HeaderLayout, col: usize) -> String {
    column_header_path(grid, layout, col).join(" ")
}

/// Per-row header text for a vertical Type A grid.
pub fn row_header_text(grid: &TableGrid, layout: &HeaderLayout, row: usize) -> String {
    row_header_path(grid, layout, row).join(" ")
}

/// Classifies every data column of a horizontal Type A grid (or every data
/// row of a vertical one) by its header band text.
pub fn classify_columns(
    grid: &TableGrid,
    layout: &HeaderLayout,
    table: &KeywordTable,
) -> Vec<Category> {
    if !layout.header_rows.is_empty() {
        (0..grid.n_cols())
            .map(|c| classify_header(&column_header_text(grid, layout, c), table))
            .collect()
    } else {
        (0..grid.n_rows())
            .map(|r| classify_header(&row_header_text(grid, layout, r), table))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::CellKind;
    use crate::grid::test_grids::grid_from;
    use crate::structure::find_header_bands;

    #[test]
    fn table_keywords_map_to_their_categories() {
        let table = KeywordTable::default();
        assert_eq!(classify_header("Amarasi Alphabet", &table), Category::Grapheme);
        assert_eq!(classify_header("IPA", &table), Category::Phoneme);
        assert_eq!(classify_header("Pronunciation", &table), Category::Phoneme);
        assert_eq!(classify_header("Example words", &table), Category::ExampleWord);
        assert_eq!(classify_header("Description", &table), Category::PronFeature);
        assert_eq!(
            classify_header("Phonemic transcription", &table),
            Category::Transcription
        );
    }

    #[test]
    fn unmatched_header_is_unclassified_verbatim() {
        let table = KeywordTable::default();
        assert_eq!(
            classify_header("Cyrillic", &table),
            Category::Unclassified("Cyrillic".to_string())
        );
        assert_eq!(
            classify_header("", &table),
            Category::Unclassified(String::new())
        );
    }

    #[test]
    fn matching_is_case_insensitive() {
        let table = KeywordTable::default();
        assert_eq!(classify_header("LETTERS", &table), Category::Grapheme);
        assert_eq!(classify_header("ipa", &table), Category::Phoneme);
    }

    #[test]
    fn priority_resolves_multi_keyword_headers() {
        let table = KeywordTable::default();
        // transcription outranks phoneme
        assert_eq!(
            classify_header("IPA transcription", &table),
            Category::Transcription
        );
        // grapheme outranks phoneme
        assert_eq!(
            classify_header("Written pronunciation", &table),
            Category::Grapheme
        );
    }

    #[test]
    fn caption_keywords() {
        let table = KeywordTable::default();
        assert_eq!(
            classify_caption("Consonant phonemes", &table),
            Some("consonant".to_string())
        );
        assert_eq!(classify_caption("Vowels", &table), Some("vowel".to_string()));
        assert_eq!(classify_caption("Orthography", &table), None);
    }

    #[test]
    fn classify_columns_on_headers() {
        let table = KeywordTable::default();
        let grid = grid_from(&[
            &[
                ("Word", CellKind::Header),
                ("IPA", CellKind::Header),
                ("Meaning", CellKind::Header),
            ],
            &[
                ("mata", CellKind::Data),
                ("[ma.ta]", CellKind::Data),
                ("eye", CellKind::Data),
            ],
        ]);
        let layout = find_header_bands(&grid);
        assert_eq!(
            classify_columns(&grid, &layout, &table),
            vec![
                Category::ExampleWord,
                Category::Phoneme,
                Category::Unclassified("Meaning".to_string())
            ]
        );
    }

    #[test]
    fn classify_columns_concatenates_multi_row_bands() {
        let table = KeywordTable::default();
        // both header rows contribute to the column text
        let grid = grid_from(&[
            &[("Amarasi", CellKind::Header), ("Sound", CellKind::Header)],
            &[("Alphabet", CellKind::Header), ("IPA", CellKind::Header)],
            &[("b", CellKind::Data), ("/b/", CellKind::Data)],
        ]);
        let layout = find_header_bands(&grid);
        assert_eq!(layout.header_rows, vec![0, 1]);
        assert_eq!(column_header_text(&grid, &layout, 0), "Amarasi Alphabet");
        assert_eq!(
            classify_columns(&grid, &layout, &table),
            vec![Category::Grapheme, Category::Phoneme]
        );
    }

    #[test]
    fn empty_headers_classify_as_empty_unclassified() {
        let table = KeywordTable::default();
        let grid = grid_from(&[
            &[("", CellKind::Header), ("", CellKind::Header)],
            &[("x", CellKind::Data), ("y", CellKind::Data)],
        ]);
        let layout = find_header_bands(&grid);
        assert_eq!(
            classify_columns(&grid, &layout, &table),
            vec![
                Category::Unclassified(String::new()),
                Category::Unclassified(String::new())
            ]
        );
    }

    #[test]
    fn overrides_merge_without_replacing_defaults() {
        let table = KeywordTable::with_overrides("grapheme\tcyrillic\n# comment\n\nphoneme\tsound\n").unwrap();
        assert_eq!(classify_header("Cyrillic letters", &table), Category::Grapheme);
        assert_eq!(classify_header("Cyrillic", &table), Category::Grapheme);
        assert_eq!(classify_header("Sound value", &table), Category::Phoneme);
        // defaults still present
        assert_eq!(classify_header("IPA", &table), Category::Phoneme);
    }

    #[test]
    fn override_errors_carry_line_numbers() {
        match KeywordTable::with_overrides("no tab here") {
            Err(KeywordConfigError::BadLine { line }) => assert_eq!(line, 1),
            other => panic!("unexpected: {other:?}"),
        }
        match KeywordTable::with_overrides("grapheme\tx\nnonsense\ty") {
            Err(KeywordConfigError::UnknownCategory { line, name }) => {
                assert_eq!(line, 2);
                assert_eq!(name, "nonsense");
            }
            other => panic!("unexpected: {other:?}"),
        }
    }
}
