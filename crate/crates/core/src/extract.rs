//! Turns classified grids into pronunciation records.
//!
//! Type A tables relate cells across one axis (a grapheme column next to a
//! phoneme column); Type B tables cross-classify each cell by its row and
//! column headers, which become pronunciation features. Anything else is
//! preserved as (header, value) pairs in the unclassified bucket rather than
//! dropped.

use crate::categorize::{
    classify_caption, classify_columns, column_header_text, row_header_text, Category,
    KeywordTable,
};
use crate::grid::TableGrid;
use crate::structure::{
    classify_shape, column_header_path, detect_repetition, find_header_bands, row_header_path,
    segment_bands, HeaderLayout, TableShape,
};
use thiserror::Error;

/// One mined pronunciation record. At least one field is always populated.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PronEntry {
    pub grapheme: Option<String>,
    pub phoneme: Option<String>,
    pub features: Vec<String>,
    pub example_word: Option<String>,
    pub transcription: Option<String>,
    pub unclassified: Vec<(String, String)>,
}

impl PronEntry {
    pub fn is_empty(&self) -> bool {
        self.grapheme.is_none()
            && self.phoneme.is_none()
            && self.features.is_empty()
            && self.example_word.is_none()
            && self.transcription.is_none()
            && self.unclassified.is_empty()
    }

    fn push_feature(&mut self, feature: &str) {
        if !feature.is_empty() && !self.features.iter().any(|f| f == feature) {
            self.features.push(feature.to_string());
        }
    }

    /// Files `text` under `category`. When the targeted field is already
    /// taken, the value is preserved as an unclassified pair against the
    /// header text supplied by `header` instead of being dropped.
    fn file(&mut self, category: &Category, text: String, header: impl FnOnce() -> String) {
        let slot = match category {
            Category::Grapheme => &mut self.grapheme,
            Category::Phoneme => &mut self.phoneme,
            Category::ExampleWord => &mut self.example_word,
            Category::Transcription => &mut self.transcription,
            Category::PronFeature => {
                self.push_feature(&text);
                return;
            }
            Category::Unclassified(h) => {
                self.unclassified.push((h.clone(), text));
                return;
            }
        };
        if slot.is_none() {
            *slot = Some(text);
        } else {
            self.unclassified.push((header(), text));
        }
    }
}

/// Everything mined from one language page.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LanguageDoc {
    pub iso_code: Option<String>,
    pub page_title: String,
    pub source_url: String,
    pub entries: Vec<PronEntry>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExtractError {
    #[error("category count {got} does not match data extent {expected}")]
    CategoryCountMismatch { expected: usize, got: usize },
}

/// Extracts one record per data row (horizontal headers) or per data column
/// (vertical headers). `categories` must align with the perpendicular axis.
pub fn extract_type_a(
    grid: &TableGrid,
    layout: &HeaderLayout,
    categories: &[Category],
) -> Result<Vec<PronEntry>, ExtractError> {
    let horizontal = !layout.header_rows.is_empty();
    let expected = if horizontal { grid.n_cols() } else { grid.n_rows() };
    if categories.len() != expected {
        return Err(ExtractError::CategoryCountMismatch {
            expected,
            got: categories.len(),
        });
    }

    let mut entries = Vec::new();
    if horizontal {
        for r in 0..grid.n_rows() {
            if layout.header_rows.contains(&r) {
                continue;
            }
            let mut entry = PronEntry::default();
            for (c, category) in categories.iter().enumerate() {
                let text = &grid.cell(r, c).text;
                if text.is_empty() {
                    continue;
                }
                entry.file(category, text.clone(), || {
                    column_header_text(grid, layout, c)
                });
            }
            if !entry.is_empty() {
                entries.push(entry);
            }
        }
    } else {
        for c in 0..grid.n_cols() {
            if layout.header_cols.contains(&c) {
                continue;
            }
            let mut entry = PronEntry::default();
            for (r, category) in categories.iter().enumerate() {
                let text = &grid.cell(r, c).text;
                if text.is_empty() {
                    continue;
                }
                entry.file(category, text.clone(), || row_header_text(grid, layout, r));
            }
            if !entry.is_empty() {
                entries.push(entry);
            }
        }
    }
    Ok(entries)
}

/// Extracts one phoneme record per whitespace-separated token of every
/// non-empty data cell, carrying the column header path, then the row header
/// path, then any caption feature as pronunciation features.
pub fn extract_type_b(
    grid: &TableGrid,
    layout: &HeaderLayout,
    caption_feature: Option<&str>,
) -> Vec<PronEntry> {
    let mut entries = Vec::new();
    for r in 0..grid.n_rows() {
        if layout.header_rows.contains(&r) {
            continue;
        }
        for c in 0..grid.n_cols() {
            if layout.header_cols.contains(&c) {
                continue;
            }
            let text = &grid.cell(r, c).text;
            if text.is_empty() {
                continue;
            }
            let mut features = column_header_path(grid, layout, c);
            features.extend(row_header_path(grid, layout, r));
            if let Some(feature) = caption_feature {
                features.push(feature.to_string());
            }
            for token in text.split_whitespace() {
                let mut entry = PronEntry {
                    phoneme: Some(token.to_string()),
                    ..PronEntry::default()
                };
                for feature in &features {
                    entry.push_feature(feature);
                }
                entries.push(entry);
            }
        }
    }
    entries
}

/// Fallback for grids with no detected header bands: every non-empty data
/// cell becomes an unclassified pair against the nearest header-kind cell
/// above it in its column, the caption, or the empty string.
pub fn extract_unrecognized(grid: &TableGrid) -> Vec<PronEntry> {
    let mut entries = Vec::new();
    for r in 0..grid.n_rows() {
        for c in 0..grid.n_cols() {
            let cell = grid.cell(r, c);
            if cell.is_header() || cell.text.is_empty() {
                continue;
            }
            let label = (0..r)
                .rev()
                .map(|above| grid.cell(above, c))
                .find(|above| above.is_header() && !above.text.is_empty())
                .map(|above| above.text.clone())
                .or_else(|| grid.caption.clone().filter(|cap| !cap.is_empty()))
                .unwrap_or_default();
            entries.push(PronEntry {
                unclassified: vec![(label, cell.text.clone())],
                ..PronEntry::default()
            });
        }
    }
    entries
}

/// Splits repeated-header grids into their bands, recursively, and returns
/// grids that carry no repetition pattern, in document order.
fn normalize_segments(grid: &TableGrid, out: &mut Vec<TableGrid>) {
    let layout = find_header_bands(grid);
    match detect_repetition(&layout, grid) {
        Some(pattern) => {
            for segment in segment_bands(grid, &pattern) {
                normalize_segments(&segment, out);
            }
        }
        None => out.push(grid.clone()),
    }
}

/// Mines every grid of one page: segments repeated headers, classifies each
/// segment's shape, and dispatches to the matching extractor. Per-table
/// problems become warnings; the page never fails as a whole.
pub fn extract_language(
    page_title: &str,
    source_url: &str,
    grids: &[TableGrid],
    keywords: &KeywordTable,
) -> LanguageDoc {
    let mut entries = Vec::new();
    let mut warnings = Vec::new();

    for (index, grid) in grids.iter().enumerate() {
        let mut segments = Vec::new();
        normalize_segments(grid, &mut segments);
        for segment in &segments {
            let layout = find_header_bands(segment);
            match classify_shape(&layout) {
                TableShape::TypeA(_) => {
                    let categories = classify_columns(segment, &layout, keywords);
                    match extract_type_a(segment, &layout, &categories) {
                        Ok(found) => entries.extend(found),
                        Err(err) => warnings.push(format!("table {}: {err}", index + 1)),
                    }
                }
                TableShape::TypeB => {
                    let caption_feature = segment
                        .caption
                        .as_deref()
                        .and_then(|caption| classify_caption(caption, keywords));
                    entries.extend(extract_type_b(segment, &layout, caption_feature.as_deref()));
                }
                TableShape::Unrecognized => entries.extend(extract_unrecognized(segment)),
            }
        }
    }

    LanguageDoc {
        iso_code: None,
        page_title: page_title.to_string(),
        source_url: source_url.to_string(),
        entries,
        warnings,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::test_grids::{d, grid_from, h};

    fn entry() -> PronEntry {
        PronEntry::default()
    }

    #[test]
    fn type_a_horizontal_g2p() {
        let grid = grid_from(&[&[h("Alphabet"), h("IPA")], &[d("b"), d("/b/")]]);
        let layout = find_header_bands(&grid);
        let entries =
            extract_type_a(&grid, &layout, &[Category::Grapheme, Category::Phoneme]).unwrap();
        assert_eq!(
            entries,
            vec![PronEntry {
                grapheme: Some("b".to_string()),
                phoneme: Some("/b/".to_string()),
                ..entry()
            }]
        );
    }

    #[test]
    fn type_a_word_and_transcription() {
        let grid = grid_from(&[&[h("Example"), h("Transcription")], &[d("mata"), d("[\u{2c8}ma.ta]")]]);
        let layout = find_header_bands(&grid);
        let entries = extract_type_a(
            &grid,
            &layout,
            &[Category::ExampleWord, Category::Transcription],
        )
        .unwrap();
        assert_eq!(entries[0].example_word.as_deref(), Some("mata"));
        assert_eq!(entries[0].transcription.as_deref(), Some("[\u{2c8}ma.ta]"));
    }

    #[test]
    fn type_a_unclassified_column() {
        let grid = grid_from(&[&[h("Meaning")], &[d("water")]]);
        let layout = find_header_bands(&grid);
        let entries = extract_type_a(
            &grid,
            &layout,
            &[Category::Unclassified("Meaning".to_string())],
        )
        .unwrap();
        assert_eq!(
            entries[0].unclassified,
            vec![("Meaning".to_string(), "water".to_string())]
        );
    }

    #[test]
    fn type_a_empty_cells_skipped_and_empty_rows_dropped() {
        let grid = grid_from(&[
            &[h("Alphabet"), h("IPA")],
            &[d("b"), d("")],
            &[d(""), d("")],
        ]);
        let layout = find_header_bands(&grid);
        let entries =
            extract_type_a(&grid, &layout, &[Category::Grapheme, Category::Phoneme]).unwrap();
        assert_eq!(entries.len(), 1);
        assert_eq!(entries[0].grapheme.as_deref(), Some("b"));
        assert_eq!(entries[0].phoneme, None);
    }

    #[test]
    fn type_a_field_collision_goes_to_unclassified() {
        let grid = grid_from(&[
            &[h("IPA"), h("IPA (dialect)")],
            &[d("/b/"), d("/\u{3b2}/")],
        ]);
        let layout = find_header_bands(&grid);
        let entries = extract_type_a(&grid, &layout, &[Category::Phoneme, Category::Phoneme])
            .unwrap();
        assert_eq!(entries[0].phoneme.as_deref(), Some("/b/"));
        assert_eq!(
            entries[0].unclassified,
            vec![("IPA (dialect)".to_string(), "/\u{3b2}/".to_string())]
        );
    }

    #[test]
    fn type_a_vertical_records_per_column() {
        let grid = grid_from(&[
            &[h("Letter"), d("b"), d("c")],
            &[h("IPA"), d("/b/"), d("/ts/")],
        ]);
        let layout = find_header_bands(&grid);
        let entries =
            extract_type_a(&grid, &layout, &[Category::Grapheme, Category::Phoneme]).unwrap();
        assert_eq!(entries.len(), 2);
        assert_eq!(entries[0].grapheme.as_deref(), Some("b"));
        assert_eq!(entries[0].phoneme.as_deref(), Some("/b/"));
        assert_eq!(entries[1].grapheme.as_deref(), Some("c"));
        assert_eq!(entries[1].phoneme.as_deref(), Some("/ts/"));
    }

    #[test]
    fn type_a_category_count_mismatch() {
        let grid = grid_from(&[&[h("A"), h("B")], &[d("x"), d("y")]]);
        let layout = find_header_bands(&grid);
        assert_eq!(
            extract_type_a(&grid, &layout, &[Category::Grapheme]),
            Err(ExtractError::CategoryCountMismatch {
                expected: 2,
                got: 1
            })
        );
    }

    #[test]
    fn type_b_cell_with_row_col_and_caption_features() {
        let mut grid = grid_from(&[
            &[h(""), h("Bilabial")],
            &[h("Nasal"), d("m")],
        ]);
        grid.caption = Some("Consonants".to_string());
        let layout = find_header_bands(&grid);
        let entries = extract_type_b(&grid, &layout, Some("consonant"));
        assert_eq!(
            entries,
            vec![PronEntry {
                phoneme: Some("m".to_string()),
                features: vec![
                    "Bilabial".to_string(),
                    "Nasal".to_string(),
                    "consonant".to_string()
                ],
                ..entry()
            }]
        );
    }

    #[test]
    fn type_b_empty_cells_produce_nothing() {
        let grid = grid_from(&[&[h(""), h("Bilabial")], &[h("Nasal"), d("")]]);
        let layout = find_header_bands(&grid);
        assert!(extract_type_b(&grid, &layout, None).is_empty());
    }

    #[test]
    fn type_b_multi_token_cells_split() {
        let grid = grid_from(&[&[h(""), h("Bilabial")], &[h("Plosive"), d("p b")]]);
        let layout = find_header_bands(&grid);
        let entries = extract_type_b(&grid, &layout, None);
        assert_eq!(entries.len(), 2);
        assert_eq!(entries[0].phoneme.as_deref(), Some("p"));
        assert_eq!(entries[1].phoneme.as_deref(), Some("b"));
        assert_eq!(entries[0].features, entries[1].features);
        assert_eq!(entries[0].features, vec!["Bilabial", "Plosive"]);
    }

    #[test]
    fn type_b_features_deduplicate() {
        let grid = grid_from(&[&[h(""), h("Nasal")], &[h("Nasal"), d("m")]]);
        let layout = find_header_bands(&grid);
        let entries = extract_type_b(&grid, &layout, None);
        assert_eq!(entries[0].features, vec!["Nasal"]);
    }

    #[test]
    fn unrecognized_pairs_with_nearest_header_caption_or_empty() {
        let mut grid = grid_from(&[
            &[d("one"), d("1")],
            &[h("two"), d("2")],
            &[d("three"), d("3")],
        ]);
        grid.caption = Some("Numbers".to_string());
        let entries = extract_unrecognized(&grid);
        let pairs: Vec<_> = entries
            .iter()
            .map(|e| e.unclassified[0].clone())
            .collect();
        assert_eq!(
            pairs,
            vec![
                ("Numbers".to_string(), "one".to_string()),
                ("Numbers".to_string(), "1".to_string()),
                ("Numbers".to_string(), "2".to_string()),
                ("two".to_string(), "three".to_string()),
                ("Numbers".to_string(), "3".to_string()),
            ]
        );

        // no caption, no headers above: label is the empty string
        let grid = grid_from(&[&[d("x")]]);
        let entries = extract_unrecognized(&grid);
        assert_eq!(entries[0].unclassified, vec![(String::new(), "x".to_string())]);
    }

    #[test]
    fn language_page_composition() {
        let keywords = KeywordTable::default();
        let g2p = grid_from(&[&[h("Alphabet"), h("IPA")], &[d("b"), d("/b/")]]);
        let doc = extract_language("Amarasi language", "https://x/Amarasi", &[g2p], &keywords);
        assert_eq!(doc.entries.len(), 1);
        assert_eq!(doc.entries[0].grapheme.as_deref(), Some("b"));
        assert_eq!(doc.entries[0].phoneme.as_deref(), Some("/b/"));
        assert!(doc.warnings.is_empty());
    }

    #[test]
    fn language_page_with_no_tables() {
        let keywords = KeywordTable::default();
        let doc = extract_language("Empty", "https://x/Empty", &[], &keywords);
        assert!(doc.entries.is_empty());
        assert!(doc.warnings.is_empty());
    }

    #[test]
    fn language_page_mixes_recognized_and_unrecognized() {
        let keywords = KeywordTable::default();
        let type_b = grid_from(&[&[h(""), h("Bilabial")], &[h("Nasal"), d("m")]]);
        let murky = grid_from(&[&[d("foo"), d("bar")]]);
        let doc = extract_language("X", "https://x/X", &[type_b, murky], &keywords);
        assert_eq!(doc.entries.len(), 3);
        assert_eq!(doc.entries[0].phoneme.as_deref(), Some("m"));
        assert!(doc.entries[1].phoneme.is_none());
        assert!(!doc.entries[1].unclassified.is_empty());
    }

    #[test]
    fn repeated_header_grid_equals_segment_extraction() {
        let keywords = KeywordTable::default();
        let repeated = grid_from(&[
            &[h("Letter"), h("IPA")],
            &[d("a"), d("[a]")],
            &[h("Letter"), h("IPA")],
            &[d("b"), d("[b]")],
        ]);
        let doc = extract_language("X", "https://x/X", std::slice::from_ref(&repeated), &keywords);
        assert_eq!(doc.entries.len(), 2);
        assert_eq!(doc.entries[0].grapheme.as_deref(), Some("a"));
        assert_eq!(doc.entries[1].grapheme.as_deref(), Some("b"));

        // equals extracting each band independently and concatenating
        let layout = find_header_bands(&repeated);
        let pattern = detect_repetition(&layout, &repeated).unwrap();
        let mut by_segment = Vec::new();
        for seg in segment_bands(&repeated, &pattern) {
            let seg_doc = extract_language("X", "https://x/X", &[seg], &keywords);
            by_segment.extend(seg_doc.entries);
        }
        assert_eq!(doc.entries, by_segment);
    }
}
