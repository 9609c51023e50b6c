//! Mines pronunciation data from the loosely structured tables on Wikipedia
//! language pages: phoneme inventories, grapheme-to-phoneme mappings,
//! pronunciation features, example words, and transcriptions, emitted as
//! standardized per-language TSV files.
//!
//! The pipeline: parse page markup into span-resolved [`grid::TableGrid`]s,
//! detect header structure and classify each table's shape
//! ([`structure`]), map header texts to data categories by keyword
//! ([`categorize`]), extract [`extract::PronEntry`] records, and serialize
//! them with [`tsv`]. [`discovery`] finds candidate pages and drives the
//! whole run through a pluggable [`fetch::Fetcher`].

pub mod categorize;
pub mod clean;
pub mod discovery;
pub mod extract;
pub mod fetch;
pub mod grid;
pub mod html;
pub mod structure;
pub mod tsv;
pub mod wikitext;

pub use categorize::{classify_caption, classify_columns, classify_header, Category, KeywordTable};
pub use clean::clean_cell_text;
pub use discovery::{
    discover_from_categories, discover_from_iso, resolve_iso, run_pipeline, IsoMapping,
    PageFormat, PageOrigin, PageRef, PipelineOptions, PipelineReport,
};
pub use extract::{
    extract_language, extract_type_a, extract_type_b, extract_unrecognized, ExtractError,
    LanguageDoc, PronEntry,
};
pub use fetch::{FetchError, FetchedPage, Fetcher, FixtureFetcher, HttpFetcher, MemoryFetcher};
pub use grid::{resolve_spans, Cell, CellKind, RawCell, TableGrid};
pub use html::{parse_html_tables, parse_html_tables_with_class};
pub use structure::{
    classify_shape, column_header_path, detect_repetition, find_header_bands, row_header_path,
    segment_bands, Axis, HeaderLayout, Orientation, RepetitionPattern, TableShape,
};
pub use tsv::{
    corpus_stats, emit_tsv, parse_tsv, write_corpus, CorpusStats, StatsReport, TsvError, TsvRow,
    WriteReport,
};
pub use wikitext::{parse_wikitext_tables, ParseOutput};
