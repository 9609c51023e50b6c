//! Finding candidate language pages and driving the end-to-end pipeline:
//! fetch, parse, extract, write, count.

use crate::categorize::KeywordTable;
use crate::extract::extract_language;
use crate::fetch::{FetchError, FetchedPage, Fetcher};
use crate::html::parse_html_tables;
use crate::tsv::{corpus_stats, write_corpus, CorpusStats};
use crate::wikitext::{parse_wikitext_tables, ParseOutput};
use scraper::{Html, Selector};
use serde::Serialize;
use std::collections::{HashMap, HashSet, VecDeque};
use std::fs;
use std::io;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::LazyLock;
use std::sync::Mutex;
use thiserror::Error;
use url::Url;

pub const DEFAULT_WIKI_BASE: &str = "https://en.wikipedia.org";

/// The two category roots the crawl walks by default.
pub const DEFAULT_CATEGORY_URLS: [&str; 2] = [
    "https://en.wikipedia.org/wiki/Category:Languages_by_country",
    "https://en.wikipedia.org/wiki/Category:Language_phonologies",
];

pub const DEFAULT_CATEGORY_DEPTH: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PageOrigin {
    CategoryCrawl,
    IsoLookup,
    Manual,
}

/// A candidate language page to mine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PageRef {
    pub title: String,
    pub url: String,
    pub iso_hint: Option<String>,
    pub origin: PageOrigin,
}

#[derive(Debug, Default)]
pub struct DiscoveryOutcome {
    pub refs: Vec<PageRef>,
    pub warnings: Vec<String>,
}

static ANCHOR: LazyLock<Selector> = LazyLock::new(|| Selector::parse("a[href]").unwrap());
static TITLE_TAG: LazyLock<regex::Regex> =
    LazyLock::new(|| regex::Regex::new(r"(?is)<title[^>]*>(.*?)</title>").unwrap());

const SKIP_NAMESPACES: [&str; 14] = [
    "File:",
    "Image:",
    "Special:",
    "Help:",
    "Talk:",
    "Wikipedia:",
    "Template:",
    "Portal:",
    "User:",
    "Module:",
    "Draft:",
    "MediaWiki:",
    "Book:",
    "TimedText:",
];

fn wiki_page_name(url: &Url) -> Option<String> {
    let path = url.path();
    path.strip_prefix("/wiki/").map(|name| name.to_string())
}

fn is_pagination_link(url: &Url) -> bool {
    url.query_pairs()
        .any(|(k, _)| k == "pagefrom" || k == "subcatfrom" || k == "from")
}

fn collapse_ws(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Walks category listing pages breadth-first, following subcategory and
/// pagination links up to `max_depth` levels of subcategories, and collects
/// member article links deduplicated by URL. Fetch failures on a branch only
/// warn; the rest of the traversal continues.
pub fn discover_from_categories(
    fetcher: &dyn Fetcher,
    category_urls: &[String],
    max_depth: usize,
) -> DiscoveryOutcome {
    let mut outcome = DiscoveryOutcome::default();
    let mut queue: VecDeque<(String, usize)> = category_urls
        .iter()
        .map(|u| (u.clone(), 0usize))
        .collect();
    let mut visited: HashSet<String> = queue.iter().map(|(u, _)| u.clone()).collect();
    let mut member_urls: HashSet<String> = HashSet::new();

    while let Some((category_url, depth)) = queue.pop_front() {
        let page = match fetcher.fetch(&category_url) {
            Ok(page) => page,
            Err(err) => {
                outcome.warnings.push(format!("{category_url}: {err}"));
                continue;
            }
        };
        let Ok(base) = Url::parse(&category_url) else {
            outcome
                .warnings
                .push(format!("{category_url}: not an absolute URL"));
            continue;
        };
        let document = Html::parse_document(&page.body);
        for anchor in document.select(&ANCHOR) {
            let Some(href) = anchor.value().attr("href") else {
                continue;
            };
            let Ok(target) = base.join(href) else {
                continue;
            };
            if !matches!(target.scheme(), "http" | "https") {
                continue;
            }
            let mut target = target;
            target.set_fragment(None);

            if is_pagination_link(&target) {
                let url = target.to_string();
                if visited.insert(url.clone()) {
                    queue.push_back((url, depth));
                }
                continue;
            }
            let Some(name) = wiki_page_name(&target) else {
                continue;
            };
            if name.starts_with("Category:") {
                let url = target.to_string();
                if depth < max_depth && visited.insert(url.clone()) {
                    queue.push_back((url, depth + 1));
                }
                continue;
            }
            if SKIP_NAMESPACES.iter().any(|ns| name.starts_with(ns)) || name.contains("_talk:") {
                continue;
            }
            let url = target.to_string();
            if member_urls.insert(url.clone()) {
                let text = collapse_ws(&anchor.text().collect::<String>());
                let title = if text.is_empty() {
                    name.replace('_', " ")
                } else {
                    text
                };
                outcome.refs.push(PageRef {
                    title,
                    url,
                    iso_hint: None,
                    origin: PageOrigin::CategoryCrawl,
                });
            }
        }
    }
    outcome
}

#[derive(Debug, Default)]
pub struct IsoLookupOutcome {
    pub refs: Vec<PageRef>,
    /// Codes whose `ISO_639:` page does not exist.
    pub not_found: Vec<String>,
    /// Codes that failed for other reasons (network), with the error.
    pub errors: Vec<String>,
}

fn valid_iso_code(code: &str) -> bool {
    (2..=3).contains(&code.len()) && code.bytes().all(|b| b.is_ascii_alphabetic())
}

fn sniff_title(body: &str) -> Option<String> {
    TITLE_TAG.captures(body).map(|caps| {
        collapse_ws(&caps[1])
            .trim_end_matches(" - Wikipedia")
            .to_string()
    })
}

/// Probes the `<base>/wiki/ISO_639:<code>` search URL for every code.
/// Resolvable codes yield a `PageRef` carrying the code as `iso_hint`;
/// missing pages land in the skip report.
pub fn discover_from_iso(
    fetcher: &dyn Fetcher,
    wiki_base: &str,
    iso_codes: &[String],
) -> IsoLookupOutcome {
    let mut outcome = IsoLookupOutcome::default();
    for raw in iso_codes {
        let code = raw.trim().to_lowercase();
        if code.is_empty() {
            continue;
        }
        if !valid_iso_code(&code) {
            outcome.errors.push(format!("{raw}: not an ISO 639 code"));
            continue;
        }
        let url = format!("{}/wiki/ISO_639:{}", wiki_base.trim_end_matches('/'), code);
        match fetcher.fetch(&url) {
            Ok(page) => {
                let title = sniff_title(&page.body).unwrap_or_else(|| format!("ISO 639:{code}"));
                outcome.refs.push(PageRef {
                    title,
                    // page.url is the post-redirect URL when the fetcher
                    // follows redirects
                    url: page.url,
                    iso_hint: Some(code),
                    origin: PageOrigin::IsoLookup,
                });
            }
            Err(FetchError::NotFound(_)) => outcome.not_found.push(code),
            Err(err) => outcome.errors.push(format!("{code}: {err}")),
        }
    }
    outcome
}

/// Page-title to ISO code table loaded from `title<TAB>code` lines.
#[derive(Debug, Clone, Default)]
pub struct IsoMapping {
    map: HashMap<String, String>,
}

impl IsoMapping {
    pub fn from_text(text: &str) -> io::Result<Self> {
        let mut map = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (title, code) = line.split_once('\t').ok_or_else(|| {
                io::Error::new(
                    io::ErrorKind::InvalidData,
                    format!("iso mapping line {}: expected `title<TAB>code`", i + 1),
                )
            })?;
            let code = code.trim().to_lowercase();
            if !valid_iso_code(&code) {
                return Err(io::Error::new(
                    io::ErrorKind::InvalidData,
                    format!("iso mapping line {}: `{code}` is not an ISO 639 code", i + 1),
                ));
            }
            map.insert(title.trim().to_string(), code);
        }
        Ok(IsoMapping { map })
    }

    pub fn from_file(path: &Path) -> io::Result<Self> {
        Self::from_text(&fs::read_to_string(path)?)
    }

    fn lookup(&self, title: &str) -> Option<String> {
        if let Some(code) = self.map.get(title) {
            return Some(code.clone());
        }
        title
            .strip_suffix(" language")
            .and_then(|stem| self.map.get(stem.trim()))
            .cloned()
    }
}

/// ISO code for a page: the discovery hint wins, then the mapping (exact
/// title, then the title with a trailing " language" stripped).
pub fn resolve_iso(page: &PageRef, mapping: Option<&IsoMapping>) -> Option<String> {
    if let Some(hint) = &page.iso_hint {
        let code = hint.trim().to_lowercase();
        return valid_iso_code(&code).then_some(code);
    }
    mapping.and_then(|m| m.lookup(&page.title))
}

/// How to read fetched page bodies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PageFormat {
    #[default]
    Auto,
    Wikitext,
    Html,
}

/// Sniffs wikitext (`{|` at a line start) versus rendered HTML.
pub fn sniff_format(body: &str) -> PageFormat {
    let head = body.trim_start().to_ascii_lowercase();
    if head.starts_with("<!doctype") || head.starts_with("<html") {
        return PageFormat::Html;
    }
    if body.lines().any(|line| line.trim_start().starts_with("{|")) {
        return PageFormat::Wikitext;
    }
    if head.contains("<table") {
        return PageFormat::Html;
    }
    PageFormat::Wikitext
}

pub fn parse_page_tables(body: &str, format: PageFormat) -> ParseOutput {
    let format = match format {
        PageFormat::Auto => sniff_format(body),
        other => other,
    };
    match format {
        PageFormat::Wikitext => parse_wikitext_tables(body),
        PageFormat::Html => parse_html_tables(body),
        PageFormat::Auto => unreachable!(),
    }
}

pub struct PipelineOptions {
    pub keywords: KeywordTable,
    pub iso_mapping: Option<IsoMapping>,
    pub format: PageFormat,
    /// Fetch-stage worker count; extraction itself is sequential.
    pub concurrency: usize,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            keywords: KeywordTable::default(),
            iso_mapping: None,
            format: PageFormat::Auto,
            concurrency: 1,
        }
    }
}

/// Machine-readable outcome of one pipeline run. Deliberately free of
/// timestamps so identical inputs produce identical reports.
#[derive(Debug, Clone, Default, Serialize)]
pub struct PipelineReport {
    pub pages_total: usize,
    pub pages_ok: usize,
    pub pages_failed: usize,
    pub tables_parsed: usize,
    pub entries_total: usize,
    pub files: Vec<String>,
    pub collisions: Vec<String>,
    pub write_errors: Vec<String>,
    pub warnings: Vec<String>,
    pub stats: CorpusStats,
    pub stats_parse_failures: Vec<String>,
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("output directory {dir} is not writable: {source}")]
    OutputDir {
        dir: String,
        #[source]
        source: io::Error,
    },
}

fn ensure_writable(out_dir: &Path) -> Result<(), PipelineError> {
    let fail = |source: io::Error| PipelineError::OutputDir {
        dir: out_dir.display().to_string(),
        source,
    };
    fs::create_dir_all(out_dir).map_err(fail)?;
    let probe = out_dir.join(".write-probe");
    fs::write(&probe, b"").map_err(fail)?;
    fs::remove_file(&probe).map_err(fail)?;
    Ok(())
}

fn fetch_all(
    fetcher: &dyn Fetcher,
    refs: &[PageRef],
    concurrency: usize,
) -> Vec<Result<FetchedPage, FetchError>> {
    if concurrency <= 1 || refs.len() <= 1 {
        return refs.iter().map(|r| fetcher.fetch(&r.url)).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<Result<FetchedPage, FetchError>>>> =
        refs.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..concurrency.min(refs.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= refs.len() {
                    break;
                }
                let result = fetcher.fetch(&refs[i].url);
                *slots[i].lock().unwrap() = Some(result);
            });
        }
    });
    slots
        .into_iter()
        .map(|slot| slot.into_inner().unwrap().expect("fetch slot filled"))
        .collect()
}

/// Fetches every page, mines it, writes the per-language TSV corpus and
/// `links.txt`, and computes corpus stats. Page refs are processed in URL
/// order after deduplication, and a failing page never disturbs the others;
/// the only fatal error is an unusable output directory.
pub fn run_pipeline(
    fetcher: &dyn Fetcher,
    refs: &[PageRef],
    options: &PipelineOptions,
    out_dir: &Path,
) -> Result<PipelineReport, PipelineError> {
    ensure_writable(out_dir)?;

    let mut refs: Vec<PageRef> = refs.to_vec();
    refs.sort_by(|a, b| a.url.cmp(&b.url));
    refs.dedup_by(|a, b| a.url == b.url);

    let mut report = PipelineReport {
        pages_total: refs.len(),
        ..PipelineReport::default()
    };

    let fetched = fetch_all(fetcher, &refs, options.concurrency);
    let mut docs = Vec::new();
    for (page_ref, result) in refs.iter().zip(fetched) {
        let page = match result {
            Ok(page) => page,
            Err(err) => {
                report.pages_failed += 1;
                report.warnings.push(format!("{}: {err}", page_ref.url));
                continue;
            }
        };
        report.pages_ok += 1;
        let parsed = parse_page_tables(&page.body, options.format);
        report.tables_parsed += parsed.grids.len();
        let mut doc = extract_language(
            &page_ref.title,
            &page_ref.url,
            &parsed.grids,
            &options.keywords,
        );
        let mut warnings = parsed.warnings;
        warnings.append(&mut doc.warnings);
        doc.warnings = warnings;
        doc.iso_code = resolve_iso(page_ref, options.iso_mapping.as_ref());
        report.entries_total += doc.entries.len();
        report
            .warnings
            .extend(doc.warnings.iter().map(|w| format!("{}: {w}", page_ref.url)));
        docs.push(doc);
    }

    let write_report = write_corpus(&docs, out_dir).map_err(|source| PipelineError::OutputDir {
        dir: out_dir.display().to_string(),
        source,
    })?;
    report.files = write_report.files;
    report.collisions = write_report.collisions;
    report.write_errors = write_report.errors;

    let stats_report = corpus_stats(out_dir).map_err(|source| PipelineError::OutputDir {
        dir: out_dir.display().to_string(),
        source,
    })?;
    report.stats = stats_report.stats;
    report.stats_parse_failures = stats_report.parse_failures;
    Ok(report)
}
