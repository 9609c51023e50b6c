//! Command-line front end: `extract` runs the miner over saved pages,
//! `crawl` discovers and fetches pages (live or from fixtures), and `stats`
//! summarizes an output directory.

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use phonmine_core::discovery::{
    discover_from_categories, discover_from_iso, run_pipeline, IsoMapping, PageFormat, PageOrigin,
    PageRef, PipelineOptions, PipelineReport, DEFAULT_CATEGORY_DEPTH, DEFAULT_CATEGORY_URLS,
    DEFAULT_WIKI_BASE,
};
use phonmine_core::fetch::{
    Fetcher, FixtureFetcher, HttpFetcher, MemoryFetcher, RetryingFetcher, SystemClock,
    ThrottledFetcher,
};
use phonmine_core::tsv::corpus_stats;
use phonmine_core::KeywordTable;
use serde::Serialize;
use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const USER_AGENT_ENV: &str = "PHONMINE_USER_AGENT";
const DEFAULT_USER_AGENT: &str =
    "phonmine/0.1 (pronunciation table mining; set PHONMINE_USER_AGENT to identify yourself)";
const PAGE_MANIFEST_NAME: &str = "pages.manifest";

#[derive(Parser)]
#[command(
    name = "phonmine",
    version,
    about = "Mine pronunciation tables from Wikipedia language pages into per-language TSV files"
)]
struct Cli {
    /// Print every per-page warning instead of only counts
    #[arg(short, long, global = true)]
    verbose: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mine saved page files (wikitext or HTML) into TSVs
    Extract(ExtractArgs),
    /// Discover language pages (categories and/or ISO codes) and mine them
    Crawl(CrawlArgs),
    /// Report corpus statistics over a directory of TSVs
    Stats(StatsArgs),
}

#[derive(clap::Args)]
struct ExtractArgs {
    /// Page file or directory of page files
    #[arg(long)]
    input: PathBuf,

    /// Output directory for TSVs and links.txt
    #[arg(long)]
    out: PathBuf,

    /// Force the page format instead of sniffing per page
    #[arg(long, value_enum, default_value_t = FormatArg::Auto)]
    format: FormatArg,

    /// Keyword overrides, one `category<TAB>keyword` per line
    #[arg(long)]
    keywords: Option<PathBuf>,

    /// Page-title to ISO code table, one `title<TAB>code` per line
    #[arg(long)]
    iso_map: Option<PathBuf>,

    /// Sidecar manifest `relative_path<TAB>url[<TAB>iso]`; defaults to
    /// `<input>/pages.manifest` when present
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(clap::Args)]
struct CrawlArgs {
    /// Category URL to walk (repeatable)
    #[arg(long = "category")]
    categories: Vec<String>,

    /// Walk the standard language category pages as well
    #[arg(long)]
    default_categories: bool,

    /// File of ISO 639 codes to probe, one per line
    #[arg(long)]
    iso_list: Option<PathBuf>,

    /// Output directory
    #[arg(long)]
    out: PathBuf,

    /// Offline fixture manifest (`url<TAB>relative_path`); replaces live HTTP
    #[arg(long)]
    fixtures: Option<PathBuf>,

    /// Minimum milliseconds between live requests
    #[arg(long, default_value_t = 1000)]
    rate_limit: u64,

    /// Subcategory recursion depth
    #[arg(long, default_value_t = DEFAULT_CATEGORY_DEPTH)]
    depth: usize,

    /// Parallel fetch workers (the rate limit stays global)
    #[arg(long, default_value_t = 1)]
    concurrency: usize,

    /// User agent for live requests (overrides PHONMINE_USER_AGENT)
    #[arg(long)]
    user_agent: Option<String>,

    /// Force the page format instead of sniffing per page
    #[arg(long, value_enum, default_value_t = FormatArg::Auto)]
    format: FormatArg,

    /// Keyword overrides, one `category<TAB>keyword` per line
    #[arg(long)]
    keywords: Option<PathBuf>,

    /// Page-title to ISO code table, one `title<TAB>code` per line
    #[arg(long)]
    iso_map: Option<PathBuf>,
}

#[derive(clap::Args)]
struct StatsArgs {
    /// Directory of TSV files
    #[arg(long)]
    dir: PathBuf,

    /// Emit one JSON object instead of aligned text
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Auto,
    Wikitext,
    Html,
}

impl From<FormatArg> for PageFormat {
    fn from(arg: FormatArg) -> PageFormat {
        match arg {
            FormatArg::Auto => PageFormat::Auto,
            FormatArg::Wikitext => PageFormat::Wikitext,
            FormatArg::Html => PageFormat::Html,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Extract(args) => cmd_extract(args, cli.verbose),
        Command::Crawl(args) => cmd_crawl(args, cli.verbose),
        Command::Stats(args) => cmd_stats(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn load_keywords(path: Option<&Path>) -> Result<KeywordTable> {
    match path {
        None => Ok(KeywordTable::default()),
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading keyword overrides {}", path.display()))?;
            KeywordTable::with_overrides(&text)
                .with_context(|| format!("parsing keyword overrides {}", path.display()))
        }
    }
}

fn load_iso_mapping(path: Option<&Path>) -> Result<Option<IsoMapping>> {
    path.map(|p| {
        IsoMapping::from_file(p).with_context(|| format!("reading iso mapping {}", p.display()))
    })
    .transpose()
}

/// `relative_path<TAB>url[<TAB>iso]` sidecar lines keyed by normalized
/// relative path.
fn parse_page_manifest(text: &str) -> Result<HashMap<String, (String, Option<String>)>> {
    let mut entries = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split('\t');
        let (Some(rel), Some(url)) = (fields.next(), fields.next()) else {
            bail!("manifest line {}: expected `path<TAB>url[<TAB>iso]`", i + 1);
        };
        let iso = fields
            .next()
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::to_lowercase);
        entries.insert(rel.trim().replace('\\', "/"), (url.trim().to_string(), iso));
    }
    Ok(entries)
}

fn collect_page_files(root: &Path, skip: Option<&Path>, out: &mut Vec<PathBuf>) -> Result<()> {
    let mut children: Vec<PathBuf> = fs::read_dir(root)
        .with_context(|| format!("reading input directory {}", root.display()))?
        .collect::<std::io::Result<Vec<_>>>()?
        .into_iter()
        .map(|entry| entry.path())
        .collect();
    children.sort();
    for child in children {
        let name = child.file_name().and_then(|n| n.to_str()).unwrap_or("");
        if name.starts_with('.') || name == PAGE_MANIFEST_NAME {
            continue;
        }
        if Some(child.as_path()) == skip {
            continue;
        }
        if child.is_dir() {
            collect_page_files(&child, skip, out)?;
        } else {
            out.push(child);
        }
    }
    Ok(())
}

fn cmd_extract(args: &ExtractArgs, verbose: bool) -> Result<()> {
    let input = &args.input;
    if !input.exists() {
        bail!("input {} does not exist", input.display());
    }
    let manifest_path = args.manifest.clone().or_else(|| {
        let default = input.join(PAGE_MANIFEST_NAME);
        default.is_file().then_some(default)
    });
    let manifest = match &manifest_path {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading manifest {}", path.display()))?;
            parse_page_manifest(&text)?
        }
        None => HashMap::new(),
    };

    let mut files = Vec::new();
    let root;
    if input.is_dir() {
        root = input.clone();
        collect_page_files(input, manifest_path.as_deref(), &mut files)?;
    } else {
        root = input.parent().unwrap_or(Path::new(".")).to_path_buf();
        files.push(input.clone());
    }
    if files.is_empty() {
        bail!("no page files under {}", input.display());
    }

    // unreadable files stay out of the fetcher so they surface as per-page
    // fetch failures instead of aborting the run
    let mut fetcher = MemoryFetcher::new();
    let mut refs = Vec::new();
    for path in &files {
        let rel = path
            .strip_prefix(&root)
            .unwrap_or(path)
            .to_string_lossy()
            .replace('\\', "/");
        let (url, iso_hint) = manifest
            .get(&rel)
            .cloned()
            .unwrap_or_else(|| (format!("file:{rel}"), None));
        let title = path
            .file_stem()
            .map(|stem| stem.to_string_lossy().replace('_', " "))
            .unwrap_or_else(|| rel.clone());
        if let Ok(body) = fs::read_to_string(path) {
            fetcher.insert(&url, body);
        }
        refs.push(PageRef {
            title,
            url,
            iso_hint,
            origin: PageOrigin::Manual,
        });
    }

    let options = PipelineOptions {
        keywords: load_keywords(args.keywords.as_deref())?,
        iso_mapping: load_iso_mapping(args.iso_map.as_deref())?,
        format: args.format.into(),
        concurrency: 1,
    };
    let report = run_pipeline(&fetcher, &refs, &options, &args.out)?;
    print_summary(&report, verbose);
    if report.pages_ok == 0 {
        bail!("no page was processed successfully");
    }
    Ok(())
}

fn read_iso_list(path: &Path) -> Result<Vec<String>> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading iso list {}", path.display()))?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect())
}

/// Everything one crawl run did, as written to `crawl_report.json`.
#[derive(Serialize)]
struct CrawlReport<'a> {
    category_urls: &'a [String],
    discovered_pages: usize,
    discovery_warnings: &'a [String],
    iso_not_found: &'a [String],
    iso_errors: &'a [String],
    pipeline: &'a PipelineReport,
}

fn cmd_crawl(args: &CrawlArgs, verbose: bool) -> Result<()> {
    let mut categories = args.categories.clone();
    if args.default_categories {
        categories.extend(DEFAULT_CATEGORY_URLS.iter().map(|s| s.to_string()));
    }
    let iso_codes = args.iso_list.as_deref().map(read_iso_list).transpose()?;
    if categories.is_empty() && iso_codes.is_none() {
        bail!("nothing to crawl: pass --category, --default-categories, or --iso-list");
    }
    fs::create_dir_all(&args.out)
        .with_context(|| format!("creating output directory {}", args.out.display()))?;

    let fetcher: Box<dyn Fetcher> = match &args.fixtures {
        Some(manifest) => Box::new(
            FixtureFetcher::from_manifest(manifest)
                .with_context(|| format!("loading fixture manifest {}", manifest.display()))?,
        ),
        None => {
            let user_agent = args
                .user_agent
                .clone()
                .or_else(|| std::env::var(USER_AGENT_ENV).ok())
                .unwrap_or_else(|| DEFAULT_USER_AGENT.to_string());
            // the throttle sits inside the retry loop so every attempt,
            // retries included, honors the configured gap
            Box::new(RetryingFetcher::new(
                ThrottledFetcher::new(
                    HttpFetcher::new(user_agent),
                    SystemClock::new(),
                    args.rate_limit,
                ),
                SystemClock::new(),
            ))
        }
    };

    let mut refs: Vec<PageRef> = Vec::new();
    let mut discovery_warnings = Vec::new();
    if !categories.is_empty() {
        let outcome = discover_from_categories(fetcher.as_ref(), &categories, args.depth);
        refs.extend(outcome.refs);
        discovery_warnings.extend(outcome.warnings);
    }
    let mut iso_not_found = Vec::new();
    let mut iso_errors = Vec::new();
    if let Some(codes) = &iso_codes {
        let outcome = discover_from_iso(fetcher.as_ref(), DEFAULT_WIKI_BASE, codes);
        refs.extend(outcome.refs);
        iso_not_found = outcome.not_found;
        iso_errors = outcome.errors;
    }

    let options = PipelineOptions {
        keywords: load_keywords(args.keywords.as_deref())?,
        iso_mapping: load_iso_mapping(args.iso_map.as_deref())?,
        format: args.format.into(),
        concurrency: args.concurrency,
    };
    let report = run_pipeline(fetcher.as_ref(), &refs, &options, &args.out)?;

    let crawl_report = CrawlReport {
        category_urls: &categories,
        discovered_pages: refs.len(),
        discovery_warnings: &discovery_warnings,
        iso_not_found: &iso_not_found,
        iso_errors: &iso_errors,
        pipeline: &report,
    };
    let mut json = serde_json::to_string_pretty(&crawl_report)?;
    json.push('\n');
    fs::write(args.out.join("crawl_report.json"), json)?;

    if !iso_not_found.is_empty() {
        println!("iso codes without a page: {}", iso_not_found.join(", "));
    }
    for error in &iso_errors {
        println!("iso lookup error: {error}");
    }
    if verbose {
        for warning in &discovery_warnings {
            println!("discovery warning: {warning}");
        }
    }
    print_summary(&report, verbose);
    Ok(())
}

#[derive(Serialize)]
struct StatsJson<'a> {
    n_languages: usize,
    n_with_phonemes: usize,
    n_with_g2p: usize,
    n_unclassified_only: usize,
    parse_failures: &'a [String],
}

fn cmd_stats(args: &StatsArgs) -> Result<()> {
    let report = corpus_stats(&args.dir)
        .with_context(|| format!("reading stats from {}", args.dir.display()))?;
    let stats = report.stats;
    if args.json {
        let json = StatsJson {
            n_languages: stats.n_languages,
            n_with_phonemes: stats.n_with_phonemes,
            n_with_g2p: stats.n_with_g2p,
            n_unclassified_only: stats.n_unclassified_only,
            parse_failures: &report.parse_failures,
        };
        println!("{}", serde_json::to_string(&json)?);
    } else {
        println!("languages          {:>6}", stats.n_languages);
        println!("with phonemes      {:>6}", stats.n_with_phonemes);
        println!("with g2p           {:>6}", stats.n_with_g2p);
        println!("unclassified only  {:>6}", stats.n_unclassified_only);
        println!("parse failures     {:>6}", report.parse_failures.len());
        for failure in &report.parse_failures {
            println!("  {failure}");
        }
    }
    Ok(())
}

fn print_summary(report: &PipelineReport, verbose: bool) {
    println!(
        "pages: {} ok, {} failed; tables: {}; entries: {}; files written: {}; warnings: {}",
        report.pages_ok,
        report.pages_failed,
        report.tables_parsed,
        report.entries_total,
        report.files.len(),
        report.warnings.len(),
    );
    if verbose {
        for warning in &report.warnings {
            println!("warning: {warning}");
        }
        for collision in &report.collisions {
            println!("collision: {collision}");
        }
        for error in &report.write_errors {
            println!("write error: {error}");
        }
    }
}
