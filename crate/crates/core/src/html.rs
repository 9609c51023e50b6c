//! Lenient HTML table extraction for rendered pages.

use crate::clean::clean_cell_text;
use crate::grid::{resolve_spans, CellKind, RawCell};
use crate::wikitext::ParseOutput;
use scraper::{ElementRef, Html, Selector};
use std::sync::LazyLock;

static TABLE: LazyLock<Selector> = LazyLock::new(|| Selector::parse("table").unwrap());
static TR: LazyLock<Selector> = LazyLock::new(|| Selector::parse("tr").unwrap());
static CAPTION: LazyLock<Selector> = LazyLock::new(|| Selector::parse("caption").unwrap());

/// Parses tables whose class list contains `"wikitable"`, the class the
/// MediaWiki renderer puts on content tables.
pub fn parse_html_tables(html: &str) -> ParseOutput {
    parse_html_tables_with_class(html, Some("wikitable"))
}

/// Same grid semantics as the wikitext parser: `th` maps to header cells,
/// `td` to data cells, `caption` to the caption, and rowspan/colspan are
/// honored. `class_filter: None` accepts every table. Tag soup is tolerated
/// by the underlying HTML5 parser; nested tables flatten into their parent
/// cell's text and are not emitted separately.
pub fn parse_html_tables_with_class(html: &str, class_filter: Option<&str>) -> ParseOutput {
    let document = Html::parse_document(html);
    let mut out = ParseOutput::default();

    let class_matches = |element: ElementRef| match class_filter {
        None => true,
        Some(class) => element.value().classes().any(|c| c == class),
    };

    for table in document.select(&TABLE) {
        // a table inside an emitted table is absorbed into its parent cell's
        // text; one inside a filtered-out table still gets emitted on its own
        let absorbed = table
            .ancestors()
            .filter_map(ElementRef::wrap)
            .any(|a| a.value().name() == "table" && class_matches(a));
        if absorbed || !class_matches(table) {
            continue;
        }
        let mut raw_rows: Vec<Vec<RawCell>> = Vec::new();
        for tr in table.select(&TR) {
            if enclosing_table(tr).map(|t| t.id()) != Some(table.id()) {
                continue;
            }
            let mut row = Vec::new();
            for child in tr.children().filter_map(ElementRef::wrap) {
                let kind = match child.value().name() {
                    "th" => CellKind::Header,
                    "td" => CellKind::Data,
                    _ => continue,
                };
                row.push(RawCell::with_spans(
                    kind,
                    child.inner_html(),
                    span_attr(child, "rowspan"),
                    span_attr(child, "colspan"),
                ));
            }
            if !row.is_empty() {
                raw_rows.push(row);
            }
        }
        if raw_rows.is_empty() {
            out.warnings
                .push("table with no rows dropped".to_string());
            continue;
        }
        let mut grid = resolve_spans(&raw_rows);
        grid.caption = table
            .select(&CAPTION)
            .find(|caption| enclosing_table(*caption).map(|t| t.id()) == Some(table.id()))
            .map(|caption| clean_cell_text(&caption.inner_html()))
            .filter(|text| !text.is_empty());
        out.grids.push(grid);
    }
    out
}

fn enclosing_table<'a>(element: ElementRef<'a>) -> Option<ElementRef<'a>> {
    element
        .ancestors()
        .filter_map(ElementRef::wrap)
        .find(|ancestor| ancestor.value().name() == "table")
}

fn span_attr(element: ElementRef, name: &str) -> usize {
    element
        .value()
        .attr(name)
        .and_then(|v| v.trim().parse::<usize>().ok())
        .unwrap_or(1)
        .max(1)
}
