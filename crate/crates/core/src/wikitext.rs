//! Line-based parser for MediaWiki table markup (`{|`, `|-`, `!`, `|`, `|+`).

use crate::clean::clean_cell_text;
use crate::grid::{resolve_spans, CellKind, RawCell, TableGrid};
use regex::Regex;
use std::sync::LazyLock;

static ROWSPAN: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r#"(?i)\browspan\s*=\s*["']?(\d+)"#).unwrap());
static COLSPAN: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r#"(?i)\bcolspan\s*=\s*["']?(\d+)"#).unwrap());

/// Grids in document order plus non-fatal parse warnings.
#[derive(Debug, Clone, Default)]
pub struct ParseOutput {
    pub grids: Vec<TableGrid>,
    pub warnings: Vec<String>,
}

/// Parses every top-level `{| ... |}` block in a page. Nested tables are
/// flattened into their parent cell's text; unterminated blocks are skipped
/// with a warning and never abort the page.
pub fn parse_wikitext_tables(text: &str) -> ParseOutput {
    let lines: Vec<&str> = text.lines().collect();
    let mut out = ParseOutput::default();
    let mut i = 0;
    while i < lines.len() {
        if lines[i].trim_start().starts_with("{|") {
            match parse_table(&lines, &mut i, &mut out.warnings) {
                Some(grid) if !grid.is_empty() => out.grids.push(grid),
                Some(_) => out.warnings.push("table with no cells skipped".to_string()),
                None => {}
            }
        } else {
            i += 1;
        }
    }
    out
}

/// What continuation lines inside a table attach to.
enum Target {
    Nothing,
    Caption,
    Cell,
}

/// Parses one table block with `*i` on its `{|` line, leaving `*i` on the
/// line after the matching `|}`. Returns `None` (after warning) when the
/// block never terminates.
fn parse_table(lines: &[&str], i: &mut usize, warnings: &mut Vec<String>) -> Option<TableGrid> {
    *i += 1; // past the "{| attributes" line
    let mut caption = String::new();
    let mut rows: Vec<Vec<RawCell>> = Vec::new();
    let mut current: Vec<RawCell> = Vec::new();
    let mut target = Target::Nothing;

    loop {
        let Some(line) = lines.get(*i) else {
            warnings.push("unterminated table block skipped".to_string());
            return None;
        };
        let trimmed = line.trim_start();

        if trimmed.starts_with("{|") {
            // nested table: flatten its cell texts into the open cell
            if let Some(nested) = parse_table(lines, i, warnings) {
                let flat = flatten_grid_text(&nested);
                if !flat.is_empty() {
                    if let (Target::Cell, Some(cell)) = (&target, current.last_mut()) {
                        cell.text.push(' ');
                        cell.text.push_str(&flat);
                    }
                }
            }
            continue;
        }
        if trimmed.starts_with("|}") {
            *i += 1;
            if !current.is_empty() {
                rows.push(current);
            }
            let mut grid = resolve_spans(&rows);
            let caption = clean_cell_text(&caption);
            grid.caption = (!caption.is_empty()).then_some(caption);
            return Some(grid);
        }
        if trimmed.starts_with("|-") {
            if !current.is_empty() {
                rows.push(std::mem::take(&mut current));
            }
            target = Target::Nothing;
        } else if let Some(rest) = trimmed.strip_prefix("|+") {
            let (_, content) = split_attributes(rest);
            if !caption.is_empty() {
                caption.push('\n');
            }
            caption.push_str(content);
            target = Target::Caption;
        } else if let Some(rest) = trimmed.strip_prefix('!') {
            let rest = rest.strip_prefix('!').unwrap_or(rest);
            for chunk in split_cells(rest, &["!!", "||"]) {
                current.push(raw_cell(CellKind::Header, chunk));
            }
            target = Target::Cell;
        } else if let Some(rest) = trimmed.strip_prefix('|') {
            let rest = rest.strip_prefix('|').unwrap_or(rest);
            for chunk in split_cells(rest, &["||"]) {
                current.push(raw_cell(CellKind::Data, chunk));
            }
            target = Target::Cell;
        } else {
            // continuation of the open cell or caption
            match target {
                Target::Cell => {
                    if let Some(cell) = current.last_mut() {
                        cell.text.push('\n');
                        cell.text.push_str(line);
                    }
                }
                Target::Caption => {
                    caption.push('\n');
                    caption.push_str(line);
                }
                Target::Nothing => {}
            }
        }
        *i += 1;
    }
}

fn raw_cell(kind: CellKind, chunk: &str) -> RawCell {
    let (attrs, content) = split_attributes(chunk);
    let span = |re: &Regex| {
        attrs
            .and_then(|a| re.captures(a))
            .and_then(|c| c[1].parse::<usize>().ok())
            .unwrap_or(1)
    };
    RawCell::with_spans(kind, content.trim(), span(&ROWSPAN), span(&COLSPAN))
}

/// Splits `attr1=... attr2=... | content` at the first top-level pipe, when
/// the prefix looks like an attribute list (has `=`, no wiki markup).
fn split_attributes(chunk: &str) -> (Option<&str>, &str) {
    if let Some(pos) = find_top_level(chunk, "|") {
        let prefix = &chunk[..pos];
        if prefix.contains('=') && !prefix.contains("[[") && !prefix.contains("{{") {
            return (Some(prefix), &chunk[pos + 1..]);
        }
    }
    (None, chunk)
}

/// Position of the first occurrence of `needle` outside `[[...]]`/`{{...}}`.
fn find_top_level(s: &str, needle: &str) -> Option<usize> {
    let mut pos = 0;
    let mut link = 0usize;
    let mut tmpl = 0usize;
    while pos < s.len() {
        let rest = &s[pos..];
        if rest.starts_with("[[") {
            link += 1;
            pos += 2;
        } else if rest.starts_with("]]") {
            link = link.saturating_sub(1);
            pos += 2;
        } else if rest.starts_with("{{") {
            tmpl += 1;
            pos += 2;
        } else if rest.starts_with("}}") {
            tmpl = tmpl.saturating_sub(1);
            pos += 2;
        } else if link == 0 && tmpl == 0 && rest.starts_with(needle) {
            return Some(pos);
        } else {
            pos += rest.chars().next().map_or(1, char::len_utf8);
        }
    }
    None
}

/// Splits a cell line on `!!` / `||` separators outside wiki markup.
fn split_cells<'a>(s: &'a str, separators: &[&str]) -> Vec<&'a str> {
    let mut parts = Vec::new();
    let mut start = 0;
    let mut pos = 0;
    let mut link = 0usize;
    let mut tmpl = 0usize;
    while pos < s.len() {
        let rest = &s[pos..];
        if rest.starts_with("[[") {
            link += 1;
            pos += 2;
        } else if rest.starts_with("]]") {
            link = link.saturating_sub(1);
            pos += 2;
        } else if rest.starts_with("{{") {
            tmpl += 1;
            pos += 2;
        } else if rest.starts_with("}}") {
            tmpl = tmpl.saturating_sub(1);
            pos += 2;
        } else if link == 0 && tmpl == 0 {
            if let Some(sep) = separators.iter().find(|sep| rest.starts_with(**sep)) {
                parts.push(&s[start..pos]);
                pos += sep.len();
                start = pos;
            } else {
                pos += rest.chars().next().map_or(1, char::len_utf8);
            }
        } else {
            pos += rest.chars().next().map_or(1, char::len_utf8);
        }
    }
    parts.push(&s[start..]);
    parts
}

/// Row-major cell texts of a nested grid, span copies skipped.
fn flatten_grid_text(grid: &TableGrid) -> String {
    let mut parts = Vec::new();
    if let Some(caption) = &grid.caption {
        parts.push(caption.clone());
    }
    for (r, row) in grid.cells.iter().enumerate() {
        for (c, cell) in row.iter().enumerate() {
            if cell.origin == (r, c) && !cell.text.is_empty() {
                parts.push(cell.text.clone());
            }
        }
    }
    parts.join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::CellKind;

    #[test]
    fn simple_header_data_table() {
        let out = parse_wikitext_tables("{|\n! IPA !! Letter\n|-\n| b || B\n|}");
        assert!(out.warnings.is_empty());
        assert_eq!(out.grids.len(), 1);
        let grid = &out.grids[0];
        assert_eq!(grid.n_rows(), 2);
        assert_eq!(grid.n_cols(), 2);
        assert_eq!(grid.cell(0, 0).kind, CellKind::Header);
        assert_eq!(grid.cell(0, 0).text, "IPA");
        assert_eq!(grid.cell(0, 1).text, "Letter");
        assert_eq!(grid.cell(1, 0).kind, CellKind::Data);
        assert_eq!(grid.cell(1, 0).text, "b");
        assert_eq!(grid.cell(1, 1).text, "B");
    }

    #[test]
    fn no_tables_no_grids() {
        let out = parse_wikitext_tables("");
        assert!(out.grids.is_empty());
        assert!(out.warnings.is_empty());
        let out = parse_wikitext_tables("Just some prose.\nNo table here.");
        assert!(out.grids.is_empty());
    }

    #[test]
    fn caption_and_colspan() {
        let out =
            parse_wikitext_tables("{|\n|+ Consonants\n! colspan=\"2\" | Labial\n|-\n| p || b\n|}");
        assert_eq!(out.grids.len(), 1);
        let grid = &out.grids[0];
        assert_eq!(grid.caption.as_deref(), Some("Consonants"));
        assert_eq!(grid.cell(0, 0).text, "Labial");
        assert_eq!(grid.cell(0, 1).text, "Labial");
        assert_eq!(grid.cell(0, 1).origin, (0, 0));
        assert_eq!(grid.cell(1, 0).text, "p");
        assert_eq!(grid.cell(1, 1).text, "b");
    }

    #[test]
    fn one_cell_per_line_with_attributes() {
        let out = parse_wikitext_tables(
            "{| class=\"wikitable\"\n|-\n! style=\"width: 3em\" | Letter\n! IPA\n|-\n| b\n| {{IPA|/b/}}\n|}",
        );
        let grid = &out.grids[0];
        assert_eq!(grid.cell(0, 0).text, "Letter");
        assert_eq!(grid.cell(0, 1).text, "IPA");
        assert_eq!(grid.cell(1, 0).text, "b");
        assert_eq!(grid.cell(1, 1).text, "/b/");
    }

    #[test]
    fn rowspan_expansion() {
        let out = parse_wikitext_tables("{|\n| rowspan=\"2\" | a || b\n|-\n| c\n|}");
        let grid = &out.grids[0];
        assert_eq!(grid.n_rows(), 2);
        assert_eq!(grid.cell(1, 0).text, "a");
        assert_eq!(grid.cell(1, 0).origin, (0, 0));
        assert_eq!(grid.cell(1, 1).text, "c");
    }

    #[test]
    fn multiple_tables_in_document_order() {
        let out = parse_wikitext_tables("{|\n| one\n|}\nprose\n{|\n| two\n|}");
        assert_eq!(out.grids.len(), 2);
        assert_eq!(out.grids[0].cell(0, 0).text, "one");
        assert_eq!(out.grids[1].cell(0, 0).text, "two");
    }

    #[test]
    fn unterminated_block_warns_and_continues() {
        let out = parse_wikitext_tables("{|\n! a\nprose after\n");
        assert!(out.grids.is_empty());
        assert_eq!(out.warnings.len(), 1);
        // an unterminated block followed by a good table: only the good one parses
        let out = parse_wikitext_tables("{|\n! a\n");
        assert_eq!(out.warnings.len(), 1);
    }

    #[test]
    fn nested_table_flattens_into_parent_cell() {
        let out = parse_wikitext_tables("{|\n| outer\n{|\n| inner1 || inner2\n|}\n|-\n| next\n|}");
        assert_eq!(out.grids.len(), 1);
        let grid = &out.grids[0];
        assert_eq!(grid.cell(0, 0).text, "outer inner1 inner2");
        assert_eq!(grid.cell(1, 0).text, "next");
    }

    #[test]
    fn multiline_cell_content_joins() {
        let out = parse_wikitext_tables("{|\n| first\nsecond\n|}");
        assert_eq!(out.grids[0].cell(0, 0).text, "first second");
    }

    #[test]
    fn empty_table_dropped_with_warning() {
        let out = parse_wikitext_tables("{|\n|}");
        assert!(out.grids.is_empty());
        assert_eq!(out.warnings.len(), 1);
    }

    #[test]
    fn double_pipe_inside_template_is_not_a_separator() {
        let out = parse_wikitext_tables("{|\n| {{x|a||b}} || plain\n|}");
        let grid = &out.grids[0];
        assert_eq!(grid.n_cols(), 2);
        assert_eq!(grid.cell(0, 1).text, "plain");
    }

    #[test]
    fn link_label_with_pipe_stays_in_one_cell() {
        let out = parse_wikitext_tables("{|\n| [[Voiced bilabial plosive|b]] || x\n|}");
        let grid = &out.grids[0];
        assert_eq!(grid.cell(0, 0).text, "b");
        assert_eq!(grid.cell(0, 1).text, "x");
    }

    #[test]
    fn leading_double_pipe_line() {
        let out = parse_wikitext_tables("{|\n|| a || b\n|}");
        let grid = &out.grids[0];
        assert_eq!(grid.n_cols(), 2);
        assert_eq!(grid.cell(0, 0).text, "a");
    }

    #[test]
    fn header_row_then_data_row_without_explicit_first_separator() {
        let out = parse_wikitext_tables("{| class=\"wikitable\"\n|-\n! Letter !! IPA\n|-\n| m || /m/\n|}");
        let grid = &out.grids[0];
        assert_eq!(grid.n_rows(), 2);
        assert_eq!(grid.cell(0, 0).kind, CellKind::Header);
        assert_eq!(grid.cell(1, 1).text, "/m/");
    }
}
