//! Span-resolved rectangular table grids.
//!
//! Both the wikitext and the HTML parser produce ragged rows of [`RawCell`]s
//! (each carrying its declared rowspan/colspan) and funnel them through
//! [`resolve_spans`] to obtain a rectangular [`TableGrid`] in which every
//! position covered by a spanning cell holds a copy of that cell.

use crate::clean::clean_cell_text;

/// Whether a cell was marked up as a header (`!` in wikitext, `th` in HTML)
/// or as plain data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CellKind {
    Header,
    Data,
}

/// A cell as read from the source markup, before span resolution.
///
/// `rowspan` and `colspan` are clamped to at least 1 on construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawCell {
    pub kind: CellKind,
    pub text: String,
    pub rowspan: usize,
    pub colspan: usize,
}

impl RawCell {
    pub fn new(kind: CellKind, text: impl Into<String>) -> Self {
        RawCell {
            kind,
            text: text.into(),
            rowspan: 1,
            colspan: 1,
        }
    }

    pub fn with_spans(
        kind: CellKind,
        text: impl Into<String>,
        rowspan: usize,
        colspan: usize,
    ) -> Self {
        RawCell {
            kind,
            text: text.into(),
            rowspan: rowspan.max(1),
            colspan: colspan.max(1),
        }
    }
}

/// A resolved grid cell with cleaned plain text.
///
/// `origin` is the (row, col) of the top-left position of the source cell;
/// all positions covered by one spanning source cell share the same origin,
/// which lets consumers deduplicate span copies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    pub kind: CellKind,
    pub text: String,
    pub origin: (usize, usize),
}

impl Cell {
    pub fn is_header(&self) -> bool {
        self.kind == CellKind::Header
    }

    pub fn is_empty(&self) -> bool {
        self.text.is_empty()
    }
}

/// A rectangular, span-resolved table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableGrid {
    pub caption: Option<String>,
    pub cells: Vec<Vec<Cell>>,
    pub source_url: Option<String>,
}

impl TableGrid {
    pub fn n_rows(&self) -> usize {
        self.cells.len()
    }

    pub fn n_cols(&self) -> usize {
        self.cells.first().map_or(0, Vec::len)
    }

    pub fn cell(&self, row: usize, col: usize) -> &Cell {
        &self.cells[row][col]
    }

    pub fn is_empty(&self) -> bool {
        self.n_rows() == 0 || self.n_cols() == 0
    }

    /// True when every row has the same number of cells.
    pub fn is_rectangular(&self) -> bool {
        let w = self.n_cols();
        self.cells.iter().all(|r| r.len() == w)
    }
}

/// Lays out ragged rows of raw cells into a rectangular grid.
///
/// Placement is row-major: each cell takes the first free column in its row,
/// then claims `rowspan x colspan` positions. Positions already claimed by an
/// earlier cell stay with that cell, and rowspans running past the last raw
/// row are clipped. Short rows are padded on the right with empty data cells.
/// Cell text is cleaned via [`clean_cell_text`] during placement.
pub fn resolve_spans(raw: &[Vec<RawCell>]) -> TableGrid {
    let n_rows = raw.len();
    let mut grid: Vec<Vec<Option<Cell>>> = vec![Vec::new(); n_rows];

    for (r, raw_row) in raw.iter().enumerate() {
        for raw_cell in raw_row {
            // First free column in this row.
            let mut col = 0;
            while grid[r].get(col).is_some_and(Option::is_some) {
                col += 1;
            }
            let cell = Cell {
                kind: raw_cell.kind,
                text: clean_cell_text(&raw_cell.text),
                origin: (r, col),
            };
            let rowspan = raw_cell.rowspan.max(1).min(n_rows - r);
            let colspan = raw_cell.colspan.max(1);
            for row in grid.iter_mut().skip(r).take(rowspan) {
                for cc in col..col + colspan {
                    if row.len() <= cc {
                        row.resize(cc + 1, None);
                    }
                    // Earlier (row-major) claims win.
                    if row[cc].is_none() {
                        row[cc] = Some(cell.clone());
                    }
                }
            }
        }
    }

    let width = grid.iter().map(Vec::len).max().unwrap_or(0);
    let cells = grid
        .into_iter()
        .enumerate()
        .map(|(r, row)| {
            let mut row: Vec<Option<Cell>> = row;
            row.resize(width, None);
            row.into_iter()
                .enumerate()
                .map(|(c, slot)| {
                    slot.unwrap_or(Cell {
                        kind: CellKind::Data,
                        text: String::new(),
                        origin: (r, c),
                    })
                })
                .collect()
        })
        .collect();

    TableGrid {
        caption: None,
        cells,
        source_url: None,
    }
}

/// Hand-built grid fixtures shared by the unit tests of several modules.
#[cfg(test)]
pub(crate) mod test_grids {
    use super::{Cell, CellKind, TableGrid};

    pub fn grid_from(rows: &[&[(&str, CellKind)]]) -> TableGrid {
        let cells = rows
            .iter()
            .enumerate()
            .map(|(r, row)| {
                row.iter()
                    .enumerate()
                    .map(|(c, (text, kind))| Cell {
                        kind: *kind,
                        text: text.to_string(),
                        origin: (r, c),
                    })
                    .collect()
            })
            .collect();
        TableGrid {
            caption: None,
            cells,
            source_url: None,
        }
    }

    pub fn h(text: &str) -> (&str, CellKind) {
        (text, CellKind::Header)
    }

    pub fn d(text: &str) -> (&str, CellKind) {
        (text, CellKind::Data)
    }
}
