//! Table structure recognition: header bands, Type A / Type B shape
//! classification, and repeated-header detection and segmentation.

use crate::grid::TableGrid;

/// Rows and columns detected as header bands, sorted ascending.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HeaderLayout {
    pub header_rows: Vec<usize>,
    pub header_cols: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Horizontal,
    Vertical,
}

/// How a table presents its data.
///
/// Type A tables have one set of headers and relate cells along the
/// perpendicular axis; Type B tables have both row and column headers and
/// cross-classify every data cell by the two.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableShape {
    TypeA(Orientation),
    TypeB,
    Unrecognized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Rows,
    Columns,
}

/// Header bands recurring every `period` rows or columns, starting at 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RepetitionPattern {
    pub axis: Axis,
    pub period: usize,
}

/// A row qualifies as a header band when at least 80% of its cells are
/// header-kind and it holds at least two of them (the two-cell floor is
/// waived for single-column grids); columns are treated symmetrically.
pub fn find_header_bands(grid: &TableGrid) -> HeaderLayout {
    let n_rows = grid.n_rows();
    let n_cols = grid.n_cols();
    let mut layout = HeaderLayout::default();

    for r in 0..n_rows {
        let headers = (0..n_cols).filter(|&c| grid.cell(r, c).is_header()).count();
        if headers * 5 >= n_cols * 4 && (headers >= 2 || n_cols == 1) {
            layout.header_rows.push(r);
        }
    }
    for c in 0..n_cols {
        let headers = (0..n_rows).filter(|&r| grid.cell(r, c).is_header()).count();
        if headers * 5 >= n_rows * 4 && (headers >= 2 || n_rows == 1) {
            layout.header_cols.push(c);
        }
    }
    layout
}

pub fn classify_shape(layout: &HeaderLayout) -> TableShape {
    match (layout.header_rows.is_empty(), layout.header_cols.is_empty()) {
        (false, true) => TableShape::TypeA(Orientation::Horizontal),
        (true, false) => TableShape::TypeA(Orientation::Vertical),
        (false, false) => TableShape::TypeB,
        (true, true) => TableShape::Unrecognized,
    }
}

fn uniform_period(indices: &[usize], extent: usize) -> Option<usize> {
    if indices.len() < 2 || indices[0] != 0 {
        return None;
    }
    let period = indices[1];
    if period < 2 {
        return None;
    }
    let expected: Vec<usize> = (0..extent).step_by(period).collect();
    (indices == expected).then_some(period)
}

/// Looks for header bands at uniform spacing N >= 2 covering the whole grid
/// from index 0, with at least two occurrences. Rows are checked before
/// columns.
pub fn detect_repetition(layout: &HeaderLayout, grid: &TableGrid) -> Option<RepetitionPattern> {
    if let Some(period) = uniform_period(&layout.header_rows, grid.n_rows()) {
        return Some(RepetitionPattern {
            axis: Axis::Rows,
            period,
        });
    }
    if let Some(period) = uniform_period(&layout.header_cols, grid.n_cols()) {
        return Some(RepetitionPattern {
            axis: Axis::Columns,
            period,
        });
    }
    None
}

/// Cuts a repeated-header grid into consecutive bands of `period` rows (or
/// columns), each starting with its own header band and inheriting the
/// caption and source URL. A trailing partial band is kept only when it
/// still contains a data row/column; a leftover lone header band is dropped.
pub fn segment_bands(grid: &TableGrid, pattern: &RepetitionPattern) -> Vec<TableGrid> {
    let layout = find_header_bands(grid);
    let extent = match pattern.axis {
        Axis::Rows => grid.n_rows(),
        Axis::Columns => grid.n_cols(),
    };
    let mut segments = Vec::new();
    let mut start = 0;
    while start < extent {
        let end = (start + pattern.period).min(extent);
        let has_data = match pattern.axis {
            Axis::Rows => (start..end).any(|r| !layout.header_rows.contains(&r)),
            Axis::Columns => (start..end).any(|c| !layout.header_cols.contains(&c)),
        };
        if end - start == pattern.period || has_data {
            let cells = match pattern.axis {
                Axis::Rows => grid.cells[start..end].to_vec(),
                Axis::Columns => grid
                    .cells
                    .iter()
                    .map(|row| row[start..end].to_vec())
                    .collect(),
            };
            segments.push(TableGrid {
                caption: grid.caption.clone(),
                cells,
                source_url: grid.source_url.clone(),
            });
        }
        start = end;
    }
    segments
}

/// Header texts stacked above a data column, top to bottom, with consecutive
/// span copies deduplicated by origin and empty texts dropped.
pub fn column_header_path(grid: &TableGrid, layout: &HeaderLayout, col: usize) -> Vec<String> {
    let mut path = Vec::new();
    let mut last_origin = None;
    for &r in &layout.header_rows {
        let cell = grid.cell(r, col);
        if last_origin == Some(cell.origin) {
            continue;
        }
        last_origin = Some(cell.origin);
        if !cell.text.is_empty() {
            path.push(cell.text.clone());
        }
    }
    path
}

/// Header texts to the left of a data row, mirroring [`column_header_path`].
pub fn row_header_path(grid: &TableGrid, layout: &HeaderLayout, row: usize) -> Vec<String> {
    let mut path = Vec::new();
    let mut last_origin = None;
    for &c in &layout.header_cols {
        let cell = grid.cell(row, c);
        if last_origin == Some(cell.origin) {
            continue;
        }
        last_origin = Some(cell.origin);
        if !cell.text.is_empty() {
            path.push(cell.text.clone());
        }
    }
    path
}
