//! Delimiter-separated integer tables for feature-selection data.

use std::sync::Arc;

use crate::constraints::ConstraintSpec;
use crate::error::{Error, Result};
use crate::instance::{DiversityKind, Instance};
use crate::objectives::{normalized_mi_from_data, Quality, TopPMiQuality};

/// A parsed table, stored column-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub header: Option<Vec<String>>,
    pub columns: Vec<Vec<i64>>,
}

impl Table {
    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Delimiter {
    Char(char),
    Whitespace,
}

impl Delimiter {
    fn detect(line: &str) -> Self {
        ['\t', ',', ';']
            .into_iter()
            .find(|&c| line.contains(c))
            .map_or(Self::Whitespace, Self::Char)
    }

    fn split<'a>(self, line: &'a str) -> Vec<&'a str> {
        match self {
            Self::Char(c) => line.split(c).map(str::trim).collect(),
            Self::Whitespace => line.split_whitespace().collect(),
        }
    }
}

/// Parses one row per sample with integer cells.
///
/// The delimiter is the first of tab, comma or semicolon found on the first
/// non-blank line, otherwise runs of whitespace. That line is a header when any
/// of its cells is not an integer. Blank lines are skipped.
pub fn parse_table(text: &str) -> Result<Table> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let Some((first_no, first)) = lines.next() else {
        return Err(Error::Parse("empty table".into()));
    };
    let delim = Delimiter::detect(first);
    let first_cells = delim.split(first);
    let width = first_cells.len();
    let numeric: Option<Vec<i64>> = first_cells.iter().map(|c| c.parse().ok()).collect();
    let mut columns = vec![Vec::new(); width];
    let header = match numeric {
        Some(row) => {
            push_row(&mut columns, row);
            None
        }
        None => Some(first_cells.iter().map(|c| c.to_string()).collect()),
    };
    for (no, line) in lines {
        let cells = delim.split(line);
        if cells.len() != width {
            return Err(Error::Parse(format!(
                "line {}: {} cells, expected {width} (as on line {})",
                no + 1,
                cells.len(),
                first_no + 1
            )));
        }
        let row = cells
            .iter()
            .map(|c| {
                c.parse::<i64>()
                    .map_err(|_| Error::Parse(format!("line {}: `{c}` is not an integer", no + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        push_row(&mut columns, row);
    }
    if columns.first().is_none_or(Vec::is_empty) {
        return Err(Error::Parse("table has no data rows".into()));
    }
    Ok(Table { header, columns })
}

fn push_row(columns: &mut [Vec<i64>], row: Vec<i64>) {
    for (col, v) in columns.iter_mut().zip(row) {
        col.push(v);
    }
}

/// Builds a feature-selection instance: features are items, quality is the
/// top-`p` normalized MI with the label columns, distances are the normalized
/// information distance between feature columns, and diversity is a sum.
pub fn mi_instance(
    features: &Table,
    labels: &Table,
    p: usize,
    lambda: f64,
    constraint: ConstraintSpec,
) -> Result<Instance> {
    if features.rows() != labels.rows() {
        return Err(Error::DimensionMismatch(format!(
            "{} feature rows but {} label rows",
            features.rows(),
            labels.rows()
        )));
    }
    let data = normalized_mi_from_data(&features.columns, &labels.columns)?;
    let quality = TopPMiQuality::new(data.features, data.labels, p, data.mi)?;
    Instance::from_parts(
        Arc::new(Quality::TopPMi(quality)),
        Arc::new(data.feature_distance),
        lambda,
        DiversityKind::Sum,
        constraint,
        features.header.clone(),
    )
}
