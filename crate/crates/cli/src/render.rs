//! Rendering of rows as JSON, CSV or an aligned plain-text table.

use std::fmt::Display;

use clap::ValueEnum;
use scaffold_core::special::WeakReport;
use scaffold_core::StructureReport;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

/// Flat view of a record: column names match the JSON field names.
pub trait Row {
    fn headers() -> Vec<&'static str>;
    fn cells(&self) -> Vec<String>;
}

/// `{0,1,2}`.
pub fn set_notation<T: Display>(xs: &[T]) -> String {
    format!("{{{}}}", join(xs, ","))
}

/// `[0,1,1,2]`.
pub fn vec_notation<T: Display>(xs: &[T]) -> String {
    format!("[{}]", join(xs, ","))
}

fn join<T: Display>(xs: &[T], sep: &str) -> String {
    xs.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(sep)
}

fn opt<T: Display>(x: Option<T>) -> String {
    x.map_or_else(String::new, |v| v.to_string())
}

impl Row for StructureReport {
    fn headers() -> Vec<&'static str> {
        vec![
            "p",
            "n",
            "b",
            "h",
            "b_exponent",
            "d",
            "w",
            "free",
            "dd",
            "ee",
            "min_generators",
            "embedding_dimension",
            "tolerance_required",
        ]
    }

    fn cells(&self) -> Vec<String> {
        vec![
            self.p.to_string(),
            self.n.to_string(),
            vec_notation(&self.b),
            self.h.to_string(),
            self.b_exponent.to_string(),
            vec_notation(&self.d),
            vec_notation(&self.w),
            self.free.to_string(),
            set_notation(&self.dd),
            set_notation(&self.ee),
            self.min_generators.to_string(),
            self.embedding_dimension.to_string(),
            self.tolerance_required.to_string(),
        ]
    }
}

impl Row for WeakReport {
    fn headers() -> Vec<&'static str> {
        vec![
            "p",
            "n",
            "h",
            "residue_one",
            "h_prime",
            "m",
            "k",
            "free",
            "min_generators",
            "embedding_dimension",
        ]
    }

    fn cells(&self) -> Vec<String> {
        vec![
            self.p.to_string(),
            self.n.to_string(),
            self.h.to_string(),
            self.residue_one.to_string(),
            opt(self.h_prime),
            opt(self.m),
            opt(self.k),
            self.free.to_string(),
            self.min_generators.to_string(),
            self.embedding_dimension.to_string(),
        ]
    }
}

pub fn json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

pub fn csv<R: Row>(rows: &[R]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(R::headers()).expect("in-memory write");
    for r in rows {
        w.write_record(r.cells()).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells")
}

/// Left-aligned columns separated by two spaces.
pub fn table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, &w)| format!("{c:<w$}"))
            .collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(headers.to_vec());
    for row in rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
    }
    out
}

pub fn rows<R: Row + Serialize>(rows: &[R], format: Format) -> String {
    match format {
        Format::Json => json(rows),
        Format::Csv => csv(rows),
        Format::Table => {
            let cells: Vec<Vec<String>> = rows.iter().map(Row::cells).collect();
            table(&R::headers(), &cells)
        }
    }
}
