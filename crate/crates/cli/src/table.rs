//! Result tables and their CSV/JSON encodings.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::CliError;

/// One table cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn to_csv_field(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format_sig(*v, 15),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Meta {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    /// The effective configuration, after flags were merged over the file.
    pub config: Map<String, Value>,
    /// Taken from `SOURCE_DATE_EPOCH` when set, so that output stays reproducible.
    pub timestamp: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultTable {
    pub meta: Meta,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub details: Option<Value>,
}

impl ResultTable {
    pub fn new(meta: Meta, columns: &[&str]) -> Self {
        ResultTable {
            meta,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            details: None,
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row width must match the header"
        );
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let header: Vec<String> = self.columns.iter().map(|c| quote(c)).collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for row in &self.rows {
            let fields: Vec<String> = row.iter().map(|c| quote(&c.to_csv_field())).collect();
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("table serializes");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Writes the table to `path`, or to stdout when no path is given.
pub fn emit_results(
    table: &ResultTable,
    format: Format,
    path: Option<&Path>,
) -> Result<(), CliError> {
    let text = match format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(),
    };
    match path {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Io {
            path: p.display().to_string(),
            source,
        }),
        None => io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io {
                path: "<stdout>".into(),
                source,
            }),
    }
}

fn quote(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// `%.{digits}g`: fixed notation for moderate exponents, scientific otherwise,
/// trailing zeros removed.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        format!("{}e{}", trim_zeros(mantissa), exp)
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(format_sig(1.0, 15), "1");
        assert_eq!(format_sig(0.1 + 0.2, 15), "0.3");
        assert_eq!(format_sig(-2.5e-7, 15), "-2.5e-7");
        assert_eq!(format_sig(1.0 / 3.0, 15), "0.333333333333333");
        assert_eq!(format_sig(123456.789, 15), "123456.789");
        assert_eq!(format_sig(1e20, 15), "1e20");
        assert_eq!(format_sig(999999999999999.9, 15), "1e15");
        assert_eq!(format_sig(f64::NAN, 15), "NaN");
    }

    #[test]
    fn fields_with_commas_are_quoted() {
        assert_eq!(quote("(1/2,0)"), "\"(1/2,0)\"");
        assert_eq!(quote("plain"), "plain");
    }
}
