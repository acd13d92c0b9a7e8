//! CSV and JSON writers for result tables.
//!
//! CSV files start with one `#`-prefixed line holding the run metadata as
//! compact JSON, followed by a header row. Floats are written in scientific
//! notation with 17 significant digits so that they read back bit-exact.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde_json::json;

use crate::error::CliError;
use crate::run::{Cell, ResultTable};
use crate::spec::OutputFormat;

fn out_err(e: impl std::fmt::Display) -> CliError {
    CliError::Output(e.to_string())
}

fn cell_text(c: &Cell) -> String {
    match c {
        Cell::Num(x) => format!("{x:.16e}"),
        Cell::Int(n) => n.to_string(),
        Cell::Bool(b) => b.to_string(),
        Cell::Text(s) => s.clone(),
        Cell::Empty => String::new(),
    }
}

pub fn write_csv<W: Write>(table: &ResultTable, mut w: W) -> Result<(), CliError> {
    writeln!(w, "# {}", table.meta).map_err(out_err)?;
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(&table.columns).map_err(out_err)?;
    for row in &table.rows {
        csv.write_record(row.iter().map(cell_text)).map_err(out_err)?;
    }
    csv.flush().map_err(out_err)
}

pub fn write_json<W: Write>(table: &ResultTable, mut w: W) -> Result<(), CliError> {
    let rows: Vec<serde_json::Map<String, serde_json::Value>> = table
        .rows
        .iter()
        .map(|r| {
            table
                .columns
                .iter()
                .zip(r)
                .map(|(k, v)| (k.clone(), serde_json::to_value(v).expect("cell serializes")))
                .collect()
        })
        .collect();
    let doc = json!({ "meta": table.meta, "rows": rows });
    serde_json::to_writer_pretty(&mut w, &doc).map_err(out_err)?;
    writeln!(w).map_err(out_err)
}

pub fn write_table<W: Write>(table: &ResultTable, format: OutputFormat, w: W) -> Result<(), CliError> {
    match format {
        OutputFormat::Csv => write_csv(table, w),
        OutputFormat::Json => write_json(table, w),
    }
}

pub fn write_table_to(table: &ResultTable, format: OutputFormat, path: &Path) -> Result<(), CliError> {
    let file = File::create(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut w = BufWriter::new(file);
    write_table(table, format, &mut w)?;
    w.flush().map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Parses a CSV written by [`write_csv`] back into metadata and raw rows.
pub fn read_csv(text: &str) -> Result<(serde_json::Value, Vec<String>, Vec<Vec<String>>), CliError> {
    let (first, rest) = text.split_once('\n').ok_or_else(|| out_err("empty file"))?;
    let meta_text = first
        .strip_prefix("# ")
        .ok_or_else(|| out_err("missing metadata line"))?;
    let meta = serde_json::from_str(meta_text).map_err(out_err)?;
    let mut reader = csv::Reader::from_reader(rest.as_bytes());
    let header = reader.headers().map_err(out_err)?.iter().map(String::from).collect();
    let rows = reader
        .records()
        .map(|r| r.map(|r| r.iter().map(String::from).collect()).map_err(out_err))
        .collect::<Result<_, _>>()?;
    Ok((meta, header, rows))
}
