//! Flat rows (JSON objects with scalar values) printed as CSV or JSON.

use std::io::Write;

use clap::ValueEnum;
use serde_json::Value;

use entanglab_core::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn write_rows<W: Write>(out: &mut W, rows: &[Value], format: Format) -> Result<()> {
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, rows)?;
            writeln!(out)?;
        }
        Format::Csv => {
            let Some(Value::Object(first)) = rows.first() else {
                return Ok(());
            };
            let header: Vec<&String> = first.keys().collect();
            let mut w = csv::Writer::from_writer(out);
            let io = |e: csv::Error| Error::Io(std::io::Error::other(e.to_string()));
            w.write_record(header.iter().map(|k| k.as_str())).map_err(io)?;
            for row in rows {
                let obj = row.as_object().ok_or_else(|| Error::Input("row is not an object".into()))?;
                w.write_record(header.iter().map(|k| obj.get(*k).map(cell).unwrap_or_default()))
                    .map_err(io)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

pub fn print_json(v: &Value) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}
