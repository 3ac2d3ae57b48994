//! Deterministic table output: CSV with '.' decimals, 17 significant digits
//! (round-trip safe), comma separators, LF line endings; or JSON arrays of
//! objects with nulls for non-finite values. Byte-identical across runs and
//! thread counts.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Bool(bool),
    Text(&'static str),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => {
                if v.is_finite() {
                    format!("{v:.16e}")
                } else {
                    "nan".to_string()
                }
            }
            Cell::Bool(v) => v.to_string(),
            Cell::Text(v) => v.to_string(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::Int(v) => serde_json::Value::from(*v),
            Cell::Float(v) => serde_json::Value::from(*v), // null when non-finite
            Cell::Bool(v) => serde_json::Value::from(*v),
            Cell::Text(v) => serde_json::Value::from(*v),
        }
    }
}

pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn write(&self, path: &str, format: Format) -> io::Result<()> {
        let mut sink: Box<dyn Write> = if path == "-" {
            Box::new(io::stdout().lock())
        } else {
            Box::new(BufWriter::new(File::create(Path::new(path))?))
        };
        match format {
            Format::Csv => {
                writeln!(sink, "{}", self.header.join(","))?;
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(Cell::csv).collect();
                    writeln!(sink, "{}", cells.join(","))?;
                }
            }
            Format::Json => {
                let objects: Vec<serde_json::Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let map: serde_json::Map<String, serde_json::Value> = self
                            .header
                            .iter()
                            .zip(row)
                            .map(|(name, cell)| (name.to_string(), cell.json()))
                            .collect();
                        serde_json::Value::Object(map)
                    })
                    .collect();
                serde_json::to_writer_pretty(&mut sink, &objects)?;
                writeln!(sink)?;
            }
        }
        sink.flush()
    }
}
