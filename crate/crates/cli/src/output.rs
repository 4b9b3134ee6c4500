//! Output tables: CSV with a mandatory header, or a JSON array of row objects.
//! Numbers carry 12 significant digits in both formats.

use std::io::Write;

use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Serialize, Serializer};

use crate::config::Format;
use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct OutputTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl OutputTable {
    pub fn new(header: Vec<String>) -> Self {
        OutputTable { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    /// Adds a `<name>_pi` column after every `<name>_rad` column.
    pub fn with_pi_units(&self) -> OutputTable {
        let mut header = Vec::new();
        let mut sources = Vec::new();
        for (i, h) in self.header.iter().enumerate() {
            header.push(h.clone());
            sources.push((i, 1.0));
            if let Some(stem) = h.strip_suffix("_rad") {
                header.push(format!("{stem}_pi"));
                sources.push((i, 1.0 / std::f64::consts::PI));
            }
        }
        let rows = self.rows.iter().map(|r| sources.iter().map(|&(i, k)| r[i] * k).collect()).collect();
        OutputTable { header, rows }
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> Result<(), CliError> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => self.write_json(out),
        }
    }

    fn write_csv(&self, out: &mut dyn Write) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header).map_err(io_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|&x| format_number(x))).map_err(io_err)?;
        }
        w.flush().map_err(|e| CliError::Io(e.to_string()))
    }

    fn write_json(&self, out: &mut dyn Write) -> Result<(), CliError> {
        serde_json::to_writer_pretty(&mut *out, self).map_err(|e| CliError::Io(e.to_string()))?;
        writeln!(out).map_err(|e| CliError::Io(e.to_string()))
    }
}

/// Scientific notation, 12 significant digits.
pub fn format_number(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x }; // no "-0"
    format!("{x:.11e}")
}

fn rounded(x: f64) -> f64 {
    format_number(x).parse().expect("formatted float parses")
}

fn io_err(e: csv::Error) -> CliError {
    CliError::Io(e.to_string())
}

struct Row<'a> {
    header: &'a [String],
    values: &'a [f64],
}

impl Serialize for Row<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.header.len()))?;
        for (k, &v) in self.header.iter().zip(self.values) {
            map.serialize_entry(k, &rounded(v))?;
        }
        map.end()
    }
}

impl Serialize for OutputTable {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.rows.len()))?;
        for r in &self.rows {
            seq.serialize_element(&Row { header: &self.header, values: r })?;
        }
        seq.end()
    }
}

/// Reads back a CSV table written by [`OutputTable::write`].
pub fn read_csv(input: &[u8]) -> Result<OutputTable, CliError> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(io_err)?.iter().map(str::to_owned).collect();
    let mut table = OutputTable::new(header);
    for rec in r.records() {
        let rec = rec.map_err(io_err)?;
        let row = rec
            .iter()
            .map(|f| f.parse::<f64>().map_err(|e| CliError::Io(format!("bad number `{f}`: {e}"))))
            .collect::<Result<Vec<_>, _>>()?;
        table.rows.push(row);
    }
    Ok(table)
}
