use std::io::Write;
use std::path::Path;

use serde_json::Value;

use crate::config::OutputFormat;
use crate::exit::{Failure, OK};

/// Rows with a fixed header.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
    }
}

/// One command result in all three formats, plus the exit code it implies.
#[derive(Clone, Debug)]
pub struct Output {
    pub json: Value,
    pub table: Table,
    pub text: String,
    pub code: u8,
}

impl Output {
    pub fn new(json: Value, table: Table, text: String) -> Self {
        Output {
            json,
            table,
            text,
            code: OK,
        }
    }

    pub fn with_code(mut self, code: u8) -> Self {
        self.code = code;
        self
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("json values serialize");
                s.push('\n');
                s
            }
            OutputFormat::Csv => self.table.to_csv(),
            OutputFormat::Text => {
                let mut s = self.text.clone();
                if !s.ends_with('\n') {
                    s.push('\n');
                }
                s
            }
        }
    }
}

/// Prints to stdout, or writes `path` through a temporary file in the same
/// directory so that readers never see a partial file.
pub fn emit(body: &str, path: Option<&Path>) -> Result<(), Failure> {
    let Some(path) = path else {
        let mut out = std::io::stdout().lock();
        out.write_all(body.as_bytes()).map_err(Failure::io)?;
        return out.flush().map_err(Failure::io);
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(Failure::io)?;
    tmp.write_all(body.as_bytes()).map_err(Failure::io)?;
    tmp.as_file().sync_all().map_err(Failure::io)?;
    tmp.persist(path).map_err(|e| Failure::io(e.error))?;
    Ok(())
}
