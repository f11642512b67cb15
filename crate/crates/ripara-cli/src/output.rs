use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use ripara::C64;
use serde::Serialize;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

pub struct Sink {
    pub path: Option<PathBuf>,
    pub format: Format,
}

/// Rows of a CSV table; every cell is already formatted.
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

pub fn num(x: f64) -> String {
    // drop the sign of negative zero
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:e}")
}

/// Real and imaginary part as two cells.
pub fn cplx(z: C64) -> [String; 2] {
    [num(z.re), num(z.im)]
}

/// Header cells `name_re, name_im`.
pub fn cplx_header(name: &str) -> [String; 2] {
    [format!("{name}_re"), format!("{name}_im")]
}

impl Sink {
    fn writer(&self) -> Result<Box<dyn Write>, CliError> {
        match &self.path {
            Some(p) => File::create(p)
                .map(|f| Box::new(f) as Box<dyn Write>)
                .map_err(|e| CliError::Usage(format!("{}: {e}", p.display()))),
            None => Ok(Box::new(io::stdout().lock())),
        }
    }

    /// Writes `json` or `table` depending on the selected format.
    pub fn emit<T: Serialize>(&self, json: &T, table: impl FnOnce() -> Table) -> Result<(), CliError> {
        let mut w = self.writer()?;
        let io_err = |e: io::Error| CliError::Usage(format!("write failed: {e}"));
        match self.format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut w, json).map_err(|e| CliError::Usage(e.to_string()))?;
                writeln!(w).map_err(io_err)?;
            }
            Format::Csv => {
                let t = table();
                let mut csv = csv::Writer::from_writer(w);
                let csv_err = |e: csv::Error| CliError::Usage(format!("write failed: {e}"));
                csv.write_record(&t.header).map_err(csv_err)?;
                for r in &t.rows {
                    csv.write_record(r).map_err(csv_err)?;
                }
                csv.flush().map_err(io_err)?;
            }
        }
        Ok(())
    }
}
