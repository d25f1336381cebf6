//! Deterministic CSV emission, CSV read-back, and run manifests.
//!
//! Floats are written with Rust's shortest round-trip decimal formatting,
//! row order is fixed by the producer, files end with a trailing newline,
//! and nothing consults the locale, so re-running a pipeline reproduces
//! byte-identical outputs.

use crate::error::{io_err, Error};
use crate::quench::DivergenceReport;
use crate::Result;
use std::fmt::Write as _;
use std::path::Path;

/// One CSV cell; `Float` uses round-trip decimal formatting.
#[derive(Debug, Clone)]
pub enum CsvCell {
    Float(f64),
    Int(i64),
    Uint(usize),
    Bool(bool),
    Text(String),
}

impl std::fmt::Display for CsvCell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CsvCell::Float(x) => write!(f, "{x}"),
            CsvCell::Int(x) => write!(f, "{x}"),
            CsvCell::Uint(x) => write!(f, "{x}"),
            CsvCell::Bool(x) => write!(f, "{x}"),
            CsvCell::Text(x) => write!(f, "{x}"),
        }
    }
}

/// An in-memory CSV table with a fixed header.
#[derive(Debug, Clone)]
pub struct CsvTable {
    header: Vec<String>,
    rows: Vec<String>,
}

impl CsvTable {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> CsvTable {
        CsvTable { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push_row(&mut self, cells: &[CsvCell]) {
        debug_assert_eq!(cells.len(), self.header.len());
        let mut row = String::new();
        for (i, c) in cells.iter().enumerate() {
            if i > 0 {
                row.push(',');
            }
            let _ = write!(row, "{c}");
        }
        self.rows.push(row);
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    /// Serialized bytes, trailing newline included.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(row);
            out.push('\n');
        }
        out.into_bytes()
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes()).map_err(io_err(format!("writing {}", path.display())))
    }
}

/// Read a CSV written by [`CsvTable`]: header plus string rows.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let text =
        std::fs::read_to_string(path).map_err(io_err(format!("reading {}", path.display())))?;
    parse_csv(&text)
}

pub fn parse_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| Error::Csv("empty file".into()))?
        .split(',')
        .map(str::to_owned)
        .collect();
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let row: Vec<String> = line.split(',').map(str::to_owned).collect();
        if row.len() != header.len() {
            return Err(Error::Csv(format!(
                "row {} has {} fields, header has {}",
                i + 2,
                row.len(),
                header.len()
            )));
        }
        rows.push(row);
    }
    Ok((header, rows))
}

pub fn parse_f64(s: &str) -> Result<f64> {
    s.parse().map_err(|_| Error::Csv(format!("bad float {s:?}")))
}

/// Everything needed to re-run a command and reproduce its outputs.
/// Rendered as plain `key = value` text; a manifest file is append-only,
/// one `[[run]]` block per invocation.
#[derive(Debug, Clone, Default)]
pub struct RunManifest {
    pub subcommand: String,
    pub parameters: Vec<(String, String)>,
    pub integrator: Vec<(String, String)>,
    pub input_digests: Vec<(String, String)>,
    pub outputs: Vec<String>,
    pub tool_version: String,
    pub duration_secs: f64,
    pub divergence: Option<DivergenceReport>,
}

impl RunManifest {
    pub fn new(subcommand: &str) -> RunManifest {
        RunManifest { subcommand: subcommand.into(), ..Default::default() }
    }

    pub fn param(&mut self, key: &str, value: impl std::fmt::Display) {
        self.parameters.push((key.into(), value.to_string()));
    }

    pub fn integrator_setting(&mut self, key: &str, value: impl std::fmt::Display) {
        self.integrator.push((key.into(), value.to_string()));
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "[[run]]");
        let _ = writeln!(s, "subcommand = {}", self.subcommand);
        let _ = writeln!(s, "tool_version = {}", self.tool_version);
        let _ = writeln!(s, "duration_secs = {}", self.duration_secs);
        for (k, v) in &self.parameters {
            let _ = writeln!(s, "param.{k} = {v}");
        }
        for (k, v) in &self.integrator {
            let _ = writeln!(s, "integrator.{k} = {v}");
        }
        for (name, digest) in &self.input_digests {
            let _ = writeln!(s, "input.{name} = sha256:{digest}");
        }
        for out in &self.outputs {
            let _ = writeln!(s, "output = {out}");
        }
        match &self.divergence {
            Some(d) => {
                let _ = writeln!(s, "divergence.mode_index = {}", d.mode_index);
                let _ = writeln!(s, "divergence.t_lower = {}", d.t_lower);
                let _ = writeln!(s, "divergence.t_upper = {}", d.t_upper);
                let _ = writeln!(s, "divergence.cap = {}", d.cap);
            }
            None => {
                let _ = writeln!(s, "divergence = none");
            }
        }
        s
    }

    /// Append this run to the manifest file (manifests are append-only).
    pub fn append_to(&self, path: &Path) -> Result<()> {
        use std::io::Write;
        let mut f = std::fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(io_err(format!("opening {}", path.display())))?;
        f.write_all(self.render().as_bytes())
            .map_err(io_err(format!("appending to {}", path.display())))
    }
}
