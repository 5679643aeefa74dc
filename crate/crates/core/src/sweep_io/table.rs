use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Config(format!("unknown output format `{other}` (csv|json)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Bool(bool),
    Empty,
}

/// Round-trip rendering with 17 significant digits.
pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

impl Cell {
    fn csv_text(&self) -> String {
        match self {
            Cell::Num(x) => format_float(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json_text(&self) -> String {
        match self {
            Cell::Num(x) if x.is_finite() => format_float(*x),
            Cell::Num(_) | Cell::Empty => "null".to_string(),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => serde_json::to_string(s).expect("string serializes"),
            Cell::Bool(b) => b.to_string(),
        }
    }
}

/// Homogeneous table: one header, rows of equal width.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Table {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match header");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }
}

/// Where a table goes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Destination {
    Stdout,
    File(PathBuf),
}

/// Renders the table: CSV with a header line and LF endings, or JSON as an
/// array of objects keyed by the same column names.
pub fn render(table: &Table, format: OutputFormat) -> Result<Vec<u8>> {
    match format {
        OutputFormat::Csv => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(Vec::new());
            w.write_record(&table.columns)?;
            for row in &table.rows {
                w.write_record(row.iter().map(Cell::csv_text))?;
            }
            w.into_inner()
                .map_err(|e| Error::Io(io::Error::other(e.to_string())))
        }
        OutputFormat::Json => {
            let mut out = String::from("[");
            for (i, row) in table.rows.iter().enumerate() {
                out.push_str(if i == 0 { "\n  {" } else { ",\n  {" });
                for (k, (name, cell)) in table.columns.iter().zip(row).enumerate() {
                    if k > 0 {
                        out.push_str(", ");
                    }
                    out.push_str(&format!("\"{name}\": {}", cell.json_text()));
                }
                out.push('}');
            }
            out.push_str(if table.rows.is_empty() { "]\n" } else { "\n]\n" });
            Ok(out.into_bytes())
        }
    }
}

/// Writes the rendered table to `dest` and returns the byte count.
pub fn write_table<W: Write>(table: &Table, format: OutputFormat, dest: &mut W) -> Result<usize> {
    let bytes = render(table, format)?;
    dest.write_all(&bytes)?;
    dest.flush()?;
    Ok(bytes.len())
}

/// [`write_table`] to stdout or a file, with the path attached to failures.
pub fn write_to(table: &Table, format: OutputFormat, dest: &Destination) -> Result<usize> {
    match dest {
        Destination::Stdout => write_table(table, format, &mut io::stdout().lock()),
        Destination::File(path) => {
            let wrap = |source| Error::Write {
                path: path.clone(),
                source,
            };
            let mut file = File::create(path).map_err(wrap)?;
            let bytes = render(table, format)?;
            file.write_all(&bytes).map_err(wrap)?;
            Ok(bytes.len())
        }
    }
}
