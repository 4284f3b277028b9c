use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde_json::{Map, Value};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Text(String),
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Self::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Self::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Self::Real(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Self::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Self::Text(v)
    }
}

/// 17 significant digits; non-finite values as `inf`, `-inf`, `nan`.
pub fn format_real(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.16e}")
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Self::Int(v) => v.to_string(),
            Self::Real(x) => format_real(*x),
            Self::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Self::Int(v) => Value::from(*v),
            Self::Real(x) if x.is_finite() => Value::from(*x),
            Self::Real(x) => Value::from(format_real(*x)),
            Self::Text(s) => Value::from(s.as_str()),
        }
    }
}

/// Rows sharing one set of columns, plus run metadata.
///
/// `context` fields go into the CSV `#` header line and into every JSON record.
#[derive(Debug, Clone)]
pub struct Table {
    command: String,
    context: Vec<(String, Cell)>,
    columns: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(command: &str, columns: impl IntoIterator<Item = impl Into<String>>) -> Self {
        Self {
            command: command.into(),
            context: Vec::new(),
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn context(mut self, key: &str, value: impl Into<Cell>) -> Self {
        self.context.push((key.into(), value.into()));
        self
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_to(&self, format: Format, out: &mut dyn Write) -> Result<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => self.write_json(out),
        }
    }

    fn write_csv(&self, out: &mut dyn Write) -> Result<()> {
        let meta: Vec<String> = self.context.iter().map(|(k, v)| format!("{k}={}", v.csv())).collect();
        let mut header = format!("# qwalk {}", self.command);
        for m in &meta {
            header.push(' ');
            header.push_str(m);
        }
        writeln!(out, "{header}")?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns).map_err(csv_io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv)).map_err(csv_io)?;
        }
        w.flush()?;
        Ok(())
    }

    fn write_json(&self, out: &mut dyn Write) -> Result<()> {
        let records: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut m = Map::new();
                for (k, v) in &self.context {
                    m.insert(k.clone(), v.json());
                }
                for (k, v) in self.columns.iter().zip(row) {
                    m.insert(k.clone(), v.json());
                }
                Value::Object(m)
            })
            .collect();
        serde_json::to_writer_pretty(&mut *out, &records).map_err(|e| CliError::Output(e.into()))?;
        writeln!(out)?;
        Ok(())
    }
}

fn csv_io(e: csv::Error) -> CliError {
    CliError::Output(io::Error::other(e))
}

/// Writes to `path`, or standard output when `None` or `-`.
pub fn emit(table: &Table, format: Format, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) if p != Path::new("-") => {
            let file = File::create(p).map_err(|source| CliError::Io { path: p.to_path_buf(), source })?;
            let mut w = BufWriter::new(file);
            table.write_to(format, &mut w)?;
            w.flush().map_err(|source| CliError::Io { path: p.to_path_buf(), source })
        }
        _ => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            table.write_to(format, &mut lock)
        }
    }
}

/// Reads `step,position,probability` rows (as written by `simulate`) and returns the
/// distribution at `step`, or at the last step in the file.
pub fn read_distribution(path: &Path, step: Option<usize>) -> Result<(usize, BTreeMap<i64, f64>)> {
    let bad = |message: String| CliError::Input { path: path.to_path_buf(), message };
    let file = File::open(path).map_err(|source| CliError::Io { path: PathBuf::from(path), source })?;
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(file);
    let headers = rdr.headers().map_err(|e| bad(e.to_string()))?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let (Some(pos_col), Some(prob_col)) = (col("position"), col("probability")) else {
        return Err(bad("expected `position` and `probability` columns".into()));
    };
    let step_col = col("step");
    let mut by_step: BTreeMap<usize, BTreeMap<i64, f64>> = BTreeMap::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let field = |i: usize| rec.get(i).ok_or_else(|| bad(format!("record {}: missing field", line + 1)));
        let t = match step_col {
            Some(i) => field(i)?.parse().map_err(|_| bad(format!("record {}: bad step", line + 1)))?,
            None => 0,
        };
        let n: i64 = field(pos_col)?.parse().map_err(|_| bad(format!("record {}: bad position", line + 1)))?;
        let p: f64 = field(prob_col)?.parse().map_err(|_| bad(format!("record {}: bad probability", line + 1)))?;
        by_step.entry(t).or_default().insert(n, p);
    }
    let picked = match step {
        Some(t) => by_step.remove_entry(&t),
        None => by_step.pop_last(),
    };
    picked.ok_or_else(|| {
        bad(match step {
            Some(t) => format!("no rows for step {t}"),
            None => "no distribution rows".into(),
        })
    })
}
