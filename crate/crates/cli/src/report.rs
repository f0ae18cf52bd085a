//! Report assembly and the JSON / CSV writers.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::{Map, Value};

/// Column names plus rows of scalar cells (numbers, strings, null).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn to_value(&self) -> Value {
        serde_json::json!({
            "columns": self.columns,
            "rows": self.rows,
        })
    }
}

/// Number cell; non-finite values become null.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

pub fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

#[derive(Debug, Clone)]
pub struct Report {
    pub command: &'static str,
    pub config: Value,
    pub table: Table,
    /// Extra result fields next to `table`.
    pub extras: Map<String, Value>,
    pub flags: Value,
    pub tolerances: Value,
    pub grid: Value,
    pub wall_time: f64,
}

impl Report {
    pub fn to_value(&self) -> Value {
        let mut results = Map::new();
        results.insert("table".into(), self.table.to_value());
        results.extend(self.extras.clone());
        serde_json::json!({
            "command": self.command,
            "config": self.config,
            "results": results,
            "flags": self.flags,
            "provenance": {
                "tolerances": self.tolerances,
                "grid": self.grid,
                "wall_time": num(self.wall_time),
                "version": env!("CARGO_PKG_VERSION"),
            },
        })
    }

    pub fn write_json<W: Write>(&self, out: W) -> io::Result<()> {
        let mut ser = serde_json::Serializer::with_formatter(out, SciFormatter::default());
        self.to_value().serialize(&mut ser)?;
        let mut out = ser.into_inner();
        out.write_all(b"\n")
    }

    pub fn write_csv<W: Write>(&self, out: W) -> io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.table.columns)?;
        for row in &self.table.rows {
            w.write_record(row.iter().map(csv_cell))?;
        }
        w.flush()
    }
}

/// Shortest round-trip decimal for floats, so CSV and JSON parse to the
/// same values.
fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Number(n) => match (n.as_u64(), n.as_i64(), n.as_f64()) {
            (Some(u), _, _) => u.to_string(),
            (_, Some(i), _) => i.to_string(),
            (_, _, Some(f)) => f.to_string(),
            _ => n.to_string(),
        },
        other => other.to_string(),
    }
}

/// Pretty layout with every float written as 17 significant digits.
#[derive(Default)]
struct SciFormatter(PrettyFormatter<'static>);

impl Formatter for SciFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn begin_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_array(writer)
    }

    fn end_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object(writer)
    }

    fn end_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object_value(writer)
    }
}
