//! Tabular output: a fixed column schema per command, written as RFC-4180
//! CSV (header row, '.' decimal) and/or JSON lines mirroring the same keys.

use std::io::Write;

use anyhow::Result;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl Cell {
    fn csv_field(&self) -> String {
        match self {
            // shortest round-trip formatting; '.' decimal separator always
            Cell::Float(v) => format!("{v}"),
            Cell::Int(v) => format!("{v}"),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json_value(&self) -> serde_json::Value {
        match self {
            Cell::Float(v) => serde_json::json!(v),
            Cell::Int(v) => serde_json::json!(v),
            Cell::Text(s) => serde_json::json!(s),
            Cell::Empty => serde_json::Value::Null,
        }
    }
}

/// One output row: `(column, value)` pairs in schema order.
#[derive(Clone, Debug)]
pub struct Row {
    pub cells: Vec<(&'static str, Cell)>,
}

impl Row {
    pub fn get(&self, column: &str) -> Option<&Cell> {
        self.cells
            .iter()
            .find_map(|(name, cell)| (*name == column).then_some(cell))
    }
}

/// Leading `#` comment documenting the unit system, then the header row,
/// then the data. Columns are identical across all rows of a sweep.
pub fn write_csv<W: Write>(out: W, meta: &str, rows: &[Row]) -> Result<()> {
    let mut out = out;
    writeln!(out, "# {meta}")?;
    let mut writer = csv::WriterBuilder::new().from_writer(out);
    if let Some(first) = rows.first() {
        writer.write_record(first.cells.iter().map(|(name, _)| *name))?;
        for row in rows {
            writer.write_record(row.cells.iter().map(|(_, cell)| cell.csv_field()))?;
        }
    }
    writer.flush()?;
    Ok(())
}

/// First line is a meta object, then one JSON object per row with the CSV
/// schema keys.
pub fn write_jsonl<W: Write>(mut out: W, meta: &str, rows: &[Row]) -> Result<()> {
    writeln!(out, "{}", serde_json::json!({ "meta": meta }))?;
    for row in rows {
        let map: serde_json::Map<String, serde_json::Value> = row
            .cells
            .iter()
            .map(|(name, cell)| (name.to_string(), cell.json_value()))
            .collect();
        writeln!(out, "{}", serde_json::Value::Object(map))?;
    }
    Ok(())
}
