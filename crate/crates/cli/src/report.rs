//! Report assembly. CSV: a `# finapprox v1` comment line, the column row,
//! then records. Floats use the shortest round-trip decimal form; missing
//! values are empty cells.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::args::Format;
use crate::error::CliError;

pub const SCHEMA: &str = "finapprox v1";

pub struct Table {
    pub columns: &'static [&'static str],
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &'static [&'static str]) -> Self {
        Self { columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn to_csv(&self) -> Result<Vec<u8>, CliError> {
        let mut out = format!("# {SCHEMA}\n").into_bytes();
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(self.columns).map_err(CliError::internal)?;
        for row in &self.rows {
            w.write_record(row).map_err(CliError::internal)?;
        }
        w.flush().map_err(CliError::internal)?;
        drop(w);
        Ok(out)
    }
}

pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:?}")
    } else {
        String::new()
    }
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub fn flag(b: bool) -> String {
    b.to_string()
}

pub fn opt_flag(b: Option<bool>) -> String {
    b.map(flag).unwrap_or_default()
}

/// Vector entries joined with `;` so a vector fits one cell.
pub fn vector(v: &[f64]) -> String {
    v.iter().map(|&x| num(x)).collect::<Vec<_>>().join(";")
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    format: &'static str,
    command: &'a str,
    report: &'a T,
}

pub fn render<T: Serialize>(format: Format, command: &str, table: &Table, payload: &T) -> Result<Vec<u8>, CliError> {
    match format {
        Format::Csv => table.to_csv(),
        Format::Json => {
            let env = Envelope {
                format: SCHEMA,
                command,
                report: payload,
            };
            let mut out = serde_json::to_vec_pretty(&env).map_err(CliError::internal)?;
            out.push(b'\n');
            Ok(out)
        }
    }
}

pub fn write(bytes: &[u8], dest: Option<&Path>) -> Result<(), CliError> {
    match dest {
        Some(path) => fs::write(path, bytes).map_err(|source| CliError::Write {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes).and_then(|_| stdout.flush()).map_err(CliError::internal)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_schema_line_and_quotes_commas() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec![num(0.1), "x, y".into()]);
        let s = String::from_utf8(t.to_csv().unwrap()).unwrap();
        assert_eq!(s, "# finapprox v1\na,b\n0.1,\"x, y\"\n");
    }

    #[test]
    fn floats_round_trip() {
        for x in [1e-7, 0.1 + 0.2, 1.0 / 3.0, 2.0] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(f64::NAN), "");
        assert_eq!(vector(&[0.0, 1.0]), "0.0;1.0");
    }
}
