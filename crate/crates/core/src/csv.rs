//! Numeric CSV input/output with `#` metadata lines.
//!
//! Output is deterministic: every float is written in scientific notation with
//! 17 significant digits, rows keep input order.

use std::io::Write;

use crate::error::{Error, Result};

/// Formats a float with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// A table of numeric columns with leading `# key=value` metadata lines.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub metadata: Vec<(String, String)>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            metadata: Vec::new(),
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(mut self, key: &str, value: impl ToString) -> Self {
        self.metadata.push((key.to_string(), value.to_string()));
        self
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        for (k, v) in &self.metadata {
            writeln!(out, "# {k}={v}")?;
        }
        let mut w = ::csv::WriterBuilder::new().from_writer(&mut out);
        w.write_record(&self.header).map_err(csv_io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| fmt_f64(*v))).map_err(csv_io)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn render(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("csv output is utf-8")
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }
}

fn csv_io(e: ::csv::Error) -> Error {
    Error::Io(std::io::Error::other(e.to_string()))
}

/// Parses a numeric CSV whose header must start with `expected` columns.
/// Returns rows restricted to those columns.
pub fn read_numeric(text: &str, expected: &[&str]) -> Result<Vec<Vec<f64>>> {
    Ok(read_table(text, expected)?.rows)
}

/// Parses a numeric CSV, keeping `# key=value` metadata lines.
pub fn read_table(text: &str, expected: &[&str]) -> Result<Table> {
    let mut table = Table::new(expected.iter().copied());
    let mut header_seen = false;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if let Some((k, v)) = rest.split_once('=') {
                table.metadata.push((k.trim().to_string(), v.trim().to_string()));
            }
            continue;
        }
        let mut rdr = ::csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(::csv::Trim::All)
            .from_reader(line.as_bytes());
        let record = match rdr.records().next() {
            Some(Ok(r)) => r,
            Some(Err(e)) => {
                return Err(Error::Parse {
                    line: line_no,
                    message: e.to_string(),
                })
            }
            None => continue,
        };
        if !header_seen {
            let got: Vec<&str> = record.iter().collect();
            if got.len() < expected.len() || got[..expected.len()] != *expected {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected header starting with {:?}, found {:?}", expected.join(","), got.join(",")),
                });
            }
            header_seen = true;
            continue;
        }
        if record.len() < expected.len() {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected {} columns, found {}", expected.len(), record.len()),
            });
        }
        let mut row = Vec::with_capacity(expected.len());
        for field in record.iter().take(expected.len()) {
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("not a number: {field:?}"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("non-finite value {field:?}"),
                });
            }
            row.push(v);
        }
        table.rows.push(row);
    }
    if !header_seen {
        return Err(Error::Parse {
            line: 1,
            message: format!("missing header {:?}", expected.join(",")),
        });
    }
    Ok(table)
}
