//! CSV emission.
//!
//! Every table starts with `#`-prefixed `key: value` metadata lines, then a
//! header row whose names carry their units, then data rows. Floats use the
//! shortest representation that round-trips, so output is byte-stable.

use std::io::{self, Write};

/// A CSV table under construction.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    /// Metadata lines, written as `# key: value`.
    pub meta: Vec<(String, String)>,
    /// Column names.
    pub header: Vec<String>,
    /// Data rows, already formatted.
    pub rows: Vec<Vec<String>>,
    /// Failure that cut the table short, written as a trailing `# error:` line.
    pub error: Option<String>,
}

impl Table {
    /// Empty table with the given columns.
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self { header: header.into_iter().map(Into::into).collect(), ..Self::default() }
    }

    /// Appends a metadata line.
    pub fn meta(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.meta.push((key.to_string(), value.to_string()));
        self
    }

    /// Appends a row of numbers.
    pub fn push_numbers(&mut self, row: &[f64]) {
        self.rows.push(row.iter().map(|&x| fmt_f64(x)).collect());
    }

    /// Writes the table.
    pub fn write_to(&self, w: &mut impl Write) -> io::Result<()> {
        for (k, v) in &self.meta {
            writeln!(w, "# {k}: {v}")?;
        }
        if !self.header.is_empty() {
            writeln!(w, "{}", self.header.join(","))?;
        }
        for row in &self.rows {
            writeln!(w, "{}", row.join(","))?;
        }
        if let Some(e) = &self.error {
            writeln!(w, "# error: {e}")?;
        }
        w.flush()
    }

    /// The table as a string.
    pub fn render(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("table is UTF-8")
    }
}

/// Shortest round-trip decimal form.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}
