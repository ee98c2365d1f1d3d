//! Tables and their json, csv and md renderings. All three carry the same cells.

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::Format;
use crate::CliError;

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub command: String,
    pub tables: Vec<Table>,
    /// Structured payload, json only.
    pub data: Value,
    /// `Some` for commands that decide a claim.
    pub verdict: Option<bool>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report { command: command.into(), tables: Vec::new(), data: Value::Null, verdict: None }
    }

    pub fn verdict_label(&self) -> Option<&'static str> {
        self.verdict.map(|v| if v { "PASS" } else { "FAIL" })
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Json => {
                let v = json!({
                    "command": self.command,
                    "tables": self.tables,
                    "data": self.data,
                    "verdict": self.verdict_label(),
                });
                let mut s = serde_json::to_string_pretty(&v).map_err(|e| CliError::internal(e.to_string()))?;
                s.push('\n');
                Ok(s)
            }
            Format::Csv => self.csv(),
            Format::Md => Ok(self.md()),
        }
    }

    fn csv(&self) -> Result<String, CliError> {
        let mut blocks = Vec::new();
        for t in &self.tables {
            let mut w = csv::Writer::from_writer(Vec::new());
            let head: Vec<&str> = std::iter::once("table").chain(t.columns.iter().map(String::as_str)).collect();
            w.write_record(&head).map_err(|e| CliError::internal(e.to_string()))?;
            for r in &t.rows {
                let rec: Vec<&str> = std::iter::once(t.name.as_str()).chain(r.iter().map(String::as_str)).collect();
                w.write_record(&rec).map_err(|e| CliError::internal(e.to_string()))?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::internal(e.to_string()))?;
            blocks.push(String::from_utf8(bytes).map_err(|e| CliError::internal(e.to_string()))?);
        }
        if let Some(v) = self.verdict_label() {
            blocks.push(format!("table,verdict\nverdict,{v}\n"));
        }
        Ok(blocks.join("\n"))
    }

    fn md(&self) -> String {
        let cell = |s: &str| s.replace('|', "\\|");
        let mut out = format!("# {}\n", self.command);
        for t in &self.tables {
            out.push_str(&format!("\n## {}\n\n", t.name));
            out.push_str(&format!("| {} |\n", t.columns.iter().map(|c| cell(c)).collect::<Vec<_>>().join(" | ")));
            out.push_str(&format!("|{}\n", "---|".repeat(t.columns.len())));
            for r in &t.rows {
                out.push_str(&format!("| {} |\n", r.iter().map(|c| cell(c)).collect::<Vec<_>>().join(" | ")));
            }
        }
        if let Some(v) = self.verdict_label() {
            out.push_str(&format!("\nverdict: {v}\n"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut t = Table::new("counts", &["a", "b"]);
        t.push(vec!["1".into(), "x|y".into()]);
        Report { command: "demo".into(), tables: vec![t], data: json!({"k": 1}), verdict: Some(true) }
    }

    #[test]
    fn formats_carry_the_same_cells() {
        let r = sample();
        let j: Value = serde_json::from_str(&r.render(Format::Json).unwrap()).unwrap();
        assert_eq!(j["tables"][0]["rows"][0][1], "x|y");
        assert_eq!(j["verdict"], "PASS");
        assert_eq!(r.render(Format::Csv).unwrap(), "table,a,b\ncounts,1,x|y\n\ntable,verdict\nverdict,PASS\n");
        assert!(r.render(Format::Md).unwrap().contains("| 1 | x\\|y |"));
    }
}
