//! Reports as CSV (header row first) or JSON (metadata header plus rows).

use std::io::Write;

use serde_json::{json, Map, Value};

use crate::config::{Format, RunConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
    /// Human-readable lines for stderr; also carried in the JSON metadata.
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(command: &'static str, columns: &[&'static str]) -> Self {
        Self {
            command,
            columns: columns.to_vec(),
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format, config: &RunConfig) -> Result<Vec<u8>, std::io::Error> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => Ok(self.to_json(config)),
        }
    }

    fn to_csv(&self) -> Result<Vec<u8>, std::io::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(cell_text))?;
        }
        w.into_inner().map_err(|e| e.into_error())
    }

    fn to_json(&self, config: &RunConfig) -> Vec<u8> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let obj: Map<String, Value> = self.columns.iter().map(|c| c.to_string()).zip(r.iter().cloned()).collect();
                Value::Object(obj)
            })
            .collect();
        let doc = json!({
            "metadata": {
                "version": env!("CARGO_PKG_VERSION"),
                "command": self.command,
                "config": config,
                "columns": self.columns,
                "notes": self.notes,
            },
            "rows": rows,
        });
        let mut out = serde_json::to_vec_pretty(&doc).expect("report values are serialisable");
        out.push(b'\n');
        out
    }
}

fn cell_text(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Write to `--out` or stdout; notes always go to stderr.
pub fn emit(report: &Report, config: &RunConfig) -> Result<(), std::io::Error> {
    let bytes = report.render(config.format, config)?;
    match &config.out {
        Some(path) => std::fs::write(path, bytes)?,
        None => std::io::stdout().write_all(&bytes)?,
    }
    let mut err = std::io::stderr();
    for note in &report.notes {
        writeln!(err, "{note}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{CommonArgs, Defaults};

    fn config() -> RunConfig {
        let d = Defaults {
            epsilon: vec![1.0],
            n_max: 1,
            ms: vec![7],
            tol: 1e-8,
        };
        RunConfig::resolve(&CommonArgs::default(), &d).unwrap()
    }

    fn sample() -> Report {
        let mut r = Report::new("eigs", &["epsilon", "method", "note"]);
        r.push(vec![json!(1.0), json!("shooting"), json!("a,b \"quoted\"")]);
        r.push(vec![json!(0.5), json!("fd"), Value::Null]);
        r
    }

    #[test]
    fn csv_has_header_and_quotes() {
        let text = String::from_utf8(sample().render(Format::Csv, &config()).unwrap()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "epsilon,method,note");
        assert_eq!(lines[1], "1.0,shooting,\"a,b \"\"quoted\"\"\"");
        assert_eq!(lines[2], "0.5,fd,");
    }

    #[test]
    fn json_mirrors_rows_with_metadata() {
        let bytes = sample().render(Format::Json, &config()).unwrap();
        let v: Value = serde_json::from_slice(&bytes).unwrap();
        assert_eq!(v["metadata"]["command"], "eigs");
        assert_eq!(v["metadata"]["config"]["n_max"], 1);
        assert_eq!(v["rows"][0]["method"], "shooting");
        assert_eq!(v["rows"].as_array().unwrap().len(), 2);
    }

    #[test]
    fn rendering_is_deterministic() {
        let c = config();
        assert_eq!(sample().render(Format::Json, &c).unwrap(), sample().render(Format::Json, &c).unwrap());
    }
}
