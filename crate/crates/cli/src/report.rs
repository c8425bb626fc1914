use anyhow::{Context, Result};
use serde::Serialize;

use crate::args::Format;

/// A command's result, ready to be written in either format.
#[derive(Debug, Clone)]
pub struct Report {
    /// Every flag with its effective value, echoed at the top of CSV output.
    pub config: Vec<(String, String)>,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    /// The library object serialized with its declared key order.
    pub json: String,
}

impl Report {
    pub fn new<T: Serialize + ?Sized>(
        config: Vec<(String, String)>,
        header: Vec<&'static str>,
        rows: Vec<Vec<String>>,
        json: &T,
    ) -> Result<Self> {
        Ok(Report {
            config,
            header,
            rows,
            json: serde_json::to_string_pretty(json).context("serializing JSON")?,
        })
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => Ok(format!("{}\n", self.json)),
            Format::Csv => {
                let mut out = String::from("# config:");
                for (k, v) in &self.config {
                    out.push_str(&format!(" {k}={v}"));
                }
                out.push('\n');
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.header)?;
                for row in &self.rows {
                    w.write_record(row)?;
                }
                let bytes = w.into_inner().context("flushing CSV")?;
                out.push_str(std::str::from_utf8(&bytes)?);
                Ok(out)
            }
        }
    }
}

/// Shortest decimal that parses back to the same binary64.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}
