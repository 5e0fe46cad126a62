//! Sweep output: CSV with a `# ` comment header, or the same data as JSON.

use serde::Serialize;

use crate::error::{CliError, CliResult};

/// Formats like C's `%.12e`: twelve fractional digits and a signed exponent
/// of at least two digits.
pub fn format_e12(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    let s = format!("{x:.12e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

/// Run metadata written ahead of the data.
#[derive(Debug, Clone, Serialize)]
pub struct Meta {
    pub tool: String,
    pub version: String,
    pub seed: Option<u64>,
    pub command: String,
}

impl Meta {
    pub fn new(seed: Option<u64>, command: impl Into<String>) -> Self {
        Self {
            tool: "lqu".to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            command: command.into(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Table {
    pub meta: Meta,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Table {
    pub fn new(meta: Meta, columns: Vec<&'static str>) -> Self {
        Self {
            meta,
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let seed = self.meta.seed.map_or_else(|| "none".to_string(), |s| s.to_string());
        out.push_str(&format!(
            "# {} {} seed={} command={}\n",
            self.meta.tool, self.meta.version, seed, self.meta.command
        ));
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&x| format_e12(x)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// JSON cannot hold infinities, so non-finite cells become strings.
    pub fn to_json(&self) -> String {
        let rows: Vec<Vec<serde_json::Value>> = self
            .rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|&x| {
                        if x.is_finite() {
                            serde_json::json!(x)
                        } else {
                            serde_json::json!(format_e12(x))
                        }
                    })
                    .collect()
            })
            .collect();
        let doc = serde_json::json!({
            "meta": self.meta,
            "columns": self.columns,
            "rows": rows,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("table serializes");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

/// Inclusive grid `start:stop:points`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl Grid {
    pub fn parse(s: &str) -> CliResult<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, stop, points] = parts.as_slice() else {
            return Err(CliError::Parse(format!("grid {s:?} is not start:stop:points")));
        };
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| CliError::Parse(format!("grid {s:?}: {t:?}: {e}")))
        };
        let grid = Grid {
            start: num(start)?,
            stop: num(stop)?,
            points: points
                .trim()
                .parse()
                .map_err(|e| CliError::Parse(format!("grid {s:?}: {points:?}: {e}")))?,
        };
        if !grid.start.is_finite() || !grid.stop.is_finite() {
            return Err(CliError::Validation(format!("grid {s:?} has non-finite bounds")));
        }
        if grid.points == 0 {
            return Err(CliError::Validation(format!("grid {s:?} has no points")));
        }
        if grid.points == 1 && grid.start != grid.stop {
            return Err(CliError::Validation(format!(
                "grid {s:?}: one point needs start == stop"
            )));
        }
        Ok(grid)
    }

    /// Points are `start + k (stop - start) / (points - 1)`, with the last
    /// one set to `stop` exactly.
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        let n = (self.points - 1) as f64;
        (0..self.points)
            .map(|k| {
                if k + 1 == self.points {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * (k as f64 / n)
                }
            })
            .collect()
    }

    pub fn check_within(&self, lo: f64, hi: f64, what: &str) -> CliResult<()> {
        let (a, b) = (self.start.min(self.stop), self.start.max(self.stop));
        if a < lo || b > hi {
            return Err(CliError::Validation(format!("{what} grid must lie in [{lo}, {hi}]")));
        }
        Ok(())
    }
}
