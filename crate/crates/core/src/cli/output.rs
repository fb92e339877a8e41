use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

/// Version tag written into every output header.
pub const SCHEMA_VERSION: &str = "roy-detect/1";

/// One table cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Number(f64),
    Text(String),
    Empty,
}

impl Cell {
    fn to_csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Number(v) => format!("{v:.16e}"),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn from_csv(field: &str) -> Self {
        if field.is_empty() {
            Cell::Empty
        } else if let Ok(v) = field.parse::<i64>() {
            Cell::Int(v)
        } else if let Ok(v) = field.parse::<f64>() {
            Cell::Number(v)
        } else {
            Cell::Text(field.to_string())
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(v) => Some(*v as f64),
            Cell::Number(v) => Some(*v),
            _ => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        if v.is_finite() {
            Cell::Number(v)
        } else {
            Cell::Empty
        }
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

/// Everything a command emits: provenance header plus a table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub schema_version: String,
    pub command: String,
    pub params: BTreeMap<String, String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub summary: BTreeMap<String, String>,
}

impl OutputRecord {
    pub fn new(command: &str, params: BTreeMap<String, String>, columns: &[&str]) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.to_string(),
            command: command.to_string(),
            params,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            summary: BTreeMap::new(),
        }
    }

    /// The invocation reconstructed from the canonical parameters.
    pub fn command_echo(&self) -> String {
        let mut s = format!("roy-detect {}", self.command);
        for (k, v) in &self.params {
            let flag = k.replace('_', "-");
            match v.as_str() {
                "true" => {
                    let _ = write!(s, " --{flag}");
                }
                "false" => {}
                _ => {
                    let _ = write!(s, " --{flag} {v}");
                }
            }
        }
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# schema_version={}", self.schema_version);
        let _ = writeln!(s, "# command={}", self.command);
        let _ = writeln!(s, "# echo={}", self.command_echo());
        for (k, v) in &self.params {
            let _ = writeln!(s, "# param {k}={v}");
        }
        for (k, v) in &self.summary {
            let _ = writeln!(s, "# summary {k}={v}");
        }
        let _ = writeln!(s, "{}", self.columns.join(","));
        for row in &self.rows {
            let fields: Vec<String> = row.iter().map(Cell::to_csv).collect();
            let _ = writeln!(s, "{}", fields.join(","));
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self, String> {
        let mut rec = OutputRecord::new("", BTreeMap::new(), &[]);
        rec.schema_version.clear();
        let mut have_columns = false;
        for line in text.lines() {
            if let Some(h) = line.strip_prefix("# ") {
                let split = |kv: &str| -> Result<(String, String), String> {
                    kv.split_once('=')
                        .map(|(k, v)| (k.to_string(), v.to_string()))
                        .ok_or_else(|| format!("malformed header line: {line}"))
                };
                if let Some(v) = h.strip_prefix("schema_version=") {
                    rec.schema_version = v.to_string();
                } else if let Some(v) = h.strip_prefix("command=") {
                    rec.command = v.to_string();
                } else if h.starts_with("echo=") {
                } else if let Some(kv) = h.strip_prefix("param ") {
                    let (k, v) = split(kv)?;
                    rec.params.insert(k, v);
                } else if let Some(kv) = h.strip_prefix("summary ") {
                    let (k, v) = split(kv)?;
                    rec.summary.insert(k, v);
                } else {
                    return Err(format!("unknown header line: {line}"));
                }
            } else if !have_columns {
                rec.columns = line.split(',').map(str::to_string).collect();
                have_columns = true;
            } else {
                let row: Vec<Cell> = line.split(',').map(Cell::from_csv).collect();
                if row.len() != rec.columns.len() {
                    return Err(format!("row has {} fields, expected {}", row.len(), rec.columns.len()));
                }
                rec.rows.push(row);
            }
        }
        if rec.schema_version.is_empty() || !have_columns {
            return Err("missing schema header or column line".into());
        }
        Ok(rec)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("output record serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| e.to_string())
    }
}
