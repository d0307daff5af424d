//! Line-delimited JSON reports.
//!
//! Line 1 is the header and is the only line allowed to differ between two
//! runs of the same configuration (it carries the timestamp and timing).
//! Line 2 embeds the [`RunConfig`]; data records follow; the last line holds
//! the status and exit code.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

pub const SCHEMA: &str = "chevlab-report/1";

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Vec<String>,
    pub phi: Option<String>,
    pub ring: Option<String>,
    pub model: Option<String>,
    /// Remaining named inputs (file paths, words, modes, cases).
    pub inputs: BTreeMap<String, String>,
    pub seed: u64,
    pub budget: usize,
    pub samples: usize,
    pub output: Option<String>,
}

#[derive(Clone, Debug)]
pub struct Report {
    pub config: RunConfig,
    pub records: Vec<Value>,
    pub status: String,
    pub exit_code: i32,
}

impl Report {
    pub fn new(config: RunConfig) -> Self {
        Report { config, records: Vec::new(), status: "ok".into(), exit_code: 0 }
    }

    pub fn push(&mut self, kind: &str, data: Value) {
        self.records.push(json!({"record": kind, "data": data}));
    }

    /// Everything but the header; identical for identical configurations.
    pub fn body(&self) -> String {
        let mut lines = vec![json!({"config": self.config}).to_string()];
        lines.extend(self.records.iter().map(Value::to_string));
        lines.push(json!({"status": self.status, "exit_code": self.exit_code}).to_string());
        lines.join("\n") + "\n"
    }

    pub fn render(&self, timestamp_unix: u64, elapsed_ms: u128) -> String {
        let header = json!({"header": {"schema": SCHEMA, "timestamp_unix": timestamp_unix, "elapsed_ms": elapsed_ms as u64}});
        format!("{header}\n{}", self.body())
    }
}

/// Drops the header line of a rendered report.
pub fn strip_header(text: &str) -> &str {
    text.split_once('\n').map_or("", |(_, rest)| rest)
}
