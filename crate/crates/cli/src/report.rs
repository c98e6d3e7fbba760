//! Machine-readable run reports: an ordered list of named check records
//! with a status, an optional value, and an optional witness string.
//! Serialization is deterministic; wall time goes to stderr, never into the
//! report bytes.

use serde::Serialize;

use crate::config::OutputFormat;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Info,
    Skipped,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub version: String,
    pub seed: u64,
    pub checks: Vec<CheckRecord>,
}

impl Report {
    pub fn new(command: &str, seed: u64) -> Self {
        Report {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, name: impl Into<String>, status: Status, value: Option<f64>) {
        self.checks.push(CheckRecord {
            name: name.into(),
            status,
            value,
            witness: None,
        });
    }

    pub fn push_witness(
        &mut self,
        name: impl Into<String>,
        status: Status,
        value: Option<f64>,
        witness: impl Into<String>,
    ) {
        self.checks.push(CheckRecord {
            name: name.into(),
            status,
            value,
            witness: Some(witness.into()),
        });
    }

    pub fn failed(&self) -> bool {
        self.checks.iter().any(|c| c.status == Status::Fail)
    }

    /// 0 when every check passed, 1 when a mathematical check failed.
    pub fn exit_code(&self) -> i32 {
        i32::from(self.failed())
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => {
                let mut text =
                    serde_json::to_string_pretty(self).expect("report serializes");
                text.push('\n');
                text
            }
            OutputFormat::Csv => self.to_csv(),
        }
    }

    fn to_csv(&self) -> String {
        let mut out = String::from("name,status,value,witness\n");
        for c in &self.checks {
            let status = match c.status {
                Status::Pass => "pass",
                Status::Fail => "fail",
                Status::Info => "info",
                Status::Skipped => "skipped",
            };
            let value = c.value.map(|v| v.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{}\n",
                csv_field(&c.name),
                status,
                value,
                csv_field(c.witness.as_deref().unwrap_or(""))
            ));
        }
        out
    }
}

/// Quote a CSV field when it contains a delimiter, quote, or newline.
fn csv_field(raw: &str) -> String {
    if raw.contains([',', '"', '\n']) {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw.to_string()
    }
}
