//! Run manifests: every invocation writes `manifest.json` into the output
//! directory, success or not, so a result directory is self-describing.
//! Two runs of the same command differ only in `duration_ms`.

use gdl_core::{GdlError, Result};
use serde::Serialize;
use std::path::Path;

#[derive(Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub argv: Vec<String>,
    /// Resolved game label, once known.
    pub game: Option<String>,
    pub seed: Option<u64>,
    pub threads: usize,
    /// Echo of the fully resolved run settings.
    pub config: serde_json::Value,
    /// Files written into the output directory, in creation order.
    pub outputs: Vec<String>,
    /// `ok`, `input_error`, or `numerical_error`.
    pub status: String,
    pub error: Option<String>,
    pub duration_ms: u64,
}

impl Manifest {
    pub fn new(command: &str, argv: Vec<String>, threads: usize) -> Self {
        Manifest {
            tool: "gdl",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            argv,
            game: None,
            seed: None,
            threads,
            config: serde_json::Value::Null,
            outputs: Vec::new(),
            status: "ok".to_string(),
            error: None,
            duration_ms: 0,
        }
    }

    pub fn record_output(&mut self, name: &str) {
        self.outputs.push(name.to_string());
    }

    pub fn finish(&mut self, outcome: &Result<()>, duration_ms: u64) {
        self.duration_ms = duration_ms;
        match outcome {
            Ok(()) => self.status = "ok".to_string(),
            Err(GdlError::Input(msg)) => {
                self.status = "input_error".to_string();
                self.error = Some(msg.clone());
            }
            Err(GdlError::Numerical(msg)) => {
                self.status = "numerical_error".to_string();
                self.error = Some(msg.clone());
            }
        }
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let value = serde_json::to_value(self)
            .map_err(|e| GdlError::input(format!("serialize manifest: {e}")))?;
        crate::output::write_json(&dir.join("manifest.json"), &value)
    }
}
