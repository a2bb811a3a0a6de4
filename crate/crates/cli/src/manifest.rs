use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

/// Record of one command run. Everything except `timings` is reproducible.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: Value,
    pub verdicts: Value,
    pub passed: bool,
    pub outputs: Vec<String>,
    pub timings: Timings,
}

#[derive(Debug, Serialize)]
pub struct Timings {
    pub wall_ms: u128,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub search_ms: Option<u128>,
}

impl RunManifest {
    pub fn new(command: &str, parameters: Value) -> Self {
        Self {
            command: command.to_string(),
            parameters,
            verdicts: Value::Null,
            passed: false,
            outputs: Vec::new(),
            timings: Timings {
                wall_ms: 0,
                search_ms: None,
            },
        }
    }

    pub fn finish(&mut self, started: Instant) {
        self.timings.wall_ms = started.elapsed().as_millis();
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }
}

pub fn display(path: &Path) -> String {
    path.display().to_string()
}

pub fn out_path(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}
