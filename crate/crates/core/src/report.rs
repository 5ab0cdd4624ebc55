//! Machine-readable run reports for the command-line tool.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::format::{canonical, write_json};

/// One run of one command. Timings are only recorded on request, so that
/// reports of identical runs are identical.
#[derive(Clone, Debug, Default, Serialize)]
pub struct CommandReport {
    pub command: String,
    /// Input path to the SHA-256 of its bytes.
    pub inputs: BTreeMap<String, String>,
    /// Output path to the SHA-256 of what was written.
    pub outputs: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<BTreeMap<String, f64>>,
    /// Named check to `"pass"` or `"fail"`.
    pub verification: BTreeMap<String, &'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub outcome: String,
    pub exit_code: i32,
    pub result: Value,
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl CommandReport {
    pub fn new(command: impl Into<String>, timings: bool, seed: Option<u64>) -> Self {
        CommandReport {
            command: command.into(),
            timings_ms: timings.then(BTreeMap::new),
            seed,
            result: Value::Null,
            ..Default::default()
        }
    }

    /// Reads a JSON input, recording its digest.
    pub fn read(&mut self, path: &Path) -> Result<Value> {
        let bytes = std::fs::read(path)?;
        self.inputs.insert(path.display().to_string(), digest(&bytes));
        Ok(serde_json::from_slice(&bytes)?)
    }

    /// Writes a JSON output canonically, recording its digest.
    pub fn write(&mut self, path: &Path, value: &Value) -> Result<()> {
        write_json(path, value)?;
        self.outputs
            .insert(path.display().to_string(), digest(canonical(value).as_bytes()));
        Ok(())
    }

    pub fn check(&mut self, name: &str, passed: bool) -> bool {
        self.verification
            .insert(name.to_owned(), if passed { "pass" } else { "fail" });
        passed
    }

    pub fn failed_checks(&self) -> Vec<&str> {
        self.verification
            .iter()
            .filter(|(_, &v)| v == "fail")
            .map(|(k, _)| k.as_str())
            .collect()
    }

    /// Runs `f` as a named stage, timing it if timings are on.
    pub fn stage<T>(&mut self, name: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        if let Some(t) = &mut self.timings_ms {
            t.insert(name.to_owned(), start.elapsed().as_secs_f64() * 1e3);
        }
        out
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("reports always serialize")
    }
}
