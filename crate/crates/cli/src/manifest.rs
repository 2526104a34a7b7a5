//! Run manifests: enough to re-run a command and get identical bytes.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Parsed arguments with every default filled in, plus what the command
    /// resolved on its own.
    pub config: Value,
    /// Arguments without `--out` / `--manifest`; `replay` parses these again.
    pub argv: Vec<String>,
    pub input_hash: Option<String>,
    pub seed: Option<u64>,
    pub tool_version: String,
    pub timestamp_utc: String,
}

impl RunManifest {
    pub fn read(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }
}

/// Drops output-location flags so a replay can choose its own.
pub fn replayable_argv(args: &[String]) -> Vec<String> {
    let mut out = Vec::with_capacity(args.len());
    let mut skip = false;
    for a in args {
        if skip {
            skip = false;
            continue;
        }
        if a == "--out" || a == "--manifest" {
            skip = true;
            continue;
        }
        if a.starts_with("--out=") || a.starts_with("--manifest=") {
            continue;
        }
        out.push(a.clone());
    }
    out
}

pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}
