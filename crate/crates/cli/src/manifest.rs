//! Run manifests and output directories.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

/// Environment variable naming the parent of default output directories.
pub const OUT_DIR_ENV: &str = "SMALLBALL_OUT_DIR";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Incomplete,
    Complete,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub status: RunStatus,
    /// Resolved parameters after merging the config file and flags.
    pub parameters: Value,
    pub master_seed: Option<u64>,
    pub version: String,
    /// Seconds since the Unix epoch.
    pub started_at: f64,
    pub wall_clock_seconds: Option<f64>,
    pub outputs: Vec<String>,
    /// SHA-256 of the canonical parameter JSON, thread count excluded.
    pub config_hash: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Sorted-key, whitespace-free JSON.
pub fn canonical_json(value: &Value) -> String {
    fn sort(v: &Value) -> Value {
        match v {
            Value::Object(m) => {
                let mut entries: Vec<(&String, &Value)> = m.iter().collect();
                entries.sort_by(|a, b| a.0.cmp(b.0));
                Value::Object(entries.into_iter().map(|(k, v)| (k.clone(), sort(v))).collect())
            }
            Value::Array(a) => Value::Array(a.iter().map(sort).collect()),
            _ => v.clone(),
        }
    }
    sort(value).to_string()
}

pub fn config_hash(parameters: &Value) -> String {
    let mut hashed = parameters.clone();
    if let Value::Object(m) = &mut hashed {
        m.remove("threads");
        m.remove("out");
    }
    let digest = Sha256::digest(canonical_json(&hashed).as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// `--out` if given, else `$SMALLBALL_OUT_DIR/<command>-<hash>`, else
/// `smallball-runs/<command>-<hash>` under the working directory.
pub fn resolve_out_dir(flag: Option<&Path>, command: &str, hash: &str) -> PathBuf {
    if let Some(dir) = flag {
        return dir.to_path_buf();
    }
    let leaf = format!("{command}-{}", &hash[..12]);
    match std::env::var_os(OUT_DIR_ENV) {
        Some(parent) if !parent.is_empty() => PathBuf::from(parent).join(leaf),
        _ => PathBuf::from("smallball-runs").join(leaf),
    }
}

/// A run in progress: the manifest is on disk from the start and is
/// rewritten when the run ends.
pub struct Run {
    dir: PathBuf,
    manifest: RunManifest,
    clock: Instant,
}

impl Run {
    pub fn start(command: &str, parameters: Value, master_seed: Option<u64>, out: Option<&Path>) -> CliResult<Self> {
        let hash = config_hash(&parameters);
        let dir = resolve_out_dir(out, command, &hash);
        fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
        let started_at = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs_f64())
            .unwrap_or(0.0);
        let run = Run {
            dir,
            manifest: RunManifest {
                command: command.to_string(),
                status: RunStatus::Incomplete,
                parameters,
                master_seed,
                version: env!("CARGO_PKG_VERSION").to_string(),
                started_at,
                wall_clock_seconds: None,
                outputs: Vec::new(),
                config_hash: hash,
                error: None,
            },
            clock: Instant::now(),
        };
        run.write_manifest()?;
        log::info!("writing to {}", run.dir.display());
        Ok(run)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn manifest(&self) -> &RunManifest {
        &self.manifest
    }

    fn write_manifest(&self) -> CliResult<()> {
        let path = self.dir.join(MANIFEST_FILE);
        let text = serde_json::to_string_pretty(&self.manifest).expect("manifest serializes");
        fs::write(&path, text + "\n").map_err(|e| CliError::io(&path, e))
    }

    /// Writes an output file inside the run directory and records it.
    pub fn write_output(&mut self, name: &str, contents: &[u8]) -> CliResult<PathBuf> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
        self.manifest.outputs.push(name.to_string());
        Ok(path)
    }

    pub fn write_json<S: Serialize>(&mut self, name: &str, value: &S) -> CliResult<PathBuf> {
        let text = serde_json::to_string_pretty(value).expect("output serializes") + "\n";
        self.write_output(name, text.as_bytes())
    }

    /// Final manifest rewrite; a failed run keeps its error message.
    pub fn finish<T>(mut self, outcome: &CliResult<T>) -> CliResult<()> {
        self.manifest.wall_clock_seconds = Some(self.clock.elapsed().as_secs_f64());
        match outcome {
            Ok(_) => self.manifest.status = RunStatus::Complete,
            Err(e) => {
                self.manifest.status = RunStatus::Failed;
                self.manifest.error = Some(e.to_string());
            }
        }
        self.write_manifest()
    }
}
