use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use waveqed::ChainConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSpec {
    pub t_max: f64,
    pub dt: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grids {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub kd: Option<GridSpec>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub delta_omega: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub omega: Option<GridSpec>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub time: Option<TimeSpec>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub a: Option<GridSpec>,
}

/// Everything that determines the bytes of an output file. Thread count is
/// deliberately absent: results do not depend on it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub config: Option<ChainConfig>,
    pub grids: Grids,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub method: Option<String>,
    pub outputs: Vec<String>,
    pub version: String,
}

impl RunManifest {
    pub fn new(command: &str, config: Option<ChainConfig>, grids: Grids, method: Option<&str>, out: Option<&Path>) -> Self {
        // File name only, so the same run in another directory hashes the same.
        let outputs = out
            .map(|p| vec![p.file_name().unwrap_or(p.as_os_str()).to_string_lossy().into_owned()])
            .unwrap_or_default();
        Self {
            command: command.to_string(),
            config,
            grids,
            method: method.map(str::to_string),
            outputs,
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    /// Hex SHA-256 of the pretty JSON form.
    pub fn sha256(&self) -> String {
        let digest = Sha256::digest(self.to_json().as_bytes());
        digest.iter().fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }
}

/// Shortest round-trip formatting; scientific outside [1e-4, 1e15).
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e15).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub struct Table {
    header: Vec<&'static str>,
    body: String,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self { header: header.to_vec(), body: String::new() }
    }

    pub fn row(&mut self, values: &[f64]) {
        debug_assert_eq!(values.len(), self.header.len());
        let line: Vec<String> = values.iter().map(|&v| fmt_f64(v)).collect();
        self.body.push_str(&line.join(","));
        self.body.push('\n');
    }

    pub fn render(&self, manifest_hash: &str) -> String {
        format!("{}\n{}# manifest-sha256: {manifest_hash}\n", self.header.join(","), self.body)
    }
}

/// Appends a suffix to the full file name: `out.csv` -> `out.csv.manifest.json`.
pub fn sidecar(out: &Path, suffix: &str) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(suffix);
    PathBuf::from(name)
}

pub fn write_text(path: &Path, text: &str) -> std::io::Result<()> {
    fs::write(path, text)
}

/// Writes `text` to `out` (or stdout) and the manifest beside it.
pub fn emit(out: Option<&Path>, text: &str, manifest: &RunManifest) -> std::io::Result<()> {
    match out {
        Some(path) => {
            write_text(path, text)?;
            write_text(&sidecar(path, ".manifest.json"), &manifest.to_json())
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()
        }
    }
}
