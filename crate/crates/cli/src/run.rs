//! Input digests, output sinks and the run manifest.

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub path: PathBuf,
    pub sha256: String,
    pub bytes: usize,
}

/// Everything needed to reproduce one invocation.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub argv: Vec<String>,
    pub parameters: Value,
    pub seed: Option<u64>,
    pub inputs: Vec<InputDigest>,
    pub tool_version: String,
    pub started_unix: f64,
    pub finished_unix: f64,
    pub timing: Value,
}

pub struct Run {
    command: String,
    argv: Vec<String>,
    inputs: Vec<InputDigest>,
    started: f64,
}

fn unix_now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

impl Run {
    pub fn new(command: &str, argv: Vec<String>) -> Self {
        Run { command: command.to_string(), argv, inputs: Vec::new(), started: unix_now() }
    }

    /// Reads an input file, recording its digest.
    pub fn read(&mut self, path: &Path) -> Result<String> {
        let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        self.inputs.push(InputDigest {
            path: path.to_path_buf(),
            sha256: hex::encode(Sha256::digest(&bytes)),
            bytes: bytes.len(),
        });
        String::from_utf8(bytes).with_context(|| format!("{} is not UTF-8", path.display()))
    }

    /// Writes the manifest next to `out`, or to stderr without an output file.
    pub fn finish(self, out: Option<&Path>, parameters: Value, seed: Option<u64>, timing: Value) -> Result<()> {
        let manifest = RunManifest {
            command: self.command,
            argv: self.argv,
            parameters,
            seed,
            inputs: self.inputs,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            started_unix: self.started,
            finished_unix: unix_now(),
            timing,
        };
        let text = serde_json::to_string_pretty(&manifest)?;
        match out {
            Some(path) => {
                let target = manifest_path(path);
                std::fs::write(&target, text + "\n").with_context(|| format!("writing {}", target.display()))?;
            }
            None => eprintln!("{text}"),
        }
        Ok(())
    }
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

pub fn open_output(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => {
            Box::new(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
        }
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Writes a single pretty JSON document.
pub fn write_document(out: Option<&Path>, value: &Value) -> Result<()> {
    let mut w = open_output(out)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

pub fn no_timing() -> Value {
    json!({})
}
