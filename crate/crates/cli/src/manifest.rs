//! Run manifests: the resolved invocation plus digests of every file read and written.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::commands::Run;
use crate::failure::Failure;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    /// Subcommand and every flag value, defaults included.
    pub run: Run,
    pub seed: Option<u64>,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Reads inputs and writes outputs for one command, recording digests.
/// Without an output directory nothing is written.
pub struct Context {
    out: Option<PathBuf>,
    inputs: Vec<FileDigest>,
    outputs: Vec<FileDigest>,
}

impl Context {
    pub fn new(out: Option<PathBuf>) -> Self {
        Context {
            out,
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn out_dir(&self) -> Option<&Path> {
        self.out.as_deref()
    }

    pub fn read(&mut self, path: &Path) -> Result<Vec<u8>, Failure> {
        let bytes = fs::read(path)
            .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
        self.inputs.push(FileDigest {
            path: path.display().to_string(),
            sha256: sha256_hex(&bytes),
        });
        Ok(bytes)
    }

    pub fn emit(&mut self, name: &str, bytes: &[u8]) -> Result<(), Failure> {
        if let Some(dir) = &self.out {
            fs::create_dir_all(dir)
                .map_err(|e| Failure::Input(format!("cannot create {}: {e}", dir.display())))?;
            let path = dir.join(name);
            fs::write(&path, bytes)
                .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))?;
            self.outputs.push(FileDigest {
                path: name.to_string(),
                sha256: sha256_hex(bytes),
            });
        }
        Ok(())
    }

    pub fn emit_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), Failure> {
        self.emit(name, &to_json(value))
    }

    /// Writes the manifest for `run` when an output directory is set.
    pub fn finish(self, run: &Run) -> Result<Option<RunManifest>, Failure> {
        let Some(dir) = self.out.clone() else {
            return Ok(None);
        };
        let manifest = RunManifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            run: run.clone(),
            seed: run.seed(),
            inputs: self.inputs,
            outputs: self.outputs,
        };
        let path = dir.join(MANIFEST_FILE);
        fs::write(&path, to_json(&manifest))
            .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))?;
        Ok(Some(manifest))
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("report types serialize");
    bytes.push(b'\n');
    bytes
}

pub fn load(path: &Path) -> Result<RunManifest, Failure> {
    let bytes = fs::read(path)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_slice(&bytes)
        .map_err(|e| Failure::Input(format!("{} is not a run manifest: {e}", path.display())))
}

/// Confirms every recorded input still has its recorded digest.
pub fn check_inputs(manifest: &RunManifest) -> Result<(), Failure> {
    for input in &manifest.inputs {
        let bytes = fs::read(&input.path)
            .map_err(|e| Failure::Input(format!("cannot read input {}: {e}", input.path)))?;
        if sha256_hex(&bytes) != input.sha256 {
            return Err(Failure::Input(format!(
                "input {} changed since the recorded run",
                input.path
            )));
        }
    }
    Ok(())
}

/// Output files whose digests differ between two manifests, or that only one lists.
pub fn differing_outputs(expected: &RunManifest, actual: &RunManifest) -> Vec<String> {
    let mut out = Vec::new();
    for e in &expected.outputs {
        match actual.outputs.iter().find(|a| a.path == e.path) {
            Some(a) if a.sha256 == e.sha256 => {}
            _ => out.push(e.path.clone()),
        }
    }
    for a in &actual.outputs {
        if !expected.outputs.iter().any(|e| e.path == a.path) {
            out.push(a.path.clone());
        }
    }
    out
}
