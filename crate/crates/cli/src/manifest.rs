use std::time::Instant;

use mmi_core::Limits;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

/// Environment variable holding a factor by which the exact-solver caps
/// are raised.
pub const CAP_OVERRIDE_VAR: &str = "MMI_CAP_OVERRIDE";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Exact solvers; the manifest records wall time.
    Exact,
    /// Lower-bound heuristics wherever an exact solver would be refused.
    Heuristic,
    /// Exact solvers and decimal input; outputs are reproducible byte for byte.
    Rational,
}

/// Provenance written into every output file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// SHA-256 of the input document or of the canonical arguments.
    pub input_digest: String,
    pub seed: Option<u64>,
    pub mode: Mode,
    pub caps_hit: Vec<String>,
    /// False when the caps were raised through the environment.
    pub certified: bool,
    /// Absent in rational mode.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_secs: Option<f64>,
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Default caps, or caps scaled by the override factor.
pub fn limits_from_env() -> Result<(Limits, bool)> {
    match std::env::var(CAP_OVERRIDE_VAR) {
        Ok(v) if !v.trim().is_empty() => {
            let f: usize = v
                .trim()
                .parse()
                .ok()
                .filter(|&f| f >= 1)
                .ok_or_else(|| CliError::Invalid(format!("{CAP_OVERRIDE_VAR} must be a positive integer, got {v:?}")))?;
            Ok((Limits::scaled(f), f == 1))
        }
        _ => Ok((Limits::default(), true)),
    }
}

pub struct ManifestBuilder {
    command: String,
    input_digest: String,
    seed: Option<u64>,
    mode: Mode,
    certified: bool,
    started: Instant,
    pub caps_hit: Vec<String>,
}

impl ManifestBuilder {
    pub fn new(command: &str, input: &[u8], seed: Option<u64>, mode: Mode, certified: bool) -> Self {
        ManifestBuilder {
            command: command.into(),
            input_digest: digest(input),
            seed,
            mode,
            certified,
            started: Instant::now(),
            caps_hit: Vec::new(),
        }
    }

    pub fn finish(mut self) -> RunManifest {
        self.caps_hit.sort();
        self.caps_hit.dedup();
        RunManifest {
            command: self.command,
            input_digest: self.input_digest,
            seed: self.seed,
            mode: self.mode,
            caps_hit: self.caps_hit,
            certified: self.certified,
            wall_time_secs: (self.mode != Mode::Rational).then(|| self.started.elapsed().as_secs_f64()),
        }
    }
}

/// The comment line that opens CSV outputs.
pub fn comment_line(m: &RunManifest) -> String {
    format!("# manifest: {}\n", serde_json::to_string(m).expect("manifest serializes"))
}
