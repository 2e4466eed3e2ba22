//! Machine-readable summary of one CLI invocation, written as JSON
//! when a run passes `--report`.

use serde::Serialize;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::fmt::Write as _;

/// One run, one report. The verdict word and the process exit code
/// carry the same outcome: code 0 verdicts are "valid", "classified",
/// "solved", "feasible", "abstracted" and "generated"; code 1 verdicts
/// are "invalid", "infeasible" and "unreachable"; code 2 runs report
/// "error".
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    /// The invocation as typed, argv joined by spaces.
    pub command: String,
    /// Hex SHA-256 of the input file, or of the parameter line for
    /// generator runs.
    pub input_sha256: String,
    pub verdict: String,
    pub exit_code: i32,
    /// Named numeric results: state values, goals, certified bounds.
    pub values: BTreeMap<String, f64>,
    /// Path of the iteration trace, when one was written.
    pub trace: Option<String>,
    /// Generator seed, when one participated.
    pub seed: Option<u64>,
    pub wall_ms: f64,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut hex = String::with_capacity(64);
    for byte in digest {
        write!(hex, "{byte:02x}").expect("writing to a string cannot fail");
    }
    hex
}
