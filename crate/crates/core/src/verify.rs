//! Independent rebuild-and-compare verification.
//!
//! The verifier replays the build described by a buildinfo file using the
//! locally available honest plugins and byte-compares the result against
//! the distributed artifact. A buildinfo naming a plugin this toolchain
//! does not ship (or the wrong tool version) is a build error, never a
//! silent substitution.

use serde::Serialize;

use crate::backend::BackendModel;
use crate::hash::sha256_hex;
use crate::qasm::BuildInfo;
use crate::transpile::{honest_config_from_plugins, run_pipeline};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VerdictStatus {
    Reproducible,
    NonReproducible,
    BuildError,
}

/// One differing line between the rebuilt and the distributed artifact.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiffLine {
    pub line: usize,
    /// Rebuilt (trusted) content; empty when the distributed artifact has
    /// extra lines.
    pub expected: String,
    /// Distributed content; empty when the rebuild has extra lines.
    pub actual: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub status: VerdictStatus,
    /// Index of the first differing byte, present iff non-reproducible.
    pub first_diff_offset: Option<usize>,
    pub diff_lines: Vec<DiffLine>,
    /// Build failure reason, present iff status is `BuildError`.
    pub error: Option<String>,
}

impl Verdict {
    fn build_error(message: String) -> Self {
        Verdict {
            status: VerdictStatus::BuildError,
            first_diff_offset: None,
            diff_lines: Vec::new(),
            error: Some(message),
        }
    }
}

/// Line-level diff: pairs up lines by index and reports mismatches.
pub fn diff_lines(expected: &str, actual: &str) -> Vec<DiffLine> {
    let left: Vec<&str> = expected.lines().collect();
    let right: Vec<&str> = actual.lines().collect();
    let mut out = Vec::new();
    for index in 0..left.len().max(right.len()) {
        let e = left.get(index).copied().unwrap_or("");
        let a = right.get(index).copied().unwrap_or("");
        if e != a {
            out.push(DiffLine {
                line: index + 1,
                expected: e.to_string(),
                actual: a.to_string(),
            });
        }
    }
    out
}

fn first_diff_offset(expected: &str, actual: &str) -> usize {
    expected
        .bytes()
        .zip(actual.bytes())
        .position(|(e, a)| e != a)
        .unwrap_or_else(|| expected.len().min(actual.len()))
}

/// Rebuilds from source + buildinfo and byte-compares against the
/// distributed artifact.
pub fn verify_build(
    source: &str,
    buildinfo: &BuildInfo,
    artifact_bytes: &str,
    backend: &BackendModel,
) -> Verdict {
    if sha256_hex(source.as_bytes()) != buildinfo.source_sha256 {
        return Verdict::build_error(
            "source file does not match buildinfo source_sha256".to_string(),
        );
    }
    if backend.sha256 != buildinfo.backend_sha256 {
        return Verdict::build_error(
            "backend model does not match buildinfo backend_sha256".to_string(),
        );
    }
    let config = match honest_config_from_plugins(
        backend.clone(),
        buildinfo.master_seed,
        buildinfo.options.clone(),
        &buildinfo.stage_plugins,
    ) {
        Ok(config) => config,
        Err(e) => return Verdict::build_error(e.to_string()),
    };
    let (rebuilt, _) = match run_pipeline(source, &config) {
        Ok(result) => result,
        Err(e) => return Verdict::build_error(format!("rebuild failed: {e}")),
    };
    if rebuilt.bytes == artifact_bytes {
        Verdict {
            status: VerdictStatus::Reproducible,
            first_diff_offset: None,
            diff_lines: Vec::new(),
            error: None,
        }
    } else {
        Verdict {
            status: VerdictStatus::NonReproducible,
            first_diff_offset: Some(first_diff_offset(&rebuilt.bytes, artifact_bytes)),
            diff_lines: diff_lines(&rebuilt.bytes, artifact_bytes),
            error: None,
        }
    }
}
