//! Integrity attacks: benchmark circuit generators and minimal malicious
//! edits to transpiled artifacts.
//!
//! A tamper changes exactly one instruction (insert a RESET or retarget a
//! two-qubit gate) and re-runs scheduling so the edited artifact stays
//! timing-valid; detection must come from rebuild-and-compare, not from a
//! trivially broken schedule.

use serde::Serialize;
use thiserror::Error;

use crate::backend::BackendModel;
use crate::circuit::{Circuit, Instruction, Kind};
use crate::qasm::{serialize_artifact, Artifact, ArtifactError};
use crate::sim::{
    hellinger_fidelity, simulate, total_variation_distance, Distribution, SimError,
};
use crate::transpile::{stage_scheduling, TranspileError};

/// `H(q0); CX(q0,q1) ... CX(q_{n-2},q_{n-1})` with the first and last
/// qubits measured. Ideal output: 50% `00`, 50% `11`.
pub fn ghz_circuit(n: usize) -> Circuit {
    assert!(n >= 2, "GHZ needs at least two qubits");
    let mut c = Circuit::new(&format!("ghz{n}"), n, 2);
    c.push(Instruction::gate(Kind::H, vec![0]));
    for q in 0..n - 1 {
        c.push(Instruction::gate(Kind::Cx, vec![q, q + 1]));
    }
    c.push(Instruction::measure(0, 0));
    c.push(Instruction::measure(n - 1, 1));
    c
}

/// Three-qubit Grover search marking `101` and `110`, one iteration.
///
/// Oracle: `CX(q1,q2) CZ(q0,q2) CX(q1,q2)` flips the phase of states with
/// `q0 = 1` and `q1 != q2`. With 2 of 8 states marked, a single iteration
/// amplifies the marked set to probability 1.
pub fn grover3_circuit() -> Circuit {
    let mut c = Circuit::new("grover3", 3, 3);
    for q in 0..3 {
        c.push(Instruction::gate(Kind::H, vec![q]));
    }
    // Oracle.
    c.push(Instruction::gate(Kind::Cx, vec![1, 2]));
    c.push(Instruction::gate(Kind::Cz, vec![0, 2]));
    c.push(Instruction::gate(Kind::Cx, vec![1, 2]));
    // Diffusion.
    for q in 0..3 {
        c.push(Instruction::gate(Kind::H, vec![q]));
    }
    for q in 0..3 {
        c.push(Instruction::gate(Kind::X, vec![q]));
    }
    c.push(Instruction::gate(Kind::Ccz, vec![0, 1, 2]));
    for q in 0..3 {
        c.push(Instruction::gate(Kind::X, vec![q]));
    }
    for q in 0..3 {
        c.push(Instruction::gate(Kind::H, vec![q]));
    }
    for q in 0..3 {
        c.push(Instruction::measure(q, q));
    }
    c
}

/// A minimal artifact edit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TamperKind {
    /// Insert a RESET on the first qubit of the instruction at `position`,
    /// immediately before it.
    InsertReset,
    /// Re-point the two-qubit gate at `position` onto `new_qubits`.
    RetargetGate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TamperSpec {
    pub kind: TamperKind,
    /// Instruction index in the artifact's instruction section.
    pub position: usize,
    /// Replacement operands, RETARGET only.
    pub new_qubits: Option<(usize, usize)>,
}

#[derive(Debug, Error, PartialEq)]
pub enum TamperError {
    #[error("position {position} out of range ({count} instructions)")]
    InvalidPosition { position: usize, count: usize },
    #[error("retarget needs a two-qubit gate at the target position")]
    NotTwoQubit { position: usize },
    #[error("retarget pair ({0}, {1}) is not coupled on this backend")]
    UncoupledPair(usize, usize),
    #[error("retarget must change the qubit pair")]
    NoChange,
    #[error(transparent)]
    Schedule(#[from] TranspileError),
    #[error(transparent)]
    Serialize(#[from] ArtifactError),
}

/// Applies one minimal edit and re-serializes canonically. Explicit delays
/// are rebuilt by re-running the scheduler over the edited instruction
/// list.
pub fn apply_tamper(
    artifact: &Artifact,
    spec: &TamperSpec,
    backend: &BackendModel,
) -> Result<Artifact, TamperError> {
    let count = artifact.circuit.instructions.len();
    if spec.position >= count {
        return Err(TamperError::InvalidPosition { position: spec.position, count });
    }
    let mut instructions = artifact.circuit.instructions.clone();
    match spec.kind {
        TamperKind::InsertReset => {
            let qubit = instructions[spec.position].qubits[0];
            instructions.insert(spec.position, Instruction::reset(qubit));
        }
        TamperKind::RetargetGate => {
            let (a, b) = spec.new_qubits.ok_or(TamperError::NoChange)?;
            let target = &mut instructions[spec.position];
            if target.qubits.len() != 2 {
                return Err(TamperError::NotTwoQubit { position: spec.position });
            }
            if !backend.is_coupled(a, b) || a == b {
                return Err(TamperError::UncoupledPair(a, b));
            }
            let old = [target.qubits[0], target.qubits[1]];
            if old == [a, b] || (matches!(target.kind, Kind::Cz | Kind::Swap) && old == [b, a]) {
                return Err(TamperError::NoChange);
            }
            target.qubits = vec![a, b];
        }
    }

    // Strip the old schedule and rebuild it.
    instructions.retain(|i| i.kind != Kind::Delay);
    for instr in &mut instructions {
        instr.start_dt = None;
        instr.duration_dt = None;
    }
    let mut edited = artifact.circuit.clone();
    edited.instructions = instructions;
    let scheduled = stage_scheduling(&edited, backend)?;
    Ok(serialize_artifact(&scheduled, &artifact.layout, backend)?)
}

/// Ideal-simulation comparison between a genuine artifact and a tampered
/// one.
#[derive(Debug, Clone, Serialize)]
pub struct DistributionDelta {
    pub genuine: Vec<(String, f64)>,
    pub tampered: Vec<(String, f64)>,
    pub total_variation_distance: f64,
    pub hellinger_fidelity: f64,
    pub genuine_top: Vec<String>,
    pub tampered_top: Vec<String>,
}

/// Simulates both artifacts and reports distance metrics plus the top-k
/// outcome sets.
pub fn distribution_delta(
    genuine: &Artifact,
    tampered: &Artifact,
    top_k: usize,
) -> Result<DistributionDelta, SimError> {
    let p = simulate(&genuine.circuit)?;
    let q = simulate(&tampered.circuit)?;
    Ok(DistributionDelta {
        genuine: ranked_pairs(&p),
        tampered: ranked_pairs(&q),
        total_variation_distance: total_variation_distance(&p, &q),
        hellinger_fidelity: hellinger_fidelity(&p, &q),
        genuine_top: p.top_outcomes(top_k),
        tampered_top: q.top_outcomes(top_k),
    })
}

fn ranked_pairs(dist: &Distribution) -> Vec<(String, f64)> {
    dist.ranked()
        .into_iter()
        .filter(|(_, p)| *p > 1e-12)
        .collect()
}
