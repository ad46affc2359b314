//! Scheduling stage: ASAP start-time assignment with explicit idle delays.
//!
//! Each instruction starts at the latest end time over its qubits. When a
//! qubit idles between two of its own instructions, an explicit DELAY
//! covering the gap is inserted (lowest qubit first when several gaps
//! close at once). Qubits get no delay before their first instruction or
//! after their last.

use super::TranspileError;
use crate::backend::BackendModel;
use crate::circuit::{Circuit, Instruction, Kind};

fn lookup_duration(
    backend: &BackendModel,
    instr: &Instruction,
) -> Result<u64, TranspileError> {
    match instr.kind {
        Kind::Barrier => Ok(0),
        Kind::Delay => instr.duration_dt.ok_or(TranspileError::MissingDuration {
            kind: "delay",
            qubits: instr.qubits.clone(),
        }),
        kind => backend
            .duration(kind, &instr.qubits)
            .ok_or(TranspileError::MissingDuration {
                kind: kind.mnemonic(),
                qubits: instr.qubits.clone(),
            }),
    }
}

pub fn stage_scheduling(
    circuit: &Circuit,
    backend: &BackendModel,
) -> Result<Circuit, TranspileError> {
    let mut out = Circuit::new(&circuit.name, circuit.num_qubits, circuit.num_clbits);
    out.is_physical = circuit.is_physical;
    let mut free_at = vec![0u64; circuit.num_qubits];
    let mut used = vec![false; circuit.num_qubits];

    for instr in &circuit.instructions {
        let duration = lookup_duration(backend, instr)?;
        let start = instr.qubits.iter().map(|&q| free_at[q]).max().unwrap_or(0);
        let mut gaps: Vec<usize> = instr
            .qubits
            .iter()
            .copied()
            .filter(|&q| used[q] && free_at[q] < start)
            .collect();
        gaps.sort_unstable();
        for q in gaps {
            let mut delay = Instruction::delay(q, start - free_at[q]);
            delay.start_dt = Some(free_at[q]);
            out.push(delay);
        }
        let mut scheduled = instr.clone();
        scheduled.start_dt = Some(start);
        scheduled.duration_dt = Some(duration);
        out.push(scheduled);
        for &q in &instr.qubits {
            free_at[q] = start + duration;
            used[q] = true;
        }
    }
    Ok(out)
}
