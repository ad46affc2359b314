//! Init covert channel: payload blocks become integer-valued RZ rotations
//! on an appended ancilla qubit.
//!
//! Each 6-byte block is an integer in `[0, 2^48)`, exactly representable
//! in binary64. The rotations are interleaved with RESETs so the
//! optimization stage can neither merge nor drop them, which is what lets
//! the blocks survive the rest of the pipeline untouched.

use super::codec::{deframe, frame};
use super::StegoError;
use crate::backend::BackendModel;
use crate::circuit::{Circuit, Instruction, Kind};
use crate::qasm::Artifact;
use crate::transpile::stage_init;

pub const BLOCK_BYTES: usize = 6;

/// Drop-in replacement for the init stage: honest init first, then the
/// guarded ancilla rotations.
pub fn leaky_init_stage(
    circuit: &Circuit,
    backend: &BackendModel,
    payload: &[u8],
) -> Result<Circuit, StegoError> {
    if circuit.num_qubits >= backend.num_qubits {
        return Err(StegoError::NoFreeQubit(backend.num_qubits));
    }
    let mut out = stage_init(circuit);
    let ancilla = out.num_qubits;
    out.num_qubits += 1;

    let framed = frame(payload)?;
    out.push(Instruction::reset(ancilla));
    for block in framed.chunks(BLOCK_BYTES) {
        // Short final blocks are zero-padded on the right; the decoder
        // reads whole blocks and deframing ignores the padding.
        let mut padded = [0u8; 8];
        padded[2..2 + block.len()].copy_from_slice(block);
        let value = u64::from_be_bytes(padded);
        out.push(Instruction::rz(ancilla, value as f64));
        out.push(Instruction::reset(ancilla));
    }
    Ok(out)
}

fn block_bytes_of(angle: f64) -> Result<[u8; BLOCK_BYTES], StegoError> {
    if angle < 0.0 || angle.fract() != 0.0 || angle >= (1u64 << 48) as f64 {
        return Err(StegoError::NonIntegerAngle(angle));
    }
    let value = angle as u64;
    let be = value.to_be_bytes();
    Ok(be[2..8].try_into().unwrap())
}

/// Recovers a payload from the reset-guarded rotation chain of an
/// intercepted artifact.
///
/// The ancilla is not marked in the artifact; it is identified as a qubit
/// whose instruction sequence is exactly `RESET (RZ RESET)+` (delays and
/// barriers aside). Candidates are tried in qubit order and the first one
/// that deframes cleanly wins.
pub fn decode_init(artifact: &Artifact) -> Result<Vec<u8>, StegoError> {
    let circuit = &artifact.circuit;
    let mut first_error: Option<StegoError> = None;
    for qubit in 0..circuit.num_qubits {
        let ops: Vec<&Instruction> = circuit
            .instructions
            .iter()
            .filter(|i| {
                i.qubits.contains(&qubit) && !matches!(i.kind, Kind::Delay | Kind::Barrier)
            })
            .collect();
        let shape_matches = ops.len() >= 3
            && ops.len() % 2 == 1
            && ops
                .iter()
                .enumerate()
                .all(|(index, op)| match index % 2 {
                    0 => op.kind == Kind::Reset,
                    _ => op.kind == Kind::Rz && op.qubits.len() == 1,
                });
        if !shape_matches {
            continue;
        }
        let mut framed = Vec::new();
        let mut bad = None;
        for op in ops.iter().filter(|op| op.kind == Kind::Rz) {
            match block_bytes_of(op.angle()) {
                Ok(block) => framed.extend_from_slice(&block),
                Err(e) => {
                    bad = Some(e);
                    break;
                }
            }
        }
        let outcome = match bad {
            Some(e) => Err(e),
            None => deframe(&framed),
        };
        match outcome {
            Ok(payload) => return Ok(payload),
            Err(e) => {
                first_error.get_or_insert(e);
            }
        }
    }
    Err(first_error.unwrap_or_else(|| {
        StegoError::Frame("no reset-guarded rotation chain found".to_string())
    }))
}
