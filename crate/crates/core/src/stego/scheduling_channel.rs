//! Scheduling covert channel: payload bytes replace the least significant
//! bytes of existing rotation angles.
//!
//! Rotations are sorted by physical qubit (ascending), then start time,
//! then original position; the framed payload is split into
//! `bytes_per_gate` blocks written into successive gates. The replaced
//! bits are all mantissa bits, so a modified angle differs from the
//! original by at most `2^(8b - 52)` relative: 2^-36 at stealth 2.

use super::codec::{deframe, frame};
use super::{StealthLevel, StegoError};
use crate::backend::BackendModel;
use crate::circuit::{Circuit, Instruction, Kind};
use crate::qasm::Artifact;
use crate::transpile::stage_scheduling;

/// Indices of RZ instructions in canonical channel order.
fn rz_order(instructions: &[Instruction]) -> Vec<usize> {
    let mut order: Vec<usize> = instructions
        .iter()
        .enumerate()
        .filter(|(_, i)| i.kind == Kind::Rz)
        .map(|(index, _)| index)
        .collect();
    order.sort_by_key(|&index| {
        let instr = &instructions[index];
        (instr.qubits[0], instr.start_dt.unwrap_or(0), index)
    });
    order
}

/// Drop-in replacement for the scheduling stage: honest schedule first,
/// then the payload overwrite.
pub fn leaky_scheduling_stage(
    circuit: &Circuit,
    backend: &BackendModel,
    payload: &[u8],
    stealth: StealthLevel,
) -> Result<Circuit, StegoError> {
    let mut out = stage_scheduling(circuit, backend)?;
    let framed = frame(payload)?;
    let order = rz_order(&out.instructions);
    let bytes_per_gate = stealth.bytes_per_gate();
    let capacity = bytes_per_gate * order.len();
    if framed.len() > capacity {
        return Err(StegoError::InsufficientRzGates {
            needed: framed.len(),
            capacity,
        });
    }
    let mask = (1u64 << (8 * bytes_per_gate)) - 1;
    for (chunk, &index) in framed.chunks(bytes_per_gate).zip(&order) {
        let mut block = [0u8; 8];
        block[8 - bytes_per_gate..8 - bytes_per_gate + chunk.len()].copy_from_slice(chunk);
        let value = u64::from_be_bytes(block);
        let instr = &mut out.instructions[index];
        let bits = (instr.angle().to_bits() & !mask) | value;
        instr.params[0] = f64::from_bits(bits);
    }
    Ok(out)
}

/// Extracts the low angle bytes of every rotation in channel order and
/// deframes the result.
pub fn decode_scheduling(
    artifact: &Artifact,
    stealth: StealthLevel,
) -> Result<Vec<u8>, StegoError> {
    let instructions = &artifact.circuit.instructions;
    let bytes_per_gate = stealth.bytes_per_gate();
    let mut framed = Vec::new();
    for index in rz_order(instructions) {
        let bits = instructions[index].angle().to_bits();
        framed.extend_from_slice(&bits.to_be_bytes()[8 - bytes_per_gate..]);
    }
    deframe(&framed)
}
