//! Optimization stage: deterministic peephole passes run to a fixpoint.
//!
//! Each sweep applies, in fixed order:
//!
//! 1. merge adjacent RZ on the same qubit by binary64 addition;
//! 2. drop RZ with `|angle| < 1e-12`, except rotations immediately
//!    enclosed by RESETs on their qubit (reset guards pin their payload
//!    gates in place, see the init covert channel);
//! 3. cancel adjacent self-inverse pairs: X X, CZ CZ on the same pair,
//!    CX CX in the same orientation.
//!
//! Any intervening instruction on a shared qubit (RESET and BARRIER in
//! particular) blocks merging and cancellation across it. Cancellation
//! strictly shrinks the circuit, so the sweep cap is a formality.

use crate::circuit::{Circuit, Instruction, Kind};

const MAX_SWEEPS: usize = 100;
const ANGLE_EPSILON: f64 = 1e-12;

fn merge_adjacent_rz(instructions: &mut Vec<Instruction>, num_qubits: usize) -> bool {
    let mut out: Vec<Instruction> = Vec::with_capacity(instructions.len());
    let mut last_touch: Vec<Option<usize>> = vec![None; num_qubits];
    let mut changed = false;
    for instr in instructions.drain(..) {
        if instr.kind == Kind::Rz {
            if let Some(prev) = last_touch[instr.qubits[0]] {
                if out[prev].kind == Kind::Rz {
                    out[prev].params[0] += instr.params[0];
                    changed = true;
                    continue;
                }
            }
        }
        let index = out.len();
        for &q in &instr.qubits {
            last_touch[q] = Some(index);
        }
        out.push(instr);
    }
    *instructions = out;
    changed
}

/// True when the neighbors of `index` on its qubit are RESETs on both
/// sides.
fn reset_guarded(instructions: &[Instruction], index: usize) -> bool {
    let q = instructions[index].qubits[0];
    let before = instructions[..index]
        .iter()
        .rev()
        .find(|i| i.qubits.contains(&q));
    let after = instructions[index + 1..]
        .iter()
        .find(|i| i.qubits.contains(&q));
    matches!(before, Some(i) if i.kind == Kind::Reset)
        && matches!(after, Some(i) if i.kind == Kind::Reset)
}

fn drop_small_rz(instructions: &mut Vec<Instruction>) -> bool {
    let doomed: Vec<usize> = instructions
        .iter()
        .enumerate()
        .filter(|(index, instr)| {
            instr.kind == Kind::Rz
                && instr.angle().abs() < ANGLE_EPSILON
                && !reset_guarded(instructions, *index)
        })
        .map(|(index, _)| index)
        .collect();
    if doomed.is_empty() {
        return false;
    }
    let mut cursor = 0;
    let mut keep = 0;
    instructions.retain(|_| {
        let drop = cursor < doomed.len() && doomed[cursor] == keep;
        if drop {
            cursor += 1;
        }
        keep += 1;
        !drop
    });
    true
}

fn cancels(a: &Instruction, b: &Instruction) -> bool {
    match (a.kind, b.kind) {
        (Kind::X, Kind::X) => a.qubits == b.qubits,
        (Kind::Cx, Kind::Cx) => a.qubits == b.qubits,
        (Kind::Cz, Kind::Cz) => {
            let mut left = a.qubits.clone();
            let mut right = b.qubits.clone();
            left.sort_unstable();
            right.sort_unstable();
            left == right
        }
        _ => false,
    }
}

fn cancel_adjacent_pairs(instructions: &mut Vec<Instruction>) -> bool {
    let mut alive: Vec<Option<Instruction>> =
        instructions.drain(..).map(Some).collect();
    let mut changed = false;
    for index in 0..alive.len() {
        let Some(instr) = alive[index].clone() else { continue };
        if !matches!(instr.kind, Kind::X | Kind::Cx | Kind::Cz) {
            continue;
        }
        // The previous live instruction sharing any qubit must be the
        // partner on every one of its qubits.
        let prev = alive[..index]
            .iter()
            .enumerate()
            .rev()
            .filter_map(|(j, slot)| slot.as_ref().map(|i| (j, i)))
            .find(|(_, i)| i.qubits.iter().any(|q| instr.qubits.contains(q)));
        if let Some((j, partner)) = prev {
            let partner_covers_all = instr
                .qubits
                .iter()
                .all(|q| partner.qubits.contains(q));
            if partner_covers_all && cancels(partner, &instr) {
                alive[j] = None;
                alive[index] = None;
                changed = true;
            }
        }
    }
    *instructions = alive.into_iter().flatten().collect();
    changed
}

pub fn stage_optimization(circuit: &Circuit) -> Circuit {
    let mut out = circuit.clone();
    for _ in 0..MAX_SWEEPS {
        let mut changed = merge_adjacent_rz(&mut out.instructions, out.num_qubits);
        changed |= drop_small_rz(&mut out.instructions);
        changed |= cancel_adjacent_pairs(&mut out.instructions);
        if !changed {
            break;
        }
    }
    out
}
