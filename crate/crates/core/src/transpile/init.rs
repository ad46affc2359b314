//! Init stage: expands three-qubit gates into one- and two-qubit gates.

use std::f64::consts::FRAC_PI_4;

use crate::circuit::{Circuit, Instruction, Kind};

/// Expands CCX/CCZ so that no instruction except BARRIER has arity three
/// or more. Circuits already in that form pass through unchanged.
pub fn stage_init(circuit: &Circuit) -> Circuit {
    let mut out = Circuit::new(&circuit.name, circuit.num_qubits, circuit.num_clbits);
    out.is_physical = circuit.is_physical;
    for instr in &circuit.instructions {
        match instr.kind {
            Kind::Ccz => out.instructions.extend(expand_ccz(
                instr.qubits[0],
                instr.qubits[1],
                instr.qubits[2],
            )),
            Kind::Ccx => {
                // CCX = H(target) CCZ H(target)
                let target = instr.qubits[2];
                out.push(Instruction::gate(Kind::H, vec![target]));
                out.instructions.extend(expand_ccz(
                    instr.qubits[0],
                    instr.qubits[1],
                    instr.qubits[2],
                ));
                out.push(Instruction::gate(Kind::H, vec![target]));
            }
            _ => out.push(instr.clone()),
        }
    }
    out
}

/// Standard 6-CX decomposition with seven RZ(±π/4) rotations, equal to CCZ
/// up to a global phase.
fn expand_ccz(a: usize, b: usize, c: usize) -> Vec<Instruction> {
    vec![
        Instruction::gate(Kind::Cx, vec![b, c]),
        Instruction::rz(c, -FRAC_PI_4),
        Instruction::gate(Kind::Cx, vec![a, c]),
        Instruction::rz(c, FRAC_PI_4),
        Instruction::gate(Kind::Cx, vec![b, c]),
        Instruction::rz(c, -FRAC_PI_4),
        Instruction::gate(Kind::Cx, vec![a, c]),
        Instruction::rz(b, FRAC_PI_4),
        Instruction::rz(c, FRAC_PI_4),
        Instruction::gate(Kind::Cx, vec![a, b]),
        Instruction::rz(a, FRAC_PI_4),
        Instruction::rz(b, -FRAC_PI_4),
        Instruction::gate(Kind::Cx, vec![a, b]),
    ]
}
