//! Translation stage: rewrites every gate into the backend basis.
//!
//! Rewrite rules, applied recursively until only basis gates remain:
//!
//! - `H  -> RZ(pi/2) SX RZ(pi/2)`
//! - `X  -> SX SX` (only when X is not native)
//! - `CX -> H(target) CZ H(target)`
//! - `SWAP -> CX CX CX`
//!
//! Each rule preserves the unitary up to global phase. BARRIER and DELAY
//! always pass through.

use std::f64::consts::FRAC_PI_2;

use super::TranspileError;
use crate::backend::BackendModel;
use crate::circuit::{Circuit, Instruction, Kind};

fn expand(
    instr: &Instruction,
    backend: &BackendModel,
    out: &mut Vec<Instruction>,
) -> Result<(), TranspileError> {
    if backend.basis_gates.contains(&instr.kind)
        || matches!(instr.kind, Kind::Barrier | Kind::Delay)
    {
        out.push(instr.clone());
        return Ok(());
    }
    match instr.kind {
        Kind::H => {
            let q = instr.qubits[0];
            expand(&Instruction::rz(q, FRAC_PI_2), backend, out)?;
            expand(&Instruction::gate(Kind::Sx, vec![q]), backend, out)?;
            expand(&Instruction::rz(q, FRAC_PI_2), backend, out)?;
        }
        Kind::X => {
            let q = instr.qubits[0];
            expand(&Instruction::gate(Kind::Sx, vec![q]), backend, out)?;
            expand(&Instruction::gate(Kind::Sx, vec![q]), backend, out)?;
        }
        Kind::Cx => {
            let (control, target) = (instr.qubits[0], instr.qubits[1]);
            expand(&Instruction::gate(Kind::H, vec![target]), backend, out)?;
            expand(
                &Instruction::gate(Kind::Cz, vec![control, target]),
                backend,
                out,
            )?;
            expand(&Instruction::gate(Kind::H, vec![target]), backend, out)?;
        }
        Kind::Swap => {
            let (a, b) = (instr.qubits[0], instr.qubits[1]);
            expand(&Instruction::gate(Kind::Cx, vec![a, b]), backend, out)?;
            expand(&Instruction::gate(Kind::Cx, vec![b, a]), backend, out)?;
            expand(&Instruction::gate(Kind::Cx, vec![a, b]), backend, out)?;
        }
        kind => return Err(TranspileError::UntranslatableGate(kind.mnemonic())),
    }
    Ok(())
}

pub fn stage_translation(
    circuit: &Circuit,
    backend: &BackendModel,
) -> Result<Circuit, TranspileError> {
    let mut out = Circuit::new(&circuit.name, circuit.num_qubits, circuit.num_clbits);
    out.is_physical = circuit.is_physical;
    for instr in &circuit.instructions {
        expand(instr, backend, &mut out.instructions)?;
    }
    Ok(out)
}
