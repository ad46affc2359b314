//! Routing stage: inserts SWAP gates so every two-qubit gate acts on a
//! coupled pair.
//!
//! Deterministic BFS-path insertion: for a gate on non-adjacent qubits the
//! first operand walks the BFS shortest path (ascending neighbor order,
//! so ties resolve to the lower-indexed neighbor) until adjacent to the
//! second. The returned layout is the input layout composed with every
//! SWAP-induced transposition.

use std::collections::VecDeque;

use super::TranspileError;
use crate::backend::BackendModel;
use crate::circuit::{Circuit, Instruction, Kind};
use crate::layout::{compose_layout, Layout};

/// BFS shortest path from `from` to `to`, exploring neighbors in ascending
/// order.
fn bfs_path(backend: &BackendModel, from: usize, to: usize) -> Option<Vec<usize>> {
    let n = backend.num_qubits;
    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([from]);
    seen[from] = true;
    while let Some(q) = queue.pop_front() {
        if q == to {
            let mut path = vec![to];
            let mut here = to;
            while let Some(p) = parent[here] {
                path.push(p);
                here = p;
            }
            path.reverse();
            return Some(path);
        }
        for next in backend.neighbors(q) {
            if !seen[next] {
                seen[next] = true;
                parent[next] = Some(q);
                queue.push_back(next);
            }
        }
    }
    None
}

pub fn stage_routing(
    circuit: &Circuit,
    layout: &Layout,
    backend: &BackendModel,
    _seed: u64,
) -> Result<(Circuit, Layout), TranspileError> {
    let n = backend.num_qubits;
    // position[w]: where the state initially placed on physical qubit w
    // currently lives.
    let mut position: Vec<usize> = (0..n).collect();
    // occupant[p]: which initial line is currently at physical qubit p.
    let mut occupant: Vec<usize> = (0..n).collect();

    let mut out = Circuit::new(&circuit.name, n, circuit.num_clbits);
    out.is_physical = true;

    for instr in &circuit.instructions {
        let needs_coupling =
            matches!(instr.kind, Kind::Cx | Kind::Cz | Kind::Swap) && instr.qubits.len() == 2;
        if needs_coupling {
            let mut a = position[instr.qubits[0]];
            let b = position[instr.qubits[1]];
            if !backend.is_coupled(a, b) {
                let path =
                    bfs_path(backend, a, b).ok_or(TranspileError::DisconnectedBackend)?;
                // Move the first operand along the path until adjacent.
                for step in 0..path.len().saturating_sub(2) {
                    let (here, next) = (path[step], path[step + 1]);
                    out.push(Instruction::gate(Kind::Swap, vec![here, next]));
                    let (la, lb) = (occupant[here], occupant[next]);
                    position[la] = next;
                    position[lb] = here;
                    occupant[here] = lb;
                    occupant[next] = la;
                }
                a = position[instr.qubits[0]];
            }
            let mut routed = instr.clone();
            routed.qubits = vec![a, position[instr.qubits[1]]];
            out.push(routed);
        } else {
            let mut moved = instr.clone();
            moved.qubits = instr.qubits.iter().map(|&q| position[q]).collect();
            out.push(moved);
        }
    }

    let swaps = Layout::new(position).expect("position tracking stays a permutation");
    let final_layout = compose_layout(layout, &swaps).expect("layouts share the device size");
    Ok((out, final_layout))
}
