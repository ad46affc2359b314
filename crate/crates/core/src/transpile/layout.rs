//! Layout stage: assigns virtual qubits to physical qubits.
//!
//! The honest plugin grows a connected subgraph greedily from the physical
//! qubit with the lowest aggregate two-qubit error. The trivial and
//! seeded-random plugins model `map[v] = v` and Qiskit-style randomized
//! layout selection.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::TranspileError;
use crate::backend::BackendModel;
use crate::circuit::{Circuit, Kind};
use crate::layout::Layout;

fn check_preconditions(circuit: &Circuit, backend: &BackendModel) -> Result<(), TranspileError> {
    if circuit.num_qubits > backend.num_qubits {
        return Err(TranspileError::CircuitTooLarge {
            qubits: circuit.num_qubits,
            available: backend.num_qubits,
        });
    }
    for (position, instr) in circuit.instructions.iter().enumerate() {
        if instr.kind != Kind::Barrier && instr.qubits.len() > 2 {
            return Err(TranspileError::UnexpandedMultiQubit {
                position,
                arity: instr.qubits.len(),
            });
        }
    }
    Ok(())
}

/// Re-indexes a virtual circuit onto physical qubits, padding the register
/// to the device size.
pub fn apply_layout(circuit: &Circuit, layout: &Layout, backend: &BackendModel) -> Circuit {
    let mut out = Circuit::new(&circuit.name, backend.num_qubits, circuit.num_clbits);
    out.is_physical = true;
    for instr in &circuit.instructions {
        let mut mapped = instr.clone();
        mapped.qubits = instr.qubits.iter().map(|&q| layout.physical(q)).collect();
        out.push(mapped);
    }
    out
}

/// Completes a partial assignment into a full permutation: unassigned
/// virtual qubits take the remaining physical qubits in ascending order.
fn complete(assigned: Vec<Option<usize>>, n: usize) -> Layout {
    let mut taken = vec![false; n];
    for p in assigned.iter().flatten() {
        taken[*p] = true;
    }
    let mut free = (0..n).filter(|&p| !taken[p]);
    let mut map = Vec::with_capacity(n);
    for slot in assigned {
        map.push(match slot {
            Some(p) => p,
            None => free.next().expect("assignment exceeds device"),
        });
    }
    map.extend(free);
    Layout::new(map).expect("completion yields a permutation")
}

/// Sum of two-qubit error rates on edges incident to `p`.
fn aggregate_error(backend: &BackendModel, p: usize) -> f64 {
    backend
        .neighbors(p)
        .into_iter()
        .map(|q| backend.error_rate(Kind::Cz, &[p, q]))
        .sum()
}

/// Honest greedy layout.
///
/// Starting from the physical qubit with the smallest aggregate two-qubit
/// error (ties to the lowest index), a BFS over the coupling graph with
/// ascending neighbor order collects one physical qubit per active virtual
/// qubit; virtual qubits are assigned in order of first use.
pub fn stage_layout(
    circuit: &Circuit,
    backend: &BackendModel,
    _seed: u64,
) -> Result<(Circuit, Layout), TranspileError> {
    check_preconditions(circuit, backend)?;
    let n = backend.num_qubits;
    let active = circuit.active_qubits();
    let mut assigned = vec![None; circuit.num_qubits];

    if !active.is_empty() {
        let start = (0..n)
            .min_by(|&a, &b| {
                aggregate_error(backend, a)
                    .partial_cmp(&aggregate_error(backend, b))
                    .unwrap()
                    .then(a.cmp(&b))
            })
            .unwrap();
        let mut order = vec![start];
        let mut seen = vec![false; n];
        seen[start] = true;
        let mut cursor = 0;
        while order.len() < active.len() {
            if cursor >= order.len() {
                return Err(TranspileError::DisconnectedBackend);
            }
            let here = order[cursor];
            cursor += 1;
            for next in backend.neighbors(here) {
                if !seen[next] && order.len() < active.len() {
                    seen[next] = true;
                    order.push(next);
                }
            }
        }
        for (virtual_q, physical_q) in active.iter().zip(order) {
            assigned[*virtual_q] = Some(physical_q);
        }
    }

    let layout = complete(assigned, n);
    Ok((apply_layout(circuit, &layout, backend), layout))
}

/// `map[v] = v`.
pub fn trivial_layout_stage(
    circuit: &Circuit,
    backend: &BackendModel,
) -> Result<(Circuit, Layout), TranspileError> {
    check_preconditions(circuit, backend)?;
    let layout = Layout::identity(backend.num_qubits);
    Ok((apply_layout(circuit, &layout, backend), layout))
}

/// Uniform random permutation drawn from the stage seed; models the
/// fresh-seed behavior of randomized layout passes, made reproducible.
pub fn random_layout_stage(
    circuit: &Circuit,
    backend: &BackendModel,
    seed: u64,
) -> Result<(Circuit, Layout), TranspileError> {
    check_preconditions(circuit, backend)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut map: Vec<usize> = (0..backend.num_qubits).collect();
    map.shuffle(&mut rng);
    let layout = Layout::new(map).expect("shuffle yields a permutation");
    Ok((apply_layout(circuit, &layout, backend), layout))
}
