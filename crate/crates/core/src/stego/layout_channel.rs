//! Layout covert channel: the payload chooses the qubit permutation.

use super::codec::{
    bytes_to_int, deframe, frame, int_to_frame, int_to_permutation, layout_capacity_bits,
    permutation_to_int,
};
use super::StegoError;
use crate::backend::BackendModel;
use crate::circuit::Circuit;
use crate::layout::Layout;
use crate::qasm::Artifact;
use crate::transpile::apply_layout;

/// Drop-in replacement for the layout stage that encodes the framed
/// payload as the Lehmer index of the emitted permutation.
pub fn leaky_layout_stage(
    circuit: &Circuit,
    backend: &BackendModel,
    payload: &[u8],
) -> Result<(Circuit, Layout), StegoError> {
    let n = backend.num_qubits;
    if circuit.num_qubits > n {
        return Err(StegoError::Stage(
            crate::transpile::TranspileError::CircuitTooLarge {
                qubits: circuit.num_qubits,
                available: n,
            },
        ));
    }
    let framed = frame(payload)?;
    let needed = framed.len() as u64 * 8;
    let capacity = layout_capacity_bits(n);
    if needed > capacity {
        return Err(StegoError::PayloadTooLarge { needed, capacity });
    }
    let layout = int_to_permutation(&bytes_to_int(&framed), n)?;
    Ok((apply_layout(circuit, &layout, backend), layout))
}

/// Recovers a payload from the layout line of an intercepted artifact.
pub fn decode_layout(artifact: &Artifact) -> Result<Vec<u8>, StegoError> {
    let rank = permutation_to_int(&artifact.layout);
    let framed = int_to_frame(&rank)?;
    deframe(&framed)
}
