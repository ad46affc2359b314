//! Covert exfiltration channels hidden in transpiled circuits, plus the
//! decoders an attacker would run on intercepted artifacts.
//!
//! Three channels, one per compromised stage:
//!
//! - **layout**: the payload picks the virtual-to-physical permutation via
//!   its Lehmer index; capacity `floor(log2 n!)` bits.
//! - **init**: payload bytes become integer-valued RZ angles on an
//!   appended ancilla qubit, pinned between RESET guards; unbounded
//!   capacity but needs a free qubit.
//! - **scheduling**: payload bytes replace the low mantissa bytes of
//!   existing RZ angles after scheduling; capacity 6 bytes per rotation.
//!
//! Every encoder frames the payload with a 2-byte big-endian length
//! prefix. Decoders operate on artifacts only: that is the attacker's
//! view of the build.

mod codec;
mod init_channel;
mod layout_channel;
mod scheduling_channel;

pub use codec::{
    bytes_to_int, deframe, frame, int_to_frame, int_to_permutation, layout_capacity_bits,
    layout_capacity_bytes, permutation_to_int,
};
pub use init_channel::{decode_init, leaky_init_stage};
pub use layout_channel::{decode_layout, leaky_layout_stage};
pub use scheduling_channel::{decode_scheduling, leaky_scheduling_stage};

use std::fmt;

use thiserror::Error;

use crate::backend::BackendModel;
use crate::circuit::{Circuit, Kind};
use crate::transpile::TranspileError;

/// Bytes encoded per rotation gate by the scheduling channel.
///
/// Two bytes keep every angle within the 1e-9 relative window that
/// renders as a pi multiple; six bytes is the full usable mantissa range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StealthLevel {
    Two,
    Four,
    Six,
}

impl StealthLevel {
    pub fn bytes_per_gate(self) -> usize {
        match self {
            StealthLevel::Two => 2,
            StealthLevel::Four => 4,
            StealthLevel::Six => 6,
        }
    }

    pub fn from_bytes_per_gate(bytes: usize) -> Option<Self> {
        match bytes {
            2 => Some(StealthLevel::Two),
            4 => Some(StealthLevel::Four),
            6 => Some(StealthLevel::Six),
            _ => None,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum StegoError {
    #[error("payload needs {needed} bits but the channel holds {capacity}")]
    PayloadTooLarge { needed: u64, capacity: u64 },
    #[error("integer {0} has no permutation of the requested size")]
    ValueTooLarge(String),
    #[error("no free qubit: circuit uses all {0} physical qubits")]
    NoFreeQubit(usize),
    #[error("payload needs {needed} bytes but the circuit's rotations hold {capacity}")]
    InsufficientRzGates { needed: usize, capacity: usize },
    #[error("frame error: {0}")]
    Frame(String),
    #[error("angle {0} is not a 48-bit integer")]
    NonIntegerAngle(f64),
    #[error(transparent)]
    Stage(#[from] TranspileError),
}

/// Per-channel capacity for a given backend and carrier circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityTable {
    pub layout_bits: u64,
    pub layout_bytes: u64,
    pub rz_gates: usize,
    pub scheduling_bytes: usize,
}

/// Capacities of the three channels; the circuit should be the
/// post-optimization carrier whose rotations the scheduling channel uses.
pub fn capacity_table(backend: &BackendModel, circuit: &Circuit) -> CapacityTable {
    let rz_gates = circuit
        .instructions
        .iter()
        .filter(|i| i.kind == Kind::Rz)
        .count();
    CapacityTable {
        layout_bits: layout_capacity_bits(backend.num_qubits),
        layout_bytes: layout_capacity_bytes(backend.num_qubits),
        rz_gates,
        scheduling_bytes: 6 * rz_gates,
    }
}

impl fmt::Display for CapacityTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "layout      {} bits ({} bytes)",
            self.layout_bits, self.layout_bytes
        )?;
        writeln!(f, "init        unbounded (requires one free qubit)")?;
        write!(
            f,
            "scheduling  {} bytes (6 per RZ gate, {} gates)",
            self.scheduling_bytes, self.rz_gates
        )
    }
}
