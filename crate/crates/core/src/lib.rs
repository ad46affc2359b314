//! Reproducible quantum build toolchain.
//!
//! A deterministic six-stage transpiler (init, layout, routing,
//! translation, optimization, scheduling) that turns circuit source
//! programs into bit-exact canonical artifacts plus a buildinfo file
//! pinning seeds, plugin identities and input hashes. Rebuilding from the
//! buildinfo and byte-comparing catches any covert modification of the
//! toolchain.
//!
//! The crate also ships the attacks that motivate verification: three
//! steganographic stage plugins that exfiltrate data through the layout
//! permutation, reset-guarded ancilla rotations or rotation-angle
//! mantissas ([`stego`]), and minimal integrity tampers against GHZ and
//! Grover benchmark circuits ([`tamper`]). An exact statevector simulator
//! ([`sim`]) quantifies what each attack does to the computation.

pub mod backend;
pub mod circuit;
pub mod hash;
pub mod layout;
pub mod qasm;
pub mod sim;
pub mod stego;
pub mod tamper;
pub mod transpile;
pub mod verify;

pub use backend::{BackendModel, QubitPattern};
pub use circuit::{circuit_depth, validate_circuit, Circuit, Instruction, Kind};
pub use hash::sha256_hex;
pub use layout::{compose_layout, Layout};
pub use qasm::{parse_artifact, parse_source, serialize_artifact, Artifact, BuildInfo};
pub use sim::{
    equivalent_up_to_global_phase, hellinger_fidelity, sample, simulate,
    total_variation_distance, Distribution,
};
pub use transpile::{derive_stage_seed, run_pipeline, PipelineConfig};
pub use verify::{verify_build, Verdict, VerdictStatus};
