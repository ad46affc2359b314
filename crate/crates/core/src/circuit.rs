//! Circuit intermediate representation shared by every pipeline stage.
//!
//! A [`Circuit`] is an ordered list of [`Instruction`]s over virtual or
//! physical qubit indices plus classical bits. Instances are treated as
//! immutable values once built; stages consume one circuit and produce a
//! new one.

use thiserror::Error;

/// Instruction kinds supported by the IR.
///
/// `Ccx`/`Ccz` are only legal before the init stage; every later stage
/// rejects instructions of arity three or more (barriers excepted).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    H,
    X,
    Sx,
    Rz,
    Cx,
    Cz,
    Swap,
    Ccx,
    Ccz,
    Measure,
    Reset,
    Barrier,
    Delay,
}

impl Kind {
    /// Required qubit count, or `None` for BARRIER (any arity >= 1).
    pub fn arity(self) -> Option<usize> {
        match self {
            Kind::H | Kind::X | Kind::Sx | Kind::Rz | Kind::Measure | Kind::Reset | Kind::Delay => {
                Some(1)
            }
            Kind::Cx | Kind::Cz | Kind::Swap => Some(2),
            Kind::Ccx | Kind::Ccz => Some(3),
            Kind::Barrier => None,
        }
    }

    /// Lowercase mnemonic used in source programs and artifacts.
    pub fn mnemonic(self) -> &'static str {
        match self {
            Kind::H => "h",
            Kind::X => "x",
            Kind::Sx => "sx",
            Kind::Rz => "rz",
            Kind::Cx => "cx",
            Kind::Cz => "cz",
            Kind::Swap => "swap",
            Kind::Ccx => "ccx",
            Kind::Ccz => "ccz",
            Kind::Measure => "measure",
            Kind::Reset => "reset",
            Kind::Barrier => "barrier",
            Kind::Delay => "delay",
        }
    }

    pub fn from_mnemonic(s: &str) -> Option<Kind> {
        Some(match s {
            "h" => Kind::H,
            "x" => Kind::X,
            "sx" => Kind::Sx,
            "rz" => Kind::Rz,
            "cx" => Kind::Cx,
            "cz" => Kind::Cz,
            "swap" => Kind::Swap,
            "ccx" => Kind::Ccx,
            "ccz" => Kind::Ccz,
            "measure" => Kind::Measure,
            "reset" => Kind::Reset,
            "barrier" => Kind::Barrier,
            "delay" => Kind::Delay,
            _ => return None,
        })
    }
}

/// One gate, measurement, reset, barrier or delay.
///
/// Angles are raw binary64 values and are never re-normalized; artifact
/// stability depends on the stored bit pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct Instruction {
    pub kind: Kind,
    pub qubits: Vec<usize>,
    /// Rotation angle in radians; exactly one entry for RZ, empty otherwise.
    pub params: Vec<f64>,
    /// Classical bit targets; exactly one entry for MEASURE, empty otherwise.
    pub clbits: Vec<usize>,
    /// Device time units; always present for DELAY, assigned to every
    /// instruction by the scheduling stage.
    pub duration_dt: Option<u64>,
    /// Start time assigned by the scheduling stage.
    pub start_dt: Option<u64>,
}

impl Instruction {
    pub fn gate(kind: Kind, qubits: Vec<usize>) -> Self {
        Instruction {
            kind,
            qubits,
            params: Vec::new(),
            clbits: Vec::new(),
            duration_dt: None,
            start_dt: None,
        }
    }

    pub fn rz(qubit: usize, angle: f64) -> Self {
        Instruction {
            kind: Kind::Rz,
            qubits: vec![qubit],
            params: vec![angle],
            clbits: Vec::new(),
            duration_dt: None,
            start_dt: None,
        }
    }

    pub fn measure(qubit: usize, clbit: usize) -> Self {
        Instruction {
            kind: Kind::Measure,
            qubits: vec![qubit],
            params: Vec::new(),
            clbits: vec![clbit],
            duration_dt: None,
            start_dt: None,
        }
    }

    pub fn reset(qubit: usize) -> Self {
        Instruction::gate(Kind::Reset, vec![qubit])
    }

    pub fn barrier(qubits: Vec<usize>) -> Self {
        Instruction::gate(Kind::Barrier, qubits)
    }

    pub fn delay(qubit: usize, duration_dt: u64) -> Self {
        Instruction {
            kind: Kind::Delay,
            qubits: vec![qubit],
            params: Vec::new(),
            clbits: Vec::new(),
            duration_dt: Some(duration_dt),
            start_dt: None,
        }
    }

    /// Rotation angle of an RZ instruction.
    pub fn angle(&self) -> f64 {
        self.params[0]
    }
}

/// Ordered instruction list over `num_qubits` qubits and `num_clbits`
/// classical bits.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub num_qubits: usize,
    pub num_clbits: usize,
    pub instructions: Vec<Instruction>,
    pub name: String,
    /// False while qubit indices are virtual; true once the layout stage
    /// has re-indexed the circuit onto physical qubits.
    pub is_physical: bool,
}

impl Circuit {
    pub fn new(name: &str, num_qubits: usize, num_clbits: usize) -> Self {
        Circuit {
            num_qubits,
            num_clbits,
            instructions: Vec::new(),
            name: name.to_string(),
            is_physical: false,
        }
    }

    pub fn push(&mut self, instruction: Instruction) {
        self.instructions.push(instruction);
    }

    /// Structural equality ignoring the circuit name.
    pub fn same_structure(&self, other: &Circuit) -> bool {
        self.num_qubits == other.num_qubits
            && self.num_clbits == other.num_clbits
            && self.is_physical == other.is_physical
            && self.instructions == other.instructions
    }

    /// Qubit indices that appear in at least one instruction, in order of
    /// first use.
    pub fn active_qubits(&self) -> Vec<usize> {
        let mut seen = vec![false; self.num_qubits];
        let mut order = Vec::new();
        for instr in &self.instructions {
            for &q in &instr.qubits {
                if q < seen.len() && !seen[q] {
                    seen[q] = true;
                    order.push(q);
                }
            }
        }
        order
    }

    /// True when every instruction carries both a start time and a duration.
    pub fn is_scheduled(&self) -> bool {
        self.instructions
            .iter()
            .all(|i| i.start_dt.is_some() && i.duration_dt.is_some())
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum CircuitError {
    #[error("instruction {position}: qubit index {index} out of range (num_qubits = {limit})")]
    QubitOutOfRange {
        position: usize,
        index: usize,
        limit: usize,
    },
    #[error("instruction {position}: clbit index {index} out of range (num_clbits = {limit})")]
    ClbitOutOfRange {
        position: usize,
        index: usize,
        limit: usize,
    },
    #[error("instruction {position}: {kind} takes {expected} qubit(s), got {actual}")]
    ArityMismatch {
        position: usize,
        kind: &'static str,
        expected: usize,
        actual: usize,
    },
    #[error("instruction {position}: {kind} takes {expected} parameter(s), got {actual}")]
    ParamMismatch {
        position: usize,
        kind: &'static str,
        expected: usize,
        actual: usize,
    },
    #[error("instruction {position}: duplicate qubit {index}")]
    DuplicateQubit { position: usize, index: usize },
    #[error("instruction {position}: {kind} takes {expected} clbit(s), got {actual}")]
    ClbitMismatch {
        position: usize,
        kind: &'static str,
        expected: usize,
        actual: usize,
    },
    #[error("instruction {position}: delay requires a duration")]
    MissingDelayDuration { position: usize },
    #[error("circuit must have at least one qubit")]
    NoQubits,
}

/// Checks every `Circuit` and `Instruction` invariant.
pub fn validate_circuit(circuit: &Circuit) -> Result<(), CircuitError> {
    if circuit.num_qubits == 0 {
        return Err(CircuitError::NoQubits);
    }
    for (position, instr) in circuit.instructions.iter().enumerate() {
        let kind = instr.kind.mnemonic();
        match instr.kind.arity() {
            Some(expected) if instr.qubits.len() != expected => {
                return Err(CircuitError::ArityMismatch {
                    position,
                    kind,
                    expected,
                    actual: instr.qubits.len(),
                });
            }
            None if instr.qubits.is_empty() => {
                return Err(CircuitError::ArityMismatch {
                    position,
                    kind,
                    expected: 1,
                    actual: 0,
                });
            }
            _ => {}
        }
        for (i, &q) in instr.qubits.iter().enumerate() {
            if q >= circuit.num_qubits {
                return Err(CircuitError::QubitOutOfRange {
                    position,
                    index: q,
                    limit: circuit.num_qubits,
                });
            }
            if instr.qubits[..i].contains(&q) {
                return Err(CircuitError::DuplicateQubit { position, index: q });
            }
        }
        let expected_params = if instr.kind == Kind::Rz { 1 } else { 0 };
        if instr.params.len() != expected_params {
            return Err(CircuitError::ParamMismatch {
                position,
                kind,
                expected: expected_params,
                actual: instr.params.len(),
            });
        }
        let expected_clbits = if instr.kind == Kind::Measure { 1 } else { 0 };
        if instr.clbits.len() != expected_clbits {
            return Err(CircuitError::ClbitMismatch {
                position,
                kind,
                expected: expected_clbits,
                actual: instr.clbits.len(),
            });
        }
        for &c in &instr.clbits {
            if c >= circuit.num_clbits {
                return Err(CircuitError::ClbitOutOfRange {
                    position,
                    index: c,
                    limit: circuit.num_clbits,
                });
            }
        }
        if instr.kind == Kind::Delay && instr.duration_dt.is_none() {
            return Err(CircuitError::MissingDelayDuration { position });
        }
    }
    Ok(())
}

/// Longest chain of instructions sharing qubits.
///
/// BARRIER synchronizes its qubits without contributing depth; DELAY and
/// every other instruction contribute one level.
pub fn circuit_depth(circuit: &Circuit) -> usize {
    let mut level = vec![0usize; circuit.num_qubits];
    for instr in &circuit.instructions {
        let here = instr.qubits.iter().map(|&q| level[q]).max().unwrap_or(0);
        let next = if instr.kind == Kind::Barrier { here } else { here + 1 };
        for &q in &instr.qubits {
            level[q] = next;
        }
    }
    level.into_iter().max().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_circuit_is_valid() {
        let c = Circuit::new("empty", 1, 0);
        assert_eq!(validate_circuit(&c), Ok(()));
        assert_eq!(circuit_depth(&c), 0);
    }

    #[test]
    fn duplicate_qubit_rejected() {
        let mut c = Circuit::new("dup", 2, 0);
        c.push(Instruction::gate(Kind::Cx, vec![0, 0]));
        assert_eq!(
            validate_circuit(&c),
            Err(CircuitError::DuplicateQubit { position: 0, index: 0 })
        );
    }

    #[test]
    fn rz_param_count_enforced() {
        let mut c = Circuit::new("rz", 1, 0);
        c.push(Instruction::gate(Kind::Rz, vec![0]));
        assert!(matches!(
            validate_circuit(&c),
            Err(CircuitError::ParamMismatch { position: 0, .. })
        ));
        let mut c = Circuit::new("h", 1, 0);
        let mut bad = Instruction::gate(Kind::H, vec![0]);
        bad.params.push(0.5);
        c.push(bad);
        assert!(matches!(
            validate_circuit(&c),
            Err(CircuitError::ParamMismatch { position: 0, .. })
        ));
    }

    #[test]
    fn out_of_range_indices_rejected() {
        let mut c = Circuit::new("oor", 2, 1);
        c.push(Instruction::gate(Kind::H, vec![2]));
        assert!(matches!(
            validate_circuit(&c),
            Err(CircuitError::QubitOutOfRange { index: 2, .. })
        ));
        let mut c = Circuit::new("oor", 2, 1);
        c.push(Instruction::measure(0, 1));
        assert!(matches!(
            validate_circuit(&c),
            Err(CircuitError::ClbitOutOfRange { index: 1, .. })
        ));
    }

    #[test]
    fn depth_single_chain() {
        let mut c = Circuit::new("chain", 2, 1);
        c.push(Instruction::gate(Kind::H, vec![0]));
        c.push(Instruction::gate(Kind::Cx, vec![0, 1]));
        c.push(Instruction::measure(1, 0));
        assert_eq!(circuit_depth(&c), 3);
    }

    #[test]
    fn barrier_synchronizes_without_depth() {
        let mut c = Circuit::new("bar", 2, 0);
        c.push(Instruction::gate(Kind::H, vec![0]));
        c.push(Instruction::barrier(vec![0, 1]));
        c.push(Instruction::gate(Kind::X, vec![1]));
        // X(1) must wait for the barrier, which waits for H(0).
        assert_eq!(circuit_depth(&c), 2);
    }

    #[test]
    fn depth_monotone_under_append() {
        let mut c = Circuit::new("mono", 3, 0);
        let kinds = [Kind::H, Kind::Cx, Kind::X, Kind::Cz, Kind::Barrier, Kind::Sx];
        let mut prev = 0;
        for (i, &k) in kinds.iter().cycle().take(40).enumerate() {
            let qubits = match k.arity() {
                Some(1) => vec![i % 3],
                Some(2) => vec![i % 3, (i + 1) % 3],
                _ => vec![0, 1, 2],
            };
            c.push(Instruction::gate(k, qubits));
            let d = circuit_depth(&c);
            assert!(d >= prev, "depth decreased after append");
            prev = d;
        }
    }
}
