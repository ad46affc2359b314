//! Backend models: qubit count, coupling map, basis gates, gate durations
//! and error rates.
//!
//! Models are loaded from `key = value` text files. The canonical form has
//! keys sorted, coupling pairs written low-high and sorted, and LF line
//! endings, so a canonically written model file hashes identically on any
//! platform.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::circuit::Kind;
use crate::hash::sha256_hex;

/// Gate kinds a backend may declare as native.
pub const ALLOWED_BASIS: [Kind; 7] = [
    Kind::X,
    Kind::Sx,
    Kind::Rz,
    Kind::Cz,
    Kind::Measure,
    Kind::Reset,
    Kind::Delay,
];

/// Qubit operands a duration or error entry applies to.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum QubitPattern {
    Wildcard,
    Exact(Vec<usize>),
}

impl QubitPattern {
    fn render(&self) -> String {
        match self {
            QubitPattern::Wildcard => "*".to_string(),
            QubitPattern::Exact(qs) => qs
                .iter()
                .map(|q| q.to_string())
                .collect::<Vec<_>>()
                .join("-"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BackendModel {
    pub name: String,
    pub num_qubits: usize,
    /// Undirected coupled pairs, stored low-high.
    pub coupling: BTreeSet<(usize, usize)>,
    pub basis_gates: BTreeSet<Kind>,
    pub durations_dt: BTreeMap<(Kind, QubitPattern), u64>,
    pub error_rates: BTreeMap<(Kind, QubitPattern), f64>,
    /// SHA-256 of the model file bytes this value was loaded from (or of
    /// the canonical text for models built in memory).
    pub sha256: String,
}

#[derive(Debug, Error, PartialEq)]
pub enum BackendError {
    #[error("line {line}: expected `key = value`")]
    Malformed { line: usize },
    #[error("line {line}: {message}")]
    Invalid { line: usize, message: String },
    #[error("missing required key `{0}`")]
    MissingKey(&'static str),
    #[error("coupling references qubit {0} outside device")]
    CouplingOutOfRange(usize),
    #[error("coupling graph is not connected")]
    Disconnected,
    #[error("basis gate `{0}` has no duration entry")]
    MissingDuration(&'static str),
    #[error("gate `{0}` is not allowed as a basis gate")]
    ForbiddenBasisGate(String),
    #[error("duration must be a positive integer")]
    NonPositiveDuration,
}

impl BackendModel {
    /// Builds a model from parts and stamps it with the hash of its
    /// canonical text.
    pub fn assemble(
        name: &str,
        num_qubits: usize,
        coupling: impl IntoIterator<Item = (usize, usize)>,
        basis_gates: impl IntoIterator<Item = Kind>,
        durations_dt: BTreeMap<(Kind, QubitPattern), u64>,
        error_rates: BTreeMap<(Kind, QubitPattern), f64>,
    ) -> Result<Self, BackendError> {
        let coupling = coupling
            .into_iter()
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        let mut model = BackendModel {
            name: name.to_string(),
            num_qubits,
            coupling,
            basis_gates: basis_gates.into_iter().collect(),
            durations_dt,
            error_rates,
            sha256: String::new(),
        };
        model.validate()?;
        model.sha256 = sha256_hex(model.canonical_text().as_bytes());
        Ok(model)
    }

    fn validate(&self) -> Result<(), BackendError> {
        for &(a, b) in &self.coupling {
            let worst = a.max(b);
            if worst >= self.num_qubits {
                return Err(BackendError::CouplingOutOfRange(worst));
            }
        }
        for kind in &self.basis_gates {
            if !ALLOWED_BASIS.contains(kind) {
                return Err(BackendError::ForbiddenBasisGate(kind.mnemonic().to_string()));
            }
        }
        if !self.is_connected() {
            return Err(BackendError::Disconnected);
        }
        for value in self.durations_dt.values() {
            if *value == 0 {
                return Err(BackendError::NonPositiveDuration);
            }
        }
        for kind in &self.basis_gates {
            let covered = self
                .durations_dt
                .keys()
                .any(|(k, _)| k == kind);
            if !covered {
                return Err(BackendError::MissingDuration(kind.mnemonic()));
            }
        }
        Ok(())
    }

    fn is_connected(&self) -> bool {
        if self.num_qubits <= 1 {
            return true;
        }
        let mut seen = vec![false; self.num_qubits];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(q) = queue.pop_front() {
            for n in self.neighbors(q) {
                if !seen[n] {
                    seen[n] = true;
                    count += 1;
                    queue.push_back(n);
                }
            }
        }
        count == self.num_qubits
    }

    pub fn is_coupled(&self, a: usize, b: usize) -> bool {
        self.coupling.contains(&(a.min(b), a.max(b)))
    }

    /// Coupled neighbors of `q` in ascending order.
    pub fn neighbors(&self, q: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .coupling
            .iter()
            .filter_map(|&(a, b)| {
                if a == q {
                    Some(b)
                } else if b == q {
                    Some(a)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// Duration lookup: exact operand tuple first, wildcard second.
    /// Symmetric two-qubit kinds are looked up with the pair sorted.
    pub fn duration(&self, kind: Kind, qubits: &[usize]) -> Option<u64> {
        let tuple = canonical_tuple(kind, qubits);
        self.durations_dt
            .get(&(kind, QubitPattern::Exact(tuple)))
            .or_else(|| self.durations_dt.get(&(kind, QubitPattern::Wildcard)))
            .copied()
    }

    /// Error-rate lookup with the same precedence as [`Self::duration`].
    /// Missing entries read as a rate of zero.
    pub fn error_rate(&self, kind: Kind, qubits: &[usize]) -> f64 {
        let tuple = canonical_tuple(kind, qubits);
        self.error_rates
            .get(&(kind, QubitPattern::Exact(tuple)))
            .or_else(|| self.error_rates.get(&(kind, QubitPattern::Wildcard)))
            .copied()
            .unwrap_or(0.0)
    }

    /// Canonical `key = value` text: keys sorted, coupling pairs low-high
    /// and sorted, LF endings.
    pub fn canonical_text(&self) -> String {
        let mut lines = Vec::new();
        let basis: Vec<&str> = self.basis_gates.iter().map(|k| k.mnemonic()).collect();
        let mut basis_sorted = basis.clone();
        basis_sorted.sort_unstable();
        lines.push(format!("basis = {}", basis_sorted.join(",")));
        let coupling: Vec<String> = self
            .coupling
            .iter()
            .map(|(a, b)| format!("{a}-{b}"))
            .collect();
        lines.push(format!("coupling = {}", coupling.join(",")));
        for ((kind, pattern), value) in &self.durations_dt {
            lines.push(format!(
                "duration.{}.{} = {}",
                kind.mnemonic(),
                pattern.render(),
                value
            ));
        }
        for ((kind, pattern), value) in &self.error_rates {
            lines.push(format!(
                "error.{}.{} = {}",
                kind.mnemonic(),
                pattern.render(),
                value
            ));
        }
        lines.push(format!("name = {}", self.name));
        lines.push(format!("qubits = {}", self.num_qubits));
        lines.sort();
        let mut text = lines.join("\n");
        text.push('\n');
        text
    }

    /// Parses a model file. The stored hash is taken over the given bytes,
    /// not the canonical re-serialization, so the identity tracks the exact
    /// file content.
    pub fn from_text(text: &str) -> Result<Self, BackendError> {
        let mut name = None;
        let mut num_qubits = None;
        let mut coupling = BTreeSet::new();
        let mut basis_gates = BTreeSet::new();
        let mut durations_dt = BTreeMap::new();
        let mut error_rates = BTreeMap::new();

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (key, value) = trimmed
                .split_once(" = ")
                .ok_or(BackendError::Malformed { line })?;
            let invalid = |message: &str| BackendError::Invalid {
                line,
                message: message.to_string(),
            };
            match key {
                "name" => name = Some(value.to_string()),
                "qubits" => {
                    num_qubits = Some(
                        value
                            .parse::<usize>()
                            .map_err(|_| invalid("qubit count must be an integer"))?,
                    )
                }
                "coupling" => {
                    for pair in value.split(',') {
                        let (a, b) = pair
                            .split_once('-')
                            .ok_or_else(|| invalid("coupling pair must be `a-b`"))?;
                        let a: usize =
                            a.parse().map_err(|_| invalid("bad coupling qubit"))?;
                        let b: usize =
                            b.parse().map_err(|_| invalid("bad coupling qubit"))?;
                        if a == b {
                            return Err(invalid("self-coupling is not allowed"));
                        }
                        coupling.insert((a.min(b), a.max(b)));
                    }
                }
                "basis" => {
                    for gate in value.split(',') {
                        let kind = Kind::from_mnemonic(gate)
                            .ok_or_else(|| invalid("unknown basis gate"))?;
                        basis_gates.insert(kind);
                    }
                }
                _ if key.starts_with("duration.") || key.starts_with("error.") => {
                    let mut parts = key.splitn(3, '.');
                    let table = parts.next().unwrap();
                    let kind = parts
                        .next()
                        .and_then(Kind::from_mnemonic)
                        .ok_or_else(|| invalid("unknown gate kind"))?;
                    let pattern = match parts.next() {
                        Some("*") => QubitPattern::Wildcard,
                        Some(spec) => {
                            let mut qs = Vec::new();
                            for q in spec.split('-') {
                                qs.push(q.parse().map_err(|_| invalid("bad qubit index"))?);
                            }
                            QubitPattern::Exact(qs)
                        }
                        None => return Err(invalid("missing qubit pattern")),
                    };
                    if table == "duration" {
                        let v: u64 =
                            value.parse().map_err(|_| invalid("bad duration value"))?;
                        durations_dt.insert((kind, pattern), v);
                    } else {
                        let v: f64 = value.parse().map_err(|_| invalid("bad error rate"))?;
                        if !(0.0..=1.0).contains(&v) {
                            return Err(invalid("error rate outside [0, 1]"));
                        }
                        error_rates.insert((kind, pattern), v);
                    }
                }
                _ => return Err(invalid("unknown key")),
            }
        }

        let mut model = BackendModel {
            name: name.ok_or(BackendError::MissingKey("name"))?,
            num_qubits: num_qubits.ok_or(BackendError::MissingKey("qubits"))?,
            coupling,
            basis_gates,
            durations_dt,
            error_rates,
            sha256: String::new(),
        };
        model.validate()?;
        model.sha256 = sha256_hex(text.as_bytes());
        Ok(model)
    }
}

/// Operand tuple used for table lookups: symmetric two-qubit kinds are
/// keyed low-high so `cz q3,q1` and `cz q1,q3` share entries.
fn canonical_tuple(kind: Kind, qubits: &[usize]) -> Vec<usize> {
    let mut tuple = qubits.to_vec();
    if matches!(kind, Kind::Cz | Kind::Swap) {
        tuple.sort_unstable();
    }
    tuple
}


#[cfg(test)]
mod tests {
    use super::*;

    fn line_model(n: usize) -> BackendModel {
        let mut durations = BTreeMap::new();
        for kind in [Kind::X, Kind::Sx, Kind::Rz, Kind::Cz, Kind::Measure, Kind::Reset, Kind::Delay]
        {
            durations.insert((kind, QubitPattern::Wildcard), 4u64);
        }
        BackendModel::assemble(
            "line",
            n,
            (0..n - 1).map(|i| (i, i + 1)),
            ALLOWED_BASIS,
            durations,
            BTreeMap::new(),
        )
        .unwrap()
    }

    #[test]
    fn canonical_text_roundtrip() {
        let model = line_model(4);
        let text = model.canonical_text();
        let reparsed = BackendModel::from_text(&text).unwrap();
        assert_eq!(reparsed.coupling, model.coupling);
        assert_eq!(reparsed.sha256, model.sha256);
        // Canonical text of the reparsed model is byte-identical.
        assert_eq!(reparsed.canonical_text(), text);
    }

    #[test]
    fn disconnected_rejected() {
        let mut durations = BTreeMap::new();
        durations.insert((Kind::Rz, QubitPattern::Wildcard), 1u64);
        let result = BackendModel::assemble(
            "split",
            4,
            [(0usize, 1usize), (2, 3)],
            [Kind::Rz],
            durations,
            BTreeMap::new(),
        );
        assert_eq!(result.unwrap_err(), BackendError::Disconnected);
    }

    #[test]
    fn duration_lookup_prefers_exact() {
        let mut model = line_model(3);
        model
            .durations_dt
            .insert((Kind::Cz, QubitPattern::Exact(vec![0, 1])), 20);
        assert_eq!(model.duration(Kind::Cz, &[1, 0]), Some(20));
        assert_eq!(model.duration(Kind::Cz, &[1, 2]), Some(4));
    }

    #[test]
    fn missing_duration_for_basis_gate_rejected() {
        let result = BackendModel::assemble(
            "nodur",
            2,
            [(0usize, 1usize)],
            [Kind::Rz],
            BTreeMap::new(),
            BTreeMap::new(),
        );
        assert_eq!(result.unwrap_err(), BackendError::MissingDuration("rz"));
    }
}
