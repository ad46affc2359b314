//! Shared helpers for integration tests: fixture backends, a seeded
//! circuit generator, and an independent density-matrix oracle used to
//! cross-check the statevector simulator.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::Path;

use qrbuild_core::backend::BackendModel;
use qrbuild_core::circuit::{Circuit, Instruction, Kind};
use qrbuild_core::sim::Distribution;

pub fn fixture_backend(name: &str) -> BackendModel {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures/backends")
        .join(name);
    let text = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("cannot read {}: {e}", path.display()));
    BackendModel::from_text(&text).expect("fixture backend parses")
}

pub fn demo12() -> BackendModel {
    fixture_backend("demo12.backend")
}

pub fn heavyhex27() -> BackendModel {
    fixture_backend("heavyhex27.backend")
}

/// Small deterministic PRNG (xorshift*) so tests do not depend on rand's
/// stream stability.
pub struct TestRng(u64);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        TestRng(seed.max(1))
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x.wrapping_mul(0x2545f4914f6cdd1d)
    }

    pub fn below(&mut self, bound: usize) -> usize {
        (self.next_u64() % bound as u64) as usize
    }

    pub fn f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn bytes(&mut self, len: usize) -> Vec<u8> {
        (0..len).map(|_| self.next_u64() as u8).collect()
    }
}

pub struct GeneratorOptions {
    pub num_qubits: usize,
    pub gates: usize,
    pub allow_reset: bool,
    pub allow_three_qubit: bool,
    pub measure_all: bool,
}

/// Seeded random virtual circuit over the source-language gate set.
pub fn random_circuit(rng: &mut TestRng, options: &GeneratorOptions) -> Circuit {
    let n = options.num_qubits;
    let mut c = Circuit::new(
        "generated",
        n,
        if options.measure_all { n } else { 0 },
    );
    fn distinct(rng: &mut TestRng, n: usize, taken: &[usize]) -> usize {
        let mut p = rng.below(n);
        while taken.contains(&p) {
            p = rng.below(n);
        }
        p
    }
    for _ in 0..options.gates {
        let q = rng.below(n);
        let choice = rng.below(if options.allow_reset { 8 } else { 7 });
        match choice {
            0 => c.push(Instruction::gate(Kind::H, vec![q])),
            1 => c.push(Instruction::gate(Kind::X, vec![q])),
            2 => c.push(Instruction::gate(Kind::Sx, vec![q])),
            3 => {
                let angle = (rng.f64() - 0.5) * 2.0 * std::f64::consts::PI;
                c.push(Instruction::rz(q, angle));
            }
            4 | 5 if n >= 2 => {
                let kind = if choice == 4 { Kind::Cx } else { Kind::Cz };
                let p = distinct(rng, n, &[q]);
                c.push(Instruction::gate(kind, vec![q, p]));
            }
            6 if n >= 3 && options.allow_three_qubit => {
                let second = distinct(rng, n, &[q]);
                let third = distinct(rng, n, &[q, second]);
                let kind = if rng.below(2) == 0 { Kind::Ccx } else { Kind::Ccz };
                c.push(Instruction::gate(kind, vec![q, second, third]));
            }
            6 => c.push(Instruction::gate(Kind::Sx, vec![q])),
            7 => c.push(Instruction::reset(q)),
            _ => c.push(Instruction::gate(Kind::H, vec![q])),
        }
    }
    if options.measure_all {
        for q in 0..n {
            c.push(Instruction::measure(q, q));
        }
    }
    c
}

// ---------------------------------------------------------------------
// Density-matrix oracle
//
// Independent reference for circuits with RESET and MEASURE: evolves the
// full 2^n x 2^n density matrix, treating RESET as the channel
// rho -> sum_b |0><b| rho |b><0| and MEASURE as classical branching on
// projectors. No amplitude-branch bookkeeping is shared with the
// statevector simulator.
// ---------------------------------------------------------------------

type C64 = (f64, f64);

fn c_add(a: C64, b: C64) -> C64 {
    (a.0 + b.0, a.1 + b.1)
}

fn c_mul(a: C64, b: C64) -> C64 {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

fn c_conj(a: C64) -> C64 {
    (a.0, -a.1)
}

struct DensityMatrix {
    n: usize,
    data: Vec<C64>, // row-major 2^n x 2^n
}

impl DensityMatrix {
    fn new(n: usize) -> Self {
        let dim = 1 << n;
        let mut data = vec![(0.0, 0.0); dim * dim];
        data[0] = (1.0, 0.0);
        DensityMatrix { n, data }
    }

    fn dim(&self) -> usize {
        1 << self.n
    }

    /// rho -> U rho U^dagger for a full-dimension unitary.
    fn conjugate(&mut self, unitary: &[Vec<C64>]) {
        let dim = self.dim();
        let mut tmp = vec![(0.0, 0.0); dim * dim];
        // tmp = U rho
        for r in 0..dim {
            for c in 0..dim {
                let mut acc = (0.0, 0.0);
                for k in 0..dim {
                    acc = c_add(acc, c_mul(unitary[r][k], self.data[k * dim + c]));
                }
                tmp[r * dim + c] = acc;
            }
        }
        // rho = tmp U^dagger
        for r in 0..dim {
            for c in 0..dim {
                let mut acc = (0.0, 0.0);
                for k in 0..dim {
                    acc = c_add(acc, c_mul(tmp[r * dim + k], c_conj(unitary[c][k])));
                }
                self.data[r * dim + c] = acc;
            }
        }
    }

    fn trace(&self) -> f64 {
        let dim = self.dim();
        (0..dim).map(|i| self.data[i * dim + i].0).sum()
    }
}

/// Full-dimension unitary for one gate, built by explicit matrix
/// embedding (a different construction than the simulator's in-place bit
/// updates).
fn full_unitary(n: usize, instr: &Instruction) -> Vec<Vec<C64>> {
    let dim = 1usize << n;
    let qs = &instr.qubits;
    let small: Vec<Vec<C64>> = match instr.kind {
        Kind::H => {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            vec![vec![(s, 0.0), (s, 0.0)], vec![(s, 0.0), (-s, 0.0)]]
        }
        Kind::X => vec![vec![(0.0, 0.0), (1.0, 0.0)], vec![(1.0, 0.0), (0.0, 0.0)]],
        Kind::Sx => vec![
            vec![(0.5, 0.5), (0.5, -0.5)],
            vec![(0.5, -0.5), (0.5, 0.5)],
        ],
        Kind::Rz => {
            let half = instr.params[0] / 2.0;
            vec![
                vec![(half.cos(), -half.sin()), (0.0, 0.0)],
                vec![(0.0, 0.0), (half.cos(), half.sin())],
            ]
        }
        Kind::Cx => {
            // control = sub-bit 0, target = sub-bit 1
            let mut m = vec![vec![(0.0, 0.0); 4]; 4];
            m[0][0] = (1.0, 0.0);
            m[2][2] = (1.0, 0.0);
            m[3][1] = (1.0, 0.0);
            m[1][3] = (1.0, 0.0);
            m
        }
        Kind::Cz => {
            let mut m = vec![vec![(0.0, 0.0); 4]; 4];
            for i in 0..4 {
                m[i][i] = if i == 3 { (-1.0, 0.0) } else { (1.0, 0.0) };
            }
            m
        }
        Kind::Swap => {
            let mut m = vec![vec![(0.0, 0.0); 4]; 4];
            m[0][0] = (1.0, 0.0);
            m[1][2] = (1.0, 0.0);
            m[2][1] = (1.0, 0.0);
            m[3][3] = (1.0, 0.0);
            m
        }
        Kind::Ccx => {
            let mut m = vec![vec![(0.0, 0.0); 8]; 8];
            for i in 0..8 {
                let j = if i == 3 {
                    7
                } else if i == 7 {
                    3
                } else {
                    i
                };
                m[j][i] = (1.0, 0.0);
            }
            m
        }
        Kind::Ccz => {
            let mut m = vec![vec![(0.0, 0.0); 8]; 8];
            for i in 0..8 {
                m[i][i] = if i == 7 { (-1.0, 0.0) } else { (1.0, 0.0) };
            }
            m
        }
        Kind::Barrier | Kind::Delay => {
            return (0..dim)
                .map(|r| {
                    (0..dim)
                        .map(|c| if r == c { (1.0, 0.0) } else { (0.0, 0.0) })
                        .collect()
                })
                .collect();
        }
        Kind::Measure | Kind::Reset => unreachable!("channels handled separately"),
    };

    let sub_dim = small.len();
    let mut full = vec![vec![(0.0, 0.0); dim]; dim];
    for col in 0..dim {
        let mut sub_col = 0usize;
        for (k, &q) in qs.iter().enumerate() {
            if (col >> q) & 1 == 1 {
                sub_col |= 1 << k;
            }
        }
        for sub_row in 0..sub_dim {
            let amp = small[sub_row][sub_col];
            if amp == (0.0, 0.0) {
                continue;
            }
            let mut row = col;
            for (k, &q) in qs.iter().enumerate() {
                if (sub_row >> k) & 1 == 1 {
                    row |= 1 << q;
                } else {
                    row &= !(1 << q);
                }
            }
            full[row][col] = c_add(full[row][col], amp);
        }
    }
    full
}

/// Projects rho onto qubit `q` being `value`, without renormalizing.
fn project(rho: &DensityMatrix, q: usize, value: usize) -> DensityMatrix {
    let dim = rho.dim();
    let mut out = DensityMatrix {
        n: rho.n,
        data: vec![(0.0, 0.0); dim * dim],
    };
    for r in 0..dim {
        for c in 0..dim {
            if (r >> q) & 1 == value && (c >> q) & 1 == value {
                out.data[r * dim + c] = rho.data[r * dim + c];
            }
        }
    }
    out
}

/// rho -> |0><0|_q (x) tr_q rho.
fn reset_channel(rho: &DensityMatrix, q: usize) -> DensityMatrix {
    let dim = rho.dim();
    let mut out = DensityMatrix {
        n: rho.n,
        data: vec![(0.0, 0.0); dim * dim],
    };
    let mask = 1usize << q;
    for b in [0usize, 1] {
        for r in 0..dim {
            if (r >> q) & 1 != b {
                continue;
            }
            for c in 0..dim {
                if (c >> q) & 1 != b {
                    continue;
                }
                out.data[(r & !mask) * dim + (c & !mask)] =
                    c_add(out.data[(r & !mask) * dim + (c & !mask)], rho.data[r * dim + c]);
            }
        }
    }
    out
}

/// Exact outcome distribution via density-matrix evolution.
pub fn density_matrix_distribution(circuit: &Circuit) -> Distribution {
    assert!(circuit.num_qubits <= 6, "oracle is O(4^n)");
    let mut branches: BTreeMap<Vec<u8>, DensityMatrix> = BTreeMap::new();
    branches.insert(vec![0; circuit.num_clbits], DensityMatrix::new(circuit.num_qubits));

    for instr in &circuit.instructions {
        match instr.kind {
            Kind::Measure => {
                let q = instr.qubits[0];
                let clbit = instr.clbits[0];
                let mut next: BTreeMap<Vec<u8>, DensityMatrix> = BTreeMap::new();
                for (record, rho) in branches {
                    for value in [0usize, 1] {
                        let projected = project(&rho, q, value);
                        if projected.trace() <= 0.0 {
                            continue;
                        }
                        let mut new_record = record.clone();
                        new_record[clbit] = value as u8;
                        match next.remove(&new_record) {
                            Some(mut existing) => {
                                for (slot, add) in
                                    existing.data.iter_mut().zip(projected.data)
                                {
                                    *slot = c_add(*slot, add);
                                }
                                next.insert(new_record, existing);
                            }
                            None => {
                                next.insert(new_record, projected);
                            }
                        }
                    }
                }
                branches = next;
            }
            Kind::Reset => {
                let q = instr.qubits[0];
                for rho in branches.values_mut() {
                    *rho = reset_channel(rho, q);
                }
            }
            _ => {
                let unitary = full_unitary(circuit.num_qubits, instr);
                for rho in branches.values_mut() {
                    rho.conjugate(&unitary);
                }
            }
        }
    }

    let mut outcomes = BTreeMap::new();
    for (record, rho) in branches {
        let key: String = record.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect();
        let weight = rho.trace();
        if weight != 0.0 {
            *outcomes.entry(key).or_insert(0.0) += weight;
        }
    }
    Distribution::from_outcomes(outcomes)
}
