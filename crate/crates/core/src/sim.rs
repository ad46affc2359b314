//! Exact statevector simulation of desk-scale circuits.
//!
//! MEASURE and RESET are handled by branch splitting: the state forks into
//! the possible projection outcomes, each branch carrying its probability
//! weight and the classical record accumulated so far. Branches that end
//! with the same classical record merge by summing weights, which yields
//! exact outcome distributions instead of sampled ones.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use thiserror::Error;

use crate::circuit::{Circuit, Instruction, Kind};
use crate::layout::Layout;

/// Largest simulable register; 2^20 amplitudes.
pub const MAX_QUBITS: usize = 20;

/// Exact outcome probabilities keyed by classical bitstring.
///
/// Bitstrings follow the `c[0]c[1]...c[k-1]` left-to-right convention;
/// classical bits never written by a MEASURE read as 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    outcomes: BTreeMap<String, f64>,
}

impl Distribution {
    pub fn from_outcomes(outcomes: BTreeMap<String, f64>) -> Self {
        Distribution { outcomes }
    }

    pub fn probability(&self, outcome: &str) -> f64 {
        self.outcomes.get(outcome).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.outcomes.iter().map(|(k, &v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    /// Outcomes sorted by descending probability, ties by bitstring.
    pub fn ranked(&self) -> Vec<(String, f64)> {
        let mut ranked: Vec<(String, f64)> =
            self.outcomes.iter().map(|(k, &v)| (k.clone(), v)).collect();
        ranked.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
        ranked
    }

    /// The `k` most probable outcomes as a set of bitstrings.
    pub fn top_outcomes(&self, k: usize) -> Vec<String> {
        self.ranked().into_iter().take(k).map(|(s, _)| s).collect()
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("circuit has {0} qubits; the simulator supports at most {MAX_QUBITS}")]
    TooManyQubits(usize),
    #[error("equivalence check requires measurement-free circuits")]
    NotUnitary,
    #[error("layout length {0} does not match circuit width {1}")]
    LayoutMismatch(usize, usize),
}

#[derive(Clone)]
struct Branch {
    weight: f64,
    record: Vec<u8>,
    amps: Vec<Complex64>,
}

fn apply_single(amps: &mut [Complex64], q: usize, m: [[Complex64; 2]; 2]) {
    let stride = 1usize << q;
    let mut base = 0;
    while base < amps.len() {
        for offset in base..base + stride {
            let a = amps[offset];
            let b = amps[offset + stride];
            amps[offset] = m[0][0] * a + m[0][1] * b;
            amps[offset + stride] = m[1][0] * a + m[1][1] * b;
        }
        base += stride << 1;
    }
}

fn apply_instruction(amps: &mut [Complex64], instr: &Instruction) {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    match instr.kind {
        Kind::H => {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            apply_single(amps, instr.qubits[0], [[c(s, 0.0), c(s, 0.0)], [c(s, 0.0), c(-s, 0.0)]]);
        }
        Kind::X => {
            apply_single(
                amps,
                instr.qubits[0],
                [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]],
            );
        }
        Kind::Sx => {
            // SX = [[1+i, 1-i], [1-i, 1+i]] / 2
            apply_single(
                amps,
                instr.qubits[0],
                [
                    [c(0.5, 0.5), c(0.5, -0.5)],
                    [c(0.5, -0.5), c(0.5, 0.5)],
                ],
            );
        }
        Kind::Rz => {
            let half = instr.angle() / 2.0;
            let lo = Complex64::from_polar(1.0, -half);
            let hi = Complex64::from_polar(1.0, half);
            apply_single(amps, instr.qubits[0], [[lo, c(0.0, 0.0)], [c(0.0, 0.0), hi]]);
        }
        Kind::Cx => {
            let (ctrl, tgt) = (instr.qubits[0], instr.qubits[1]);
            for idx in 0..amps.len() {
                if (idx >> ctrl) & 1 == 1 && (idx >> tgt) & 1 == 0 {
                    amps.swap(idx, idx | (1 << tgt));
                }
            }
        }
        Kind::Cz => {
            let (a, b) = (instr.qubits[0], instr.qubits[1]);
            for (idx, amp) in amps.iter_mut().enumerate() {
                if (idx >> a) & 1 == 1 && (idx >> b) & 1 == 1 {
                    *amp = -*amp;
                }
            }
        }
        Kind::Swap => {
            let (a, b) = (instr.qubits[0], instr.qubits[1]);
            for idx in 0..amps.len() {
                let ba = (idx >> a) & 1;
                let bb = (idx >> b) & 1;
                if ba == 1 && bb == 0 {
                    amps.swap(idx, idx ^ (1 << a) ^ (1 << b));
                }
            }
        }
        Kind::Ccx => {
            let (c1, c2, tgt) = (instr.qubits[0], instr.qubits[1], instr.qubits[2]);
            for idx in 0..amps.len() {
                if (idx >> c1) & 1 == 1 && (idx >> c2) & 1 == 1 && (idx >> tgt) & 1 == 0 {
                    amps.swap(idx, idx | (1 << tgt));
                }
            }
        }
        Kind::Ccz => {
            let (a, b, d) = (instr.qubits[0], instr.qubits[1], instr.qubits[2]);
            for (idx, amp) in amps.iter_mut().enumerate() {
                if (idx >> a) & 1 == 1 && (idx >> b) & 1 == 1 && (idx >> d) & 1 == 1 {
                    *amp = -*amp;
                }
            }
        }
        Kind::Barrier | Kind::Delay => {}
        Kind::Measure | Kind::Reset => unreachable!("handled by branch splitting"),
    }
}

/// Probability that qubit `q` reads 0, plus the two projected (normalized)
/// states. Projections with zero probability are returned as `None`.
fn split_on_qubit(
    amps: &[Complex64],
    q: usize,
) -> (f64, Option<Vec<Complex64>>, Option<Vec<Complex64>>) {
    let mask = 1usize << q;
    let mut p0 = 0.0;
    for (idx, amp) in amps.iter().enumerate() {
        if idx & mask == 0 {
            p0 += amp.norm_sqr();
        }
    }
    let p1 = 1.0 - p0;
    let zero = if p0 > 0.0 {
        let norm = p0.sqrt();
        Some(
            amps.iter()
                .enumerate()
                .map(|(idx, amp)| {
                    if idx & mask == 0 {
                        amp / norm
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
                .collect(),
        )
    } else {
        None
    };
    let one = if p1 > 0.0 {
        let norm = p1.sqrt();
        Some(
            amps.iter()
                .enumerate()
                .map(|(idx, amp)| {
                    if idx & mask != 0 {
                        amp / norm
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
                .collect(),
        )
    } else {
        None
    };
    (p0, zero, one)
}

/// Exact outcome distribution of `circuit` over its classical bits.
pub fn simulate(circuit: &Circuit) -> Result<Distribution, SimError> {
    if circuit.num_qubits > MAX_QUBITS {
        return Err(SimError::TooManyQubits(circuit.num_qubits));
    }
    let dim = 1usize << circuit.num_qubits;
    let mut amps = vec![Complex64::new(0.0, 0.0); dim];
    amps[0] = Complex64::new(1.0, 0.0);
    let mut branches = vec![Branch {
        weight: 1.0,
        record: vec![0; circuit.num_clbits],
        amps,
    }];

    for instr in &circuit.instructions {
        match instr.kind {
            Kind::Measure => {
                let q = instr.qubits[0];
                let c = instr.clbits[0];
                let mut next = Vec::with_capacity(branches.len() * 2);
                for branch in branches {
                    let (p0, zero, one) = split_on_qubit(&branch.amps, q);
                    if let Some(amps) = zero {
                        let mut record = branch.record.clone();
                        record[c] = 0;
                        next.push(Branch { weight: branch.weight * p0, record, amps });
                    }
                    if let Some(amps) = one {
                        let mut record = branch.record.clone();
                        record[c] = 1;
                        next.push(Branch {
                            weight: branch.weight * (1.0 - p0),
                            record,
                            amps,
                        });
                    }
                }
                branches = next;
            }
            Kind::Reset => {
                let q = instr.qubits[0];
                let mut next = Vec::with_capacity(branches.len() * 2);
                for branch in branches {
                    let (p0, zero, one) = split_on_qubit(&branch.amps, q);
                    if let Some(amps) = zero {
                        next.push(Branch {
                            weight: branch.weight * p0,
                            record: branch.record.clone(),
                            amps,
                        });
                    }
                    if let Some(mut amps) = one {
                        // Map the q=1 component back to q=0.
                        let mask = 1usize << q;
                        for idx in 0..amps.len() {
                            if idx & mask != 0 {
                                amps[idx ^ mask] = amps[idx];
                                amps[idx] = Complex64::new(0.0, 0.0);
                            }
                        }
                        next.push(Branch {
                            weight: branch.weight * (1.0 - p0),
                            record: branch.record,
                            amps,
                        });
                    }
                }
                branches = next;
            }
            _ => {
                for branch in &mut branches {
                    apply_instruction(&mut branch.amps, instr);
                }
            }
        }
    }

    let mut outcomes: BTreeMap<String, f64> = BTreeMap::new();
    for branch in branches {
        let key: String = branch
            .record
            .iter()
            .map(|&b| if b == 1 { '1' } else { '0' })
            .collect();
        *outcomes.entry(key).or_insert(0.0) += branch.weight;
    }
    Ok(Distribution { outcomes })
}

/// Multinomial counts drawn from the exact distribution with a seeded PRNG.
pub fn sample(
    circuit: &Circuit,
    shots: u64,
    seed: u64,
) -> Result<BTreeMap<String, u64>, SimError> {
    let dist = simulate(circuit)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let entries: Vec<(&str, f64)> = dist.iter().collect();
    let mut counts = BTreeMap::new();
    for _ in 0..shots {
        let mut draw: f64 = rng.gen();
        let mut chosen = entries.last().map(|(k, _)| *k).unwrap_or("");
        for &(key, p) in &entries {
            if draw < p {
                chosen = key;
                break;
            }
            draw -= p;
        }
        *counts.entry(chosen.to_string()).or_insert(0) += 1;
    }
    Ok(counts)
}

/// Hellinger fidelity `(sum_i sqrt(p_i q_i))^2`; missing outcomes count
/// as probability zero.
pub fn hellinger_fidelity(p: &Distribution, q: &Distribution) -> f64 {
    let mut sum = 0.0;
    for (key, pv) in p.iter() {
        let qv = q.probability(key);
        sum += (pv * qv).sqrt();
    }
    sum * sum
}

/// Total variation distance `0.5 * sum_i |p_i - q_i|`.
pub fn total_variation_distance(p: &Distribution, q: &Distribution) -> f64 {
    let mut keys: Vec<&str> = p.iter().map(|(k, _)| k).collect();
    for (k, _) in q.iter() {
        if p.probability(k) == 0.0 {
            keys.push(k);
        }
    }
    let mut sum = 0.0;
    for key in keys {
        sum += (p.probability(key) - q.probability(key)).abs();
    }
    sum / 2.0
}

/// Applies a measurement-free circuit to basis state `index`.
fn column(circuit: &Circuit, index: usize) -> Vec<Complex64> {
    let dim = 1usize << circuit.num_qubits;
    let mut amps = vec![Complex64::new(0.0, 0.0); dim];
    amps[index] = Complex64::new(1.0, 0.0);
    for instr in &circuit.instructions {
        apply_instruction(&mut amps, instr);
    }
    amps
}

/// Checks that two measurement-free circuits implement the same unitary up
/// to one global phase.
///
/// The reference circuit's qubit `v` enters the candidate register at
/// `input_layout[v]` and its result is read back at `output_layout[v]`;
/// the two differ when the candidate contains routing SWAPs. `None` means
/// the identity mapping. Idle candidate qubits must act as identity.
pub fn equivalent_up_to_global_phase(
    reference: &Circuit,
    candidate: &Circuit,
    input_layout: Option<&Layout>,
    output_layout: Option<&Layout>,
    tolerance: f64,
) -> Result<bool, SimError> {
    const LIMIT: usize = 10;
    if reference.num_qubits > LIMIT || candidate.num_qubits > LIMIT {
        return Err(SimError::TooManyQubits(
            reference.num_qubits.max(candidate.num_qubits),
        ));
    }
    if reference
        .instructions
        .iter()
        .chain(&candidate.instructions)
        .any(|i| matches!(i.kind, Kind::Measure | Kind::Reset))
    {
        return Err(SimError::NotUnitary);
    }
    let identity = Layout::identity(candidate.num_qubits);
    let input = input_layout.unwrap_or(&identity);
    let output = output_layout.unwrap_or(&identity);
    if input.len() != candidate.num_qubits
        || output.len() != candidate.num_qubits
        || reference.num_qubits > candidate.num_qubits
    {
        return Err(SimError::LayoutMismatch(input.len(), candidate.num_qubits));
    }

    let embed_input = |small: usize| -> usize {
        let mut big = 0usize;
        for v in 0..reference.num_qubits {
            if (small >> v) & 1 == 1 {
                big |= 1 << input.physical(v);
            }
        }
        big
    };

    // `got` must be supported on the output-embedded subspace and match
    // `want` there with one shared phase across all columns. The phase is
    // read off the aggregate inner product, then every entry is verified.
    let mut inner = Complex64::new(0.0, 0.0);
    let mut pairs: Vec<(Complex64, Complex64)> = Vec::new();
    for small in 0..(1usize << reference.num_qubits) {
        let want = column(reference, small);
        let got = column(candidate, embed_input(small));
        for (big, &actual) in got.iter().enumerate() {
            let mut small_idx = 0usize;
            let mut residue = big;
            for v in 0..reference.num_qubits {
                let p = output.physical(v);
                if (big >> p) & 1 == 1 {
                    small_idx |= 1 << v;
                    residue &= !(1 << p);
                }
            }
            // Any bit left on an idle physical qubit puts this entry
            // outside the embedded subspace.
            let expected = if residue != 0 {
                Complex64::new(0.0, 0.0)
            } else {
                want[small_idx]
            };
            inner += expected.conj() * actual;
            pairs.push((expected, actual));
        }
    }
    let phase = if inner.norm() > 1e-9 {
        inner / inner.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    Ok(pairs.iter().all(|&(e, a)| (a - phase * e).norm() <= tolerance))
}
