use std::collections::BTreeMap;

use qrbuild_core::backend::{BackendModel, QubitPattern, ALLOWED_BASIS};
use qrbuild_core::circuit::Kind;

fn main() {
    // temp generator
    let mut durations = BTreeMap::new();
    durations.insert((Kind::X, QubitPattern::Wildcard), 4u64);
    durations.insert((Kind::Sx, QubitPattern::Wildcard), 4);
    durations.insert((Kind::Rz, QubitPattern::Wildcard), 1);
    durations.insert((Kind::Cz, QubitPattern::Wildcard), 12);
    durations.insert((Kind::Measure, QubitPattern::Wildcard), 60);
    durations.insert((Kind::Reset, QubitPattern::Wildcard), 40);
    durations.insert((Kind::Delay, QubitPattern::Wildcard), 1);

    let mut errors = BTreeMap::new();
    let cz_errors = [
        ((0usize, 1usize), 0.008),
        ((1, 2), 0.007),
        ((2, 3), 0.006),
        ((3, 4), 0.005),
        ((4, 5), 0.003),
        ((5, 6), 0.003),
        ((6, 7), 0.005),
        ((7, 8), 0.006),
        ((8, 9), 0.007),
        ((9, 10), 0.008),
        ((10, 11), 0.009),
    ];
    for ((a, b), e) in cz_errors {
        errors.insert((Kind::Cz, QubitPattern::Exact(vec![a, b])), e);
    }
    errors.insert((Kind::Sx, QubitPattern::Wildcard), 0.0002);
    errors.insert((Kind::X, QubitPattern::Wildcard), 0.0002);
    errors.insert((Kind::Measure, QubitPattern::Wildcard), 0.01);

    let demo12 = BackendModel::assemble(
        "demo12",
        12,
        (0..11).map(|i| (i, i + 1)),
        ALLOWED_BASIS,
        durations.clone(),
        errors,
    )
    .unwrap();
    std::fs::write("fixtures/backends/demo12.backend", demo12.canonical_text()).unwrap();

    // 27-qubit heavy-hex style model.
    let coupling = [
        (0, 1), (1, 2), (1, 4), (2, 3), (3, 5), (4, 7), (5, 8), (6, 7),
        (7, 10), (8, 9), (8, 11), (10, 12), (11, 14), (12, 13), (12, 15),
        (13, 14), (14, 16), (15, 18), (16, 19), (17, 18), (18, 21), (19, 20),
        (19, 22), (21, 23), (22, 25), (23, 24), (24, 25), (25, 26),
    ];
    let mut errors = BTreeMap::new();
    for (i, &(a, b)) in coupling.iter().enumerate() {
        let e = 0.004 + 0.0001 * ((i % 7) as f64);
        errors.insert((Kind::Cz, QubitPattern::Exact(vec![a, b])), e);
    }
    errors.insert((Kind::Sx, QubitPattern::Wildcard), 0.0003);
    errors.insert((Kind::X, QubitPattern::Wildcard), 0.0003);
    errors.insert((Kind::Measure, QubitPattern::Wildcard), 0.012);
    let heavyhex = BackendModel::assemble(
        "heavyhex27",
        27,
        coupling,
        ALLOWED_BASIS,
        durations,
        errors,
    )
    .unwrap();
    std::fs::write(
        "fixtures/backends/heavyhex27.backend",
        heavyhex.canonical_text(),
    )
    .unwrap();
    println!("demo12 sha256 = {}", demo12.sha256);
    println!("heavyhex27 sha256 = {}", heavyhex.sha256);
}
