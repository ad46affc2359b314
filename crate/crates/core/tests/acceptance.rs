//! Acceptance suite: one test per release criterion, every tolerance
//! pinned in code. Run with `--nocapture` to see the per-criterion
//! PASS lines.

mod support;

use std::collections::BTreeMap;
use std::time::Instant;

use qrbuild_core::backend::{BackendModel, QubitPattern, ALLOWED_BASIS};
use qrbuild_core::circuit::{Circuit, Kind};
use qrbuild_core::qasm::{parse_artifact, write_source, Artifact, BuildInfo};
use qrbuild_core::sim::{
    hellinger_fidelity, simulate, total_variation_distance, Distribution,
};
use qrbuild_core::stego::{
    decode_init, decode_layout, decode_scheduling, int_to_permutation, layout_capacity_bits,
    layout_capacity_bytes, permutation_to_int, StealthLevel,
};
use qrbuild_core::tamper::{apply_tamper, ghz_circuit, grover3_circuit, TamperKind, TamperSpec};
use qrbuild_core::transpile::{
    run_pipeline, InitPlugin, LayoutPlugin, PipelineConfig, SchedulingPlugin,
};
use qrbuild_core::verify::{verify_build, VerdictStatus};

use support::{
    demo12, density_matrix_distribution, heavyhex27, random_circuit, GeneratorOptions, TestRng,
};

fn line_backend(n: usize) -> BackendModel {
    let mut durations = BTreeMap::new();
    for kind in ALLOWED_BASIS {
        durations.insert((kind, QubitPattern::Wildcard), 4u64);
    }
    durations.insert((Kind::Rz, QubitPattern::Wildcard), 1);
    durations.insert((Kind::Cz, QubitPattern::Wildcard), 12);
    durations.insert((Kind::Measure, QubitPattern::Wildcard), 60);
    BackendModel::assemble(
        &format!("line{n}"),
        n,
        (0..n - 1).map(|i| (i, i + 1)),
        ALLOWED_BASIS,
        durations,
        BTreeMap::new(),
    )
    .unwrap()
}

fn ideal(pairs: &[(&str, f64)]) -> Distribution {
    Distribution::from_outcomes(pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect())
}

fn build_honest(source: &str, backend: &BackendModel, seed: u64) -> (Artifact, BuildInfo) {
    run_pipeline(source, &PipelineConfig::honest(backend.clone(), seed)).unwrap()
}

#[test]
fn criterion_01_layout_capacity() {
    let started = Instant::now();
    assert_eq!(layout_capacity_bytes(127), 88);
    assert_eq!(layout_capacity_bits(127), 709);
    assert_eq!(layout_capacity_bytes(27), 11);
    assert_eq!(layout_capacity_bytes(1), 0);
    assert!(started.elapsed().as_secs_f64() < 1.0);
    println!("[acceptance] criterion 1: PASS - layout_capacity_bytes(127) = 88 (exact)");
}

#[test]
fn criterion_02_lehmer_exhaustive_bijection() {
    let started = Instant::now();
    let mut seen = std::collections::HashSet::new();
    for k in 0u64..5040 {
        let value = num_bigint::BigUint::from(k);
        let layout = int_to_permutation(&value, 7).unwrap();
        assert_eq!(permutation_to_int(&layout), value, "rank {k} round trip");
        assert!(seen.insert(layout.as_slice().to_vec()), "rank {k} collides");
    }
    assert_eq!(seen.len(), 5040);
    let elapsed = started.elapsed().as_secs_f64();
    assert!(elapsed < 1.0, "took {elapsed}s");
    println!("[acceptance] criterion 2: PASS - 5040/5040 Lehmer round trips, {elapsed:.3}s");
}

#[test]
fn criterion_03_determinism_corpus() {
    let backend = demo12();
    let mut rng = TestRng::new(2024);
    let mut cases = 0;
    for index in 0..50 {
        let options = GeneratorOptions {
            num_qubits: 1 + rng.below(6),
            gates: 5 + rng.below(20),
            allow_reset: index % 3 != 0,
            allow_three_qubit: true,
            measure_all: true,
        };
        let source = write_source(&random_circuit(&mut rng, &options));
        for seed in [1u64, 7, 42] {
            let mut config = PipelineConfig::honest(backend.clone(), seed);
            if index % 3 == 1 {
                config.layout = LayoutPlugin::Random;
            }
            let (a1, b1) = run_pipeline(&source, &config).unwrap();
            let (a2, b2) = run_pipeline(&source, &config).unwrap();
            assert_eq!(a1.bytes, a2.bytes, "artifact bytes differ (case {index}, seed {seed})");
            assert_eq!(
                b1.to_text().unwrap(),
                b2.to_text().unwrap(),
                "buildinfo bytes differ (case {index}, seed {seed})"
            );
            cases += 1;
        }
    }
    assert_eq!(cases, 150);
    println!("[acceptance] criterion 3: PASS - 150/150 double builds byte-identical");
}

#[test]
fn criterion_04_stego_roundtrips() {
    let started = Instant::now();
    let mut rng = TestRng::new(77);

    // Layout channel on 27 and 127 qubits.
    let mut layout_cases = 0;
    for backend in [heavyhex27(), line_backend(127)] {
        let capacity_payload = (layout_capacity_bits(backend.num_qubits) / 8) as usize - 2;
        for _ in 0..150 {
            let len = rng.below(capacity_payload + 1);
            let payload = rng.bytes(len);
            let source = "qreg q[2]; creg c[1]; h q[0]; cx q[0],q[1]; measure q[0] -> c[0];";
            let mut config = PipelineConfig::honest(backend.clone(), 5);
            config.layout = LayoutPlugin::Leaky { payload: payload.clone() };
            let (artifact, _) = run_pipeline(source, &config).unwrap();
            let reparsed = parse_artifact(&artifact.bytes).unwrap();
            assert_eq!(decode_layout(&reparsed).unwrap(), payload);
            layout_cases += 1;
        }
    }

    // Init channel, 1..=20 blocks, through the full pipeline.
    let backend = demo12();
    let mut init_cases = 0;
    for case in 0..300 {
        let blocks = 1 + case % 20;
        let exact = 6 * blocks - 2;
        let len = if case % 2 == 0 { exact } else { rng.below(exact + 1) };
        let payload = rng.bytes(len);
        let source = "qreg q[3]; creg c[3]; h q[0]; cx q[0],q[1]; ccz q[0],q[1],q[2]; measure q[0] -> c[0];";
        let mut config = PipelineConfig::honest(backend.clone(), 9);
        config.init = InitPlugin::Leaky { payload: payload.clone() };
        let (artifact, _) = run_pipeline(source, &config).unwrap();
        let reparsed = parse_artifact(&artifact.bytes).unwrap();
        assert_eq!(decode_init(&reparsed).unwrap(), payload, "init case {case}");
        init_cases += 1;
    }

    // Scheduling channel at all three stealth levels.
    let ghz5 = write_source(&ghz_circuit(5));
    let mut scheduling_cases = 0;
    for (level_index, stealth) in [StealthLevel::Two, StealthLevel::Four, StealthLevel::Six]
        .into_iter()
        .enumerate()
    {
        // Capacity probe: count rotations in the honest artifact once.
        let (honest, _) = build_honest(&ghz5, &backend, 11);
        let rz_count = honest
            .circuit
            .instructions
            .iter()
            .filter(|i| i.kind == Kind::Rz)
            .count();
        let capacity_payload = stealth.bytes_per_gate() * rz_count - 2;
        for case in 0..100 {
            let len = rng.below(capacity_payload + 1);
            let payload = rng.bytes(len);
            let mut config = PipelineConfig::honest(backend.clone(), 11);
            config.scheduling = SchedulingPlugin::Leaky { payload: payload.clone(), stealth };
            let (artifact, _) = run_pipeline(&ghz5, &config).unwrap();
            let reparsed = parse_artifact(&artifact.bytes).unwrap();
            assert_eq!(
                decode_scheduling(&reparsed, stealth).unwrap(),
                payload,
                "scheduling case {case} level {level_index}"
            );
            scheduling_cases += 1;
        }
    }

    let elapsed = started.elapsed().as_secs_f64();
    assert!(elapsed < 30.0, "took {elapsed}s");
    assert!(layout_cases >= 300 && init_cases >= 300 && scheduling_cases >= 300);
    println!(
        "[acceptance] criterion 4: PASS - {layout_cases}+{init_cases}+{scheduling_cases} exact stego round trips in {elapsed:.1}s"
    );
}

#[test]
fn criterion_05_stealth_bounds() {
    let backend = demo12();
    let ghz4 = write_source(&ghz_circuit(4));
    let (honest, _) = build_honest(&ghz4, &backend, 3);
    let honest_dist = simulate(&honest.circuit).unwrap();

    // Stealth 2: every modified angle within the pi-render threshold.
    let mut rng = TestRng::new(5);
    let mut checked_angles = 0;
    let mut stego2_artifact = None;
    for case in 0..10 {
        let len = 4 + rng.below(5);
        let payload = rng.bytes(len);
        let mut config = PipelineConfig::honest(backend.clone(), 3);
        config.scheduling =
            SchedulingPlugin::Leaky { payload, stealth: StealthLevel::Two };
        let (stego, _) = run_pipeline(&ghz4, &config).unwrap();
        for (a, b) in stego
            .circuit
            .instructions
            .iter()
            .zip(&honest.circuit.instructions)
        {
            if a.kind == Kind::Rz && a.params != b.params {
                let relative = (a.angle() - b.angle()).abs() / b.angle().abs();
                assert!(relative < 1e-9, "case {case}: |dtheta|/|theta| = {relative:e}");
                checked_angles += 1;
            }
        }
        stego2_artifact = Some(stego);
    }
    assert!(checked_angles > 0);

    let stego2_dist = simulate(&stego2_artifact.unwrap().circuit).unwrap();
    let fidelity2 = hellinger_fidelity(&honest_dist, &stego2_dist);
    assert!(fidelity2 >= 1.0 - 1e-6, "stealth-2 fidelity {fidelity2}");

    // Stealth 6 on GHZ-4: recorded, must exceed 0.9.
    let mut config = PipelineConfig::honest(backend.clone(), 3);
    config.scheduling = SchedulingPlugin::Leaky {
        payload: rng.bytes(8),
        stealth: StealthLevel::Six,
    };
    let (stego6, _) = run_pipeline(&ghz4, &config).unwrap();
    let stego6_dist = simulate(&stego6.circuit).unwrap();
    let fidelity6 = hellinger_fidelity(&honest_dist, &stego6_dist);
    assert!(fidelity6 > 0.9, "stealth-6 fidelity {fidelity6}");
    println!(
        "[acceptance] criterion 5: PASS - {checked_angles} stealth-2 angles < 1e-9 relative, fidelity(stealth2) = {fidelity2:.9}, fidelity(stealth6) = {fidelity6:.6}"
    );
}

/// Index of the measurement on the last data qubit in an artifact.
fn last_measure_position(artifact: &Artifact) -> usize {
    artifact
        .circuit
        .instructions
        .iter()
        .enumerate()
        .rev()
        .find(|(_, i)| i.kind == Kind::Measure)
        .map(|(index, _)| index)
        .expect("artifact has a measurement")
}

#[test]
fn criterion_06_ghz_semantics_and_reset_tamper() {
    let backend = demo12();
    let two_outcomes = ideal(&[("00", 0.5), ("11", 0.5)]);
    let reset_outcomes = ideal(&[("00", 0.5), ("10", 0.5)]);
    for n in 2..=8 {
        let source = write_source(&ghz_circuit(n));
        let (artifact, _) = build_honest(&source, &backend, 42);
        let dist = simulate(&artifact.circuit).unwrap();
        assert!(
            total_variation_distance(&dist, &two_outcomes) < 1e-9,
            "GHZ-{n}: {dist:?}"
        );

        let spec = TamperSpec {
            kind: TamperKind::InsertReset,
            position: last_measure_position(&artifact),
            new_qubits: None,
        };
        let tampered = apply_tamper(&artifact, &spec, &backend).unwrap();
        let tampered_dist = simulate(&tampered.circuit).unwrap();
        assert!(
            total_variation_distance(&tampered_dist, &reset_outcomes) < 1e-9,
            "GHZ-{n} reset tamper: {tampered_dist:?}"
        );
        let tvd = total_variation_distance(&dist, &tampered_dist);
        assert!((tvd - 0.5).abs() < 1e-9, "GHZ-{n} TVD {tvd}");
    }
    println!("[acceptance] criterion 6: PASS - GHZ 2..8 exact, reset tamper flips to {{00,10}} with TVD 0.5");
}

#[test]
fn criterion_07_grover_semantics_and_retarget_tampers() {
    let backend = demo12();
    let source = write_source(&grover3_circuit());
    let (artifact, _) = build_honest(&source, &backend, 42);
    let dist = simulate(&artifact.circuit).unwrap();
    let marked = ideal(&[("101", 0.5), ("110", 0.5)]);
    assert!(total_variation_distance(&dist, &marked) < 1e-9, "{dist:?}");

    // Every single-CZ retarget (any coupled pair other than the original)
    // either displaces the top-2 outcome set or is a provable no-op on the
    // ideal distribution (TVD < 1e-12). The no-op cases are the trailing
    // CX of routing SWAPs whose control is |0>; those edits are invisible
    // to any outcome statistic and are caught byte-wise by the verifier,
    // which criterion 8 checks and this test re-checks for one instance.
    let cz_positions: Vec<usize> = artifact
        .circuit
        .instructions
        .iter()
        .enumerate()
        .filter(|(_, i)| i.kind == Kind::Cz)
        .map(|(index, _)| index)
        .collect();
    assert!(!cz_positions.is_empty());
    let mut shifting = 0;
    let mut inert = 0;
    let mut inert_example = None;
    for &position in &cz_positions {
        let original = {
            let qubits = &artifact.circuit.instructions[position].qubits;
            [qubits[0].min(qubits[1]), qubits[0].max(qubits[1])]
        };
        for &(a, b) in backend.coupling.iter() {
            if [a, b] == original {
                continue;
            }
            let spec = TamperSpec {
                kind: TamperKind::RetargetGate,
                position,
                new_qubits: Some((a, b)),
            };
            let tampered = apply_tamper(&artifact, &spec, &backend).unwrap();
            let tampered_dist = simulate(&tampered.circuit).unwrap();
            let mut top = tampered_dist.top_outcomes(2);
            top.sort();
            if top != vec!["101".to_string(), "110".to_string()] {
                shifting += 1;
            } else {
                let tvd = total_variation_distance(&dist, &tampered_dist);
                assert!(
                    tvd < 1e-12,
                    "retarget of instruction {position} onto ({a},{b}) kept the marked set \
                     while changing the distribution (TVD {tvd:e})"
                );
                inert += 1;
                inert_example.get_or_insert(tampered);
            }
        }
    }
    assert!(shifting > 0, "no retarget displaced the marked set");

    // Distribution-invisible tampers still break reproducibility.
    if let Some(tampered) = inert_example {
        let (_, info) = build_honest(&source, &backend, 42);
        let verdict = verify_build(&source, &info, &tampered.bytes, &backend);
        assert_eq!(verdict.status, VerdictStatus::NonReproducible);
    }
    println!(
        "[acceptance] criterion 7: PASS - Grover-3 exact; {shifting} CZ retargets displace the top-2 set, {inert} are distribution no-ops (TVD < 1e-12) still caught byte-wise"
    );
}

#[test]
fn criterion_08_verifier_completeness() {
    let demo = demo12();
    let heavy = heavyhex27();
    let mut rng = TestRng::new(99);
    let mut attacked = 0;
    let mut honest = 0;

    let ghz_sources: Vec<String> = (3..=8).map(|n| write_source(&ghz_circuit(n))).collect();
    let grover_source = write_source(&grover3_circuit());

    // Honest artifacts verify as reproducible.
    for (index, source) in ghz_sources.iter().chain([&grover_source]).enumerate() {
        for seed in [0u64, 13] {
            let mut config = PipelineConfig::honest(demo.clone(), seed);
            if index % 2 == 0 {
                config.layout = LayoutPlugin::Random;
            }
            let (artifact, info) = run_pipeline(source, &config).unwrap();
            let verdict = verify_build(source, &info, &artifact.bytes, &demo);
            assert_eq!(verdict.status, VerdictStatus::Reproducible, "{verdict:?}");
            honest += 1;
        }
    }

    let mut expect_non_reproducible = |source: &str, config: &PipelineConfig, backend: &BackendModel| {
        let (artifact, info) = run_pipeline(source, config).unwrap();
        let verdict = verify_build(source, &info, &artifact.bytes, backend);
        assert_eq!(verdict.status, VerdictStatus::NonReproducible);
        assert!(verdict.first_diff_offset.is_some());
        assert!(!verdict.diff_lines.is_empty());
        attacked += 1;
    };

    // Stego: layout channel.
    for source in &ghz_sources {
        for _ in 0..3 {
            let mut config = PipelineConfig::honest(heavy.clone(), 21);
            let len = 1 + rng.below(9);
            config.layout = LayoutPlugin::Leaky { payload: rng.bytes(len) };
            expect_non_reproducible(source, &config, &heavy);
        }
    }
    // Stego: init channel.
    for source in &ghz_sources {
        for _ in 0..2 {
            let mut config = PipelineConfig::honest(demo.clone(), 22);
            let len = 1 + rng.below(30);
            config.init = InitPlugin::Leaky { payload: rng.bytes(len) };
            expect_non_reproducible(source, &config, &demo);
        }
    }
    // Stego: scheduling channel at each stealth level.
    for source in &ghz_sources {
        for stealth in [StealthLevel::Two, StealthLevel::Four, StealthLevel::Six] {
            let mut config = PipelineConfig::honest(demo.clone(), 23);
            config.scheduling =
                {
                let len = 1 + rng.below(4);
                SchedulingPlugin::Leaky { payload: rng.bytes(len), stealth }
            };
            expect_non_reproducible(source, &config, &demo);
        }
    }

    // Tampers: reset insertion and CZ retargets on every GHZ + Grover.
    for source in ghz_sources.iter().chain([&grover_source]) {
        let (artifact, info) = build_honest(source, &demo, 42);
        let reset = TamperSpec {
            kind: TamperKind::InsertReset,
            position: last_measure_position(&artifact),
            new_qubits: None,
        };
        let retarget_position = artifact
            .circuit
            .instructions
            .iter()
            .rposition(|i| i.kind == Kind::Cz)
            .expect("transpiled benchmark has a CZ");
        let old = &artifact.circuit.instructions[retarget_position].qubits;
        let new_pair = demo
            .coupling
            .iter()
            .find(|&&(a, b)| [a, b] != [old[0].min(old[1]), old[0].max(old[1])])
            .copied()
            .unwrap();
        let retarget = TamperSpec {
            kind: TamperKind::RetargetGate,
            position: retarget_position,
            new_qubits: Some(new_pair),
        };
        for spec in [reset, retarget] {
            let tampered = apply_tamper(&artifact, &spec, &demo).unwrap();
            assert_ne!(tampered.bytes, artifact.bytes);
            let verdict = verify_build(source, &info, &tampered.bytes, &demo);
            assert_eq!(verdict.status, VerdictStatus::NonReproducible);
            assert!(verdict.first_diff_offset.is_some());
            attacked += 1;
        }
    }

    assert!(attacked >= 50, "only {attacked} attacked artifacts");
    assert!(honest >= 10);
    println!(
        "[acceptance] criterion 8: PASS - {attacked}/{attacked} attacks flagged NON_REPRODUCIBLE, {honest}/{honest} honest builds REPRODUCIBLE"
    );
}

#[test]
fn criterion_09_semantic_preservation() {
    let backend = demo12();
    let mut rng = TestRng::new(4242);
    for case in 0..25 {
        let options = GeneratorOptions {
            num_qubits: 2 + rng.below(5),
            gates: 6 + rng.below(18),
            allow_reset: false,
            allow_three_qubit: true,
            measure_all: true,
        };
        let circuit = random_circuit(&mut rng, &options);
        let source = write_source(&circuit);
        let source_dist = simulate(&circuit).unwrap();
        let (artifact, _) = build_honest(&source, &backend, case as u64);
        let transpiled_dist = simulate(&artifact.circuit).unwrap();
        let tvd = total_variation_distance(&source_dist, &transpiled_dist);
        assert!(tvd < 1e-9, "case {case}: TVD {tvd:e}");
    }
    println!("[acceptance] criterion 9: PASS - 25/25 transpiled distributions within TVD 1e-9");
}

#[test]
fn criterion_10_density_matrix_oracle() {
    let mut rng = TestRng::new(31337);
    for case in 0..10 {
        let options = GeneratorOptions {
            num_qubits: 2 + rng.below(3),
            gates: 5 + rng.below(12),
            allow_reset: true,
            allow_three_qubit: true,
            measure_all: true,
        };
        let circuit = random_circuit(&mut rng, &options);
        let fast = simulate(&circuit).unwrap();
        let reference = density_matrix_distribution(&circuit);
        let mut keys: Vec<String> = fast.iter().map(|(k, _)| k.to_string()).collect();
        keys.extend(reference.iter().map(|(k, _)| k.to_string()));
        keys.sort();
        keys.dedup();
        for key in keys {
            let delta = (fast.probability(&key) - reference.probability(&key)).abs();
            assert!(delta < 1e-9, "case {case}, outcome {key}: |delta| = {delta:e}");
        }
    }
    println!("[acceptance] criterion 10: PASS - 10/10 circuits match the density-matrix oracle per outcome");
}
