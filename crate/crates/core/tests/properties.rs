mod common;

use proptest::prelude::*;
use qse_core::circuit::{parse_program, CircuitProgram, Instruction, MeasureTarget};
use qse_core::measurement::qubit_levels;
use qse_core::{AmplitudeVector, EncodedState, EncodingConfig, MeasurementPolicy, RefState, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{
    header_of, random_address, random_amps, random_circuit, random_config, random_gate, random_named,
    run_reference, run_signal, to_program,
};

fn cfg_and_rng(seed: u64, max_total: usize) -> (EncodingConfig, ChaCha8Rng) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (random_config(&mut rng, max_total), rng)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn encode_decode_round_trip(seed in any::<u64>()) {
        let (cfg, mut rng) = cfg_and_rng(seed, 8);
        let v = random_amps(&mut rng, cfg.n_amplitudes());
        let st = EncodedState::encode(&v, &cfg).unwrap();
        prop_assert!(v.max_abs_diff(&st.decode()) <= 1e-12);
        prop_assert!((st.norm() - v.norm()).abs() <= 1e-12);
    }

    #[test]
    fn gates_are_linear(seed in any::<u64>(), a_re in -2.0f64..2.0, a_im in -2.0f64..2.0, b_re in -2.0f64..2.0) {
        let (cfg, mut rng) = cfg_and_rng(seed, 7);
        let (a, b) = (C64::new(a_re, a_im), C64::new(b_re, 0.5));
        let v1 = random_amps(&mut rng, cfg.n_amplitudes());
        let v2 = random_amps(&mut rng, cfg.n_amplitudes());
        let mix: Vec<C64> = v1.iter().zip(v2.iter()).map(|(x, y)| a * x + b * y).collect();
        let ops = random_circuit(&mut rng, &cfg, 6);
        let run = |v: &AmplitudeVector| run_signal(&EncodedState::encode(v, &cfg).unwrap(), &ops).decode();
        let lhs = run(&AmplitudeVector::new(mix).unwrap());
        let (r1, r2) = (run(&v1), run(&v2));
        let rhs: Vec<C64> = r1.iter().zip(r2.iter()).map(|(x, y)| a * x + b * y).collect();
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-10);
    }

    #[test]
    fn unitary_circuits_preserve_norm(seed in any::<u64>(), depth in 1usize..30) {
        let (cfg, mut rng) = cfg_and_rng(seed, 8);
        let v = random_amps(&mut rng, cfg.n_amplitudes());
        let ops = random_circuit(&mut rng, &cfg, depth);
        let out = run_signal(&EncodedState::encode(&v, &cfg).unwrap(), &ops);
        prop_assert!((out.norm() - 1.0).abs() <= 1e-10);
        let dense = run_reference(&RefState::new(&v, &cfg).unwrap(), &ops);
        prop_assert!(qse_core::reference::compare(&out, &dense).unwrap() <= 1e-10);
    }

    #[test]
    fn sequential_gates_compose(seed in any::<u64>()) {
        let (cfg, mut rng) = cfg_and_rng(seed, 7);
        let v = random_amps(&mut rng, cfg.n_amplitudes());
        let st = EncodedState::encode(&v, &cfg).unwrap();
        let addr = random_address(&mut rng, &cfg);
        let (g1, g2) = (random_gate(&mut rng), random_gate(&mut rng));
        let two = st.apply_1q(&g1, addr).unwrap().apply_1q(&g2, addr).unwrap();
        let one = st.apply_1q(&g2.matmul(&g1), addr).unwrap();
        prop_assert!(two.decode().max_abs_diff(&one.decode()) <= 1e-12);
        let back = two.apply_1q(&g2.adjoint(), addr).unwrap().apply_1q(&g1.adjoint(), addr).unwrap();
        prop_assert!(back.decode().max_abs_diff(&v) <= 1e-12);
    }

    #[test]
    fn snapshot_round_trip(seed in any::<u64>()) {
        let (cfg, mut rng) = cfg_and_rng(seed, 6);
        let v = random_amps(&mut rng, cfg.n_amplitudes());
        let ops = random_circuit(&mut rng, &cfg, 4);
        let st = run_signal(&EncodedState::encode(&v, &cfg).unwrap(), &ops);
        let back = EncodedState::from_snapshot(&st.to_snapshot()).unwrap();
        prop_assert!(back.grid.max_abs_diff(&st.grid) == 0.0);
        prop_assert_eq!(back.config, st.config);
    }

    #[test]
    fn levels_match_dense_probabilities(seed in any::<u64>()) {
        let (cfg, mut rng) = cfg_and_rng(seed, 8);
        let v = random_amps(&mut rng, cfg.n_amplitudes());
        let st = EncodedState::encode(&v, &cfg).unwrap();
        for addr in cfg.all_addresses() {
            let bit = cfg.bit_position(addr).unwrap();
            let want: f64 = v.iter().enumerate().filter(|(i, _)| i >> bit & 1 == 1).map(|(_, a)| a.norm_sqr()).sum();
            let (lv, _) = qubit_levels(&st, addr).unwrap();
            prop_assert!((lv.p1().unwrap() - want).abs() <= 1e-10);
        }
    }

    #[test]
    fn parser_never_panics(text in "\\PC{0,200}") {
        let _ = parse_program(&text);
    }

    #[test]
    fn parser_never_panics_on_dsl_like_text(text in "(qubits f=[0-9] s=[0-3]|gate [A-Z]{1,2}(\\([0-9pi/*-]{1,6}\\))? [fst][0-9]|cgate X [fst][0-9] [fst][0-9]|measure (all|[fst][0-9])( born| argmax)?|init (basis [0-9]+|uniform|amps [0-9j+.-]{1,8})|oracle table [01]{1,8}|noise -?[0-9a-z]{1,4}|#.*|[ \t]*)(\n(qubits f=[0-9] s=[0-3]|gate [A-Z]{1,2} [fst][0-9]|cgate [A-Z] [fst][0-9] [fst][0-9]|measure (all|[fst][0-9])|oracle table [01]{1,8}|[ \t]*)){0,8}") {
        match parse_program(&text) {
            Ok(_) => {}
            Err(e) => {
                prop_assert!(e.line >= 1 && e.line <= text.split('\n').count());
                prop_assert!(e.column >= 1);
            }
        }
    }

    #[test]
    fn display_round_trip(seed in any::<u64>(), named in any::<bool>(), measure in 0usize..3) {
        let (cfg, mut rng) = cfg_and_rng(seed, 6);
        let v = random_amps(&mut rng, cfg.n_amplitudes());
        let ops = random_circuit(&mut rng, &cfg, 8);
        let mut p: CircuitProgram = to_program(&cfg, &v, &ops);
        if named {
            p = CircuitProgram::new(header_of(&cfg));
            for _ in 0..6 {
                p.push(Instruction::Gate { gate: random_named(&mut rng), target: random_address(&mut rng, &cfg) });
            }
        }
        match measure {
            1 => p.push(Instruction::Measure { target: MeasureTarget::All, policy: Some(MeasurementPolicy::Argmax) }),
            2 => p.push(Instruction::Measure { target: MeasureTarget::One(random_address(&mut rng, &cfg)), policy: None }),
            _ => {}
        }
        let text = p.to_string();
        let back = parse_program(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(back, p);
    }
}
