#![allow(dead_code)]

use qse_core::circuit::{CircuitProgram, GateName, GateSpec, Header, InitSpec, Instruction, OracleSpec};
use qse_core::{
    AmplitudeVector, BooleanOracle, EncodedState, EncodingConfig, Gate2, QubitAddress, QubitKind, RefState,
    C64,
};
use rand::Rng;

pub const KINDS: [QubitKind; 3] = [QubitKind::Frequency, QubitKind::Spatial, QubitKind::Time];

#[derive(Debug, Clone)]
pub enum Op {
    Gate(Gate2, QubitAddress),
    Controlled(Gate2, QubitAddress, QubitAddress),
    Oracle(BooleanOracle),
}

pub fn random_amps<R: Rng>(rng: &mut R, len: usize) -> AmplitudeVector {
    let mut v: Vec<C64> =
        (0..len).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let n = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|a| *a /= n);
    AmplitudeVector::new(v).unwrap()
}

/// Random `(n, m, ℓ)` with `1 ≤ n` and `n + m + ℓ ≤ max_total`.
pub fn random_config<R: Rng>(rng: &mut R, max_total: usize) -> EncodingConfig {
    loop {
        let n = rng.gen_range(1..=max_total.min(5));
        let m = rng.gen_range(0..=3.min(max_total - n));
        let l = rng.gen_range(0..=3.min(max_total - n - m));
        if n + m + l <= max_total {
            return EncodingConfig::new(n, m, l).unwrap();
        }
    }
}

/// Haar-ish random unitary `e^{jα} Rz(β) Ry(γ) Rz(δ)`.
pub fn random_unitary<R: Rng>(rng: &mut R) -> Gate2 {
    let tau = std::f64::consts::TAU;
    let g = Gate2::rz(rng.gen_range(0.0..tau))
        .matmul(&Gate2::ry(rng.gen_range(0.0..tau)))
        .matmul(&Gate2::rz(rng.gen_range(0.0..tau)));
    let p = C64::from_polar(1.0, rng.gen_range(0.0..tau));
    Gate2 { u00: g.u00 * p, u01: g.u01 * p, u10: g.u10 * p, u11: g.u11 * p }
}

pub fn random_gate<R: Rng>(rng: &mut R) -> Gate2 {
    match rng.gen_range(0..8) {
        0 => Gate2::x(),
        1 => Gate2::h(),
        2 => Gate2::z(),
        3 => Gate2::t(),
        4 => Gate2::y(),
        _ => random_unitary(rng),
    }
}

pub fn random_address<R: Rng>(rng: &mut R, cfg: &EncodingConfig) -> QubitAddress {
    let all = cfg.all_addresses();
    all[rng.gen_range(0..all.len())]
}

pub fn random_circuit<R: Rng>(rng: &mut R, cfg: &EncodingConfig, depth: usize) -> Vec<Op> {
    let all = cfg.all_addresses();
    (0..depth)
        .map(|_| {
            let roll = rng.gen_range(0..20);
            if roll == 0 && cfg.n_freq >= 2 {
                let k = cfg.n_freq - 1;
                let table = (0..1usize << k).map(|_| rng.gen_bool(0.3)).collect();
                Op::Oracle(BooleanOracle::new(k, table).unwrap())
            } else if roll < 10 && all.len() >= 2 {
                let c = random_address(rng, cfg);
                let t = loop {
                    let t = random_address(rng, cfg);
                    if t != c {
                        break t;
                    }
                };
                Op::Controlled(random_gate(rng), c, t)
            } else {
                Op::Gate(random_gate(rng), random_address(rng, cfg))
            }
        })
        .collect()
}

pub fn run_signal(state: &EncodedState, ops: &[Op]) -> EncodedState {
    ops.iter().fold(state.clone(), |st, op| match op {
        Op::Gate(g, a) => st.apply_1q(g, *a).unwrap(),
        Op::Controlled(g, c, t) => st.apply_controlled(g, *c, *t).unwrap(),
        Op::Oracle(f) => st.apply_oracle(f).unwrap(),
    })
}

pub fn run_reference(state: &RefState, ops: &[Op]) -> RefState {
    ops.iter().fold(state.clone(), |st, op| match op {
        Op::Gate(g, a) => st.apply_1q(g, *a).unwrap(),
        Op::Controlled(g, c, t) => st.apply_controlled(g, *c, *t).unwrap(),
        Op::Oracle(f) => st.apply_oracle(f).unwrap(),
    })
}

pub fn header_of(cfg: &EncodingConfig) -> Header {
    Header {
        n_freq: cfg.n_freq,
        n_spatial: cfg.n_spatial,
        n_time: cfg.n_time,
        omega0_hz: None,
        oversample: None,
    }
}

/// Program form of a circuit, gates written as matrices.
pub fn to_program(cfg: &EncodingConfig, amps: &AmplitudeVector, ops: &[Op]) -> CircuitProgram {
    let mut p = CircuitProgram::new(header_of(cfg));
    p.push(Instruction::Init(InitSpec::Amps(amps.to_vec())));
    for op in ops {
        p.push(match op {
            Op::Gate(g, a) => Instruction::Gate { gate: GateSpec::Matrix(*g), target: *a },
            Op::Controlled(g, c, t) => {
                Instruction::Controlled { gate: GateSpec::Matrix(*g), ctrl: *c, target: *t }
            }
            Op::Oracle(f) => Instruction::Oracle(OracleSpec::Table(f.bits())),
        });
    }
    p
}

pub fn random_named<R: Rng>(rng: &mut R) -> GateSpec {
    let name = GateName::ALL[rng.gen_range(0..GateName::ALL.len())];
    let angle = name.takes_angle().then(|| rng.gen_range(-7.0..7.0));
    GateSpec::Named { name, angle }
}
