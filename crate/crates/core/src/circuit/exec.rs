use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::program::{CircuitProgram, InitSpec, Instruction, MeasureTarget, OracleSpec};
use crate::config::{EncodingConfig, QubitAddress, QubitKind};
use crate::counters::ResourceCounters;
use crate::encoding::{encode, AmplitudeVector, EncodedState};
use crate::error::{domain, QseError, QseResult};
use crate::gates::{BooleanOracle, Gate2};
use crate::measurement::{remap_address, MeasurementPolicy, MeasurementRecord};
use crate::reference::RefState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    #[default]
    Signal,
    Reference,
    Both,
}

impl fmt::Display for BackendKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BackendKind::Signal => "signal",
            BackendKind::Reference => "reference",
            BackendKind::Both => "both",
        })
    }
}

impl FromStr for BackendKind {
    type Err = QseError;

    fn from_str(s: &str) -> QseResult<Self> {
        match s {
            "signal" => Ok(BackendKind::Signal),
            "reference" => Ok(BackendKind::Reference),
            "both" => Ok(BackendKind::Both),
            other => domain(format!("unknown backend {other:?}")),
        }
    }
}

/// One simulator the executor can drive.
pub trait Backend {
    fn name(&self) -> &'static str;
    fn config(&self) -> EncodingConfig;
    fn amplitudes(&self) -> Vec<C64>;
    fn apply_1q(&mut self, gate: &Gate2, addr: QubitAddress) -> QseResult<()>;
    fn apply_controlled(&mut self, gate: &Gate2, ctrl: QubitAddress, tgt: QubitAddress) -> QseResult<()>;
    fn apply_oracle(&mut self, f: &BooleanOracle) -> QseResult<()>;
    fn add_noise(&mut self, snr_db: f64, rng: &mut ChaCha8Rng) -> QseResult<()>;
    fn measure(
        &mut self,
        addr: QubitAddress,
        policy: MeasurementPolicy,
        rng: &mut ChaCha8Rng,
    ) -> QseResult<MeasurementRecord>;
}

pub struct SignalBackend {
    pub state: EncodedState,
}

impl Backend for SignalBackend {
    fn name(&self) -> &'static str {
        "signal"
    }

    fn config(&self) -> EncodingConfig {
        self.state.config
    }

    fn amplitudes(&self) -> Vec<C64> {
        self.state.decode().into_inner()
    }

    fn apply_1q(&mut self, gate: &Gate2, addr: QubitAddress) -> QseResult<()> {
        self.state = self.state.apply_1q(gate, addr)?;
        Ok(())
    }

    fn apply_controlled(&mut self, gate: &Gate2, ctrl: QubitAddress, tgt: QubitAddress) -> QseResult<()> {
        self.state = self.state.apply_controlled(gate, ctrl, tgt)?;
        Ok(())
    }

    fn apply_oracle(&mut self, f: &BooleanOracle) -> QseResult<()> {
        self.state = self.state.apply_oracle(f)?;
        Ok(())
    }

    fn add_noise(&mut self, snr_db: f64, rng: &mut ChaCha8Rng) -> QseResult<()> {
        self.state = self.state.add_noise(snr_db, rng)?;
        Ok(())
    }

    fn measure(
        &mut self,
        addr: QubitAddress,
        policy: MeasurementPolicy,
        rng: &mut ChaCha8Rng,
    ) -> QseResult<MeasurementRecord> {
        let (rec, next) = self.state.measure(addr, policy, rng)?;
        self.state = next;
        Ok(rec)
    }
}

pub struct ReferenceBackend {
    pub state: RefState,
}

impl Backend for ReferenceBackend {
    fn name(&self) -> &'static str {
        "reference"
    }

    fn config(&self) -> EncodingConfig {
        self.state.config
    }

    fn amplitudes(&self) -> Vec<C64> {
        self.state.amps.clone()
    }

    fn apply_1q(&mut self, gate: &Gate2, addr: QubitAddress) -> QseResult<()> {
        self.state = self.state.apply_1q(gate, addr)?;
        Ok(())
    }

    fn apply_controlled(&mut self, gate: &Gate2, ctrl: QubitAddress, tgt: QubitAddress) -> QseResult<()> {
        self.state = self.state.apply_controlled(gate, ctrl, tgt)?;
        Ok(())
    }

    fn apply_oracle(&mut self, f: &BooleanOracle) -> QseResult<()> {
        self.state = self.state.apply_oracle(f)?;
        Ok(())
    }

    /// The dense simulator models the ideal circuit and ignores noise.
    fn add_noise(&mut self, _snr_db: f64, _rng: &mut ChaCha8Rng) -> QseResult<()> {
        Ok(())
    }

    fn measure(
        &mut self,
        addr: QubitAddress,
        policy: MeasurementPolicy,
        rng: &mut ChaCha8Rng,
    ) -> QseResult<MeasurementRecord> {
        let (rec, next) = self.state.measure(addr, policy, rng)?;
        self.state = next;
        Ok(rec)
    }
}

#[derive(Debug, Clone, Default)]
pub struct ExecOptions {
    pub backend: BackendKind,
    pub seed: u64,
    /// Extra noise added to the signal state after every gate and oracle.
    pub noise_snr_db: Option<f64>,
    /// Accept non-unitary gates even when the program lacks the pragma.
    pub allow_nonunitary: bool,
    /// Directory that relative oracle paths are resolved against.
    pub base_dir: Option<PathBuf>,
    /// Keep a copy of the signal state just before the first measurement.
    pub capture_spectrum: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasurementEntry {
    pub step: usize,
    pub line: usize,
    pub addr: String,
    pub kind: QubitKind,
    pub index: usize,
    pub outcome: u8,
    pub v0: f64,
    pub v1: f64,
    pub p1: f64,
    pub policy: MeasurementPolicy,
    pub rng_seed: u64,
}

/// Signal-versus-reference comparison after one instruction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Deviation {
    pub step: usize,
    pub line: usize,
    pub max_abs_diff: f64,
    pub outcome_mismatch: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub backend: BackendKind,
    pub seed: u64,
    pub config: EncodingConfig,
    pub final_config: EncodingConfig,
    /// `[re, im]` pairs in flat index order; null once every qubit has been
    /// measured or above 2^16 amplitudes.
    pub final_amplitudes: Option<Vec<[f64; 2]>>,
    pub measurements: Vec<MeasurementEntry>,
    /// Present only when both backends ran.
    pub deviations: Option<Vec<Deviation>>,
    pub max_deviation: Option<f64>,
    pub counters: Option<ResourceCounters>,
    pub renormalized_on_collapse: bool,
    pub wall_time_seconds: f64,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn measurements_csv(&self) -> String {
        let mut out = String::from("step,kind,index,v0,v1,p1,outcome,policy,seed\n");
        for m in &self.measurements {
            out.push_str(&format!(
                "{},{},{},{:e},{:e},{:e},{},{},{}\n",
                m.step,
                m.kind.name(),
                m.index,
                m.v0,
                m.v1,
                m.p1,
                m.outcome,
                m.policy,
                m.rng_seed
            ));
        }
        out
    }
}

pub struct RunResult {
    pub report: RunReport,
    pub signal_state: Option<EncodedState>,
    pub reference_state: Option<RefState>,
    /// Signal state just before the first measurement, or at the end.
    pub spectrum_state: Option<EncodedState>,
}

const MAX_REPORTED_AMPLITUDES: usize = 1 << 16;

fn initial_amplitudes(init: Option<&InitSpec>, cfg: &EncodingConfig) -> QseResult<AmplitudeVector> {
    match init {
        None => AmplitudeVector::basis(cfg, 0),
        Some(InitSpec::Basis(k)) => AmplitudeVector::basis(cfg, *k),
        Some(InitSpec::Uniform) => {
            let n = cfg.n_amplitudes();
            AmplitudeVector::new(vec![C64::new(1.0 / (n as f64).sqrt(), 0.0); n])
        }
        Some(InitSpec::Amps(v)) => AmplitudeVector::new(v.clone()),
    }
}

fn load_oracle(spec: &OracleSpec, base: Option<&Path>) -> QseResult<BooleanOracle> {
    match spec {
        OracleSpec::Table(bits) => BooleanOracle::from_bits(bits),
        OracleSpec::File(p) => {
            let path = match base {
                Some(b) if p.is_relative() => b.join(p),
                _ => p.clone(),
            };
            let text = std::fs::read_to_string(&path).map_err(|e| QseError::io(&path, e))?;
            BooleanOracle::parse_table_file(&text)
                .map_err(|e| QseError::Format { path: path.clone(), message: e.to_string() })
        }
    }
}

struct Lane<B> {
    backend: B,
    rng: ChaCha8Rng,
    noise_rng: ChaCha8Rng,
}

impl<B: Backend> Lane<B> {
    fn new(backend: B, seed: u64) -> Self {
        Lane {
            backend,
            rng: ChaCha8Rng::seed_from_u64(seed),
            // noise draws must not shift the measurement stream
            noise_rng: ChaCha8Rng::seed_from_u64(seed ^ 0x9E37_79B9_7F4A_7C15),
        }
    }
}

fn step<B: Backend>(
    lane: &mut Lane<B>,
    instr: &Instruction,
    removed: &[QubitAddress],
    opts: &ExecOptions,
    allow_nonunitary: bool,
) -> QseResult<()> {
    let b = &mut lane.backend;
    let check = |g: &Gate2| -> QseResult<()> {
        if !allow_nonunitary && !g.is_unitary() {
            return domain(format!("gate is not unitary (|U^H U - I| = {:.3e})", g.unitarity_error()));
        }
        Ok(())
    };
    let mut gate_like = false;
    match instr {
        Instruction::Init(_) => {}
        Instruction::Gate { gate, target } => {
            let g = gate.matrix();
            check(&g)?;
            b.apply_1q(&g, remap_address(*target, removed))?;
            gate_like = true;
        }
        Instruction::Controlled { gate, ctrl, target } => {
            let g = gate.matrix();
            check(&g)?;
            b.apply_controlled(&g, remap_address(*ctrl, removed), remap_address(*target, removed))?;
            gate_like = true;
        }
        Instruction::Oracle(spec) => {
            let f = load_oracle(spec, opts.base_dir.as_deref())?;
            b.apply_oracle(&f)?;
            gate_like = true;
        }
        Instruction::Noise { snr_db } => b.add_noise(*snr_db, &mut lane.noise_rng)?,
        Instruction::Measure { .. } => unreachable!("measurements are expanded by the caller"),
    }
    if gate_like {
        if let Some(snr) = opts.noise_snr_db {
            b.add_noise(snr, &mut lane.noise_rng)?;
        }
    }
    Ok(())
}

fn measure_on<B: Backend>(
    lane: &mut Lane<B>,
    current: QubitAddress,
    original: QubitAddress,
    policy: MeasurementPolicy,
) -> QseResult<MeasurementRecord> {
    let mut r = lane.backend.measure(current, policy, &mut lane.rng)?;
    r.addr = original;
    Ok(r)
}

fn snapshot_signal(
    signal: Option<&Lane<SignalBackend>>,
    reference: Option<&Lane<ReferenceBackend>>,
) -> QseResult<EncodedState> {
    match (signal, reference) {
        (Some(s), _) => Ok(s.backend.state.clone()),
        (None, Some(r)) => {
            encode(&AmplitudeVector::new(r.backend.state.amps.clone())?, &r.backend.state.config)
        }
        (None, None) => unreachable!("at least one backend runs"),
    }
}

/// Runs a parsed program on the chosen backend(s).
pub fn execute(program: &CircuitProgram, opts: &ExecOptions) -> QseResult<RunResult> {
    let started = Instant::now();
    if let Some(v) = opts.noise_snr_db {
        if v.is_nan() || v == f64::NEG_INFINITY {
            return domain(format!("SNR {v} dB is not allowed"));
        }
    }
    let cfg = program.config()?;
    let init = program.statements.iter().find_map(|s| match &s.instruction {
        Instruction::Init(i) => Some(i),
        _ => None,
    });
    let amps = initial_amplitudes(init, &cfg)?;
    let allow_nonunitary = program.allow_nonunitary || opts.allow_nonunitary;

    let mut signal = match opts.backend {
        BackendKind::Signal | BackendKind::Both => {
            Some(Lane::new(SignalBackend { state: encode(&amps, &cfg)? }, opts.seed))
        }
        BackendKind::Reference => None,
    };
    let mut reference = match opts.backend {
        BackendKind::Reference | BackendKind::Both => {
            Some(Lane::new(ReferenceBackend { state: RefState::new(&amps, &cfg)? }, opts.seed))
        }
        BackendKind::Signal => None,
    };
    let mut spectrum_state: Option<EncodedState> = None;

    let mut removed: Vec<QubitAddress> = Vec::new();
    let mut measurements = Vec::new();
    let mut deviations = Vec::new();

    for (index, stmt) in program.statements.iter().enumerate() {
        let wrap = |e: QseError| QseError::Execution { index, line: stmt.line, source: Box::new(e) };
        let mut sig_recs = Vec::new();
        let mut ref_recs = Vec::new();
        match &stmt.instruction {
            Instruction::Measure { target, policy } => {
                if opts.capture_spectrum && spectrum_state.is_none() {
                    spectrum_state =
                        Some(snapshot_signal(signal.as_ref(), reference.as_ref()).map_err(wrap)?);
                }
                let policy = policy.unwrap_or_default();
                let targets: Vec<QubitAddress> = match target {
                    MeasureTarget::One(a) => vec![*a],
                    MeasureTarget::All => {
                        cfg.all_addresses().into_iter().filter(|a| !removed.contains(a)).collect()
                    }
                };
                for a in targets {
                    if removed.contains(&a) {
                        return Err(wrap(QseError::Domain(format!("{a} was already measured"))));
                    }
                    let current = remap_address(a, &removed);
                    if let Some(l) = signal.as_mut() {
                        sig_recs.push(measure_on(l, current, a, policy).map_err(wrap)?);
                    }
                    if let Some(l) = reference.as_mut() {
                        ref_recs.push(measure_on(l, current, a, policy).map_err(wrap)?);
                    }
                    removed.push(a);
                }
            }
            instr => {
                if let Some(l) = signal.as_mut() {
                    step(l, instr, &removed, opts, allow_nonunitary).map_err(wrap)?;
                }
                if let Some(l) = reference.as_mut() {
                    step(l, instr, &removed, opts, allow_nonunitary).map_err(wrap)?;
                }
            }
        }
        let primary = if signal.is_some() { &sig_recs } else { &ref_recs };
        for r in primary {
            measurements.push(MeasurementEntry {
                step: index,
                line: stmt.line,
                addr: r.addr.to_string(),
                kind: r.addr.kind,
                index: r.addr.index,
                outcome: r.outcome,
                v0: r.v0,
                v1: r.v1,
                p1: r.p1,
                policy: r.policy,
                rng_seed: opts.seed,
            });
        }
        if let (Some(s), Some(r)) = (signal.as_ref(), reference.as_ref()) {
            let a = s.backend.amplitudes();
            let b = r.backend.amplitudes();
            let diff = if a.len() == b.len() {
                a.iter().zip(&b).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max)
            } else {
                f64::INFINITY
            };
            let mismatch = sig_recs.iter().zip(&ref_recs).any(|(p, q)| p.outcome != q.outcome);
            deviations.push(Deviation {
                step: index,
                line: stmt.line,
                max_abs_diff: diff,
                outcome_mismatch: mismatch,
            });
        }
    }
    if opts.capture_spectrum && spectrum_state.is_none() {
        spectrum_state = Some(snapshot_signal(signal.as_ref(), reference.as_ref())?);
    }

    let (final_config, final_amps, counters) = match (signal.as_ref(), reference.as_ref()) {
        (Some(s), _) => (s.backend.config(), s.backend.amplitudes(), Some(s.backend.state.counters.clone())),
        (None, Some(r)) => (r.backend.config(), r.backend.amplitudes(), None),
        (None, None) => unreachable!("at least one backend runs"),
    };
    let signal_state = signal.map(|l| l.backend.state);
    let reference_state = reference.map(|l| l.backend.state);
    let max_deviation =
        (!deviations.is_empty()).then(|| deviations.iter().map(|d| d.max_abs_diff).fold(0.0, f64::max));
    let final_amplitudes = (final_config.total_qubits() > 0 && final_amps.len() <= MAX_REPORTED_AMPLITUDES)
        .then(|| final_amps.iter().map(|c| [c.re, c.im]).collect());
    let report = RunReport {
        backend: opts.backend,
        seed: opts.seed,
        config: cfg,
        final_config,
        final_amplitudes,
        measurements,
        deviations: (opts.backend == BackendKind::Both).then_some(deviations),
        max_deviation,
        counters,
        renormalized_on_collapse: false,
        wall_time_seconds: started.elapsed().as_secs_f64(),
    };
    Ok(RunResult { report, signal_state, reference_state, spectrum_state })
}
