//! Single-qubit, controlled and oracle gates on signal states.
//!
//! Frequency qubits are driven in the DFT domain: a comb filter splits the
//! tones by qubit, demodulation and remodulation by `e^{±jω_i t}` are bin
//! translations by `±2^i` harmonics. Spatial qubits are mixed pairwise after
//! a swap network standardizes the signal order; time qubits are mixed
//! pairwise across slots.

use std::fmt;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::config::{EncodingConfig, QubitAddress, QubitKind};
use crate::encoding::{buffer_from_spectrum, buffer_spectrum, EncodedState, SignalGrid};
use crate::error::{domain, QseResult};
use crate::projection::{carrier, project_frequency, split_tones, swap_schedule, time_groups};
use crate::signal::{SignalBuffer, Spectrum};

/// A 2×2 complex matrix acting as `U|0⟩ = u00|0⟩ + u10|1⟩`,
/// `U|1⟩ = u01|0⟩ + u11|1⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gate2 {
    pub u00: C64,
    pub u01: C64,
    pub u10: C64,
    pub u11: C64,
}

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

impl Gate2 {
    pub const fn new(u00: C64, u01: C64, u10: C64, u11: C64) -> Self {
        Gate2 { u00, u01, u10, u11 }
    }

    pub fn identity() -> Self {
        Gate2::new(ONE, ZERO, ZERO, ONE)
    }

    pub fn x() -> Self {
        Gate2::new(ZERO, ONE, ONE, ZERO)
    }

    pub fn y() -> Self {
        Gate2::new(ZERO, C64::new(0.0, -1.0), C64::new(0.0, 1.0), ZERO)
    }

    pub fn z() -> Self {
        Gate2::new(ONE, ZERO, ZERO, -ONE)
    }

    pub fn h() -> Self {
        let r = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Gate2::new(r, r, r, -r)
    }

    pub fn s() -> Self {
        Gate2::phase(std::f64::consts::FRAC_PI_2)
    }

    pub fn t() -> Self {
        Gate2::phase(std::f64::consts::FRAC_PI_4)
    }

    pub fn phase(theta: f64) -> Self {
        Gate2::new(ONE, ZERO, ZERO, C64::from_polar(1.0, theta))
    }

    pub fn rx(theta: f64) -> Self {
        let (s, c) = (theta / 2.0).sin_cos();
        Gate2::new(C64::new(c, 0.0), C64::new(0.0, -s), C64::new(0.0, -s), C64::new(c, 0.0))
    }

    pub fn ry(theta: f64) -> Self {
        let (s, c) = (theta / 2.0).sin_cos();
        Gate2::new(C64::new(c, 0.0), C64::new(-s, 0.0), C64::new(s, 0.0), C64::new(c, 0.0))
    }

    pub fn rz(theta: f64) -> Self {
        Gate2::new(C64::from_polar(1.0, -theta / 2.0), ZERO, ZERO, C64::from_polar(1.0, theta / 2.0))
    }

    pub fn entries(&self) -> [C64; 4] {
        [self.u00, self.u01, self.u10, self.u11]
    }

    pub fn is_finite(&self) -> bool {
        self.entries().iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Matrix product `self · other` (apply `other` first).
    pub fn matmul(&self, other: &Gate2) -> Gate2 {
        Gate2::new(
            self.u00 * other.u00 + self.u01 * other.u10,
            self.u00 * other.u01 + self.u01 * other.u11,
            self.u10 * other.u00 + self.u11 * other.u10,
            self.u10 * other.u01 + self.u11 * other.u11,
        )
    }

    pub fn adjoint(&self) -> Gate2 {
        Gate2::new(self.u00.conj(), self.u10.conj(), self.u01.conj(), self.u11.conj())
    }

    /// Frobenius norm of `U†U - I`.
    pub fn unitarity_error(&self) -> f64 {
        let p = self.adjoint().matmul(self);
        let d = [p.u00 - ONE, p.u01, p.u10, p.u11 - ONE];
        d.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_unitary(&self) -> bool {
        self.unitarity_error() <= 1e-12
    }

    pub fn max_abs_diff(&self, other: &Gate2) -> f64 {
        self.entries().iter().zip(other.entries()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

/// A total Boolean function on `n_inputs` bits given by its truth table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BooleanOracle {
    n_inputs: usize,
    table: Vec<bool>,
}

impl BooleanOracle {
    pub fn new(n_inputs: usize, table: Vec<bool>) -> QseResult<Self> {
        if n_inputs >= usize::BITS as usize || table.len() != 1usize << n_inputs {
            return domain(format!("truth table of length {} does not match {n_inputs} inputs", table.len()));
        }
        Ok(BooleanOracle { n_inputs, table })
    }

    pub fn from_fn(n_inputs: usize, f: impl Fn(usize) -> bool) -> Self {
        BooleanOracle { n_inputs, table: (0..1usize << n_inputs).map(f).collect() }
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn eval(&self, x: usize) -> bool {
        self.table[x]
    }

    pub fn table(&self) -> &[bool] {
        &self.table
    }

    pub fn solutions(&self) -> Vec<usize> {
        (0..self.table.len()).filter(|&x| self.table[x]).collect()
    }

    pub fn popcount(&self) -> usize {
        self.table.iter().filter(|&&b| b).count()
    }

    /// Table as a string of `'0'`/`'1'`, row `x` at position `x`.
    pub fn bits(&self) -> String {
        self.table.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }

    pub fn from_bits(bits: &str) -> QseResult<Self> {
        let table = bits
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => domain(format!("truth table character {other:?} is not 0 or 1")),
            })
            .collect::<QseResult<Vec<_>>>()?;
        if table.is_empty() || !table.len().is_power_of_two() {
            return domain(format!("truth table length {} is not a power of two", table.len()));
        }
        let n = table.len().trailing_zeros() as usize;
        BooleanOracle::new(n, table)
    }

    /// Parses the truth-table file format: a first line `n=<k>` followed by
    /// `2^k` characters `'0'`/`'1'` (whitespace ignored).
    pub fn parse_table_file(text: &str) -> QseResult<Self> {
        let mut lines = text.lines();
        let header = lines.next().map(str::trim).unwrap_or_default();
        let n: usize = header
            .strip_prefix("n=")
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| crate::QseError::Domain(format!("expected \"n=<k>\" header, got {header:?}")))?;
        if n > 30 {
            return domain(format!("{n} oracle inputs is too many"));
        }
        let bits: String = lines.flat_map(|l| l.chars()).filter(|c| !c.is_whitespace()).collect();
        let oracle = Self::from_bits(&bits)?;
        if oracle.n_inputs != n {
            return domain(format!("header declares n={n} but table has {} rows", bits.len()));
        }
        Ok(oracle)
    }

    pub fn to_table_file(&self) -> String {
        format!("n={}\n{}\n", self.n_inputs, self.bits())
    }
}

impl fmt::Display for BooleanOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.bits())
    }
}

fn check_gate(gate: &Gate2) -> QseResult<()> {
    if !gate.is_finite() {
        return domain("gate has non-finite entries");
    }
    Ok(())
}

fn gate_label(ctrl: Option<QubitAddress>, tgt: QubitAddress) -> String {
    match ctrl {
        None => format!("u-{}", tgt.kind.name()),
        Some(c) => format!("cu-{}-{}", c.kind.name(), tgt.kind.name()),
    }
}

/// `(U00 e^{jω_i t} + U10 e^{-jω_i t}) ψ_0 + (U01 e^{jω_i t} + U11 e^{-jω_i t}) ψ_1`
/// evaluated on a spectrum.
fn freq_gate_spectrum(spec: &Spectrum, cfg: &EncodingConfig, i: usize, g: &Gate2) -> Spectrum {
    let (p0, p1) = split_tones(spec, cfg, i);
    let (up, down) = (carrier(i, 0), carrier(i, 1));
    let psi0 = p0.shifted(-up);
    let psi1 = p1.shifted(-down);
    let mut out = psi0.shifted(up).scaled(g.u00);
    out.add_assign(&psi0.shifted(down).scaled(g.u10));
    out.add_assign(&psi1.shifted(up).scaled(g.u01));
    out.add_assign(&psi1.shifted(down).scaled(g.u11));
    out
}

/// Frequency gate on the cells selected by `active`; other cells are cloned.
fn freq_gate_cells(
    state: &EncodedState,
    i: usize,
    g: &Gate2,
    active: impl Fn(usize, usize) -> bool + Sync,
) -> (SignalGrid, u64) {
    let m = state.grid.n_signals;
    let cfg = &state.config;
    let buffers: Vec<(SignalBuffer, bool)> = state
        .grid
        .buffers
        .par_iter()
        .enumerate()
        .map(|(cell, b)| {
            if active(cell / m, cell % m) {
                let out = freq_gate_spectrum(&buffer_spectrum(b), cfg, i, g);
                (buffer_from_spectrum(&out, b.slot_offset), true)
            } else {
                (b.clone(), false)
            }
        })
        .collect();
    let filters = buffers.iter().filter(|(_, f)| *f).count() as u64;
    let grid = SignalGrid {
        buffers: buffers.into_iter().map(|(b, _)| b).collect(),
        n_signals: m,
        n_slots: state.grid.n_slots,
    };
    (grid, filters)
}

/// Replaces each `(a, b)` cell pair by `(U00 a + U01 b, U10 a + U11 b)`.
fn mix_cell_pairs(grid: &SignalGrid, pairs: &[(usize, usize)], g: &Gate2) -> SignalGrid {
    let mixed: Vec<(SignalBuffer, SignalBuffer)> = pairs
        .par_iter()
        .map(|&(a, b)| {
            let (ba, bb) = (&grid.buffers[a], &grid.buffers[b]);
            (ba.combine(g.u00, bb, g.u01), bb.combine(g.u11, ba, g.u10))
        })
        .collect();
    let mut out = grid.clone();
    for (&(a, b), (na, nb)) in pairs.iter().zip(mixed) {
        out.buffers[a] = na;
        out.buffers[b] = nb;
    }
    out
}

/// Spatial mixing on qubit `i` through a swap network: reorder so qubit `i`
/// is most significant, mix lower-half/upper-half partners, undo the reorder.
fn spatial_mix(
    grid: &SignalGrid,
    cfg: &EncodingConfig,
    i: usize,
    g: &Gate2,
    active: impl Fn(usize, usize) -> bool,
    counters: &mut crate::counters::ResourceCounters,
) -> QseResult<SignalGrid> {
    let sched = swap_schedule(cfg.n_spatial, i)?;
    let mut order: Vec<usize> = (0..grid.n_signals).collect();
    sched.apply(&mut order);
    let half = grid.n_signals / 2;
    let mut pairs = Vec::with_capacity(grid.n_slots * half);
    for z in 0..grid.n_slots {
        for p in 0..half {
            let (y0, y1) = (order[p], order[p + half]);
            if active(z, y0) {
                pairs.push((grid.cell(z, y0), grid.cell(z, y1)));
            }
        }
    }
    let out = mix_cell_pairs(grid, &pairs, g);
    sched.undo(&mut order);
    debug_assert!(order.iter().enumerate().all(|(p, &y)| p == y));
    let moves = 2 * 2 * sched.swap_count() as u64 * grid.n_slots as u64;
    counters.swap_stages += 2 * sched.stage_count() as u64;
    counters.buffer_moves += moves;
    Ok(out)
}

/// Time mixing on qubit `i`: slot pairs `(z0, z1)` differing in bit `i`.
fn time_mix(
    grid: &SignalGrid,
    cfg: &EncodingConfig,
    i: usize,
    g: &Gate2,
    active: impl Fn(usize, usize) -> bool,
    counters: &mut crate::counters::ResourceCounters,
) -> QseResult<SignalGrid> {
    let mut pairs = Vec::new();
    for (z0, z1) in time_groups(cfg, i)? {
        for y in 0..grid.n_signals {
            if active(z0, y) {
                pairs.push((grid.cell(z0, y), grid.cell(z1, y)));
            }
        }
    }
    // each pair routes one copy of each slot across to its partner
    counters.buffer_moves += 2 * pairs.len() as u64;
    Ok(mix_cell_pairs(grid, &pairs, g))
}

fn control_bit(ctrl: QubitAddress, z: usize, y: usize) -> bool {
    match ctrl.kind {
        QubitKind::Spatial => y >> ctrl.index & 1 == 1,
        QubitKind::Time => z >> ctrl.index & 1 == 1,
        QubitKind::Frequency => unreachable!("frequency controls are handled by projection"),
    }
}

pub fn apply_1q(state: &EncodedState, gate: &Gate2, addr: QubitAddress) -> QseResult<EncodedState> {
    state.config.check(addr)?;
    check_gate(gate)?;
    let mut counters = state.counters.clone();
    let grid = match addr.kind {
        QubitKind::Frequency => {
            let (grid, filters) = freq_gate_cells(state, addr.index, gate, |_, _| true);
            counters.filters += filters;
            grid
        }
        QubitKind::Spatial => {
            spatial_mix(&state.grid, &state.config, addr.index, gate, |_, _| true, &mut counters)?
        }
        QubitKind::Time => {
            time_mix(&state.grid, &state.config, addr.index, gate, |_, _| true, &mut counters)?
        }
    };
    counters.count_gate(gate_label(None, addr));
    Ok(EncodedState { grid, config: state.config, scale: state.scale, counters })
}

pub fn apply_controlled(
    state: &EncodedState,
    gate: &Gate2,
    ctrl: QubitAddress,
    tgt: QubitAddress,
) -> QseResult<EncodedState> {
    if ctrl == tgt {
        return domain(format!("control and target are both {ctrl}"));
    }
    state.config.check(ctrl)?;
    state.config.check(tgt)?;
    check_gate(gate)?;
    let cfg = &state.config;
    let mut counters = state.counters.clone();
    let grid = match (ctrl.kind, tgt.kind) {
        (QubitKind::Frequency, QubitKind::Frequency) => {
            let (c, t) = (ctrl.index, tgt.index);
            let buffers = state
                .grid
                .buffers
                .par_iter()
                .map(|b| {
                    let (p0, p1) = split_tones(&buffer_spectrum(b), cfg, c);
                    let mut out = freq_gate_spectrum(&p1, cfg, t, gate);
                    out.add_assign(&p0);
                    buffer_from_spectrum(&out, b.slot_offset)
                })
                .collect();
            counters.filters += 2 * state.grid.buffers.len() as u64;
            SignalGrid { buffers, n_signals: state.grid.n_signals, n_slots: state.grid.n_slots }
        }
        (QubitKind::Frequency, _) => {
            let pair = project_frequency(state, ctrl.index)?;
            counters.filters += pair.filters_applied;
            let mixed = match tgt.kind {
                QubitKind::Spatial => {
                    spatial_mix(&pair.proj1, cfg, tgt.index, gate, |_, _| true, &mut counters)?
                }
                _ => time_mix(&pair.proj1, cfg, tgt.index, gate, |_, _| true, &mut counters)?,
            };
            pair.proj0.add(&mixed)
        }
        (_, QubitKind::Frequency) => {
            let (grid, filters) = freq_gate_cells(state, tgt.index, gate, |z, y| control_bit(ctrl, z, y));
            counters.filters += filters;
            grid
        }
        (_, QubitKind::Spatial) => {
            spatial_mix(&state.grid, cfg, tgt.index, gate, |z, y| control_bit(ctrl, z, y), &mut counters)?
        }
        (_, QubitKind::Time) => {
            time_mix(&state.grid, cfg, tgt.index, gate, |z, y| control_bit(ctrl, z, y), &mut counters)?
        }
    };
    counters.count_gate(gate_label(Some(ctrl), tgt));
    Ok(EncodedState { grid, config: state.config, scale: state.scale, counters })
}

/// `U_f|x, b⟩ = |x, b ⊕ f(x)⟩` with the inputs on frequency qubits
/// `1..=n_inputs` and the output bit on frequency qubit 0.
///
/// Realized per buffer as a spectral permutation: for every `x` with
/// `f(x) = 1` the tones of `(x, 0)` and `(x, 1)` trade places.
pub fn apply_oracle(
    state: &EncodedState,
    f: &BooleanOracle,
    out_qubit: QubitAddress,
) -> QseResult<EncodedState> {
    let cfg = &state.config;
    if out_qubit != QubitAddress::freq(0) {
        return domain(format!("oracle output must be frequency qubit 0, got {out_qubit}"));
    }
    if cfg.n_freq != f.n_inputs() + 1 {
        return domain(format!(
            "oracle on {} inputs needs {} frequency qubits, state has {}",
            f.n_inputs(),
            f.n_inputs() + 1,
            cfg.n_freq
        ));
    }
    let solutions = f.solutions();
    let buffers = state
        .grid
        .buffers
        .par_iter()
        .map(|b| {
            let mut spec = buffer_spectrum(b);
            for &x in &solutions {
                let (k0, k1) = (cfg.harmonic_of(2 * x), cfg.harmonic_of(2 * x + 1));
                let (a0, a1) = (spec.get(k0), spec.get(k1));
                spec.set(k0, a1).expect("tone inside band");
                spec.set(k1, a0).expect("tone inside band");
            }
            buffer_from_spectrum(&spec, b.slot_offset)
        })
        .collect();
    let mut counters = state.counters.clone();
    counters.oracle_calls += 1;
    Ok(EncodedState {
        grid: SignalGrid { buffers, n_signals: state.grid.n_signals, n_slots: state.grid.n_slots },
        config: state.config,
        scale: state.scale,
        counters,
    })
}

impl EncodedState {
    pub fn apply_1q(&self, gate: &Gate2, addr: QubitAddress) -> QseResult<Self> {
        apply_1q(self, gate, addr)
    }

    pub fn apply_controlled(&self, gate: &Gate2, ctrl: QubitAddress, tgt: QubitAddress) -> QseResult<Self> {
        apply_controlled(self, gate, ctrl, tgt)
    }

    pub fn apply_oracle(&self, f: &BooleanOracle) -> QseResult<Self> {
        apply_oracle(self, f, QubitAddress::freq(0))
    }
}
