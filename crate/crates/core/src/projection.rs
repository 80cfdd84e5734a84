//! Qubit-subspace decomposition for each encoding kind.
//!
//! Frequency qubits are separated with ideal comb filters realized as a DFT
//! bin partition: only bins on the tone grid pass, each to the half selected
//! by the sign of its qubit-`i` frequency term. Spatial and time qubits are
//! separated by grouping signals or slots whose index differs in one bit.

use rayon::prelude::*;

use crate::config::{EncodingConfig, QubitAddress, QubitKind};
use crate::encoding::{buffer_from_spectrum, buffer_spectrum, EncodedState, SignalGrid};
use crate::error::{domain, QseResult};
use crate::signal::Spectrum;

/// `Π_0ψ`, `Π_1ψ` and the demodulated partial projections `ψ_0`, `ψ_1` of one
/// frequency qubit, for every buffer of a grid.
#[derive(Debug, Clone)]
pub struct FreqProjectionPair {
    pub qubit: usize,
    pub proj0: SignalGrid,
    pub proj1: SignalGrid,
    pub partial0: SignalGrid,
    pub partial1: SignalGrid,
    /// Number of buffers run through a comb filter.
    pub filters_applied: u64,
}

/// The four components of a two-frequency-qubit projection, indexed by
/// `2a + b` where `a` is the bit of qubit `i` and `b` that of qubit `j`.
#[derive(Debug, Clone)]
pub struct FreqProjectionQuad {
    pub qubits: (usize, usize),
    pub proj: [SignalGrid; 4],
    pub partial: [SignalGrid; 4],
    pub filters_applied: u64,
}

/// Splits a spectrum into its on-grid `x_i = 0` and `x_i = 1` halves.
pub(crate) fn split_tones(spec: &Spectrum, cfg: &EncodingConfig, i: usize) -> (Spectrum, Spectrum) {
    let mut zero = Spectrum::zeros(spec.len());
    let mut one = Spectrum::zeros(spec.len());
    for x in 0..cfg.n_tones() {
        let k = cfg.harmonic_of(x);
        let dest = if x >> i & 1 == 0 { &mut zero } else { &mut one };
        dest.set(k, spec.get(k)).expect("tone inside band");
    }
    (zero, one)
}

/// Harmonic offset of the carrier `e^{±jω_i t}` for bit value `b`.
pub(crate) fn carrier(i: usize, b: usize) -> i64 {
    let w = 1i64 << i;
    if b == 0 {
        w
    } else {
        -w
    }
}

fn grid_like(state: &EncodedState, buffers: Vec<crate::signal::SignalBuffer>) -> SignalGrid {
    SignalGrid { buffers, n_signals: state.grid.n_signals, n_slots: state.grid.n_slots }
}

pub fn project_frequency(state: &EncodedState, i: usize) -> QseResult<FreqProjectionPair> {
    let cfg = &state.config;
    if i >= cfg.n_freq {
        return domain(format!("frequency qubit {i} out of range ({} qubits)", cfg.n_freq));
    }
    let parts: Vec<_> = state
        .grid
        .buffers
        .par_iter()
        .map(|b| {
            let (p0, p1) = split_tones(&buffer_spectrum(b), cfg, i);
            let d0 = p0.shifted(-carrier(i, 0));
            let d1 = p1.shifted(-carrier(i, 1));
            let off = b.slot_offset;
            [
                buffer_from_spectrum(&p0, off),
                buffer_from_spectrum(&p1, off),
                buffer_from_spectrum(&d0, off),
                buffer_from_spectrum(&d1, off),
            ]
        })
        .collect();
    let mut cols: [Vec<_>; 4] = Default::default();
    for [a, b, c, d] in parts {
        cols[0].push(a);
        cols[1].push(b);
        cols[2].push(c);
        cols[3].push(d);
    }
    let [p0, p1, d0, d1] = cols;
    Ok(FreqProjectionPair {
        qubit: i,
        proj0: grid_like(state, p0),
        proj1: grid_like(state, p1),
        partial0: grid_like(state, d0),
        partial1: grid_like(state, d1),
        filters_applied: state.grid.buffers.len() as u64,
    })
}

pub fn project_frequency_pair(state: &EncodedState, i: usize, j: usize) -> QseResult<FreqProjectionQuad> {
    let cfg = &state.config;
    if i == j {
        return domain(format!("pair projection needs distinct qubits, got {i} twice"));
    }
    if i >= cfg.n_freq || j >= cfg.n_freq {
        return domain(format!("frequency qubits ({i}, {j}) out of range ({} qubits)", cfg.n_freq));
    }
    let per_buffer: Vec<[[crate::signal::SignalBuffer; 2]; 4]> = state
        .grid
        .buffers
        .par_iter()
        .map(|b| {
            let (a0, a1) = split_tones(&buffer_spectrum(b), cfg, i);
            let off = b.slot_offset;
            let mut out: [[crate::signal::SignalBuffer; 2]; 4] = Default::default();
            for (a, half) in [(0, a0), (1, a1)] {
                let (b0, b1) = split_tones(&half, cfg, j);
                for (bb, comp) in [(0, b0), (1, b1)] {
                    let demod = comp.shifted(-(carrier(i, a) + carrier(j, bb)));
                    out[2 * a + bb] = [buffer_from_spectrum(&comp, off), buffer_from_spectrum(&demod, off)];
                }
            }
            out
        })
        .collect();
    let mut proj: [Vec<_>; 4] = Default::default();
    let mut partial: [Vec<_>; 4] = Default::default();
    for comps in per_buffer {
        for (c, [p, d]) in comps.into_iter().enumerate() {
            proj[c].push(p);
            partial[c].push(d);
        }
    }
    Ok(FreqProjectionQuad {
        qubits: (i, j),
        proj: proj.map(|v| grid_like(state, v)),
        partial: partial.map(|v| grid_like(state, v)),
        filters_applied: 3 * state.grid.buffers.len() as u64,
    })
}

/// `(Π_0ψ, Π_1ψ, filters)` for a qubit of any kind. Spatial and time
/// projections keep the full grid shape with the non-matching cells zeroed.
pub fn project_qubit(state: &EncodedState, addr: QubitAddress) -> QseResult<(SignalGrid, SignalGrid, u64)> {
    state.config.check(addr)?;
    let m = state.config.n_signals();
    let bit = |cell: usize| match addr.kind {
        QubitKind::Spatial => (cell % m) >> addr.index & 1,
        _ => (cell / m) >> addr.index & 1,
    };
    match addr.kind {
        QubitKind::Frequency => {
            let pair = project_frequency(state, addr.index)?;
            Ok((pair.proj0, pair.proj1, pair.filters_applied))
        }
        QubitKind::Spatial | QubitKind::Time => {
            let keep = |b: usize| {
                let buffers = state
                    .grid
                    .buffers
                    .iter()
                    .enumerate()
                    .map(|(cell, buf)| {
                        if bit(cell) == b {
                            buf.clone()
                        } else {
                            crate::signal::SignalBuffer {
                                samples: vec![Default::default(); buf.len()],
                                slot_offset: buf.slot_offset,
                            }
                        }
                    })
                    .collect();
                grid_like(state, buffers)
            };
            Ok((keep(0), keep(1), 0))
        }
    }
}

/// Index pairs `(v0, v1)` over `0..2^bits` that differ only in bit `i`,
/// ordered by `v0`.
pub fn bit_pairs(bits: usize, i: usize) -> Vec<(usize, usize)> {
    let mask = 1usize << i;
    (0..1usize << bits).filter(|v| v & mask == 0).map(|v| (v, v | mask)).collect()
}

pub fn spatial_groups(config: &EncodingConfig, i: usize) -> QseResult<Vec<(usize, usize)>> {
    if i >= config.n_spatial {
        return domain(format!("spatial qubit {i} out of range ({} qubits)", config.n_spatial));
    }
    Ok(bit_pairs(config.n_spatial, i))
}

pub fn time_groups(config: &EncodingConfig, i: usize) -> QseResult<Vec<(usize, usize)>> {
    if i >= config.n_time {
        return domain(format!("time qubit {i} out of range ({} qubits)", config.n_time));
    }
    Ok(bit_pairs(config.n_time, i))
}

/// Staged adjacent transpositions that reorder `M = 2^m` signals so that
/// `target_qubit` becomes the most significant bit of the position index.
///
/// Each stage is a set of disjoint `(p, p + 1)` position swaps. After the
/// forward pass the lower half of the positions holds every `y` with
/// `y_i = 0` in ascending order and the upper half every `y` with `y_i = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwapSchedule {
    pub stages: Vec<Vec<(usize, usize)>>,
    pub target_qubit: usize,
    pub n_qubits: usize,
}

impl SwapSchedule {
    pub fn stage_count(&self) -> usize {
        self.stages.len()
    }

    pub fn swap_count(&self) -> usize {
        self.stages.iter().map(Vec::len).sum()
    }

    pub fn apply<T>(&self, order: &mut [T]) {
        for stage in &self.stages {
            for &(p, q) in stage {
                order.swap(p, q);
            }
        }
    }

    /// The inverse pass: stages in reverse order.
    pub fn undo<T>(&self, order: &mut [T]) {
        for stage in self.stages.iter().rev() {
            for &(p, q) in stage {
                order.swap(p, q);
            }
        }
    }

    /// Position-to-signal map after the forward pass.
    pub fn permutation(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..1usize << self.n_qubits).collect();
        self.apply(&mut order);
        order
    }
}

pub fn swap_schedule(m: usize, i: usize) -> QseResult<SwapSchedule> {
    if i >= m {
        return domain(format!("spatial qubit {i} out of range ({m} qubits)"));
    }
    let mut keys: Vec<u8> = (0..1usize << m).map(|y| (y >> i & 1) as u8).collect();
    let mut stages = Vec::new();
    loop {
        // every "1 then 0" boundary swaps at once; such pairs never overlap
        let stage: Vec<(usize, usize)> = (0..keys.len().saturating_sub(1))
            .filter(|&p| keys[p] == 1 && keys[p + 1] == 0)
            .map(|p| (p, p + 1))
            .collect();
        if stage.is_empty() {
            break;
        }
        for &(p, q) in &stage {
            keys.swap(p, q);
        }
        stages.push(stage);
    }
    Ok(SwapSchedule { stages, target_qubit: i, n_qubits: m })
}
