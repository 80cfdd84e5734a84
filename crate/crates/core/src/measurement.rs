//! Projective readout of one qubit and the matching state collapse.
//!
//! Each outcome's level is the RMS of its projected signal over the whole
//! grid. The outcome probability is `v1² / (v0² + v1²)`. The collapsed state
//! keeps the selected projection at its projected magnitude; it is not
//! renormalized.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::{EncodingConfig, QubitAddress, QubitKind};
use crate::encoding::{buffer_from_spectrum, buffer_spectrum, EncodedState, SignalGrid};
use crate::error::{domain, QseError, QseResult};
use crate::projection::project_frequency;
use crate::signal::{SignalBuffer, Spectrum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasurementPolicy {
    /// Sample the outcome with probability `p1`.
    #[default]
    Born,
    /// Pick the larger level; ties read 0.
    Argmax,
}

impl fmt::Display for MeasurementPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MeasurementPolicy::Born => "born",
            MeasurementPolicy::Argmax => "argmax",
        })
    }
}

impl FromStr for MeasurementPolicy {
    type Err = QseError;

    fn from_str(s: &str) -> QseResult<Self> {
        match s {
            "born" => Ok(MeasurementPolicy::Born),
            "argmax" => Ok(MeasurementPolicy::Argmax),
            other => domain(format!("unknown measurement policy {other:?}")),
        }
    }
}

/// Levels `v0`, `v1` of the two outcomes of one qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitLevels {
    pub v0: f64,
    pub v1: f64,
}

impl QubitLevels {
    pub(crate) fn from_energies(e0: f64, e1: f64, scale: f64, cells: usize) -> Self {
        let c = cells as f64;
        QubitLevels { v0: scale * (e0 / c).sqrt(), v1: scale * (e1 / c).sqrt() }
    }

    pub fn p1(&self) -> QseResult<f64> {
        let total = self.v0 * self.v0 + self.v1 * self.v1;
        if !total.is_finite() || total <= 0.0 {
            return domain("cannot measure a state with zero or non-finite norm");
        }
        Ok(self.v1 * self.v1 / total)
    }

    /// Picks an outcome under `policy`. Born sampling draws one `u` in `[0, 1)`
    /// and reads 1 when `u < p1`.
    pub fn choose<R: Rng + ?Sized>(&self, policy: MeasurementPolicy, rng: &mut R) -> QseResult<u8> {
        let p1 = self.p1()?;
        Ok(match policy {
            MeasurementPolicy::Born => u8::from(rng.gen::<f64>() < p1),
            MeasurementPolicy::Argmax => u8::from(self.v1 > self.v0),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub addr: QubitAddress,
    pub outcome: u8,
    pub v0: f64,
    pub v1: f64,
    pub p1: f64,
    pub policy: MeasurementPolicy,
}

fn freq_collapse_spectrum(
    partial: &Spectrum,
    cfg: &EncodingConfig,
    new_cfg: &EncodingConfig,
    i: usize,
    b: usize,
) -> Spectrum {
    // partial_b carries tone x at harmonic k(x) - carrier(i, b); remap it to
    // the tone of x with bit i removed on the smaller grid
    let mut out = Spectrum::zeros(new_cfg.samples_per_slot());
    let low = (1usize << i) - 1;
    for xp in 0..new_cfg.n_tones() {
        let x = ((xp & !low) << 1) | (b << i) | (xp & low);
        let k = cfg.harmonic_of(x) - crate::projection::carrier(i, b);
        out.set(new_cfg.harmonic_of(xp), partial.get(k)).expect("tone inside band");
    }
    out
}

/// Removes bit `i` from `v`.
pub(crate) fn drop_bit(v: usize, i: usize) -> usize {
    let low = v & ((1usize << i) - 1);
    ((v >> (i + 1)) << i) | low
}

/// Levels of `addr` without collapsing.
pub fn qubit_levels(state: &EncodedState, addr: QubitAddress) -> QseResult<(QubitLevels, u64)> {
    state.config.check(addr)?;
    let cells = state.grid.buffers.len();
    let (e0, e1, filters) = match addr.kind {
        QubitKind::Frequency => {
            let pair = project_frequency(state, addr.index)?;
            (pair.proj0.energy(), pair.proj1.energy(), pair.filters_applied)
        }
        kind => {
            let (mut e0, mut e1) = (0.0, 0.0);
            for (cell, b) in state.grid.buffers.iter().enumerate() {
                let (z, y) = (cell / state.grid.n_signals, cell % state.grid.n_signals);
                let v = if kind == QubitKind::Spatial { y } else { z };
                if v >> addr.index & 1 == 0 {
                    e0 += b.mean_square();
                } else {
                    e1 += b.mean_square();
                }
            }
            (e0, e1, 0)
        }
    };
    Ok((QubitLevels::from_energies(e0, e1, state.scale, cells), filters))
}

/// Post-measurement state for a known outcome, on a configuration with the
/// measured qubit removed.
pub fn collapse(state: &EncodedState, addr: QubitAddress, outcome: u8) -> QseResult<EncodedState> {
    let cfg = &state.config;
    cfg.check(addr)?;
    if outcome > 1 {
        return domain(format!("outcome {outcome} is not a bit"));
    }
    let b = outcome as usize;
    let i = addr.index;
    let new_cfg = cfg.without_qubit(addr.kind);
    let mut counters = state.counters.clone();
    let (m, l) = (state.grid.n_signals, state.grid.n_slots);
    let grid = match addr.kind {
        QubitKind::Frequency => {
            let pair = project_frequency(state, i)?;
            counters.filters += pair.filters_applied;
            let partial = if b == 0 { &pair.partial0 } else { &pair.partial1 };
            let buffers = partial
                .buffers
                .iter()
                .map(|buf| {
                    let spec = buffer_spectrum(buf);
                    let out = freq_collapse_spectrum(&spec, cfg, &new_cfg, i, b);
                    buffer_from_spectrum(&out, buf.slot_offset)
                })
                .collect();
            SignalGrid { buffers, n_signals: m, n_slots: l }
        }
        QubitKind::Spatial => {
            let mut buffers = Vec::with_capacity(l * m / 2);
            for z in 0..l {
                for yp in 0..m / 2 {
                    let y = ((yp >> i) << (i + 1)) | (b << i) | (yp & ((1 << i) - 1));
                    buffers.push(state.grid.get(z, y).clone());
                }
            }
            SignalGrid { buffers, n_signals: m / 2, n_slots: l }
        }
        QubitKind::Time => {
            let mut buffers = Vec::with_capacity(l * m / 2);
            for zp in 0..l / 2 {
                let z = ((zp >> i) << (i + 1)) | (b << i) | (zp & ((1 << i) - 1));
                debug_assert_eq!(drop_bit(z, i), zp);
                for y in 0..m {
                    let src = state.grid.get(z, y);
                    buffers.push(SignalBuffer { samples: src.samples.clone(), slot_offset: zp });
                }
            }
            SignalGrid { buffers, n_signals: m, n_slots: l / 2 }
        }
    };
    Ok(EncodedState { grid, config: new_cfg, scale: state.scale, counters })
}

/// Measures one qubit: levels, outcome under `policy`, collapsed state.
pub fn measure<R: Rng + ?Sized>(
    state: &EncodedState,
    addr: QubitAddress,
    policy: MeasurementPolicy,
    rng: &mut R,
) -> QseResult<(MeasurementRecord, EncodedState)> {
    let (levels, filters) = qubit_levels(state, addr)?;
    let p1 = levels.p1()?;
    let outcome = levels.choose(policy, rng)?;
    // the collapse performs the same projection, counted once
    let next = collapse(state, addr, outcome)?;
    debug_assert_eq!(next.counters.filters, state.counters.filters + filters);
    let record = MeasurementRecord { addr, outcome, v0: levels.v0, v1: levels.v1, p1, policy };
    Ok((record, next))
}

/// Current address of an original qubit after the qubits in `removed` were
/// measured away.
pub fn remap_address(addr: QubitAddress, removed: &[QubitAddress]) -> QubitAddress {
    let shift = removed.iter().filter(|r| r.kind == addr.kind && r.index < addr.index).count();
    QubitAddress { kind: addr.kind, index: addr.index - shift }
}

/// Measures every qubit in `order` (addresses of the original configuration).
/// Defaults to most significant first when `order` is `None`.
pub fn measure_all<R: Rng + ?Sized>(
    state: &EncodedState,
    order: Option<&[QubitAddress]>,
    policy: MeasurementPolicy,
    rng: &mut R,
) -> QseResult<(Vec<MeasurementRecord>, EncodedState)> {
    let default_order = state.config.all_addresses();
    let order = order.unwrap_or(&default_order);
    let mut seen = Vec::with_capacity(order.len());
    for a in order {
        state.config.check(*a)?;
        if seen.contains(a) {
            return domain(format!("qubit {a} listed twice"));
        }
        seen.push(*a);
    }
    let mut current = state.clone();
    let mut records = Vec::with_capacity(order.len());
    let mut removed: Vec<QubitAddress> = Vec::new();
    for &a in order {
        let (mut rec, next) = measure(&current, remap_address(a, &removed), policy, rng)?;
        rec.addr = a;
        records.push(rec);
        removed.push(a);
        current = next;
    }
    Ok((records, current))
}

/// Joins outcomes into the basis index they select, reading each record's
/// address as a bit position of `config`.
pub fn outcomes_to_index(config: &EncodingConfig, records: &[MeasurementRecord]) -> QseResult<usize> {
    let mut index = 0usize;
    for r in records {
        index |= (r.outcome as usize) << config.bit_position(r.addr)?;
    }
    Ok(index)
}

impl EncodedState {
    pub fn measure<R: Rng + ?Sized>(
        &self,
        addr: QubitAddress,
        policy: MeasurementPolicy,
        rng: &mut R,
    ) -> QseResult<(MeasurementRecord, EncodedState)> {
        measure(self, addr, policy, rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::{decode, encode, AmplitudeVector};
    use crate::testutil::random_amps;
    use num_complex::Complex64 as C64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn dense_levels(amps: &[C64], cfg: &EncodingConfig, addr: QubitAddress) -> (f64, f64) {
        let bit = cfg.bit_position(addr).unwrap();
        let (mut e0, mut e1) = (0.0, 0.0);
        for (idx, a) in amps.iter().enumerate() {
            if idx >> bit & 1 == 0 {
                e0 += a.norm_sqr();
            } else {
                e1 += a.norm_sqr();
            }
        }
        let c = (cfg.n_signals() * cfg.n_slots()) as f64;
        ((e0 / c).sqrt(), (e1 / c).sqrt())
    }

    fn dense_collapse(amps: &[C64], cfg: &EncodingConfig, addr: QubitAddress, b: usize) -> Vec<C64> {
        let bit = cfg.bit_position(addr).unwrap();
        (0..amps.len()).filter(|idx| idx >> bit & 1 == b).map(|idx| amps[idx]).collect()
    }

    #[test]
    fn levels_and_collapse_match_dense_arithmetic() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let cfg = EncodingConfig::new(2, 2, 1).unwrap();
        let amps = random_amps(&mut rng, 32);
        let st = encode(&amps, &cfg).unwrap();
        for addr in cfg.all_addresses() {
            let (lv, _) = qubit_levels(&st, addr).unwrap();
            let (d0, d1) = dense_levels(&amps, &cfg, addr);
            assert!((lv.v0 - d0).abs() < 1e-12 && (lv.v1 - d1).abs() < 1e-12, "{addr}");
            for b in 0..2 {
                let post = collapse(&st, addr, b as u8).unwrap();
                let expect = dense_collapse(&amps, &cfg, addr, b);
                assert_eq!(post.config.n_amplitudes(), expect.len());
                assert!(decode(&post).max_abs_diff(&expect) < 1e-12, "{addr} -> {b}");
            }
        }
    }

    #[test]
    fn collapsed_time_slots_are_reindexed() {
        let cfg = EncodingConfig::new(1, 0, 2).unwrap();
        let st = EncodedState::basis(&cfg, 3).unwrap();
        let post = collapse(&st, QubitAddress::time(0), 1).unwrap();
        let offsets: Vec<_> = post.grid.buffers.iter().map(|b| b.slot_offset).collect();
        assert_eq!(offsets, vec![0, 1]);
    }

    #[test]
    fn argmax_and_ties() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let l = QubitLevels { v0: 0.5, v1: 0.5 };
        assert_eq!(l.choose(MeasurementPolicy::Argmax, &mut rng).unwrap(), 0);
        let l = QubitLevels { v0: 0.1, v1: 0.5 };
        assert_eq!(l.choose(MeasurementPolicy::Argmax, &mut rng).unwrap(), 1);
        let z = QubitLevels { v0: 0.0, v1: 0.0 };
        assert!(z.choose(MeasurementPolicy::Born, &mut rng).is_err());
    }

    #[test]
    fn basis_state_is_measured_with_certainty() {
        let cfg = EncodingConfig::new(2, 1, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for idx in 0..cfg.n_amplitudes() {
            let st = EncodedState::basis(&cfg, idx).unwrap();
            let (recs, post) = measure_all(&st, None, MeasurementPolicy::Born, &mut rng).unwrap();
            assert_eq!(outcomes_to_index(&cfg, &recs).unwrap(), idx);
            assert_eq!(post.config.total_qubits(), 0);
            assert!((decode(&post)[0].norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn measure_all_in_custom_order() {
        let cfg = EncodingConfig::new(3, 0, 0).unwrap();
        let st = EncodedState::basis(&cfg, 0b101).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let order = [QubitAddress::freq(0), QubitAddress::freq(2), QubitAddress::freq(1)];
        let (recs, _) = measure_all(&st, Some(&order), MeasurementPolicy::Argmax, &mut rng).unwrap();
        let bits: Vec<u8> = recs.iter().map(|r| r.outcome).collect();
        assert_eq!(bits, vec![1, 1, 0]);
        assert!(measure_all(&st, Some(&[order[0], order[0]]), MeasurementPolicy::Born, &mut rng).is_err());
    }

    #[test]
    fn zero_state_is_a_domain_error() {
        let cfg = EncodingConfig::new(1, 0, 0).unwrap();
        let st = encode(&AmplitudeVector::new(vec![C64::new(0.0, 0.0); 2]).unwrap(), &cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(measure(&st, QubitAddress::freq(0), MeasurementPolicy::Born, &mut rng).is_err());
    }

    #[test]
    fn drop_bit_examples() {
        assert_eq!(drop_bit(0b1011, 1), 0b101);
        assert_eq!(drop_bit(0b1011, 0), 0b101);
        assert_eq!(drop_bit(0b1011, 3), 0b011);
    }

    #[test]
    fn policy_parsing() {
        assert_eq!("born".parse::<MeasurementPolicy>().unwrap(), MeasurementPolicy::Born);
        assert_eq!("argmax".parse::<MeasurementPolicy>().unwrap(), MeasurementPolicy::Argmax);
        assert!("max".parse::<MeasurementPolicy>().is_err());
    }
}
