//! Encoding configuration, qubit addressing and the flat amplitude layout.
//!
//! A basis ket is the triple `(x, y, z)` of frequency, spatial and time
//! indices. The flat index used by amplitude vectors puts the frequency group
//! in the most significant bits and the time group in the least significant
//! bits: `index = (x * M + y) * L + z`. Within every group bit `i` of the
//! group index is qubit `i` of that kind.

use std::f64::consts::TAU;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, QseResult};

/// Largest total qubit count accepted by [`EncodingConfig::new`].
pub const MAX_QUBITS: usize = 24;

/// Default oversampling factor of the sampling grid.
pub const DEFAULT_OVERSAMPLE: usize = 2;

/// Largest accepted oversampling factor.
pub const MAX_OVERSAMPLE: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EncodingConfig {
    /// Number of frequency qubits `n`.
    pub n_freq: usize,
    /// Number of spatial qubits `m`.
    pub n_spatial: usize,
    /// Number of time qubits `ℓ`.
    pub n_time: usize,
    /// Fundamental radian frequency in rad/s.
    pub omega0: f64,
    /// Samples per slot are `oversample * 2^(n_freq + 1)`.
    pub oversample: usize,
}

impl EncodingConfig {
    /// Configuration with `omega0 = 2π rad/s` and the default oversampling.
    pub fn new(n_freq: usize, n_spatial: usize, n_time: usize) -> QseResult<Self> {
        Self::with_sampling(n_freq, n_spatial, n_time, TAU, DEFAULT_OVERSAMPLE)
    }

    pub fn with_sampling(
        n_freq: usize,
        n_spatial: usize,
        n_time: usize,
        omega0: f64,
        oversample: usize,
    ) -> QseResult<Self> {
        let cfg = EncodingConfig { n_freq, n_spatial, n_time, omega0, oversample };
        cfg.validate()?;
        if cfg.total_qubits() == 0 {
            return domain("configuration must hold at least one qubit");
        }
        Ok(cfg)
    }

    /// Checks everything except the "at least one qubit" rule, which fully
    /// measured states are allowed to break.
    pub fn validate(&self) -> QseResult<()> {
        if !(self.omega0.is_finite() && self.omega0 > 0.0) {
            return domain(format!("omega0 must be finite and positive, got {}", self.omega0));
        }
        if self.oversample < 2 || self.oversample > MAX_OVERSAMPLE || !self.oversample.is_power_of_two() {
            return domain(format!(
                "oversample must be a power of two in [2, {MAX_OVERSAMPLE}], got {}",
                self.oversample
            ));
        }
        if self.total_qubits() > MAX_QUBITS {
            return domain(format!(
                "{} qubits requested, at most {MAX_QUBITS} supported",
                self.total_qubits()
            ));
        }
        Ok(())
    }

    pub fn total_qubits(&self) -> usize {
        self.n_freq.saturating_add(self.n_spatial).saturating_add(self.n_time)
    }

    /// `N = 2^n`, the number of tones per signal.
    pub fn n_tones(&self) -> usize {
        1 << self.n_freq
    }

    /// `M = 2^m`, the number of parallel signals.
    pub fn n_signals(&self) -> usize {
        1 << self.n_spatial
    }

    /// `L = 2^ℓ`, the number of time slots in the wavetrain.
    pub fn n_slots(&self) -> usize {
        1 << self.n_time
    }

    pub fn n_amplitudes(&self) -> usize {
        1 << self.total_qubits()
    }

    /// Sample count `S` of one slot.
    pub fn samples_per_slot(&self) -> usize {
        self.oversample << (self.n_freq + 1)
    }

    /// Slot duration `T = 2π / omega0` in seconds.
    pub fn slot_duration(&self) -> f64 {
        TAU / self.omega0
    }

    /// Radian frequency `ω_i = 2^i omega0` of frequency qubit `i`.
    pub fn qubit_omega(&self, i: usize) -> f64 {
        self.omega0 * (1u64 << i) as f64
    }

    /// Signed harmonic (multiple of omega0) carried by basis tone `x`:
    /// `Σ_i (-1)^{x_i} 2^i`, which equals `N - 1 - 2x`.
    pub fn harmonic_of(&self, x: usize) -> i64 {
        self.n_tones() as i64 - 1 - 2 * x as i64
    }

    /// Inverse of [`harmonic_of`](Self::harmonic_of) on the tone grid.
    pub fn tone_of_harmonic(&self, k: i64) -> Option<usize> {
        let offset = self.n_tones() as i64 - 1 - k;
        if offset < 0 || offset % 2 != 0 {
            return None;
        }
        let x = (offset / 2) as usize;
        (x < self.n_tones()).then_some(x)
    }

    pub fn basis_index(&self, x: usize, y: usize, z: usize) -> QseResult<usize> {
        if x >= self.n_tones() || y >= self.n_signals() || z >= self.n_slots() {
            return domain(format!(
                "basis ({x}, {y}, {z}) outside ({}, {}, {})",
                self.n_tones(),
                self.n_signals(),
                self.n_slots()
            ));
        }
        Ok((x * self.n_signals() + y) * self.n_slots() + z)
    }

    /// Splits a flat index into `(x, y, z)`.
    pub fn split_index(&self, index: usize) -> (usize, usize, usize) {
        let z = index & (self.n_slots() - 1);
        let y = (index >> self.n_time) & (self.n_signals() - 1);
        let x = index >> (self.n_time + self.n_spatial);
        (x, y, z)
    }

    /// Bit position of `addr` within the flat index.
    pub fn bit_position(&self, addr: QubitAddress) -> QseResult<usize> {
        self.check(addr)?;
        Ok(match addr.kind {
            QubitKind::Time => addr.index,
            QubitKind::Spatial => self.n_time + addr.index,
            QubitKind::Frequency => self.n_time + self.n_spatial + addr.index,
        })
    }

    pub fn qubits_of(&self, kind: QubitKind) -> usize {
        match kind {
            QubitKind::Frequency => self.n_freq,
            QubitKind::Spatial => self.n_spatial,
            QubitKind::Time => self.n_time,
        }
    }

    pub fn check(&self, addr: QubitAddress) -> QseResult<()> {
        let limit = self.qubits_of(addr.kind);
        if addr.index >= limit {
            return domain(format!("qubit {addr} out of range ({limit} {} qubits)", addr.kind.name()));
        }
        Ok(())
    }

    /// Configuration with one qubit of `kind` removed.
    pub(crate) fn without_qubit(&self, kind: QubitKind) -> Self {
        let mut cfg = *self;
        match kind {
            QubitKind::Frequency => cfg.n_freq -= 1,
            QubitKind::Spatial => cfg.n_spatial -= 1,
            QubitKind::Time => cfg.n_time -= 1,
        }
        cfg
    }

    /// True when both configurations describe the same sampled layout.
    pub fn same_layout(&self, other: &Self) -> bool {
        self.n_freq == other.n_freq
            && self.n_spatial == other.n_spatial
            && self.n_time == other.n_time
            && self.oversample == other.oversample
    }

    /// Every qubit address of the configuration, most significant first.
    pub fn all_addresses(&self) -> Vec<QubitAddress> {
        let mut out = Vec::with_capacity(self.total_qubits());
        for kind in [QubitKind::Frequency, QubitKind::Spatial, QubitKind::Time] {
            for i in (0..self.qubits_of(kind)).rev() {
                out.push(QubitAddress { kind, index: i });
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QubitKind {
    Frequency,
    Spatial,
    Time,
}

impl QubitKind {
    pub fn name(self) -> &'static str {
        match self {
            QubitKind::Frequency => "frequency",
            QubitKind::Spatial => "spatial",
            QubitKind::Time => "time",
        }
    }

    pub fn prefix(self) -> char {
        match self {
            QubitKind::Frequency => 'f',
            QubitKind::Spatial => 's',
            QubitKind::Time => 't',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QubitAddress {
    pub kind: QubitKind,
    pub index: usize,
}

impl QubitAddress {
    pub const fn freq(index: usize) -> Self {
        QubitAddress { kind: QubitKind::Frequency, index }
    }

    pub const fn spatial(index: usize) -> Self {
        QubitAddress { kind: QubitKind::Spatial, index }
    }

    pub const fn time(index: usize) -> Self {
        QubitAddress { kind: QubitKind::Time, index }
    }
}

impl fmt::Display for QubitAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.kind.prefix(), self.index)
    }
}
