//! Dense state-vector simulator over the same flat amplitude layout.
//!
//! Used as the ground truth for the signal backend: every operation here
//! works on amplitudes by index arithmetic only.

use num_complex::Complex64 as C64;
use rand::Rng;

use crate::config::{EncodingConfig, QubitAddress};
use crate::encoding::{AmplitudeVector, EncodedState};
use crate::error::{domain, QseResult};
use crate::gates::{BooleanOracle, Gate2};
use crate::measurement::{MeasurementPolicy, MeasurementRecord, QubitLevels};

#[derive(Debug, Clone, PartialEq)]
pub struct RefState {
    pub amps: Vec<C64>,
    pub config: EncodingConfig,
}

impl RefState {
    pub fn new(amps: &AmplitudeVector, config: &EncodingConfig) -> QseResult<Self> {
        config.validate()?;
        if amps.len() != config.n_amplitudes() {
            return domain(format!(
                "{} amplitudes supplied, configuration needs {}",
                amps.len(),
                config.n_amplitudes()
            ));
        }
        Ok(RefState { amps: amps.to_vec(), config: *config })
    }

    pub fn basis(config: &EncodingConfig, index: usize) -> QseResult<Self> {
        Self::new(&AmplitudeVector::basis(config, index)?, config)
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn apply_1q(&self, g: &Gate2, addr: QubitAddress) -> QseResult<Self> {
        let bit = self.config.bit_position(addr)?;
        let mut out = self.amps.clone();
        let mask = 1usize << bit;
        for i0 in (0..out.len()).filter(|i| i & mask == 0) {
            let i1 = i0 | mask;
            let (a0, a1) = (self.amps[i0], self.amps[i1]);
            out[i0] = g.u00 * a0 + g.u01 * a1;
            out[i1] = g.u10 * a0 + g.u11 * a1;
        }
        Ok(RefState { amps: out, config: self.config })
    }

    pub fn apply_controlled(&self, g: &Gate2, ctrl: QubitAddress, tgt: QubitAddress) -> QseResult<Self> {
        if ctrl == tgt {
            return domain(format!("control and target are both {ctrl}"));
        }
        let cbit = 1usize << self.config.bit_position(ctrl)?;
        let tbit = 1usize << self.config.bit_position(tgt)?;
        let mut out = self.amps.clone();
        for i0 in (0..out.len()).filter(|i| i & tbit == 0 && i & cbit != 0) {
            let i1 = i0 | tbit;
            let (a0, a1) = (self.amps[i0], self.amps[i1]);
            out[i0] = g.u00 * a0 + g.u01 * a1;
            out[i1] = g.u10 * a0 + g.u11 * a1;
        }
        Ok(RefState { amps: out, config: self.config })
    }

    /// `|x, b⟩ → |x, b ⊕ f(x)⟩` on frequency qubits, for every spatial and
    /// time index.
    pub fn apply_oracle(&self, f: &BooleanOracle) -> QseResult<Self> {
        if self.config.n_freq != f.n_inputs() + 1 {
            return domain(format!(
                "oracle on {} inputs needs {} frequency qubits, state has {}",
                f.n_inputs(),
                f.n_inputs() + 1,
                self.config.n_freq
            ));
        }
        let low = self.config.n_spatial + self.config.n_time;
        let mut out = self.amps.clone();
        for (idx, a) in self.amps.iter().enumerate() {
            let freq = idx >> low;
            if f.eval(freq >> 1) {
                out[idx ^ (1 << low)] = *a;
            }
        }
        Ok(RefState { amps: out, config: self.config })
    }

    pub fn levels(&self, addr: QubitAddress) -> QseResult<QubitLevels> {
        let bit = self.config.bit_position(addr)?;
        let (mut e0, mut e1) = (0.0, 0.0);
        for (idx, a) in self.amps.iter().enumerate() {
            if idx >> bit & 1 == 0 {
                e0 += a.norm_sqr();
            } else {
                e1 += a.norm_sqr();
            }
        }
        let cells = self.config.n_signals() * self.config.n_slots();
        Ok(QubitLevels::from_energies(e0, e1, 1.0, cells))
    }

    /// Keeps the amplitudes with the qubit equal to `outcome`, without
    /// renormalizing.
    pub fn collapse(&self, addr: QubitAddress, outcome: u8) -> QseResult<Self> {
        let bit = self.config.bit_position(addr)?;
        if outcome > 1 {
            return domain(format!("outcome {outcome} is not a bit"));
        }
        let amps = (0..self.amps.len())
            .filter(|idx| (idx >> bit & 1) as u8 == outcome)
            .map(|idx| self.amps[idx])
            .collect();
        Ok(RefState { amps, config: self.config.without_qubit(addr.kind) })
    }

    pub fn measure<R: Rng + ?Sized>(
        &self,
        addr: QubitAddress,
        policy: MeasurementPolicy,
        rng: &mut R,
    ) -> QseResult<(MeasurementRecord, Self)> {
        let levels = self.levels(addr)?;
        let p1 = levels.p1()?;
        let outcome = levels.choose(policy, rng)?;
        let next = self.collapse(addr, outcome)?;
        Ok((MeasurementRecord { addr, outcome, v0: levels.v0, v1: levels.v1, p1, policy }, next))
    }

    pub fn max_abs_diff(&self, other: &[C64]) -> f64 {
        if self.amps.len() != other.len() {
            return f64::INFINITY;
        }
        self.amps.iter().zip(other).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

/// Largest amplitude difference between a signal state and a dense state
/// on the same layout.
pub fn compare(state: &EncodedState, reference: &RefState) -> QseResult<f64> {
    if !state.config.same_layout(&reference.config) {
        return domain("compared states have different configurations");
    }
    Ok(reference.max_abs_diff(&state.decode()))
}
