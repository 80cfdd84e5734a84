//! The emulated state: a wavetrain of `L` slots, each holding `M` parallel
//! frequency-encoded signals.

use std::fmt::Write as _;
use std::ops::Deref;
use std::path::Path;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::config::EncodingConfig;
use crate::counters::ResourceCounters;
use crate::error::{domain, QseError, QseResult};
use crate::signal::{dft, idft_raw, time_shift, SignalBuffer, Spectrum};

/// Dense amplitudes in the `(x, y, z)` flat layout of
/// [`EncodingConfig::basis_index`].
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeVector(Vec<C64>);

impl AmplitudeVector {
    pub fn new(amps: Vec<C64>) -> QseResult<Self> {
        if amps.is_empty() || !amps.len().is_power_of_two() {
            return domain(format!("amplitude vector length {} is not a power of two", amps.len()));
        }
        if amps.iter().any(|a| !(a.re.is_finite() && a.im.is_finite())) {
            return domain("amplitude vector contains non-finite values");
        }
        Ok(AmplitudeVector(amps))
    }

    pub fn basis(config: &EncodingConfig, index: usize) -> QseResult<Self> {
        if index >= config.n_amplitudes() {
            return domain(format!("basis state {index} >= {}", config.n_amplitudes()));
        }
        let mut amps = vec![C64::new(0.0, 0.0); config.n_amplitudes()];
        amps[index] = C64::new(1.0, 0.0);
        Ok(AmplitudeVector(amps))
    }

    pub fn into_inner(self) -> Vec<C64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &[C64]) -> f64 {
        if self.0.len() != other.len() {
            return f64::INFINITY;
        }
        self.0.iter().zip(other).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

impl Deref for AmplitudeVector {
    type Target = [C64];

    fn deref(&self) -> &[C64] {
        &self.0
    }
}

/// `L × M` signal buffers stored slot-major: cell `(z, y)` lives at `z * M + y`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalGrid {
    pub buffers: Vec<SignalBuffer>,
    pub n_signals: usize,
    pub n_slots: usize,
}

impl SignalGrid {
    pub fn zeros(n_slots: usize, n_signals: usize, samples: usize) -> Self {
        let buffers = (0..n_slots * n_signals)
            .map(|cell| {
                let mut b = SignalBuffer::zeros(samples);
                b.slot_offset = cell / n_signals;
                b
            })
            .collect();
        SignalGrid { buffers, n_signals, n_slots }
    }

    pub fn cell(&self, z: usize, y: usize) -> usize {
        z * self.n_signals + y
    }

    pub fn get(&self, z: usize, y: usize) -> &SignalBuffer {
        &self.buffers[self.cell(z, y)]
    }

    /// Samplewise sum of two grids of the same shape.
    pub fn add(&self, other: &SignalGrid) -> SignalGrid {
        let buffers = self.buffers.par_iter().zip(other.buffers.par_iter()).map(|(a, b)| a.add(b)).collect();
        SignalGrid { buffers, n_signals: self.n_signals, n_slots: self.n_slots }
    }

    pub fn energy(&self) -> f64 {
        self.buffers.iter().map(SignalBuffer::mean_square).sum()
    }

    /// `Σ_cells ⟨a|b⟩`.
    pub fn inner_product(&self, other: &SignalGrid) -> QseResult<C64> {
        if self.buffers.len() != other.buffers.len() {
            return domain("inner product of grids with different shapes");
        }
        self.buffers.iter().zip(&other.buffers).map(|(a, b)| crate::signal::inner_product(a, b)).sum()
    }

    pub fn max_abs_diff(&self, other: &SignalGrid) -> f64 {
        self.buffers
            .iter()
            .zip(&other.buffers)
            .flat_map(|(a, b)| a.samples.iter().zip(&b.samples).map(|(p, q)| (p - q).norm()))
            .fold(0.0, f64::max)
    }
}

/// Full emulated state.
///
/// `scale` is a global positive amplitude factor applied at readout. The
/// counters accumulate the work done by every operation that produced this
/// state.
#[derive(Debug, Clone)]
pub struct EncodedState {
    pub grid: SignalGrid,
    pub config: EncodingConfig,
    pub scale: f64,
    pub counters: ResourceCounters,
}

pub(crate) fn buffer_spectrum(buffer: &SignalBuffer) -> Spectrum {
    // grid buffers always have power-of-two length >= 4
    dft(buffer).expect("grid buffer has power-of-two length")
}

pub(crate) fn buffer_from_spectrum(spectrum: &Spectrum, slot_offset: usize) -> SignalBuffer {
    SignalBuffer { samples: idft_raw(spectrum).expect("grid spectrum has power-of-two length"), slot_offset }
}

pub fn encode(amps: &AmplitudeVector, config: &EncodingConfig) -> QseResult<EncodedState> {
    config.validate()?;
    if amps.len() != config.n_amplitudes() {
        return domain(format!(
            "{} amplitudes supplied, configuration needs {}",
            amps.len(),
            config.n_amplitudes()
        ));
    }
    let (m, l, s_len) = (config.n_signals(), config.n_slots(), config.samples_per_slot());
    let buffers = (0..l * m)
        .into_par_iter()
        .map(|cell| {
            let (z, y) = (cell / m, cell % m);
            let mut spec = Spectrum::zeros(s_len);
            for x in 0..config.n_tones() {
                let a = amps[(x * m + y) * l + z];
                spec.set(config.harmonic_of(x), a).expect("tone below Nyquist");
            }
            let slot = buffer_from_spectrum(&spec, 0);
            time_shift(&slot, z)
        })
        .collect();
    Ok(EncodedState {
        grid: SignalGrid { buffers, n_signals: m, n_slots: l },
        config: *config,
        scale: 1.0,
        counters: ResourceCounters::default(),
    })
}

/// Reads every amplitude as `scale · ⟨φ_x | ψ_{y,z}⟩`, evaluated through the
/// DFT bin of the tone `φ_x`.
pub fn decode(state: &EncodedState) -> AmplitudeVector {
    let cfg = &state.config;
    let (m, l) = (cfg.n_signals(), cfg.n_slots());
    let per_cell: Vec<Vec<C64>> = state
        .grid
        .buffers
        .par_iter()
        .map(|b| {
            let spec = buffer_spectrum(b);
            (0..cfg.n_tones()).map(|x| spec.get(cfg.harmonic_of(x)) * state.scale).collect()
        })
        .collect();
    let mut amps = vec![C64::new(0.0, 0.0); cfg.n_amplitudes()];
    for (cell, tones) in per_cell.into_iter().enumerate() {
        let (z, y) = (cell / m, cell % m);
        for (x, a) in tones.into_iter().enumerate() {
            amps[(x * m + y) * l + z] = a;
        }
    }
    AmplitudeVector(amps)
}

pub fn norm(state: &EncodedState) -> f64 {
    state.grid.energy().sqrt() * state.scale
}

impl EncodedState {
    pub fn encode(amps: &AmplitudeVector, config: &EncodingConfig) -> QseResult<Self> {
        encode(amps, config)
    }

    pub fn basis(config: &EncodingConfig, index: usize) -> QseResult<Self> {
        encode(&AmplitudeVector::basis(config, index)?, config)
    }

    pub fn decode(&self) -> AmplitudeVector {
        decode(self)
    }

    pub fn norm(&self) -> f64 {
        norm(self)
    }

    /// Same configuration, scale and counters with a different signal grid.
    pub fn with_grid(&self, grid: SignalGrid) -> EncodedState {
        EncodedState { grid, config: self.config, scale: self.scale, counters: self.counters.clone() }
    }

    pub fn buffer(&self, z: usize, y: usize) -> QseResult<&SignalBuffer> {
        if z >= self.grid.n_slots || y >= self.grid.n_signals {
            return domain(format!(
                "signal (y={y}, z={z}) outside grid of {} signals x {} slots",
                self.grid.n_signals, self.grid.n_slots
            ));
        }
        Ok(self.grid.get(z, y))
    }

    pub fn spectrum(&self, z: usize, y: usize) -> QseResult<Spectrum> {
        dft(self.buffer(z, y)?)
    }

    /// Mean square over the whole grid with the scale applied.
    pub fn mean_power(&self) -> f64 {
        self.grid.energy() / self.grid.buffers.len() as f64 * self.scale * self.scale
    }

    /// Adds independent complex white noise to every buffer at `snr_db`
    /// relative to the grid's mean power.
    pub fn add_noise<R: rand::Rng + ?Sized>(&self, snr_db: f64, rng: &mut R) -> QseResult<Self> {
        let power = self.grid.energy() / self.grid.buffers.len() as f64;
        let buffers = self
            .grid
            .buffers
            .iter()
            .map(|b| crate::signal::add_noise_at_power(b, power, snr_db, rng))
            .collect::<QseResult<Vec<_>>>()?;
        Ok(self.with_grid(SignalGrid { buffers, n_signals: self.grid.n_signals, n_slots: self.grid.n_slots }))
    }

    /// Text snapshot: a `qse-state n m ell omega0 S scale` header followed by
    /// one `z,y,sample,re,im` line per sample, all reals at 17 significant
    /// digits so the round trip is bit-exact.
    pub fn to_snapshot(&self) -> String {
        let c = &self.config;
        let mut out = String::new();
        let _ = writeln!(
            out,
            "qse-state {} {} {} {:.16e} {} {:.16e}",
            c.n_freq,
            c.n_spatial,
            c.n_time,
            c.omega0,
            c.samples_per_slot(),
            self.scale
        );
        for z in 0..self.grid.n_slots {
            for y in 0..self.grid.n_signals {
                for (s, v) in self.grid.get(z, y).samples.iter().enumerate() {
                    let _ = writeln!(out, "{z},{y},{s},{:.16e},{:.16e}", v.re, v.im);
                }
            }
        }
        out
    }

    pub fn from_snapshot(text: &str) -> QseResult<Self> {
        Self::parse_snapshot(text).map_err(QseError::Domain)
    }

    fn parse_snapshot(text: &str) -> Result<Self, String> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or("empty snapshot")?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 7 || fields[0] != "qse-state" {
            return Err(format!("bad snapshot header {header:?}"));
        }
        let num = |i: usize| fields[i].parse::<usize>().map_err(|e| format!("header field {i}: {e}"));
        let real = |i: usize| fields[i].parse::<f64>().map_err(|e| format!("header field {i}: {e}"));
        let (n, m, ell, omega0, s_len, scale) = (num(1)?, num(2)?, num(3)?, real(4)?, num(5)?, real(6)?);
        let base = 2usize.checked_shl(n as u32).ok_or("frequency qubit count too large")?;
        if s_len % base != 0 {
            return Err(format!("sample count {s_len} is not a multiple of 2^(n+1)"));
        }
        let config =
            EncodingConfig { n_freq: n, n_spatial: m, n_time: ell, omega0, oversample: s_len / base };
        config.validate().map_err(|e| e.to_string())?;
        if !(scale.is_finite() && scale > 0.0) {
            return Err(format!("scale must be positive, got {scale}"));
        }
        let mut grid = SignalGrid::zeros(config.n_slots(), config.n_signals(), s_len);
        let mut seen = vec![false; config.n_slots() * config.n_signals() * s_len];
        for (lineno, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split(',').collect();
            if parts.len() != 5 {
                return Err(format!("line {}: expected 5 fields", lineno + 1));
            }
            let idx =
                |i: usize| parts[i].trim().parse::<usize>().map_err(|e| format!("line {}: {e}", lineno + 1));
            let val =
                |i: usize| parts[i].trim().parse::<f64>().map_err(|e| format!("line {}: {e}", lineno + 1));
            let (z, y, s) = (idx(0)?, idx(1)?, idx(2)?);
            if z >= config.n_slots() || y >= config.n_signals() || s >= s_len {
                return Err(format!("line {}: index out of range", lineno + 1));
            }
            let cell = grid.cell(z, y);
            let flat = cell * s_len + s;
            if seen[flat] {
                return Err(format!("line {}: duplicate sample", lineno + 1));
            }
            seen[flat] = true;
            grid.buffers[cell].samples[s] = C64::new(val(3)?, val(4)?);
        }
        if seen.iter().any(|&b| !b) {
            return Err("snapshot is missing samples".into());
        }
        Ok(EncodedState { grid, config, scale, counters: ResourceCounters::default() })
    }

    pub fn save(&self, path: &Path) -> QseResult<()> {
        std::fs::write(path, self.to_snapshot()).map_err(|e| QseError::io(path, e))
    }

    pub fn load(path: &Path) -> QseResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| QseError::io(path, e))?;
        Self::parse_snapshot(&text).map_err(|message| QseError::Format { path: path.to_path_buf(), message })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{inner_product, synth_basis};
    use crate::testutil::{four_tone_amps, random_amps};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_basis_state_is_fundamental_tone() {
        let cfg = EncodingConfig::new(1, 0, 0).unwrap();
        let amps = AmplitudeVector::new(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]).unwrap();
        let st = encode(&amps, &cfg).unwrap();
        let tone = synth_basis(0, &cfg).unwrap();
        assert!(st.grid.get(0, 0).samples.iter().zip(&tone.samples).all(|(a, b)| (a - b).norm() < 1e-12));
    }

    #[test]
    fn four_tone_spectrum_bins() {
        let cfg = EncodingConfig::new(2, 0, 0).unwrap();
        let amps = AmplitudeVector::new(four_tone_amps().to_vec()).unwrap();
        let st = encode(&amps, &cfg).unwrap();
        let spec = st.spectrum(0, 0).unwrap();
        for (k, a) in [(3, 0), (1, 1), (-1, 2), (-3, 3)] {
            assert!((spec.get(k) - amps[a]).norm() <= 1e-12);
        }
        let nonzero = spec.iter().filter(|(_, a)| a.norm() > 1e-12).count();
        assert_eq!(nonzero, 4);
        assert!(decode(&st).max_abs_diff(&amps) <= 1e-12);
    }

    #[test]
    fn layout_of_one_freq_one_spatial() {
        // amps (a, b, c, d) at flat indices (x, y) = (0,0), (0,1), (1,0), (1,1)
        let cfg = EncodingConfig::new(1, 1, 0).unwrap();
        let v: Vec<C64> = (1..=4).map(|k| C64::new(k as f64, -(k as f64))).collect();
        let st = encode(&AmplitudeVector::new(v.clone()).unwrap(), &cfg).unwrap();
        let phi0 = synth_basis(0, &cfg).unwrap();
        let phi1 = synth_basis(1, &cfg).unwrap();
        for y in 0..2 {
            let b = st.grid.get(0, y);
            assert!((inner_product(&phi0, b).unwrap() - v[y]).norm() < 1e-12);
            assert!((inner_product(&phi1, b).unwrap() - v[2 + y]).norm() < 1e-12);
        }
    }

    #[test]
    fn decode_matches_inner_product_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cfg = EncodingConfig::new(3, 1, 1).unwrap();
        let amps = random_amps(&mut rng, cfg.n_amplitudes());
        let st = encode(&amps, &cfg).unwrap();
        let fast = decode(&st);
        for idx in 0..cfg.n_amplitudes() {
            let (x, y, z) = cfg.split_index(idx);
            let slow = inner_product(&synth_basis(x, &cfg).unwrap(), st.grid.get(z, y)).unwrap();
            assert!((fast[idx] - slow).norm() <= 1e-12);
        }
    }

    #[test]
    fn norm_examples() {
        let cfg = EncodingConfig::new(2, 1, 0).unwrap();
        let mut v = vec![C64::new(0.0, 0.0); 8];
        v[0] = C64::new(2.0, 0.0);
        let st = encode(&AmplitudeVector::new(v).unwrap(), &cfg).unwrap();
        assert!((norm(&st) - 2.0).abs() < 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let amps = random_amps(&mut rng, 8);
        let st = encode(&amps, &cfg).unwrap();
        assert!((norm(&st) - decode(&st).norm()).abs() <= 1e-12);
    }

    #[test]
    fn slot_offsets_follow_time_index() {
        let cfg = EncodingConfig::new(1, 1, 2).unwrap();
        let st = EncodedState::basis(&cfg, 0).unwrap();
        for z in 0..4 {
            for y in 0..2 {
                assert_eq!(st.grid.get(z, y).slot_offset, z);
            }
        }
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let cfg = EncodingConfig::new(2, 0, 0).unwrap();
        let amps = AmplitudeVector::new(vec![C64::new(1.0, 0.0); 8]).unwrap();
        assert!(encode(&amps, &cfg).is_err());
        assert!(AmplitudeVector::new(vec![C64::new(1.0, 0.0); 3]).is_err());
    }

    #[test]
    fn snapshot_round_trip_is_bit_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let cfg = EncodingConfig::with_sampling(2, 1, 1, 3.7, 4).unwrap();
        let mut st = encode(&random_amps(&mut rng, cfg.n_amplitudes()), &cfg).unwrap();
        st.scale = 0.1 + std::f64::consts::PI;
        let text = st.to_snapshot();
        assert!(text.starts_with("qse-state 2 1 1 "));
        let back = EncodedState::from_snapshot(&text).unwrap();
        assert_eq!(back.config, st.config);
        assert_eq!(back.scale.to_bits(), st.scale.to_bits());
        assert_eq!(back.grid, st.grid);
    }

    #[test]
    fn snapshot_rejects_garbage() {
        assert!(EncodedState::from_snapshot("").is_err());
        assert!(EncodedState::from_snapshot("qse-state 1 0 0 1.0 8").is_err());
        assert!(EncodedState::from_snapshot("qse-state 1 0 0 1.0 8 1.0\n0,0,0,1,0\n").is_err());
    }
}
