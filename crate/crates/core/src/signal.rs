//! Sampled complex signals over one time slot `[0, T)`.
//!
//! A slot holds `S` uniformly spaced samples at `t_s = s T / S`. Every basis
//! tone is an integer harmonic of `omega0` below Nyquist, so the discrete
//! inner product and the DFT are exact for encoded states.

use std::cell::RefCell;
use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use rustfft::{Fft, FftPlanner};

use crate::config::EncodingConfig;
use crate::error::{domain, QseResult};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn forward_plan(len: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(len))
}

fn inverse_plan(len: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(len))
}

/// One complex signal over a single slot.
///
/// `slot_offset` is the number of whole slot durations the signal has been
/// delayed by (see [`time_shift`]).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SignalBuffer {
    pub samples: Vec<C64>,
    pub slot_offset: usize,
}

impl SignalBuffer {
    pub fn zeros(len: usize) -> Self {
        SignalBuffer { samples: vec![C64::new(0.0, 0.0); len], slot_offset: 0 }
    }

    pub fn from_samples(samples: Vec<C64>) -> Self {
        SignalBuffer { samples, slot_offset: 0 }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// `(1/S) Σ |s|²`.
    pub fn mean_square(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        self.samples.iter().map(|s| s.norm_sqr()).sum::<f64>() / self.samples.len() as f64
    }

    pub fn rms(&self) -> f64 {
        self.mean_square().sqrt()
    }

    pub fn scaled(&self, c: C64) -> SignalBuffer {
        SignalBuffer { samples: self.samples.iter().map(|s| s * c).collect(), slot_offset: self.slot_offset }
    }

    /// `a * self + b * other`, keeping this buffer's slot offset.
    pub fn combine(&self, a: C64, other: &SignalBuffer, b: C64) -> SignalBuffer {
        debug_assert_eq!(self.len(), other.len());
        SignalBuffer {
            samples: self.samples.iter().zip(&other.samples).map(|(s, o)| a * s + b * o).collect(),
            slot_offset: self.slot_offset,
        }
    }

    pub fn add(&self, other: &SignalBuffer) -> SignalBuffer {
        self.combine(C64::new(1.0, 0.0), other, C64::new(1.0, 0.0))
    }
}

/// DFT of a slot, indexed by signed harmonic `k` of omega0.
///
/// Bins cover `-S/2 <= k < S/2`. A tone `a·e^{jkω₀t}` appears as amplitude
/// `a` at bin `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    bins: Vec<C64>,
}

impl Spectrum {
    pub fn zeros(len: usize) -> Self {
        Spectrum { bins: vec![C64::new(0.0, 0.0); len] }
    }

    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    fn half(&self) -> i64 {
        (self.bins.len() / 2) as i64
    }

    pub fn min_harmonic(&self) -> i64 {
        -self.half()
    }

    pub fn max_harmonic(&self) -> i64 {
        self.half() - 1
    }

    fn slot(&self, k: i64) -> Option<usize> {
        let idx = k + self.half();
        (idx >= 0 && (idx as usize) < self.bins.len()).then_some(idx as usize)
    }

    /// Amplitude at harmonic `k`; zero outside the representable band.
    pub fn get(&self, k: i64) -> C64 {
        self.slot(k).map_or(C64::new(0.0, 0.0), |i| self.bins[i])
    }

    pub fn set(&mut self, k: i64, value: C64) -> QseResult<()> {
        match self.slot(k) {
            Some(i) => {
                self.bins[i] = value;
                Ok(())
            }
            None => domain(format!("harmonic {k} outside band of {} bins", self.bins.len())),
        }
    }

    /// `(k, amplitude)` pairs from the most negative harmonic upward.
    pub fn iter(&self) -> impl Iterator<Item = (i64, C64)> + '_ {
        let h = self.half();
        self.bins.iter().enumerate().map(move |(i, &a)| (i as i64 - h, a))
    }

    /// Multiplication of the time signal by `e^{j·delta·ω₀t}`: every bin moves
    /// up by `delta` harmonics. Content pushed outside the band is dropped.
    pub fn shifted(&self, delta: i64) -> Spectrum {
        let mut out = Spectrum::zeros(self.bins.len());
        for (k, a) in self.iter() {
            if let Some(i) = out.slot(k + delta) {
                out.bins[i] = a;
            }
        }
        out
    }

    pub fn scaled(&self, c: C64) -> Spectrum {
        Spectrum { bins: self.bins.iter().map(|a| a * c).collect() }
    }

    pub fn add_assign(&mut self, other: &Spectrum) {
        for (a, b) in self.bins.iter_mut().zip(&other.bins) {
            *a += b;
        }
    }

    /// `Σ |a_k|²`, equal to the mean square of the time signal.
    pub fn energy(&self) -> f64 {
        self.bins.iter().map(|a| a.norm_sqr()).sum()
    }
}

/// Basis tone `φ_x(t) = exp(j Ω_x t)` with `Ω_x = Σ_i (-1)^{x_i} 2^i ω₀`.
pub fn synth_basis(x: usize, config: &EncodingConfig) -> QseResult<SignalBuffer> {
    if x >= config.n_tones() {
        return domain(format!("basis index {x} >= {}", config.n_tones()));
    }
    let s_len = config.samples_per_slot();
    let k = config.harmonic_of(x).rem_euclid(s_len as i64) as usize;
    let samples = (0..s_len)
        .map(|s| {
            // reduce the phase index first so large s·k stays exact
            let m = (k * s) % s_len;
            C64::from_polar(1.0, TAU * m as f64 / s_len as f64)
        })
        .collect();
    Ok(SignalBuffer::from_samples(samples))
}

/// `(1/S) Σ_s conj(a[s]) b[s]`.
pub fn inner_product(a: &SignalBuffer, b: &SignalBuffer) -> QseResult<C64> {
    if a.len() != b.len() {
        return domain(format!("inner product of buffers of length {} and {}", a.len(), b.len()));
    }
    if a.is_empty() {
        return domain("inner product of empty buffers");
    }
    let sum: C64 = a.samples.iter().zip(&b.samples).map(|(x, y)| x.conj() * y).sum();
    Ok(sum / a.len() as f64)
}

pub fn dft(buffer: &SignalBuffer) -> QseResult<Spectrum> {
    let len = buffer.len();
    if len < 2 || !len.is_power_of_two() {
        return domain(format!("DFT length {len} is not a power of two >= 2"));
    }
    let mut work = buffer.samples.clone();
    forward_plan(len).process(&mut work);
    let inv = 1.0 / len as f64;
    // natural FFT order holds k = 0..S/2-1 then -S/2..-1
    let half = len / 2;
    let mut bins = Vec::with_capacity(len);
    bins.extend(work[half..].iter().map(|a| a * inv));
    bins.extend(work[..half].iter().map(|a| a * inv));
    Ok(Spectrum { bins })
}

pub fn idft(spectrum: &Spectrum, config: &EncodingConfig) -> QseResult<SignalBuffer> {
    let len = spectrum.len();
    if len != config.samples_per_slot() {
        return domain(format!(
            "spectrum has {len} bins, configuration expects {}",
            config.samples_per_slot()
        ));
    }
    Ok(SignalBuffer::from_samples(idft_raw(spectrum)?))
}

pub(crate) fn idft_raw(spectrum: &Spectrum) -> QseResult<Vec<C64>> {
    let len = spectrum.len();
    if len < 2 || !len.is_power_of_two() {
        return domain(format!("DFT length {len} is not a power of two >= 2"));
    }
    let half = len / 2;
    let mut work = Vec::with_capacity(len);
    work.extend_from_slice(&spectrum.bins[half..]);
    work.extend_from_slice(&spectrum.bins[..half]);
    inverse_plan(len).process(&mut work);
    Ok(work)
}

/// `(S_z φ)(t) = φ(t - zT)`.
///
/// Every tone is `T`-periodic, so the samples of a delayed slot are unchanged;
/// the delay is carried in `slot_offset` and realized by the wavetrain layout.
pub fn time_shift(buffer: &SignalBuffer, z: usize) -> SignalBuffer {
    SignalBuffer { samples: buffer.samples.clone(), slot_offset: buffer.slot_offset + z }
}

/// Adds complex white Gaussian noise at `snr_db` relative to the buffer's own
/// mean-square power. `+inf` leaves the buffer untouched.
pub fn add_noise<R: Rng + ?Sized>(
    buffer: &SignalBuffer,
    snr_db: f64,
    rng: &mut R,
) -> QseResult<SignalBuffer> {
    add_noise_at_power(buffer, buffer.mean_square(), snr_db, rng)
}

/// Noise scaled against an externally supplied signal power.
pub fn add_noise_at_power<R: Rng + ?Sized>(
    buffer: &SignalBuffer,
    signal_power: f64,
    snr_db: f64,
    rng: &mut R,
) -> QseResult<SignalBuffer> {
    if snr_db.is_nan() || snr_db == f64::NEG_INFINITY {
        return domain(format!("invalid SNR {snr_db} dB"));
    }
    if snr_db == f64::INFINITY || signal_power == 0.0 {
        return Ok(buffer.clone());
    }
    let noise_power = signal_power / 10f64.powf(snr_db / 10.0);
    let sigma = (noise_power / 2.0).sqrt();
    let normal = Normal::new(0.0, sigma).map_err(|e| crate::QseError::Domain(e.to_string()))?;
    let samples =
        buffer.samples.iter().map(|s| s + C64::new(normal.sample(rng), normal.sample(rng))).collect();
    Ok(SignalBuffer { samples, slot_offset: buffer.slot_offset })
}
