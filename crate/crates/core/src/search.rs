//! Unstructured search with a single oracle query.
//!
//! The inputs occupy frequency qubits `1..=n` in uniform superposition and
//! the output bit sits on frequency qubit 0. After one oracle call the
//! `f0 = 1` projection holds exactly the solutions, each at amplitude
//! `2^{-n/2}`.

use num_complex::Complex64 as C64;
use rand::Rng;
use serde::Serialize;

use crate::config::{EncodingConfig, QubitAddress};
use crate::counters::ResourceCounters;
use crate::encoding::{EncodedState, SignalGrid};
use crate::error::{domain, QseResult};
use crate::gates::{apply_oracle, BooleanOracle};
use crate::measurement::collapse;
use crate::projection::project_frequency;
use crate::signal::SignalBuffer;

/// Largest oracle input count accepted by the search pipeline.
pub const MAX_SEARCH_INPUTS: usize = 12;

/// `2^{n/2} Π_{k=1..n} cos(ω_k t) e^{jω_0 t}` on an `(n + 1)`-frequency-qubit
/// grid: every input in uniform superposition, output qubit in `|0⟩`.
pub fn prepare_uniform(n_inputs: usize) -> QseResult<EncodedState> {
    if n_inputs == 0 || n_inputs > MAX_SEARCH_INPUTS {
        return domain(format!("search needs 1..={MAX_SEARCH_INPUTS} inputs, got {n_inputs}"));
    }
    let cfg = EncodingConfig::new(n_inputs + 1, 0, 0)?;
    let s_len = cfg.samples_per_slot();
    let amp = 2f64.powf(n_inputs as f64 / 2.0);
    let two_pi = std::f64::consts::TAU;
    let samples = (0..s_len)
        .map(|s| {
            let phase = |k: usize| two_pi * (((k as u128 * s as u128) % s_len as u128) as f64) / s_len as f64;
            let envelope: f64 = (1..=n_inputs).map(|k| phase(1 << k).cos()).product();
            C64::from_polar(amp * envelope, phase(1))
        })
        .collect();
    Ok(EncodedState {
        grid: SignalGrid {
            buffers: vec![SignalBuffer { samples, slot_offset: 0 }],
            n_signals: 1,
            n_slots: 1,
        },
        config: cfg,
        scale: 1.0,
        counters: ResourceCounters::default(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchResult {
    pub n_inputs: usize,
    pub solutions: Vec<usize>,
    pub count_estimate: usize,
    /// Energy of the `f0 = 1` projection.
    pub projection_norm_sq: f64,
    /// Energy of both projections together.
    pub total_norm_sq: f64,
    pub threshold: f64,
    /// Magnitude of each input's amplitude after selecting `f0 = 1`.
    pub magnitudes: Vec<f64>,
    pub counters: ResourceCounters,
}

fn estimate(n_inputs: usize, e1: f64, total: f64) -> QseResult<usize> {
    if !total.is_finite() || total <= 0.0 {
        return domain("oracle output has no energy");
    }
    Ok(((1u64 << n_inputs) as f64 * e1 / total).round() as usize)
}

fn check_noise(snr_db: Option<f64>) -> QseResult<()> {
    if let Some(v) = snr_db {
        if v.is_nan() || v == f64::NEG_INFINITY {
            return domain(format!("SNR {v} dB is not allowed"));
        }
    }
    Ok(())
}

fn oracle_state<R: Rng + ?Sized>(
    f: &BooleanOracle,
    snr_db: Option<f64>,
    rng: &mut R,
) -> QseResult<EncodedState> {
    check_noise(snr_db)?;
    let st = apply_oracle(&prepare_uniform(f.n_inputs())?, f, QubitAddress::freq(0))?;
    match snr_db {
        Some(v) => st.add_noise(v, rng),
        None => Ok(st),
    }
}

/// Number of solutions, read from the energy split of a single comb-filter
/// pass on the output qubit.
pub fn count_solutions<R: Rng + ?Sized>(
    f: &BooleanOracle,
    snr_db: Option<f64>,
    rng: &mut R,
) -> QseResult<(usize, ResourceCounters)> {
    let st = oracle_state(f, snr_db, rng)?;
    let pair = project_frequency(&st, 0)?;
    let (e0, e1) = (pair.proj0.energy(), pair.proj1.energy());
    let mut counters = st.counters.clone();
    counters.filters += pair.filters_applied;
    Ok((estimate(f.n_inputs(), e1, e0 + e1)?, counters))
}

/// Finds every solution: prepare, query once, keep the `f0 = 1` branch and
/// threshold each input's amplitude at half the ideal `2^{-n/2}`.
pub fn run_search<R: Rng + ?Sized>(
    f: &BooleanOracle,
    snr_db: Option<f64>,
    rng: &mut R,
) -> QseResult<SearchResult> {
    let st = oracle_state(f, snr_db, rng)?;
    let pair = project_frequency(&st, 0)?;
    let (e0, e1) = (pair.proj0.energy(), pair.proj1.energy());
    let branch = collapse(&st, QubitAddress::freq(0), 1)?;
    let magnitudes: Vec<f64> = branch.decode().iter().map(|a| a.norm()).collect();
    let threshold = 0.5 * 2f64.powf(-(f.n_inputs() as f64) / 2.0);
    let solutions = (0..magnitudes.len()).filter(|&x| magnitudes[x] > threshold).collect();
    let scale2 = st.scale * st.scale;
    Ok(SearchResult {
        n_inputs: f.n_inputs(),
        solutions,
        count_estimate: estimate(f.n_inputs(), e1, e0 + e1)?,
        projection_norm_sq: e1 * scale2,
        total_norm_sq: (e0 + e1) * scale2,
        threshold,
        magnitudes,
        counters: branch.counters,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::decode;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn uniform_state_has_flat_inputs_and_zero_output() {
        for n in 1..=5 {
            let st = prepare_uniform(n).unwrap();
            let amps = decode(&st);
            let expect = 2f64.powf(-(n as f64) / 2.0);
            for (idx, a) in amps.iter().enumerate() {
                let want = if idx & 1 == 0 { expect } else { 0.0 };
                assert!((a - C64::new(want, 0.0)).norm() < 1e-12, "n={n} idx={idx}");
            }
        }
    }

    #[test]
    fn uniform_signal_peaks_at_t0() {
        for n in 1..=6 {
            let st = prepare_uniform(n).unwrap();
            let v = st.grid.buffers[0].samples[0];
            assert!((v - C64::new(2f64.powf(n as f64 / 2.0), 0.0)).norm() < 1e-12);
            assert!((st.norm() - 1.0).abs() < 1e-12);
        }
        assert!(prepare_uniform(0).is_err());
        assert!(prepare_uniform(MAX_SEARCH_INPUTS + 1).is_err());
    }

    #[test]
    fn finds_planted_solutions() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let f = BooleanOracle::from_fn(4, |x| x == 6 || x == 9 || x == 15);
        let out = run_search(&f, None, &mut rng).unwrap();
        assert_eq!(out.solutions, vec![6, 9, 15]);
        assert_eq!(out.count_estimate, 3);
        assert_eq!(out.counters.oracle_calls, 1);
    }

    #[test]
    fn counting_uses_one_filter() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let f = BooleanOracle::from_fn(5, |x| x % 3 == 0);
        let (count, counters) = count_solutions(&f, None, &mut rng).unwrap();
        assert_eq!(count, f.popcount());
        assert_eq!(counters.filters, 1);
    }

    #[test]
    fn empty_and_full_tables() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let none = BooleanOracle::from_fn(3, |_| false);
        assert!(run_search(&none, None, &mut rng).unwrap().solutions.is_empty());
        let all = BooleanOracle::from_fn(3, |_| true);
        assert_eq!(run_search(&all, None, &mut rng).unwrap().solutions, (0..8).collect::<Vec<_>>());
    }

    #[test]
    fn high_snr_noise_keeps_answers() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let f = BooleanOracle::from_fn(4, |x| x == 3);
        let out = run_search(&f, Some(40.0), &mut rng).unwrap();
        assert_eq!(out.solutions, vec![3]);
        assert!(run_search(&f, Some(f64::NAN), &mut rng).is_err());
        assert!(run_search(&f, Some(f64::NEG_INFINITY), &mut rng).is_err());
    }
}
