//! Classical emulation of gate-based quantum computing on sampled signals.
//!
//! A register of `n` frequency, `m` spatial and `ℓ` time qubits is held as
//! `2^m` parallel complex baseband signals over `2^ℓ` consecutive time slots.
//! Each signal is a superposition of `2^n` tones on odd harmonics of a
//! fundamental `omega0`. Gates act on the signals through comb filters,
//! carrier (de)modulation, swap networks and slot routing.
//!
//! ```
//! use qse_core::{EncodingConfig, EncodedState, Gate2, QubitAddress};
//!
//! let cfg = EncodingConfig::new(2, 0, 0).unwrap();
//! let st = EncodedState::basis(&cfg, 0).unwrap();
//! let st = st.apply_1q(&Gate2::x(), QubitAddress::freq(1)).unwrap();
//! let amps = st.decode();
//! assert!((amps[2].re - 1.0).abs() < 1e-12);
//! ```

pub mod circuit;
pub mod config;
pub mod counters;
pub mod encoding;
pub mod error;
pub mod fixtures;
pub mod gates;
pub mod measurement;
pub mod projection;
pub mod reference;
pub mod search;
pub mod signal;

#[cfg(test)]
mod testutil;

pub use config::{EncodingConfig, QubitAddress, QubitKind};
pub use counters::ResourceCounters;
pub use encoding::{decode, encode, norm, AmplitudeVector, EncodedState, SignalGrid};
pub use error::{QseError, QseResult};
pub use gates::{apply_1q, apply_controlled, apply_oracle, BooleanOracle, Gate2};
pub use measurement::{collapse, measure, measure_all, MeasurementPolicy, MeasurementRecord};
pub use projection::{project_frequency, project_frequency_pair, swap_schedule, SwapSchedule};
pub use reference::RefState;
pub use search::{count_solutions, prepare_uniform, run_search, SearchResult};
pub use signal::{dft, idft, inner_product, synth_basis, time_shift, SignalBuffer, Spectrum};

pub use num_complex::Complex64 as C64;
