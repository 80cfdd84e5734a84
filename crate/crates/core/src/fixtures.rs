//! Reference data used by the examples, the CLI and the test suites.

use num_complex::Complex64 as C64;

/// A two-qubit state whose four amplitudes appear on harmonics
/// `+3, +1, -1, -3` of a frequency-encoded signal.
pub const FOUR_TONE_AMPLITUDES: [C64; 4] = [
    C64::new(-0.2518, 0.0766),
    C64::new(-0.1907, -0.1778),
    C64::new(-0.6936, 0.3228),
    C64::new(0.3389, -0.4032),
];
