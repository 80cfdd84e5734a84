//! Circuit files: parsing, printing and execution.

mod exec;
mod parser;
mod program;

pub use exec::{
    execute, Backend, BackendKind, Deviation, ExecOptions, MeasurementEntry, ReferenceBackend, RunReport,
    RunResult, SignalBackend,
};
pub use parser::{parse_angle, parse_complex, parse_program, parse_program_with, ParseError, ParseOptions};
pub use program::{
    CircuitProgram, GateName, GateSpec, Header, InitSpec, Instruction, MeasureTarget, OracleSpec, Statement,
};

use crate::encoding::EncodedState;
use crate::error::QseResult;

/// CSV of every DFT bin of signal `(y, z)`: `harmonic_index,real,imag`,
/// amplitudes scaled so a tone `a e^{jkω0t}` reads `a` at bin `k`.
pub fn spectrum_csv(state: &EncodedState, y: usize, z: usize) -> QseResult<String> {
    let spec = state.spectrum(z, y)?;
    let mut out = String::from("harmonic_index,real,imag\n");
    for (k, a) in spec.iter() {
        let a = a * state.scale;
        out.push_str(&format!("{k},{:e},{:e}\n", a.re, a.im));
    }
    Ok(out)
}

/// CSV of the samples of signal `(y, z)` on the absolute time axis:
/// `t_seconds,real,imag`.
pub fn time_series_csv(state: &EncodedState, y: usize, z: usize) -> QseResult<String> {
    let buf = state.buffer(z, y)?;
    let period = state.config.slot_duration();
    let s_len = buf.len() as f64;
    let mut out = String::from("t_seconds,real,imag\n");
    for (s, v) in buf.samples.iter().enumerate() {
        let t = (buf.slot_offset as f64 + s as f64 / s_len) * period;
        let v = v * state.scale;
        out.push_str(&format!("{t:e},{:e},{:e}\n", v.re, v.im));
    }
    Ok(out)
}
