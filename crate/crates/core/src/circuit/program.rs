use std::fmt;
use std::path::PathBuf;

use num_complex::Complex64 as C64;

use crate::config::{EncodingConfig, QubitAddress, DEFAULT_OVERSAMPLE};
use crate::error::QseResult;
use crate::gates::Gate2;
use crate::measurement::MeasurementPolicy;

/// The `qubits` line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Header {
    pub n_freq: usize,
    pub n_spatial: usize,
    pub n_time: usize,
    pub omega0_hz: Option<f64>,
    pub oversample: Option<usize>,
}

impl Header {
    pub fn config(&self) -> QseResult<EncodingConfig> {
        let omega0 = self.omega0_hz.map_or(std::f64::consts::TAU, |hz| std::f64::consts::TAU * hz);
        EncodingConfig::with_sampling(
            self.n_freq,
            self.n_spatial,
            self.n_time,
            omega0,
            self.oversample.unwrap_or(DEFAULT_OVERSAMPLE),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateName {
    I,
    X,
    Y,
    Z,
    H,
    S,
    T,
    Rx,
    Ry,
    Rz,
    P,
}

impl GateName {
    pub const ALL: [GateName; 11] = [
        GateName::I,
        GateName::X,
        GateName::Y,
        GateName::Z,
        GateName::H,
        GateName::S,
        GateName::T,
        GateName::Rx,
        GateName::Ry,
        GateName::Rz,
        GateName::P,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            GateName::I => "I",
            GateName::X => "X",
            GateName::Y => "Y",
            GateName::Z => "Z",
            GateName::H => "H",
            GateName::S => "S",
            GateName::T => "T",
            GateName::Rx => "RX",
            GateName::Ry => "RY",
            GateName::Rz => "RZ",
            GateName::P => "P",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        GateName::ALL.into_iter().find(|g| g.as_str() == s)
    }

    pub fn takes_angle(self) -> bool {
        matches!(self, GateName::Rx | GateName::Ry | GateName::Rz | GateName::P)
    }
}

/// A gate as written in the program. Two specs are equal when they denote
/// the same matrix, so `X` and `[[0,1],[1,0]]` compare equal.
#[derive(Debug, Clone, Copy)]
pub enum GateSpec {
    Named { name: GateName, angle: Option<f64> },
    Matrix(Gate2),
}

impl GateSpec {
    pub fn matrix(&self) -> Gate2 {
        match *self {
            GateSpec::Matrix(g) => g,
            GateSpec::Named { name, angle } => {
                let a = angle.unwrap_or(0.0);
                match name {
                    GateName::I => Gate2::identity(),
                    GateName::X => Gate2::x(),
                    GateName::Y => Gate2::y(),
                    GateName::Z => Gate2::z(),
                    GateName::H => Gate2::h(),
                    GateName::S => Gate2::s(),
                    GateName::T => Gate2::t(),
                    GateName::Rx => Gate2::rx(a),
                    GateName::Ry => Gate2::ry(a),
                    GateName::Rz => Gate2::rz(a),
                    GateName::P => Gate2::phase(a),
                }
            }
        }
    }
}

impl PartialEq for GateSpec {
    fn eq(&self, other: &Self) -> bool {
        self.matrix() == other.matrix()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitSpec {
    Basis(usize),
    Uniform,
    Amps(Vec<C64>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum OracleSpec {
    /// Truth-table file, resolved against the program's directory.
    File(PathBuf),
    /// Inline table of `'0'`/`'1'` characters.
    Table(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeasureTarget {
    One(QubitAddress),
    All,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Instruction {
    Init(InitSpec),
    Gate { gate: GateSpec, target: QubitAddress },
    Controlled { gate: GateSpec, ctrl: QubitAddress, target: QubitAddress },
    Oracle(OracleSpec),
    Noise { snr_db: f64 },
    Measure { target: MeasureTarget, policy: Option<MeasurementPolicy> },
}

#[derive(Debug, Clone)]
pub struct Statement {
    pub instruction: Instruction,
    /// 1-based source line; zero for programs built in code.
    pub line: usize,
}

impl PartialEq for Statement {
    fn eq(&self, other: &Self) -> bool {
        self.instruction == other.instruction
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CircuitProgram {
    pub header: Header,
    pub allow_nonunitary: bool,
    pub statements: Vec<Statement>,
}

impl CircuitProgram {
    pub fn new(header: Header) -> Self {
        CircuitProgram { header, allow_nonunitary: false, statements: Vec::new() }
    }

    pub fn push(&mut self, instruction: Instruction) {
        self.statements.push(Statement { instruction, line: 0 });
    }

    pub fn config(&self) -> QseResult<EncodingConfig> {
        self.header.config()
    }
}

fn write_complex(f: &mut fmt::Formatter<'_>, c: C64) -> fmt::Result {
    write!(f, "{:?}{:+?}j", c.re, c.im)
}

impl fmt::Display for GateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateSpec::Named { name, angle: Some(a) } => write!(f, "{}({a:?})", name.as_str()),
            GateSpec::Named { name, angle: None } => f.write_str(name.as_str()),
            GateSpec::Matrix(g) => {
                f.write_str("[[")?;
                write_complex(f, g.u00)?;
                f.write_str(",")?;
                write_complex(f, g.u01)?;
                f.write_str("],[")?;
                write_complex(f, g.u10)?;
                f.write_str(",")?;
                write_complex(f, g.u11)?;
                f.write_str("]]")
            }
        }
    }
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instruction::Init(InitSpec::Basis(k)) => write!(f, "init basis {k}"),
            Instruction::Init(InitSpec::Uniform) => f.write_str("init uniform"),
            Instruction::Init(InitSpec::Amps(v)) => {
                f.write_str("init amps")?;
                for c in v {
                    f.write_str(" ")?;
                    write_complex(f, *c)?;
                }
                Ok(())
            }
            Instruction::Gate { gate, target } => write!(f, "gate {gate} {target}"),
            Instruction::Controlled { gate, ctrl, target } => {
                write!(f, "cgate {gate} {ctrl} {target}")
            }
            Instruction::Oracle(OracleSpec::File(p)) => write!(f, "oracle {}", p.display()),
            Instruction::Oracle(OracleSpec::Table(bits)) => write!(f, "oracle table {bits}"),
            Instruction::Noise { snr_db } => write!(f, "noise {snr_db:?}"),
            Instruction::Measure { target, policy } => {
                match target {
                    MeasureTarget::One(a) => write!(f, "measure {a}")?,
                    MeasureTarget::All => f.write_str("measure all")?,
                }
                if let Some(p) = policy {
                    write!(f, " {p}")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for CircuitProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let h = &self.header;
        write!(f, "qubits f={} s={} t={}", h.n_freq, h.n_spatial, h.n_time)?;
        if let Some(hz) = h.omega0_hz {
            write!(f, " omega0_hz={hz:?}")?;
        }
        if let Some(k) = h.oversample {
            write!(f, " oversample={k}")?;
        }
        writeln!(f)?;
        if self.allow_nonunitary {
            writeln!(f, "pragma allow-nonunitary")?;
        }
        for s in &self.statements {
            writeln!(f, "{}", s.instruction)?;
        }
        Ok(())
    }
}
