//! Line-oriented circuit language.
//!
//! ```text
//! # comment
//! qubits f=2 s=1 t=0 [omega0_hz=1.0] [oversample=2]
//! pragma allow-nonunitary
//! init basis 3 | init uniform | init amps 0.5 0.5j -0.5 0.5-0.1j ...
//! gate H f1
//! gate RX(pi/4) s0
//! gate [[0,1],[1,0]] f0
//! cgate X f1 s0
//! oracle table 00010100 | oracle path/to/table.txt
//! noise 30
//! measure f0 [born|argmax]
//! measure all [born|argmax]
//! ```

use num_complex::Complex64 as C64;
use thiserror::Error;

use super::program::{
    CircuitProgram, GateName, GateSpec, Header, InitSpec, Instruction, MeasureTarget, OracleSpec, Statement,
};
use crate::config::{QubitAddress, QubitKind};
use crate::gates::{BooleanOracle, Gate2};
use crate::measurement::MeasurementPolicy;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    /// 1-based character column.
    col: usize,
    byte: usize,
}

/// Splits on whitespace outside `[...]` and `(...)` groups.
fn tokenize(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start: Option<(usize, usize)> = None;
    for (col, (byte, ch)) in line.char_indices().enumerate() {
        match ch {
            '[' | '(' => depth += 1,
            ']' | ')' => depth -= 1,
            _ => {}
        }
        if ch.is_whitespace() && depth <= 0 {
            if let Some((b, c)) = start.take() {
                out.push(Token { text: &line[b..byte], col: c + 1, byte: b });
            }
        } else if start.is_none() {
            start = Some((byte, col));
        }
    }
    if let Some((b, c)) = start {
        out.push(Token { text: &line[b..], col: c + 1, byte: b });
    }
    out
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

/// Complex literal: `1.5`, `-2j`, `j`, `0.5-0.25j`, `1e-3+2E+1j`.
pub fn parse_complex(s: &str) -> Option<C64> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    let parse_real = |t: &str| -> Option<f64> {
        let v: f64 = t.parse().ok()?;
        v.is_finite().then_some(v)
    };
    let Some(body) = s.strip_suffix('j') else {
        return parse_real(s).map(|re| C64::new(re, 0.0));
    };
    let parse_imag = |t: &str| -> Option<f64> {
        match t {
            "" | "+" => Some(1.0),
            "-" => Some(-1.0),
            _ => parse_real(t),
        }
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    match split {
        Some(i) => Some(C64::new(parse_real(&body[..i])?, parse_imag(&body[i..])?)),
        None => Some(C64::new(0.0, parse_imag(body)?)),
    }
}

/// Angle literal: a number, or `[k*]pi[/d]` with an optional leading `-`.
pub fn parse_angle(s: &str) -> Option<f64> {
    let s = s.trim();
    if let Ok(v) = s.parse::<f64>() {
        return v.is_finite().then_some(v);
    }
    let (neg, rest) = match s.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, s),
    };
    let (num, den) = match rest.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (rest, None),
    };
    let k = match num.strip_suffix("pi")? {
        "" => 1.0,
        k => k.strip_suffix('*')?.parse::<f64>().ok()?,
    };
    let d = match den {
        Some(d) => d.parse::<f64>().ok()?,
        None => 1.0,
    };
    let v = k * std::f64::consts::PI / d;
    let v = if neg { -v } else { v };
    v.is_finite().then_some(v)
}

fn parse_matrix(s: &str) -> Option<Gate2> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let inner = compact.strip_prefix("[[")?.strip_suffix("]]")?;
    let (r0, r1) = inner.split_once("],[")?;
    let row = |r: &str| -> Option<(C64, C64)> {
        let (a, b) = r.split_once(',')?;
        Some((parse_complex(a)?, parse_complex(b)?))
    };
    let (u00, u01) = row(r0)?;
    let (u10, u11) = row(r1)?;
    Some(Gate2::new(u00, u01, u10, u11))
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    /// Accept non-unitary gate matrices without the pragma.
    pub allow_nonunitary: bool,
}

struct Parser {
    header: Option<Header>,
    allow_nonunitary: bool,
    statements: Vec<Statement>,
    measured: Vec<QubitAddress>,
    pending_unitary: Vec<(Gate2, usize, usize)>,
    measured_all: bool,
    line: usize,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn err<T>(&self, col: usize, message: impl Into<String>) -> PResult<T> {
        Err(ParseError { line: self.line, column: col, message: message.into() })
    }

    fn header(&self, tok: &Token) -> PResult<Header> {
        match self.header {
            Some(h) => Ok(h),
            None => self.err(tok.col, "expected \"qubits\" header before instructions"),
        }
    }

    fn parse_header(&mut self, toks: &[Token]) -> PResult<()> {
        if self.header.is_some() {
            return self.err(toks[0].col, "duplicate \"qubits\" header");
        }
        let mut h = Header { n_freq: 0, n_spatial: 0, n_time: 0, omega0_hz: None, oversample: None };
        let mut seen: Vec<&str> = Vec::new();
        for t in &toks[1..] {
            let Some((key, value)) = t.text.split_once('=') else {
                return self.err(t.col, format!("expected key=value, got {:?}", t.text));
            };
            if seen.contains(&key) {
                return self.err(t.col, format!("duplicate key {key:?}"));
            }
            seen.push(key);
            let vcol = t.col + key.chars().count() + 1;
            let count = |p: &Self| -> PResult<usize> {
                value.parse().or_else(|_| p.err(vcol, format!("{key} needs a non-negative integer")))
            };
            match key {
                "f" => h.n_freq = count(self)?,
                "s" => h.n_spatial = count(self)?,
                "t" => h.n_time = count(self)?,
                "oversample" => h.oversample = Some(count(self)?),
                "omega0_hz" => match value.parse::<f64>() {
                    Ok(v) if v.is_finite() && v > 0.0 => h.omega0_hz = Some(v),
                    _ => return self.err(vcol, "omega0_hz needs a positive finite number"),
                },
                _ => return self.err(t.col, format!("unknown header key {key:?}")),
            }
        }
        if let Err(e) = h.config() {
            return self.err(toks[0].col, e.to_string());
        }
        self.header = Some(h);
        Ok(())
    }

    fn parse_address(&self, tok: &Token, header: &Header) -> PResult<QubitAddress> {
        let mut chars = tok.text.chars();
        let kind = match chars.next() {
            Some('f') => QubitKind::Frequency,
            Some('s') => QubitKind::Spatial,
            Some('t') => QubitKind::Time,
            _ => return self.err(tok.col, format!("expected a qubit address like f0, got {:?}", tok.text)),
        };
        let Ok(index) = chars.as_str().parse::<usize>() else {
            return self.err(tok.col + 1, format!("bad qubit index in {:?}", tok.text));
        };
        let limit = match kind {
            QubitKind::Frequency => header.n_freq,
            QubitKind::Spatial => header.n_spatial,
            QubitKind::Time => header.n_time,
        };
        if index >= limit {
            return self.err(tok.col, format!("{} out of range ({limit} {} qubits)", tok.text, kind.name()));
        }
        let addr = QubitAddress { kind, index };
        if self.measured.contains(&addr) {
            return self.err(tok.col, format!("{addr} was already measured"));
        }
        Ok(addr)
    }

    fn parse_gate(&mut self, tok: &Token) -> PResult<GateSpec> {
        let text = tok.text;
        let spec = if text.starts_with('[') {
            match parse_matrix(text) {
                Some(g) => GateSpec::Matrix(g),
                None => return self.err(tok.col, format!("bad gate matrix {text:?}")),
            }
        } else {
            let (name, arg) = match text.split_once('(') {
                Some((n, rest)) => match rest.strip_suffix(')') {
                    Some(a) => (n, Some(a)),
                    None => return self.err(tok.col, "unclosed \"(\" in gate"),
                },
                None => (text, None),
            };
            let Some(name) = GateName::parse(&name.to_ascii_uppercase()) else {
                return self.err(tok.col, format!("unknown gate {name:?}"));
            };
            let angle = match (name.takes_angle(), arg) {
                (true, Some(a)) => match parse_angle(a) {
                    Some(v) => Some(v),
                    None => {
                        let col = tok.col + text.find('(').map_or(0, |b| text[..b].chars().count() + 1);
                        return self.err(col, format!("bad angle {a:?}"));
                    }
                },
                (true, None) => return self.err(tok.col, format!("{} needs an angle", name.as_str())),
                (false, Some(_)) => return self.err(tok.col, format!("{} takes no angle", name.as_str())),
                (false, None) => None,
            };
            GateSpec::Named { name, angle }
        };
        if let GateSpec::Matrix(g) = spec {
            self.pending_unitary.push((g, self.line, tok.col));
        }
        Ok(spec)
    }

    fn expect_len(&self, toks: &[Token], range: std::ops::RangeInclusive<usize>, usage: &str) -> PResult<()> {
        if range.contains(&toks.len()) {
            return Ok(());
        }
        let col = if toks.len() > *range.end() { toks[*range.end()].col } else { toks[0].col };
        self.err(col, format!("usage: {usage}"))
    }

    fn parse_policy(&self, tok: Option<&Token>) -> PResult<Option<MeasurementPolicy>> {
        match tok {
            None => Ok(None),
            Some(t) => match t.text.parse() {
                Ok(p) => Ok(Some(p)),
                Err(_) => self.err(t.col, format!("unknown measurement policy {:?}", t.text)),
            },
        }
    }

    fn parse_instruction(&mut self, line: &str, toks: &[Token]) -> PResult<Instruction> {
        let head = &toks[0];
        let header = self.header(head)?;
        if self.measured_all {
            return self.err(head.col, "no instruction may follow \"measure all\"");
        }
        match head.text {
            "init" => {
                if !self.statements.is_empty() {
                    return self.err(head.col, "init must come before every other instruction");
                }
                if toks.len() < 2 {
                    return self.err(head.col, "usage: init basis K | init uniform | init amps ...");
                }
                let n_amps = header.config().map(|c| c.n_amplitudes()).unwrap_or(0);
                match toks[1].text {
                    "basis" => {
                        self.expect_len(toks, 3..=3, "init basis K")?;
                        match toks[2].text.parse::<usize>() {
                            Ok(k) if k < n_amps => Ok(Instruction::Init(InitSpec::Basis(k))),
                            Ok(k) => self
                                .err(toks[2].col, format!("basis index {k} out of range ({n_amps} states)")),
                            Err(_) => self.err(toks[2].col, "basis index must be a non-negative integer"),
                        }
                    }
                    "uniform" => {
                        self.expect_len(toks, 2..=2, "init uniform")?;
                        Ok(Instruction::Init(InitSpec::Uniform))
                    }
                    "amps" => {
                        let mut v = Vec::with_capacity(toks.len() - 2);
                        for t in &toks[2..] {
                            match parse_complex(t.text) {
                                Some(c) => v.push(c),
                                None => return self.err(t.col, format!("bad complex literal {:?}", t.text)),
                            }
                        }
                        if v.len() != n_amps {
                            return self
                                .err(head.col, format!("init amps needs {n_amps} values, got {}", v.len()));
                        }
                        Ok(Instruction::Init(InitSpec::Amps(v)))
                    }
                    other => self.err(toks[1].col, format!("unknown init form {other:?}")),
                }
            }
            "gate" => {
                self.expect_len(toks, 3..=3, "gate G ADDR")?;
                let gate = self.parse_gate(&toks[1])?;
                let target = self.parse_address(&toks[2], &header)?;
                Ok(Instruction::Gate { gate, target })
            }
            "cgate" => {
                self.expect_len(toks, 4..=4, "cgate G CTRL TARGET")?;
                let gate = self.parse_gate(&toks[1])?;
                let ctrl = self.parse_address(&toks[2], &header)?;
                let target = self.parse_address(&toks[3], &header)?;
                if ctrl == target {
                    return self.err(toks[3].col, "control and target must differ");
                }
                Ok(Instruction::Controlled { gate, ctrl, target })
            }
            "oracle" => {
                if toks.len() < 2 {
                    return self.err(head.col, "usage: oracle PATH | oracle table BITS");
                }
                if self.measured.iter().any(|a| a.kind == QubitKind::Frequency) {
                    return self.err(head.col, "oracle needs every frequency qubit unmeasured");
                }
                if toks[1].text == "table" {
                    self.expect_len(toks, 3..=3, "oracle table BITS")?;
                    let f = match BooleanOracle::from_bits(toks[2].text) {
                        Ok(f) => f,
                        Err(e) => return self.err(toks[2].col, e.to_string()),
                    };
                    if f.n_inputs() + 1 != header.n_freq {
                        return self.err(
                            toks[2].col,
                            format!(
                                "table has {} inputs, needs {}",
                                f.n_inputs(),
                                header.n_freq.saturating_sub(1)
                            ),
                        );
                    }
                    Ok(Instruction::Oracle(OracleSpec::Table(toks[2].text.to_string())))
                } else {
                    // the path runs to the end of the line, spaces included
                    let last = toks[toks.len() - 1];
                    let path = &line[toks[1].byte..last.byte + last.text.len()];
                    Ok(Instruction::Oracle(OracleSpec::File(path.into())))
                }
            }
            "noise" => {
                self.expect_len(toks, 2..=2, "noise SNR_DB")?;
                match toks[1].text.parse::<f64>() {
                    Ok(v) if !v.is_nan() && v != f64::NEG_INFINITY => Ok(Instruction::Noise { snr_db: v }),
                    _ => self.err(toks[1].col, "noise needs an SNR in dB (finite or inf)"),
                }
            }
            "measure" => {
                self.expect_len(toks, 2..=3, "measure ADDR|all [born|argmax]")?;
                let policy = self.parse_policy(toks.get(2))?;
                if toks[1].text == "all" {
                    let cfg = header.config().map_err(|e| ParseError {
                        line: self.line,
                        column: head.col,
                        message: e.to_string(),
                    })?;
                    let remaining: Vec<_> =
                        cfg.all_addresses().into_iter().filter(|a| !self.measured.contains(a)).collect();
                    if remaining.is_empty() {
                        return self.err(toks[1].col, "no unmeasured qubits left");
                    }
                    self.measured.extend(remaining);
                    self.measured_all = true;
                    Ok(Instruction::Measure { target: MeasureTarget::All, policy })
                } else {
                    let a = self.parse_address(&toks[1], &header)?;
                    self.measured.push(a);
                    Ok(Instruction::Measure { target: MeasureTarget::One(a), policy })
                }
            }
            other => self.err(head.col, format!("unknown instruction {other:?}")),
        }
    }
}

pub fn parse_program(text: &str) -> Result<CircuitProgram, ParseError> {
    parse_program_with(text, ParseOptions::default())
}

pub fn parse_program_with(text: &str, opts: ParseOptions) -> Result<CircuitProgram, ParseError> {
    let mut p = Parser {
        header: None,
        allow_nonunitary: false,
        statements: Vec::new(),
        measured: Vec::new(),
        pending_unitary: Vec::new(),
        measured_all: false,
        line: 0,
    };
    for (idx, raw) in text.lines().enumerate() {
        p.line = idx + 1;
        let line = strip_comment(raw);
        let toks = tokenize(line);
        if toks.is_empty() {
            continue;
        }
        match toks[0].text {
            "qubits" => {
                if !p.statements.is_empty() {
                    return p.err(toks[0].col, "\"qubits\" header must come first");
                }
                p.parse_header(&toks)?;
            }
            "pragma" => {
                p.expect_len(&toks, 2..=2, "pragma allow-nonunitary")?;
                if toks[1].text != "allow-nonunitary" {
                    return p.err(toks[1].col, format!("unknown pragma {:?}", toks[1].text));
                }
                p.allow_nonunitary = true;
            }
            _ => {
                let instruction = p.parse_instruction(line, &toks)?;
                p.statements.push(Statement { instruction, line: p.line });
            }
        }
    }
    let Some(header) = p.header else {
        return Err(ParseError {
            line: p.line.max(1),
            column: 1,
            message: "missing \"qubits\" header".into(),
        });
    };
    if !(p.allow_nonunitary || opts.allow_nonunitary) {
        if let Some((g, line, column)) = p.pending_unitary.iter().find(|(g, _, _)| !g.is_unitary()) {
            return Err(ParseError {
                line: *line,
                column: *column,
                message: format!(
                    "gate matrix is not unitary (|U^H U - I| = {:.3e}); add \"pragma allow-nonunitary\"",
                    g.unitarity_error()
                ),
            });
        }
    }
    Ok(CircuitProgram { header, allow_nonunitary: p.allow_nonunitary, statements: p.statements })
}
