use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qse_core::circuit::{
    execute, parse_program_with, spectrum_csv, time_series_csv, BackendKind, ExecOptions, ParseOptions,
};
use qse_core::search::run_search;
use qse_core::{BooleanOracle, QseError, QseResult};

#[derive(Parser)]
#[command(name = "qse", version, about = "Signal-level quantum circuit emulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Signal,
    Reference,
    Both,
}

impl From<BackendArg> for BackendKind {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::Signal => BackendKind::Signal,
            BackendArg::Reference => BackendKind::Reference,
            BackendArg::Both => BackendKind::Both,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run a circuit file.
    Run {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "signal")]
        backend: BackendArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the JSON run report here; measurements go to a CSV beside it.
        #[arg(long)]
        report: Option<PathBuf>,
        /// `y,z,out.csv`: dump the spectrum of signal (y, z) before the first
        /// measurement, plus its samples to `out_time.csv`.
        #[arg(long)]
        spectrum: Option<String>,
        #[arg(long)]
        allow_nonunitary: bool,
        /// Add noise at this SNR after every gate and oracle call.
        #[arg(long, allow_negative_numbers = true)]
        noise_snr_db: Option<f64>,
        /// Save the final signal state snapshot here.
        #[arg(long)]
        state_out: Option<PathBuf>,
    },
    /// Find every solution of a truth-table oracle with one query.
    Search {
        #[arg(long)]
        oracle: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        noise_snr_db: Option<f64>,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn write(path: &Path, text: &str) -> QseResult<()> {
    std::fs::write(path, text).map_err(|e| QseError::io(path, e))
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}"))
}

fn parse_spectrum_arg(arg: &str) -> QseResult<(usize, usize, PathBuf)> {
    let mut parts = arg.splitn(3, ',');
    let bad = || QseError::Domain(format!("--spectrum expects y,z,out.csv, got {arg:?}"));
    let y = parts.next().and_then(|v| v.trim().parse().ok()).ok_or_else(bad)?;
    let z = parts.next().and_then(|v| v.trim().parse().ok()).ok_or_else(bad)?;
    let out = parts.next().filter(|p| !p.is_empty()).ok_or_else(bad)?;
    Ok((y, z, PathBuf::from(out)))
}

#[allow(clippy::too_many_arguments)]
fn cmd_run(
    file: &Path,
    backend: BackendKind,
    seed: u64,
    report: Option<&Path>,
    spectrum: Option<&str>,
    allow_nonunitary: bool,
    noise_snr_db: Option<f64>,
    state_out: Option<&Path>,
) -> QseResult<()> {
    let spectrum = spectrum.map(parse_spectrum_arg).transpose()?;
    let text = std::fs::read_to_string(file).map_err(|e| QseError::io(file, e))?;
    let program = parse_program_with(&text, ParseOptions { allow_nonunitary })?;
    let opts = ExecOptions {
        backend,
        seed,
        noise_snr_db,
        allow_nonunitary,
        base_dir: file.parent().map(Path::to_path_buf),
        capture_spectrum: spectrum.is_some(),
    };
    let result = execute(&program, &opts)?;
    let r = &result.report;
    for m in &r.measurements {
        println!("measure {} -> {}  (v0={:.6e} v1={:.6e} p1={:.6})", m.addr, m.outcome, m.v0, m.v1, m.p1);
    }
    if let Some(d) = r.max_deviation {
        println!("max deviation signal vs reference: {d:.3e}");
    }
    if let Some(c) = &r.counters {
        println!(
            "filters={} swap_stages={} buffer_moves={} oracle_calls={} gates={}",
            c.filters,
            c.swap_stages,
            c.buffer_moves,
            c.oracle_calls,
            c.total_gates()
        );
    }
    if let Some(path) = report {
        write(path, &r.to_json())?;
        write(&sibling(path, ".measurements.csv"), &r.measurements_csv())?;
    }
    if let (Some((y, z, out)), Some(st)) = (spectrum, result.spectrum_state.as_ref()) {
        write(&out, &spectrum_csv(st, y, z)?)?;
        write(&sibling(&out, "_time.csv"), &time_series_csv(st, y, z)?)?;
    }
    if let Some(path) = state_out {
        match &result.signal_state {
            Some(st) => st.save(path)?,
            None => return Err(QseError::Domain("--state-out needs the signal backend".into())),
        }
    }
    Ok(())
}

fn cmd_search(oracle: &Path, noise_snr_db: Option<f64>, trials: usize, seed: u64) -> QseResult<()> {
    let text = std::fs::read_to_string(oracle).map_err(|e| QseError::io(oracle, e))?;
    let f = BooleanOracle::parse_table_file(&text)
        .map_err(|e| QseError::Format { path: oracle.to_path_buf(), message: e.to_string() })?;
    let truth = f.solutions();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut exact = 0;
    for trial in 0..trials.max(1) {
        let out = run_search(&f, noise_snr_db, &mut rng)?;
        let ok = out.solutions == truth;
        exact += usize::from(ok);
        println!(
            "trial {trial}: solutions {:?} count_estimate {} {}",
            out.solutions,
            out.count_estimate,
            if ok { "exact" } else { "wrong" }
        );
    }
    println!("{exact}/{} trials exact ({} true solutions)", trials.max(1), truth.len());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.command {
        Command::Run { file, backend, seed, report, spectrum, allow_nonunitary, noise_snr_db, state_out } => {
            cmd_run(
                file,
                (*backend).into(),
                *seed,
                report.as_deref(),
                spectrum.as_deref(),
                *allow_nonunitary,
                *noise_snr_db,
                state_out.as_deref(),
            )
        }
        Command::Search { oracle, noise_snr_db, trials, seed } => {
            cmd_search(oracle, *noise_snr_db, *trials, *seed)
        }
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut src = std::error::Error::source(&e);
            while let Some(s) = src {
                eprintln!("  caused by: {s}");
                src = s.source();
            }
            ExitCode::from(match e {
                QseError::Parse(_) => 2,
                QseError::Io { .. } | QseError::Format { .. } => 3,
                _ => 1,
            })
        }
    }
}
