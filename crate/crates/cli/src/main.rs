//! `ldpc-relax`: decode single frames and run the termination-curve and
//! error-versus-Δ experiments from the command line.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ldpc_relax::channel::{all_plus_trial_llrs, LlrVector};
use ldpc_relax::experiments::{
    bethe_report, doubling_caps, run_delta_sweep, run_termination_curve, with_workers, CsvReport,
    ExperimentError, DEFAULT_MAX_ITERATIONS,
};
use ldpc_relax::{
    parse_alist, tanner_155_64, Decoder, DecoderConfig, Delta, ParityCheckCode, Variant,
};

const EXIT_USAGE: u8 = 1;
const EXIT_IO: u8 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "ldpc-relax",
    version,
    about = "Relaxed belief-propagation LDPC decoding simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decode one noisy frame of the all-zeros codeword and print a report.
    Decode(DecodeArgs),
    /// Histogram of the iteration at which decoding terminates.
    Termcurve(TermcurveArgs),
    /// Error rates over a grid of Δ values and iteration caps.
    Sweep(SweepArgs),
}

#[derive(Args, Debug)]
struct Common {
    /// `tanner155` or a path to an alist file.
    #[arg(long, default_value = "tanner155")]
    code: String,
    /// Linear SNR s².
    #[arg(long)]
    snr: f64,
    /// Check-to-bit rule: `minsum` or `sumprod`.
    #[arg(long, default_value = "minsum")]
    variant: Variant,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads; results do not depend on it.
    #[arg(long, env = "LDPC_RELAX_WORKERS")]
    workers: Option<usize>,
}

#[derive(Args, Debug)]
struct DecodeArgs {
    #[command(flatten)]
    common: Common,
    /// Relaxation parameter Δ (`inf` for standard BP).
    #[arg(long, default_value = "inf")]
    delta: Delta,
    #[arg(long, default_value_t = DEFAULT_MAX_ITERATIONS)]
    max_iter: usize,
    /// Trial index within the seed's noise streams.
    #[arg(long, default_value_t = 0)]
    trial: u64,
    /// Report the Bethe free energy of the final messages.
    #[arg(long)]
    bethe_diag: bool,
}

#[derive(Args, Debug)]
struct TermcurveArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value = "inf")]
    delta: Delta,
    #[arg(long, default_value_t = DEFAULT_MAX_ITERATIONS)]
    max_iter: usize,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    /// Comma-separated Δ values, e.g. `0.5,1,2,inf`.
    #[arg(long, value_delimiter = ',', default_value = "0.25,0.5,1,2,4,inf")]
    deltas: Vec<Delta>,
    /// Iteration caps: `start:end:x2` for a doubling ladder or a comma list.
    #[arg(long, default_value = "1:16384:x2", value_parser = parse_caps)]
    caps: Caps,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Debug)]
struct Caps(Vec<usize>);

fn parse_caps(s: &str) -> Result<Caps, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|_| format!("invalid cap {t:?}"))
            .and_then(|v| {
                if v == 0 {
                    Err("caps must be positive".to_string())
                } else {
                    Ok(v)
                }
            })
    };
    let caps = match parts.as_slice() {
        [start, end, step] => {
            if step.trim() != "x2" {
                return Err(format!("unsupported cap step {step:?}, expected x2"));
            }
            let (a, b) = (num(start)?, num(end)?);
            if a > b {
                return Err(format!("cap range {a}:{b} is empty"));
            }
            doubling_caps(a, b)
        }
        [list] => list.split(',').map(num).collect::<Result<_, _>>()?,
        _ => return Err(format!("cannot parse caps {s:?}")),
    };
    Ok(Caps(caps))
}

enum Failure {
    Usage(String),
    Io(String),
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Io { .. } => Failure::Io(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

fn load_code(source: &str) -> Result<(ParityCheckCode, String), Failure> {
    if source == "tanner155" {
        return Ok((tanner_155_64(), source.to_string()));
    }
    let text =
        fs::read_to_string(source).map_err(|e| Failure::Io(format!("reading {source}: {e}")))?;
    let code = parse_alist(&text).map_err(|e| Failure::Usage(format!("{source}: {e}")))?;
    Ok((code, source.to_string()))
}

fn config(variant: Variant, delta: Delta, max_iter: usize) -> Result<DecoderConfig, Failure> {
    DecoderConfig::new(variant, delta, max_iter).map_err(|e| Failure::Usage(e.to_string()))
}

fn emit(out: &Option<PathBuf>, report: &impl CsvReport) -> Result<(), Failure> {
    match out {
        Some(path) => Ok(ldpc_relax::experiments::write_csv(report, path)?),
        None => {
            let mut stdout = io::stdout().lock();
            report
                .write_csv_to(&mut stdout)
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::Io(format!("stdout: {e}")))
        }
    }
}

fn run_decode(args: DecodeArgs) -> Result<(), Failure> {
    let c = &args.common;
    let (code, label) = load_code(&c.code)?;
    let cfg = config(c.variant, args.delta, args.max_iter)?;
    let h: LlrVector<f64> = all_plus_trial_llrs(code.n_bits(), c.snr, c.seed, args.trial)
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let mut decoder = Decoder::new(&code, cfg);
    let result = decoder
        .decode(&h)
        .map_err(|e| Failure::Usage(e.to_string()))?;

    let wrong = result.word.spins().iter().filter(|&&s| s < 0).count();
    let mut s = String::new();
    s += &format!(
        "code: {label} (N={}, M={})\n",
        code.n_bits(),
        code.n_checks()
    );
    s += &format!(
        "snr: {}  delta: {}  variant: {}  max_iter: {}  seed: {}  trial: {}\n",
        c.snr,
        cfg.delta(),
        cfg.variant(),
        cfg.max_iterations(),
        c.seed,
        args.trial
    );
    match result.terminated_at() {
        Some(n) => s += &format!("status: converged\nn_it: {n}\n"),
        None => s += &format!("status: exhausted\niterations: {}\n", result.iterations),
    }
    s += &format!("bit_errors: {wrong}\n");
    if args.bethe_diag {
        let r = bethe_report(&code, &h, decoder.messages())
            .map_err(|e| Failure::Usage(e.to_string()))?;
        s += &format!(
            "f_bethe: {}\nu_bethe: {}\nh_bethe: {}\nconsistency_residual: {}\n",
            r.f_bethe, r.u_bethe, r.h_bethe, r.consistency_residual
        );
    }
    let mut stdout = io::stdout().lock();
    stdout
        .write_all(s.as_bytes())
        .map_err(|e| Failure::Io(format!("stdout: {e}")))
}

fn run_termcurve(args: TermcurveArgs) -> Result<(), Failure> {
    let c = &args.common;
    let (code, label) = load_code(&c.code)?;
    let cfg = config(c.variant, args.delta, args.max_iter)?;
    let mut hist = with_workers(c.workers, || {
        run_termination_curve(&code, c.snr, &cfg, args.trials, c.seed)
    })?;
    hist.params.code = label;
    emit(&args.out, &hist)
}

fn run_sweep(args: SweepArgs) -> Result<(), Failure> {
    let c = &args.common;
    let (code, _) = load_code(&c.code)?;
    let table = with_workers(c.workers, || {
        run_delta_sweep(
            &code,
            c.snr,
            c.variant,
            &args.deltas,
            &args.caps.0,
            args.trials,
            c.seed,
        )
    })?;
    emit(&args.out, &table)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Decode(a) => run_decode(a),
        Command::Termcurve(a) => run_termcurve(a),
        Command::Sweep(a) => run_sweep(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_IO)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn caps_syntax() {
        assert_eq!(parse_caps("1:16:x2").unwrap().0, vec![1, 2, 4, 8, 16]);
        assert_eq!(parse_caps("1:16384:x2").unwrap().0.len(), 15);
        assert_eq!(parse_caps("32,4, 8").unwrap().0, vec![32, 4, 8]);
        assert_eq!(parse_caps("7").unwrap().0, vec![7]);
        for bad in ["0", "8:1:x2", "1:8:x3", "a,b", "1:2", ""] {
            assert!(parse_caps(bad).is_err(), "{bad}");
        }
    }
}
