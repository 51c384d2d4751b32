//! Monte-Carlo experiments: termination curves, error rate versus Δ and
//! Bethe free-energy trajectories.
//!
//! Every trial transmits the all-`+1` word. Trial `t` draws its noise from
//! [`trial_rng`](crate::channel::trial_rng)`(seed, t)`, and per-trial results
//! are combined with integer sums, so the output does not depend on the
//! number of rayon workers.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use crate::bethe::{self, BetheError, FreeEnergyReport};
use crate::channel::{all_plus_trial_llrs, ChannelError, LlrVector};
use crate::code::ParityCheckCode;
use crate::decoder::{DecodeError, Decoder, DecoderConfig, Delta, Variant};

/// Iteration cap of the long termination-curve runs.
pub const DEFAULT_MAX_ITERATIONS: usize = 16384;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error(transparent)]
    Bethe(#[from] BetheError),
    #[error("{0}")]
    InvalidInput(String),
    #[error("writing {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

/// `1, 2, 4, …` up to and including the largest power of two ≤ `end`,
/// starting from `start`.
pub fn doubling_caps(start: usize, end: usize) -> Vec<usize> {
    std::iter::successors(Some(start.max(1)), |&c| c.checked_mul(2))
        .take_while(|&c| c <= end)
        .collect()
}

/// Runs `f` on a dedicated pool of `workers` threads (`None`: rayon default).
pub fn with_workers<R: Send>(workers: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    match workers {
        None => f(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .expect("thread pool")
            .install(f),
    }
}

fn trial_llrs(n: usize, snr: f64, seed: u64, trial: u64) -> Result<LlrVector<f64>, ChannelError> {
    all_plus_trial_llrs(n, snr, seed, trial)
}

fn spins_wrong(spins: &[i8]) -> u64 {
    spins.iter().filter(|&&s| s < 0).count() as u64
}

/// Parameters recorded alongside a termination histogram.
#[derive(Debug, Clone, PartialEq)]
pub struct RunParams {
    pub code: String,
    pub snr: f64,
    pub delta: Delta,
    pub variant: Variant,
    pub max_iterations: usize,
    pub trials: u64,
    pub seed: u64,
}

/// Distribution of the iteration at which decoding first hits a codeword.
#[derive(Debug, Clone, PartialEq)]
pub struct TerminationHistogram {
    /// `n_it → trials`; only nonzero bins are stored.
    pub counts: BTreeMap<usize, u64>,
    /// Trials still not at a codeword after `max_iterations`.
    pub unterminated: u64,
    /// Terminated trials whose codeword is not the transmitted one.
    pub wrong_codeword: u64,
    pub trials: u64,
    pub params: RunParams,
}

impl TerminationHistogram {
    pub fn empty(params: RunParams) -> Self {
        Self {
            counts: BTreeMap::new(),
            unterminated: 0,
            wrong_codeword: 0,
            trials: 0,
            params,
        }
    }

    pub fn converged(&self) -> u64 {
        self.counts.values().sum()
    }

    /// Smallest `n_it` with the largest count.
    pub fn mode(&self) -> Option<usize> {
        let best = *self.counts.values().max()?;
        self.counts
            .iter()
            .find(|(_, &c)| c == best)
            .map(|(&n, _)| n)
    }

    pub fn count_at(&self, n_it: usize) -> u64 {
        self.counts.get(&n_it).copied().unwrap_or(0)
    }

    /// Converged trials with `n_it > n`.
    pub fn converged_above(&self, n: usize) -> u64 {
        self.counts.range(n + 1..).map(|(_, &c)| c).sum()
    }

    /// Frames not decoded to the transmitted word.
    pub fn frame_errors(&self) -> u64 {
        self.unterminated + self.wrong_codeword
    }

    fn record(&mut self, outcome: TrialOutcome) {
        self.trials += 1;
        match outcome {
            TrialOutcome::Terminated { n_it, correct } => {
                *self.counts.entry(n_it).or_insert(0) += 1;
                if !correct {
                    self.wrong_codeword += 1;
                }
            }
            TrialOutcome::Unterminated => self.unterminated += 1,
        }
    }

    fn merge(mut self, other: Self) -> Self {
        for (n, c) in other.counts {
            *self.counts.entry(n).or_insert(0) += c;
        }
        self.unterminated += other.unterminated;
        self.wrong_codeword += other.wrong_codeword;
        self.trials += other.trials;
        self
    }
}

#[derive(Debug, Clone, Copy)]
enum TrialOutcome {
    Terminated { n_it: usize, correct: bool },
    Unterminated,
}

/// Decodes `trials` noisy copies of the all-`+1` word and histograms the
/// termination iteration.
pub fn run_termination_curve(
    code: &ParityCheckCode,
    snr: f64,
    config: &DecoderConfig,
    trials: u64,
    master_seed: u64,
) -> Result<TerminationHistogram, ExperimentError> {
    if trials == 0 {
        return Err(ExperimentError::InvalidInput(
            "trials must be at least 1".into(),
        ));
    }
    let params = RunParams {
        code: format!("{}x{}", code.n_checks(), code.n_bits()),
        snr,
        delta: config.delta(),
        variant: config.variant(),
        max_iterations: config.max_iterations(),
        trials,
        seed: master_seed,
    };
    let n = code.n_bits();
    let empty = TerminationHistogram::empty(params);
    (0..trials)
        .into_par_iter()
        .map_init(
            || Decoder::<f64>::new(code, *config),
            |dec, t| -> Result<TrialOutcome, ExperimentError> {
                let h = trial_llrs(n, snr, master_seed, t)?;
                let r = dec.decode(&h)?;
                Ok(match r.terminated_at() {
                    Some(n_it) => TrialOutcome::Terminated {
                        n_it,
                        correct: spins_wrong(r.word.spins()) == 0,
                    },
                    None => TrialOutcome::Unterminated,
                })
            },
        )
        .try_fold(
            || empty.clone(),
            |mut acc, o| {
                acc.record(o?);
                Ok(acc)
            },
        )
        .try_reduce(|| empty.clone(), |a, b| Ok(a.merge(b)))
}

/// One `(Δ, cap)` point of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorRow {
    pub delta: Delta,
    pub max_iterations: usize,
    pub trials: u64,
    pub frame_errors: u64,
    /// Wrong bits summed over error frames.
    pub bit_errors: u64,
    pub frame_error_rate: f64,
    /// `bit_errors / (trials · N)`.
    pub bit_error_rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorTable {
    /// Sorted by `(delta, max_iterations)`, `inf` last.
    pub rows: Vec<ErrorRow>,
    pub snr: f64,
    pub variant: Variant,
    pub seed: u64,
}

impl ErrorTable {
    pub fn row(&self, delta: Delta, cap: usize) -> Option<&ErrorRow> {
        self.rows
            .iter()
            .find(|r| r.delta == delta && r.max_iterations == cap)
    }
}

/// Error rates over a `(Δ, cap)` grid with common random numbers: every
/// grid point decodes the same channel realizations.
///
/// Because decoding stops at the first codeword, a run capped at `c` is a
/// prefix of the run capped at `max(caps)`. Each `(trial, Δ)` is decoded
/// once and the decision at every cap is read off the trajectory.
pub fn run_delta_sweep(
    code: &ParityCheckCode,
    snr: f64,
    variant: Variant,
    deltas: &[Delta],
    caps: &[usize],
    trials: u64,
    master_seed: u64,
) -> Result<ErrorTable, ExperimentError> {
    if deltas.is_empty() || caps.is_empty() {
        return Err(ExperimentError::InvalidInput(
            "empty delta or cap grid".into(),
        ));
    }
    if trials == 0 {
        return Err(ExperimentError::InvalidInput(
            "trials must be at least 1".into(),
        ));
    }
    if caps.contains(&0) {
        return Err(ExperimentError::InvalidInput(
            "iteration caps must be positive".into(),
        ));
    }
    let mut deltas = deltas.to_vec();
    deltas.sort_by(|a, b| a.partial_cmp(b).expect("deltas are ordered"));
    deltas.dedup();
    let mut caps = caps.to_vec();
    caps.sort_unstable();
    caps.dedup();
    let max_cap = *caps.last().expect("nonempty");
    let configs = deltas
        .iter()
        .map(|&d| DecoderConfig::new(variant, d, max_cap))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| ExperimentError::InvalidInput(e.to_string()))?;

    let n = code.n_bits();
    let cells = deltas.len() * caps.len();
    // per cell: (frame errors, bit errors)
    let zero = || vec![(0u64, 0u64); cells];
    let totals = (0..trials)
        .into_par_iter()
        .map_init(
            || Decoder::<f64>::new(code, configs[0]),
            |dec, t| -> Result<Vec<(u64, u64)>, ExperimentError> {
                let h = trial_llrs(n, snr, master_seed, t)?;
                let mut out = zero();
                for (di, cfg) in configs.iter().enumerate() {
                    dec.set_config(*cfg);
                    let row = &mut out[di * caps.len()..(di + 1) * caps.len()];
                    let mut wrong_at = vec![0u64; caps.len()];
                    let r = dec.decode_traced(&h, |v| {
                        if let Ok(k) = caps.binary_search(&v.iteration) {
                            wrong_at[k] = spins_wrong(v.decision);
                        }
                    })?;
                    let final_wrong = spins_wrong(r.word.spins());
                    for (k, &cap) in caps.iter().enumerate() {
                        let wrong = if r.iterations <= cap {
                            final_wrong
                        } else {
                            wrong_at[k]
                        };
                        if wrong > 0 {
                            row[k] = (1, wrong);
                        }
                    }
                }
                Ok(out)
            },
        )
        .try_fold(zero, |mut acc, v| {
            for (a, b) in acc.iter_mut().zip(v?) {
                a.0 += b.0;
                a.1 += b.1;
            }
            Ok::<_, ExperimentError>(acc)
        })
        .try_reduce(zero, |mut a, b| {
            for (x, y) in a.iter_mut().zip(b) {
                x.0 += y.0;
                x.1 += y.1;
            }
            Ok(a)
        })?;

    let rows = deltas
        .iter()
        .enumerate()
        .flat_map(|(di, &delta)| {
            let (totals, caps) = (&totals, &caps);
            caps.iter().enumerate().map(move |(k, &cap)| {
                let (fe, be) = totals[di * caps.len() + k];
                ErrorRow {
                    delta,
                    max_iterations: cap,
                    trials,
                    frame_errors: fe,
                    bit_errors: be,
                    frame_error_rate: fe as f64 / trials as f64,
                    bit_error_rate: be as f64 / (trials as f64 * n as f64),
                }
            })
        })
        .collect();
    Ok(ErrorTable {
        rows,
        snr,
        variant,
        seed: master_seed,
    })
}

/// Free-energy trajectory of one converged trial.
#[derive(Debug, Clone, PartialEq)]
pub struct BetheTrace {
    pub trial: u64,
    pub n_it: usize,
    /// `F_Bethe` at iterations `n_it - len + 1 ..= n_it`.
    pub free_energy: Vec<f64>,
    /// Report at the terminating iteration.
    pub last: FreeEnergyReport<f64>,
}

impl BetheTrace {
    /// True when `F` never rises by more than `tol` (relative to `max(1, |F|)`)
    /// between consecutive recorded iterations.
    pub fn non_increasing(&self, tol: f64) -> bool {
        self.free_energy
            .windows(2)
            .all(|w| w[1] <= w[0] + tol * w[0].abs().max(1.0))
    }
}

/// Bethe report for decoder messages `η`.
pub fn bethe_report(
    code: &ParityCheckCode,
    h: &LlrVector<f64>,
    eta: &[f64],
) -> Result<FreeEnergyReport<f64>, BetheError> {
    bethe::free_energy_from_messages(code, h, eta)
}

/// Decodes trials in index order until `wanted` have converged, recording
/// `F_Bethe` over the last `window + 1` iterations of each. Trials that do
/// not converge are skipped; at most `max_trials` are attempted.
pub fn run_bethe_diagnostic(
    code: &ParityCheckCode,
    snr: f64,
    config: &DecoderConfig,
    wanted: usize,
    window: usize,
    max_trials: u64,
    master_seed: u64,
) -> Result<Vec<BetheTrace>, ExperimentError> {
    let n = code.n_bits();
    let mut out = Vec::with_capacity(wanted);
    let mut next = 0u64;
    let batch = (wanted as u64).max(16);
    while out.len() < wanted && next < max_trials {
        let end = (next + batch).min(max_trials);
        let traces = (next..end)
            .into_par_iter()
            .map_init(
                || Decoder::<f64>::new(code, *config),
                |dec, t| -> Result<Option<BetheTrace>, ExperimentError> {
                    let h = trial_llrs(n, snr, master_seed, t)?;
                    let mut recent: Vec<FreeEnergyReport<f64>> = Vec::with_capacity(window + 2);
                    let mut failure = None;
                    let r =
                        dec.decode_traced(&h, |v| match bethe_report(code, &h, v.messages) {
                            Ok(rep) => {
                                recent.push(rep);
                                if recent.len() > window + 1 {
                                    recent.remove(0);
                                }
                            }
                            Err(e) => failure = Some(e),
                        })?;
                    if let Some(e) = failure {
                        return Err(e.into());
                    }
                    Ok(r.terminated_at().map(|n_it| BetheTrace {
                        trial: t,
                        n_it,
                        free_energy: recent.iter().map(|r| r.f_bethe).collect(),
                        last: *recent.last().expect("at least one iteration"),
                    }))
                },
            )
            .collect::<Result<Vec<_>, _>>()?;
        out.extend(traces.into_iter().flatten().take(wanted - out.len()));
        next = end;
    }
    Ok(out)
}

/// Types with a CSV representation.
pub trait CsvReport {
    fn write_csv_to<W: Write>(&self, w: &mut W) -> io::Result<()>;

    fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv_to(&mut buf).expect("in-memory write");
        String::from_utf8(buf).expect("ascii output")
    }
}

impl CsvReport for TerminationHistogram {
    fn write_csv_to<W: Write>(&self, w: &mut W) -> io::Result<()> {
        let p = &self.params;
        writeln!(w, "# code={}", p.code)?;
        writeln!(w, "# snr={}", p.snr)?;
        writeln!(w, "# delta={}", p.delta)?;
        writeln!(w, "# variant={}", p.variant)?;
        writeln!(w, "# max_iterations={}", p.max_iterations)?;
        writeln!(w, "# trials={}", p.trials)?;
        writeln!(w, "# seed={}", p.seed)?;
        writeln!(w, "n_it,count,probability")?;
        if self.trials == 0 {
            return Ok(());
        }
        let total = self.trials as f64;
        for (&n, &c) in &self.counts {
            writeln!(w, "{n},{c},{}", c as f64 / total)?;
        }
        writeln!(
            w,
            "unterminated,{},{}",
            self.unterminated,
            self.unterminated as f64 / total
        )
    }
}

impl CsvReport for ErrorTable {
    fn write_csv_to<W: Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "delta,max_iter,trials,frame_errors,bit_errors,fer,ber")?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                r.delta,
                r.max_iterations,
                r.trials,
                r.frame_errors,
                r.bit_errors,
                r.frame_error_rate,
                r.bit_error_rate
            )?;
        }
        Ok(())
    }
}

/// Writes `result` as CSV to `path`.
pub fn write_csv<R: CsvReport>(result: &R, path: &Path) -> Result<(), ExperimentError> {
    let io_err = |source| ExperimentError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(io_err)?;
    let mut w = BufWriter::new(file);
    result.write_csv_to(&mut w).map_err(io_err)?;
    w.flush().map_err(io_err)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> RunParams {
        RunParams {
            code: "test".into(),
            snr: 3.0,
            delta: Delta::Infinite,
            variant: Variant::MinSum,
            max_iterations: 16,
            trials: 10,
            seed: 1,
        }
    }

    #[test]
    fn caps_ladder() {
        assert_eq!(doubling_caps(1, 16384).len(), 15);
        assert_eq!(doubling_caps(1, 10), vec![1, 2, 4, 8]);
        assert_eq!(doubling_caps(4, 4), vec![4]);
    }

    #[test]
    fn empty_histogram_is_header_only() {
        let mut p = params();
        p.trials = 0;
        let csv = TerminationHistogram::empty(p).to_csv_string();
        let data: Vec<_> = csv.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(data, vec!["n_it,count,probability"]);
    }

    #[test]
    fn histogram_rows() {
        let mut h = TerminationHistogram::empty(params());
        for _ in 0..5 {
            h.record(TrialOutcome::Terminated {
                n_it: 3,
                correct: true,
            });
            h.record(TrialOutcome::Terminated {
                n_it: 0,
                correct: true,
            });
        }
        let csv = h.to_csv_string();
        let data: Vec<_> = csv.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(
            data,
            vec![
                "n_it,count,probability",
                "0,5,0.5",
                "3,5,0.5",
                "unterminated,0,0"
            ]
        );
        assert!(csv.starts_with("# code=test\n# snr=3\n# delta=inf\n# variant=minsum\n"));
        assert_eq!(h.mode(), Some(0));
        assert_eq!(h.converged_above(0), 5);
    }

    #[test]
    fn sweep_csv_format() {
        let t = ErrorTable {
            rows: vec![
                ErrorRow {
                    delta: Delta::Finite(0.5),
                    max_iterations: 1,
                    trials: 4,
                    frame_errors: 1,
                    bit_errors: 3,
                    frame_error_rate: 0.25,
                    bit_error_rate: 0.125,
                },
                ErrorRow {
                    delta: Delta::Infinite,
                    max_iterations: 2,
                    trials: 4,
                    frame_errors: 0,
                    bit_errors: 0,
                    frame_error_rate: 0.0,
                    bit_error_rate: 0.0,
                },
            ],
            snr: 3.0,
            variant: Variant::MinSum,
            seed: 0,
        };
        assert_eq!(
            t.to_csv_string(),
            "delta,max_iter,trials,frame_errors,bit_errors,fer,ber\n0.5,1,4,1,3,0.25,0.125\ninf,2,4,0,0,0,0\n"
        );
    }

    #[test]
    fn write_csv_reports_path_on_failure() {
        let h = TerminationHistogram::empty(params());
        let err = write_csv(&h, Path::new("/nonexistent-dir/x.csv")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent-dir/x.csv"));
    }
}
