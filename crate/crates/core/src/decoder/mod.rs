//! Iterative message-passing decoders.
//!
//! Messages `η_{iα}` live on edges and are indexed by edge id. One iteration
//! is a flooding update: all check-to-bit values are computed from
//! `η^{(n)}`, then every bit solves its relaxed update for `η^{(n+1)}`:
//!
//! ```text
//! η'_{iα} + (1/Δ) Σ_{β∋i} η'_{iβ} = h_i + Σ_{β∋i, β≠α} C(β→i) + (1/Δ) Σ_{β∋i} η_{iβ}
//! ```
//!
//! `C` is the sum-product rule `atanh ∏ tanh η` or the min-sum rule
//! `∏ sign η · min |η|`, both over the other bits of the check. `Δ = ∞`
//! (stored as `1/Δ = 0`) is ordinary belief propagation.

mod kernel;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::channel::LlrVector;
use crate::code::{HardWord, ParityCheckCode};
use crate::scalar::Scalar;

pub use kernel::{check_to_bit_min_sum, check_to_bit_sum_product};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecodeError {
    #[error("{what} has length {found}, expected {expected}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("delta must be positive (or inf), got {0}")]
    InvalidDelta(f64),
    #[error("max_iterations must be at least 1")]
    ZeroIterations,
    #[error("cannot parse delta {0:?}")]
    ParseDelta(String),
    #[error("unknown variant {0:?} (expected sumprod or minsum)")]
    ParseVariant(String),
}

/// Check-to-bit rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    SumProduct,
    MinSum,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::SumProduct => "sumprod",
            Variant::MinSum => "minsum",
        })
    }
}

impl FromStr for Variant {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sumprod" | "sum_product" | "sum-product" => Ok(Variant::SumProduct),
            "minsum" | "min_sum" | "min-sum" => Ok(Variant::MinSum),
            _ => Err(ConfigError::ParseVariant(s.to_string())),
        }
    }
}

/// Relaxation parameter Δ. `Infinite` is standard BP.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Delta {
    Finite(f64),
    Infinite,
}

impl Delta {
    pub fn finite(delta: f64) -> Result<Self, ConfigError> {
        if delta > 0.0 && delta.is_finite() {
            Ok(Delta::Finite(delta))
        } else if delta == f64::INFINITY {
            Ok(Delta::Infinite)
        } else {
            Err(ConfigError::InvalidDelta(delta))
        }
    }

    /// `1/Δ`, exactly zero for `Infinite`.
    pub fn inverse(self) -> f64 {
        match self {
            Delta::Finite(d) => 1.0 / d,
            Delta::Infinite => 0.0,
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Delta::Finite(d) => d,
            Delta::Infinite => f64::INFINITY,
        }
    }
}

impl fmt::Display for Delta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Delta::Finite(d) => write!(f, "{d}"),
            Delta::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Delta {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") {
            return Ok(Delta::Infinite);
        }
        let v: f64 = t
            .parse()
            .map_err(|_| ConfigError::ParseDelta(s.to_string()))?;
        Delta::finite(v)
    }
}

impl PartialOrd for Delta {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        self.value().partial_cmp(&other.value())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoderConfig {
    variant: Variant,
    delta: Delta,
    max_iterations: usize,
}

impl DecoderConfig {
    pub fn new(variant: Variant, delta: Delta, max_iterations: usize) -> Result<Self, ConfigError> {
        if let Delta::Finite(d) = delta {
            if !(d > 0.0 && d.is_finite()) {
                return Err(ConfigError::InvalidDelta(d));
            }
        }
        if max_iterations == 0 {
            return Err(ConfigError::ZeroIterations);
        }
        Ok(Self {
            variant,
            delta,
            max_iterations,
        })
    }

    /// Standard BP of the given variant.
    pub fn standard(variant: Variant, max_iterations: usize) -> Result<Self, ConfigError> {
        Self::new(variant, Delta::Infinite, max_iterations)
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn delta(&self) -> Delta {
        self.delta
    }

    pub fn max_iterations(&self) -> usize {
        self.max_iterations
    }

    pub fn with_max_iterations(self, max_iterations: usize) -> Result<Self, ConfigError> {
        Self::new(self.variant, self.delta, max_iterations)
    }
}

/// Edge messages at iteration `iteration`.
#[derive(Debug, Clone, PartialEq)]
pub struct Messages<T> {
    pub eta: Vec<T>,
    pub iteration: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecodeStatus {
    Converged,
    Exhausted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    pub status: DecodeStatus,
    pub word: HardWord,
    /// Iteration of the returned decision: `n_it` when converged, the cap
    /// otherwise.
    pub iterations: usize,
}

impl DecodeResult {
    pub fn converged(&self) -> bool {
        self.status == DecodeStatus::Converged
    }

    pub fn terminated_at(&self) -> Option<usize> {
        self.converged().then_some(self.iterations)
    }
}

fn check_len(what: &'static str, expected: usize, found: usize) -> Result<(), DecodeError> {
    if expected == found {
        Ok(())
    } else {
        Err(DecodeError::DimensionMismatch {
            what,
            expected,
            found,
        })
    }
}

/// `η^{(0)}_{iα} = h_i` on every edge.
pub fn init_messages<T: Scalar>(
    code: &ParityCheckCode,
    h: &LlrVector<T>,
) -> Result<Messages<T>, DecodeError> {
    check_len("llr vector", code.n_bits(), h.len())?;
    let mut eta = Vec::with_capacity(code.n_edges());
    for (b, &hb) in h.as_slice().iter().enumerate() {
        eta.extend(std::iter::repeat_n(hb.clamp_message(), code.bit_degree(b)));
    }
    Ok(Messages { eta, iteration: 0 })
}

/// All check-to-bit values `C(α→i)`, indexed by edge id.
pub fn check_to_bit<T: Scalar>(code: &ParityCheckCode, eta: &[T], variant: Variant) -> Vec<T> {
    let mut out = vec![T::zero(); code.n_edges()];
    kernel::all_check_to_bit(code, eta, variant, &mut out, &mut Vec::new());
    out
}

fn check_step_inputs<T: Scalar>(
    messages: &Messages<T>,
    code: &ParityCheckCode,
    h: &LlrVector<T>,
) -> Result<(), DecodeError> {
    check_len("message vector", code.n_edges(), messages.eta.len())?;
    check_len("llr vector", code.n_bits(), h.len())
}

/// One relaxed flooding iteration `η^{(n)} → η^{(n+1)}`.
pub fn relaxed_step<T: Scalar>(
    messages: &Messages<T>,
    code: &ParityCheckCode,
    h: &LlrVector<T>,
    config: &DecoderConfig,
) -> Result<Messages<T>, DecodeError> {
    check_step_inputs(messages, code, h)?;
    let c = check_to_bit(code, &messages.eta, config.variant);
    let mut next = vec![T::zero(); code.n_edges()];
    relaxed_bits(
        code,
        h.as_slice(),
        &c,
        &messages.eta,
        T::lit(config.delta.inverse()),
        &mut next,
    );
    Ok(Messages {
        eta: next,
        iteration: messages.iteration + 1,
    })
}

/// One standard BP iteration `η'_{iα} = h_i + Σ_{β≠α} C(β→i)`.
pub fn bp_step<T: Scalar>(
    messages: &Messages<T>,
    code: &ParityCheckCode,
    h: &LlrVector<T>,
    variant: Variant,
) -> Result<Messages<T>, DecodeError> {
    check_step_inputs(messages, code, h)?;
    let c = check_to_bit(code, &messages.eta, variant);
    let mut next = vec![T::zero(); code.n_edges()];
    for (b, &hb) in h.as_slice().iter().enumerate() {
        let r = code.bit_edges(b);
        kernel::standard_bit_update(hb, &c[r.clone()], &mut next[r]);
    }
    Ok(Messages {
        eta: next,
        iteration: messages.iteration + 1,
    })
}

fn relaxed_bits<T: Scalar>(
    code: &ParityCheckCode,
    h: &[T],
    c: &[T],
    old: &[T],
    inv_delta: T,
    next: &mut [T],
) {
    for (b, &hb) in h.iter().enumerate() {
        let r = code.bit_edges(b);
        kernel::relaxed_bit_update(hb, &c[r.clone()], &old[r.clone()], inv_delta, &mut next[r]);
    }
}

fn field_from_checks<T: Scalar>(code: &ParityCheckCode, h: &[T], c: &[T], out: &mut [T]) {
    for (b, (o, &hb)) in out.iter_mut().zip(h).enumerate() {
        *o = c[code.bit_edges(b)].iter().fold(hb, |acc, &x| acc + x);
    }
}

/// Belief half-LLR per bit: `m_i = h_i + Σ_{α∋i} C(α→i)`.
pub fn posterior_field<T: Scalar>(
    messages: &Messages<T>,
    code: &ParityCheckCode,
    h: &LlrVector<T>,
    variant: Variant,
) -> Result<Vec<T>, DecodeError> {
    check_step_inputs(messages, code, h)?;
    let c = check_to_bit(code, &messages.eta, variant);
    let mut m = vec![T::zero(); code.n_bits()];
    field_from_checks(code, h.as_slice(), &c, &mut m);
    Ok(m)
}

/// `+1` where the field is nonnegative, `-1` otherwise.
pub fn hard_decision<T: Scalar>(field: &[T]) -> HardWord {
    HardWord::from_spins_unchecked(field.iter().map(|&m| spin(m)).collect())
}

#[inline]
fn spin<T: Scalar>(m: T) -> i8 {
    if m >= T::zero() {
        1
    } else {
        -1
    }
}

/// Decoder state observed once per iteration by [`Decoder::decode_traced`].
#[derive(Debug)]
pub struct IterationView<'a, T> {
    pub iteration: usize,
    /// `η^{(n)}`, by edge id.
    pub messages: &'a [T],
    /// `C(α→i)` computed from `η^{(n)}`.
    pub check_messages: &'a [T],
    /// Hard decision tested for termination at this iteration.
    pub decision: &'a [i8],
    pub is_codeword: bool,
}

/// Reusable decoder: owns double-buffered messages for one code.
///
/// The decision at `n = 0` is the channel decision `sign(h)`; at `n ≥ 1` it
/// is the sign of the posterior field of `η^{(n)}`. Decoding stops at the
/// first decision that is a codeword.
#[derive(Debug, Clone)]
pub struct Decoder<'c, T> {
    code: &'c ParityCheckCode,
    config: DecoderConfig,
    eta: Vec<T>,
    next: Vec<T>,
    checks: Vec<T>,
    field: Vec<T>,
    decision: Vec<i8>,
    scratch: Vec<T>,
}

impl<'c, T: Scalar> Decoder<'c, T> {
    pub fn new(code: &'c ParityCheckCode, config: DecoderConfig) -> Self {
        let e = code.n_edges();
        Self {
            code,
            config,
            eta: vec![T::zero(); e],
            next: vec![T::zero(); e],
            checks: vec![T::zero(); e],
            field: vec![T::zero(); code.n_bits()],
            decision: vec![1; code.n_bits()],
            scratch: Vec::new(),
        }
    }

    pub fn config(&self) -> &DecoderConfig {
        &self.config
    }

    pub fn set_config(&mut self, config: DecoderConfig) {
        self.config = config;
    }

    pub fn decode(&mut self, h: &LlrVector<T>) -> Result<DecodeResult, DecodeError> {
        self.decode_traced(h, |_| {})
    }

    /// Decodes while handing every iteration's state to `observe`.
    pub fn decode_traced<F>(
        &mut self,
        h: &LlrVector<T>,
        mut observe: F,
    ) -> Result<DecodeResult, DecodeError>
    where
        F: FnMut(&IterationView<'_, T>),
    {
        check_len("llr vector", self.code.n_bits(), h.len())?;
        let code = self.code;
        let h = h.as_slice();
        let variant = self.config.variant;
        let inv_delta = T::lit(self.config.delta.inverse());

        let init = init_messages(code, &LlrVector(h.to_vec()))?;
        self.eta.copy_from_slice(&init.eta);
        kernel::all_check_to_bit(
            code,
            &self.eta,
            variant,
            &mut self.checks,
            &mut self.scratch,
        );
        for (d, &hb) in self.decision.iter_mut().zip(h) {
            *d = spin(hb);
        }
        let mut done = code.is_codeword(&self.decision);
        self.emit(0, done, &mut observe);
        if done {
            return Ok(self.result(DecodeStatus::Converged, 0));
        }

        for n in 1..=self.config.max_iterations {
            relaxed_bits(code, h, &self.checks, &self.eta, inv_delta, &mut self.next);
            std::mem::swap(&mut self.eta, &mut self.next);
            kernel::all_check_to_bit(
                code,
                &self.eta,
                variant,
                &mut self.checks,
                &mut self.scratch,
            );
            field_from_checks(code, h, &self.checks, &mut self.field);
            for (d, &m) in self.decision.iter_mut().zip(&self.field) {
                *d = spin(m);
            }
            done = code.is_codeword(&self.decision);
            self.emit(n, done, &mut observe);
            if done {
                return Ok(self.result(DecodeStatus::Converged, n));
            }
        }
        Ok(self.result(DecodeStatus::Exhausted, self.config.max_iterations))
    }

    fn emit<F: FnMut(&IterationView<'_, T>)>(
        &self,
        iteration: usize,
        is_codeword: bool,
        observe: &mut F,
    ) {
        observe(&IterationView {
            iteration,
            messages: &self.eta,
            check_messages: &self.checks,
            decision: &self.decision,
            is_codeword,
        });
    }

    fn result(&self, status: DecodeStatus, iterations: usize) -> DecodeResult {
        DecodeResult {
            status,
            word: HardWord::from_spins_unchecked(self.decision.clone()),
            iterations,
        }
    }

    /// Messages after the last decode.
    pub fn messages(&self) -> &[T] {
        &self.eta
    }
}

/// One-shot decode with a fresh [`Decoder`].
pub fn decode<T: Scalar>(
    code: &ParityCheckCode,
    h: &LlrVector<T>,
    config: &DecoderConfig,
) -> Result<DecodeResult, DecodeError> {
    Decoder::new(code, *config).decode(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ParityCheckCode {
        ParityCheckCode::from_dense(&[vec![1, 1, 0], vec![0, 1, 1]]).unwrap()
    }

    #[test]
    fn init_copies_channel_field() {
        let code = small();
        let m = init_messages(&code, &LlrVector(vec![1.0, -2.0, 3.0])).unwrap();
        assert_eq!(m.eta.len(), code.n_edges());
        assert_eq!(m.iteration, 0);
        for e in code.bit_edges(1) {
            assert_eq!(m.eta[e], -2.0);
        }
        let z = init_messages(&code, &LlrVector(vec![0.0; 3])).unwrap();
        assert!(z.eta.iter().all(|&x| x == 0.0));
        assert!(init_messages(&code, &LlrVector(vec![0.0; 2])).is_err());
    }

    #[test]
    fn delta_parsing_and_display() {
        assert_eq!("inf".parse::<Delta>().unwrap(), Delta::Infinite);
        assert_eq!("0.5".parse::<Delta>().unwrap(), Delta::Finite(0.5));
        assert!("0".parse::<Delta>().is_err());
        assert!("-1".parse::<Delta>().is_err());
        assert!("abc".parse::<Delta>().is_err());
        assert_eq!(Delta::Infinite.to_string(), "inf");
        assert_eq!(Delta::Finite(0.25).to_string(), "0.25");
        assert_eq!(Delta::Infinite.inverse(), 0.0);
        assert!(Delta::Finite(4.0) < Delta::Infinite);
        assert!(DecoderConfig::new(Variant::MinSum, Delta::Finite(-1.0), 3).is_err());
        assert_eq!(
            DecoderConfig::new(Variant::MinSum, Delta::Infinite, 0),
            Err(ConfigError::ZeroIterations)
        );
        assert_eq!("minsum".parse::<Variant>().unwrap(), Variant::MinSum);
        assert!("bp".parse::<Variant>().is_err());
    }

    #[test]
    fn zero_state_is_fixed() {
        let code = small();
        let h = LlrVector(vec![0.0; 3]);
        let m = init_messages(&code, &h).unwrap();
        for variant in [Variant::SumProduct, Variant::MinSum] {
            let cfg = DecoderConfig::standard(variant, 10).unwrap();
            let next = relaxed_step(&m, &code, &h, &cfg).unwrap();
            assert!(next.eta.iter().all(|&x| x == 0.0));
            assert_eq!(next.iteration, 1);
        }
    }

    #[test]
    fn hard_decision_ties_to_plus() {
        assert_eq!(hard_decision(&[0.1, -0.2, 0.0]).spins(), &[1, -1, 1]);
        assert_eq!(hard_decision(&[2.0, 3.0]).spins(), &[1, 1]);
        let f = [0.3, -1.0, 0.0, 2.0];
        let g: Vec<f64> = f.iter().map(|x| -x).collect();
        let (a, b) = (hard_decision(&f), hard_decision(&g));
        for i in 0..4 {
            if f[i] != 0.0 {
                assert_eq!(a.spins()[i], -b.spins()[i]);
            }
        }
    }

    #[test]
    fn noiseless_output_converges_immediately() {
        let code = crate::code::tanner_155_64();
        let h = LlrVector(vec![2.0; 155]);
        for variant in [Variant::SumProduct, Variant::MinSum] {
            let cfg = DecoderConfig::new(variant, Delta::Finite(1.0), 5).unwrap();
            let r = decode(&code, &h, &cfg).unwrap();
            assert_eq!(r.status, DecodeStatus::Converged);
            assert_eq!(r.terminated_at(), Some(0));
        }
    }

    #[test]
    fn exhausted_when_single_step_cannot_fix() {
        // every bit strongly wrong: a single iteration cannot undo this
        let code = crate::code::tanner_155_64();
        let mut h = vec![-5.0; 155];
        h[0] = 5.0;
        let cfg = DecoderConfig::standard(Variant::MinSum, 1).unwrap();
        let r = decode(&code, &LlrVector(h), &cfg).unwrap();
        assert_eq!(r.status, DecodeStatus::Exhausted);
        assert_eq!(r.iterations, 1);
        assert_eq!(r.terminated_at(), None);
    }

    #[test]
    fn single_error_corrected() {
        let code = crate::code::tanner_155_64();
        let mut h = vec![1.0; 155];
        h[17] = -0.5;
        let cfg = DecoderConfig::standard(Variant::SumProduct, 20).unwrap();
        let r = decode(&code, &LlrVector(h), &cfg).unwrap();
        assert!(r.converged());
        assert_eq!(r.word, HardWord::all_plus(155));
        assert!(r.iterations >= 1);
    }

    #[test]
    fn traced_decode_reports_each_iteration() {
        let code = crate::code::tanner_155_64();
        let mut h = vec![1.0; 155];
        h[3] = -0.6;
        h[90] = -0.4;
        let cfg = DecoderConfig::new(Variant::MinSum, Delta::Finite(2.0), 50).unwrap();
        let mut seen = Vec::new();
        let r = Decoder::new(&code, cfg)
            .decode_traced(&LlrVector(h), |v| {
                seen.push((v.iteration, v.is_codeword));
                assert_eq!(v.messages.len(), code.n_edges());
            })
            .unwrap();
        assert_eq!(seen.len(), r.iterations + 1);
        assert!(seen.iter().enumerate().all(|(i, &(n, _))| i == n));
        assert!(seen.last().unwrap().1);
        assert!(seen[..seen.len() - 1].iter().all(|&(_, ok)| !ok));
    }

    #[test]
    fn f32_decoding() {
        let code = crate::code::tanner_155_64();
        let mut h = vec![1.0f32; 155];
        h[40] = -0.3;
        let cfg = DecoderConfig::new(Variant::SumProduct, Delta::Finite(1.0), 50).unwrap();
        let r = decode(&code, &LlrVector(h), &cfg).unwrap();
        assert!(r.converged());
    }
}
