//! Binary-input AWGN channel and the log-likelihood fields fed to the decoder.
//!
//! The transition density for a transmitted spin `σ` is
//! `p(x|σ) = exp(-s²(x-σ)²/2) / sqrt(2π/s²)`, so the noise variance is
//! `1/s²` and `s²` is the (linear) SNR.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use crate::code::HardWord;
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("snr must be positive and finite, got {0}")]
    InvalidSnr(f64),
}

/// Received samples together with the SNR they were produced at.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelOutput<T> {
    pub received: Vec<T>,
    pub snr: T,
}

/// Half log-likelihood ratios `h_i = ½ ln p(x_i|+1)/p(x_i|-1)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LlrVector<T>(pub Vec<T>);

impl<T> LlrVector<T> {
    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn as_slice(&self) -> &[T] {
        &self.0
    }
}

impl<T: Scalar> LlrVector<T> {
    pub fn neg(&self) -> Self {
        LlrVector(self.0.iter().map(|&x| -x).collect())
    }
}

fn check_snr<T: Scalar>(snr: T) -> Result<(), ChannelError> {
    if snr > T::zero() && snr.is_finite() {
        Ok(())
    } else {
        Err(ChannelError::InvalidSnr(snr.to_f64().unwrap_or(f64::NAN)))
    }
}

/// Sends `word` through the channel: `x_i = σ_i + z_i / s` with `z_i`
/// standard normal, drawn in bit order from `rng`.
pub fn transmit_awgn<T, R>(
    word: &HardWord,
    snr: T,
    rng: &mut R,
) -> Result<ChannelOutput<T>, ChannelError>
where
    T: Scalar,
    R: Rng + ?Sized,
    StandardNormal: Distribution<T>,
{
    check_snr(snr)?;
    let sigma = snr.sqrt().recip();
    let received = word
        .spins()
        .iter()
        .map(|&s| {
            let z: T = StandardNormal.sample(rng);
            T::from_i8(s).expect("spin") + z * sigma
        })
        .collect();
    Ok(ChannelOutput { received, snr })
}

/// `h_i = s² x_i`.
pub fn llr_from_channel<T: Scalar>(out: &ChannelOutput<T>) -> LlrVector<T> {
    LlrVector(out.received.iter().map(|&x| out.snr * x).collect())
}

/// Noise stream for one Monte-Carlo trial. Depends only on the master seed
/// and the trial index, never on which worker runs the trial.
pub fn trial_rng(master_seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial);
    rng
}

/// Channel LLRs for the all-`+1` word, for trial `trial` of a run.
pub fn all_plus_trial_llrs<T>(
    n: usize,
    snr: T,
    master_seed: u64,
    trial: u64,
) -> Result<LlrVector<T>, ChannelError>
where
    T: Scalar,
    StandardNormal: Distribution<T>,
{
    let mut rng = trial_rng(master_seed, trial);
    let out = transmit_awgn(&HardWord::all_plus(n), snr, &mut rng)?;
    Ok(llr_from_channel(&out))
}
