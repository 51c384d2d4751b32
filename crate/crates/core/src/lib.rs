//! Relaxed belief-propagation decoding of LDPC codes.
//!
//! The crate is generic over the floating-point type through [`Scalar`];
//! the aliases below fix it to `f64`, which is what the experiments use.

pub mod bethe;
pub mod channel;
pub mod code;
pub mod decoder;
pub mod experiments;
pub mod scalar;

pub use code::{gf2_rank, parse_alist, tanner_155_64, HardWord, ParityCheckCode};
pub use decoder::{DecodeResult, DecodeStatus, DecoderConfig, Delta, Variant};
pub use scalar::Scalar;

pub type Messages = decoder::Messages<f64>;
pub type Messages32 = decoder::Messages<f32>;
pub type LlrVector = channel::LlrVector<f64>;
pub type LlrVector32 = channel::LlrVector<f32>;
pub type ChannelOutput = channel::ChannelOutput<f64>;
pub type Decoder<'c> = decoder::Decoder<'c, f64>;
pub type Decoder32<'c> = decoder::Decoder<'c, f32>;
pub type Beliefs = bethe::Beliefs<f64>;
pub type FreeEnergyReport = bethe::FreeEnergyReport<f64>;
