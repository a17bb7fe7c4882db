//! Physical-layer building blocks for the VIS-SemCom system.
//!
//! This crate simulates the wireless link that sits between the semantic
//! encoder and decoder: a time-varying Rayleigh fading channel with Doppler
//! phase rotation (plus plain AWGN and a noiseless identity mode), a
//! zero-forcing equalizer, Gray-mapped QAM with soft demodulation, and a
//! quasi-cyclic rate-2/3 LDPC code for the conventional transmission
//! baseline.
//!
//! Everything here is deterministic given a seed: equal `(config, seed)`
//! pairs produce bit-identical realizations, and per-block RNG streams are
//! derived from a master seed so parallel evaluation matches serial
//! evaluation.

pub mod channel;
pub mod interleave;
pub mod ldpc;
pub mod qam;
pub mod util;

pub use channel::{
    block_rng, doppler_shift, equalize, sample_fading, snr_to_noise_var, transmit, ChannelConfig,
    ChannelMode, ChannelRealization, Equalized,
};
pub use ldpc::{LdpcCode, LdpcDecodeAlgo};
pub use qam::{qam_demodulate, qam_demodulate_hard, qam_modulate, QamOrder};

use thiserror::Error;

/// Errors produced by the physical-layer components.
#[derive(Debug, Error)]
pub enum PhyError {
    /// Channel input violated the unit-average-power contract.
    #[error("channel input is not power-normalized: mean |x|^2 = {power}")]
    NotNormalized { power: f64 },
    /// Bit count incompatible with the modulation order.
    #[error("bit count {nbits} is not divisible by {bits_per_symbol} (order {order})")]
    BitCount {
        nbits: usize,
        bits_per_symbol: usize,
        order: usize,
    },
    /// Malformed LDPC matrix description.
    #[error("invalid LDPC matrix: {0}")]
    BadMatrix(String),
    /// Length mismatch between related vectors.
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
}
