//! Building blocks for directional frame-timing synchronization over
//! hybrid-beamformed mmWave OFDM links with low-resolution ADCs.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is a pure
//! function of its inputs; randomness always comes in through an explicit
//! RNG argument so callers control seeding.

#![no_std]

extern crate alloc;

pub mod beamforming;
pub mod channel;
pub mod detector;
mod error;
pub mod fft;
pub mod optimizer;
pub mod quantization;
pub mod sqnr;
pub mod waveform;

pub use error::{Error, Result};

/// Complex sample type used throughout.
pub type C64 = num_complex::Complex64;
