//! Zero-lag synchronization SQNR under a frequency-flat channel.
//!
//! With Bussgang gain η, received signal power `S` and noise variance σ²,
//!
//! ```text
//! γ = η·S / (η·σ² + (1−η)(S + σ²))
//! ```
//!
//! Writing `S = g²·S_t` with `S_t = |a_tx^H f|²` and `λ = σ²/g²` gives the
//! λ-form used by the beam-selection objective. The worst-case bound
//! replaces λ by `λ_max` and ξ by `ξ_max`. Moving λ up to `λ_max` only
//! lowers γ when `λ ≥ S_t/2` (post-beamforming SNR at most 3 dB); below
//! that the expression is not monotone in λ.

#[allow(unused_imports)] // inherent f64 methods win when std is in the build graph
use num_traits::Float;

use crate::error::domain;
use crate::quantization::bussgang_decompose;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqnrInputs {
    /// Received signal power `S`.
    pub effective_gain_sq: f64,
    pub noise_var: f64,
    pub eta: f64,
}

impl SqnrInputs {
    /// η from the flat-channel Bussgang factor `(1−ξ)/√(S+σ²)`.
    pub fn from_xi(effective_gain_sq: f64, noise_var: f64, xi: f64) -> Result<Self> {
        let stats = bussgang_decompose(&[effective_gain_sq], noise_var, xi)?;
        Ok(SqnrInputs {
            effective_gain_sq,
            noise_var,
            eta: stats.eta[0],
        })
    }

    /// Same link after an AGC that scales the input to unit power, so η = 1−ξ.
    pub fn agc_normalized(effective_gain_sq: f64, noise_var: f64, xi: f64) -> Result<Self> {
        let v = effective_gain_sq + noise_var;
        if !(v > 0.0) {
            return domain("total received power must be positive");
        }
        Self::from_xi(effective_gain_sq / v, noise_var / v, xi)
    }
}

pub fn sqnr_single_beam(inputs: &SqnrInputs) -> Result<f64> {
    let SqnrInputs {
        effective_gain_sq: s,
        noise_var,
        eta,
    } = *inputs;
    if s < 0.0 || noise_var < 0.0 || !(eta > 0.0) {
        return domain("SQNR inputs must be nonnegative with η > 0");
    }
    let den = eta * noise_var + (1.0 - eta) * (s + noise_var);
    if den == 0.0 {
        return domain("SQNR denominator is zero");
    }
    Ok(eta * s / den)
}

/// γ for beamforming gain `s_t` and inverse SNR `lambda`, with η taken from
/// `(1−ξ)/√(σ²(s_t/λ + 1))`.
pub fn sqnr_lambda_form(s_t: f64, lambda: f64, xi: f64, noise_var: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return domain("λ must be positive");
    }
    let g2 = noise_var / lambda;
    sqnr_single_beam(&SqnrInputs::from_xi(g2 * s_t, noise_var, xi)?)
}

/// γ̆: the user's γ with its inverse SNR replaced by `lambda_max`.
pub fn sqnr_worst_case(s_t: f64, lambda_max: f64, xi: f64, noise_var: f64) -> Result<f64> {
    sqnr_lambda_form(s_t, lambda_max, xi, noise_var)
}

/// γ́ = S/(λ + [√(σ²(S/λ+1))/(1−ξ) − 1]·(S+λ)).
pub fn sqnr_lower_bound(s_t: f64, lambda_max: f64, xi_max: f64, noise_var: f64) -> Result<f64> {
    if !(lambda_max > 0.0) {
        return domain("λ_max must be positive");
    }
    if !(0.0..1.0).contains(&xi_max) {
        return domain("ξ_max must lie in [0, 1)");
    }
    if s_t < 0.0 || noise_var < 0.0 {
        return domain("gain and noise variance must be nonnegative");
    }
    let bracket = (noise_var * (s_t / lambda_max + 1.0)).sqrt() / (1.0 - xi_max) - 1.0;
    Ok(s_t / (lambda_max + bracket * (s_t + lambda_max)))
}

/// Single-beam name for [`sqnr_lower_bound`].
pub fn sqnr_lower_bound_single(gain_sq: f64, lambda_max: f64, xi_max: f64, noise_var: f64) -> Result<f64> {
    sqnr_lower_bound(gain_sq, lambda_max, xi_max, noise_var)
}

/// Received power of a composite beam: `g²|[a_rx]_b|²·|h^Ω|²/N_RF`.
pub fn multi_beam_signal_power(composite_gain_sq: f64, rx_gain_sq: f64, n_rf: usize) -> f64 {
    rx_gain_sq * composite_gain_sq / n_rf as f64
}

/// `λ′ = N_RF·σ²/(g²|[a_rx]_b|²)`.
pub fn lambda_prime(n_rf: usize, noise_var: f64, rx_gain_sq: f64) -> f64 {
    n_rf as f64 * noise_var / rx_gain_sq
}

pub fn sqnr_multi_beam(
    composite_gain_sq: f64,
    rx_gain_sq: f64,
    n_rf: usize,
    noise_var: f64,
    xi: f64,
) -> Result<f64> {
    if n_rf == 0 {
        return domain("N_RF must be at least 1");
    }
    let s = multi_beam_signal_power(composite_gain_sq, rx_gain_sq, n_rf);
    sqnr_single_beam(&SqnrInputs::from_xi(s, noise_var, xi)?)
}

/// ς = E|Λ[0]|² / E|Λ[υ≠0]|² = 1 + γ.
pub fn correlation_power_ratio(gamma: f64) -> Result<f64> {
    if !(gamma >= 0.0) {
        return domain("γ must be nonnegative");
    }
    Ok(1.0 + gamma)
}

/// E|Λ[υ]|² at a non-zero lag for a unit-energy reference.
pub fn nonzero_lag_power(eta: f64, s: f64, noise_var: f64) -> f64 {
    eta * eta * noise_var + eta * (1.0 - eta) * (s + noise_var)
}

/// E|Λ[0]|² for a unit-energy reference.
pub fn zero_lag_power(eta: f64, s: f64, noise_var: f64) -> f64 {
    eta * eta * s + nonzero_lag_power(eta, s, noise_var)
}
