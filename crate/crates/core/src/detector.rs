//! Correlation-based frame-timing detection at the user.
//!
//! Every receive antenna is correlated against the stored, unquantized
//! synchronization waveform; the timing estimate is the lag and antenna of
//! the largest correlation power.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::domain;
use crate::fft::{unitary_dft, Fft};
use crate::waveform::OfdmGrid;
use crate::{Error, Result, C64};

/// `Γ_b[ν] = Σ_n q_b[n+ν]·d*[n]` for `ν = 0..=len−N`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationProfile {
    pub per_antenna: Vec<Vec<C64>>,
}

impl CorrelationProfile {
    pub fn lags(&self) -> usize {
        self.per_antenna.first().map_or(0, |r| r.len())
    }
}

/// FFT-based correlator for a fixed reference and block length.
#[derive(Debug, Clone)]
pub struct Correlator {
    reference: Vec<C64>,
    block_len: usize,
    fft: Fft,
    ref_spectrum: Vec<C64>,
}

impl Correlator {
    pub fn new(reference: &[C64], block_len: usize) -> Result<Self> {
        let n = reference.len();
        if n == 0 || block_len < n {
            return domain("block must be at least as long as the reference");
        }
        let size = block_len.next_power_of_two();
        let fft = Fft::new(size);
        let mut spectrum = vec![C64::new(0.0, 0.0); size];
        spectrum[..n].copy_from_slice(reference);
        fft.forward(&mut spectrum);
        let scale = 1.0 / size as f64;
        for v in spectrum.iter_mut() {
            *v = v.conj() * scale;
        }
        Ok(Correlator {
            reference: reference.to_vec(),
            block_len,
            fft,
            ref_spectrum: spectrum,
        })
    }

    pub fn reference(&self) -> &[C64] {
        &self.reference
    }

    pub fn correlate(&self, received: &[Vec<C64>]) -> Result<CorrelationProfile> {
        let lags = self.block_len - self.reference.len() + 1;
        let mut buf = vec![C64::new(0.0, 0.0); self.fft.len()];
        let mut out = Vec::with_capacity(received.len());
        for row in received {
            if row.len() != self.block_len {
                return Err(Error::Dimension {
                    expected: self.block_len,
                    got: row.len(),
                });
            }
            buf[..row.len()].copy_from_slice(row);
            buf[row.len()..].iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
            self.fft.forward(&mut buf);
            for (v, r) in buf.iter_mut().zip(&self.ref_spectrum) {
                *v *= r;
            }
            self.fft.inverse(&mut buf);
            out.push(buf[..lags].to_vec());
        }
        Ok(CorrelationProfile { per_antenna: out })
    }
}

/// Correlate every antenna of `received` against `reference`.
pub fn correlate(received: &[Vec<C64>], reference: &[C64]) -> Result<CorrelationProfile> {
    let len = received.first().map_or(0, |r| r.len());
    Correlator::new(reference, len)?.correlate(received)
}

/// Direct sliding inner product, O(len·N).
pub fn correlate_direct(received: &[Vec<C64>], reference: &[C64]) -> Result<CorrelationProfile> {
    let n = reference.len();
    let mut out = Vec::with_capacity(received.len());
    for row in received {
        if row.len() < n || n == 0 {
            return domain("received block shorter than the reference");
        }
        out.push(
            (0..=row.len() - n)
                .map(|nu| {
                    row[nu..nu + n]
                        .iter()
                        .zip(reference)
                        .map(|(q, d)| q * d.conj())
                        .sum()
                })
                .collect(),
        );
    }
    Ok(CorrelationProfile { per_antenna: out })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detection {
    pub nu_hat: usize,
    pub b_hat: usize,
    pub peak_power: f64,
}

/// Joint argmax of `|Γ_b[ν]|²`; ties go to the smallest lag, then antenna.
pub fn detect(profile: &CorrelationProfile) -> Result<Detection> {
    let mut best: Option<Detection> = None;
    for (b, row) in profile.per_antenna.iter().enumerate() {
        for (nu, v) in row.iter().enumerate() {
            let p = v.norm_sqr();
            let take = match best {
                None => true,
                Some(d) => p > d.peak_power || (p == d.peak_power && nu < d.nu_hat),
            };
            if take {
                best = Some(Detection {
                    nu_hat: nu,
                    b_hat: b,
                    peak_power: p,
                });
            }
        }
    }
    best.ok_or_else(|| Error::Domain("empty correlation profile".into()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    pub nu_true: usize,
    pub nu_hat: usize,
    pub b_hat: usize,
    pub peak_power: f64,
    /// NaN when the trial did not measure SQNR.
    pub zero_lag_sqnr_sample: f64,
    pub success: bool,
}

impl TrialOutcome {
    pub fn new(detection: Detection, nu_true: usize, zero_lag_sqnr_sample: f64) -> Self {
        TrialOutcome {
            nu_true,
            nu_hat: detection.nu_hat,
            b_hat: detection.b_hat,
            peak_power: detection.peak_power,
            zero_lag_sqnr_sample,
            success: detection.nu_hat == nu_true,
        }
    }
}

/// `Λ[υ] = Σ_k q̃[(k+υ) mod N]·d̃*[k]` with `q̃` the unitary DFT of the burst.
pub fn freq_correlation_at_lag(burst: &[C64], grid: &OfdmGrid, lag: usize) -> Result<C64> {
    let n = grid.n_subcarriers;
    if burst.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: burst.len(),
        });
    }
    let q = grid.centered_from_dft(&unitary_dft(burst));
    Ok(grid
        .symbols
        .iter()
        .enumerate()
        .map(|(k, d)| q[(k + lag) % n] * d.conj())
        .sum())
}

pub fn zero_lag_freq_correlation(burst: &[C64], grid: &OfdmGrid) -> Result<C64> {
    freq_correlation_at_lag(burst, grid, 0)
}

/// `|(κ_true − κ_est)/κ_true|²`.
pub fn nmse_term(nu_true: usize, nu_hat: usize) -> Result<f64> {
    if nu_true == 0 {
        return domain("timing NMSE is undefined for a true timing of 0");
    }
    let e = (nu_true as f64 - nu_hat as f64) / nu_true as f64;
    Ok(e * e)
}

/// Mean of [`nmse_term`] over the outcomes.
pub fn timing_nmse(outcomes: &[TrialOutcome]) -> Result<f64> {
    if outcomes.is_empty() {
        return domain("no outcomes");
    }
    let mut acc = 0.0;
    for o in outcomes {
        acc += nmse_term(o.nu_true, o.nu_hat)?;
    }
    Ok(acc / outcomes.len() as f64)
}
