//! Zadoff-Chu synchronization sequences and their OFDM waveform.
//!
//! The frequency grid is stored in centered order: index `N/2` is the DC
//! subcarrier and index 0 is the most negative frequency. [`OfdmGrid::dft_order`]
//! converts to the usual FFT ordering.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)] // inherent f64 methods win when std is in the build graph
use num_traits::Float;

use crate::error::domain;
use crate::fft::{unitary_dft, unitary_idft};
use crate::{Result, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct ZcSequence {
    pub root: usize,
    pub length: usize,
    pub samples: Vec<C64>,
}

impl ZcSequence {
    /// `s[m] = exp(−jπ·m(m+1)·root / length)`.
    pub fn new(root: usize, length: usize) -> Result<Self> {
        if length == 0 {
            return domain("ZC length must be at least 1");
        }
        if root >= length {
            return domain(alloc::format!(
                "ZC root {root} out of range for length {length}"
            ));
        }
        let l = length as u128;
        let samples = (0..length as u128)
            .map(|m| {
                // reduce the quadratic phase exactly before going to floating point
                let k = (m * (m + 1) * root as u128) % (2 * l);
                let ang = -PI * k as f64 / length as f64;
                C64::new(ang.cos(), ang.sin())
            })
            .collect();
        Ok(ZcSequence {
            root,
            length,
            samples,
        })
    }

    /// Raw cyclic autocorrelation `R[υ] = Σ_m s[(m+υ) mod L]·s*[m]` for every lag.
    pub fn cyclic_autocorrelation(&self) -> Vec<C64> {
        let l = self.length;
        (0..l)
            .map(|lag| {
                (0..l)
                    .map(|m| self.samples[(m + lag) % l] * self.samples[m].conj())
                    .sum()
            })
            .collect()
    }

    /// Autocorrelation divided by the sequence length, so lag 0 has magnitude 1.
    pub fn normalized_autocorrelation(&self) -> Vec<C64> {
        let s = 1.0 / self.length as f64;
        self.cyclic_autocorrelation()
            .into_iter()
            .map(|v| v * s)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OfdmGrid {
    pub n_subcarriers: usize,
    /// Centered-order symbols d̃[k].
    pub symbols: Vec<C64>,
    /// Centered index of the DC subcarrier, always `N/2`.
    pub dc_index: usize,
    /// First centered index of the mapped band.
    pub band_start: usize,
    pub band_len: usize,
}

impl OfdmGrid {
    /// Place `seq` on the central subcarriers, starting at `⌊(N−L−1)/2⌋+1`.
    ///
    /// When the band has subcarriers on both sides of DC, the element that
    /// lands on DC is zeroed instead of shifting the band.
    pub fn map_zc(seq: &ZcSequence, n_subcarriers: usize) -> Result<Self> {
        let n = n_subcarriers;
        let l = seq.length;
        if n <= l {
            return domain(alloc::format!(
                "sequence of length {l} does not fit a grid of {n} subcarriers"
            ));
        }
        let start = (n - l - 1) / 2 + 1;
        let dc = n / 2;
        let mut symbols = vec![C64::new(0.0, 0.0); n];
        symbols[start..start + l].copy_from_slice(&seq.samples);
        if start < dc && dc < start + l - 1 {
            symbols[dc] = C64::new(0.0, 0.0);
        }
        Ok(OfdmGrid {
            n_subcarriers: n,
            symbols,
            dc_index: dc,
            band_start: start,
            band_len: l,
        })
    }

    /// Build a grid directly from centered-order symbols.
    pub fn from_centered(symbols: Vec<C64>) -> Result<Self> {
        if symbols.is_empty() {
            return domain("grid must have at least one subcarrier");
        }
        let n = symbols.len();
        Ok(OfdmGrid {
            n_subcarriers: n,
            symbols,
            dc_index: n / 2,
            band_start: 0,
            band_len: n,
        })
    }

    /// The mapped band, including a punctured DC element if any.
    pub fn band(&self) -> &[C64] {
        &self.symbols[self.band_start..self.band_start + self.band_len]
    }

    /// Symbols in FFT order (DC at index 0).
    pub fn dft_order(&self) -> Vec<C64> {
        let n = self.n_subcarriers;
        let mut out = vec![C64::new(0.0, 0.0); n];
        for (k, v) in self.symbols.iter().enumerate() {
            out[(k + n - self.dc_index) % n] = *v;
        }
        out
    }

    /// Inverse of [`dft_order`](Self::dft_order).
    pub fn centered_from_dft(&self, dft: &[C64]) -> Vec<C64> {
        let n = self.n_subcarriers;
        (0..n).map(|k| dft[(k + n - self.dc_index) % n]).collect()
    }

    pub fn energy(&self) -> f64 {
        self.symbols.iter().map(|v| v.norm_sqr()).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyncWaveform {
    pub grid: OfdmGrid,
    /// d[n], n = 0..N.
    pub time_samples: Vec<C64>,
    pub cp_length: usize,
    pub samples_with_cp: Vec<C64>,
}

impl SyncWaveform {
    /// `d[n] = (1/√N)·Σ_k d̃[k]·e^{j2πkn/N}` with k in FFT order, then a
    /// cyclic prefix of `cp_length` samples.
    pub fn modulate(grid: OfdmGrid, cp_length: usize) -> Result<Self> {
        let n = grid.n_subcarriers;
        if cp_length >= n {
            return domain(alloc::format!(
                "CP length {cp_length} must be shorter than the symbol ({n})"
            ));
        }
        let time_samples = unitary_idft(&grid.dft_order());
        let mut samples_with_cp = Vec::with_capacity(n + cp_length);
        samples_with_cp.extend_from_slice(&time_samples[n - cp_length..]);
        samples_with_cp.extend_from_slice(&time_samples);
        Ok(SyncWaveform {
            grid,
            time_samples,
            cp_length,
            samples_with_cp,
        })
    }

    /// ZC sequence → grid → time samples in one go.
    pub fn zadoff_chu(root: usize, zc_length: usize, n: usize, cp_length: usize) -> Result<Self> {
        let seq = ZcSequence::new(root, zc_length)?;
        Self::modulate(OfdmGrid::map_zc(&seq, n)?, cp_length)
    }

    pub fn n(&self) -> usize {
        self.grid.n_subcarriers
    }

    /// Mean per-sample power of d[n].
    pub fn sample_power(&self) -> f64 {
        self.time_samples.iter().map(|v| v.norm_sqr()).sum::<f64>() / self.n() as f64
    }

    /// Centered-order unitary spectrum of a length-N time burst.
    pub fn spectrum_of(&self, burst: &[C64]) -> Result<Vec<C64>> {
        if burst.len() != self.n() {
            return Err(crate::Error::Dimension {
                expected: self.n(),
                got: burst.len(),
            });
        }
        Ok(self.grid.centered_from_dft(&unitary_dft(burst)))
    }
}
