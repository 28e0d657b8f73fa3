//! Shape of the correlation profile with and without quantization.
//!
//! One antenna, no beamforming, AWGN: the burst sits at a random offset in
//! a `T_UE`-symbol window and the ADC gain is set from the whole window.

use beamsync_core::detector::Correlator;
use beamsync_core::quantization::{per_rail_rms, AdcModel, Resolution};
use beamsync_core::waveform::SyncWaveform;
use beamsync_core::C64;
use rand::Rng;
use rayon::prelude::*;

use super::{trial_rng, unit_noise};
use crate::stats::MeanSummary;
use crate::SimError;

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationShape {
    /// `|Γ[t]|` at the true offset, unquantized and quantized.
    pub peak_inf: MeanSummary,
    pub peak_quantized: MeanSummary,
    /// Mean `|Γ[ν]|` over all other lags.
    pub off_peak_inf: MeanSummary,
    pub off_peak_quantized: MeanSummary,
}

pub fn correlation_shape(
    waveform: &SyncWaveform,
    t_ue: usize,
    snr_db: f64,
    resolution: Resolution,
    trials: usize,
    seed: u64,
) -> Result<CorrelationShape, SimError> {
    let n = waveform.n();
    let len = n * t_ue;
    let corr = Correlator::new(&waveform.time_samples, len)?;
    let adc = AdcModel::new(resolution)?;
    let var = waveform.sample_power() * 10f64.powf(-snr_db / 10.0);
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(b"profile\0");

    let per: Vec<[f64; 4]> = (0..trials as u64)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(&key, trial);
            let t = rng.random_range(1..=n * (t_ue - 1));
            let mut block = unit_noise(1, len, &mut rng);
            let s = var.sqrt();
            for v in block[0].iter_mut() {
                *v *= s;
            }
            for (v, d) in block[0][t..t + n].iter_mut().zip(&waveform.time_samples) {
                *v += d;
            }
            let a = corr.correlate(&block)?;
            let rms = per_rail_rms(&block[0]);
            adc.apply_in_place(&mut block[0], rms)?;
            let b = corr.correlate(&block)?;
            let stats = |row: &[C64]| {
                let off = row
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != t)
                    .map(|(_, v)| v.norm())
                    .sum::<f64>()
                    / (row.len() - 1) as f64;
                (row[t].norm(), off)
            };
            let (pa, oa) = stats(&a.per_antenna[0]);
            let (pb, ob) = stats(&b.per_antenna[0]);
            Ok([pa, pb, oa, ob])
        })
        .collect::<Result<_, SimError>>()?;
    let col = |i: usize| MeanSummary::of(&per.iter().map(|v| v[i]).collect::<Vec<_>>());
    Ok(CorrelationShape {
        peak_inf: col(0),
        peak_quantized: col(1),
        off_peak_inf: col(2),
        off_peak_quantized: col(3),
    })
}
