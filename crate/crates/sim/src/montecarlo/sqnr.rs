//! Empirical zero-lag SQNR.
//!
//! The burst is received `R` times with fresh noise at the true timing and
//! the zero-lag correlation `Γ_r = Σ_n q_r[n]·d*[n]` is split into its
//! Bussgang signal term and the rest:
//!
//! ```text
//! γ̂ = |η̂·Σ s[n]·d*[n]|² / (N · mean_r |Γ_r − η̂·Σ s[n]·d*[n]|²)
//! ```
//!
//! is the per-sample SQNR: the factor `N` removes the correlation's
//! processing gain, so γ̂ is directly comparable with the flat-channel
//! Bussgang expression.

use beamsync_core::quantization::{per_rail_rms, AdcModel, Resolution};
use beamsync_core::sqnr::{sqnr_single_beam, SqnrInputs};
use beamsync_core::C64;
use rayon::prelude::*;
use serde::Serialize;

use super::{bits_label, stream_key, trial_rng, unit_noise, Setup};
use crate::config::Regime;
use crate::stats::{Cdf, MeanSummary};
use crate::SimError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SqnrRow {
    pub method: String,
    pub bits: String,
    pub snr_db: f64,
    pub sqnr_db_sample: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SqnrSummary {
    pub method: String,
    pub bits: String,
    pub snr_db: f64,
    /// Mean of the linear per-trial SQNR.
    pub sqnr: MeanSummary,
    pub mean_sqnr_db: f64,
    /// Mean flat-channel prediction for the same links; NaN off the flat regime.
    pub analytic_mean: f64,
    #[serde(skip)]
    pub cdf_db: Cdf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SqnrResult {
    pub rows: Vec<SqnrRow>,
    pub summaries: Vec<SqnrSummary>,
}

impl SqnrResult {
    pub fn summary(&self, method: &str, bits: &str, snr_db: f64) -> Option<&SqnrSummary> {
        self.summaries
            .iter()
            .find(|s| s.method == method && s.bits == bits && s.snr_db == snr_db)
    }
}

/// γ̂ for a clean burst observed through `noise` (one row per realization).
///
/// The quantized output is split as `q = η̂·x + e` with the Bussgang gain
/// `η̂ = Σ q·x* / Σ|x|²` pooled over all realizations; the signal term of
/// `Γ` is `η̂·Σ s·d*` and everything else, quantization error included, is
/// counted as noise.
pub fn empirical_zero_lag_sqnr(
    clean: &[C64],
    reference: &[C64],
    noise: &[Vec<C64>],
    noise_var: f64,
    resolution: Resolution,
) -> Result<f64, SimError> {
    let adc = AdcModel::new(resolution)?;
    let s = noise_var.sqrt();
    let n = clean.len();
    let mut x = vec![C64::new(0.0, 0.0); n];
    let mut q = vec![C64::new(0.0, 0.0); n];
    let (mut qx, mut xx) = (C64::new(0.0, 0.0), 0.0);
    let mut gammas = Vec::with_capacity(noise.len());
    for row in noise {
        for ((xi, c), v) in x.iter_mut().zip(clean).zip(row) {
            *xi = c + v * s;
        }
        q.copy_from_slice(&x);
        let rms = per_rail_rms(&x);
        if rms > 0.0 {
            adc.apply_in_place(&mut q, rms)?;
        }
        for (a, b) in q.iter().zip(&x) {
            qx += a * b.conj();
            xx += b.norm_sqr();
        }
        gammas.push(q.iter().zip(reference).map(|(a, d)| a * d.conj()).sum::<C64>());
    }
    if xx == 0.0 {
        return Ok(0.0);
    }
    let eta = qx / xx;
    let signal = eta * clean.iter().zip(reference).map(|(a, d)| a * d.conj()).sum::<C64>();
    let err = gammas.iter().map(|g| (g - signal).norm_sqr()).sum::<f64>() / gammas.len() as f64;
    Ok(signal.norm_sqr() / (n as f64 * err))
}

struct TrialSqnr {
    /// `[plan][snr]` empirical and analytic values.
    empirical: Vec<Vec<f64>>,
    analytic: Vec<Vec<f64>>,
}

pub fn run_sqnr_experiment(setup: &Setup) -> Result<SqnrResult, SimError> {
    let sc = &setup.scenario;
    let key = stream_key(sc, "sqnr");
    let n = sc.ofdm.n_subcarriers;
    let d = &setup.waveform.time_samples;
    let snrs = &sc.snr.snr_db;

    let trials: Vec<TrialSqnr> = (0..sc.trials as u64)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(&key, trial);
            // interference is left out: the SQNR is a property of the serving link
            let scene = setup.draw_scene(&mut rng)?;
            let (ch, slot) = (&scene.links[0].channel, scene.slot);
            let noise = unit_noise(sc.sqnr.realizations, n, &mut rng);
            let mut empirical = Vec::with_capacity(setup.plans.len());
            let mut analytic = Vec::with_capacity(setup.plans.len());
            for plan in &setup.plans {
                let taps = ch.effective_taps(&plan.tx_vectors[slot])?;
                // noiseless bursts, antenna picked by the zero-lag magnitude
                let mut best = (f64::NEG_INFINITY, Vec::new());
                for h in &taps {
                    let mut row = vec![vec![C64::new(0.0, 0.0); n]];
                    beamsync_core::channel::add_burst(&mut row, std::slice::from_ref(h), d, 0, 0.0)?;
                    let row = row.remove(0);
                    let g: C64 = row.iter().zip(d).map(|(q, r)| q * r.conj()).sum();
                    if g.norm_sqr() > best.0 {
                        best = (g.norm_sqr(), row);
                    }
                }
                let clean = best.1;
                let signal_power = clean.iter().map(|v| v.norm_sqr()).sum::<f64>() / n as f64;
                let mut e = Vec::with_capacity(snrs.len());
                let mut a = Vec::with_capacity(snrs.len());
                for &snr in snrs {
                    let var = setup.noise_var(snr);
                    e.push(empirical_zero_lag_sqnr(&clean, d, &noise, var, plan.resolution)?);
                    a.push(if sc.channel.regime == Regime::Flat {
                        sqnr_single_beam(&SqnrInputs::agc_normalized(signal_power, var, plan.xi)?)?
                    } else {
                        f64::NAN
                    });
                }
                empirical.push(e);
                analytic.push(a);
            }
            Ok(TrialSqnr { empirical, analytic })
        })
        .collect::<Result<_, SimError>>()?;

    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    for (si, &snr) in snrs.iter().enumerate() {
        for (pi, plan) in setup.plans.iter().enumerate() {
            let method = plan.method.name().to_string();
            let bits = bits_label(plan.resolution);
            let lin: Vec<f64> = trials.iter().map(|t| t.empirical[pi][si]).collect();
            let db: Vec<f64> = lin.iter().map(|g| 10.0 * g.log10()).collect();
            for &v in &db {
                rows.push(SqnrRow {
                    method: method.clone(),
                    bits: bits.clone(),
                    snr_db: snr,
                    sqnr_db_sample: v,
                });
            }
            let stats = MeanSummary::of(&lin);
            let analytic: Vec<f64> = trials.iter().map(|t| t.analytic[pi][si]).collect();
            summaries.push(SqnrSummary {
                method,
                bits,
                snr_db: snr,
                mean_sqnr_db: 10.0 * stats.mean.log10(),
                sqnr: stats,
                analytic_mean: MeanSummary::of(&analytic).mean,
                cdf_db: Cdf::of(&db),
            });
        }
    }
    Ok(SqnrResult { rows, summaries })
}
