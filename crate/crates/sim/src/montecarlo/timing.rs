//! Frame-timing detection over SNR and CFO grids.

use beamsync_core::detector::{detect, nmse_term};
use rayon::prelude::*;
use serde::Serialize;

use super::{bits_label, stream_key, trial_rng, unit_noise, with_noise, Scene, Setup};
use crate::stats::{MeanSummary, Proportion};
use crate::SimError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimingRow {
    pub method: String,
    pub trial: u64,
    pub slot: usize,
    pub snr_db: f64,
    pub bits: String,
    pub cfo: f64,
    pub nu_true: usize,
    pub nu_hat: usize,
    pub b_hat: usize,
    pub peak_power: f64,
    pub success: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimingPoint {
    pub method: String,
    pub bits: String,
    pub snr_db: f64,
    pub cfo: f64,
    pub nmse: MeanSummary,
    pub success: Proportion,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimingResult {
    pub rows: Vec<TimingRow>,
    pub points: Vec<TimingPoint>,
}

impl TimingResult {
    pub fn point(&self, method: &str, bits: &str, snr_db: f64, cfo: f64) -> Option<&TimingPoint> {
        self.points
            .iter()
            .find(|p| p.method == method && p.bits == bits && p.snr_db == snr_db && p.cfo == cfo)
    }
}

/// One detection per (plan, point) for the scene's serving slot.
pub(crate) fn detect_scene(
    setup: &Setup,
    scene: &Scene,
    noise: &[Vec<beamsync_core::C64>],
    points: &[(f64, f64)],
    slot: usize,
) -> Result<Vec<Vec<beamsync_core::detector::Detection>>, SimError> {
    let mut out = Vec::with_capacity(setup.plans.len());
    for plan in &setup.plans {
        let mut per_point = Vec::with_capacity(points.len());
        let mut cached: Option<(f64, Vec<Vec<beamsync_core::C64>>)> = None;
        for &(snr, cfo) in points {
            if cached.as_ref().is_none_or(|(c, _)| c.to_bits() != cfo.to_bits()) {
                cached = Some((cfo, setup.render(scene, plan, slot, cfo)?));
            }
            let signal = &cached.as_ref().unwrap().1;
            let mut block = with_noise(signal, noise, setup.noise_var(snr));
            setup.quantize(&mut block, plan.resolution)?;
            per_point.push(detect(&setup.correlator.correlate(&block)?)?);
        }
        out.push(per_point);
    }
    Ok(out)
}

pub(crate) fn run_detection_points(setup: &Setup, experiment: &str, points: &[(f64, f64)]) -> Result<TimingResult, SimError> {
    let sc = &setup.scenario;
    let key = stream_key(sc, experiment);
    let per_trial: Vec<(usize, usize, Vec<Vec<beamsync_core::detector::Detection>>)> = (0..sc.trials as u64)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(&key, trial);
            let scene = setup.draw_scene(&mut rng)?;
            let noise = unit_noise(setup.rx.n_elements(), setup.block_len(), &mut rng);
            let det = detect_scene(setup, &scene, &noise, points, scene.slot)?;
            Ok((scene.t, scene.slot, det))
        })
        .collect::<Result<_, SimError>>()?;

    let mut rows = Vec::with_capacity(per_trial.len() * points.len() * setup.plans.len());
    let mut summary = Vec::new();
    for (k, &(snr, cfo)) in points.iter().enumerate() {
        for (pi, plan) in setup.plans.iter().enumerate() {
            let method = plan.method.name().to_string();
            let bits = bits_label(plan.resolution);
            let mut nmse = Vec::with_capacity(per_trial.len());
            let mut hits = 0;
            for (trial, &(t, slot, ref det)) in per_trial.iter().enumerate() {
                let d = det[pi][k];
                let success = d.nu_hat == t;
                hits += success as usize;
                nmse.push(nmse_term(t, d.nu_hat)?);
                rows.push(TimingRow {
                    method: method.clone(),
                    trial: trial as u64,
                    slot,
                    snr_db: snr,
                    bits: bits.clone(),
                    cfo,
                    nu_true: t,
                    nu_hat: d.nu_hat,
                    b_hat: d.b_hat,
                    peak_power: d.peak_power,
                    success,
                });
            }
            summary.push(TimingPoint {
                method,
                bits,
                snr_db: snr,
                cfo,
                nmse: MeanSummary::of(&nmse),
                success: Proportion::wilson(hits, per_trial.len()),
            });
        }
    }
    Ok(TimingResult { rows, points: summary })
}

/// NMSE and detection probability across the SNR grid.
pub fn run_timing_experiment(setup: &Setup) -> Result<TimingResult, SimError> {
    let cfo = setup.scenario.cfo.timing_cfo_subcarriers;
    let points: Vec<(f64, f64)> = setup.scenario.snr.snr_db.iter().map(|&s| (s, cfo)).collect();
    run_detection_points(setup, "timing", &points)
}

/// NMSE and detection probability across the CFO grid at one SNR.
pub fn run_cfo_experiment(setup: &Setup) -> Result<TimingResult, SimError> {
    let c = &setup.scenario.cfo;
    let points: Vec<(f64, f64)> = c.cfo_subcarriers.iter().map(|&e| (c.snr_db, e)).collect();
    run_detection_points(setup, "cfo", &points)
}
