//! Seven-cell detection and synchronization-slot access.
//!
//! Every site transmits its own root in the same slot with the beam of the
//! same anchor index in its own sector frame. Only users of the central
//! cell are measured.

use rayon::prelude::*;
use serde::Serialize;

use super::timing::{detect_scene, run_detection_points};
use super::{bits_label, stream_key, trial_rng, unit_noise, Setup, TimingResult};
use crate::config::Mode;
use crate::stats::Proportion;
use crate::SimError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AccessRow {
    pub method: String,
    pub bits: String,
    pub snr_db: f64,
    pub drop: u64,
    /// First slot in which the timing was found; empty when the sweep failed.
    pub first_slot: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AccessSummary {
    pub method: String,
    pub bits: String,
    pub snr_db: f64,
    /// `None` collects the users never synchronized within one sweep.
    pub slot: Option<usize>,
    pub probability: Proportion,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MulticellResult {
    pub detection: TimingResult,
    pub access_rows: Vec<AccessRow>,
    pub access: Vec<AccessSummary>,
}

pub fn run_multicell_experiment(setup: &Setup) -> Result<MulticellResult, SimError> {
    let sc = &setup.scenario;
    if sc.mode != Mode::MultiCell {
        return Err(SimError::Config(
            "mode: the multicell experiment needs mode = \"multi_cell\"".into(),
        ));
    }
    let cfo = sc.cfo.timing_cfo_subcarriers;
    let points: Vec<(f64, f64)> = sc.snr.snr_db.iter().map(|&s| (s, cfo)).collect();
    let detection = run_detection_points(setup, "multicell", &points)?;
    if !sc.multicell.access {
        return Ok(MulticellResult {
            detection,
            access_rows: Vec::new(),
            access: Vec::new(),
        });
    }

    let key = stream_key(sc, "access");
    let noise_key = stream_key(sc, "access-noise");
    let t_bs = sc.bs.t_bs as u64;
    // first_slot[drop][plan][snr]
    let first: Vec<Vec<Vec<Option<usize>>>> = (0..sc.multicell.access_drops as u64)
        .into_par_iter()
        .map(|drop| {
            let mut rng = trial_rng(&key, drop);
            let scene = setup.draw_scene(&mut rng)?;
            let mut out = vec![vec![None; points.len()]; setup.plans.len()];
            let mut pending: Vec<(usize, usize)> = (0..setup.plans.len())
                .flat_map(|p| (0..points.len()).map(move |k| (p, k)))
                .collect();
            for slot in 0..sc.bs.t_bs {
                if pending.is_empty() {
                    break;
                }
                let mut nrng = trial_rng(&noise_key, drop * t_bs + slot as u64);
                let noise = unit_noise(setup.rx.n_elements(), setup.block_len(), &mut nrng);
                let det = detect_scene(setup, &scene, &noise, &points, slot)?;
                pending.retain(|&(p, k)| {
                    if det[p][k].nu_hat == scene.t {
                        out[p][k] = Some(slot);
                        false
                    } else {
                        true
                    }
                });
            }
            Ok(out)
        })
        .collect::<Result<_, SimError>>()?;

    let mut access_rows = Vec::new();
    let mut access = Vec::new();
    let drops = first.len();
    for (k, &(snr, _)) in points.iter().enumerate() {
        for (p, plan) in setup.plans.iter().enumerate() {
            let method = plan.method.name().to_string();
            let bits = bits_label(plan.resolution);
            let mut counts = vec![0usize; sc.bs.t_bs + 1];
            for (drop, f) in first.iter().enumerate() {
                counts[f[p][k].unwrap_or(sc.bs.t_bs)] += 1;
                access_rows.push(AccessRow {
                    method: method.clone(),
                    bits: bits.clone(),
                    snr_db: snr,
                    drop: drop as u64,
                    first_slot: f[p][k],
                });
            }
            for (slot, &c) in counts.iter().enumerate() {
                access.push(AccessSummary {
                    method: method.clone(),
                    bits: bits.clone(),
                    snr_db: snr,
                    slot: (slot < sc.bs.t_bs).then_some(slot),
                    probability: Proportion::wilson(c, drops),
                });
            }
        }
    }
    Ok(MulticellResult {
        detection,
        access_rows,
        access,
    })
}
