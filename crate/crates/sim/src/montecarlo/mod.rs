//! Trial-parallel experiments.
//!
//! Every trial draws its randomness from its own ChaCha8 stream, keyed by
//! the master seed, the scenario hash and the experiment name, with the
//! trial index as the stream number. Within a trial the user, the channel,
//! the true timing and the noise are drawn once and shared by every method,
//! resolution and SNR point (common random numbers), so differences between
//! methods are not masked by independent noise.

mod multicell;
mod profile;
mod sqnr;
mod timing;

pub use multicell::{run_multicell_experiment, AccessRow, AccessSummary, MulticellResult};
pub use profile::{correlation_shape, CorrelationShape};
pub use sqnr::{empirical_zero_lag_sqnr, run_sqnr_experiment, SqnrResult, SqnrRow, SqnrSummary};
pub use timing::{run_cfo_experiment, run_timing_experiment, TimingPoint, TimingResult, TimingRow};

use std::f64::consts::PI;

use beamsync_core::beamforming::{assemble_precoder, BeamSet, Codebook};
use beamsync_core::channel::{
    add_burst, build_channel, drop_users, ArrayGeometry, BeamSpaceChannel, CellLayout, ClusterModel,
    PathLossModel, PathSet, PulseShape,
};
use beamsync_core::detector::Correlator;
use beamsync_core::optimizer::{
    build_anchor_grid, complexity_report, select_multi_beam, select_single_beam, AnchorGrid,
    BoundParams, ComplexityReport, Sector,
};
use beamsync_core::quantization::{per_rail_rms, AdcModel, Resolution};
use beamsync_core::waveform::SyncWaveform;
use beamsync_core::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use sha2::{Digest, Sha256};

use crate::config::{ArrayKind, Method, Mode, Regime, Scenario};
use crate::SimError;

/// Beams of one (method, resolution) pair, one entry per synchronization slot.
#[derive(Debug, Clone)]
pub struct BeamPlan {
    pub method: Method,
    pub resolution: Resolution,
    pub xi: f64,
    pub beam_sets: Vec<BeamSet>,
    pub objectives: Vec<f64>,
    /// Antenna weights `P·1/√N_RF` (or the replicated codeword) per slot.
    pub tx_vectors: Vec<Vec<C64>>,
}

/// Everything that stays fixed across trials.
#[derive(Debug, Clone)]
pub struct Setup {
    pub scenario: Scenario,
    /// Serving-cell waveform; the correlator reference.
    pub waveform: SyncWaveform,
    /// One waveform per distinct root, serving root first.
    pub waveforms: Vec<(usize, SyncWaveform)>,
    /// Site layout in the multi-cell mode.
    pub layout: Option<CellLayout>,
    pub tx: ArrayGeometry,
    pub rx: ArrayGeometry,
    pub codebook: Codebook,
    pub sector: Sector,
    pub anchors: AnchorGrid,
    pub plans: Vec<BeamPlan>,
    pub correlator: Correlator,
    pub cluster: ClusterModel,
    pub pulse: PulseShape,
    pub path_loss: PathLossModel,
    pub sample_rate_hz: f64,
}

impl Setup {
    pub fn new(scenario: &Scenario) -> Result<Self, SimError> {
        scenario.validate()?;
        let o = &scenario.ofdm;
        let b = &scenario.bs;
        let root = match scenario.mode {
            Mode::MultiCell => scenario.cell.roots[0],
            _ => o.zc_root,
        };
        let waveform = SyncWaveform::zadoff_chu(root, o.zc_length, o.n_subcarriers, o.cp_length)?;
        let layout = match scenario.mode {
            Mode::MultiCell => Some(CellLayout::hex7(
                scenario.cell.isd_m,
                scenario.cell.min_distance_m,
                scenario.cell.roots,
            )?),
            _ => None,
        };
        let mut waveforms = vec![(root, waveform.clone())];
        for &r in layout.iter().flat_map(|l| l.roots.iter()) {
            if waveforms.iter().all(|(w, _)| *w != r) {
                waveforms.push((r, SyncWaveform::zadoff_chu(r, o.zc_length, o.n_subcarriers, o.cp_length)?));
            }
        }
        let (tx, codebook, planar) = match b.array {
            ArrayKind::Ula => (
                ArrayGeometry::ula(b.n_tot),
                Codebook::dft(b.n_tot / b.n_rf, b.oversampling)?,
                false,
            ),
            ArrayKind::Upa => (
                ArrayGeometry::upa(b.upa_nx, b.upa_ny),
                Codebook::dft_planar(b.upa_nx, b.upa_ny / b.n_rf, b.oversampling)?,
                true,
            ),
        };
        let rx = ArrayGeometry::ula(scenario.ue.m_tot);
        let deg = |v: f64| v.to_radians();
        let sector = Sector {
            az_min: deg(b.sector_az_deg[0]),
            az_max: deg(b.sector_az_deg[1]),
            el_min: if planar { deg(b.sector_el_deg[0]) } else { 0.0 },
            el_max: if planar { deg(b.sector_el_deg[1]) } else { 0.0 },
        };
        let anchors = build_anchor_grid(b.t_bs, &sector, planar)?;
        let lambda_prime = 10f64.powf(-b.worst_case_snr_db / 10.0);

        let replicated = codebook.replicated(b.n_rf)?;
        let mut plans = Vec::new();
        for &method in &scenario.methods {
            for res in scenario.resolutions() {
                let xi = AdcModel::new(res)?.xi()?;
                if let Some(p) = plans
                    .iter()
                    .find(|p: &&BeamPlan| p.method == method && p.xi.to_bits() == xi.to_bits())
                {
                    let mut p = p.clone();
                    p.resolution = res;
                    plans.push(p);
                    continue;
                }
                let params = BoundParams::from_lambda_prime(lambda_prime, b.n_rf, xi, b.bound_noise_var);
                let mut plan = BeamPlan {
                    method,
                    resolution: res,
                    xi,
                    beam_sets: Vec::with_capacity(b.t_bs),
                    objectives: Vec::with_capacity(b.t_bs),
                    tx_vectors: Vec::with_capacity(b.t_bs),
                };
                for anchor in &anchors.anchors {
                    let (set, obj, x) = match method {
                        Method::Proposed => {
                            let sel = select_multi_beam(
                                &codebook,
                                b.n_rf,
                                anchor,
                                &tx,
                                &params,
                                b.search_budget as u128,
                            )?;
                            let x = assemble_precoder(&codebook, &sel.beam_set)?.transmit_vector();
                            (sel.beam_set, sel.objective, x)
                        }
                        Method::SingleStream => {
                            let sel = select_single_beam(&replicated, anchor, &tx, &params)?;
                            let x = replicated.codewords[sel.beam_set.indices[0]].clone();
                            (sel.beam_set, sel.objective, x)
                        }
                    };
                    plan.beam_sets.push(set);
                    plan.objectives.push(obj);
                    plan.tx_vectors.push(x);
                }
                plans.push(plan);
            }
        }

        let block_len = o.n_subcarriers * o.t_ue;
        let correlator = Correlator::new(&waveform.time_samples, block_len)?;
        let c = &scenario.channel;
        let cluster = ClusterModel {
            clusters: c.clusters,
            paths_per_cluster: c.paths_per_cluster,
            aod_spread: deg(c.aod_spread_deg),
            aoa_spread: deg(c.aoa_spread_deg),
            delay_spread_s: c.delay_spread_ns * 1e-9,
            intra_delay_s: c.intra_delay_ns * 1e-9,
            cluster_shadow_db: c.cluster_shadow_db,
            k_factor_db: c.los_k_db.unwrap_or(f64::NEG_INFINITY),
        };
        let cell = &scenario.cell;
        let path_loss = PathLossModel {
            exponent: cell.pathloss_exponent,
            shadowing_db: cell.shadowing_db,
            reference_distance_m: 1.0,
            pl0_db: cell.pl0_db,
        };
        Ok(Setup {
            scenario: scenario.clone(),
            waveform,
            waveforms,
            layout,
            tx,
            rx,
            codebook,
            sector,
            anchors,
            plans,
            correlator,
            cluster,
            pulse: PulseShape::RaisedCosine { rolloff: c.rolloff },
            path_loss,
            sample_rate_hz: o.sample_rate_hz(),
        })
    }

    pub fn block_len(&self) -> usize {
        self.scenario.ofdm.n_subcarriers * self.scenario.ofdm.t_ue
    }

    /// Noise variance for a transmit SNR measured before beamforming,
    /// against a unit-power reference link.
    pub fn noise_var(&self, snr_db: f64) -> f64 {
        self.waveform.sample_power() * 10f64.powf(-snr_db / 10.0)
    }

    fn sector_half_width(&self) -> f64 {
        self.sector.az_min.abs().max(self.sector.az_max.abs())
    }

    /// Multipath for a link leaving the array at `(azimuth, elevation)` with
    /// average power `amplitude²`.
    pub fn draw_channel<R: Rng + ?Sized>(
        &self,
        azimuth: f64,
        elevation: f64,
        amplitude: f64,
        rng: &mut R,
    ) -> Result<BeamSpaceChannel, SimError> {
        let (paths, taps) = match self.scenario.channel.regime {
            Regime::Flat => {
                let phase = rng.random_range(0.0..2.0 * PI);
                let aoa = rng.random_range(-PI / 2.0..PI / 2.0);
                let gain = C64::new(phase.cos(), phase.sin()) * amplitude;
                (PathSet::single(gain, azimuth, elevation, aoa), 1)
            }
            Regime::Clustered => (
                self.cluster
                    .draw(azimuth, elevation, self.sector_half_width(), rng)?
                    .scaled(amplitude),
                self.scenario.channel.taps,
            ),
        };
        Ok(build_channel(&paths, &self.tx, &self.rx, taps, self.pulse, self.sample_rate_hz)?)
    }

    /// Serving-link direction and amplitude of a fresh user.
    pub fn draw_user<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<UserLink, SimError> {
        match self.scenario.mode {
            Mode::SingleUe => {
                let s = &self.sector;
                let azimuth = rng.random_range(s.az_min..=s.az_max);
                let elevation = if s.el_max > s.el_min {
                    rng.random_range(s.el_min..=s.el_max)
                } else {
                    s.el_min
                };
                Ok(UserLink {
                    azimuth,
                    elevation,
                    amplitude: 1.0,
                })
            }
            Mode::MultiUeCell | Mode::MultiCell => {
                let links = self.drop_user(rng)?;
                Ok(links[0].0)
            }
        }
    }

    /// Drop one user in the measured cell; returns per-site links and the
    /// extra delay of each site relative to the serving one, in samples.
    fn drop_user<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<(UserLink, i64)>, SimError> {
        let cell = &self.scenario.cell;
        let single;
        let layout = match &self.layout {
            Some(l) => l,
            None => {
                single = CellLayout::single(cell.radius_m, cell.min_distance_m, self.scenario.ofdm.zc_root)?;
                &single
            }
        };
        let ue = drop_users(layout, 0, 1, &self.path_loss, rng.random())?.remove(0);
        let reference = self
            .path_loss
            .mean_loss_db(cell.snr_reference_m.unwrap_or(layout.radius_m));
        let metres_per_sample = SPEED_OF_LIGHT / self.sample_rate_hz;
        let d0 = ue.links[0].distance_m;
        Ok(ue
            .links
            .iter()
            .zip(&ue.path_loss_db)
            .map(|(l, pl)| {
                (
                    UserLink {
                        azimuth: l.azimuth,
                        elevation: l.elevation,
                        amplitude: db_amplitude(reference - pl),
                    },
                    ((l.distance_m - d0) / metres_per_sample).round() as i64,
                )
            })
            .collect())
    }

    /// Everything random about one trial except the noise.
    pub fn draw_scene<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Scene, SimError> {
        let sites = match self.scenario.mode {
            Mode::MultiCell => self.drop_user(rng)?,
            _ => vec![(self.draw_user(rng)?, 0)],
        };
        let serving = sites[0].0;
        let mut links = Vec::with_capacity(sites.len());
        for (c, (link, offset)) in sites.iter().enumerate() {
            let root = self.layout.as_ref().map_or(self.waveforms[0].0, |l| l.roots[c]);
            let waveform = self.waveforms.iter().position(|(r, _)| *r == root).unwrap_or(0);
            links.push(SceneLink {
                channel: self.draw_channel(link.azimuth, link.elevation, link.amplitude, rng)?,
                waveform,
                offset: *offset,
            });
        }
        let n = self.scenario.ofdm.n_subcarriers;
        let t = rng.random_range(1..=n * (self.scenario.ofdm.t_ue - 1));
        Ok(Scene {
            user: serving,
            slot: self.serving_slot(serving.azimuth, serving.elevation),
            t,
            links,
        })
    }

    /// Noiseless received block when every site transmits its `slot` beam of `plan`.
    pub fn render(
        &self,
        scene: &Scene,
        plan: &BeamPlan,
        slot: usize,
        cfo: f64,
    ) -> Result<Vec<Vec<C64>>, SimError> {
        let mut block = vec![vec![C64::new(0.0, 0.0); self.block_len()]; self.rx.n_elements()];
        for link in &scene.links {
            let taps = link.channel.effective_taps(&plan.tx_vectors[slot])?;
            add_burst(
                &mut block,
                &taps,
                &self.waveforms[link.waveform].1.time_samples,
                scene.t as i64 + link.offset,
                cfo,
            )?;
        }
        Ok(block)
    }

    /// Slot whose anchor is nearest to the user. A linear array only sweeps
    /// azimuth, so elevation is ignored there.
    pub fn serving_slot(&self, azimuth: f64, elevation: f64) -> usize {
        let el = if self.anchors.n_el > 1 { elevation } else { self.anchors.anchors[0].elevation };
        self.anchors.nearest(azimuth, el)
    }

    /// Quantize every antenna with its own AGC set to the block rms.
    pub fn quantize(&self, block: &mut [Vec<C64>], resolution: Resolution) -> Result<(), SimError> {
        if resolution == Resolution::Infinite {
            return Ok(());
        }
        let adc = AdcModel::new(resolution)?;
        for row in block.iter_mut() {
            let rms = per_rail_rms(row);
            if rms > 0.0 {
                adc.apply_in_place(row, rms)?;
            }
        }
        Ok(())
    }

    pub fn complexity(&self, n_triggers: usize) -> Result<ComplexityReport, SimError> {
        let s = &self.scenario;
        Ok(complexity_report(
            n_triggers,
            s.bs.t_bs,
            self.codebook.n_beam(),
            s.bs.n_rf,
            s.ofdm.n_subcarriers,
            s.ofdm.t_ue,
            s.ue.m_tot,
        )?)
    }
}

const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Clone)]
pub struct SceneLink {
    pub channel: BeamSpaceChannel,
    /// Index into [`Setup::waveforms`].
    pub waveform: usize,
    /// Arrival delay relative to the serving site, in samples.
    pub offset: i64,
}

/// One trial's user, channels and true timing. The serving site comes first.
#[derive(Debug, Clone)]
pub struct Scene {
    pub user: UserLink,
    pub slot: usize,
    /// True start of the serving burst.
    pub t: usize,
    pub links: Vec<SceneLink>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserLink {
    pub azimuth: f64,
    pub elevation: f64,
    pub amplitude: f64,
}

pub(crate) fn db_amplitude(db: f64) -> f64 {
    10f64.powf(db / 20.0)
}

/// Per-experiment key for the trial streams.
pub fn stream_key(scenario: &Scenario, experiment: &str) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(b"beamsync-trial");
    h.update(scenario.seed.to_le_bytes());
    h.update(scenario.hash().as_bytes());
    h.update(experiment.as_bytes());
    h.finalize().into()
}

pub fn trial_rng(key: &[u8; 32], trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::from_seed(*key);
    rng.set_stream(trial);
    rng
}

/// Unit-variance circular Gaussian block.
pub(crate) fn unit_noise<R: Rng + ?Sized>(rows: usize, len: usize, rng: &mut R) -> Vec<Vec<C64>> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    (0..rows)
        .map(|_| {
            (0..len)
                .map(|_| {
                    let re: f64 = StandardNormal.sample(rng);
                    let im: f64 = StandardNormal.sample(rng);
                    C64::new(re * s, im * s)
                })
                .collect()
        })
        .collect()
}

/// `signal + σ·noise`.
pub(crate) fn with_noise(signal: &[Vec<C64>], noise: &[Vec<C64>], noise_var: f64) -> Vec<Vec<C64>> {
    let s = noise_var.sqrt();
    signal
        .iter()
        .zip(noise)
        .map(|(x, n)| x.iter().zip(n).map(|(a, b)| a + b * s).collect())
        .collect()
}

/// Display label of a resolution in CSV output.
pub fn bits_label(r: Resolution) -> String {
    r.to_string()
}
