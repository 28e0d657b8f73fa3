//! Anchor directions and exhaustive beam selection.
//!
//! Each synchronization slot is tied to one anchor direction. The base
//! station picks the beam (single-stream) or the per-subarray codeword tuple
//! (multi-beam) that maximizes the worst-case SQNR bound at that anchor.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent f64 methods win when std is in the build graph
use num_traits::Float;

use crate::beamforming::{composite_beam_gain, subarray_gain_table, BeamSet, Codebook};
use crate::channel::ArrayGeometry;
use crate::error::domain;
use crate::sqnr::sqnr_lower_bound;
use crate::{Error, Result, C64};

/// Angular sector, radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sector {
    pub az_min: f64,
    pub az_max: f64,
    pub el_min: f64,
    pub el_max: f64,
}

impl Default for Sector {
    fn default() -> Self {
        Sector {
            az_min: (-60f64).to_radians(),
            az_max: 60f64.to_radians(),
            el_min: (-45f64).to_radians(),
            el_max: 45f64.to_radians(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Anchor {
    pub azimuth: f64,
    pub elevation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnchorGrid {
    pub t_bs: usize,
    pub n_az: usize,
    pub n_el: usize,
    /// Azimuth-major raster: slot `i·n_el + e` is azimuth bin `i`, elevation bin `e`.
    pub anchors: Vec<Anchor>,
}

impl AnchorGrid {
    /// Slot whose anchor is closest to the given direction.
    pub fn nearest(&self, azimuth: f64, elevation: f64) -> usize {
        let mut best = (f64::INFINITY, 0);
        for (i, a) in self.anchors.iter().enumerate() {
            let d = (a.azimuth - azimuth).powi(2) + (a.elevation - elevation).powi(2);
            if d < best.0 {
                best = (d, i);
            }
        }
        best.1
    }
}

/// Anchors at the centres of a uniform partition of the sector.
///
/// With `planar = false` only azimuth is swept and elevations sit at the
/// sector centre. With `planar = true`, `t_bs` is split as `n_az × n_el` with
/// `n_el` the largest divisor not above `√t_bs`.
pub fn build_anchor_grid(t_bs: usize, sector: &Sector, planar: bool) -> Result<AnchorGrid> {
    if t_bs == 0 {
        return domain("T_BS must be at least 1");
    }
    if !(sector.az_max > sector.az_min) || sector.el_max < sector.el_min {
        return domain("sector is empty");
    }
    let n_el = if planar {
        (1..=t_bs)
            .take_while(|d| d * d <= t_bs)
            .filter(|d| t_bs % d == 0)
            .last()
            .unwrap_or(1)
    } else {
        1
    };
    let n_az = t_bs / n_el;
    let mid = |lo: f64, hi: f64, i: usize, n: usize| lo + (hi - lo) * (i as f64 + 0.5) / n as f64;
    let mut anchors = Vec::with_capacity(t_bs);
    for i in 0..n_az {
        for e in 0..n_el {
            anchors.push(Anchor {
                azimuth: mid(sector.az_min, sector.az_max, i, n_az),
                elevation: mid(sector.el_min, sector.el_max, e, n_el),
            });
        }
    }
    Ok(AnchorGrid {
        t_bs,
        n_az,
        n_el,
        anchors,
    })
}

/// Worst-case system parameters for the selection objective.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundParams {
    /// Worst-case inverse SNR of one full-power stream, `σ²/g²`.
    pub lambda_max: f64,
    pub xi_max: f64,
    pub noise_var: f64,
}

impl BoundParams {
    /// From the multi-beam `λ′_max = N_RF·λ_max`.
    pub fn from_lambda_prime(lambda_prime_max: f64, n_rf: usize, xi_max: f64, noise_var: f64) -> Self {
        BoundParams {
            lambda_max: lambda_prime_max / n_rf as f64,
            xi_max,
            noise_var,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeamSelection {
    pub beam_set: BeamSet,
    pub objective: f64,
    pub composite_gain: C64,
    pub iteration_count: u128,
}

/// Objective of a single full-array beam `f`: γ́ with `S = |a^H f|²`.
pub fn single_beam_objective(gain_sq: f64, params: &BoundParams) -> Result<f64> {
    sqnr_lower_bound(gain_sq, params.lambda_max, params.xi_max, params.noise_var)
}

/// Objective of a composite beam: γ́ with `S = |h^Ω|²` and `λ′ = N_RF·λ_max`.
pub fn multi_beam_objective(composite_gain_sq: f64, n_rf: usize, params: &BoundParams) -> Result<f64> {
    sqnr_lower_bound(
        composite_gain_sq,
        n_rf as f64 * params.lambda_max,
        params.xi_max,
        params.noise_var,
    )
}

/// `(a, ia)` beats `(b, ib)`: larger objective, then lexicographically smaller tuple.
pub fn better(a: f64, ia: &[usize], b: f64, ib: &[usize]) -> bool {
    a > b || (a == b && ia < ib)
}

/// Best full-array codeword for one anchor. Ties go to the lowest index.
pub fn select_single_beam(
    codebook: &Codebook,
    anchor: &Anchor,
    geometry: &ArrayGeometry,
    params: &BoundParams,
) -> Result<BeamSelection> {
    if codebook.n_beam() == 0 {
        return domain("codebook is empty");
    }
    let a = geometry.steering_vector(anchor.azimuth, anchor.elevation)?;
    if a.len() != codebook.n_a {
        return Err(Error::Dimension {
            expected: codebook.n_a,
            got: a.len(),
        });
    }
    let mut best: Option<(f64, usize, C64)> = None;
    for q in 0..codebook.n_beam() {
        let set = BeamSet { indices: vec![q] };
        let h = composite_beam_gain(codebook, &set, &a)?;
        let obj = single_beam_objective(h.norm_sqr(), params)?;
        if best.is_none_or(|(b, _, _)| obj > b) {
            best = Some((obj, q, h));
        }
    }
    let (objective, q, h) = best.unwrap();
    Ok(BeamSelection {
        beam_set: BeamSet { indices: vec![q] },
        objective,
        composite_gain: h,
        iteration_count: codebook.n_beam() as u128,
    })
}

/// Exhaustive search over all `N_beam^{N_RF}` codeword tuples.
pub fn select_multi_beam(
    codebook: &Codebook,
    n_rf: usize,
    anchor: &Anchor,
    geometry: &ArrayGeometry,
    params: &BoundParams,
    budget: u128,
) -> Result<BeamSelection> {
    let n_beam = codebook.n_beam();
    if n_rf == 0 || n_beam == 0 {
        return domain("need at least one subarray and one codeword");
    }
    let required = (n_beam as u128)
        .checked_pow(n_rf as u32)
        .unwrap_or(u128::MAX);
    if required > budget {
        return Err(Error::SearchBudget {
            n_beam,
            n_rf,
            required,
            budget,
        });
    }
    let a = geometry.steering_vector(anchor.azimuth, anchor.elevation)?;
    let table = subarray_gain_table(codebook, n_rf, &a)?;

    // odometer over tuples in lexicographic order, keeping running prefix sums
    let mut idx = vec![0usize; n_rf];
    let mut prefix = vec![C64::new(0.0, 0.0); n_rf + 1];
    for j in 0..n_rf {
        prefix[j + 1] = prefix[j] + table[j][0];
    }
    let mut best_obj = f64::NEG_INFINITY;
    let mut best_idx = idx.clone();
    let mut best_h = C64::new(0.0, 0.0);
    loop {
        let h = prefix[n_rf];
        let obj = multi_beam_objective(h.norm_sqr(), n_rf, params)?;
        if obj > best_obj {
            best_obj = obj;
            best_idx.copy_from_slice(&idx);
            best_h = h;
        }
        let mut j = n_rf;
        loop {
            if j == 0 {
                return Ok(BeamSelection {
                    beam_set: BeamSet { indices: best_idx },
                    objective: best_obj,
                    composite_gain: best_h,
                    iteration_count: required,
                });
            }
            j -= 1;
            idx[j] += 1;
            if idx[j] < n_beam {
                break;
            }
            idx[j] = 0;
        }
        for k in j..n_rf {
            prefix[k + 1] = prefix[k] + table[k][idx[k]];
        }
    }
}

/// Operation counts for one synchronization configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComplexityReport {
    /// `N_T·T_BS·N_beam^{N_RF}`.
    pub bs_iterations_multi: u128,
    /// `N_T·T_BS·N_beam`.
    pub bs_iterations_single: u128,
    /// `M_tot·N(N+1)(T_UE−1)`, the same for both strategies.
    pub ue_complex_mults: u128,
    /// `M_tot·N(N−1)(T_UE−1)`.
    pub ue_complex_adds: u128,
}

pub fn complexity_report(
    n_triggers: usize,
    t_bs: usize,
    n_beam: usize,
    n_rf: usize,
    n: usize,
    t_ue: usize,
    m_tot: usize,
) -> Result<ComplexityReport> {
    if [n_triggers, t_bs, n_beam, n_rf, n, t_ue, m_tot].contains(&0) {
        return domain("all complexity inputs must be positive");
    }
    let u = |v: usize| v as u128;
    let slots = u(n_triggers) * u(t_bs);
    let lags = u(n) * u(t_ue - 1);
    Ok(ComplexityReport {
        bs_iterations_multi: slots * u(n_beam).pow(n_rf as u32),
        bs_iterations_single: slots * u(n_beam),
        ue_complex_mults: u(m_tot) * lags * u(n + 1),
        ue_complex_adds: u(m_tot) * lags * u(n - 1),
    })
}
