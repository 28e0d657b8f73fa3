//! Array responses, delay-tap MIMO channels, burst propagation and cell layouts.
//!
//! Angles are in radians measured from the array boresight. The transmit
//! side is the base station, the receive side the user's antenna array.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)] // inherent f64 methods win when std is in the build graph
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal, StandardNormal};

use crate::error::domain;
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ArrayGeometry {
    /// Linear array along x.
    Ula { n: usize, spacing: f64 },
    /// Planar array, `nx` elements along x (azimuth) by `ny` along y
    /// (elevation). Element `(ix, iy)` sits at index `iy·nx + ix`.
    Upa { nx: usize, ny: usize, spacing: f64 },
}

impl ArrayGeometry {
    pub fn ula(n: usize) -> Self {
        ArrayGeometry::Ula { n, spacing: 0.5 }
    }

    pub fn upa(nx: usize, ny: usize) -> Self {
        ArrayGeometry::Upa {
            nx,
            ny,
            spacing: 0.5,
        }
    }

    pub fn n_elements(&self) -> usize {
        match *self {
            ArrayGeometry::Ula { n, .. } => n,
            ArrayGeometry::Upa { nx, ny, .. } => nx * ny,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (count, spacing) = match *self {
            ArrayGeometry::Ula { n, spacing } => (n, spacing),
            ArrayGeometry::Upa { nx, ny, spacing } => (nx.min(ny), spacing),
        };
        if count == 0 {
            return domain("array must have at least one element per axis");
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return domain("element spacing must be positive");
        }
        Ok(())
    }

    /// Array response `a(azimuth, elevation)`.
    pub fn steering_vector(&self, azimuth: f64, elevation: f64) -> Result<Vec<C64>> {
        self.validate()?;
        let u = azimuth.sin() * elevation.cos();
        let v = elevation.sin();
        let ramp = |count: usize, spacing: f64, s: f64| -> Vec<C64> {
            (0..count)
                .map(|i| {
                    let ph = -2.0 * PI * spacing * i as f64 * s;
                    C64::new(ph.cos(), ph.sin())
                })
                .collect()
        };
        Ok(match *self {
            ArrayGeometry::Ula { n, spacing } => ramp(n, spacing, u),
            ArrayGeometry::Upa { nx, ny, spacing } => {
                let ax = ramp(nx, spacing, u);
                let ay = ramp(ny, spacing, v);
                let mut out = Vec::with_capacity(nx * ny);
                for y in &ay {
                    for x in &ax {
                        out.push(y * x);
                    }
                }
                out
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Path {
    pub gain: C64,
    /// Azimuth angle of departure.
    pub aod_azimuth: f64,
    /// Elevation angle of departure.
    pub aod_elevation: f64,
    /// Azimuth angle of arrival at the user array.
    pub aoa: f64,
    pub delay_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathSet {
    paths: Vec<Path>,
}

impl PathSet {
    pub fn new(paths: Vec<Path>) -> Result<Self> {
        if paths.is_empty() {
            return domain("a channel needs at least one path");
        }
        if paths.iter().any(|p| !(p.delay_s >= 0.0) || !p.delay_s.is_finite()) {
            return domain("path delays must be finite and nonnegative");
        }
        Ok(PathSet { paths })
    }

    /// One path with zero delay.
    pub fn single(gain: C64, aod_azimuth: f64, aod_elevation: f64, aoa: f64) -> Self {
        PathSet {
            paths: vec![Path {
                gain,
                aod_azimuth,
                aod_elevation,
                aoa,
                delay_s: 0.0,
            }],
        }
    }

    pub fn paths(&self) -> &[Path] {
        &self.paths
    }

    pub fn total_power(&self) -> f64 {
        self.paths.iter().map(|p| p.gain.norm_sqr()).sum()
    }

    /// Multiply every gain by a real amplitude factor.
    pub fn scaled(&self, amplitude: f64) -> Self {
        PathSet {
            paths: self
                .paths
                .iter()
                .map(|p| Path {
                    gain: p.gain * amplitude,
                    ..*p
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PulseShape {
    RaisedCosine { rolloff: f64 },
}

impl Default for PulseShape {
    fn default() -> Self {
        PulseShape::RaisedCosine { rolloff: 0.25 }
    }
}

impl PulseShape {
    /// Pulse value at `x` sample periods.
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            PulseShape::RaisedCosine { rolloff } => {
                let sinc = |t: f64| {
                    if t.abs() < 1e-12 {
                        1.0
                    } else {
                        (PI * t).sin() / (PI * t)
                    }
                };
                let d = 2.0 * rolloff * x;
                if rolloff > 0.0 && (d.abs() - 1.0).abs() < 1e-9 {
                    PI / 4.0 * sinc(1.0 / (2.0 * rolloff))
                } else {
                    sinc(x) * (PI * rolloff * x).cos() / (1.0 - d * d)
                }
            }
        }
    }
}

/// Delay-tap channel `H[ℓ] = Σ_r β_r·p(ℓT_s − τ_r)·a_rx(ψ_r)·a_tx(θ_r, φ_r)^H`.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamSpaceChannel {
    pub m_rx: usize,
    pub n_tx: usize,
    /// `taps[ℓ]` is row-major `m_rx × n_tx`.
    pub taps: Vec<Vec<C64>>,
    /// Largest path delay in sample periods.
    pub max_delay_samples: f64,
}

impl BeamSpaceChannel {
    pub fn tap_count(&self) -> usize {
        self.taps.len()
    }

    /// True when some path delay is longer than the cyclic prefix.
    pub fn exceeds_cp(&self, cp_length: usize) -> bool {
        self.max_delay_samples > cp_length as f64
    }

    /// `H̃[k] = Σ_ℓ H[ℓ]·e^{−j2πℓk/N}` (row-major).
    pub fn frequency_response(&self, k: usize, n: usize) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.m_rx * self.n_tx];
        for (l, tap) in self.taps.iter().enumerate() {
            let ang = -2.0 * PI * ((l * k) % n) as f64 / n as f64;
            let w = C64::new(ang.cos(), ang.sin());
            for (o, h) in out.iter_mut().zip(tap) {
                *o += h * w;
            }
        }
        out
    }

    /// Per-antenna scalar taps `h_b[ℓ] = (H[ℓ]·x)_b` seen by a transmit vector `x`.
    pub fn effective_taps(&self, x: &[C64]) -> Result<Vec<Vec<C64>>> {
        if x.len() != self.n_tx {
            return Err(Error::Dimension {
                expected: self.n_tx,
                got: x.len(),
            });
        }
        let mut out = vec![vec![C64::new(0.0, 0.0); self.taps.len()]; self.m_rx];
        for (l, tap) in self.taps.iter().enumerate() {
            for (b, row) in tap.chunks_exact(self.n_tx).enumerate() {
                out[b][l] = row.iter().zip(x).map(|(h, v)| h * v).sum();
            }
        }
        Ok(out)
    }

    pub fn energy(&self) -> f64 {
        self.taps
            .iter()
            .flat_map(|t| t.iter())
            .map(|h| h.norm_sqr())
            .sum()
    }
}

pub fn build_channel(
    paths: &PathSet,
    geom_tx: &ArrayGeometry,
    geom_rx: &ArrayGeometry,
    tap_count: usize,
    pulse: PulseShape,
    sample_rate_hz: f64,
) -> Result<BeamSpaceChannel> {
    if tap_count == 0 {
        return domain("tap count must be at least 1");
    }
    if !(sample_rate_hz > 0.0) {
        return domain("sample rate must be positive");
    }
    let (m, n) = (geom_rx.n_elements(), geom_tx.n_elements());
    let mut taps = vec![vec![C64::new(0.0, 0.0); m * n]; tap_count];
    let mut max_delay = 0.0f64;
    for p in paths.paths() {
        let at = geom_tx.steering_vector(p.aod_azimuth, p.aod_elevation)?;
        let ar = geom_rx.steering_vector(p.aoa, 0.0)?;
        let delay = p.delay_s * sample_rate_hz;
        max_delay = max_delay.max(delay);
        for (l, tap) in taps.iter_mut().enumerate() {
            let g = p.gain * pulse.eval(l as f64 - delay);
            if g == C64::new(0.0, 0.0) {
                continue;
            }
            for (b, r) in ar.iter().enumerate() {
                let gr = g * r;
                for (i, t) in at.iter().enumerate() {
                    tap[b * n + i] += gr * t.conj();
                }
            }
        }
    }
    Ok(BeamSpaceChannel {
        m_rx: m,
        n_tx: n,
        taps,
        max_delay_samples: max_delay,
    })
}

/// Per-antenna receive buffer, `block[b][n]`.
pub type ReceivedBlock = Vec<Vec<C64>>;

/// Add one burst `e^{j2πεn/N}·Σ_ℓ h_b[ℓ]·d[(n−ℓ) mod N]` starting at sample `start`.
///
/// Samples that fall outside the block are dropped, so an interfering burst
/// may hang over either edge.
pub fn add_burst(
    block: &mut ReceivedBlock,
    taps: &[Vec<C64>],
    waveform: &[C64],
    start: i64,
    cfo: f64,
) -> Result<()> {
    if taps.len() != block.len() {
        return Err(Error::Dimension {
            expected: block.len(),
            got: taps.len(),
        });
    }
    let n = waveform.len();
    let rot: Vec<C64> = (0..n)
        .map(|i| {
            let ph = 2.0 * PI * cfo * i as f64 / n as f64;
            C64::new(ph.cos(), ph.sin())
        })
        .collect();
    for (row, h) in block.iter_mut().zip(taps) {
        let len = row.len() as i64;
        for i in 0..n {
            let pos = start + i as i64;
            if pos < 0 || pos >= len {
                continue;
            }
            let mut acc = C64::new(0.0, 0.0);
            for (l, hl) in h.iter().enumerate() {
                acc += hl * waveform[(i + n - l % n) % n];
            }
            row[pos as usize] += acc * rot[i];
        }
    }
    Ok(())
}

/// Add CN(0, σ²) noise to every sample.
pub fn add_noise<R: Rng + ?Sized>(block: &mut ReceivedBlock, noise_var: f64, rng: &mut R) {
    if noise_var <= 0.0 {
        return;
    }
    let s = (noise_var / 2.0).sqrt();
    for row in block.iter_mut() {
        for v in row.iter_mut() {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            *v += C64::new(re * s, im * s);
        }
    }
}

/// Received block for one beamformed burst: the synchronization symbol
/// occupies samples `t..t+N`, everything else is noise.
#[allow(clippy::too_many_arguments)]
pub fn propagate<R: Rng + ?Sized>(
    ch: &BeamSpaceChannel,
    waveform: &[C64],
    tx_vector: &[C64],
    noise_var: f64,
    cfo: f64,
    start: usize,
    block_len: usize,
    rng: &mut R,
) -> Result<ReceivedBlock> {
    let n = waveform.len();
    if block_len < n || start > block_len - n {
        return domain(format!(
            "burst start {start} does not fit a block of {block_len} samples"
        ));
    }
    let taps = ch.effective_taps(tx_vector)?;
    let mut block = vec![vec![C64::new(0.0, 0.0); block_len]; ch.m_rx];
    add_burst(&mut block, &taps, waveform, start as i64, cfo)?;
    add_noise(&mut block, noise_var, rng);
    Ok(block)
}

/// Clustered wideband multipath generator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterModel {
    pub clusters: usize,
    pub paths_per_cluster: usize,
    /// Half-width of the uniform intra-cluster departure spread.
    pub aod_spread: f64,
    pub aoa_spread: f64,
    pub delay_spread_s: f64,
    pub intra_delay_s: f64,
    /// Standard deviation of the per-cluster power perturbation.
    pub cluster_shadow_db: f64,
    /// Rician K-factor of a specular ray added to the first cluster;
    /// `-inf` leaves the first cluster purely diffuse.
    pub k_factor_db: f64,
}

impl Default for ClusterModel {
    fn default() -> Self {
        ClusterModel {
            clusters: 3,
            paths_per_cluster: 4,
            aod_spread: 5f64.to_radians(),
            aoa_spread: 10f64.to_radians(),
            delay_spread_s: 30e-9,
            intra_delay_s: 0.0,
            cluster_shadow_db: 3.0,
            k_factor_db: 9.0,
        }
    }
}

impl ClusterModel {
    /// Draw paths with unit average total power. The first cluster leaves at
    /// `(azimuth, elevation)` with zero delay and, for a finite K-factor,
    /// starts with a specular ray carrying `K/(K+1)` of the power; the other
    /// clusters leave at uniform azimuths inside `±sector_half_width`.
    pub fn draw<R: Rng + ?Sized>(
        &self,
        azimuth: f64,
        elevation: f64,
        sector_half_width: f64,
        rng: &mut R,
    ) -> Result<PathSet> {
        if self.clusters == 0 || self.paths_per_cluster == 0 {
            return domain("cluster model needs at least one path");
        }
        let ds = self.delay_spread_s.max(1e-15);
        let exp = Exp::new(1.0 / ds).map_err(|_| Error::Domain("bad delay spread".into()))?;
        let shadow = Normal::new(0.0, self.cluster_shadow_db)
            .map_err(|_| Error::Domain("bad cluster shadowing".into()))?;
        let mut centers = Vec::with_capacity(self.clusters);
        for c in 0..self.clusters {
            let delay = if c == 0 { 0.0 } else { exp.sample(rng) };
            let az = if c == 0 {
                azimuth
            } else {
                rng.random_range(-sector_half_width..=sector_half_width)
            };
            let aoa = rng.random_range(-PI / 2.0..PI / 2.0);
            let z: f64 = if c == 0 { 0.0 } else { shadow.sample(rng) };
            let power = (-delay / ds).exp() * 10f64.powf(-z / 10.0);
            centers.push((delay, az, aoa, power));
        }
        let k_lin = 10f64.powf(self.k_factor_db / 10.0);
        let total: f64 = centers.iter().map(|c| c.3).sum::<f64>() * (1.0 + k_lin);
        let k = self.paths_per_cluster as f64;
        let mut paths = Vec::with_capacity(self.clusters * self.paths_per_cluster + 1);
        if k_lin > 0.0 {
            let phase = rng.random_range(0.0..2.0 * PI);
            paths.push(Path {
                gain: C64::new(phase.cos(), phase.sin()) * (k_lin / (1.0 + k_lin)).sqrt(),
                aod_azimuth: azimuth,
                aod_elevation: elevation,
                aoa: centers[0].2,
                delay_s: 0.0,
            });
        }
        for (delay, az, aoa, power) in centers {
            let amp = (power / total / k).sqrt();
            for _ in 0..self.paths_per_cluster {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                let spread = |w: f64, r: &mut R| {
                    if w > 0.0 {
                        r.random_range(-w..=w)
                    } else {
                        0.0
                    }
                };
                let daz = spread(self.aod_spread, rng);
                let daoa = spread(self.aoa_spread, rng);
                let dtau = if self.intra_delay_s > 0.0 {
                    rng.random_range(0.0..self.intra_delay_s)
                } else {
                    0.0
                };
                paths.push(Path {
                    gain: C64::new(re, im) * (amp * core::f64::consts::FRAC_1_SQRT_2),
                    aod_azimuth: (az + daz).clamp(-PI / 2.0, PI / 2.0),
                    aod_elevation: elevation,
                    aoa: (aoa + daoa).clamp(-PI / 2.0, PI / 2.0),
                    delay_s: delay + dtau,
                });
            }
        }
        PathSet::new(paths)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathLossModel {
    pub exponent: f64,
    pub shadowing_db: f64,
    pub reference_distance_m: f64,
    /// Loss at the reference distance.
    pub pl0_db: f64,
}

impl Default for PathLossModel {
    fn default() -> Self {
        PathLossModel {
            exponent: 3.2,
            shadowing_db: 8.0,
            reference_distance_m: 1.0,
            // free space at 1 m and 28 GHz
            pl0_db: 61.4,
        }
    }
}

impl PathLossModel {
    /// Deterministic part `PL₀ + 10·n·log10(d/d₀)`.
    pub fn mean_loss_db(&self, distance_m: f64) -> f64 {
        self.pl0_db
            + 10.0 * self.exponent * (distance_m.max(1e-9) / self.reference_distance_m).log10()
    }
}

/// Base-station sites, each split into three 120° sectors with boresights
/// at 0°, 120° and 240°.
#[derive(Debug, Clone, PartialEq)]
pub struct CellLayout {
    pub centers: Vec<(f64, f64)>,
    pub roots: Vec<usize>,
    /// Drop radius for a circular layout.
    pub radius_m: f64,
    pub inter_site_distance_m: Option<f64>,
    pub min_distance_m: f64,
    pub bs_height_m: f64,
    pub ue_height_m: f64,
}

impl CellLayout {
    pub fn single(radius_m: f64, min_distance_m: f64, root: usize) -> Result<Self> {
        if !(radius_m > min_distance_m && min_distance_m >= 0.0) {
            return domain("cell radius must exceed the minimum distance");
        }
        Ok(CellLayout {
            centers: vec![(0.0, 0.0)],
            roots: vec![root],
            radius_m,
            inter_site_distance_m: None,
            min_distance_m,
            bs_height_m: 10.0,
            ue_height_m: 1.5,
        })
    }

    /// Central site plus one ring of six. The centre uses `roots[0]`; the ring
    /// alternates `roots[1]` and `roots[2]`, so adjacent cells never share a root.
    pub fn hex7(isd_m: f64, min_distance_m: f64, roots: [usize; 3]) -> Result<Self> {
        let radius = isd_m / 3f64.sqrt();
        if !(radius > min_distance_m && min_distance_m >= 0.0) {
            return domain("inter-site distance too small for the minimum distance");
        }
        let mut centers = vec![(0.0, 0.0)];
        let mut r = vec![roots[0]];
        for k in 0..6 {
            let a = k as f64 * PI / 3.0;
            centers.push((isd_m * a.cos(), isd_m * a.sin()));
            r.push(if k % 2 == 0 { roots[1] } else { roots[2] });
        }
        Ok(CellLayout {
            centers,
            roots: r,
            radius_m: radius,
            inter_site_distance_m: Some(isd_m),
            min_distance_m,
            bs_height_m: 10.0,
            ue_height_m: 1.5,
        })
    }

    pub fn n_cells(&self) -> usize {
        self.centers.len()
    }

    pub fn are_neighbors(&self, a: usize, b: usize) -> bool {
        match self.inter_site_distance_m {
            Some(isd) if a != b => {
                let (pa, pb) = (self.centers[a], self.centers[b]);
                (pa.0 - pb.0).hypot(pa.1 - pb.1) < 1.01 * isd
            }
            _ => false,
        }
    }

    fn in_cell(&self, cell: usize, x: f64, y: f64) -> bool {
        let (cx, cy) = self.centers[cell];
        let (dx, dy) = (x - cx, y - cy);
        let d = dx.hypot(dy);
        if d < self.min_distance_m || d > self.radius_m {
            return false;
        }
        if sector_offset(dy.atan2(dx)).abs() > PI / 3.0 {
            return false;
        }
        match self.inter_site_distance_m {
            None => true,
            Some(isd) => (0..6).all(|k| {
                // inside the hexagon: no closer to any lattice neighbour
                let a = k as f64 * PI / 3.0;
                let (nx, ny) = (isd * a.cos(), isd * a.sin());
                d <= (dx - nx).hypot(dy - ny)
            }),
        }
    }

    /// Geometry of the link from site `cell` to a user at `(x, y)`.
    pub fn link(&self, cell: usize, x: f64, y: f64) -> LinkGeometry {
        let (cx, cy) = self.centers[cell];
        let (dx, dy) = (x - cx, y - cy);
        let ground = dx.hypot(dy);
        let dh = self.ue_height_m - self.bs_height_m;
        LinkGeometry {
            distance_m: ground.hypot(dh),
            azimuth: sector_offset(dy.atan2(dx)),
            elevation: dh.atan2(ground),
        }
    }
}

/// Azimuth relative to the boresight of the sector that contains it.
pub fn sector_offset(angle: f64) -> f64 {
    let sector = 2.0 * PI / 3.0;
    let a = num_traits::Euclid::rem_euclid(&angle, &(2.0 * PI));
    let k = (a / sector).round();
    a - k * sector
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    pub distance_m: f64,
    pub azimuth: f64,
    pub elevation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UserDrop {
    pub cell: usize,
    pub position: (f64, f64),
    /// One entry per site, same order as the layout.
    pub links: Vec<LinkGeometry>,
    /// Path loss including shadowing, per site.
    pub path_loss_db: Vec<f64>,
}

impl UserDrop {
    pub fn serving(&self) -> &LinkGeometry {
        &self.links[self.cell]
    }
}

/// Drop `n_ue` users uniformly over the boresight sector of `cell`.
pub fn drop_users(
    layout: &CellLayout,
    cell: usize,
    n_ue: usize,
    model: &PathLossModel,
    seed: u64,
) -> Result<Vec<UserDrop>> {
    if n_ue == 0 {
        return domain("at least one user is required");
    }
    if cell >= layout.n_cells() {
        return domain(format!("cell {cell} not in layout"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (cx, cy) = layout.centers[cell];
    let r2 = layout.radius_m * layout.radius_m;
    let mut out = Vec::with_capacity(n_ue);
    while out.len() < n_ue {
        // area-uniform proposal on the disk, then reject
        let r = (rng.random::<f64>() * r2).sqrt();
        let a = rng.random_range(-PI / 3.0..=PI / 3.0);
        let (x, y) = (cx + r * a.cos(), cy + r * a.sin());
        if !layout.in_cell(cell, x, y) {
            continue;
        }
        out.push(place_user(layout, cell, x, y, model, &mut rng));
    }
    Ok(out)
}

/// Link geometry and shadowed path loss for a user at a fixed position.
pub fn place_user<R: Rng + ?Sized>(
    layout: &CellLayout,
    cell: usize,
    x: f64,
    y: f64,
    model: &PathLossModel,
    rng: &mut R,
) -> UserDrop {
    let links: Vec<LinkGeometry> = (0..layout.n_cells()).map(|c| layout.link(c, x, y)).collect();
    let path_loss_db = links
        .iter()
        .map(|l| {
            let z: f64 = StandardNormal.sample(rng);
            model.mean_loss_db(l.distance_m) + model.shadowing_db * z
        })
        .collect();
    UserDrop {
        cell,
        position: (x, y),
        links,
        path_loss_db,
    }
}
