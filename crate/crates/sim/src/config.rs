//! Scenario files.
//!
//! A scenario is a TOML document. Every key carries its unit in the name
//! (`snr_db`, `subcarrier_spacing_khz`, ...) and anything not listed here is
//! rejected, so a typo fails the run instead of silently using a default.

use std::fmt;
use std::path::Path;

use beamsync_core::quantization::Resolution;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::SimError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// One user at a random direction inside the sector, unit average channel power.
    SingleUe,
    /// Users dropped over one cell with distance-dependent path loss.
    MultiUeCell,
    /// Seven hexagonal sites; the central cell is measured, the ring interferes.
    MultiCell,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Flat,
    Clustered,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArrayKind {
    Ula,
    Upa,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Per-subarray codeword tuple chosen by exhaustive search.
    Proposed,
    /// One codeword replicated over all subarrays.
    SingleStream,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Proposed => "proposed",
            Method::SingleStream => "single_stream",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// ADC resolution as written in a scenario: an integer or `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Bits(pub Resolution);

impl Serialize for Bits {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0 {
            Resolution::Bits(b) => s.serialize_u8(b),
            Resolution::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Bits {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(b) if (1..=16).contains(&b) => Ok(Bits(Resolution::Bits(b as u8))),
            Raw::Int(b) => Err(serde::de::Error::custom(format!(
                "ADC bits must be in 1..=16 or \"inf\", got {b}"
            ))),
            Raw::Str(s) if s == "inf" => Ok(Bits(Resolution::Infinite)),
            Raw::Str(s) => Err(serde::de::Error::custom(format!(
                "ADC bits must be an integer or \"inf\", got {s:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OfdmConfig {
    pub n_subcarriers: usize,
    pub cp_length: usize,
    pub zc_length: usize,
    pub zc_root: usize,
    pub subcarrier_spacing_khz: f64,
    /// Symbols per user correlation window.
    pub t_ue: usize,
}

impl Default for OfdmConfig {
    fn default() -> Self {
        OfdmConfig {
            n_subcarriers: 512,
            cp_length: 64,
            zc_length: 63,
            zc_root: 34,
            subcarrier_spacing_khz: 270.0,
            t_ue: 10,
        }
    }
}

impl OfdmConfig {
    pub fn sample_rate_hz(&self) -> f64 {
        self.n_subcarriers as f64 * self.subcarrier_spacing_khz * 1e3
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BsConfig {
    pub array: ArrayKind,
    /// Element count of the linear array.
    pub n_tot: usize,
    /// Planar array size, used when `array = "upa"`.
    pub upa_nx: usize,
    pub upa_ny: usize,
    pub n_rf: usize,
    pub oversampling: usize,
    pub t_bs: usize,
    pub sector_az_deg: [f64; 2],
    pub sector_el_deg: [f64; 2],
    /// Worst-case SNR of the composite beam assumed by the selection objective.
    pub worst_case_snr_db: f64,
    pub bound_noise_var: f64,
    pub search_budget: u64,
}

impl Default for BsConfig {
    fn default() -> Self {
        BsConfig {
            array: ArrayKind::Ula,
            n_tot: 32,
            upa_nx: 8,
            upa_ny: 4,
            n_rf: 4,
            oversampling: 2,
            t_bs: 32,
            sector_az_deg: [-60.0, 60.0],
            sector_el_deg: [-45.0, 45.0],
            worst_case_snr_db: -20.0,
            bound_noise_var: 1.0,
            search_budget: 1 << 24,
        }
    }
}

impl BsConfig {
    pub fn n_elements(&self) -> usize {
        match self.array {
            ArrayKind::Ula => self.n_tot,
            ArrayKind::Upa => self.upa_nx * self.upa_ny,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct UeConfig {
    pub m_tot: usize,
}

impl Default for UeConfig {
    fn default() -> Self {
        UeConfig { m_tot: 16 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AdcConfig {
    pub bits: Vec<Bits>,
}

impl Default for AdcConfig {
    fn default() -> Self {
        AdcConfig {
            bits: vec![
                Bits(Resolution::Bits(2)),
                Bits(Resolution::Bits(4)),
                Bits(Resolution::Infinite),
            ],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SnrConfig {
    pub snr_db: Vec<f64>,
}

impl Default for SnrConfig {
    fn default() -> Self {
        SnrConfig {
            snr_db: vec![-20.0, -15.0, -10.0, -5.0, 0.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChannelConfig {
    pub regime: Regime,
    pub clusters: usize,
    pub paths_per_cluster: usize,
    pub aod_spread_deg: f64,
    pub aoa_spread_deg: f64,
    pub delay_spread_ns: f64,
    pub intra_delay_ns: f64,
    pub cluster_shadow_db: f64,
    /// Rician K-factor of the line-of-sight ray; omit for a diffuse first cluster.
    pub los_k_db: Option<f64>,
    pub rolloff: f64,
    pub taps: usize,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        ChannelConfig {
            regime: Regime::Clustered,
            clusters: 3,
            paths_per_cluster: 4,
            aod_spread_deg: 5.0,
            aoa_spread_deg: 10.0,
            delay_spread_ns: 30.0,
            intra_delay_ns: 0.0,
            cluster_shadow_db: 3.0,
            los_k_db: Some(9.0),
            rolloff: 0.25,
            taps: 32,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CellConfig {
    pub radius_m: f64,
    pub min_distance_m: f64,
    pub isd_m: f64,
    /// Central cell, then the two roots alternated around the ring.
    pub roots: [usize; 3],
    pub pathloss_exponent: f64,
    pub shadowing_db: f64,
    pub pl0_db: f64,
    /// Distance at which the configured SNR holds; the cell edge when absent.
    pub snr_reference_m: Option<f64>,
}

impl Default for CellConfig {
    fn default() -> Self {
        CellConfig {
            radius_m: 150.0,
            min_distance_m: 20.0,
            isd_m: 500.0,
            roots: [25, 29, 34],
            pathloss_exponent: 3.2,
            shadowing_db: 8.0,
            pl0_db: 61.4,
            snr_reference_m: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SqnrConfig {
    /// Noise realizations per trial for the empirical SQNR estimate.
    pub realizations: usize,
}

impl Default for SqnrConfig {
    fn default() -> Self {
        SqnrConfig { realizations: 64 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CfoConfig {
    /// Offsets in subcarrier spacings swept by the CFO experiment.
    pub cfo_subcarriers: Vec<f64>,
    pub snr_db: f64,
    /// Offset applied in the other timing experiments.
    pub timing_cfo_subcarriers: f64,
}

impl Default for CfoConfig {
    fn default() -> Self {
        CfoConfig {
            cfo_subcarriers: vec![-1.0, -0.5, 0.0, 0.5, 1.0],
            snr_db: -10.0,
            timing_cfo_subcarriers: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MulticellConfig {
    /// Run the slot-by-slot access procedure as well.
    pub access: bool,
    /// User drops for the access procedure.
    pub access_drops: usize,
}

impl Default for MulticellConfig {
    fn default() -> Self {
        MulticellConfig {
            access: true,
            access_drops: 200,
        }
    }
}

fn default_seed() -> u64 {
    1
}

fn default_trials() -> usize {
    2000
}

fn default_methods() -> Vec<Method> {
    vec![Method::Proposed, Method::SingleStream]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub mode: Mode,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    #[serde(default)]
    pub ofdm: OfdmConfig,
    #[serde(default)]
    pub bs: BsConfig,
    #[serde(default)]
    pub ue: UeConfig,
    #[serde(default)]
    pub adc: AdcConfig,
    #[serde(default)]
    pub snr: SnrConfig,
    #[serde(default)]
    pub channel: ChannelConfig,
    #[serde(default)]
    pub cell: CellConfig,
    #[serde(default)]
    pub sqnr: SqnrConfig,
    #[serde(default)]
    pub cfo: CfoConfig,
    #[serde(default)]
    pub multicell: MulticellConfig,
}

impl Scenario {
    /// Defaults for `mode` with nothing else set.
    pub fn new(mode: Mode) -> Self {
        Scenario {
            mode,
            seed: default_seed(),
            trials: default_trials(),
            methods: default_methods(),
            ofdm: OfdmConfig::default(),
            bs: BsConfig::default(),
            ue: UeConfig::default(),
            adc: AdcConfig::default(),
            snr: SnrConfig::default(),
            channel: ChannelConfig::default(),
            cell: CellConfig::default(),
            sqnr: SqnrConfig::default(),
            cfo: CfoConfig::default(),
            multicell: MulticellConfig::default(),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self, SimError> {
        let s: Scenario = toml::from_str(text).map_err(|e| SimError::Config(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn from_path(path: &Path) -> Result<Self, SimError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| SimError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            SimError::Config(m) => SimError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Fully resolved scenario as TOML, defaults included.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario always serializes")
    }

    /// Hex SHA-256 of the resolved scenario with the seed cleared, so the
    /// same physical setup hashes the same under any seed.
    pub fn hash(&self) -> String {
        let mut s = self.clone();
        s.seed = 0;
        let digest = Sha256::digest(s.to_toml().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn resolutions(&self) -> Vec<Resolution> {
        self.adc.bits.iter().map(|b| b.0).collect()
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |key: &str, msg: String| Err(SimError::Config(format!("{key}: {msg}")));
        let o = &self.ofdm;
        if self.trials == 0 {
            return bad("trials", "must be at least 1".into());
        }
        if self.methods.is_empty() {
            return bad("methods", "at least one method is required".into());
        }
        if self.snr.snr_db.is_empty() {
            return bad("snr.snr_db", "SNR grid is empty".into());
        }
        if let Some(v) = self.snr.snr_db.iter().find(|v| !v.is_finite()) {
            return bad("snr.snr_db", format!("{v} is not finite"));
        }
        if self.adc.bits.is_empty() {
            return bad("adc.bits", "at least one resolution is required".into());
        }
        if !o.n_subcarriers.is_power_of_two() || o.n_subcarriers < 64 {
            return bad("ofdm.n_subcarriers", format!("{} is not a power of two ≥ 64", o.n_subcarriers));
        }
        if o.cp_length == 0 || o.cp_length >= o.n_subcarriers {
            return bad("ofdm.cp_length", format!("{} must lie in 1..n_subcarriers", o.cp_length));
        }
        if o.zc_length < 2 || o.zc_length >= o.n_subcarriers {
            return bad("ofdm.zc_length", format!("{} must lie in 2..n_subcarriers", o.zc_length));
        }
        if !(o.subcarrier_spacing_khz > 0.0) {
            return bad("ofdm.subcarrier_spacing_khz", "must be positive".into());
        }
        if o.t_ue < 2 {
            return bad("ofdm.t_ue", format!("{} must be at least 2", o.t_ue));
        }
        let b = &self.bs;
        let n = b.n_elements();
        if b.n_rf == 0 || n == 0 || n % b.n_rf != 0 {
            return bad("bs.n_rf", format!("{} must divide the {n} array elements", b.n_rf));
        }
        if b.array == ArrayKind::Upa && b.upa_ny % b.n_rf != 0 {
            return bad("bs.n_rf", format!("{} must divide upa_ny = {}", b.n_rf, b.upa_ny));
        }
        if b.oversampling == 0 {
            return bad("bs.oversampling", "must be at least 1".into());
        }
        if b.t_bs == 0 {
            return bad("bs.t_bs", "must be at least 1".into());
        }
        if !(b.sector_az_deg[1] > b.sector_az_deg[0]) || b.sector_az_deg.iter().any(|a| a.abs() > 90.0) {
            return bad("bs.sector_az_deg", "needs min < max inside ±90".into());
        }
        if b.sector_el_deg[1] < b.sector_el_deg[0] || b.sector_el_deg.iter().any(|a| a.abs() > 90.0) {
            return bad("bs.sector_el_deg", "needs min ≤ max inside ±90".into());
        }
        if !(b.bound_noise_var > 0.0) {
            return bad("bs.bound_noise_var", "must be positive".into());
        }
        if self.ue.m_tot == 0 {
            return bad("ue.m_tot", "must be at least 1".into());
        }
        let c = &self.channel;
        if c.taps == 0 || c.taps > o.n_subcarriers {
            return bad("channel.taps", format!("{} must lie in 1..=n_subcarriers", c.taps));
        }
        if c.clusters == 0 || c.paths_per_cluster == 0 {
            return bad("channel.clusters", "needs at least one cluster and one path".into());
        }
        if !(0.0..=1.0).contains(&c.rolloff) {
            return bad("channel.rolloff", format!("{} must lie in [0, 1]", c.rolloff));
        }
        if c.delay_spread_ns < 0.0 || c.intra_delay_ns < 0.0 {
            return bad("channel.delay_spread_ns", "delays must be nonnegative".into());
        }
        let cell = &self.cell;
        if !(cell.radius_m > cell.min_distance_m && cell.min_distance_m >= 0.0) {
            return bad("cell.radius_m", "must exceed cell.min_distance_m".into());
        }
        if !(cell.isd_m / 3f64.sqrt() > cell.min_distance_m) {
            return bad("cell.isd_m", "too small for cell.min_distance_m".into());
        }
        if matches!(cell.snr_reference_m, Some(d) if !(d > 0.0)) {
            return bad("cell.snr_reference_m", "must be positive".into());
        }
        if self.sqnr.realizations < 2 {
            return bad("sqnr.realizations", "must be at least 2".into());
        }
        if self.cfo.cfo_subcarriers.is_empty() {
            return bad("cfo.cfo_subcarriers", "CFO grid is empty".into());
        }
        Ok(())
    }
}
