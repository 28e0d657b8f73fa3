//! CSV files and the run manifest.
//!
//! Every file starts with one comment line
//! `# beamsync <version> scenario=<hash> seed=<seed> experiment=<name>`
//! followed by an ordinary headed CSV table.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::Scenario;
use crate::montecarlo::{bits_label, MulticellResult, Setup, SqnrResult, TimingResult};
use crate::SimError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn header_line(scenario: &Scenario, experiment: &str) -> String {
    format!(
        "# beamsync {VERSION} scenario={} seed={} experiment={experiment}\n",
        &scenario.hash()[..16],
        scenario.seed
    )
}

/// Header line plus a CSV table of `rows`, as bytes.
pub fn csv_bytes<T: Serialize>(scenario: &Scenario, experiment: &str, rows: &[T]) -> Result<Vec<u8>, SimError> {
    let mut out = header_line(scenario, experiment).into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut out);
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
    }
    Ok(out)
}

fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf, SimError> {
    let path = dir.join(name);
    let mut f = fs::File::create(&path)?;
    f.write_all(bytes)?;
    Ok(path)
}

#[derive(Serialize)]
struct SqnrSummaryRow<'a> {
    method: &'a str,
    bits: &'a str,
    snr_db: f64,
    n: usize,
    mean_sqnr: f64,
    ci_low: f64,
    ci_high: f64,
    mean_sqnr_db: f64,
    analytic_mean: f64,
}

#[derive(Serialize)]
struct CdfRow<'a> {
    method: &'a str,
    bits: &'a str,
    snr_db: f64,
    sqnr_db: f64,
    cdf: f64,
}

#[derive(Serialize)]
struct TimingSummaryRow<'a> {
    method: &'a str,
    bits: &'a str,
    snr_db: f64,
    cfo: f64,
    n: usize,
    nmse: f64,
    nmse_ci_low: f64,
    nmse_ci_high: f64,
    p_success: f64,
    p_ci_low: f64,
    p_ci_high: f64,
}

#[derive(Serialize)]
struct AccessSummaryRow<'a> {
    method: &'a str,
    bits: &'a str,
    snr_db: f64,
    slot: Option<usize>,
    probability: f64,
    ci_low: f64,
    ci_high: f64,
}

#[derive(Serialize)]
struct ComplexityRow {
    quantity: &'static str,
    value: String,
}

pub fn write_sqnr(dir: &Path, scenario: &Scenario, r: &SqnrResult) -> Result<Vec<PathBuf>, SimError> {
    let summary: Vec<SqnrSummaryRow> = r
        .summaries
        .iter()
        .map(|s| SqnrSummaryRow {
            method: &s.method,
            bits: &s.bits,
            snr_db: s.snr_db,
            n: s.sqnr.n,
            mean_sqnr: s.sqnr.mean,
            ci_low: s.sqnr.ci_low,
            ci_high: s.sqnr.ci_high,
            mean_sqnr_db: s.mean_sqnr_db,
            analytic_mean: s.analytic_mean,
        })
        .collect();
    let cdf: Vec<CdfRow> = r
        .summaries
        .iter()
        .flat_map(|s| {
            s.cdf_db.x.iter().zip(&s.cdf_db.p).map(|(&x, &p)| CdfRow {
                method: &s.method,
                bits: &s.bits,
                snr_db: s.snr_db,
                sqnr_db: x,
                cdf: p,
            })
        })
        .collect();
    Ok(vec![
        write_file(dir, "sqnr.csv", &csv_bytes(scenario, "sqnr", &r.rows)?)?,
        write_file(dir, "sqnr_summary.csv", &csv_bytes(scenario, "sqnr", &summary)?)?,
        write_file(dir, "sqnr_cdf.csv", &csv_bytes(scenario, "sqnr", &cdf)?)?,
    ])
}

fn timing_summary(r: &TimingResult) -> Vec<TimingSummaryRow<'_>> {
    r.points
        .iter()
        .map(|p| TimingSummaryRow {
            method: &p.method,
            bits: &p.bits,
            snr_db: p.snr_db,
            cfo: p.cfo,
            n: p.nmse.n,
            nmse: p.nmse.mean,
            nmse_ci_low: p.nmse.ci_low,
            nmse_ci_high: p.nmse.ci_high,
            p_success: p.success.p,
            p_ci_low: p.success.ci_low,
            p_ci_high: p.success.ci_high,
        })
        .collect()
}

pub fn write_timing(
    dir: &Path,
    scenario: &Scenario,
    experiment: &str,
    r: &TimingResult,
) -> Result<Vec<PathBuf>, SimError> {
    Ok(vec![
        write_file(dir, &format!("{experiment}.csv"), &csv_bytes(scenario, experiment, &r.rows)?)?,
        write_file(
            dir,
            &format!("{experiment}_summary.csv"),
            &csv_bytes(scenario, experiment, &timing_summary(r))?,
        )?,
    ])
}

pub fn write_multicell(dir: &Path, scenario: &Scenario, r: &MulticellResult) -> Result<Vec<PathBuf>, SimError> {
    let mut files = write_timing(dir, scenario, "multicell", &r.detection)?;
    if !r.access_rows.is_empty() {
        let summary: Vec<AccessSummaryRow> = r
            .access
            .iter()
            .map(|a| AccessSummaryRow {
                method: &a.method,
                bits: &a.bits,
                snr_db: a.snr_db,
                slot: a.slot,
                probability: a.probability.p,
                ci_low: a.probability.ci_low,
                ci_high: a.probability.ci_high,
            })
            .collect();
        files.push(write_file(dir, "access.csv", &csv_bytes(scenario, "multicell", &r.access_rows)?)?);
        files.push(write_file(dir, "access_summary.csv", &csv_bytes(scenario, "multicell", &summary)?)?);
    }
    Ok(files)
}

pub fn complexity_csv(setup: &Setup, n_triggers: usize) -> Result<Vec<u8>, SimError> {
    let c = setup.complexity(n_triggers)?;
    let rows = vec![
        ComplexityRow {
            quantity: "bs_iterations_multi",
            value: c.bs_iterations_multi.to_string(),
        },
        ComplexityRow {
            quantity: "bs_iterations_single",
            value: c.bs_iterations_single.to_string(),
        },
        ComplexityRow {
            quantity: "ue_complex_mults",
            value: c.ue_complex_mults.to_string(),
        },
        ComplexityRow {
            quantity: "ue_complex_adds",
            value: c.ue_complex_adds.to_string(),
        },
    ];
    csv_bytes(&setup.scenario, "complexity", &rows)
}

pub fn write_complexity(dir: &Path, setup: &Setup, n_triggers: usize) -> Result<PathBuf, SimError> {
    write_file(dir, "complexity.csv", &complexity_csv(setup, n_triggers)?)
}

/// `manifest.toml`: run metadata, the per-slot beams and the resolved scenario.
pub fn manifest(setup: &Setup, experiment: &str) -> String {
    let sc = &setup.scenario;
    let mut m = String::new();
    m.push_str(&format!(
        "# beamsync {VERSION} run manifest\n\n[run]\nversion = \"{VERSION}\"\nexperiment = \"{experiment}\"\n\
         seed = {}\nscenario_hash = \"{}\"\n\
         snr_definition = \"transmit SNR before beamforming: mean |d[n]|^2 over noise variance, unit-power reference link\"\n\
         channel_model = \"{}\"\nanchor_grid = \"uniform, azimuth-major\"\n\n",
        sc.seed,
        sc.hash(),
        match sc.channel.regime {
            crate::config::Regime::Flat => "single-path flat",
            crate::config::Regime::Clustered =>
                "clustered multipath: exponential cluster delays, uniform angular spread",
        }
    ));
    for (i, a) in setup.anchors.anchors.iter().enumerate() {
        m.push_str(&format!(
            "[[anchors]]\nslot = {i}\nazimuth_deg = {}\nelevation_deg = {}\n\n",
            a.azimuth.to_degrees(),
            a.elevation.to_degrees()
        ));
    }
    for p in &setup.plans {
        let sets: Vec<String> = p
            .beam_sets
            .iter()
            .map(|s| format!("{:?}", s.indices))
            .collect();
        m.push_str(&format!(
            "[[beams]]\nmethod = \"{}\"\nbits = \"{}\"\nxi = {}\nper_slot = [{}]\n\n",
            p.method,
            bits_label(p.resolution),
            p.xi,
            sets.join(", ")
        ));
    }
    m.push_str("[scenario]\n");
    // nest the resolved scenario under [scenario]
    let resolved = sc.to_toml();
    let value: toml::Value = toml::from_str(&resolved).expect("scenario round-trips");
    let wrapped = toml::to_string(&toml::toml! { scenario = value }).expect("serializes");
    m.truncate(m.len() - "[scenario]\n".len());
    m.push_str(&wrapped);
    m
}

pub fn write_manifest(dir: &Path, setup: &Setup, experiment: &str) -> Result<PathBuf, SimError> {
    write_file(dir, "manifest.toml", manifest(setup, experiment).as_bytes())
}
