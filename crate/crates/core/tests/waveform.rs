use std::f64::consts::PI;

use beamsync_core::waveform::{OfdmGrid, SyncWaveform, ZcSequence};
use beamsync_core::C64;

fn naive_dft(x: &[C64]) -> Vec<C64> {
    let n = x.len();
    (0..n)
        .map(|k| {
            x.iter()
                .enumerate()
                .map(|(i, v)| {
                    let ph = -2.0 * PI * (i * k % n) as f64 / n as f64;
                    v * C64::new(ph.cos(), ph.sin())
                })
                .sum::<C64>()
                / (n as f64).sqrt()
        })
        .collect()
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[test]
fn zc_first_sample_and_modulus() {
    let s = ZcSequence::new(34, 63).unwrap();
    assert_eq!(s.samples[0], C64::new(1.0, 0.0));
    for v in &s.samples {
        assert!((v.norm() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn zc_matches_direct_phase() {
    let s = ZcSequence::new(34, 63).unwrap();
    for (m, v) in s.samples.iter().enumerate() {
        let ph = -PI * (m * (m + 1)) as f64 * 34.0 / 63.0;
        let want = C64::new(ph.cos(), ph.sin());
        assert!((v - want).norm() < 1e-9, "m={m}");
    }
}

#[test]
fn zc_autocorrelation_is_impulse() {
    let s = ZcSequence::new(34, 63).unwrap();
    // brute-force oracle, independent of the library's own correlator
    for lag in 0..63 {
        let r: C64 = (0..63)
            .map(|m| s.samples[(m + lag) % 63] * s.samples[m].conj())
            .sum::<C64>()
            / 63.0;
        if lag == 0 {
            assert!((r.norm() - 1.0).abs() < 1e-12);
        } else {
            assert!(r.norm() < 1e-9, "lag {lag}: {}", r.norm());
        }
    }
    let lib = s.normalized_autocorrelation();
    assert!((lib[0].norm() - 1.0).abs() < 1e-12);
    assert!(lib[1..].iter().all(|v| v.norm() < 1e-9));
    assert!((s.cyclic_autocorrelation()[0].re - 63.0).abs() < 1e-9);
}

#[test]
fn zc_impulse_for_every_coprime_root() {
    for len in [31usize, 63, 139] {
        for root in 1..len {
            if gcd(root, len) != 1 {
                continue;
            }
            let r = ZcSequence::new(root, len).unwrap().normalized_autocorrelation();
            let worst = r[1..].iter().map(|v| v.norm()).fold(0.0, f64::max);
            assert!(worst < 1e-9, "root {root} len {len}: {worst}");
        }
    }
}

#[test]
fn zc_rejects_bad_arguments() {
    assert!(ZcSequence::new(63, 63).is_err());
    assert!(ZcSequence::new(0, 0).is_err());
}

#[test]
fn default_grid_indices() {
    let s = ZcSequence::new(34, 63).unwrap();
    let g = OfdmGrid::map_zc(&s, 512).unwrap();
    assert_eq!(g.band_start, 225);
    assert_eq!(g.band_start + g.band_len - 1, 287);
    assert_eq!(g.dc_index, 256);
    assert_eq!(g.symbols[256], C64::new(0.0, 0.0));
    for (k, v) in g.symbols.iter().enumerate() {
        let inside = (225..=287).contains(&k) && k != 256;
        if inside {
            assert_eq!(*v, s.samples[k - 225]);
        } else {
            assert_eq!(*v, C64::new(0.0, 0.0), "k={k}");
        }
    }
}

#[test]
fn band_extraction_recovers_punctured_sequence() {
    let s = ZcSequence::new(29, 63).unwrap();
    let g = OfdmGrid::map_zc(&s, 512).unwrap();
    let mut want = s.samples.clone();
    want[256 - 225] = C64::new(0.0, 0.0);
    assert_eq!(g.band(), &want[..]);
}

#[test]
fn degenerate_single_element_map() {
    let s = ZcSequence::new(0, 1).unwrap();
    let g = OfdmGrid::map_zc(&s, 4).unwrap();
    assert_eq!(g.symbols.iter().filter(|v| v.norm() > 0.0).count(), 1);
}

#[test]
fn grid_must_be_longer_than_sequence() {
    let s = ZcSequence::new(34, 63).unwrap();
    assert!(OfdmGrid::map_zc(&s, 63).is_err());
    assert!(OfdmGrid::map_zc(&s, 32).is_err());
}

#[test]
fn modulate_zero_grid() {
    let g = OfdmGrid::from_centered(vec![C64::new(0.0, 0.0); 16]).unwrap();
    let w = SyncWaveform::modulate(g, 4).unwrap();
    assert!(w.time_samples.iter().all(|v| v.norm() == 0.0));
}

#[test]
fn modulate_dc_tone_is_constant() {
    let n = 16;
    let mut sym = vec![C64::new(0.0, 0.0); n];
    sym[n / 2] = C64::new(1.0, 0.0);
    let w = SyncWaveform::modulate(OfdmGrid::from_centered(sym).unwrap(), 4).unwrap();
    let c = 1.0 / (n as f64).sqrt();
    for v in &w.time_samples {
        assert!((v - C64::new(c, 0.0)).norm() < 1e-12);
    }
}

#[test]
fn modulate_matches_direct_idft_and_round_trips() {
    let w = SyncWaveform::zadoff_chu(34, 63, 512, 64).unwrap();
    let dft = naive_dft(&w.time_samples);
    let centered = w.grid.centered_from_dft(&dft);
    for (a, b) in centered.iter().zip(&w.grid.symbols) {
        assert!((a - b).norm() < 1e-10);
    }
    // direct evaluation of the inverse transform with centered frequencies
    let n = 512;
    for t in [0usize, 1, 100, 511] {
        let mut acc = C64::new(0.0, 0.0);
        for (k, d) in w.grid.symbols.iter().enumerate() {
            let f = k as f64 - 256.0;
            let ph = 2.0 * PI * f * t as f64 / n as f64;
            acc += d * C64::new(ph.cos(), ph.sin());
        }
        acc /= (n as f64).sqrt();
        assert!((acc - w.time_samples[t]).norm() < 1e-10, "t={t}");
    }
}

#[test]
fn cyclic_prefix_and_lengths() {
    let w = SyncWaveform::zadoff_chu(34, 63, 512, 64).unwrap();
    assert_eq!(w.samples_with_cp.len(), 576);
    assert_eq!(&w.samples_with_cp[..64], &w.time_samples[448..]);
    assert_eq!(&w.samples_with_cp[64..], &w.time_samples[..]);
    assert!(SyncWaveform::zadoff_chu(34, 63, 512, 512).is_err());
}

#[test]
fn parseval() {
    let w = SyncWaveform::zadoff_chu(25, 63, 512, 64).unwrap();
    let t: f64 = w.time_samples.iter().map(|v| v.norm_sqr()).sum();
    let f = w.grid.energy();
    assert!((t - f).abs() / f < 1e-9);
    assert!((f - 62.0).abs() < 1e-9);
}
