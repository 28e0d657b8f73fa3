use beamsync_core::channel::{add_burst, add_noise};
use beamsync_core::detector::{
    correlate, correlate_direct, detect, freq_correlation_at_lag, nmse_term, timing_nmse, zero_lag_freq_correlation,
    Correlator, Detection, TrialOutcome,
};
use beamsync_core::quantization::{per_rail_rms, AdcModel};
use beamsync_core::waveform::{OfdmGrid, SyncWaveform};
use beamsync_core::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

fn waveform() -> SyncWaveform {
    SyncWaveform::zadoff_chu(34, 63, 512, 64).unwrap()
}

#[test]
fn fft_correlation_matches_direct() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let reference: Vec<C64> = (0..37).map(|_| C64::new(rng.random(), rng.random())).collect();
    let rx: Vec<Vec<C64>> = (0..3)
        .map(|_| (0..200).map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect())
        .collect();
    let a = correlate(&rx, &reference).unwrap();
    let b = correlate_direct(&rx, &reference).unwrap();
    assert_eq!(a.lags(), 164);
    for (ra, rb) in a.per_antenna.iter().zip(&b.per_antenna) {
        for (x, y) in ra.iter().zip(rb) {
            assert!((x - y).norm() < 1e-9);
        }
    }
}

#[test]
fn matched_filter_on_itself() {
    let w = waveform();
    let d = &w.time_samples;
    let mut row = d.clone();
    row.extend(vec![zero(); 512 * 2]);
    let p = correlate(&[row], d).unwrap();
    let energy: f64 = d.iter().map(|v| v.norm_sqr()).sum();
    assert!((p.per_antenna[0][0].norm() - energy).abs() < 1e-9);
    // 63 occupied subcarriers out of 512: the main lobe spans about ±8 lags
    let tail = &p.per_antenna[0][16..];
    let side = tail.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mean = tail.iter().map(|v| v.norm()).sum::<f64>() / tail.len() as f64;
    assert!(side < 0.4 * energy, "{side} vs {energy}");
    assert!(mean < 0.05 * energy, "{mean} vs {energy}");
    assert!(p.per_antenna[0][1..].iter().all(|v| v.norm() < energy));
    assert_eq!(detect(&p).unwrap().nu_hat, 0);
}

#[test]
fn zero_input_gives_zero_profile() {
    let w = waveform();
    let p = correlate(&[vec![zero(); 1024]], &w.time_samples).unwrap();
    assert!(p.per_antenna[0].iter().all(|v| v.norm() < 1e-15));
}

#[test]
fn length_mismatch_errors() {
    let w = waveform();
    assert!(correlate(&[vec![zero(); 100]], &w.time_samples).is_err());
    let c = Correlator::new(&w.time_samples, 1024).unwrap();
    assert!(c.correlate(&[vec![zero(); 1000]]).is_err());
    assert!(correlate_direct(&[vec![zero(); 100]], &w.time_samples).is_err());
}

#[test]
fn noiseless_pipeline_finds_t37() {
    let w = waveform();
    let n = 512;
    let len = n * 10;
    let mut block = vec![vec![zero(); len]; 2];
    let taps = vec![vec![C64::new(0.3, -0.2)], vec![C64::new(-0.1, 0.4)]];
    add_burst(&mut block, &taps, &w.time_samples, 37, 0.0).unwrap();
    let p = correlate(&block, &w.time_samples).unwrap();
    assert_eq!(p.lags(), n * 9 + 1);
    let d = detect(&p).unwrap();
    assert_eq!(d.nu_hat, 37);
    assert_eq!(d.b_hat, 1);
}

#[test]
fn every_timing_is_found_without_noise() {
    let w = waveform();
    let c = Correlator::new(&w.time_samples, 512 * 3).unwrap();
    for t in (1..=1024).step_by(37) {
        let mut block = vec![vec![zero(); 512 * 3]];
        add_burst(&mut block, &[vec![C64::new(1.0, 0.0)]], &w.time_samples, t as i64, 0.0).unwrap();
        assert_eq!(detect(&c.correlate(&block).unwrap()).unwrap().nu_hat, t);
    }
}

#[test]
fn dead_antenna_is_not_selected() {
    let w = waveform();
    let mut block = vec![vec![zero(); 1024]; 2];
    add_burst(&mut block, &[vec![zero()], vec![C64::new(1.0, 0.0)]], &w.time_samples, 5, 0.0).unwrap();
    assert_eq!(detect(&correlate(&block, &w.time_samples).unwrap()).unwrap().b_hat, 1);
}

#[test]
fn ties_prefer_smallest_lag_then_antenna() {
    use beamsync_core::detector::CorrelationProfile;
    let one = C64::new(1.0, 0.0);
    let p = CorrelationProfile {
        per_antenna: vec![vec![zero(), one, one], vec![one, zero(), zero()]],
    };
    let d = detect(&p).unwrap();
    assert_eq!((d.nu_hat, d.b_hat), (0, 1));
    let p = CorrelationProfile {
        per_antenna: vec![vec![zero(), one], vec![zero(), one]],
    };
    let d = detect(&p).unwrap();
    assert_eq!((d.nu_hat, d.b_hat), (1, 0));
    assert!(detect(&CorrelationProfile { per_antenna: vec![] }).is_err());
}

#[test]
fn deterministic_under_seed() {
    let w = waveform();
    let run = |seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut block = vec![vec![zero(); 2048]; 4];
        add_burst(&mut block, &vec![vec![C64::new(0.2, 0.0)]; 4], &w.time_samples, 300, 0.3).unwrap();
        add_noise(&mut block, 1.0, &mut rng);
        let adc = AdcModel::bits(2).unwrap();
        for row in block.iter_mut() {
            let rms = per_rail_rms(row);
            adc.apply_in_place(row, rms).unwrap();
        }
        detect(&correlate(&block, &w.time_samples).unwrap()).unwrap()
    };
    assert_eq!(run(3), run(3));
}

#[test]
fn dual_domain_zero_lag() {
    let w = waveform();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let burst: Vec<C64> = w
        .time_samples
        .iter()
        .map(|v| v * C64::new(0.7, 0.2) + C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    let lam = zero_lag_freq_correlation(&burst, &w.grid).unwrap();
    let gamma: C64 = burst.iter().zip(&w.time_samples).map(|(q, d)| q * d.conj()).sum();
    assert!((lam - gamma).norm() < 1e-8);
}

#[test]
fn noiseless_zero_lag_is_gain_times_energy() {
    let w = waveform();
    let g = C64::new(-0.4, 0.9);
    let burst: Vec<C64> = w.time_samples.iter().map(|v| v * g).collect();
    let lam = zero_lag_freq_correlation(&burst, &w.grid).unwrap();
    assert!((lam - g * w.grid.energy()).norm() < 1e-9);
    let empty = OfdmGrid::from_centered(vec![zero(); 512]).unwrap();
    assert_eq!(zero_lag_freq_correlation(&burst, &empty).unwrap(), zero());
    assert!(freq_correlation_at_lag(&burst[..100], &w.grid, 0).is_err());
}

#[test]
fn frequency_and_time_antenna_choice_agree() {
    let w = waveform();
    let gains = [C64::new(0.2, 0.1), C64::new(-0.9, 0.3), C64::new(0.5, 0.5)];
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let bursts: Vec<Vec<C64>> = gains
        .iter()
        .map(|g| {
            w.time_samples
                .iter()
                .map(|v| v * g + C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5) * 0.01)
                .collect()
        })
        .collect();
    let freq: Vec<f64> = bursts.iter().map(|b| zero_lag_freq_correlation(b, &w.grid).unwrap().norm_sqr()).collect();
    let p = correlate(&bursts, &w.time_samples).unwrap();
    let time: Vec<f64> = p.per_antenna.iter().map(|r| r[0].norm_sqr()).collect();
    let argmax = |v: &[f64]| (0..v.len()).fold(0, |b, i| if v[i] > v[b] { i } else { b });
    assert_eq!(argmax(&freq), argmax(&time));
    assert_eq!(argmax(&time), 1);
}

#[test]
fn quantization_keeps_profile_shape() {
    let w = waveform();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut block = vec![vec![zero(); 3000]; 2];
    add_noise(&mut block, 1.0, &mut rng);
    let base = correlate(&block, &w.time_samples).unwrap();
    for b in [1u8, 2, 4, 8] {
        let adc = AdcModel::bits(b).unwrap();
        let q: Vec<Vec<C64>> = block.iter().map(|r| adc.apply(r, per_rail_rms(r)).unwrap()).collect();
        let p = correlate(&q, &w.time_samples).unwrap();
        assert_eq!(p.lags(), base.lags());
        assert_eq!(p.per_antenna.len(), 2);
    }
}

#[test]
fn nmse_arithmetic() {
    assert!((nmse_term(100, 90).unwrap() - 0.01).abs() < 1e-15);
    assert!(nmse_term(0, 3).is_err());
    let det = |nu| Detection {
        nu_hat: nu,
        b_hat: 0,
        peak_power: 1.0,
    };
    let exact: Vec<_> = (1..10).map(|t| TrialOutcome::new(det(t), t, f64::NAN)).collect();
    assert_eq!(timing_nmse(&exact).unwrap(), 0.0);
    assert!(exact.iter().all(|o| o.success));
    let mixed = [TrialOutcome::new(det(90), 100, 0.0), TrialOutcome::new(det(100), 100, 0.0)];
    assert!((timing_nmse(&mixed).unwrap() - 0.005).abs() < 1e-15);
    assert!(!mixed[0].success);
    assert!(timing_nmse(&[]).is_err());
}
