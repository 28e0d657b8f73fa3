use beamsync_core::beamforming::{composite_beam_gain, BeamSet, Codebook};
use beamsync_core::channel::{add_burst, ArrayGeometry};
use beamsync_core::detector::{correlate, detect};
use beamsync_core::fft::{unitary_dft, unitary_idft};
use beamsync_core::quantization::{bussgang_decompose, AdcModel};
use beamsync_core::sqnr::{
    nonzero_lag_power, sqnr_lambda_form, sqnr_lower_bound, sqnr_single_beam, sqnr_worst_case, zero_lag_power,
    SqnrInputs,
};
use beamsync_core::waveform::{OfdmGrid, SyncWaveform, ZcSequence};
use beamsync_core::C64;
use proptest::prelude::*;

const LENGTHS: [usize; 6] = [7, 13, 31, 61, 63, 139];

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn complex_vec(len: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0).prop_map(|(a, b)| C64::new(a, b)), len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn zc_unit_modulus_and_impulse(li in 0usize..LENGTHS.len(), r in 1usize..1000) {
        let len = LENGTHS[li];
        let root = 1 + r % (len - 1);
        prop_assume!(gcd(root, len) == 1);
        let s = ZcSequence::new(root, len).unwrap();
        prop_assert!(s.samples.iter().all(|v| (v.norm() - 1.0).abs() < 1e-12));
        let ac = s.normalized_autocorrelation();
        prop_assert!((ac[0].norm() - 1.0).abs() < 1e-12);
        prop_assert!(ac[1..].iter().all(|v| v.norm() < 1e-9));
    }

    #[test]
    fn mapped_band_round_trips(root in 1usize..62, n_pow in 7u32..11) {
        let n = 1usize << n_pow;
        let s = ZcSequence::new(root, 63).unwrap();
        let g = OfdmGrid::map_zc(&s, n).unwrap();
        prop_assert_eq!(g.symbols[g.dc_index], C64::new(0.0, 0.0));
        let nonzero = g.symbols.iter().filter(|v| v.norm() > 0.0).count();
        prop_assert_eq!(nonzero, 62);
        for (i, v) in g.band().iter().enumerate() {
            if g.band_start + i != g.dc_index {
                prop_assert_eq!(*v, s.samples[i]);
            }
        }
        prop_assert_eq!(g.centered_from_dft(&g.dft_order()), g.symbols.clone());
    }

    #[test]
    fn parseval_and_round_trip(x in complex_vec(64), cp in 0usize..64) {
        let g = OfdmGrid::from_centered(x.clone()).unwrap();
        let w = SyncWaveform::modulate(g, cp).unwrap();
        let et: f64 = w.time_samples.iter().map(|v| v.norm_sqr()).sum();
        let ef: f64 = x.iter().map(|v| v.norm_sqr()).sum();
        prop_assert!((et - ef).abs() <= 1e-9 * ef.max(1e-300));
        let back = w.grid.centered_from_dft(&unitary_dft(&w.time_samples));
        for (a, b) in back.iter().zip(&x) {
            prop_assert!((a - b).norm() < 1e-10);
        }
        prop_assert_eq!(&w.samples_with_cp[..cp], &w.time_samples[64 - cp..]);
        let y = unitary_idft(&unitary_dft(&x));
        for (a, b) in y.iter().zip(&x) {
            prop_assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn quantizer_alphabet_and_idempotence(bits in 1u8..=8, x in complex_vec(200), rms in 0.1f64..5.0) {
        let adc = AdcModel::bits(bits).unwrap();
        let q = adc.apply(&x, rms).unwrap();
        let levels: Vec<f64> = adc.levels().iter().map(|l| l * rms).collect();
        prop_assert_eq!(levels.len(), 1usize << bits);
        for v in &q {
            for rail in [v.re, v.im] {
                prop_assert!(levels.iter().any(|l| (l - rail).abs() <= 1e-12 * rms));
            }
        }
        prop_assert_eq!(adc.apply(&q, rms).unwrap(), q.clone());
        prop_assert_eq!(AdcModel::infinite().apply(&x, rms).unwrap(), x);
        // symmetric alphabet
        let l = adc.levels();
        for i in 0..l.len() {
            prop_assert!((l[i] + l[l.len() - 1 - i]).abs() < 1e-12);
        }
    }

    #[test]
    fn bussgang_diagonal(powers in prop::collection::vec(0.0f64..10.0, 1..20), var in 0.0f64..3.0, xi in 0.0f64..0.99) {
        prop_assume!(powers.iter().all(|p| p + var > 1e-6));
        let st = bussgang_decompose(&powers, var, xi).unwrap();
        for ((p, e), r) in powers.iter().zip(&st.eta).zip(&st.noise_cov_diag) {
            let v = p + var;
            prop_assert!((e - (1.0 - xi) / v.sqrt()).abs() < 1e-12 * e.max(1.0));
            prop_assert!((r - e * (1.0 - e) * v).abs() < 1e-12 * v.max(1.0));
        }
    }

    #[test]
    fn steering_self_coherence(nx in 1usize..9, ny in 1usize..9, az in -1.5f64..1.5, el in -0.8f64..0.8) {
        let g = ArrayGeometry::upa(nx, ny);
        let a = g.steering_vector(az, el).unwrap();
        prop_assert!(a.iter().all(|v| (v.norm() - 1.0).abs() < 1e-12));
        let s: C64 = a.iter().map(|v| v.conj() * v).sum();
        prop_assert!((s.norm() - (nx * ny) as f64).abs() < 1e-9);
    }

    #[test]
    fn composite_gain_bounded(n_a in 1usize..9, os in 1usize..4, n_rf in 1usize..5,
                              az in -1.5f64..1.5, seed in prop::collection::vec(0usize..1000, 4)) {
        let cb = Codebook::dft(n_a, os).unwrap();
        let idx: Vec<usize> = seed[..n_rf].iter().map(|s| s % cb.n_beam()).collect();
        let a = ArrayGeometry::ula(n_a * n_rf).steering_vector(az, 0.0).unwrap();
        let h = composite_beam_gain(&cb, &BeamSet::new(&cb, idx).unwrap(), &a).unwrap();
        prop_assert!(h.norm() <= n_rf as f64 * (n_a as f64).sqrt() + 1e-12);
    }

    #[test]
    fn bound_chain(s_t in 0.01f64..64.0, extra in 0.0f64..200.0, scale in 1.0f64..10.0,
                   xi_u in 0.0f64..0.4, dxi in 0.0f64..0.4, var in 0.5f64..2.0) {
        let lam_u = s_t / 2.0 + extra;
        let lam_max = lam_u * scale;
        let g = sqnr_lambda_form(s_t, lam_u, xi_u, var).unwrap();
        let b = sqnr_worst_case(s_t, lam_max, xi_u, var).unwrap();
        let a = sqnr_lower_bound(s_t, lam_max, (xi_u + dxi).min(0.95), var).unwrap();
        prop_assert!(a <= b + 1e-12);
        prop_assert!(b <= g + 1e-12);
    }

    #[test]
    fn gamma_monotone_in_signal(s in 0.0f64..100.0, ds in 0.0f64..10.0, var in 0.01f64..5.0, eta in 0.01f64..1.0) {
        let i = |s| SqnrInputs { effective_gain_sq: s, noise_var: var, eta };
        prop_assert!(sqnr_single_beam(&i(s + ds)).unwrap() >= sqnr_single_beam(&i(s)).unwrap() - 1e-12);
    }

    #[test]
    fn power_ratio_identity(s in 0.0f64..100.0, var in 0.01f64..5.0, eta in 0.01f64..1.0) {
        let g = sqnr_single_beam(&SqnrInputs { effective_gain_sq: s, noise_var: var, eta }).unwrap();
        let r = zero_lag_power(eta, s, var) / nonzero_lag_power(eta, s, var);
        prop_assert!((r - 1.0 - g).abs() <= 1e-10 * (1.0 + g));
    }

    #[test]
    fn noiseless_detection_is_exact(t in 0usize..1536, gr in -1.0f64..1.0, gi in -1.0f64..1.0) {
        prop_assume!(gr.abs() + gi.abs() > 1e-3);
        let w = SyncWaveform::zadoff_chu(34, 63, 512, 64).unwrap();
        let mut block = vec![vec![C64::new(0.0, 0.0); 2048]];
        add_burst(&mut block, &[vec![C64::new(gr, gi)]], &w.time_samples, t as i64, 0.0).unwrap();
        let d = detect(&correlate(&block, &w.time_samples).unwrap()).unwrap();
        prop_assert_eq!(d.nu_hat, t);
    }
}
