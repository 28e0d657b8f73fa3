use std::f64::consts::PI;

use beamsync_core::beamforming::{
    assemble_precoder, composite_beam_gain, composite_pattern, subarray_gain_table, BeamSet, Codebook,
};
use beamsync_core::channel::ArrayGeometry;
use beamsync_core::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[test]
fn dft_codebook_shape_and_power() {
    let cb = Codebook::dft(8, 2).unwrap();
    assert_eq!(cb.n_beam(), 16);
    for w in &cb.codewords {
        assert_eq!(w.len(), 8);
        for v in w {
            assert!((v.norm() - 1.0 / 8f64.sqrt()).abs() < 1e-15);
        }
    }
    assert!(Codebook::dft(0, 2).is_err());
    assert!(Codebook::dft(4, 0).is_err());
}

#[test]
fn dft_codeword_formula() {
    let cb = Codebook::dft(4, 2).unwrap();
    for q in 0..8 {
        for a in 0..4 {
            let ph = -2.0 * PI * (a * q) as f64 / 8.0;
            assert!((cb.codewords[q][a] - c(ph.cos(), ph.sin()) / 2.0).norm() < 1e-12);
        }
    }
}

#[test]
fn critically_sampled_codewords_are_orthogonal() {
    let cb = Codebook::dft(8, 1).unwrap();
    for i in 0..8 {
        for j in 0..8 {
            let ip: C64 = cb.codewords[i].iter().zip(&cb.codewords[j]).map(|(a, b)| a.conj() * b).sum();
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((ip.norm() - want).abs() < 1e-12);
        }
    }
}

#[test]
fn one_subarray_reduces_to_inner_product() {
    let cb = Codebook::dft(8, 2).unwrap();
    let a = ArrayGeometry::ula(8).steering_vector(0.3, 0.0).unwrap();
    for q in 0..16 {
        let h = composite_beam_gain(&cb, &BeamSet::new(&cb, vec![q]).unwrap(), &a).unwrap();
        let ip: C64 = a.iter().zip(&cb.codewords[q]).map(|(x, p)| x.conj() * p).sum();
        assert!((h - ip).norm() < 1e-14);
    }
}

#[test]
fn coherent_boresight_sum() {
    let cb = Codebook::dft(8, 2).unwrap();
    let a = ArrayGeometry::ula(32).steering_vector(0.0, 0.0).unwrap();
    let h = composite_beam_gain(&cb, &BeamSet::new(&cb, vec![0; 4]).unwrap(), &a).unwrap();
    assert!((h.norm() - 4.0 * 8f64.sqrt()).abs() < 1e-12);
}

#[test]
fn dimension_mismatch_is_an_error() {
    let cb = Codebook::dft(8, 2).unwrap();
    let a = ArrayGeometry::ula(30).steering_vector(0.0, 0.0).unwrap();
    assert!(composite_beam_gain(&cb, &BeamSet::new(&cb, vec![0; 4]).unwrap(), &a).is_err());
    assert!(BeamSet::new(&cb, vec![16]).is_err());
    assert!(BeamSet::new(&cb, vec![]).is_err());
}

#[test]
fn small_array_pattern_matches_dense_sweep() {
    // eight elements in four subarrays of two
    let cb = Codebook::dft(2, 2).unwrap();
    let g = ArrayGeometry::ula(8);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let dirs: Vec<(f64, f64)> = (0..721).map(|i| (-PI / 2.0 + PI * i as f64 / 720.0, 0.0)).collect();
    for _ in 0..20 {
        let idx: Vec<usize> = (0..4).map(|_| rng.random_range(0..4)).collect();
        let set = BeamSet::new(&cb, idx.clone()).unwrap();
        let pat = composite_pattern(&cb, &set, &g, &dirs).unwrap();
        for (&(az, _), got) in dirs.iter().zip(&pat) {
            // element-by-element: Σ_j Σ_a e^{+jπ(2j+a)sin θ}·p_{q_j}[a]
            let mut h = c(0.0, 0.0);
            for (j, &q) in idx.iter().enumerate() {
                for a in 0..2 {
                    let n = (2 * j + a) as f64;
                    let ph = PI * n * az.sin() - 2.0 * PI * (a * q) as f64 / 4.0;
                    h += c(ph.cos(), ph.sin()) / 2f64.sqrt();
                }
            }
            assert!((h.norm() - got).abs() < 1e-12);
        }
    }
}

#[test]
fn precoder_structure() {
    let cb = Codebook::dft(8, 2).unwrap();
    let set = BeamSet::new(&cb, vec![1, 5, 9, 14]).unwrap();
    let p = assemble_precoder(&cb, &set).unwrap();
    assert_eq!((p.n_tot(), p.n_rf()), (32, 4));
    let dense = p.to_dense();
    for j in 0..4 {
        let mut norm = 0.0;
        for row in 0..32 {
            let v = dense[row * 4 + j];
            if row / 8 == j {
                norm += v.norm_sqr();
                assert_eq!(v, cb.codewords[set.indices[j]][row % 8]);
            } else {
                assert_eq!(v, c(0.0, 0.0));
            }
        }
        assert!((norm - 1.0).abs() < 1e-12);
    }
    let single = assemble_precoder(&cb, &BeamSet::new(&cb, vec![3]).unwrap()).unwrap();
    assert_eq!(single.to_dense(), cb.codewords[3]);
}

#[test]
fn flat_channel_equivalence() {
    let cb = Codebook::dft(8, 2).unwrap();
    let (tx, rx) = (ArrayGeometry::ula(32), ArrayGeometry::ula(4));
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let idx: Vec<usize> = (0..4).map(|_| rng.random_range(0..16)).collect();
        let set = BeamSet::new(&cb, idx).unwrap();
        let (az, aoa) = (rng.random_range(-1.2..1.2), rng.random_range(-1.2..1.2));
        let g = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let at = tx.steering_vector(az, 0.0).unwrap();
        let ar = rx.steering_vector(aoa, 0.0).unwrap();
        let p = assemble_precoder(&cb, &set).unwrap();
        // matrix route: H·P·1/√N_RF with H = g·a_rx·a_tx^H
        let dense = p.to_dense();
        let mut px = vec![c(0.0, 0.0); 32];
        for (r, v) in px.iter_mut().enumerate() {
            *v = (0..4).map(|j| dense[r * 4 + j]).sum::<C64>() / 2.0;
        }
        assert_eq!(px.len(), p.transmit_vector().len());
        for (x, y) in px.iter().zip(p.transmit_vector()) {
            assert!((x - y).norm() < 1e-14);
        }
        let atp: C64 = at.iter().zip(&px).map(|(a, v)| a.conj() * v).sum();
        let h = composite_beam_gain(&cb, &set, &at).unwrap();
        for b in 0..4 {
            let matrix = g * ar[b] * atp;
            let scalar = g * ar[b] * h / 2.0;
            assert!((matrix - scalar).norm() < 1e-9);
        }
        assert!(h.norm() <= 4.0 * 8f64.sqrt() + 1e-12);
    }
}

#[test]
fn subarray_assignment_matters() {
    let cb = Codebook::dft(8, 2).unwrap();
    let a = ArrayGeometry::ula(32).steering_vector(0.35, 0.0).unwrap();
    let h1 = composite_beam_gain(&cb, &BeamSet::new(&cb, vec![0, 3, 7, 12]).unwrap(), &a).unwrap();
    let h2 = composite_beam_gain(&cb, &BeamSet::new(&cb, vec![12, 7, 3, 0]).unwrap(), &a).unwrap();
    assert!((h1 - h2).norm() > 1e-6);
}

#[test]
fn gain_table_sums_to_composite() {
    let cb = Codebook::dft(8, 2).unwrap();
    let a = ArrayGeometry::ula(32).steering_vector(-0.7, 0.0).unwrap();
    let t = subarray_gain_table(&cb, 4, &a).unwrap();
    let idx = vec![2, 15, 0, 8];
    let h = composite_beam_gain(&cb, &BeamSet::new(&cb, idx.clone()).unwrap(), &a).unwrap();
    let s: C64 = idx.iter().enumerate().map(|(j, &q)| t[j][q]).sum();
    assert!((h - s).norm() < 1e-14);
}

#[test]
fn replicated_codebook_is_uniform_tuple() {
    let cb = Codebook::dft(8, 2).unwrap();
    let full = cb.replicated(4).unwrap();
    assert_eq!((full.n_a, full.n_beam()), (32, 16));
    let a = ArrayGeometry::ula(32).steering_vector(0.2, 0.0).unwrap();
    for q in 0..16 {
        let single = composite_beam_gain(&full, &BeamSet::new(&full, vec![q]).unwrap(), &a).unwrap();
        let multi = composite_beam_gain(&cb, &BeamSet::new(&cb, vec![q; 4]).unwrap(), &a).unwrap();
        assert!((single - multi / 2.0).norm() < 1e-12);
        let pw: f64 = full.codewords[q].iter().map(|v| v.norm_sqr()).sum();
        assert!((pw - 1.0).abs() < 1e-12);
    }
}

#[test]
fn planar_codebook_is_kronecker() {
    let cb = Codebook::dft_planar(4, 2, 2).unwrap();
    assert_eq!((cb.n_a, cb.n_beam()), (8, 32));
    let (bx, by) = (Codebook::dft(4, 2).unwrap(), Codebook::dft(2, 2).unwrap());
    for qy in 0..4 {
        for qx in 0..8 {
            let w = &cb.codewords[qy * 8 + qx];
            for iy in 0..2 {
                for ix in 0..4 {
                    let want = by.codewords[qy][iy] * bx.codewords[qx][ix];
                    assert!((w[iy * 4 + ix] - want).norm() < 1e-15);
                }
            }
        }
    }
    // matched planar beam reaches the full block gain
    let g = ArrayGeometry::upa(4, 2);
    let (u, v): (f64, f64) = (2.0 * 3.0 / 8.0, 2.0 * 1.0 / 4.0);
    let el = v.asin();
    let az = (u / el.cos()).asin();
    let a = g.steering_vector(az, el).unwrap();
    let h = composite_beam_gain(&cb, &BeamSet::new(&cb, vec![8 + 3]).unwrap(), &a).unwrap();
    assert!((h.norm() - 8f64.sqrt()).abs() < 1e-9);
}
