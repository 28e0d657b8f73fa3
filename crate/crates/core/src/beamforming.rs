//! Analog beam codebooks, array-of-subarray precoding, composite beams.
//!
//! The transmit array of `N_tot` elements is split into `N_RF` contiguous
//! blocks of `N_A = N_tot / N_RF` elements, one per RF chain. Every chain
//! carries the same synchronization signal, so the user sees the sum of the
//! per-subarray beams as one composite beam.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)] // inherent f64 methods win when std is in the build graph
use num_traits::Float;

use crate::channel::ArrayGeometry;
use crate::error::domain;
use crate::{Error, Result, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    /// Codeword length.
    pub n_a: usize,
    pub oversampling: usize,
    pub codewords: Vec<Vec<C64>>,
}

impl Codebook {
    /// Oversampled DFT codebook, `p_q[a] = e^{−j2πaq/N_beam}/√n_a`.
    pub fn dft(n_a: usize, oversampling: usize) -> Result<Self> {
        if n_a == 0 || oversampling == 0 {
            return domain("codebook size and oversampling must be positive");
        }
        let n_beam = n_a * oversampling;
        let s = 1.0 / (n_a as f64).sqrt();
        let codewords = (0..n_beam)
            .map(|q| {
                (0..n_a)
                    .map(|a| {
                        let ph = -2.0 * PI * ((a * q) % n_beam) as f64 / n_beam as f64;
                        C64::new(ph.cos(), ph.sin()) * s
                    })
                    .collect()
            })
            .collect();
        Ok(Codebook {
            n_a,
            oversampling,
            codewords,
        })
    }

    /// Planar DFT codebook for an `nx × ny` block (element `iy·nx + ix`):
    /// the Kronecker product of two oversampled DFT codebooks, codeword
    /// `qy·nx·os + qx`.
    pub fn dft_planar(nx: usize, ny: usize, oversampling: usize) -> Result<Self> {
        let (bx, by) = (Self::dft(nx, oversampling)?, Self::dft(ny, oversampling)?);
        let mut codewords = Vec::with_capacity(bx.n_beam() * by.n_beam());
        for py in &by.codewords {
            for px in &bx.codewords {
                codewords.push(py.iter().flat_map(|y| px.iter().map(move |x| y * x)).collect());
            }
        }
        Ok(Codebook {
            n_a: nx * ny,
            oversampling,
            codewords,
        })
    }

    /// Arbitrary codewords of a common length.
    pub fn from_codewords(codewords: Vec<Vec<C64>>) -> Result<Self> {
        let n_a = codewords.first().map(|c| c.len()).unwrap_or(0);
        if n_a == 0 || codewords.iter().any(|c| c.len() != n_a) {
            return domain("codewords must be nonempty and of equal length");
        }
        Ok(Codebook {
            n_a,
            oversampling: 1,
            codewords,
        })
    }

    pub fn n_beam(&self) -> usize {
        self.codewords.len()
    }

    /// Full-array beams for single-stream transmission: every codeword tiled
    /// across all `n_rf` subarrays and scaled by `1/√n_rf`.
    pub fn replicated(&self, n_rf: usize) -> Result<Codebook> {
        if n_rf == 0 {
            return domain("need at least one subarray");
        }
        let s = 1.0 / (n_rf as f64).sqrt();
        let codewords = self
            .codewords
            .iter()
            .map(|p| {
                let mut f = Vec::with_capacity(p.len() * n_rf);
                for _ in 0..n_rf {
                    f.extend(p.iter().map(|v| v * s));
                }
                f
            })
            .collect();
        Ok(Codebook {
            n_a: self.n_a * n_rf,
            oversampling: self.oversampling,
            codewords,
        })
    }
}

/// Codeword indices, one per subarray.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BeamSet {
    pub indices: Vec<usize>,
}

impl BeamSet {
    pub fn new(codebook: &Codebook, indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() {
            return domain("beam set must contain at least one beam");
        }
        if let Some(&q) = indices.iter().find(|&&q| q >= codebook.n_beam()) {
            return domain(alloc::format!(
                "codeword {q} not in a codebook of {}",
                codebook.n_beam()
            ));
        }
        Ok(BeamSet { indices })
    }

    pub fn n_rf(&self) -> usize {
        self.indices.len()
    }
}

/// `a_blk^H · p` for one subarray block.
#[inline]
pub fn block_inner(steering_block: &[C64], codeword: &[C64]) -> C64 {
    steering_block
        .iter()
        .zip(codeword)
        .map(|(a, p)| a.conj() * p)
        .sum()
}

/// `h^Ω = Σ_j a_tx[block j]^H · p_j`.
pub fn composite_beam_gain(codebook: &Codebook, set: &BeamSet, tx_steering: &[C64]) -> Result<C64> {
    let n_a = codebook.n_a;
    let want = set.n_rf() * n_a;
    if tx_steering.len() != want {
        return Err(Error::Dimension {
            expected: want,
            got: tx_steering.len(),
        });
    }
    let mut h = C64::new(0.0, 0.0);
    for (j, &q) in set.indices.iter().enumerate() {
        h += block_inner(&tx_steering[j * n_a..(j + 1) * n_a], &codebook.codewords[q]);
    }
    Ok(h)
}

/// Table `c[j][q] = a_tx[block j]^H · p_q` of every subarray/codeword pair.
pub fn subarray_gain_table(codebook: &Codebook, n_rf: usize, tx_steering: &[C64]) -> Result<Vec<Vec<C64>>> {
    let n_a = codebook.n_a;
    if tx_steering.len() != n_rf * n_a {
        return Err(Error::Dimension {
            expected: n_rf * n_a,
            got: tx_steering.len(),
        });
    }
    Ok((0..n_rf)
        .map(|j| {
            let blk = &tx_steering[j * n_a..(j + 1) * n_a];
            codebook.codewords.iter().map(|p| block_inner(blk, p)).collect()
        })
        .collect())
}

/// Block-diagonal `N_tot × N_RF` analog precoder.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecodingMatrix {
    pub n_a: usize,
    pub blocks: Vec<Vec<C64>>,
}

impl PrecodingMatrix {
    pub fn n_rf(&self) -> usize {
        self.blocks.len()
    }

    pub fn n_tot(&self) -> usize {
        self.n_a * self.blocks.len()
    }

    /// Row-major dense matrix.
    pub fn to_dense(&self) -> Vec<C64> {
        let (n, r) = (self.n_tot(), self.n_rf());
        let mut out = vec![C64::new(0.0, 0.0); n * r];
        for (j, p) in self.blocks.iter().enumerate() {
            for (a, v) in p.iter().enumerate() {
                out[(j * self.n_a + a) * r + j] = *v;
            }
        }
        out
    }

    /// Antenna weights when every chain sends the same symbol with power
    /// split evenly: `P·1/√N_RF`.
    pub fn transmit_vector(&self) -> Vec<C64> {
        let s = 1.0 / (self.n_rf() as f64).sqrt();
        self.blocks
            .iter()
            .flat_map(|p| p.iter().map(move |v| v * s))
            .collect()
    }
}

pub fn assemble_precoder(codebook: &Codebook, set: &BeamSet) -> Result<PrecodingMatrix> {
    if set.indices.is_empty() {
        return domain("beam set is empty");
    }
    Ok(PrecodingMatrix {
        n_a: codebook.n_a,
        blocks: set
            .indices
            .iter()
            .map(|&q| codebook.codewords[q].clone())
            .collect(),
    })
}

/// `|h^Ω|` over a list of `(azimuth, elevation)` directions.
pub fn composite_pattern(
    codebook: &Codebook,
    set: &BeamSet,
    geometry: &ArrayGeometry,
    directions: &[(f64, f64)],
) -> Result<Vec<f64>> {
    directions
        .iter()
        .map(|&(az, el)| {
            let a = geometry.steering_vector(az, el)?;
            Ok(composite_beam_gain(codebook, set, &a)?.norm())
        })
        .collect()
}
