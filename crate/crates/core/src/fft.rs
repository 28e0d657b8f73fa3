//! Small in-place FFT.
//!
//! Power-of-two sizes use an iterative radix-2 transform; any other size
//! falls back to a direct O(n²) DFT. Both directions are unnormalized.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)] // inherent f64 methods win when std is in the build graph
use num_traits::Float;

use crate::C64;

#[derive(Debug, Clone)]
pub struct Fft {
    n: usize,
    // e^{-j2πk/n} for k in 0..n (radix-2 only reads the first half)
    twiddles: Vec<C64>,
    bitrev: Vec<usize>,
}

impl Fft {
    pub fn new(n: usize) -> Self {
        let twiddles = (0..n)
            .map(|k| {
                let ang = -2.0 * PI * k as f64 / n as f64;
                C64::new(ang.cos(), ang.sin())
            })
            .collect();
        let bitrev = if n.is_power_of_two() && n > 1 {
            let bits = n.trailing_zeros();
            (0..n)
                .map(|i| i.reverse_bits() >> (usize::BITS - bits))
                .collect()
        } else {
            Vec::new()
        };
        Fft {
            n,
            twiddles,
            bitrev,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// X[k] = Σ_n x[n]·e^{−j2πkn/N}
    pub fn forward(&self, buf: &mut [C64]) {
        assert_eq!(buf.len(), self.n, "buffer length must match the plan");
        if self.n <= 1 {
            return;
        }
        if self.bitrev.is_empty() {
            self.direct(buf);
        } else {
            self.radix2(buf);
        }
    }

    /// x[n] = Σ_k X[k]·e^{+j2πkn/N}
    pub fn inverse(&self, buf: &mut [C64]) {
        for v in buf.iter_mut() {
            *v = v.conj();
        }
        self.forward(buf);
        for v in buf.iter_mut() {
            *v = v.conj();
        }
    }

    fn radix2(&self, buf: &mut [C64]) {
        let n = self.n;
        for i in 0..n {
            let j = self.bitrev[i];
            if i < j {
                buf.swap(i, j);
            }
        }
        let mut len = 2;
        while len <= n {
            let half = len / 2;
            let stride = n / len;
            for start in (0..n).step_by(len) {
                for k in 0..half {
                    let w = self.twiddles[k * stride];
                    let a = buf[start + k];
                    let b = buf[start + k + half] * w;
                    buf[start + k] = a + b;
                    buf[start + k + half] = a - b;
                }
            }
            len <<= 1;
        }
    }

    fn direct(&self, buf: &mut [C64]) {
        let n = self.n;
        let mut out = vec![C64::new(0.0, 0.0); n];
        for (k, o) in out.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for (i, x) in buf.iter().enumerate() {
                acc += x * self.twiddles[(k * i) % n];
            }
            *o = acc;
        }
        buf.copy_from_slice(&out);
    }
}

/// Unitary forward DFT (1/√N scaling).
pub fn unitary_dft(x: &[C64]) -> Vec<C64> {
    let mut buf = x.to_vec();
    Fft::new(x.len()).forward(&mut buf);
    let s = 1.0 / (x.len() as f64).sqrt();
    buf.iter_mut().for_each(|v| *v *= s);
    buf
}

/// Unitary inverse DFT (1/√N scaling).
pub fn unitary_idft(x: &[C64]) -> Vec<C64> {
    let mut buf = x.to_vec();
    Fft::new(x.len()).inverse(&mut buf);
    let s = 1.0 / (x.len() as f64).sqrt();
    buf.iter_mut().for_each(|v| *v *= s);
    buf
}
