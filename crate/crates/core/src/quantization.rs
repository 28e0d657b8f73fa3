//! Low-resolution ADC model and Bussgang statistics.
//!
//! Each I/Q rail goes through a uniform midrise quantizer with `2^b` levels
//! `±(i+½)Δ`, clipped at `±c` in units of the rail rms (`Δ = 2c/2^b`).
//! The AGC gain is passed in explicitly as the per-rail rms of the analog
//! input; the output is scaled back by the same gain.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, PI};
use core::sync::atomic::{AtomicU64, Ordering};

#[allow(unused_imports)] // inherent f64 methods win when std is in the build graph
use num_traits::Float;

use crate::error::domain;
use crate::{Result, C64};

const MAX_BITS: u8 = 16;

// f64 bit patterns per bit width; 0 means not computed yet
static XI_CACHE: [AtomicU64; MAX_BITS as usize + 1] = [const { AtomicU64::new(0) }; MAX_BITS as usize + 1];
static STEP_CACHE: [AtomicU64; MAX_BITS as usize + 1] = [const { AtomicU64::new(0) }; MAX_BITS as usize + 1];

fn cached(cache: &[AtomicU64], bits: u8, compute: impl FnOnce() -> f64) -> f64 {
    let slot = &cache[bits as usize];
    match slot.load(Ordering::Relaxed) {
        0 => {
            let v = compute();
            slot.store(v.to_bits(), Ordering::Relaxed);
            v
        }
        raw => f64::from_bits(raw),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Resolution {
    Bits(u8),
    Infinite,
}

impl core::fmt::Display for Resolution {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Resolution::Bits(b) => write!(f, "{b}"),
            Resolution::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdcModel {
    pub resolution: Resolution,
    /// Clip level in units of the per-rail rms.
    pub clip_scale: f64,
    /// Step size in units of the per-rail rms.
    pub step: f64,
}

impl AdcModel {
    /// Uniform quantizer whose step minimizes the MSE for a unit-variance
    /// Gaussian rail.
    pub fn new(resolution: Resolution) -> Result<Self> {
        match resolution {
            Resolution::Infinite => Ok(Self::infinite()),
            Resolution::Bits(b) => {
                check_bits(b)?;
                let step = optimal_uniform_step(b);
                Ok(AdcModel {
                    resolution,
                    clip_scale: step * levels_count(b) as f64 / 2.0,
                    step,
                })
            }
        }
    }

    pub fn bits(b: u8) -> Result<Self> {
        Self::new(Resolution::Bits(b))
    }

    pub fn infinite() -> Self {
        AdcModel {
            resolution: Resolution::Infinite,
            clip_scale: f64::INFINITY,
            step: 0.0,
        }
    }

    /// Uniform quantizer with an explicit clip level.
    pub fn with_clip_scale(b: u8, clip_scale: f64) -> Result<Self> {
        check_bits(b)?;
        if !(clip_scale > 0.0 && clip_scale.is_finite()) {
            return domain("clip scale must be positive and finite");
        }
        Ok(AdcModel {
            resolution: Resolution::Bits(b),
            clip_scale,
            step: 2.0 * clip_scale / levels_count(b) as f64,
        })
    }

    /// Output levels of one rail, in units of the rail rms.
    pub fn levels(&self) -> Vec<f64> {
        match self.resolution {
            Resolution::Infinite => Vec::new(),
            Resolution::Bits(b) => {
                let l = levels_count(b) as i64;
                (-l / 2..l / 2)
                    .map(|i| (i as f64 + 0.5) * self.step)
                    .collect()
            }
        }
    }

    /// Quantize one normalized rail value.
    #[inline]
    pub fn quantize_rail(&self, x: f64) -> f64 {
        match self.resolution {
            Resolution::Infinite => x,
            Resolution::Bits(b) => {
                let half = (levels_count(b) / 2) as f64;
                let i = (x / self.step).floor().clamp(-half, half - 1.0);
                (i + 0.5) * self.step
            }
        }
    }

    pub fn apply(&self, samples: &[C64], agc_rms: f64) -> Result<Vec<C64>> {
        let mut out = samples.to_vec();
        self.apply_in_place(&mut out, agc_rms)?;
        Ok(out)
    }

    pub fn apply_in_place(&self, samples: &mut [C64], agc_rms: f64) -> Result<()> {
        if !(agc_rms > 0.0 && agc_rms.is_finite()) {
            return domain(format!("AGC rms must be positive, got {agc_rms}"));
        }
        if samples.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return domain("non-finite input sample");
        }
        if self.resolution == Resolution::Infinite {
            return Ok(());
        }
        let g = 1.0 / agc_rms;
        for v in samples.iter_mut() {
            *v = C64::new(
                self.quantize_rail(v.re * g) * agc_rms,
                self.quantize_rail(v.im * g) * agc_rms,
            );
        }
        Ok(())
    }

    /// MSE of this quantizer for a unit-variance Gaussian rail.
    pub fn gaussian_mse(&self) -> f64 {
        match self.resolution {
            Resolution::Infinite => 0.0,
            Resolution::Bits(b) => uniform_mse(b, self.step),
        }
    }

    /// Gaussian-optimal quantization MSE ξ at this resolution (0 when infinite).
    pub fn xi(&self) -> Result<f64> {
        match self.resolution {
            Resolution::Infinite => Ok(0.0),
            Resolution::Bits(b) => xi_for_bits(b),
        }
    }

    /// Bussgang statistics using this ADC's ξ.
    pub fn bussgang(&self, powers: &[f64], noise_var: f64) -> Result<BussgangStats> {
        bussgang_decompose(powers, noise_var, self.xi()?)
    }
}

fn check_bits(b: u8) -> Result<()> {
    if (1..=MAX_BITS).contains(&b) {
        Ok(())
    } else {
        domain(format!("ADC bits must be in 1..={MAX_BITS}, got {b}"))
    }
}

fn levels_count(b: u8) -> u64 {
    1u64 << b
}

/// Per-rail rms of a complex stream, `sqrt(E|x|²/2)`.
pub fn per_rail_rms(samples: &[C64]) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    (samples.iter().map(|v| v.norm_sqr()).sum::<f64>() / (2 * samples.len()) as f64).sqrt()
}

/// Empirical Bussgang gain `E[q·y*] / E[|y|²]`.
pub fn empirical_eta(input: &[C64], output: &[C64]) -> Result<C64> {
    if input.len() != output.len() {
        return Err(crate::Error::Dimension {
            expected: input.len(),
            got: output.len(),
        });
    }
    let num: C64 = input.iter().zip(output).map(|(y, q)| q * y.conj()).sum();
    let den: f64 = input.iter().map(|y| y.norm_sqr()).sum();
    if den == 0.0 {
        return domain("input has zero energy");
    }
    Ok(num / den)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BussgangStats {
    pub eta: Vec<f64>,
    pub xi: f64,
    pub noise_cov_diag: Vec<f64>,
}

/// `η[n] = (1−ξ)/√V[n]` and `R[n] = η[n](1−η[n])V[n]` with `V[n] = P[n] + σ²`.
pub fn bussgang_decompose(powers: &[f64], noise_var: f64, xi: f64) -> Result<BussgangStats> {
    if !(0.0..1.0).contains(&xi) {
        return domain(format!("xi must lie in [0, 1), got {xi}"));
    }
    if noise_var < 0.0 || powers.iter().any(|p| *p < 0.0) {
        return domain("powers and noise variance must be nonnegative");
    }
    let mut eta = Vec::with_capacity(powers.len());
    let mut cov = Vec::with_capacity(powers.len());
    for p in powers {
        let v = p + noise_var;
        if v <= 0.0 {
            return domain("total input power is zero");
        }
        let e = (1.0 - xi) / v.sqrt();
        eta.push(e);
        cov.push(e * (1.0 - e) * v);
    }
    Ok(BussgangStats {
        eta,
        xi,
        noise_cov_diag: cov,
    })
}

/// Minimum MSE of a `bits`-level scalar quantizer on a unit-variance
/// Gaussian, found by Lloyd-Max iteration with numerically integrated cells.
pub fn xi_for_bits(bits: u8) -> Result<f64> {
    check_bits(bits)?;
    Ok(cached(&XI_CACHE, bits, || lloyd_max(bits).1))
}

/// Lloyd-Max levels (positive half) and the resulting MSE.
pub fn lloyd_max(bits: u8) -> (Vec<f64>, f64) {
    let half = (levels_count(bits) / 2) as usize;
    // companded start: point density ∝ φ^{1/3}, i.e. a N(0, 3) quantile grid
    let mut y: Vec<f64> = (0..half)
        .map(|i| 3f64.sqrt() * normal_quantile(0.5 + (i as f64 + 0.5) / (2 * half) as f64))
        .collect();
    let max_iter = if bits <= 8 { 5000 } else { 200 };
    let mut t = vec_thresholds(&y);
    for _ in 0..max_iter {
        let mut shift = 0.0f64;
        for i in 0..half {
            let (a, b) = (t[i], t[i + 1]);
            let mass = integrate(pdf, a, b);
            let c = if mass > 0.0 {
                integrate(|x| x * pdf(x), a, b) / mass
            } else {
                y[i]
            };
            shift = shift.max((c - y[i]).abs());
            y[i] = c;
        }
        t = vec_thresholds(&y);
        let spacing = if half > 1 { y[1] - y[0] } else { y[0] };
        if shift < 1e-12 * spacing.max(1e-300) {
            break;
        }
    }
    let mse = 2.0
        * (0..half)
            .map(|i| integrate(|x| (x - y[i]) * (x - y[i]) * pdf(x), t[i], t[i + 1]))
            .sum::<f64>();
    (y, mse)
}

// positive-half thresholds [0, mid..., upper tail cut]
fn vec_thresholds(y: &[f64]) -> Vec<f64> {
    let mut t = Vec::with_capacity(y.len() + 1);
    t.push(0.0);
    for w in y.windows(2) {
        t.push(0.5 * (w[0] + w[1]));
    }
    let last = *t.last().unwrap();
    t.push(last.max(y[y.len() - 1]) + 12.0);
    t
}

fn pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

fn cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

fn normal_quantile(p: f64) -> f64 {
    let (mut lo, mut hi) = (-40.0f64, 40.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Adaptive Simpson quadrature.
fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn step(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    if b <= a {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(fa, fm, fb, a, b);
    step(&f, a, b, fa, fm, fb, whole, 1e-15, 40)
}

/// Closed-form MSE of the symmetric uniform quantizer with step `delta`.
fn uniform_mse(bits: u8, delta: f64) -> f64 {
    // ∫_a^b (x−y)²φ = [Φ − xφ]_a^b + 2y[φ]_a^b + y²[Φ]_a^b
    let cell = |a: f64, b: f64, y: f64| {
        let xphi = |x: f64| if x.is_infinite() { 0.0 } else { x * pdf(x) };
        let pd = |x: f64| if x.is_infinite() { 0.0 } else { pdf(x) };
        (cdf(b) - cdf(a)) * (1.0 + y * y) - (xphi(b) - xphi(a)) + 2.0 * y * (pd(b) - pd(a))
    };
    let half = levels_count(bits) / 2;
    2.0 * (0..half)
        .map(|i| {
            let a = i as f64 * delta;
            let b = if i + 1 == half {
                f64::INFINITY
            } else {
                (i + 1) as f64 * delta
            };
            cell(a, b, (i as f64 + 0.5) * delta)
        })
        .sum::<f64>()
}

fn optimal_uniform_step(bits: u8) -> f64 {
    cached(&STEP_CACHE, bits, || golden_step(bits))
}

fn golden_step(bits: u8) -> f64 {
    // golden-section search on log Δ; the MSE is unimodal in Δ
    let f = |ld: f64| uniform_mse(bits, ld.exp());
    let (mut a, mut b) = ((1e-6f64).ln(), 3f64.ln());
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
        if b - a < 1e-12 {
            break;
        }
    }
    (0.5 * (a + b)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn optimal_steps_known_values() {
        let steps: Vec<f64> = (1..=4).map(optimal_uniform_step).collect();
        let want = [1.5958, 0.9957, 0.5860, 0.3352];
        for (s, w) in steps.iter().zip(want) {
            assert!((s - w).abs() < 1e-3, "{s} vs {w}");
        }
    }

    #[test]
    fn one_bit_clip_is_sign_quantizer_optimum() {
        let adc = AdcModel::bits(1).unwrap();
        assert!((adc.clip_scale - 2.0 * (2.0 / PI).sqrt()).abs() < 1e-6);
        assert!((adc.gaussian_mse() - (1.0 - 2.0 / PI)).abs() < 1e-9);
    }
}
