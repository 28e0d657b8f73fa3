//! Summary statistics with 95% intervals.

use serde::Serialize;

const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanSummary {
    pub n: usize,
    pub mean: f64,
    pub std_err: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl MeanSummary {
    /// Sample mean with a normal-approximation interval.
    pub fn of(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return MeanSummary {
                n,
                mean: f64::NAN,
                std_err: f64::NAN,
                ci_low: f64::NAN,
                ci_high: f64::NAN,
            };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        let std_err = (var / n as f64).sqrt();
        MeanSummary {
            n,
            mean,
            std_err,
            ci_low: mean - Z95 * std_err,
            ci_high: mean + Z95 * std_err,
        }
    }

    pub fn overlaps(&self, other: &MeanSummary) -> bool {
        self.ci_low <= other.ci_high && other.ci_low <= self.ci_high
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Proportion {
    pub successes: usize,
    pub n: usize,
    pub p: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl Proportion {
    /// Wilson score interval.
    pub fn wilson(successes: usize, n: usize) -> Self {
        if n == 0 {
            return Proportion {
                successes,
                n,
                p: f64::NAN,
                ci_low: 0.0,
                ci_high: 1.0,
            };
        }
        let nf = n as f64;
        let p = successes as f64 / nf;
        let z2 = Z95 * Z95;
        let den = 1.0 + z2 / nf;
        let centre = (p + z2 / (2.0 * nf)) / den;
        let half = Z95 * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / den;
        Proportion {
            successes,
            n,
            p,
            ci_low: (centre - half).max(0.0),
            ci_high: (centre + half).min(1.0),
        }
    }
}

/// Empirical CDF: sorted samples and their cumulative probabilities `i/n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cdf {
    pub x: Vec<f64>,
    pub p: Vec<f64>,
}

impl Cdf {
    pub fn of(values: &[f64]) -> Self {
        let mut x: Vec<f64> = values.iter().copied().filter(|v| !v.is_nan()).collect();
        x.sort_by(f64::total_cmp);
        let n = x.len() as f64;
        let p = (1..=x.len()).map(|i| i as f64 / n).collect();
        Cdf { x, p }
    }

    /// Fraction of samples at or below `v`.
    pub fn eval(&self, v: f64) -> f64 {
        if self.x.is_empty() {
            return f64::NAN;
        }
        self.x.partition_point(|s| *s <= v) as f64 / self.x.len() as f64
    }
}
