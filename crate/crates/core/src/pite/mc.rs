use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::stream;
use crate::tt::C64;

use super::kernel::KernelParams;
use super::sampler::KernelSampler;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub re: f64,
    pub im: f64,
    /// Standard error of the complex mean, `√(Var re + Var im)/√N`.
    pub std_error: f64,
    pub samples: usize,
}

impl McEstimate {
    pub fn value(&self) -> C64 {
        C64::new(self.re, self.im)
    }
}

/// Correlator values at `N` time pairs drawn i.i.d. from `(g/C) ⊗ (g/C)`.
///
/// The E0 phase is applied per sample, so one draw serves a whole E0 scan.
#[derive(Debug, Clone)]
pub struct McSamples {
    normalization: f64,
    times: Vec<(f64, f64)>,
    values: Vec<C64>,
}

impl McSamples {
    pub fn draw<F>(correlator: F, p: &KernelParams, n_samples: usize, seed: u64) -> Result<Self>
    where
        F: Fn(f64, f64) -> C64 + Sync,
    {
        Self::draw_with(correlator, p, &KernelSampler::new(p), n_samples, seed)
    }

    /// As [`draw`](Self::draw) with a prebuilt sampler for `p`.
    pub fn draw_with<F>(correlator: F, p: &KernelParams, sampler: &KernelSampler, n_samples: usize, seed: u64) -> Result<Self>
    where
        F: Fn(f64, f64) -> C64 + Sync,
    {
        p.validate()?;
        if n_samples == 0 {
            return Err(Error::domain("n_samples must be at least 1"));
        }
        let mut rng = stream(seed);
        let times: Vec<(f64, f64)> = (0..n_samples).map(|_| (sampler.sample(&mut rng), sampler.sample(&mut rng))).collect();
        let values = times.par_iter().map(|&(t, tp)| correlator(t, tp)).collect();
        Ok(Self { normalization: p.normalization(), times, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    pub fn times(&self) -> &[(f64, f64)] {
        &self.times
    }

    /// `C²/N · Σ e^{iE0(t−t')} corr(t, t')`.
    pub fn estimate(&self, e0: f64) -> McEstimate {
        let n = self.len() as f64;
        let terms: Vec<C64> = self
            .times
            .iter()
            .zip(&self.values)
            .map(|(&(t, tp), v)| C64::from_polar(1.0, e0 * (t - tp)) * v)
            .collect();
        let mean = terms.iter().sum::<C64>() / n;
        let var = if terms.len() > 1 {
            terms.iter().map(|z| (z - mean).norm_sqr()).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        let c2 = self.normalization * self.normalization;
        McEstimate { re: c2 * mean.re, im: c2 * mean.im, std_error: c2 * (var / n).sqrt(), samples: self.len() }
    }
}

pub fn mc_estimate<F>(correlator: F, p: &KernelParams, e0: f64, n_samples: usize, seed: u64) -> Result<McEstimate>
where
    F: Fn(f64, f64) -> C64 + Sync,
{
    Ok(McSamples::draw(correlator, p, n_samples, seed)?.estimate(e0))
}
