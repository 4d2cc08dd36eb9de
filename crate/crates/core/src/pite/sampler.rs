use rand::Rng;

use super::kernel::KernelParams;
use super::quad;

pub const TABLE_CELLS: usize = 1 << 16;

/// Inverse-CDF sampler for the density `g/C` on `[−T, T)`.
///
/// The cumulative distribution is tabulated on equal cells (each cell
/// integrated by Gauss–Kronrod) and inverted by linear interpolation inside
/// the cell, which is monotone by construction.
#[derive(Debug, Clone)]
pub struct KernelSampler {
    t_max: f64,
    cdf: Vec<f64>,
}

impl KernelSampler {
    pub fn new(p: &KernelParams) -> Self {
        let h = 2.0 * p.t_max / TABLE_CELLS as f64;
        let mut cdf = Vec::with_capacity(TABLE_CELLS + 1);
        cdf.push(0.0);
        let mut acc = 0.0;
        for k in 0..TABLE_CELLS {
            let a = -p.t_max + k as f64 * h;
            acc += quad::integrate(|t| p.g(t), a, a + h, 1e-16);
            cdf.push(acc);
        }
        for c in &mut cdf {
            *c /= acc;
        }
        Self { t_max: p.t_max, cdf }
    }

    /// Maps `u ∈ [0, 1)` to a time.
    pub fn quantile(&self, u: f64) -> f64 {
        let k = self.cdf.partition_point(|&c| c <= u).clamp(1, TABLE_CELLS) - 1;
        let (lo, hi) = (self.cdf[k], self.cdf[k + 1]);
        let frac = if hi > lo { ((u - lo) / (hi - lo)).clamp(0.0, 1.0) } else { 0.5 };
        let h = 2.0 * self.t_max / TABLE_CELLS as f64;
        (-self.t_max + (k as f64 + frac) * h).min(self.t_max - f64::EPSILON * self.t_max)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(rng.random::<f64>())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn quantiles_and_moments() {
        let p = KernelParams::new(1.0, 2.0, 2.0).unwrap();
        let s = KernelSampler::new(&p);
        assert!(s.quantile(0.5).abs() < 1e-4);
        assert!(s.quantile(0.0) >= -2.0 && s.quantile(1.0 - 1e-16) < 2.0);
        // The median of |t| under g/C on [0, T].
        let c = p.normalization();
        let q = s.quantile(0.75);
        let half = quad::integrate(|t| p.g(t), 0.0, q, 1e-12) / c;
        assert!((half - 0.25).abs() < 1e-6);
        let mut rng = stream(11);
        let n = 200_000;
        let mean_sq: f64 = (0..n).map(|_| s.sample(&mut rng).powi(2)).sum::<f64>() / n as f64;
        let want = quad::integrate(|t| t * t * p.g(t), -2.0, 2.0, 1e-12) / c;
        assert!((mean_sq - want).abs() < 0.02 * want, "{mean_sq} vs {want}");
    }
}
