//! Quantics (binary) encoding of continuous variables.
//!
//! Each of the `n` variables lives on a half-open interval `[a_k, b_k)`
//! discretized into `2^R` left-endpoint grid points. A grid point is written
//! in normalized coordinates as `Σ_r σ_{k,r} / 2^r` and the bits of all
//! variables are interleaved by scale:
//! `σ_{1,1} … σ_{n,1}, σ_{1,2} … σ_{n,2}, …, σ_{1,R} … σ_{n,R}`.

use crate::error::{Error, Result};
use crate::tt::{Core, TensorTrain, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct QuanticsGrid {
    bits: u32,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl QuanticsGrid {
    pub fn new(bits: u32, domains: &[(f64, f64)]) -> Result<Self> {
        if bits == 0 || bits > 52 {
            return Err(Error::domain(format!("bits must be in 1..=52, got {bits}")));
        }
        if domains.is_empty() {
            return Err(Error::domain("a grid needs at least one variable"));
        }
        for &(a, b) in domains {
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(Error::domain(format!("invalid interval [{a}, {b})")));
            }
        }
        Ok(Self {
            bits,
            lower: domains.iter().map(|d| d.0).collect(),
            upper: domains.iter().map(|d| d.1).collect(),
        })
    }

    /// `[0, 1)^n`.
    pub fn unit(n_vars: usize, bits: u32) -> Result<Self> {
        Self::new(bits, &vec![(0.0, 1.0); n_vars])
    }

    pub fn n_vars(&self) -> usize {
        self.lower.len()
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn domain(&self, k: usize) -> (f64, f64) {
        (self.lower[k], self.upper[k])
    }

    /// Number of tensor sites, `n·R`.
    pub fn len(&self) -> usize {
        self.n_vars() * self.bits as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn local_dims(&self) -> Vec<usize> {
        vec![2; self.len()]
    }

    pub fn points_per_var(&self) -> u64 {
        1u64 << self.bits
    }

    pub fn spacing(&self, k: usize) -> f64 {
        (self.upper[k] - self.lower[k]) / self.points_per_var() as f64
    }

    /// Volume of one grid cell, `∏_k (b_k − a_k)/2^R`.
    pub fn cell_volume(&self) -> f64 {
        (0..self.n_vars()).map(|k| self.spacing(k)).product()
    }

    /// Coordinate of grid point `m` along variable `k`.
    pub fn coordinate(&self, k: usize, m: u64) -> f64 {
        self.lower[k] + (self.upper[k] - self.lower[k]) * (m as f64 / self.points_per_var() as f64)
    }

    /// Integer grid positions `m_k ∈ [0, 2^R)` to the interleaved bit index.
    pub fn index_from_grid(&self, ms: &[u64]) -> Result<Vec<usize>> {
        if ms.len() != self.n_vars() {
            return Err(Error::domain(format!(
                "expected {} grid positions, got {}",
                self.n_vars(),
                ms.len()
            )));
        }
        let n = self.n_vars();
        let r_bits = self.bits as usize;
        let mut index = vec![0usize; self.len()];
        for (k, &m) in ms.iter().enumerate() {
            if m >= self.points_per_var() {
                return Err(Error::domain(format!("grid position {m} out of range")));
            }
            for r in 0..r_bits {
                // σ_{k,r+1} is the (r+1)-th most significant bit of m
                index[r * n + k] = ((m >> (r_bits - 1 - r)) & 1) as usize;
            }
        }
        Ok(index)
    }

    /// Interleaved bit index to integer grid positions.
    pub fn grid_from_index(&self, index: &[usize]) -> Result<Vec<u64>> {
        if index.len() != self.len() {
            return Err(Error::domain(format!(
                "index has length {}, grid needs {}",
                index.len(),
                self.len()
            )));
        }
        if let Some(&bad) = index.iter().find(|&&s| s > 1) {
            return Err(Error::domain(format!("quantics bits must be 0 or 1, got {bad}")));
        }
        Ok(self.grid_from_index_unchecked(index))
    }

    pub(crate) fn grid_from_index_unchecked(&self, index: &[usize]) -> Vec<u64> {
        let n = self.n_vars();
        let mut ms = vec![0u64; n];
        for (pos, &s) in index.iter().enumerate() {
            let k = pos % n;
            ms[k] = (ms[k] << 1) | s as u64;
        }
        ms
    }

    /// Grid point to bit index. Every coordinate must be exactly on the grid.
    pub fn encode(&self, point: &[f64]) -> Result<Vec<usize>> {
        if point.len() != self.n_vars() {
            return Err(Error::domain(format!(
                "point has {} coordinates, grid has {} variables",
                point.len(),
                self.n_vars()
            )));
        }
        let np = self.points_per_var() as f64;
        let mut ms = Vec::with_capacity(point.len());
        for (k, &x) in point.iter().enumerate() {
            let (a, b) = self.domain(k);
            let m = ((x - a) / (b - a) * np).round();
            if !(0.0..np).contains(&m) {
                return Err(Error::domain(format!("coordinate {x} outside [{a}, {b})")));
            }
            let snapped = self.coordinate(k, m as u64);
            let scale = (b - a).abs().max(x.abs()).max(1.0);
            if (snapped - x).abs() > 1e-12 * scale {
                return Err(Error::domain(format!("coordinate {x} is not a grid point")));
            }
            ms.push(m as u64);
        }
        self.index_from_grid(&ms)
    }

    /// Bit index to coordinates, `a_k + (b_k − a_k) Σ_r σ_{k,r}/2^r`.
    pub fn decode(&self, index: &[usize]) -> Result<Vec<f64>> {
        let ms = self.grid_from_index(index)?;
        Ok(ms.iter().enumerate().map(|(k, &m)| self.coordinate(k, m)).collect())
    }

    pub(crate) fn decode_unchecked(&self, index: &[usize]) -> Vec<f64> {
        self.grid_from_index_unchecked(index)
            .iter()
            .enumerate()
            .map(|(k, &m)| self.coordinate(k, m))
            .collect()
    }

    /// Reorders an interleaved index into variable-major (sequential) order.
    pub fn to_sequential(&self, index: &[usize]) -> Vec<usize> {
        let n = self.n_vars();
        let r = self.bits as usize;
        let mut out = vec![0; index.len()];
        for k in 0..n {
            for b in 0..r {
                out[k * r + b] = index[b * n + k];
            }
        }
        out
    }

    pub fn from_sequential(&self, seq: &[usize]) -> Vec<usize> {
        let n = self.n_vars();
        let r = self.bits as usize;
        let mut out = vec![0; seq.len()];
        for k in 0..n {
            for b in 0..r {
                out[b * n + k] = seq[k * r + b];
            }
        }
        out
    }

    /// Wraps `f` as a function of the bit index: `F_σ = f(x(σ))`.
    pub fn tensorize<'a, F>(&'a self, f: F) -> impl Fn(&[usize]) -> C64 + 'a
    where
        F: Fn(&[f64]) -> C64 + 'a,
    {
        move |idx: &[usize]| f(&self.decode_unchecked(idx))
    }

    /// Owning variant of [`tensorize`](Self::tensorize).
    pub fn into_tensorized<F>(self, f: F) -> impl Fn(&[usize]) -> C64
    where
        F: Fn(&[f64]) -> C64,
    {
        move |idx: &[usize]| f(&self.decode_unchecked(idx))
    }

    /// Bond-dimension-1 train of `exp(Σ_k rate_k · x_k)` on this grid.
    ///
    /// Each bit contributes an independent factor `exp(rate_k (b_k − a_k) σ/2^r)`,
    /// and the offset `exp(Σ_k rate_k a_k)` is folded into the first core.
    pub fn exp_tt(&self, rates: &[C64]) -> Result<TensorTrain> {
        if rates.len() != self.n_vars() {
            return Err(Error::domain(format!(
                "expected {} rates, got {}",
                self.n_vars(),
                rates.len()
            )));
        }
        let n = self.n_vars();
        let offset: C64 = rates.iter().zip(&self.lower).map(|(&k, &a)| k * a).sum::<C64>().exp();
        let cores = (0..self.len())
            .map(|pos| {
                let k = pos % n;
                let r = pos / n + 1;
                let step = rates[k] * ((self.upper[k] - self.lower[k]) / 2f64.powi(r as i32));
                let pre = if pos == 0 { offset } else { C64::new(1.0, 0.0) };
                Core::from_fn(1, 2, 1, |_, s, _| pre * (step * s as f64).exp())
            })
            .collect();
        TensorTrain::new(cores)
    }

    /// Every bit index of the grid, in row-major order of the interleaved index.
    pub fn all_indices(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        let len = self.len();
        (0..1u64 << len).map(move |code| {
            (0..len).map(|p| ((code >> (len - 1 - p)) & 1) as usize).collect()
        })
    }
}
