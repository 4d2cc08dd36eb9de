//! Two-site cross interpolation with full pivot search.
//!
//! Every function evaluation goes through a [`MeasurementLedger`], so the
//! number of distinct calls equals the ledger size and the ledger doubles
//! as the training set for a later refit.

mod ledger;
mod lu;

use nalgebra::DMatrix;
use rand::Rng;
use thiserror::Error as ThisError;

pub use ledger::{error_estimate, MeasurementLedger};

use crate::error::{Error, Result};
use crate::rng::{derive_seed, stream};
use crate::tt::{Core, TensorTrain, C64};

/// Below this relative residual a pivot is treated as numerical noise.
const PIVOT_FLOOR: f64 = 1e-13;

/// New pivots taken from one round of global probes.
const MAX_GLOBAL_PIVOTS: usize = 5;

/// A target function on multi-indices.
pub trait Evaluator {
    fn evaluate(&mut self, index: &[usize]) -> Result<C64>;
}

impl<F> Evaluator for F
where
    F: FnMut(&[usize]) -> C64,
{
    fn evaluate(&mut self, index: &[usize]) -> Result<C64> {
        Ok(self(index))
    }
}

/// Wraps a closure that can fail.
pub struct Fallible<F>(pub F);

impl<F> Evaluator for Fallible<F>
where
    F: FnMut(&[usize]) -> Result<C64>,
{
    fn evaluate(&mut self, index: &[usize]) -> Result<C64> {
        (self.0)(index)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TciOptions {
    /// Bond cap `χ̃`.
    pub max_bond: usize,
    /// Relative tolerance `τ`; zero means "run until saturated or stalled".
    pub tolerance: f64,
    pub max_sweeps: usize,
    /// First pivot; all zeros when absent.
    pub initial_pivot: Option<Vec<usize>>,
    /// Random points checked after each sweep; the worst of those above
    /// tolerance seed new pivots. Two-site updates alone cannot leave a
    /// rank-1 start when every adjacent pair of sites is separable.
    pub global_probes: usize,
    /// Seed for the probe positions.
    pub probe_seed: u64,
}

impl Default for TciOptions {
    fn default() -> Self {
        Self { max_bond: 64, tolerance: 1e-8, max_sweeps: 20, initial_pivot: None, global_probes: 0, probe_seed: 0 }
    }
}

impl TciOptions {
    pub fn new(max_bond: usize, tolerance: f64) -> Self {
        Self { max_bond, tolerance, ..Self::default() }
    }

    pub fn with_global_probes(mut self, probes: usize, seed: u64) -> Self {
        self.global_probes = probes;
        self.probe_seed = seed;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.max_bond == 0 {
            return Err(Error::domain("max_bond must be at least 1"));
        }
        if !(self.tolerance >= 0.0 && self.tolerance.is_finite()) {
            return Err(Error::domain(format!("tolerance {} is invalid", self.tolerance)));
        }
        if self.max_sweeps == 0 {
            return Err(Error::domain("max_sweeps must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Converged,
    Saturated,
    Stalled,
    MaxSweeps,
}

/// Which sweep produced the final tensor train.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Forward,
    Backward,
}

#[derive(Debug, Clone)]
pub struct TciResult {
    pub tt: TensorTrain,
    pub ledger: MeasurementLedger,
    /// `I_b` for each bond b: left multi-indices of length b+1.
    pub row_pivots: Vec<Vec<Vec<usize>>>,
    /// `J_b` for each bond b: right multi-indices of length L-b-1.
    pub col_pivots: Vec<Vec<Vec<usize>>>,
    pub orientation: Orientation,
    /// `ε_TCI` after each sweep.
    pub sweep_errors: Vec<f64>,
    pub stop: StopReason,
}

impl TciResult {
    pub fn error(&self) -> f64 {
        self.sweep_errors.last().copied().unwrap_or(0.0)
    }

    pub fn sweeps(&self) -> usize {
        self.sweep_errors.len()
    }

    /// Number of distinct function calls.
    pub fn num_evaluations(&self) -> usize {
        self.ledger.len()
    }

    /// Points the train reproduces exactly (up to roundoff) by construction.
    pub fn interpolation_points(&self) -> Vec<Vec<usize>> {
        let dims = self.tt.local_dims();
        let l = dims.len();
        if l == 1 {
            return (0..dims[0]).map(|s| vec![s]).collect();
        }
        match self.orientation {
            Orientation::Forward => cross(&self.row_pivots[l - 2], &singles(dims[l - 1])),
            Orientation::Backward => cross(&singles(dims[0]), &self.col_pivots[0]),
        }
    }
}

/// Evaluator failure; carries every point measured before the failure.
#[derive(Debug, ThisError)]
#[error("cross interpolation aborted after {} evaluations: {error}", ledger.len())]
pub struct TciFailure {
    pub error: Error,
    pub ledger: MeasurementLedger,
}

struct Sampler<'a, E: ?Sized> {
    f: &'a mut E,
    ledger: MeasurementLedger,
    max_abs: f64,
}

impl<E: Evaluator + ?Sized> Sampler<'_, E> {
    fn get(&mut self, index: &[usize]) -> Result<C64> {
        if let Some(v) = self.ledger.get(index) {
            return Ok(v);
        }
        let v = self.f.evaluate(index)?;
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::Evaluation {
                index: index.to_vec(),
                message: format!("non-finite value {v}"),
            });
        }
        self.max_abs = self.max_abs.max(v.norm());
        self.ledger.insert(index.to_vec(), v);
        Ok(v)
    }

    fn block(&mut self, rows: &[Vec<usize>], cols: &[Vec<usize>]) -> Result<DMatrix<C64>> {
        let mut m = DMatrix::zeros(rows.len(), cols.len());
        let mut idx = Vec::new();
        for (i, r) in rows.iter().enumerate() {
            for (j, c) in cols.iter().enumerate() {
                idx.clear();
                idx.extend_from_slice(r);
                idx.extend_from_slice(c);
                m[(i, j)] = self.get(&idx)?;
            }
        }
        Ok(m)
    }
}

fn singles(d: usize) -> Vec<Vec<usize>> {
    (0..d).map(|s| vec![s]).collect()
}

/// All concatenations `a ⊕ b`, `a` major.
fn cross(a: &[Vec<usize>], b: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            let mut v = x.clone();
            v.extend_from_slice(y);
            out.push(v);
        }
    }
    out
}

/// Learns a tensor train of `f` on the grid with local dimensions `dims`.
pub fn cross_interpolate<E>(
    f: &mut E,
    dims: &[usize],
    opts: &TciOptions,
) -> std::result::Result<TciResult, TciFailure>
where
    E: Evaluator + ?Sized,
{
    let mut sampler = Sampler { f, ledger: MeasurementLedger::new(), max_abs: 0.0 };
    match run(&mut sampler, dims, opts) {
        Ok(parts) => Ok(parts.finish(sampler.ledger)),
        Err(error) => Err(TciFailure { error, ledger: sampler.ledger }),
    }
}

struct Parts {
    tt: TensorTrain,
    rows: Vec<Vec<Vec<usize>>>,
    cols: Vec<Vec<Vec<usize>>>,
    orientation: Orientation,
    errors: Vec<f64>,
    stop: StopReason,
}

impl Parts {
    fn finish(self, ledger: MeasurementLedger) -> TciResult {
        TciResult {
            tt: self.tt,
            ledger,
            row_pivots: self.rows,
            col_pivots: self.cols,
            orientation: self.orientation,
            sweep_errors: self.errors,
            stop: self.stop,
        }
    }
}

fn run<E: Evaluator + ?Sized>(s: &mut Sampler<'_, E>, dims: &[usize], opts: &TciOptions) -> Result<Parts> {
    opts.validate()?;
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::domain(format!("invalid local dimensions {dims:?}")));
    }
    let l = dims.len();
    if l == 1 {
        let vals = s.block(&[vec![]], &singles(dims[0]))?;
        let core = Core::new(1, dims[0], 1, vals.iter().copied().collect())?;
        return Ok(Parts {
            tt: TensorTrain::new(vec![core])?,
            rows: vec![],
            cols: vec![],
            orientation: Orientation::Forward,
            errors: vec![0.0],
            stop: StopReason::Converged,
        });
    }

    let pivot = first_pivot(s, dims, opts)?;
    let mut rows: Vec<Vec<Vec<usize>>> = (0..l - 1).map(|b| vec![pivot[..=b].to_vec()]).collect();
    let mut cols: Vec<Vec<Vec<usize>>> = (0..l - 1).map(|b| vec![pivot[b + 1..].to_vec()]).collect();
    let natural: Vec<usize> = (0..l - 1)
        .map(|b| {
            let left = dims[..=b].iter().fold(1usize, |a, &d| a.saturating_mul(d));
            let right = dims[b + 1..].iter().fold(1usize, |a, &d| a.saturating_mul(d));
            left.min(right).min(opts.max_bond)
        })
        .collect();

    let mut errors = Vec::new();
    let mut prev_saturated = false;
    let mut prev_stalled = false;
    let mut prev_converged = false;
    let mut result = None;
    for sweep in 0..opts.max_sweeps {
        let forward = sweep % 2 == 0;
        let before = s.ledger.len();
        let order: Vec<usize> = if forward { (0..l - 1).collect() } else { (0..l - 1).rev().collect() };
        for b in order {
            let r = if b == 0 { singles(dims[0]) } else { cross(&rows[b - 1], &singles(dims[b])) };
            let c = if b + 1 == l - 1 { singles(dims[l - 1]) } else { cross(&singles(dims[b + 1]), &cols[b + 1]) };
            let pi = s.block(&r, &c)?;
            let tol = (opts.tolerance.max(PIVOT_FLOOR)) * s.max_abs;
            let sel = lu::full_pivot(pi, opts.max_bond, tol);
            rows[b] = sel.rows.iter().map(|&i| r[i].clone()).collect();
            cols[b] = sel.cols.iter().map(|&j| c[j].clone()).collect();
        }
        let orientation = if forward { Orientation::Forward } else { Orientation::Backward };
        let tt = assemble(s, dims, &rows, &cols, orientation)?;
        let found = probe(s, &tt, dims, opts, sweep)?;
        let eps = error_estimate(&tt, &s.ledger)?;
        errors.push(eps);

        let converged = opts.tolerance > 0.0 && eps <= opts.tolerance;
        let saturated = rows.iter().zip(&natural).all(|(r, &n)| r.len() >= n);
        let stalled = s.ledger.len() == before;
        let stop = if s.max_abs == 0.0 || (converged && prev_converged) {
            Some(StopReason::Converged)
        } else if saturated && prev_saturated {
            Some(StopReason::Saturated)
        } else if stalled && prev_stalled {
            Some(StopReason::Stalled)
        } else if sweep + 1 == opts.max_sweeps {
            Some(StopReason::MaxSweeps)
        } else {
            None
        };
        prev_converged = converged;
        prev_saturated = saturated;
        prev_stalled = stalled;
        if let Some(stop) = stop {
            result = Some((tt, orientation, stop));
            break;
        }
        for p in found {
            for b in 0..l - 1 {
                let (pre, suf) = (p[..=b].to_vec(), p[b + 1..].to_vec());
                if !rows[b].contains(&pre) {
                    rows[b].push(pre);
                }
                if !cols[b].contains(&suf) {
                    cols[b].push(suf);
                }
            }
        }
    }
    let (tt, orientation, stop) = result.expect("loop runs at least once and always sets a result");
    let tt = if s.max_abs == 0.0 {
        TensorTrain::constant(dims, C64::new(0.0, 0.0))?
    } else {
        tt
    };
    Ok(Parts { tt, rows, cols, orientation, errors, stop })
}

/// Most poorly interpolated random points, worst first, above tolerance.
fn probe<E: Evaluator + ?Sized>(
    s: &mut Sampler<'_, E>,
    tt: &TensorTrain,
    dims: &[usize],
    opts: &TciOptions,
    sweep: usize,
) -> Result<Vec<Vec<usize>>> {
    if opts.global_probes == 0 {
        return Ok(Vec::new());
    }
    let mut rng = stream(derive_seed(opts.probe_seed, sweep as u64));
    let mut bad = Vec::new();
    for _ in 0..opts.global_probes {
        let idx: Vec<usize> = dims.iter().map(|&d| rng.random_range(0..d)).collect();
        let err = (s.get(&idx)? - tt.evaluate(&idx)?).norm();
        if err > opts.tolerance.max(PIVOT_FLOOR) * s.max_abs {
            bad.push((err, idx));
        }
    }
    bad.sort_by(|a, b| b.0.total_cmp(&a.0));
    bad.dedup_by(|a, b| a.1 == b.1);
    Ok(bad.into_iter().take(MAX_GLOBAL_PIVOTS).map(|(_, i)| i).collect())
}

/// Uses the requested pivot if nonzero, otherwise a greedy coordinate search.
fn first_pivot<E: Evaluator + ?Sized>(s: &mut Sampler<'_, E>, dims: &[usize], opts: &TciOptions) -> Result<Vec<usize>> {
    let mut pivot = match &opts.initial_pivot {
        Some(p) => {
            if p.len() != dims.len() || p.iter().zip(dims).any(|(&a, &d)| a >= d) {
                return Err(Error::domain(format!("initial pivot {p:?} outside dims {dims:?}")));
            }
            p.clone()
        }
        None => vec![0; dims.len()],
    };
    let mut best = s.get(&pivot)?.norm();
    if best > 0.0 {
        return Ok(pivot);
    }
    for _ in 0..2 {
        for site in 0..dims.len() {
            let mut cand = pivot.clone();
            for v in 0..dims[site] {
                cand[site] = v;
                let a = s.get(&cand)?.norm();
                if a > best {
                    best = a;
                    pivot = cand.clone();
                }
            }
        }
    }
    Ok(pivot)
}

fn assemble<E: Evaluator + ?Sized>(
    s: &mut Sampler<'_, E>,
    dims: &[usize],
    rows: &[Vec<Vec<usize>>],
    cols: &[Vec<Vec<usize>>],
    orientation: Orientation,
) -> Result<TensorTrain> {
    let l = dims.len();
    let mut cores = Vec::with_capacity(l);
    match orientation {
        Orientation::Forward => {
            for b in 0..l {
                let left = if b == 0 { vec![vec![]] } else { rows[b - 1].clone() };
                let r = cross(&left, &singles(dims[b]));
                if b == l - 1 {
                    let m = s.block(&r, &[vec![]])?;
                    cores.push(Core::new(left.len(), dims[b], 1, m.iter().copied().collect())?);
                } else {
                    let m = s.block(&r, &cols[b])?;
                    let p = s.block(&rows[b], &cols[b])?;
                    let a = lu::right_divide(&m, &p);
                    cores.push(Core::from_left_unfolding(&a, left.len(), dims[b]));
                }
            }
        }
        Orientation::Backward => {
            for b in 0..l {
                let right = if b == l - 1 { vec![vec![]] } else { cols[b].clone() };
                let c = cross(&singles(dims[b]), &right);
                if b == 0 {
                    let m = s.block(&[vec![]], &c)?;
                    cores.push(Core::from_right_unfolding(&m, dims[0], right.len()));
                } else {
                    let m = s.block(&rows[b - 1], &c)?;
                    let p = s.block(&rows[b - 1], &cols[b - 1])?;
                    let a = lu::left_divide(&p, &m);
                    cores.push(Core::from_right_unfolding(&a, dims[b], right.len()));
                }
            }
        }
    }
    TensorTrain::new(cores)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantics::QuanticsGrid;
    use std::f64::consts::PI;

    fn sine_grid(bits: u32) -> QuanticsGrid {
        QuanticsGrid::unit(1, bits).unwrap()
    }

    #[test]
    fn exponential_has_bond_one() {
        let grid = sine_grid(8);
        let mut f = grid.tensorize(|x| C64::new((0.7 * x[0]).exp(), 0.0));
        let res = cross_interpolate(&mut f, &grid.local_dims(), &TciOptions::new(8, 1e-12)).unwrap();
        assert!(res.tt.bond_dims().iter().all(|&b| b == 1), "{:?}", res.tt.bond_dims());
        assert!(res.error() <= 1e-12);
        for idx in grid.all_indices() {
            let x = grid.decode(&idx).unwrap()[0];
            assert!((res.tt.evaluate(&idx).unwrap().re - (0.7 * x).exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn sine_is_exact_below_the_cap() {
        let grid = sine_grid(8);
        let target = |x: f64| (2.0 * PI * x).sin();
        let mut f = grid.tensorize(|x| C64::new(target(x[0]), 0.0));
        let res = cross_interpolate(&mut f, &grid.local_dims(), &TciOptions::new(4, 0.0)).unwrap();
        assert!(res.tt.max_bond() <= 4);
        for idx in grid.all_indices() {
            let x = grid.decode(&idx).unwrap()[0];
            assert!((res.tt.evaluate(&idx).unwrap() - target(x)).norm() <= 1e-10);
        }
    }

    #[test]
    fn calls_match_ledger_and_are_unique() {
        let grid = sine_grid(6);
        let mut calls = 0usize;
        let mut seen = std::collections::HashSet::new();
        let mut dup = false;
        let mut f = |idx: &[usize]| {
            calls += 1;
            dup |= !seen.insert(idx.to_vec());
            let x = grid.decode(idx).unwrap()[0];
            C64::new((5.0 * x).cos() + x * x, 0.0)
        };
        let res = cross_interpolate(&mut f, &grid.local_dims(), &TciOptions::new(3, 0.0)).unwrap();
        assert!(!dup);
        assert_eq!(calls, res.num_evaluations());
    }

    #[test]
    fn global_probes_escape_separable_rank_one() {
        let grid = QuanticsGrid::unit(2, 6).unwrap();
        let f1 = |x: f64| 1.0 / (1.0 + 25.0 * (x - 0.5) * (x - 0.5));
        let mut f = grid.tensorize(|x| C64::new(f1(x[0]) * f1(x[1]), 0.0));
        let plain = cross_interpolate(&mut f, &grid.local_dims(), &TciOptions::new(32, 1e-6)).unwrap();
        assert_eq!(plain.tt.max_bond(), 1);
        let opts = TciOptions::new(32, 1e-6).with_global_probes(32, 1);
        let res = cross_interpolate(&mut f, &grid.local_dims(), &opts).unwrap();
        assert_eq!(res.stop, StopReason::Converged, "{:?} {:?}", res.sweep_errors, res.tt.bond_dims());
        let worst = grid
            .all_indices()
            .map(|idx| {
                let x = grid.decode(&idx).unwrap();
                (res.tt.evaluate(&idx).unwrap().re - f1(x[0]) * f1(x[1])).abs()
            })
            .fold(0.0, f64::max);
        assert!(worst < 1e-5, "{worst}");
    }

    #[test]
    fn zero_function_is_exact() {
        let mut f = |_: &[usize]| C64::new(0.0, 0.0);
        let res = cross_interpolate(&mut f, &[2; 5], &TciOptions::default()).unwrap();
        assert_eq!(res.error(), 0.0);
        assert_eq!(res.tt.max_bond(), 1);
        assert_eq!(res.tt.evaluate(&[1, 0, 1, 1, 0]).unwrap(), C64::new(0.0, 0.0));
    }

    #[test]
    fn zero_first_pivot_is_searched() {
        let mut f = |idx: &[usize]| C64::new(if idx == [1, 1, 0] { 3.0 } else { 0.0 }, 0.0);
        let res = cross_interpolate(&mut f, &[2, 2, 2], &TciOptions::new(4, 1e-12)).unwrap();
        assert!((res.tt.evaluate(&[1, 1, 0]).unwrap().re - 3.0).abs() < 1e-12);
        assert!(res.tt.evaluate(&[0, 1, 0]).unwrap().norm() < 1e-12);
    }

    #[test]
    fn evaluator_failure_keeps_partial_ledger() {
        let mut n = 0;
        let mut f = Fallible(|idx: &[usize]| {
            n += 1;
            if n > 5 {
                Err(Error::Evaluation { index: idx.to_vec(), message: "boom".into() })
            } else {
                Ok(C64::new(1.0 + idx[0] as f64, 0.0))
            }
        });
        let err = cross_interpolate(&mut f, &[2; 6], &TciOptions::new(4, 0.0)).unwrap_err();
        assert_eq!(err.ledger.len(), 5);
        assert!(matches!(err.error, Error::Evaluation { .. }));
    }

    #[test]
    fn single_site_reads_everything() {
        let mut f = |idx: &[usize]| C64::new(idx[0] as f64, 1.0);
        let res = cross_interpolate(&mut f, &[5], &TciOptions::default()).unwrap();
        assert_eq!(res.num_evaluations(), 5);
        assert_eq!(res.tt.evaluate(&[3]).unwrap(), C64::new(3.0, 1.0));
    }

    #[test]
    fn rejects_bad_options() {
        let mut f = |_: &[usize]| C64::new(1.0, 0.0);
        assert!(cross_interpolate(&mut f, &[2, 2], &TciOptions::new(0, 0.0)).is_err());
        assert!(cross_interpolate(&mut f, &[2, 2], &TciOptions::new(2, -1.0)).is_err());
        let opts = TciOptions { initial_pivot: Some(vec![2, 0]), ..TciOptions::default() };
        assert!(cross_interpolate(&mut f, &[2, 2], &opts).is_err());
    }
}
