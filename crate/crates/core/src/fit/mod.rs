//! Noise-robust learning: cross interpolation, SVD compression, then a
//! least-squares refit of every core against the measured points.

pub mod lbfgs;

use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error as ThisError;

use crate::error::{Error, Result};
use crate::tci::{cross_interpolate, Evaluator, MeasurementLedger, StopReason, TciOptions};
use crate::tt::{Core, TensorTrain, TruncationSpec, C64};

pub use lbfgs::{LbfgsOptions, LbfgsOutcome};

/// Ledger points per parallel work unit; fixed so reductions are ordered.
const CHUNK: usize = 256;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitPlan {
    /// Bond cap during cross interpolation.
    pub chi_tilde: usize,
    /// Bond cap after compression.
    pub chi: usize,
    pub n_itr: usize,
    /// Relative cost decrease over ten iterations below which we stop.
    pub convergence_tol: f64,
    pub tci_tolerance: f64,
    pub tci_max_sweeps: usize,
    pub svd_tolerance: f64,
}

impl FitPlan {
    pub fn new(chi_tilde: usize, chi: usize) -> Self {
        Self {
            chi_tilde,
            chi,
            n_itr: 500,
            convergence_tol: 1e-12,
            tci_tolerance: 0.0,
            tci_max_sweeps: 20,
            svd_tolerance: 0.0,
        }
    }

    pub fn with_iterations(mut self, n_itr: usize) -> Self {
        self.n_itr = n_itr;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.chi == 0 || self.chi_tilde == 0 {
            return Err(Error::domain("bond dimensions must be at least 1"));
        }
        if self.chi > self.chi_tilde {
            return Err(Error::domain(format!("chi {} exceeds chi_tilde {}", self.chi, self.chi_tilde)));
        }
        if self.n_itr == 0 {
            return Err(Error::domain("n_itr must be at least 1"));
        }
        Ok(())
    }

    fn tci_options(&self) -> TciOptions {
        TciOptions {
            max_bond: self.chi_tilde,
            tolerance: self.tci_tolerance,
            max_sweeps: self.tci_max_sweeps,
            ..TciOptions::default()
        }
    }

    fn lbfgs_options(&self) -> LbfgsOptions {
        LbfgsOptions { max_iters: self.n_itr, rel_decrease: self.convergence_tol, ..LbfgsOptions::default() }
    }
}

/// Real parameters `(re, im)` of every core entry, core by core in storage order.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterVector(pub Vec<f64>);

impl ParameterVector {
    pub fn from_tt(tt: &TensorTrain) -> Self {
        let mut v = Vec::with_capacity(2 * tt.num_entries());
        for c in tt.cores() {
            for z in c.data() {
                v.push(z.re);
                v.push(z.im);
            }
        }
        Self(v)
    }

    /// Rebuilds a train with the shapes of `template`.
    pub fn to_tt(&self, template: &TensorTrain) -> Result<TensorTrain> {
        if self.0.len() != 2 * template.num_entries() {
            return Err(Error::shape(format!(
                "{} parameters for {} entries",
                self.0.len(),
                template.num_entries()
            )));
        }
        let mut pos = 0;
        let mut cores = Vec::with_capacity(template.len());
        for c in template.cores() {
            let (l, d, r) = c.shape();
            let n = l * d * r;
            let data = self.0[2 * pos..2 * (pos + n)]
                .chunks_exact(2)
                .map(|p| C64::new(p[0], p[1]))
                .collect();
            cores.push(Core::new(l, d, r, data)?);
            pos += n;
        }
        TensorTrain::new(cores)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

fn check(tt: &TensorTrain, ledger: &MeasurementLedger) -> Result<()> {
    if ledger.is_empty() {
        return Err(Error::domain("empty ledger"));
    }
    for idx in ledger.indices() {
        tt.check_index(idx)?;
    }
    Ok(())
}

/// `Σ_i |z_i − tt(σ_i)|²`.
pub fn cost(tt: &TensorTrain, ledger: &MeasurementLedger) -> Result<f64> {
    check(tt, ledger)?;
    let chunks: Vec<f64> = ledger
        .indices()
        .par_chunks(CHUNK)
        .zip(ledger.values().par_chunks(CHUNK))
        .map(|(idx, z)| idx.iter().zip(z).map(|(i, &z)| (tt.eval_unchecked(i) - z).norm_sqr()).sum())
        .collect();
    Ok(chunks.iter().sum())
}

/// Gradient of [`cost`] in the layout of [`ParameterVector`].
pub fn gradient(tt: &TensorTrain, ledger: &MeasurementLedger) -> Result<ParameterVector> {
    Ok(cost_and_gradient(tt, ledger)?.1)
}

pub fn cost_and_gradient(tt: &TensorTrain, ledger: &MeasurementLedger) -> Result<(f64, ParameterVector)> {
    check(tt, ledger)?;
    let offsets: Vec<usize> = tt
        .cores()
        .iter()
        .scan(0, |acc, c| {
            let o = *acc;
            *acc += c.data().len();
            Some(o)
        })
        .collect();
    let n = tt.num_entries();
    let parts: Vec<(f64, Vec<C64>)> = ledger
        .indices()
        .par_chunks(CHUNK)
        .zip(ledger.values().par_chunks(CHUNK))
        .map(|(idx, z)| {
            let mut g = vec![C64::new(0.0, 0.0); n];
            let mut c = 0.0;
            let mut envs = Environments::default();
            for (i, &z) in idx.iter().zip(z) {
                c += envs.accumulate(tt, &offsets, i, z, &mut g);
            }
            (c, g)
        })
        .collect();
    let mut total = 0.0;
    let mut g = vec![C64::new(0.0, 0.0); n];
    for (c, part) in parts {
        total += c;
        for (a, b) in g.iter_mut().zip(part) {
            *a += b;
        }
    }
    // dC/dRe = 2 Re(w), dC/dIm = -2 Im(w) with w = Σ conj(r) ∂tt/∂A.
    let mut flat = Vec::with_capacity(2 * n);
    for w in g {
        flat.push(2.0 * w.re);
        flat.push(-2.0 * w.im);
    }
    Ok((total, ParameterVector(flat)))
}

#[derive(Default)]
struct Environments {
    left: Vec<Vec<C64>>,
    right: Vec<Vec<C64>>,
}

impl Environments {
    /// Adds `conj(r) ∂tt/∂A` for one point into `g`; returns `|r|²`.
    fn accumulate(&mut self, tt: &TensorTrain, offsets: &[usize], idx: &[usize], z: C64, g: &mut [C64]) -> f64 {
        let cores = tt.cores();
        let l = cores.len();
        self.left.resize(l + 1, Vec::new());
        self.right.resize(l + 1, Vec::new());
        self.left[0] = vec![C64::new(1.0, 0.0)];
        for k in 0..l {
            let (head, tail) = self.left.split_at_mut(k + 1);
            cores[k].vec_times_slice(&head[k], idx[k], &mut tail[0]);
        }
        self.right[l] = vec![C64::new(1.0, 0.0)];
        for k in (0..l).rev() {
            let (head, tail) = self.right.split_at_mut(k + 1);
            cores[k].slice_times_vec(idx[k], &tail[0], &mut head[k]);
        }
        let r = self.left[l][0] - z;
        let rc = r.conj();
        for (k, c) in cores.iter().enumerate() {
            let s = idx[k];
            let (lw, rw) = (&self.left[k], &self.right[k + 1]);
            for (a, &la) in lw.iter().enumerate() {
                let w = rc * la;
                let base = offsets[k] + c.offset(a, s, 0);
                for (gb, &rb) in g[base..base + rw.len()].iter_mut().zip(rw) {
                    *gb += w * rb;
                }
            }
        }
        r.norm_sqr()
    }
}

#[derive(Debug, Clone)]
pub struct OptimizeOutcome {
    pub tt: TensorTrain,
    pub trace: Vec<f64>,
    pub iterations: usize,
    pub line_search_failed: bool,
}

/// Refits every core of `tt_init` to the ledger; returns the best iterate.
pub fn optimize(tt_init: &TensorTrain, ledger: &MeasurementLedger, plan: &FitPlan) -> Result<OptimizeOutcome> {
    plan.validate()?;
    if tt_init.max_bond() > plan.chi {
        return Err(Error::domain(format!("initial bond {} exceeds chi {}", tt_init.max_bond(), plan.chi)));
    }
    check(tt_init, ledger)?;
    let x0 = ParameterVector::from_tt(tt_init).0;
    let f = |x: &[f64]| {
        let tt = ParameterVector(x.to_vec()).to_tt(tt_init).expect("parameter length is fixed");
        let (c, g) = cost_and_gradient(&tt, ledger).expect("ledger was validated");
        (c, g.0)
    };
    let out = lbfgs::minimize(f, x0, &plan.lbfgs_options());
    Ok(OptimizeOutcome {
        tt: ParameterVector(out.x).to_tt(tt_init)?,
        trace: out.trace,
        iterations: out.iterations,
        line_search_failed: out.line_search_failed,
    })
}

#[derive(Debug, Clone)]
pub struct FitReport {
    pub plan: FitPlan,
    pub tt_itpl: TensorTrain,
    pub tt_init: TensorTrain,
    pub tt_opt: TensorTrain,
    pub ledger: MeasurementLedger,
    pub tci_error: f64,
    pub tci_sweeps: usize,
    pub tci_stop: StopReason,
    pub cost_itpl: f64,
    pub cost_init: f64,
    pub cost_trace: Vec<f64>,
    pub iterations: usize,
    pub line_search_failed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct FitSummary {
    pub plan: FitPlan,
    pub n_tci: usize,
    pub tci_error: f64,
    pub tci_sweeps: usize,
    pub tci_stop: StopReason,
    pub bonds_itpl: Vec<usize>,
    pub bonds_init: Vec<usize>,
    pub bonds_opt: Vec<usize>,
    pub cost_itpl: f64,
    pub cost_init: f64,
    pub cost_opt: f64,
    pub iterations: usize,
    pub line_search_failed: bool,
    pub cost_trace: Vec<f64>,
}

impl FitReport {
    pub fn cost_opt(&self) -> f64 {
        self.cost_trace.last().copied().unwrap_or(self.cost_init)
    }

    pub fn summary(&self) -> FitSummary {
        FitSummary {
            plan: self.plan.clone(),
            n_tci: self.ledger.len(),
            tci_error: self.tci_error,
            tci_sweeps: self.tci_sweeps,
            tci_stop: self.tci_stop,
            bonds_itpl: self.tt_itpl.bond_dims(),
            bonds_init: self.tt_init.bond_dims(),
            bonds_opt: self.tt_opt.bond_dims(),
            cost_itpl: self.cost_itpl,
            cost_init: self.cost_init,
            cost_opt: self.cost_opt(),
            iterations: self.iterations,
            line_search_failed: self.line_search_failed,
            cost_trace: self.cost_trace.clone(),
        }
    }

    /// Writes `{prefix}_summary.json`, `{prefix}_ledger.csv` and the three trains.
    pub fn save(&self, dir: &Path, prefix: &str) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let json = serde_json::to_string_pretty(&self.summary())?;
        std::fs::write(dir.join(format!("{prefix}_summary.json")), json + "\n")?;
        let file = std::fs::File::create(dir.join(format!("{prefix}_ledger.csv")))?;
        self.ledger.write_csv(std::io::BufWriter::new(file))?;
        for (name, tt) in [("itpl", &self.tt_itpl), ("init", &self.tt_init), ("opt", &self.tt_opt)] {
            tt.save(dir.join(format!("{prefix}_{name}.qtt")))?;
        }
        Ok(())
    }
}

/// Pipeline failure with every stage that did complete.
#[derive(Debug, ThisError)]
#[error("fit pipeline failed: {error}")]
pub struct FitFailure {
    pub error: Error,
    pub ledger: Option<MeasurementLedger>,
    pub tt_itpl: Option<TensorTrain>,
    pub tt_init: Option<TensorTrain>,
}

/// Runs interpolation at `χ̃`, compression to `χ`, and the least-squares refit.
pub fn fit_pipeline<E>(evaluator: &mut E, dims: &[usize], plan: &FitPlan) -> std::result::Result<FitReport, FitFailure>
where
    E: Evaluator + ?Sized,
{
    let fail = |error, ledger, tt_itpl, tt_init| FitFailure { error, ledger, tt_itpl, tt_init };
    plan.validate().map_err(|e| fail(e, None, None, None))?;
    let tci = cross_interpolate(evaluator, dims, &plan.tci_options())
        .map_err(|f| fail(f.error, Some(f.ledger), None, None))?;
    let spec = TruncationSpec::tolerance(plan.svd_tolerance).with_max_bond(plan.chi);
    let tt_init = match tci.tt.svd_truncate(spec) {
        Ok(t) => t,
        Err(e) => return Err(fail(e, Some(tci.ledger), Some(tci.tt), None)),
    };
    let costs = cost(&tci.tt, &tci.ledger).and_then(|a| Ok((a, cost(&tt_init, &tci.ledger)?)));
    let (cost_itpl, cost_init) = match costs {
        Ok(c) => c,
        Err(e) => return Err(fail(e, Some(tci.ledger), Some(tci.tt), Some(tt_init))),
    };
    let opt = match optimize(&tt_init, &tci.ledger, plan) {
        Ok(o) => o,
        Err(e) => return Err(fail(e, Some(tci.ledger), Some(tci.tt), Some(tt_init))),
    };
    Ok(FitReport {
        plan: plan.clone(),
        tt_itpl: tci.tt,
        tt_init,
        tt_opt: opt.tt,
        tci_error: tci.sweep_errors.last().copied().unwrap_or(0.0),
        tci_sweeps: tci.sweep_errors.len(),
        tci_stop: tci.stop,
        ledger: tci.ledger,
        cost_itpl,
        cost_init,
        cost_trace: opt.trace,
        iterations: opt.iterations,
        line_search_failed: opt.line_search_failed,
    })
}
