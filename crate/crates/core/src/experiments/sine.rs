use std::io::Write;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fit::{fit_pipeline, optimize, FitPlan};
use crate::quantics::QuanticsGrid;
use crate::tt::{TensorTrain, C64};

use super::config::RunConfig;
use super::correlators::trial_seed;
use super::{write_json, Mean};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SineSetup {
    pub sigma: f64,
    pub bits: u32,
    pub chi_tilde: usize,
    pub chi: usize,
    pub n_itr: usize,
}

impl Default for SineSetup {
    fn default() -> Self {
        Self { sigma: 0.1, bits: 12, chi_tilde: 6, chi: 2, n_itr: 500 }
    }
}

/// Mean absolute grid errors of each stage against `sin(2πx)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SineTrial {
    pub seed: u64,
    pub n_tci: usize,
    pub tci_error: f64,
    pub err_itpl: f64,
    pub err_init: f64,
    pub err_opt: f64,
    /// Optimized at `χ̃` from the interpolant, skipping compression.
    pub err_uncompressed: f64,
    pub cost_init: f64,
    pub cost_opt: f64,
    pub iterations: usize,
}

pub fn target(x: f64) -> f64 {
    (2.0 * std::f64::consts::PI * x).sin()
}

/// Mean of `|tt(x) − sin(2πx)|` over every grid point.
pub fn mean_abs_error(tt: &TensorTrain, grid: &QuanticsGrid) -> f64 {
    let dense = tt.to_dense();
    let n = dense.len() as f64;
    // to_dense is row-major with the first bit most significant, i.e. grid order.
    dense
        .iter()
        .enumerate()
        .map(|(m, v)| (v - target(grid.coordinate(0, m as u64))).norm())
        .sum::<f64>()
        / n
}

/// Trial statistics together with the three stage trains.
#[derive(Debug, Clone)]
pub struct SineOutcome {
    pub trial: SineTrial,
    pub tt_itpl: TensorTrain,
    pub tt_init: TensorTrain,
    pub tt_opt: TensorTrain,
}

/// One noise realization: `f(x)(1 + N(0, σ²))`, fresh noise per distinct point.
pub fn sine_trial(setup: &SineSetup, seed: u64) -> Result<SineOutcome> {
    if !(setup.sigma >= 0.0) {
        return Err(Error::domain(format!("sigma {} must be nonnegative", setup.sigma)));
    }
    let grid = QuanticsGrid::unit(1, setup.bits)?;
    let noise = Normal::new(0.0, setup.sigma).map_err(|e| Error::domain(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = |idx: &[usize]| {
        let x = grid.decode_unchecked(idx)[0];
        C64::new(target(x) * (1.0 + noise.sample(&mut rng)), 0.0)
    };
    let plan = FitPlan::new(setup.chi_tilde, setup.chi).with_iterations(setup.n_itr);
    let report = fit_pipeline(&mut f, &grid.local_dims(), &plan).map_err(|e| e.error)?;

    let wide = FitPlan::new(setup.chi_tilde, setup.chi_tilde).with_iterations(setup.n_itr);
    let uncompressed = optimize(&report.tt_itpl, &report.ledger, &wide)?;

    let trial = SineTrial {
        seed,
        n_tci: report.ledger.len(),
        tci_error: report.tci_error,
        err_itpl: mean_abs_error(&report.tt_itpl, &grid),
        err_init: mean_abs_error(&report.tt_init, &grid),
        err_opt: mean_abs_error(&report.tt_opt, &grid),
        err_uncompressed: mean_abs_error(&uncompressed.tt, &grid),
        cost_init: report.cost_init,
        cost_opt: report.cost_opt(),
        iterations: report.iterations,
    };
    Ok(SineOutcome { trial, tt_itpl: report.tt_itpl, tt_init: report.tt_init, tt_opt: report.tt_opt })
}

impl SineSetup {
    pub fn from_config(cfg: &RunConfig) -> Self {
        Self { sigma: cfg.sigma, bits: cfg.bits, chi_tilde: cfg.chi_tilde, chi: cfg.chi, n_itr: cfg.iters }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SineSummary {
    pub mean_tci_error: f64,
    pub mean_abs_err_itpl: f64,
    pub mean_abs_err_init: f64,
    pub mean_abs_err_opt: f64,
    pub mean_abs_err_uncompressed: f64,
    /// Trials where `F̃_opt` beats both `F̃_itpl` and `F̃_init`.
    pub opt_best_trials: usize,
    pub mean_evaluations: f64,
}

#[derive(Debug, Clone)]
pub struct SineDemoReport {
    pub config: RunConfig,
    pub trials: Vec<SineOutcome>,
    pub summary: SineSummary,
}

#[derive(Serialize)]
struct SineJson<'a> {
    config: &'a RunConfig,
    summary: &'a SineSummary,
    trials: Vec<&'a SineTrial>,
}

/// Runs `cfg.trials` independent noise realizations in parallel.
pub fn sine_demo(cfg: &RunConfig) -> Result<SineDemoReport> {
    cfg.validate()?;
    let setup = SineSetup::from_config(cfg);
    let trials: Vec<SineOutcome> =
        (0..cfg.trials).into_par_iter().map(|t| sine_trial(&setup, trial_seed(cfg.seed, t))).collect::<Result<_>>()?;
    let mean = |f: &dyn Fn(&SineTrial) -> f64| {
        let mut m = Mean::default();
        trials.iter().for_each(|o| m.push(f(&o.trial)));
        m.mean()
    };
    let summary = SineSummary {
        mean_tci_error: mean(&|t| t.tci_error),
        mean_abs_err_itpl: mean(&|t| t.err_itpl),
        mean_abs_err_init: mean(&|t| t.err_init),
        mean_abs_err_opt: mean(&|t| t.err_opt),
        mean_abs_err_uncompressed: mean(&|t| t.err_uncompressed),
        opt_best_trials: trials.iter().filter(|o| o.trial.err_opt < o.trial.err_itpl && o.trial.err_opt < o.trial.err_init).count(),
        mean_evaluations: mean(&|t| t.n_tci as f64),
    };
    Ok(SineDemoReport { config: cfg.clone(), trials, summary })
}

impl SineDemoReport {
    /// Writes `sine_trial_<k>.csv` grids, `sine_stats.csv` (per-point mean and
    /// variance over trials) and `sine_summary.json`.
    pub fn save(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let grid = QuanticsGrid::unit(1, self.config.bits)?;
        let dense: Vec<[Vec<f64>; 3]> = self
            .trials
            .iter()
            .map(|o| [&o.tt_itpl, &o.tt_init, &o.tt_opt].map(|tt| tt.to_dense().iter().map(|v| v.re).collect()))
            .collect();
        for (k, d) in dense.iter().enumerate() {
            let mut w = std::io::BufWriter::new(std::fs::File::create(dir.join(format!("sine_trial_{k}.csv")))?);
            writeln!(w, "x,target,itpl,init,opt")?;
            for m in 0..d[0].len() {
                let x = grid.coordinate(0, m as u64);
                writeln!(w, "{x},{},{},{},{}", target(x), d[0][m], d[1][m], d[2][m])?;
            }
            w.flush()?;
        }
        let mut w = std::io::BufWriter::new(std::fs::File::create(dir.join("sine_stats.csv"))?);
        writeln!(w, "x,mean_itpl,var_itpl,mean_init,var_init,mean_opt,var_opt")?;
        for m in 0..grid.points_per_var() as usize {
            write!(w, "{}", grid.coordinate(0, m as u64))?;
            for stage in 0..3 {
                let mut acc = Mean::default();
                dense.iter().for_each(|d| acc.push(d[stage][m]));
                write!(w, ",{},{}", acc.mean(), acc.std().powi(2))?;
            }
            writeln!(w)?;
        }
        w.flush()?;
        write_json(
            &dir.join("sine_summary.json"),
            &SineJson { config: &self.config, summary: &self.summary, trials: self.trials.iter().map(|o| &o.trial).collect() },
        )
    }
}
