use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::fit::{fit_pipeline, FitPlan, FitReport};
use crate::pite::{time_grid, KernelParams};
use crate::qsim::{CircuitCorrelator, ExactCorrelator, PauliHamiltonian, Spectrum};
use crate::quantics::QuanticsGrid;
use crate::rng::{derive_seed, tags};
use crate::tt::C64;

use super::config::RunConfig;
use super::{write_json, Mean};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    /// `⟨H̄⟩(t, t')`, the numerator.
    Hamiltonian,
    /// `⟨1⟩(t, t')`, the denominator.
    Identity,
}

impl Observable {
    fn tag(self) -> u64 {
        match self {
            Observable::Hamiltonian => tags::NUMERATOR,
            Observable::Identity => tags::DENOMINATOR,
        }
    }
}

/// Everything derived from a config that trials share.
#[derive(Debug, Clone)]
pub struct PhysicsSetup {
    pub cfg: RunConfig,
    pub hamiltonian: PauliHamiltonian,
    pub identity: PauliHamiltonian,
    pub ground_energy: f64,
    pub kernel: KernelParams,
    pub grid: QuanticsGrid,
}

impl PhysicsSetup {
    pub fn new(cfg: &RunConfig) -> Result<Self> {
        cfg.validate()?;
        let hamiltonian = cfg.hamiltonian()?;
        let kernel = cfg.kernel()?;
        Ok(Self {
            cfg: cfg.clone(),
            identity: PauliHamiltonian::identity(cfg.n_sites)?,
            ground_energy: Spectrum::new(&hamiltonian)?.ground_energy(),
            grid: time_grid(&kernel, cfg.bits)?,
            hamiltonian,
            kernel,
        })
    }

    pub fn plan(&self) -> FitPlan {
        FitPlan { tci_tolerance: self.cfg.tci_tol, ..FitPlan::new(self.cfg.chi_tilde, self.cfg.chi).with_iterations(self.cfg.iters) }
    }

    pub fn observable(&self, o: Observable) -> &PauliHamiltonian {
        match o {
            Observable::Hamiltonian => &self.hamiltonian,
            Observable::Identity => &self.identity,
        }
    }

    /// Shot-noisy circuit correlator; shot streams hang off `seed`.
    pub fn circuit(&self, o: Observable, seed: u64) -> Result<CircuitCorrelator> {
        CircuitCorrelator::new(&self.hamiltonian, self.observable(o), self.cfg.shot_config(derive_seed(seed, o.tag())))
    }

    pub fn exact(&self, o: Observable) -> Result<ExactCorrelator> {
        ExactCorrelator::new(&self.hamiltonian, self.observable(o))
    }

    /// Grid times of one variable.
    pub fn times(&self) -> Vec<f64> {
        (0..self.grid.points_per_var()).map(|m| self.grid.coordinate(0, m)).collect()
    }

    /// `(m, m')` of each dense position of a train on the grid.
    pub fn dense_positions(&self) -> Vec<(usize, usize)> {
        let len = self.grid.len();
        (0..1usize << len)
            .map(|p| {
                let idx: Vec<usize> = (0..len).map(|k| (p >> (len - 1 - k)) & 1).collect();
                let ms = self.grid.grid_from_index(&idx).expect("bits are in range");
                (ms[0] as usize, ms[1] as usize)
            })
            .collect()
    }

    /// Exact correlator values in dense (interleaved) order.
    pub fn exact_dense(&self, o: Observable) -> Result<Vec<C64>> {
        let ts = self.times();
        let table = self.exact(o)?.grid(&ts, &ts);
        Ok(self.dense_positions().iter().map(|&(m, mp)| table[(m, mp)]).collect())
    }

    /// Learns one correlator from the circuit through the full pipeline.
    pub fn learn(&self, o: Observable, seed: u64) -> Result<FitReport> {
        let corr = self.circuit(o, seed)?;
        let grid = &self.grid;
        let mut f = |idx: &[usize]| {
            let x = grid.decode_unchecked(idx);
            corr.eval(x[0], x[1])
        };
        fit_pipeline(&mut f, &grid.local_dims(), &self.plan()).map_err(|e| e.error)
    }
}

pub struct CorrelatorFits {
    pub numerator: FitReport,
    pub denominator: FitReport,
}

pub fn learn_correlators(setup: &PhysicsSetup, seed: u64) -> Result<CorrelatorFits> {
    let (numerator, denominator) = rayon::join(
        || setup.learn(Observable::Hamiltonian, seed),
        || setup.learn(Observable::Identity, seed),
    );
    Ok(CorrelatorFits { numerator: numerator?, denominator: denominator? })
}

/// Per-trial seed under the master seed.
pub fn trial_seed(master: u64, trial: usize) -> u64 {
    derive_seed(master, trial as u64)
}

#[derive(Debug, Clone, Serialize)]
pub struct ObservableErrors {
    pub observable: Observable,
    /// Grid-and-trial mean of `|F̃ − F|`.
    pub mean_abs_err_itpl: f64,
    pub mean_abs_err_init: f64,
    pub mean_abs_err_opt: f64,
    /// Share of grid points where the trial-mean error of `F̃_opt` is below `F̃_itpl`.
    pub fraction_opt_below_itpl: f64,
    pub mean_evaluations: f64,
    pub mean_tci_error: f64,
}

#[derive(Debug, Clone)]
pub struct CorrLearnReport {
    pub config: RunConfig,
    pub ground_energy: f64,
    pub errors: Vec<ObservableErrors>,
    /// Trial-mean absolute errors per grid point, `m·2^R + m'` order:
    /// `[itpl_num, opt_num, itpl_den, opt_den]`.
    pub series: Vec<[f64; 4]>,
    times: Vec<f64>,
}

#[derive(Serialize)]
struct CorrLearnSummary<'a> {
    config: &'a RunConfig,
    ground_energy: f64,
    observables: &'a [ObservableErrors],
}

/// Learns both correlators for every trial and compares each stage with
/// the exact (untrotterized, noise-free) correlators on the whole grid.
pub fn corr_learn(cfg: &RunConfig) -> Result<CorrLearnReport> {
    let setup = PhysicsSetup::new(cfg)?;
    let exact = [setup.exact_dense(Observable::Hamiltonian)?, setup.exact_dense(Observable::Identity)?];
    let positions = setup.dense_positions();
    let per_trial: Vec<CorrelatorFits> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| learn_correlators(&setup, trial_seed(cfg.seed, t)))
        .collect::<Result<_>>()?;

    let side = setup.grid.points_per_var() as usize;
    let mut series = vec![[0.0; 4]; side * side];
    let mut errors = Vec::new();
    for (k, o) in [Observable::Hamiltonian, Observable::Identity].into_iter().enumerate() {
        let mut itpl = vec![0.0; exact[k].len()];
        let mut opt = vec![0.0; exact[k].len()];
        let (mut init_mean, mut evals, mut tci) = (Mean::default(), Mean::default(), Mean::default());
        for fits in &per_trial {
            let r = if k == 0 { &fits.numerator } else { &fits.denominator };
            let init = r.tt_init.to_dense();
            for (((acc_i, acc_o), (a, b)), (c, e)) in itpl
                .iter_mut()
                .zip(opt.iter_mut())
                .zip(r.tt_itpl.to_dense().iter().zip(r.tt_opt.to_dense().iter()))
                .zip(init.iter().zip(&exact[k]))
            {
                *acc_i += (a - e).norm() / cfg.trials as f64;
                *acc_o += (b - e).norm() / cfg.trials as f64;
                init_mean.push((c - e).norm());
            }
            evals.push(r.ledger.len() as f64);
            tci.push(r.tci_error);
        }
        let below = itpl.iter().zip(&opt).filter(|(i, o)| o < i).count();
        errors.push(ObservableErrors {
            observable: o,
            mean_abs_err_itpl: itpl.iter().sum::<f64>() / itpl.len() as f64,
            mean_abs_err_init: init_mean.mean(),
            mean_abs_err_opt: opt.iter().sum::<f64>() / opt.len() as f64,
            fraction_opt_below_itpl: below as f64 / itpl.len() as f64,
            mean_evaluations: evals.mean(),
            mean_tci_error: tci.mean(),
        });
        for (p, &(m, mp)) in positions.iter().enumerate() {
            series[m * side + mp][2 * k] = itpl[p];
            series[m * side + mp][2 * k + 1] = opt[p];
        }
    }
    Ok(CorrLearnReport { config: cfg.clone(), ground_energy: setup.ground_energy, errors, series, times: setup.times() })
}

impl CorrLearnReport {
    /// Writes `corr_errors.csv` (every `stride`-th point) and `corr_summary.json`.
    pub fn save(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let side = self.times.len();
        let mut w = std::io::BufWriter::new(std::fs::File::create(dir.join("corr_errors.csv"))?);
        writeln!(w, "k,t,tp,err_itpl_num,err_opt_num,err_itpl_den,err_opt_den")?;
        for (k, row) in self.series.iter().enumerate().step_by(self.config.stride) {
            writeln!(w, "{k},{},{},{},{},{},{}", self.times[k / side], self.times[k % side], row[0], row[1], row[2], row[3])?;
        }
        w.flush()?;
        write_json(
            &dir.join("corr_summary.json"),
            &CorrLearnSummary { config: &self.config, ground_energy: self.ground_energy, observables: &self.errors },
        )
    }
}
