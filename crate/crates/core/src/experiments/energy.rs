use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::pite::{energy_scan, learn_kernel_tt, mc_energy_scan, EnergyScanResult, KernelSampler, McSamples};
use crate::rng::{derive_seed, derive_seed_path, tags};
use crate::tt::{TensorTrain, TruncationSpec};

use super::config::{default_mc_budget, Method, RunConfig};
use super::correlators::{learn_correlators, trial_seed, Observable, PhysicsSetup};
use super::{write_json, Mean};

#[derive(Debug, Clone, Serialize)]
pub struct TrialEnergy {
    pub trial: usize,
    pub seed: u64,
    pub method: Method,
    pub estimate: f64,
    pub relative_error: f64,
    pub argmin_e0: f64,
    pub flagged: usize,
    pub evaluations_num: usize,
    pub evaluations_den: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct MethodSummary {
    pub method: Method,
    pub mean_estimate: f64,
    pub mean_relative_error: f64,
    pub std_estimate: f64,
    pub mean_evaluations_num: f64,
    pub mean_evaluations_den: f64,
}

#[derive(Debug, Clone)]
pub struct GsEnergyReport {
    pub config: RunConfig,
    pub ground_energy: f64,
    pub kernel_bond: usize,
    pub kernel_evaluations: usize,
    /// Monte Carlo `(N_n, N_d)` actually used.
    pub mc_budget: Option<(usize, usize)>,
    pub trials: Vec<(TrialEnergy, EnergyScanResult)>,
    pub summaries: Vec<MethodSummary>,
}

#[derive(Serialize)]
struct GsSummary<'a> {
    config: &'a RunConfig,
    reference_energy: f64,
    kernel_bond: usize,
    kernel_evaluations: usize,
    mc_budget: Option<(usize, usize)>,
    methods: &'a [MethodSummary],
}

impl GsEnergyReport {
    pub fn summary(&self, method: Method) -> Option<&MethodSummary> {
        self.summaries.iter().find(|s| s.method == method)
    }

    /// Writes `gs_trials.csv`, one `scan_<method>_<trial>.csv` per run and `gs_summary.json`.
    pub fn save(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let mut w = std::io::BufWriter::new(std::fs::File::create(dir.join("gs_trials.csv"))?);
        writeln!(w, "trial,seed,method,estimate,relative_error,argmin_e0,flagged,evaluations_num,evaluations_den")?;
        for (t, scan) in &self.trials {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{}",
                t.trial,
                t.seed,
                t.method.name(),
                t.estimate,
                t.relative_error,
                t.argmin_e0,
                t.flagged,
                t.evaluations_num,
                t.evaluations_den
            )?;
            scan.save_csv(dir.join(format!("scan_{}_{}.csv", t.method.name(), t.trial)))?;
        }
        w.flush()?;
        write_json(
            &dir.join("gs_summary.json"),
            &GsSummary {
                config: &self.config,
                reference_energy: self.ground_energy,
                kernel_bond: self.kernel_bond,
                kernel_evaluations: self.kernel_evaluations,
                mc_budget: self.mc_budget,
                methods: &self.summaries,
            },
        )
    }
}

fn record(trial: usize, seed: u64, method: Method, scan: EnergyScanResult, reference: f64, evals: (usize, usize)) -> (TrialEnergy, EnergyScanResult) {
    let t = TrialEnergy {
        trial,
        seed,
        method,
        estimate: scan.estimate,
        relative_error: scan.relative_error(reference),
        argmin_e0: scan.argmin_e0(),
        flagged: scan.num_flagged(),
        evaluations_num: evals.0,
        evaluations_den: evals.1,
    };
    (t, scan)
}

/// Ground-state energy by the E0 scan for each selected method and trial.
///
/// The Monte Carlo budget defaults to the rounded mean ledger sizes of the
/// learned correlators, so both estimators see the same number of circuit
/// evaluations.
pub fn gs_energy(cfg: &RunConfig) -> Result<GsEnergyReport> {
    let setup = PhysicsSetup::new(cfg)?;
    let kernel = learn_kernel_tt(&setup.kernel, &setup.grid, cfg.tci_tol)?;
    let scan = cfg.scan(setup.ground_energy)?;
    let e_g = setup.ground_energy;
    let spec = TruncationSpec::exact();
    let wants = |m| cfg.methods.contains(&m);

    let mut trials = Vec::new();
    let mut learned = (Mean::default(), Mean::default());
    if wants(Method::Proposed) || wants(Method::Qtci) {
        let runs: Vec<Vec<(TrialEnergy, EnergyScanResult)>> = (0..cfg.trials)
            .into_par_iter()
            .map(|t| {
                let seed = trial_seed(cfg.seed, t);
                let fits = learn_correlators(&setup, seed)?;
                let evals = (fits.numerator.ledger.len(), fits.denominator.ledger.len());
                let mut out = Vec::new();
                let pairs: [(Method, &TensorTrain, &TensorTrain); 2] = [
                    (Method::Proposed, &fits.numerator.tt_opt, &fits.denominator.tt_opt),
                    (Method::Qtci, &fits.numerator.tt_itpl, &fits.denominator.tt_itpl),
                ];
                for (m, num, den) in pairs {
                    if wants(m) {
                        let r = energy_scan(num, den, &kernel.tt, &scan, &setup.grid, spec)?;
                        out.push(record(t, seed, m, r, e_g, evals));
                    }
                }
                Ok(out)
            })
            .collect::<Result<_>>()?;
        for r in runs.into_iter().flatten() {
            learned.0.push(r.0.evaluations_num as f64);
            learned.1.push(r.0.evaluations_den as f64);
            trials.push(r);
        }
    }

    let mut mc_budget = None;
    if wants(Method::Mc) {
        let fallback = default_mc_budget(cfg.n_sites);
        let pick = |explicit: usize, matched: &Mean, default: usize| match (explicit, matched.count()) {
            (0, 0) => default,
            (0, _) => matched.mean().round() as usize,
            (n, _) => n,
        };
        let budget = (pick(cfg.mc_num, &learned.0, fallback.0), pick(cfg.mc_den, &learned.1, fallback.1));
        mc_budget = Some(budget);
        let sampler = KernelSampler::new(&setup.kernel);
        let runs: Vec<(TrialEnergy, EnergyScanResult)> = (0..cfg.trials)
            .into_par_iter()
            .map(|t| {
                let seed = trial_seed(cfg.seed, t);
                let mc_seed = derive_seed(seed, tags::MONTE_CARLO);
                let draw = |o: Observable, n: usize| -> Result<McSamples> {
                    let corr = setup.circuit(o, mc_seed)?;
                    let positions = derive_seed_path(mc_seed, &[o as u64, 1]);
                    McSamples::draw_with(|a, b| corr.eval(a, b), &setup.kernel, &sampler, n, positions)
                };
                let num = draw(Observable::Hamiltonian, budget.0)?;
                let den = draw(Observable::Identity, budget.1)?;
                let r = mc_energy_scan(&num, &den, &scan)?;
                Ok(record(t, seed, Method::Mc, r, e_g, budget))
            })
            .collect::<Result<_>>()?;
        trials.extend(runs);
    }

    trials.sort_by(|a, b| (a.0.method, a.0.trial).cmp(&(b.0.method, b.0.trial)));
    let summaries = cfg
        .methods
        .iter()
        .map(|&m| {
            let (mut est, mut rel, mut n, mut d) = (Mean::default(), Mean::default(), Mean::default(), Mean::default());
            for (t, _) in trials.iter().filter(|(t, _)| t.method == m) {
                est.push(t.estimate);
                rel.push(t.relative_error);
                n.push(t.evaluations_num as f64);
                d.push(t.evaluations_den as f64);
            }
            MethodSummary {
                method: m,
                mean_estimate: est.mean(),
                mean_relative_error: rel.mean(),
                std_estimate: est.std(),
                mean_evaluations_num: n.mean(),
                mean_evaluations_den: d.mean(),
            }
        })
        .collect();
    Ok(GsEnergyReport {
        config: cfg.clone(),
        ground_energy: e_g,
        kernel_bond: kernel.tt.max_bond(),
        kernel_evaluations: kernel.num_evaluations(),
        mc_budget,
        trials,
        summaries,
    })
}

/// The scan with noise-free, untrotterized correlators learned to `tol`.
pub fn exact_energy_scan(cfg: &RunConfig, tol: f64) -> Result<EnergyScanResult> {
    let setup = PhysicsSetup::new(cfg)?;
    let kernel = learn_kernel_tt(&setup.kernel, &setup.grid, cfg.tci_tol)?;
    let learn = |o: Observable| -> Result<TensorTrain> {
        let corr = setup.exact(o)?;
        let grid = &setup.grid;
        let mut f = |idx: &[usize]| {
            let x = grid.decode_unchecked(idx);
            corr.eval(x[0], x[1])
        };
        let opts = crate::tci::TciOptions::new(64, tol).with_global_probes(64, 0);
        Ok(crate::tci::cross_interpolate(&mut f, &grid.local_dims(), &opts).map_err(|e| e.error)?.tt)
    };
    energy_scan(
        &learn(Observable::Hamiltonian)?,
        &learn(Observable::Identity)?,
        &kernel.tt,
        &cfg.scan(setup.ground_energy)?,
        &setup.grid,
        TruncationSpec::exact(),
    )
}
