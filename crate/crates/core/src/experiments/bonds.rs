use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::tci::{cross_interpolate, TciOptions};
use crate::tt::{TensorTrain, TruncationSpec};

use super::config::RunConfig;
use super::correlators::{trial_seed, Observable, PhysicsSetup};
use super::{write_json, Mean};

#[derive(Debug, Clone, Serialize)]
pub struct SiteBonds {
    pub n_sites: usize,
    pub max_bond_num: usize,
    pub max_bond_den: usize,
    pub bonds_num: Vec<usize>,
    pub bonds_den: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TciScanPoint {
    pub chi_tilde: usize,
    /// Trial-mean `ε_TCI`.
    pub error_num: f64,
    pub error_den: f64,
    pub evaluations_num: f64,
    pub evaluations_den: f64,
}

#[derive(Debug, Clone)]
pub struct BonddimReport {
    pub config: RunConfig,
    pub sites: Vec<SiteBonds>,
    pub tci_scan: Vec<TciScanPoint>,
}

#[derive(Serialize)]
struct BonddimSummary<'a> {
    config: &'a RunConfig,
    sites: &'a [SiteBonds],
    tci_scan: &'a [TciScanPoint],
}

/// Bond dimensions of the exact correlators after SVD compression at `svd_tol`.
pub fn exact_bonds(cfg: &RunConfig, n_sites: usize) -> Result<SiteBonds> {
    let mut c = cfg.clone();
    c.set("n-sites", &n_sites.to_string())?;
    let setup = PhysicsSetup::new(&c)?;
    let dims = setup.grid.local_dims();
    let compress = |o| -> Result<TensorTrain> {
        TensorTrain::from_dense(&setup.exact_dense(o)?, &dims, TruncationSpec::tolerance(cfg.svd_tol))
    };
    let (num, den) = (compress(Observable::Hamiltonian)?, compress(Observable::Identity)?);
    Ok(SiteBonds {
        n_sites,
        max_bond_num: num.max_bond(),
        max_bond_den: den.max_bond(),
        bonds_num: num.bond_dims(),
        bonds_den: den.bond_dims(),
    })
}

/// `ε_TCI` of the noisy circuit correlators for `χ̃ = 1 … chi_tilde_max`.
pub fn tci_error_scan(cfg: &RunConfig) -> Result<Vec<TciScanPoint>> {
    let setup = PhysicsSetup::new(cfg)?;
    let dims = setup.grid.local_dims();
    let run = |o: Observable, chi_tilde: usize, trial: usize| -> Result<(f64, f64)> {
        let corr = setup.circuit(o, trial_seed(cfg.seed, trial))?;
        let grid = &setup.grid;
        let mut f = |idx: &[usize]| {
            let x = grid.decode_unchecked(idx);
            corr.eval(x[0], x[1])
        };
        let res = cross_interpolate(&mut f, &dims, &TciOptions::new(chi_tilde, cfg.tci_tol)).map_err(|e| e.error)?;
        Ok((res.error(), res.num_evaluations() as f64))
    };
    (1..=cfg.chi_tilde_max)
        .into_par_iter()
        .map(|chi_tilde| {
            let mut acc = [Mean::default(), Mean::default(), Mean::default(), Mean::default()];
            for trial in 0..cfg.trials {
                let (en, nn) = run(Observable::Hamiltonian, chi_tilde, trial)?;
                let (ed, nd) = run(Observable::Identity, chi_tilde, trial)?;
                for (a, v) in acc.iter_mut().zip([en, ed, nn, nd]) {
                    a.push(v);
                }
            }
            Ok(TciScanPoint {
                chi_tilde,
                error_num: acc[0].mean(),
                error_den: acc[1].mean(),
                evaluations_num: acc[2].mean(),
                evaluations_den: acc[3].mean(),
            })
        })
        .collect()
}

pub fn bonddim_scan(cfg: &RunConfig) -> Result<BonddimReport> {
    cfg.validate()?;
    let sites = cfg.sites.par_iter().map(|&n| exact_bonds(cfg, n)).collect::<Result<_>>()?;
    Ok(BonddimReport { config: cfg.clone(), sites, tci_scan: tci_error_scan(cfg)? })
}

impl BonddimReport {
    /// Writes `bond_dims.csv`, `tci_scan.csv` and `bonddim_summary.json`.
    pub fn save(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let mut w = std::io::BufWriter::new(std::fs::File::create(dir.join("bond_dims.csv"))?);
        writeln!(w, "n_sites,max_bond_num,max_bond_den")?;
        for s in &self.sites {
            writeln!(w, "{},{},{}", s.n_sites, s.max_bond_num, s.max_bond_den)?;
        }
        w.flush()?;
        let mut w = std::io::BufWriter::new(std::fs::File::create(dir.join("tci_scan.csv"))?);
        writeln!(w, "chi_tilde,error_num,error_den,evaluations_num,evaluations_den")?;
        for p in &self.tci_scan {
            writeln!(w, "{},{},{},{},{}", p.chi_tilde, p.error_num, p.error_den, p.evaluations_num, p.evaluations_den)?;
        }
        w.flush()?;
        write_json(
            &dir.join("bonddim_summary.json"),
            &BonddimSummary { config: &self.config, sites: &self.sites, tci_scan: &self.tci_scan },
        )
    }
}
