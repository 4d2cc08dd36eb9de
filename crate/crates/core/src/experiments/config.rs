use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pite::{EnergyScan, KernelParams};
use crate::qsim::{build_tfim, PauliHamiltonian, ShotConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    SineDemo,
    CorrLearn,
    GsEnergy,
    BonddimScan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Cross interpolation, compression, and refit.
    Proposed,
    /// Raw cross interpolant.
    Qtci,
    /// Monte Carlo ratio estimator.
    Mc,
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "proposed" => Ok(Method::Proposed),
            "qtci" => Ok(Method::Qtci),
            "mc" => Ok(Method::Mc),
            other => Err(Error::domain(format!("unknown method {other:?}"))),
        }
    }
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Proposed => "proposed",
            Method::Qtci => "qtci",
            Method::Mc => "mc",
        }
    }
}

/// Bond caps `(χ̃, χ)` used for each chain length.
pub fn default_bonds(n_sites: usize) -> (usize, usize) {
    match n_sites {
        0..=2 => (4, 2),
        3..=4 => (6, 4),
        _ => (10, 8),
    }
}

/// Evaluation budgets `(N_n, N_d)` of the Monte Carlo baseline when no
/// matched run is available.
pub fn default_mc_budget(n_sites: usize) -> (usize, usize) {
    match n_sites {
        0..=2 => (767, 742),
        3..=4 => (1793, 1732),
        _ => (4480, 4592),
    }
}

/// Every knob of every command. Serialized verbatim into summaries.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub n_sites: usize,
    pub lambda: f64,
    pub beta: f64,
    pub tau: f64,
    #[serde(rename = "T")]
    pub t_max: f64,
    #[serde(rename = "R")]
    pub bits: u32,
    pub tci_tol: f64,
    pub trotter_steps: usize,
    /// Shots per term and part; 0 means exact probabilities.
    pub shots: u64,
    pub iters: usize,
    pub e_halfwidth: f64,
    pub e_steps: usize,
    pub chi_tilde: usize,
    pub chi: usize,
    pub seed: u64,
    pub trials: usize,
    pub sigma: f64,
    pub methods: Vec<Method>,
    /// Monte Carlo budgets; 0 means "match the proposed method".
    pub mc_num: usize,
    pub mc_den: usize,
    pub svd_tol: f64,
    pub sites: Vec<usize>,
    pub chi_tilde_max: usize,
    /// Keep every `stride`-th grid point in error series.
    pub stride: usize,
}

impl RunConfig {
    pub fn defaults(command: Command) -> Self {
        let (chi_tilde, chi) = default_bonds(2);
        let mut cfg = Self {
            command,
            n_sites: 2,
            lambda: 1.2,
            beta: 1.0,
            tau: 2.0,
            t_max: 2.0,
            bits: 8,
            tci_tol: 1e-5,
            trotter_steps: 100,
            shots: 15_000,
            iters: 500,
            e_halfwidth: 2.0,
            e_steps: 40,
            chi_tilde,
            chi,
            seed: 0,
            trials: 20,
            sigma: 0.1,
            methods: vec![Method::Proposed, Method::Qtci, Method::Mc],
            mc_num: 0,
            mc_den: 0,
            svd_tol: 1e-10,
            sites: vec![2, 4, 6],
            chi_tilde_max: 12,
            stride: 1,
        };
        match command {
            Command::SineDemo => {
                cfg.bits = 12;
                cfg.chi_tilde = 6;
                cfg.chi = 2;
                cfg.tci_tol = 0.0;
            }
            Command::BonddimScan => {
                cfg.n_sites = 4;
                (cfg.chi_tilde, cfg.chi) = default_bonds(4);
                cfg.trials = 4;
            }
            Command::CorrLearn | Command::GsEnergy => {}
        }
        cfg
    }

    /// Applies one `key=value` override. Keys follow the flag names;
    /// underscores and dashes are interchangeable. Setting `n-sites` also
    /// resets the bond caps to their defaults for that size.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn parse<T: FromStr>(key: &str, v: &str) -> Result<T> {
            v.trim().parse().map_err(|_| Error::Format(format!("bad value {v:?} for {key}")))
        }
        fn list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>> {
            v.split(',').filter(|s| !s.trim().is_empty()).map(|s| parse(key, s)).collect()
        }
        let k = key.trim().replace('_', "-");
        match k.as_str() {
            "n-sites" | "n" => {
                self.n_sites = parse(&k, value)?;
                (self.chi_tilde, self.chi) = default_bonds(self.n_sites);
            }
            "lambda" => self.lambda = parse(&k, value)?,
            "beta" => self.beta = parse(&k, value)?,
            "tau" => self.tau = parse(&k, value)?,
            "T" | "t-max" => self.t_max = parse(&k, value)?,
            "R" | "bits" => self.bits = parse(&k, value)?,
            "tci-tol" => self.tci_tol = parse(&k, value)?,
            "trotter-steps" => self.trotter_steps = parse(&k, value)?,
            "shots" => {
                self.shots = if value.trim() == "exact" { 0 } else { parse(&k, value)? };
            }
            "iters" => self.iters = parse(&k, value)?,
            "e-halfwidth" => self.e_halfwidth = parse(&k, value)?,
            "e-steps" => self.e_steps = parse(&k, value)?,
            "chi-tilde" => self.chi_tilde = parse(&k, value)?,
            "chi" => self.chi = parse(&k, value)?,
            "seed" => self.seed = parse(&k, value)?,
            "trials" => self.trials = parse(&k, value)?,
            "sigma" => self.sigma = parse(&k, value)?,
            "methods" | "method" => {
                let mut m: Vec<Method> = list(&k, value)?;
                m.sort();
                m.dedup();
                self.methods = m;
            }
            "mc-num" => self.mc_num = parse(&k, value)?,
            "mc-den" => self.mc_den = parse(&k, value)?,
            "svd-tol" => self.svd_tol = parse(&k, value)?,
            "sites" => self.sites = list(&k, value)?,
            "chi-tilde-max" => self.chi_tilde_max = parse(&k, value)?,
            "stride" => self.stride = parse(&k, value)?,
            _ => return Err(Error::Format(format!("unknown config key {key:?}"))),
        }
        Ok(())
    }

    /// Reads `key = value` lines; blank lines and `#` comments are skipped.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Format(format!("line {}: expected key=value", n + 1)))?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        self.apply_text(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.kernel()?;
        if self.trials == 0 {
            return Err(Error::domain("trials must be at least 1"));
        }
        if self.n_sites < 2 {
            return Err(Error::domain("n_sites must be at least 2"));
        }
        if self.chi == 0 || self.chi > self.chi_tilde {
            return Err(Error::domain(format!("need 1 ≤ χ ≤ χ̃, got χ = {}, χ̃ = {}", self.chi, self.chi_tilde)));
        }
        if self.stride == 0 {
            return Err(Error::domain("stride must be at least 1"));
        }
        if self.methods.is_empty() {
            return Err(Error::domain("no method selected"));
        }
        if !(self.sigma >= 0.0) {
            return Err(Error::domain("sigma must be nonnegative"));
        }
        Ok(())
    }

    pub fn kernel(&self) -> Result<KernelParams> {
        KernelParams::new(self.beta, self.tau, self.t_max)
    }

    pub fn hamiltonian(&self) -> Result<PauliHamiltonian> {
        build_tfim(self.n_sites, self.lambda)
    }

    pub fn shot_config(&self, seed: u64) -> ShotConfig {
        if self.shots == 0 {
            ShotConfig::exact(self.trotter_steps)
        } else {
            ShotConfig::finite(self.shots, self.trotter_steps, seed)
        }
    }

    pub fn scan(&self, center: f64) -> Result<EnergyScan> {
        EnergyScan::new(center, self.e_halfwidth, self.e_steps)
    }
}
