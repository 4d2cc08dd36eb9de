use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qttfit::experiments::{bonddim_scan, corr_learn, gs_energy, sine_demo, Command, RunConfig};

#[derive(Parser)]
#[command(name = "qttfit", version, about = "Noise-robust quantics tensor-train learning experiments")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Denoise sin(2πx) under multiplicative Gaussian noise.
    SineDemo(Flags),
    /// Learn two-time correlators from the shot-noisy circuit.
    CorrLearn(Flags),
    /// Estimate the ground-state energy by the E0 scan.
    GsEnergy(Flags),
    /// Exact-correlator bond dimensions and the ε_TCI-vs-χ̃ scan.
    BonddimScan(Flags),
}

#[derive(Args)]
struct Flags {
    /// key=value file applied before the flags below.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    lambda: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    #[arg(long)]
    tau: Option<String>,
    #[arg(long = "T")]
    t_max: Option<String>,
    #[arg(long = "R")]
    bits: Option<String>,
    #[arg(long)]
    tci_tol: Option<String>,
    #[arg(long)]
    trotter_steps: Option<String>,
    /// Shots per term and part, or "exact".
    #[arg(long)]
    shots: Option<String>,
    #[arg(long)]
    iters: Option<String>,
    #[arg(long)]
    e_halfwidth: Option<String>,
    #[arg(long)]
    e_steps: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    trials: Option<String>,
    #[arg(long)]
    n_sites: Option<String>,
    #[arg(long)]
    chi_tilde: Option<String>,
    #[arg(long)]
    chi: Option<String>,
    #[arg(long)]
    sigma: Option<String>,
    /// Comma-separated subset of proposed,qtci,mc.
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    mc_num: Option<String>,
    #[arg(long)]
    mc_den: Option<String>,
    #[arg(long)]
    svd_tol: Option<String>,
    /// Comma-separated chain lengths for the bond scan.
    #[arg(long)]
    sites: Option<String>,
    #[arg(long)]
    chi_tilde_max: Option<String>,
    #[arg(long)]
    stride: Option<String>,
}

impl Flags {
    fn resolve(&self, command: Command) -> qttfit::Result<RunConfig> {
        let mut cfg = RunConfig::defaults(command);
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        // n-sites first: it resets the bond caps that later flags may override.
        let pairs = [
            ("n-sites", &self.n_sites),
            ("lambda", &self.lambda),
            ("beta", &self.beta),
            ("tau", &self.tau),
            ("T", &self.t_max),
            ("R", &self.bits),
            ("tci-tol", &self.tci_tol),
            ("trotter-steps", &self.trotter_steps),
            ("shots", &self.shots),
            ("iters", &self.iters),
            ("e-halfwidth", &self.e_halfwidth),
            ("e-steps", &self.e_steps),
            ("seed", &self.seed),
            ("trials", &self.trials),
            ("chi-tilde", &self.chi_tilde),
            ("chi", &self.chi),
            ("sigma", &self.sigma),
            ("methods", &self.method),
            ("mc-num", &self.mc_num),
            ("mc-den", &self.mc_den),
            ("svd-tol", &self.svd_tol),
            ("sites", &self.sites),
            ("chi-tilde-max", &self.chi_tilde_max),
            ("stride", &self.stride),
        ];
        for (k, v) in pairs {
            if let Some(v) = v {
                cfg.set(k, v)?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> qttfit::Result<()> {
    match cli.command {
        Cmd::SineDemo(f) => {
            let r = sine_demo(&f.resolve(Command::SineDemo)?)?;
            r.save(&f.out)?;
            let s = &r.summary;
            println!(
                "mean abs error: itpl {:.4e}, init {:.4e}, opt {:.4e}, uncompressed {:.4e}; mean ε_TCI {:.4}",
                s.mean_abs_err_itpl, s.mean_abs_err_init, s.mean_abs_err_opt, s.mean_abs_err_uncompressed, s.mean_tci_error
            );
        }
        Cmd::CorrLearn(f) => {
            let r = corr_learn(&f.resolve(Command::CorrLearn)?)?;
            r.save(&f.out)?;
            for e in &r.errors {
                println!(
                    "{:?}: itpl {:.4e}, opt {:.4e}, opt below itpl on {:.1}% of points",
                    e.observable,
                    e.mean_abs_err_itpl,
                    e.mean_abs_err_opt,
                    100.0 * e.fraction_opt_below_itpl
                );
            }
        }
        Cmd::GsEnergy(f) => {
            let r = gs_energy(&f.resolve(Command::GsEnergy)?)?;
            r.save(&f.out)?;
            println!("exact E_g = {}", r.ground_energy);
            for s in &r.summaries {
                println!("{}: mean estimate {:.6}, mean |relative error| {:.4e}", s.method.name(), s.mean_estimate, s.mean_relative_error);
            }
        }
        Cmd::BonddimScan(f) => {
            let r = bonddim_scan(&f.resolve(Command::BonddimScan)?)?;
            r.save(&f.out)?;
            for s in &r.sites {
                println!("n_site {}: max bond {} (numerator), {} (denominator)", s.n_sites, s.max_bond_num, s.max_bond_den);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
