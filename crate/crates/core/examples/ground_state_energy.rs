//! Ground-state energy of a two-site chain from shot-noisy correlators:
//! learned trains, raw interpolants and Monte Carlo, all on the same budget.

use qttfit::experiments::{gs_energy, Command, RunConfig};

fn main() -> qttfit::Result<()> {
    let mut cfg = RunConfig::defaults(Command::GsEnergy);
    cfg.set("trials", "3")?;
    let report = gs_energy(&cfg)?;
    println!("exact E_g = {:.6}; kernel train bond {}", report.ground_energy, report.kernel_bond);
    for (t, scan) in &report.trials {
        println!(
            "{:8} trial {}: Ê = {:.6} at E0 = {:+.3} (relative error {:.2e}, {}+{} evaluations)",
            t.method.name(),
            t.trial,
            scan.estimate,
            scan.argmin_e0(),
            t.relative_error,
            t.evaluations_num,
            t.evaluations_den
        );
    }
    Ok(())
}
