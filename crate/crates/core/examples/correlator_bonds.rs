//! Bond dimensions of noise-free two-time correlators after SVD compression.

use qttfit::experiments::bonds::exact_bonds;
use qttfit::experiments::{Command, RunConfig};

fn main() -> qttfit::Result<()> {
    let cfg = RunConfig::defaults(Command::BonddimScan);
    for n in [2, 4, 6, 8] {
        let b = exact_bonds(&cfg, n)?;
        println!("n_site {n}: numerator {:?}", b.bonds_num);
        println!("         denominator {:?}", b.bonds_den);
    }
    Ok(())
}
