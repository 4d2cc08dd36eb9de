//! Exact ground-state energies of the open transverse-field Ising chain.

use qttfit::qsim::{build_tfim, Spectrum};

fn main() -> qttfit::Result<()> {
    for lambda in [0.4, 1.0, 1.2, 1.6] {
        let row: Vec<String> = [2, 4, 6, 8]
            .iter()
            .map(|&n| {
                let s = Spectrum::new(&build_tfim(n, lambda).unwrap()).unwrap();
                format!("n={n}: E_g {:+.6} gap {:.4}", s.values[0], s.values[1] - s.values[0])
            })
            .collect();
        println!("λ = {lambda}: {}", row.join("  "));
    }
    Ok(())
}
