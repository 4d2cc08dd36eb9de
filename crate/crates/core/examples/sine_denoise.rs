//! Learning sin(2πx) from multiplicatively noisy samples:
//! cross interpolation, SVD compression, then least-squares refit.

use qttfit::experiments::{sine_trial, SineSetup};

fn main() -> qttfit::Result<()> {
    for sigma in [0.0, 0.01, 0.1] {
        let setup = SineSetup { sigma, ..SineSetup::default() };
        let t = sine_trial(&setup, 7)?.trial;
        println!(
            "σ = {sigma:<4}: {} samples, ε_TCI {:.3}, mean |error| itpl {:.2e}  init {:.2e}  opt {:.2e}  (refit at χ̃ without compression {:.2e})",
            t.n_tci, t.tci_error, t.err_itpl, t.err_init, t.err_opt, t.err_uncompressed
        );
    }
    Ok(())
}
