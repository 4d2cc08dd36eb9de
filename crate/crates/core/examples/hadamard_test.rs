//! Two-time correlators of the transverse-field Ising chain measured by an
//! ancilla-controlled Hadamard test, against dense evolution.

use qttfit::qsim::{build_tfim, hadamard_test, CircuitCorrelator, ExactCorrelator, Part, PauliString, ShotConfig};

fn main() -> qttfit::Result<()> {
    let h = build_tfim(2, 1.2)?;
    let zz: PauliString = "ZZ".parse()?;
    let (t, tp) = (0.3, -0.7);
    for steps in [25, 100, 400] {
        let re = hadamard_test(&h, &zz, t, tp, Part::Re, &ShotConfig::exact(steps))?;
        let im = hadamard_test(&h, &zz, t, tp, Part::Im, &ShotConfig::exact(steps))?;
        println!("N_t = {steps:3}: ⟨ZZ⟩({t}, {tp}) = {re:+.6} {im:+.6}i");
    }

    let exact = ExactCorrelator::new(&h, &h)?;
    println!("dense:         ⟨H⟩({t}, {tp}) = {:.6}", exact.eval(t, tp));
    for shots in [1_000, 15_000, 200_000] {
        let c = CircuitCorrelator::new(&h, &h, ShotConfig::finite(shots, 100, 1))?;
        println!("M_s = {shots:6}: ⟨H⟩({t}, {tp}) = {:.6}", c.eval(t, tp));
    }
    Ok(())
}
