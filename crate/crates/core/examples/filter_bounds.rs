//! The pseudo-imaginary-time kernel, its Fourier transform, and the
//! operator-level error bounds against e^{−βH}.

use qttfit::pite::{check_bounds, g_of_omega, g_truncated_of_omega, KernelParams};
use qttfit::qsim::{build_tfim, Spectrum};

fn main() -> qttfit::Result<()> {
    let p = KernelParams::new(1.0, 2.0, 2.0)?;
    println!("g(0) = {:.10}, g(T) = {:.10}, C = {:.10}", p.g(0.0), p.g(p.t_max), p.normalization());
    for w in [0.0, 0.5, 1.0, 2.0, 4.0] {
        println!(
            "ω = {w}: G(ω) = {:.6}, G_T(ω) = {:.6}, e^(−βω) = {:.6}",
            g_of_omega(w, p.beta, p.tau),
            g_truncated_of_omega(w, &p),
            (-p.beta * w).exp()
        );
    }
    let spectrum = Spectrum::new(&build_tfim(2, 1.2)?)?;
    for de in [0.25, 0.5, 1.0, 1.5, 2.0] {
        let c = check_bounds(&spectrum, spectrum.ground_energy() - de, &p)?;
        println!(
            "ΔE = {de}: ‖G − e^(−βH)‖ = {:.3e} ≤ γ_G = {:.3e};  ‖G_T − G‖ = {:.3e} ≤ γ_T = {:.3e}",
            c.filter_error, c.gamma_g, c.truncation_error, c.gamma_t
        );
    }
    Ok(())
}
