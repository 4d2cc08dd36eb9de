//! Monte Carlo estimate of the filtered double time integral, sampling
//! times from the kernel itself.

use qttfit::pite::{g_truncated_of_omega, mc_estimate, KernelParams};
use qttfit::C64;

fn main() -> qttfit::Result<()> {
    let p = KernelParams::new(1.0, 2.0, 2.0)?;
    let e0 = 1.0;
    let want = g_truncated_of_omega(e0, &p).powi(2);
    println!("quadrature: {want:.6}");
    for n in [100, 1_000, 10_000, 100_000] {
        let est = mc_estimate(|_, _| C64::new(1.0, 0.0), &p, e0, n, 42)?;
        println!("N = {n:6}: {:.6} ± {:.1e} (|error| {:.1e})", est.re, est.std_error, (est.value() - want).norm());
    }
    Ok(())
}
