use serde::Serialize;

use crate::error::{Error, Result};
use crate::qsim::Spectrum;

use super::kernel::{g_of_omega, g_truncated_of_omega, gamma_g, gamma_t, KernelParams};

/// Spectral norms of the filter errors for `H = H̄ − E0`, next to their bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundCheck {
    pub e0: f64,
    pub delta_e: f64,
    /// `‖G(H) − e^{−βH}‖₂`.
    pub filter_error: f64,
    pub gamma_g: f64,
    /// `‖G_T(H) − G(H)‖₂`.
    pub truncation_error: f64,
    pub gamma_t: f64,
}

impl BoundCheck {
    pub fn holds(&self) -> bool {
        self.filter_error <= self.gamma_g && self.truncation_error <= self.gamma_t
    }
}

/// Assembles `G(H)`, `e^{−βH}` and `G_T(H)` as dense operators and measures
/// their differences. Requires `E_g − E0 ≥ β/τ²`.
pub fn check_bounds(spectrum: &Spectrum, e0: f64, p: &KernelParams) -> Result<BoundCheck> {
    p.validate()?;
    let delta_e = spectrum.ground_energy() - e0;
    if delta_e < p.beta / (p.tau * p.tau) {
        return Err(Error::domain(format!("ΔE = {delta_e} is below β/τ² = {}", p.beta / (p.tau * p.tau))));
    }
    let g = spectrum.apply_function(|l| g_of_omega(l - e0, p.beta, p.tau));
    let boltzmann = spectrum.apply_function(|l| (-p.beta * (l - e0)).exp());
    let truncated = spectrum.apply_function(|l| g_truncated_of_omega(l - e0, p));
    Ok(BoundCheck {
        e0,
        delta_e,
        filter_error: (&g - &boltzmann).singular_values().max(),
        gamma_g: gamma_g(delta_e, p.tau),
        truncation_error: (&truncated - &g).singular_values().max(),
        gamma_t: gamma_t(p.beta, p.tau, p.t_max),
    })
}
