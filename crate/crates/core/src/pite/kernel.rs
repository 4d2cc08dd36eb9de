use serde::Serialize;
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

use super::quad;

/// Quadrature target for normalization constants and oracles.
pub const QUAD_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelParams {
    pub beta: f64,
    pub tau: f64,
    /// Integration half-range `T`.
    pub t_max: f64,
}

impl KernelParams {
    pub fn new(beta: f64, tau: f64, t_max: f64) -> Result<Self> {
        let p = Self { beta, tau, t_max };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("beta", self.beta), ("tau", self.tau), ("T", self.t_max)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::domain(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    pub fn g(&self, t: f64) -> f64 {
        kernel_g(t, self)
    }

    /// `C = ∫_{−T}^{T} g(t) dt`.
    pub fn normalization(&self) -> f64 {
        quad::integrate(|t| self.g(t), -self.t_max, self.t_max, QUAD_TOL)
    }
}

/// Lorentzian times Gaussian: `(1/π) β/(β²+t²) e^{−(β²+t²)/(2τ²)}`.
pub fn kernel_g(t: f64, p: &KernelParams) -> f64 {
    let s = p.beta * p.beta + t * t;
    std::f64::consts::FRAC_1_PI * p.beta / s * (-s / (2.0 * p.tau * p.tau)).exp()
}

/// Fourier transform `∫ g(t) e^{−iωt} dt` in closed form.
pub fn g_of_omega(omega: f64, beta: f64, tau: f64) -> f64 {
    let r = std::f64::consts::SQRT_2 * tau;
    [1.0, -1.0]
        .iter()
        .map(|&eta| {
            let arg = (beta + eta * omega * tau * tau) / r;
            // e^{ηβω} erfc(·) overflows separately for large |ω|; combine in log space.
            let e = erfc(arg);
            if e == 0.0 {
                0.0
            } else {
                0.5 * (eta * beta * omega + e.ln()).exp()
            }
        })
        .sum()
}

/// `e^{−ΔE²τ²/2}`, valid when `ΔE ≥ β/τ²`.
pub fn gamma_g(delta_e: f64, tau: f64) -> f64 {
    (-delta_e * delta_e * tau * tau / 2.0).exp()
}

/// `√2 τ/(√π β) e^{−T²/(2τ²)}`.
pub fn gamma_t(beta: f64, tau: f64, t_max: f64) -> f64 {
    std::f64::consts::SQRT_2 * tau / (std::f64::consts::PI.sqrt() * beta) * (-t_max * t_max / (2.0 * tau * tau)).exp()
}

/// `∫_{−T}^{T} g(t) e^{−iωt} dt`; real because g is even.
pub fn g_truncated_of_omega(omega: f64, p: &KernelParams) -> f64 {
    2.0 * quad::integrate(|t| p.g(t) * (omega * t).cos(), 0.0, p.t_max, QUAD_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table1() -> KernelParams {
        KernelParams::new(1.0, 2.0, 2.0).unwrap()
    }

    #[test]
    fn kernel_values() {
        let p = table1();
        // (1/π) e^{−1/8} and (1/π)(1/5) e^{−5/8}.
        assert!((p.g(0.0) - 0.28090748861925036).abs() < 1e-15);
        assert!((p.g(2.0) - 0.034075800878090604).abs() < 1e-15);
        assert_eq!(p.g(-1.3), p.g(1.3));
        assert!(KernelParams::new(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn fourier_transform_closed_form() {
        assert!((g_of_omega(0.0, 1.0, 2.0) - 0.6170750774519739).abs() < 1e-12);
        assert!(g_of_omega(10.0, 1.0, 2.0) < 1e-3);
        let wide = KernelParams::new(1.0, 2.0, 100.0).unwrap();
        for w in [0.0, 1.0, 2.0] {
            assert!((g_truncated_of_omega(w, &wide) - g_of_omega(w, 1.0, 2.0)).abs() < 1e-8);
        }
        assert!(g_of_omega(-400.0, 1.0, 2.0).is_finite());
    }

    #[test]
    fn bound_constants() {
        assert!((gamma_g(1.0, 2.0) - (-2.0f64).exp()).abs() < 1e-15);
        assert!((gamma_g(1.0, 2.0) - 0.1353352832366127).abs() < 1e-15);
        assert!((gamma_t(1.0, 2.0, 2.0) - 0.9678828980765734).abs() < 1e-13);
        assert_eq!(gamma_g(0.0, 3.0), 1.0);
    }
}
