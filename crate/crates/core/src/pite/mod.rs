//! Pseudo-imaginary-time filtering of two-time correlators.
//!
//! The filter `G(H) = ∫ g(t) e^{−iHt} dt` with a Lorentzian-times-Gaussian
//! kernel approximates `e^{−βH}` once `H` is shifted by `E0` below the ground
//! state. Expectation values under the filtered state are double time
//! integrals of correlators, estimated either by Monte Carlo sampling from
//! `g` or on a quantics grid as contractions of tensor trains.

pub mod bounds;
pub mod kernel;
pub mod mc;
pub mod qtt;
pub mod quad;
pub mod sampler;
pub mod scan;

pub use bounds::{check_bounds, BoundCheck};
pub use kernel::{g_of_omega, g_truncated_of_omega, gamma_g, gamma_t, kernel_g, KernelParams};
pub use mc::{mc_estimate, McEstimate, McSamples};
pub use qtt::{build_phase_tt, learn_kernel_tt, time_grid, tt_estimate};
pub use sampler::KernelSampler;
pub use scan::{energy_scan, mc_energy_scan, EnergyScan, EnergyScanResult, EstimatorOutput};
