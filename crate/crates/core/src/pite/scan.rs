use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quantics::QuanticsGrid;
use crate::tt::{TensorTrain, TruncationSpec, C64};

use super::mc::McSamples;
use super::qtt::{integrate_with_phase, weighted_correlator};

/// Denominators below this magnitude are flagged and excluded from the minimum.
pub const DENOMINATOR_FLOOR: f64 = 1e-12;

/// `N_{E0} + 1` equally spaced values spanning `center ± half_width`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyScan {
    pub center: f64,
    pub half_width: f64,
    pub steps: usize,
}

impl EnergyScan {
    pub fn new(center: f64, half_width: f64, steps: usize) -> Result<Self> {
        let s = Self { center, half_width, steps };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.half_width > 0.0 && self.half_width.is_finite()) || !self.center.is_finite() {
            return Err(Error::domain("scan needs a finite center and positive half-width"));
        }
        if self.steps == 0 {
            return Err(Error::domain("scan needs at least one step"));
        }
        Ok(())
    }

    /// Written as `center + E(2k/N − 1)` so that an even `N` hits the center exactly.
    pub fn grid(&self) -> Vec<f64> {
        (0..=self.steps)
            .map(|k| self.center + self.half_width * (2.0 * k as f64 / self.steps as f64 - 1.0))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorOutput {
    pub e0: f64,
    pub numerator: C64,
    pub denominator: C64,
    /// `numerator / denominator`; NaN when flagged.
    pub ratio: C64,
    pub flagged: bool,
}

impl EstimatorOutput {
    pub fn new(e0: f64, numerator: C64, denominator: C64) -> Self {
        let flagged = !(denominator.norm() >= DENOMINATOR_FLOOR);
        let ratio = if flagged { C64::new(f64::NAN, f64::NAN) } else { numerator / denominator };
        Self { e0, numerator, denominator, ratio, flagged }
    }
}

#[derive(Debug, Clone)]
pub struct EnergyScanResult {
    pub points: Vec<EstimatorOutput>,
    /// `min Re Ê(E0)` over unflagged points.
    pub estimate: f64,
    /// Position of the minimizer in `points`.
    pub argmin: usize,
    /// Numerator and denominator evaluation counts.
    pub evaluations: (usize, usize),
}

impl EnergyScanResult {
    pub fn from_points(points: Vec<EstimatorOutput>, evaluations: (usize, usize)) -> Result<Self> {
        let (argmin, estimate) = points
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.flagged && p.ratio.re.is_finite())
            .map(|(i, p)| (i, p.ratio.re))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .ok_or_else(|| Error::domain("every scan point has a vanishing denominator"))?;
        Ok(Self { points, estimate, argmin, evaluations })
    }

    pub fn argmin_e0(&self) -> f64 {
        self.points[self.argmin].e0
    }

    pub fn num_flagged(&self) -> usize {
        self.points.iter().filter(|p| p.flagged).count()
    }

    pub fn relative_error(&self, reference: f64) -> f64 {
        ((self.estimate - reference) / reference).abs()
    }

    /// Columns `E0, re_num, im_num, re_den, im_den, re_ratio`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "E0,re_num,im_num,re_den,im_den,re_ratio")?;
        for p in &self.points {
            writeln!(
                w,
                "{:e},{:e},{:e},{:e},{:e},{:e}",
                p.e0, p.numerator.re, p.numerator.im, p.denominator.re, p.denominator.im, p.ratio.re
            )?;
        }
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_csv(&mut f)?;
        f.flush()?;
        Ok(())
    }
}

/// Scans `Ê(E0) = ⟨H̄⟩/⟨1⟩` with both integrands built from trains.
///
/// `kernel ⊙ corr` is formed once per observable; each E0 then costs a bond-1
/// phase product and two contractions.
pub fn energy_scan(
    numerator_tt: &TensorTrain,
    denominator_tt: &TensorTrain,
    kernel_tt: &TensorTrain,
    scan: &EnergyScan,
    grid: &QuanticsGrid,
    spec: TruncationSpec,
) -> Result<EnergyScanResult> {
    scan.validate()?;
    let num = weighted_correlator(numerator_tt, kernel_tt, grid, spec)?;
    let den = weighted_correlator(denominator_tt, kernel_tt, grid, spec)?;
    let points = scan
        .grid()
        .into_par_iter()
        .map(|e0| {
            let n = integrate_with_phase(&num, e0, grid, spec)?;
            let d = integrate_with_phase(&den, e0, grid, spec)?;
            Ok(EstimatorOutput::new(e0, n, d))
        })
        .collect::<Result<Vec<_>>>()?;
    EnergyScanResult::from_points(points, (0, 0))
}

/// The Monte Carlo ratio estimator over the same E0 grid, one draw per observable.
pub fn mc_energy_scan(numerator: &McSamples, denominator: &McSamples, scan: &EnergyScan) -> Result<EnergyScanResult> {
    scan.validate()?;
    let points = scan
        .grid()
        .into_iter()
        .map(|e0| EstimatorOutput::new(e0, numerator.estimate(e0).value(), denominator.estimate(e0).value()))
        .collect();
    EnergyScanResult::from_points(points, (numerator.len(), denominator.len()))
}
