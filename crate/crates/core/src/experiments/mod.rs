//! End-to-end runs behind the command-line driver.
//!
//! Each run takes a [`RunConfig`], is deterministic given its seed, and
//! returns a report that can write CSV series and a JSON summary embedding
//! the resolved config.

pub mod bonds;
pub mod config;
pub mod correlators;
pub mod energy;
pub mod sine;

use std::path::Path;

use serde::Serialize;

use crate::error::Result;

pub use bonds::{bonddim_scan, BonddimReport};
pub use config::{Command, Method, RunConfig};
pub use correlators::{corr_learn, learn_correlators, CorrLearnReport, Observable, PhysicsSetup};
pub use energy::{exact_energy_scan, gs_energy, GsEnergyReport};
pub use sine::{sine_demo, sine_trial, SineDemoReport, SineSetup, SineTrial};

pub(crate) fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

/// Running mean and (sample) standard deviation.
#[derive(Debug, Clone, Copy, Default)]
pub struct Mean {
    n: usize,
    sum: f64,
    sum_sq: f64,
}

impl Mean {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    pub fn count(&self) -> usize {
        self.n
    }

    pub fn mean(&self) -> f64 {
        if self.n == 0 {
            f64::NAN
        } else {
            self.sum / self.n as f64
        }
    }

    pub fn std(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let m = self.mean();
        ((self.sum_sq - self.n as f64 * m * m).max(0.0) / (self.n - 1) as f64).sqrt()
    }
}
