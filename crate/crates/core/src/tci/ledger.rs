use std::collections::HashMap;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::tt::{TensorTrain, C64};

/// Every point a cross interpolation evaluated, in first-evaluation order.
///
/// Indices are unique; re-requests are served from the ledger and never
/// reach the target function a second time.
#[derive(Debug, Clone, Default)]
pub struct MeasurementLedger {
    indices: Vec<Vec<usize>>,
    values: Vec<C64>,
    lookup: HashMap<Vec<usize>, usize>,
}

impl PartialEq for MeasurementLedger {
    fn eq(&self, other: &Self) -> bool {
        self.indices == other.indices && self.values == other.values
    }
}

impl MeasurementLedger {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a ledger from explicit points. Duplicate indices are rejected.
    pub fn from_points(points: impl IntoIterator<Item = (Vec<usize>, C64)>) -> Result<Self> {
        let mut ledger = Self::new();
        for (idx, v) in points {
            if ledger.get(&idx).is_some() {
                return Err(Error::domain(format!("duplicate ledger index {idx:?}")));
            }
            ledger.insert(idx, v);
        }
        Ok(ledger)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, index: &[usize]) -> Option<C64> {
        self.lookup.get(index).map(|&i| self.values[i])
    }

    pub(crate) fn insert(&mut self, index: Vec<usize>, value: C64) {
        debug_assert!(!self.lookup.contains_key(&index));
        self.lookup.insert(index.clone(), self.values.len());
        self.indices.push(index);
        self.values.push(value);
    }

    pub fn indices(&self) -> &[Vec<usize>] {
        &self.indices
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[usize], C64)> + '_ {
        self.indices.iter().map(Vec::as_slice).zip(self.values.iter().copied())
    }

    /// Arity of the stored indices, if any are stored.
    pub fn arity(&self) -> Option<usize> {
        self.indices.first().map(Vec::len)
    }

    /// `max |z_i|`, the normalization of the interpolation error.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// CSV with columns `s1..sL,re,im`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let arity = self.arity().unwrap_or(0);
        let mut header: Vec<String> = (1..=arity).map(|l| format!("s{l}")).collect();
        header.push("re".into());
        header.push("im".into());
        writeln!(w, "{}", header.join(","))?;
        for (idx, v) in self.iter() {
            let mut line = String::new();
            for s in idx {
                line.push_str(&s.to_string());
                line.push(',');
            }
            line.push_str(&format!("{},{}", v.re, v.im));
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines.next().ok_or_else(|| Error::Format("empty ledger CSV".into()))??;
        let cols = header.split(',').count();
        if cols < 2 {
            return Err(Error::Format("ledger CSV needs re and im columns".into()));
        }
        let mut points = Vec::new();
        for (n, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != cols {
                return Err(Error::Format(format!("row {} has {} fields", n + 2, fields.len())));
            }
            let bad = |e: &dyn std::fmt::Display| Error::Format(format!("row {}: {e}", n + 2));
            let idx = fields[..cols - 2]
                .iter()
                .map(|f| f.parse::<usize>().map_err(|e| bad(&e)))
                .collect::<Result<Vec<_>>>()?;
            let re = fields[cols - 2].parse::<f64>().map_err(|e| bad(&e))?;
            let im = fields[cols - 1].parse::<f64>().map_err(|e| bad(&e))?;
            points.push((idx, C64::new(re, im)));
        }
        Self::from_points(points)
    }
}

/// `max_i |z_i − tt(σ_i)| / max_i |z_i|` over the ledger; zero for an
/// all-zero ledger.
pub fn error_estimate(tt: &TensorTrain, ledger: &MeasurementLedger) -> Result<f64> {
    if ledger.is_empty() {
        return Err(Error::domain("error estimate needs a nonempty ledger"));
    }
    let norm = ledger.max_abs();
    let mut worst = 0.0f64;
    for (idx, z) in ledger.iter() {
        worst = worst.max((tt.evaluate(idx)? - z).norm());
    }
    Ok(if norm > 0.0 { worst / norm } else { worst })
}
