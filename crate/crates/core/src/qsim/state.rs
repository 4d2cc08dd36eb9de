use crate::error::{Error, Result};
use crate::tt::C64;

use super::pauli::PauliString;

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Dense register; qubit `q` is bit `q` of the basis index, qubit 0 the ancilla.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<C64>,
}

impl StateVector {
    pub fn zero(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > 26 {
            return Err(Error::domain(format!("{n_qubits} qubits out of range")));
        }
        let mut amps = vec![C64::new(0.0, 0.0); 1 << n_qubits];
        amps[0] = C64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let n = amps.len();
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::shape(format!("{n} amplitudes is not a register")));
        }
        Ok(Self { n_qubits: n.trailing_zeros() as usize, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn h(&mut self, q: usize) {
        let bit = 1 << q;
        for x in 0..self.amps.len() {
            if x & bit == 0 {
                let (a, b) = (self.amps[x], self.amps[x | bit]);
                self.amps[x] = (a + b) * FRAC_1_SQRT_2;
                self.amps[x | bit] = (a - b) * FRAC_1_SQRT_2;
            }
        }
    }

    pub fn x(&mut self, q: usize) {
        let bit = 1 << q;
        for x in 0..self.amps.len() {
            if x & bit == 0 {
                self.amps.swap(x, x | bit);
            }
        }
    }

    pub fn s_dag(&mut self, q: usize) {
        let bit = 1 << q;
        for (x, a) in self.amps.iter_mut().enumerate() {
            if x & bit != 0 {
                *a *= C64::new(0.0, -1.0);
            }
        }
    }

    /// `P` on the sites starting at qubit `shift`, optionally controlled.
    pub fn pauli(&mut self, p: &PauliString, shift: usize, control: Option<usize>) {
        debug_assert!(p.len() + shift <= self.n_qubits);
        let m = p.masks(shift);
        let cbit = control.map_or(0, |c| 1 << c);
        if m.flip == 0 {
            for (x, a) in self.amps.iter_mut().enumerate() {
                if x & cbit == cbit {
                    *a *= m.phase(x);
                }
            }
            return;
        }
        let high = 1usize << (usize::BITS - 1 - m.flip.leading_zeros());
        for x in 0..self.amps.len() {
            if x & cbit != cbit || x & high != 0 {
                continue;
            }
            let y = x ^ m.flip;
            let (ax, ay) = (self.amps[x], self.amps[y]);
            self.amps[x] = m.phase(y) * ay;
            self.amps[y] = m.phase(x) * ax;
        }
    }

    /// `e^{−iθP} = cos θ − i sin θ P` on the sites starting at qubit `shift`,
    /// acting only where the control qubit is 1 when given.
    pub fn rotation(&mut self, p: &PauliString, shift: usize, theta: f64, control: Option<usize>) {
        debug_assert!(p.len() + shift <= self.n_qubits);
        let m = p.masks(shift);
        let cbit = control.map_or(0, |c| 1 << c);
        let (c, s) = (theta.cos(), theta.sin());
        let mis = C64::new(0.0, -s);
        if m.flip == 0 {
            for (x, a) in self.amps.iter_mut().enumerate() {
                if x & cbit == cbit {
                    *a *= c + mis * m.phase(x);
                }
            }
            return;
        }
        let high = 1usize << (usize::BITS - 1 - m.flip.leading_zeros());
        for x in 0..self.amps.len() {
            if x & cbit != cbit || x & high != 0 {
                continue;
            }
            let y = x ^ m.flip;
            let (ax, ay) = (self.amps[x], self.amps[y]);
            // (Pψ)[x] = phase(y) ψ[y], (Pψ)[y] = phase(x) ψ[x].
            self.amps[x] = ax * c + mis * m.phase(y) * ay;
            self.amps[y] = ay * c + mis * m.phase(x) * ax;
        }
    }

    /// Probability that qubit `q` reads 0.
    pub fn prob_zero(&self, q: usize) -> f64 {
        let bit = 1 << q;
        self.amps
            .iter()
            .enumerate()
            .filter(|(x, _)| x & bit == 0)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    pub fn inner(&self, other: &Self) -> C64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }
}
