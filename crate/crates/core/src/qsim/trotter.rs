use crate::error::{Error, Result};

use super::pauli::{PauliHamiltonian, PauliString};
use super::state::StateVector;

/// `e^{−iθP}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliRotation {
    pub string: PauliString,
    pub theta: f64,
}

impl PauliRotation {
    /// Applies to the sites starting at qubit `shift`.
    pub fn apply(&self, state: &mut StateVector, shift: usize, control: Option<usize>) {
        state.rotation(&self.string, shift, self.theta, control);
    }
}

/// First-order product formula for `e^{−iHt}`: `N_t` repetitions of the
/// diagonal (ZZ) terms followed by the off-diagonal (X) terms, `θ = c t / N_t`.
pub fn trotter_step_sequence(h: &PauliHamiltonian, t: f64, steps: usize) -> Result<Vec<PauliRotation>> {
    if steps == 0 {
        return Err(Error::domain("trotter_steps must be at least 1"));
    }
    let dt = t / steps as f64;
    let layer: Vec<PauliRotation> = h
        .terms()
        .iter()
        .filter(|(_, p)| p.is_diagonal())
        .chain(h.terms().iter().filter(|(_, p)| !p.is_diagonal()))
        .filter(|(c, _)| *c != 0.0)
        .map(|(c, p)| PauliRotation { string: p.clone(), theta: c * dt })
        .collect();
    Ok(layer.iter().cycle().take(layer.len() * steps).cloned().collect())
}

pub fn apply_sequence(seq: &[PauliRotation], state: &mut StateVector, shift: usize, control: Option<usize>) {
    for g in seq {
        g.apply(state, shift, control);
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::qsim::build_tfim;
    use crate::qsim::exact::Spectrum;
    use crate::tt::C64;

    pub(crate) fn commutator_norm(h: &crate::qsim::PauliHamiltonian) -> f64 {
        let dim = 1 << h.n_sites();
        let mut a = nalgebra::DMatrix::<C64>::zeros(dim, dim);
        let mut b = a.clone();
        for (c, p) in h.terms() {
            let m = p.to_dense() * C64::new(*c, 0.0);
            if p.is_diagonal() {
                a += m;
            } else {
                b += m;
            }
        }
        (&a * &b - &b * &a).singular_values().max()
    }

    fn plus_state(n: usize) -> StateVector {
        let mut st = StateVector::zero(n).unwrap();
        for q in 0..n {
            st.h(q);
        }
        st
    }

    fn trotter_error(steps: usize) -> f64 {
        let h = build_tfim(2, 1.2).unwrap();
        let mut st = StateVector::from_amplitudes(vec![
            C64::new(0.1, 0.5),
            C64::new(-0.3, 0.2),
            C64::new(0.6, -0.1),
            C64::new(0.2, 0.3),
        ])
        .unwrap();
        let norm = st.norm();
        st = StateVector::from_amplitudes(st.amplitudes().iter().map(|a| a / norm).collect()).unwrap();
        let exact = Spectrum::new(&h).unwrap().evolve(st.amplitudes(), 0.5);
        apply_sequence(&trotter_step_sequence(&h, 0.5, steps).unwrap(), &mut st, 0, None);
        st.amplitudes().iter().zip(&exact).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn zero_time_is_identity() {
        let h = build_tfim(3, 1.2).unwrap();
        let mut st = plus_state(3);
        let before = st.clone();
        apply_sequence(&trotter_step_sequence(&h, 0.0, 7).unwrap(), &mut st, 0, None);
        assert_eq!(st, before);
        assert!(trotter_step_sequence(&h, 1.0, 0).is_err());
    }

    #[test]
    fn matches_dense_evolution() {
        // First-order bound ‖e^{−i(A+B)t} − (e^{−iAt/N}e^{−iBt/N})^N‖ ≤ t²‖[A,B]‖/(2N).
        let h = build_tfim(2, 1.2).unwrap();
        let bound = 0.25 * commutator_norm(&h) / 200.0;
        assert!(trotter_error(100) <= bound, "{} > {bound}", trotter_error(100));
        assert!(trotter_error(400) <= 5e-4);
    }

    #[test]
    fn error_is_first_order() {
        let ratios: Vec<f64> = [25, 50, 100].iter().map(|&n| trotter_error(n) / trotter_error(2 * n)).collect();
        for r in ratios {
            assert!((r - 2.0).abs() < 0.2, "{r}");
        }
    }

    #[test]
    fn diagonal_layer_comes_first() {
        let h = build_tfim(3, 1.2).unwrap();
        let seq = trotter_step_sequence(&h, 1.0, 2).unwrap();
        assert_eq!(seq.len(), 10);
        assert!(seq[0].string.is_diagonal() && seq[1].string.is_diagonal() && !seq[2].string.is_diagonal());
        assert!((seq[0].theta + 0.4).abs() < 1e-15);
    }
}
