use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::tt::C64;

use super::pauli::PauliHamiltonian;

/// Largest system diagonalized densely.
pub const MAX_DENSE_SITES: usize = 12;

fn check_size(n: usize) -> Result<()> {
    if n > MAX_DENSE_SITES {
        return Err(Error::domain(format!("{n} sites exceeds the dense limit {MAX_DENSE_SITES}")));
    }
    Ok(())
}

/// Eigendecomposition `H = V diag(λ) V†`, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: DMatrix<C64>,
}

impl Spectrum {
    pub fn new(h: &PauliHamiltonian) -> Result<Self> {
        check_size(h.n_sites())?;
        Ok(Self::of_hermitian(h.to_dense()))
    }

    pub fn of_hermitian(m: DMatrix<C64>) -> Self {
        let eig = m.symmetric_eigen();
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = DMatrix::from_fn(m_dim(&eig.eigenvectors), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
        Self { values, vectors }
    }

    pub fn ground_energy(&self) -> f64 {
        self.values[0]
    }

    /// `V f(λ) V†` for a real spectral function.
    pub fn apply_function(&self, f: impl Fn(f64) -> f64) -> DMatrix<C64> {
        let mut scaled = self.vectors.clone();
        for (j, &l) in self.values.iter().enumerate() {
            scaled.column_mut(j).scale_mut(f(l));
        }
        scaled * self.vectors.adjoint()
    }

    /// `e^{−iHt} ψ`.
    pub fn evolve(&self, psi: &[C64], t: f64) -> Vec<C64> {
        let c = self.vectors.adjoint() * DVector::from_column_slice(psi);
        let phased = DVector::from_fn(c.len(), |j, _| c[j] * C64::from_polar(1.0, -self.values[j] * t));
        (&self.vectors * phased).iter().copied().collect()
    }
}

fn m_dim(m: &DMatrix<C64>) -> usize {
    m.nrows()
}

/// Smallest eigenvalue of the dense Hamiltonian.
pub fn exact_ground_energy(h: &PauliHamiltonian) -> Result<f64> {
    Ok(Spectrum::new(h)?.ground_energy())
}

/// `|+⟩^{⊗n}`, the circuit's initial system state.
pub fn plus_state(n_sites: usize) -> Vec<C64> {
    let dim = 1usize << n_sites;
    vec![C64::new((dim as f64).sqrt().recip(), 0.0); dim]
}

/// Noise-free `⟨Ψ| e^{iHt'} O e^{−iHt} |Ψ⟩` from the eigenbasis.
#[derive(Debug, Clone)]
pub struct ExactCorrelator {
    values: Vec<f64>,
    coeffs: DVector<C64>,
    observable: DMatrix<C64>,
}

impl ExactCorrelator {
    pub fn new(h: &PauliHamiltonian, observable: &PauliHamiltonian) -> Result<Self> {
        if observable.n_sites() != h.n_sites() {
            return Err(Error::shape("observable and Hamiltonian sizes differ"));
        }
        let spec = Spectrum::new(h)?;
        let psi = DVector::from_vec(plus_state(h.n_sites()));
        let coeffs = spec.vectors.adjoint() * psi;
        let observable = spec.vectors.adjoint() * observable.to_dense() * &spec.vectors;
        Ok(Self { values: spec.values, coeffs, observable })
    }

    fn ket(&self, t: f64) -> DVector<C64> {
        DVector::from_fn(self.coeffs.len(), |j, _| self.coeffs[j] * C64::from_polar(1.0, -self.values[j] * t))
    }

    pub fn eval(&self, t: f64, tp: f64) -> C64 {
        let right = &self.observable * self.ket(t);
        self.ket(tp).dotc(&right)
    }

    /// `out[(i, j)] = corr(ts[i], tps[j])`.
    pub fn grid(&self, ts: &[f64], tps: &[f64]) -> DMatrix<C64> {
        let right: Vec<DVector<C64>> = ts.iter().map(|&t| &self.observable * self.ket(t)).collect();
        let left: Vec<DVector<C64>> = tps.iter().map(|&t| self.ket(t)).collect();
        DMatrix::from_fn(ts.len(), tps.len(), |i, j| left[j].dotc(&right[i]))
    }
}

pub fn exact_correlation(h: &PauliHamiltonian, observable: &PauliHamiltonian, t: f64, tp: f64) -> Result<C64> {
    Ok(ExactCorrelator::new(h, observable)?.eval(t, tp))
}
