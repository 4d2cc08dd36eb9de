use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::tt::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

/// Tensor product of single-qubit Paulis; letter `k` acts on site `k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString(Vec<Pauli>);

impl PauliString {
    pub fn new(letters: Vec<Pauli>) -> Result<Self> {
        if letters.is_empty() || letters.len() > 62 {
            return Err(Error::domain(format!("Pauli string length {} out of range", letters.len())));
        }
        Ok(Self(letters))
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(vec![Pauli::I; n])
    }

    /// Identity except `p` at each listed site.
    pub fn with(n: usize, sites: &[(usize, Pauli)]) -> Result<Self> {
        let mut v = vec![Pauli::I; n];
        for &(k, p) in sites {
            if k >= n {
                return Err(Error::domain(format!("site {k} outside {n} sites")));
            }
            v[k] = p;
        }
        Self::new(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|&p| p == Pauli::I)
    }

    /// Only I and Z letters.
    pub fn is_diagonal(&self) -> bool {
        self.0.iter().all(|&p| matches!(p, Pauli::I | Pauli::Z))
    }

    /// Bit masks on a register where site `k` is qubit `k + shift`.
    pub(crate) fn masks(&self, shift: usize) -> Masks {
        let mut m = Masks { flip: 0, sign: 0, n_y: 0 };
        for (k, &p) in self.0.iter().enumerate() {
            let bit = 1usize << (k + shift);
            match p {
                Pauli::I => {}
                Pauli::X => m.flip |= bit,
                Pauli::Y => {
                    m.flip |= bit;
                    m.sign |= bit;
                    m.n_y += 1;
                }
                Pauli::Z => m.sign |= bit,
            }
        }
        m
    }

    /// Dense `2^n × 2^n` matrix with site `k` on bit `k` of the basis index.
    pub fn to_dense(&self) -> DMatrix<C64> {
        let dim = 1usize << self.len();
        let m = self.masks(0);
        let mut out = DMatrix::zeros(dim, dim);
        for x in 0..dim {
            out[(x ^ m.flip, x)] = m.phase(x);
        }
        out
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Masks {
    pub flip: usize,
    pub sign: usize,
    pub n_y: u32,
}

impl Masks {
    /// `⟨x ⊕ flip| P |x⟩ = i^{n_Y} (−1)^{|x ∧ sign|}`.
    #[inline]
    pub fn phase(&self, x: usize) -> C64 {
        let base = match self.n_y % 4 {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        };
        if (x & self.sign).count_ones() % 2 == 1 {
            -base
        } else {
            base
        }
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c.to_ascii_uppercase() {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                _ => Err(Error::domain(format!("invalid Pauli letter {c:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .and_then(Self::new)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.0 {
            let c = match p {
                Pauli::I => 'I',
                Pauli::X => 'X',
                Pauli::Y => 'Y',
                Pauli::Z => 'Z',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Real linear combination of Pauli strings.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliHamiltonian {
    n_sites: usize,
    terms: Vec<(f64, PauliString)>,
}

impl PauliHamiltonian {
    pub fn new(n_sites: usize, terms: Vec<(f64, PauliString)>) -> Result<Self> {
        if let Some((_, p)) = terms.iter().find(|(_, p)| p.len() != n_sites) {
            return Err(Error::shape(format!("term {p} does not act on {n_sites} sites")));
        }
        if terms.iter().any(|(c, _)| !c.is_finite()) {
            return Err(Error::domain("non-finite coefficient"));
        }
        Ok(Self { n_sites, terms })
    }

    /// The identity observable.
    pub fn identity(n_sites: usize) -> Result<Self> {
        Self::new(n_sites, vec![(1.0, PauliString::identity(n_sites)?)])
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    pub fn is_traceless(&self) -> bool {
        self.terms.iter().all(|(c, p)| *c == 0.0 || !p.is_identity())
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let dim = 1usize << self.n_sites;
        let mut out = DMatrix::zeros(dim, dim);
        for (c, p) in &self.terms {
            out += p.to_dense() * C64::new(*c, 0.0);
        }
        out
    }
}

/// `−(2−λ) Σ Z_i Z_{i+1} − λ Σ X_i` on an open chain.
pub fn build_tfim(n_sites: usize, lambda: f64) -> Result<PauliHamiltonian> {
    if n_sites < 2 {
        return Err(Error::domain(format!("TFIM needs at least 2 sites, got {n_sites}")));
    }
    let mut terms = Vec::new();
    let j = 2.0 - lambda;
    if j != 0.0 {
        for i in 0..n_sites - 1 {
            terms.push((-j, PauliString::with(n_sites, &[(i, Pauli::Z), (i + 1, Pauli::Z)])?));
        }
    }
    if lambda != 0.0 {
        for i in 0..n_sites {
            terms.push((-lambda, PauliString::with(n_sites, &[(i, Pauli::X)])?));
        }
    }
    PauliHamiltonian::new(n_sites, terms)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tfim_terms() {
        let h = build_tfim(2, 1.2).unwrap();
        let shown: Vec<(f64, String)> = h.terms().iter().map(|(c, p)| (*c, p.to_string())).collect();
        assert_eq!(shown.len(), 3);
        assert!((shown[0].0 + 0.8).abs() < 1e-15 && shown[0].1 == "ZZ");
        assert_eq!((shown[1].0, shown[1].1.as_str()), (-1.2, "XI"));
        assert_eq!((shown[2].0, shown[2].1.as_str()), (-1.2, "IX"));
        assert!(build_tfim(5, 2.0).unwrap().terms().iter().all(|(_, p)| !p.is_diagonal()));
        assert!(build_tfim(5, 0.0).unwrap().terms().iter().all(|(_, p)| p.is_diagonal()));
        assert!(build_tfim(1, 1.0).is_err());
        assert!(h.is_traceless());
    }

    #[test]
    fn dense_matrices_are_the_paulis() {
        let y: PauliString = "Y".parse().unwrap();
        let m = y.to_dense();
        assert_eq!(m[(1, 0)], C64::new(0.0, 1.0));
        assert_eq!(m[(0, 1)], C64::new(0.0, -1.0));
        // XZ (X on site 0) = X ⊗ Z in bit order: site 0 is the low bit.
        let xz: PauliString = "XZ".parse().unwrap();
        let d = xz.to_dense();
        assert_eq!(d[(1, 0)], C64::new(1.0, 0.0));
        assert_eq!(d[(3, 2)], C64::new(-1.0, 0.0));
        assert!("XQ".parse::<PauliString>().is_err());
    }

    #[test]
    fn pauli_strings_square_to_one() {
        for s in ["XYZ", "YYI", "ZIX"] {
            let p: PauliString = s.parse().unwrap();
            let m = p.to_dense();
            let sq = &m * &m;
            assert!((sq - DMatrix::<C64>::identity(8, 8)).norm() < 1e-14);
        }
    }
}
