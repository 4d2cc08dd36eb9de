use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::rng::{derive_seed_path, stream};
use crate::tt::C64;

use super::pauli::{PauliHamiltonian, PauliString};
use super::state::StateVector;

const ANCILLA: usize = 0;
const SYSTEM: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Part {
    Re,
    Im,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Shots {
    Exact,
    Finite(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct ShotConfig {
    pub shots: Shots,
    pub trotter_steps: usize,
    pub seed: u64,
}

impl ShotConfig {
    pub fn exact(trotter_steps: usize) -> Self {
        Self { shots: Shots::Exact, trotter_steps, seed: 0 }
    }

    pub fn finite(shots: u64, trotter_steps: usize, seed: u64) -> Self {
        Self { shots: Shots::Finite(shots), trotter_steps, seed }
    }

    fn validate(&self) -> Result<()> {
        if self.trotter_steps == 0 {
            return Err(Error::domain("trotter_steps must be at least 1"));
        }
        if self.shots == Shots::Finite(0) {
            return Err(Error::domain("shots must be at least 1"));
        }
        Ok(())
    }
}

/// Controlled first-order Trotter evolution without per-call allocation.
#[derive(Debug, Clone)]
struct Evolution {
    layer: Vec<(f64, PauliString)>,
    steps: usize,
}

impl Evolution {
    fn new(h: &PauliHamiltonian, steps: usize) -> Self {
        let layer = h
            .terms()
            .iter()
            .filter(|(_, p)| p.is_diagonal())
            .chain(h.terms().iter().filter(|(_, p)| !p.is_diagonal()))
            .filter(|(c, _)| *c != 0.0)
            .cloned()
            .collect();
        Self { layer, steps }
    }

    fn apply(&self, state: &mut StateVector, t: f64) {
        let dt = t / self.steps as f64;
        for _ in 0..self.steps {
            for (c, p) in &self.layer {
                state.rotation(p, SYSTEM, c * dt, Some(ANCILLA));
            }
        }
    }
}

/// The ancilla-controlled circuit measuring `⟨Ψ| V'†(t') O V(t) |Ψ⟩`, with
/// `V(t) = e^{−iHt}` Trotterized and `|Ψ⟩ = H^{⊗n}|0⟩`.
#[derive(Debug, Clone)]
pub struct HadamardCircuit {
    n_sites: usize,
    evolution: Evolution,
}

impl HadamardCircuit {
    pub fn new(h: &PauliHamiltonian, trotter_steps: usize) -> Result<Self> {
        if trotter_steps == 0 {
            return Err(Error::domain("trotter_steps must be at least 1"));
        }
        Ok(Self { n_sites: h.n_sites(), evolution: Evolution::new(h, trotter_steps) })
    }

    /// State after `H; c-V(t); X; c-V'(t'); X`, shared by every observable term.
    pub fn prefix(&self, t: f64, tp: f64) -> StateVector {
        let mut st = StateVector::zero(self.n_sites + 1).expect("size checked by Hamiltonian");
        for q in 0..=self.n_sites {
            st.h(q);
        }
        self.evolution.apply(&mut st, t);
        st.x(ANCILLA);
        self.evolution.apply(&mut st, tp);
        st.x(ANCILLA);
        st
    }

    /// Probability of reading 0 on the ancilla after `c-O` and the basis change.
    pub fn probability_zero(&self, prefix: &StateVector, o: &PauliString, part: Part) -> Result<f64> {
        if o.len() != self.n_sites {
            return Err(Error::shape(format!("observable {o} does not act on {} sites", self.n_sites)));
        }
        let mut st = prefix.clone();
        st.pauli(o, SYSTEM, Some(ANCILLA));
        if part == Part::Im {
            st.s_dag(ANCILLA);
        }
        st.h(ANCILLA);
        Ok(st.prob_zero(ANCILLA).clamp(0.0, 1.0))
    }
}

/// `2P₀ − 1`, exact or from `M_s` Binomial shots drawn from `rng_seed`.
pub fn estimate_from_probability(p0: f64, shots: Shots, rng_seed: u64) -> f64 {
    match shots {
        Shots::Exact => 2.0 * p0 - 1.0,
        Shots::Finite(m) => {
            let mut rng = stream(rng_seed);
            let k = Binomial::new(m, p0.clamp(0.0, 1.0)).expect("probability is clamped").sample(&mut rng);
            2.0 * (k as f64 / m as f64) - 1.0
        }
    }
}

fn shot_seed(seed: u64, t: f64, tp: f64, term: usize, part: Part) -> u64 {
    derive_seed_path(seed, &[t.to_bits(), tp.to_bits(), term as u64, part as u64])
}

/// Single Hadamard test for a unitary Pauli string `o`.
pub fn hadamard_test(h: &PauliHamiltonian, o: &PauliString, t: f64, tp: f64, part: Part, cfg: &ShotConfig) -> Result<f64> {
    cfg.validate()?;
    let circuit = HadamardCircuit::new(h, cfg.trotter_steps)?;
    let p0 = circuit.probability_zero(&circuit.prefix(t, tp), o, part)?;
    Ok(estimate_from_probability(p0, cfg.shots, shot_seed(cfg.seed, t, tp, 0, part)))
}

/// Measures `Σ_k c_k (a_k + i b_k)` term by term with `M_s` shots per term and part.
#[derive(Debug, Clone)]
pub struct CircuitCorrelator {
    circuit: HadamardCircuit,
    observable: PauliHamiltonian,
    cfg: ShotConfig,
}

impl CircuitCorrelator {
    pub fn new(h: &PauliHamiltonian, observable: &PauliHamiltonian, cfg: ShotConfig) -> Result<Self> {
        cfg.validate()?;
        if observable.n_sites() != h.n_sites() {
            return Err(Error::shape("observable and Hamiltonian sizes differ"));
        }
        Ok(Self { circuit: HadamardCircuit::new(h, cfg.trotter_steps)?, observable: observable.clone(), cfg })
    }

    pub fn config(&self) -> &ShotConfig {
        &self.cfg
    }

    pub fn eval(&self, t: f64, tp: f64) -> C64 {
        let prefix = self.circuit.prefix(t, tp);
        let mut acc = C64::new(0.0, 0.0);
        for (k, (c, p)) in self.observable.terms().iter().enumerate() {
            let part_value = |part| {
                let p0 = self.circuit.probability_zero(&prefix, p, part).expect("sizes checked in new");
                estimate_from_probability(p0, self.cfg.shots, shot_seed(self.cfg.seed, t, tp, k, part))
            };
            let a = part_value(Part::Re);
            let b = part_value(Part::Im);
            acc += C64::new(a, b) * *c;
        }
        acc
    }
}

pub fn correlation(h: &PauliHamiltonian, observable: &PauliHamiltonian, t: f64, tp: f64, cfg: &ShotConfig) -> Result<C64> {
    Ok(CircuitCorrelator::new(h, observable, *cfg)?.eval(t, tp))
}
