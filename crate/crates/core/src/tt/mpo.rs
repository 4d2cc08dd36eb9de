use super::{Core, TensorTrain, C64};
use crate::error::{Error, Result};

/// A tensor train lifted to an operator whose local tensors are diagonal in
/// the physical legs: `W_l[a, s_out, s_in, b] = A_l[a, s, b] δ_{s_out,s}δ_{s_in,s}`.
///
/// Applying it to a train `B` yields the element-wise product `A ∘ B` with
/// bond dimensions `χ_A · χ_B`.
#[derive(Debug, Clone)]
pub struct DiagonalMpo {
    /// Per site: `(left, phys, right, data)` with data laid out as
    /// `[left][s_out][s_in][right]`.
    sites: Vec<MpoSite>,
}

#[derive(Debug, Clone)]
struct MpoSite {
    left: usize,
    phys: usize,
    right: usize,
    data: Vec<C64>,
}

impl MpoSite {
    #[inline]
    fn get(&self, l: usize, so: usize, si: usize, r: usize) -> C64 {
        self.data[((l * self.phys + so) * self.phys + si) * self.right + r]
    }
}

impl DiagonalMpo {
    pub fn from_tt(a: &TensorTrain) -> Self {
        let sites = a
            .cores()
            .iter()
            .map(|c| {
                let (left, phys, right) = c.shape();
                let mut data = vec![C64::new(0.0, 0.0); left * phys * phys * right];
                for l in 0..left {
                    for s in 0..phys {
                        for r in 0..right {
                            data[((l * phys + s) * phys + s) * right + r] = c.get(l, s, r);
                        }
                    }
                }
                MpoSite { left, phys, right, data }
            })
            .collect();
        Self { sites }
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    /// Contracts the operator with `b` over the input physical legs.
    pub fn apply(&self, b: &TensorTrain) -> Result<TensorTrain> {
        if b.len() != self.len() {
            return Err(Error::shape(format!(
                "operator has {} sites, train has {}",
                self.len(),
                b.len()
            )));
        }
        let mut cores = Vec::with_capacity(self.len());
        for (l, (w, bc)) in self.sites.iter().zip(b.cores()).enumerate() {
            if w.phys != bc.phys_dim() {
                return Err(Error::shape(format!(
                    "site {l}: local dims {} and {} differ",
                    w.phys,
                    bc.phys_dim()
                )));
            }
            let (bl, d, br) = bc.shape();
            let left = w.left * bl;
            let right = w.right * br;
            let mut core = Core::zeros(left, d, right);
            for wl in 0..w.left {
                for so in 0..d {
                    for si in 0..d {
                        for wr in 0..w.right {
                            let x = w.get(wl, so, si, wr);
                            if x == C64::new(0.0, 0.0) {
                                continue;
                            }
                            for lb in 0..bl {
                                for rb in 0..br {
                                    let o = core.offset(wl * bl + lb, so, wr * br + rb);
                                    core.data_mut()[o] += x * bc.get(lb, si, rb);
                                }
                            }
                        }
                    }
                }
            }
            cores.push(core);
        }
        TensorTrain::new(cores)
    }
}
