//! Tensor trains: an ordered chain of order-3 complex cores.
//!
//! Core `l` has shape `(χ_{l-1}, d_l, χ_l)` with `χ_0 = χ_L = 1`. Entries are
//! stored row-major in `(left, phys, right)` order so that both the
//! "left unfolding" `(left·phys) × right` and the "right unfolding"
//! `left × (phys·right)` are plain row-major reinterpretations of the same
//! buffer.

mod io;
mod mpo;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub use mpo::DiagonalMpo;

pub type C64 = Complex64;

/// One order-3 core.
#[derive(Debug, Clone, PartialEq)]
pub struct Core {
    left: usize,
    phys: usize,
    right: usize,
    data: Vec<C64>,
}

impl Core {
    pub fn new(left: usize, phys: usize, right: usize, data: Vec<C64>) -> Result<Self> {
        if left == 0 || phys == 0 || right == 0 {
            return Err(Error::shape(format!(
                "core dimensions must be positive, got ({left}, {phys}, {right})"
            )));
        }
        if data.len() != left * phys * right {
            return Err(Error::shape(format!(
                "core ({left}, {phys}, {right}) needs {} entries, got {}",
                left * phys * right,
                data.len()
            )));
        }
        Ok(Self { left, phys, right, data })
    }

    pub fn zeros(left: usize, phys: usize, right: usize) -> Self {
        Self { left, phys, right, data: vec![C64::new(0.0, 0.0); left * phys * right] }
    }

    /// Builds a core from a closure over `(left, phys, right)`.
    pub fn from_fn(
        left: usize,
        phys: usize,
        right: usize,
        mut f: impl FnMut(usize, usize, usize) -> C64,
    ) -> Self {
        let mut data = Vec::with_capacity(left * phys * right);
        for l in 0..left {
            for s in 0..phys {
                for r in 0..right {
                    data.push(f(l, s, r));
                }
            }
        }
        Self { left, phys, right, data }
    }

    pub fn left_dim(&self) -> usize {
        self.left
    }

    pub fn phys_dim(&self) -> usize {
        self.phys
    }

    pub fn right_dim(&self) -> usize {
        self.right
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.left, self.phys, self.right)
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    #[inline]
    pub fn offset(&self, l: usize, s: usize, r: usize) -> usize {
        (l * self.phys + s) * self.right + r
    }

    #[inline]
    pub fn get(&self, l: usize, s: usize, r: usize) -> C64 {
        self.data[self.offset(l, s, r)]
    }

    #[inline]
    pub fn set(&mut self, l: usize, s: usize, r: usize, v: C64) {
        let o = self.offset(l, s, r);
        self.data[o] = v;
    }

    /// `(left·phys) × right` unfolding.
    pub fn left_unfolding(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.left * self.phys, self.right, &self.data)
    }

    /// `left × (phys·right)` unfolding.
    pub fn right_unfolding(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.left, self.phys * self.right, &self.data)
    }

    pub fn from_left_unfolding(m: &DMatrix<C64>, left: usize, phys: usize) -> Self {
        assert_eq!(m.nrows(), left * phys);
        Self { left, phys, right: m.ncols(), data: row_major(m) }
    }

    pub fn from_right_unfolding(m: &DMatrix<C64>, phys: usize, right: usize) -> Self {
        assert_eq!(m.ncols(), phys * right);
        Self { left: m.nrows(), phys, right, data: row_major(m) }
    }

    /// `Σ_s core[:, s, :]`.
    pub fn phys_sum(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.left, self.right);
        for l in 0..self.left {
            for s in 0..self.phys {
                for r in 0..self.right {
                    m[(l, r)] += self.get(l, s, r);
                }
            }
        }
        m
    }

    /// Row vector times the slice `core[:, s, :]`.
    #[inline]
    pub(crate) fn vec_times_slice(&self, v: &[C64], s: usize, out: &mut Vec<C64>) {
        out.clear();
        out.resize(self.right, C64::new(0.0, 0.0));
        for (l, &vl) in v.iter().enumerate() {
            if vl == C64::new(0.0, 0.0) {
                continue;
            }
            let base = self.offset(l, s, 0);
            for (o, &c) in out.iter_mut().zip(&self.data[base..base + self.right]) {
                *o += vl * c;
            }
        }
    }

    /// The slice `core[:, s, :]` times a column vector.
    #[inline]
    pub(crate) fn slice_times_vec(&self, s: usize, v: &[C64], out: &mut Vec<C64>) {
        out.clear();
        out.resize(self.left, C64::new(0.0, 0.0));
        for (l, o) in out.iter_mut().enumerate() {
            let base = self.offset(l, s, 0);
            *o = self.data[base..base + self.right]
                .iter()
                .zip(v)
                .map(|(&c, &x)| c * x)
                .sum();
        }
    }
}

pub(crate) fn row_major(m: &DMatrix<C64>) -> Vec<C64> {
    let mut out = Vec::with_capacity(m.len());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push(m[(i, j)]);
        }
    }
    out
}

/// Truncation request for SVD compression.
///
/// `tolerance` is relative in the squared-Frobenius sense: the compressed
/// train `B` of `A` satisfies `‖A − B‖²_F ≤ tolerance · ‖A‖²_F` whenever the
/// bond cap allows it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationSpec {
    pub max_bond: Option<usize>,
    pub tolerance: f64,
}

impl TruncationSpec {
    /// No truncation at all.
    pub fn exact() -> Self {
        Self { max_bond: None, tolerance: 0.0 }
    }

    pub fn max_bond(chi: usize) -> Self {
        Self { max_bond: Some(chi), tolerance: 0.0 }
    }

    pub fn tolerance(tol: f64) -> Self {
        Self { max_bond: None, tolerance: tol }
    }

    pub fn with_max_bond(mut self, chi: usize) -> Self {
        self.max_bond = Some(chi);
        self
    }

    pub fn is_exact(&self) -> bool {
        self.max_bond.is_none() && self.tolerance == 0.0
    }

    fn validate(&self) -> Result<()> {
        if self.max_bond == Some(0) {
            return Err(Error::domain("max_bond must be at least 1"));
        }
        if !(self.tolerance >= 0.0) || !self.tolerance.is_finite() {
            return Err(Error::domain(format!(
                "tolerance must be finite and nonnegative, got {}",
                self.tolerance
            )));
        }
        Ok(())
    }

    /// Number of singular values to keep given descending `sv` and an
    /// absolute squared-error budget for this bond.
    fn rank_for(&self, sv: &[f64], budget: f64) -> usize {
        let mut keep = sv.len();
        let mut discarded = 0.0;
        while keep > 1 {
            let next = discarded + sv[keep - 1] * sv[keep - 1];
            if next > budget {
                break;
            }
            discarded = next;
            keep -= 1;
        }
        match self.max_bond {
            Some(m) => keep.min(m).max(1),
            None => keep.max(1),
        }
    }
}

impl Default for TruncationSpec {
    fn default() -> Self {
        Self::exact()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TensorTrain {
    cores: Vec<Core>,
}

impl TensorTrain {
    pub fn new(cores: Vec<Core>) -> Result<Self> {
        if cores.is_empty() {
            return Err(Error::shape("a tensor train needs at least one core"));
        }
        if cores[0].left != 1 {
            return Err(Error::shape(format!("left boundary bond is {}, expected 1", cores[0].left)));
        }
        let last = cores.last().unwrap();
        if last.right != 1 {
            return Err(Error::shape(format!("right boundary bond is {}, expected 1", last.right)));
        }
        for (l, w) in cores.windows(2).enumerate() {
            if w[0].right != w[1].left {
                return Err(Error::shape(format!(
                    "bond {l}: core {l} has right dim {} but core {} has left dim {}",
                    w[0].right,
                    l + 1,
                    w[1].left
                )));
            }
        }
        Ok(Self { cores })
    }

    /// Bond-dimension-1 train whose every entry equals `value`.
    pub fn constant(dims: &[usize], value: C64) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::domain("local dimensions must be nonempty and positive"));
        }
        let cores = dims
            .iter()
            .enumerate()
            .map(|(l, &d)| {
                let v = if l == 0 { value } else { C64::new(1.0, 0.0) };
                Core::from_fn(1, d, 1, |_, _, _| v)
            })
            .collect();
        Self::new(cores)
    }

    /// Random train with i.i.d. complex Gaussian entries. `bonds` has length `L − 1`.
    pub fn random<R: Rng + ?Sized>(dims: &[usize], bonds: &[usize], rng: &mut R) -> Result<Self> {
        if bonds.len() + 1 != dims.len() {
            return Err(Error::shape(format!(
                "{} local dims need {} bonds, got {}",
                dims.len(),
                dims.len().saturating_sub(1),
                bonds.len()
            )));
        }
        let mut cores = Vec::with_capacity(dims.len());
        for (l, &d) in dims.iter().enumerate() {
            let left = if l == 0 { 1 } else { bonds[l - 1] };
            let right = if l + 1 == dims.len() { 1 } else { bonds[l] };
            cores.push(Core::from_fn(left, d, right, |_, _, _| {
                C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
            }));
        }
        Self::new(cores)
    }

    pub fn len(&self) -> usize {
        self.cores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cores.is_empty()
    }

    pub fn cores(&self) -> &[Core] {
        &self.cores
    }

    pub fn into_cores(self) -> Vec<Core> {
        self.cores
    }

    pub fn local_dims(&self) -> Vec<usize> {
        self.cores.iter().map(|c| c.phys).collect()
    }

    /// Internal bond dimensions `χ_1 … χ_{L-1}`.
    pub fn bond_dims(&self) -> Vec<usize> {
        self.cores[..self.len() - 1].iter().map(|c| c.right).collect()
    }

    pub fn max_bond(&self) -> usize {
        self.bond_dims().into_iter().max().unwrap_or(1)
    }

    /// Total number of complex entries over all cores.
    pub fn num_entries(&self) -> usize {
        self.cores.iter().map(|c| c.data.len()).sum()
    }

    /// Number of grid points, `∏ d_l`.
    pub fn num_points(&self) -> usize {
        self.cores.iter().map(|c| c.phys).product()
    }

    pub fn check_index(&self, index: &[usize]) -> Result<()> {
        if index.len() != self.len() {
            return Err(Error::domain(format!(
                "index has length {}, train has {} cores",
                index.len(),
                self.len()
            )));
        }
        for (l, (&s, c)) in index.iter().zip(&self.cores).enumerate() {
            if s >= c.phys {
                return Err(Error::domain(format!(
                    "index[{l}] = {s} out of range for local dimension {}",
                    c.phys
                )));
            }
        }
        Ok(())
    }

    pub fn evaluate(&self, index: &[usize]) -> Result<C64> {
        self.check_index(index)?;
        Ok(self.eval_unchecked(index))
    }

    pub(crate) fn eval_unchecked(&self, index: &[usize]) -> C64 {
        let mut v = vec![C64::new(1.0, 0.0)];
        let mut next = Vec::new();
        for (c, &s) in self.cores.iter().zip(index) {
            c.vec_times_slice(&v, s, &mut next);
            std::mem::swap(&mut v, &mut next);
        }
        v[0]
    }

    /// All entries, row-major with the first core's index most significant.
    pub fn to_dense(&self) -> Vec<C64> {
        let mut acc = DMatrix::from_element(1, 1, C64::new(1.0, 0.0));
        for c in &self.cores {
            // acc: (points so far) × left  →  (points·phys) × right
            let rows = acc.nrows();
            let mut next = DMatrix::zeros(rows * c.phys, c.right);
            for p in 0..rows {
                for s in 0..c.phys {
                    for r in 0..c.right {
                        let mut sum = C64::new(0.0, 0.0);
                        for l in 0..c.left {
                            sum += acc[(p, l)] * c.get(l, s, r);
                        }
                        next[(p * c.phys + s, r)] = sum;
                    }
                }
            }
            acc = next;
        }
        acc.column(0).iter().copied().collect()
    }

    /// TT-SVD of a dense tensor given row-major with the first index most significant.
    pub fn from_dense(values: &[C64], dims: &[usize], spec: TruncationSpec) -> Result<Self> {
        spec.validate()?;
        let total_points: usize = dims.iter().product();
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::domain("local dimensions must be nonempty and positive"));
        }
        if values.len() != total_points {
            return Err(Error::shape(format!(
                "dense tensor has {} entries, dims imply {total_points}",
                values.len()
            )));
        }
        let total: f64 = values.iter().map(|v| v.norm_sqr()).sum();
        let budget = bond_budget(spec.tolerance, total, dims.len());
        let mut cores = Vec::with_capacity(dims.len());
        let mut left = 1usize;
        let mut rest = DMatrix::from_row_slice(1, total_points, values);
        for (l, &d) in dims.iter().enumerate() {
            if l + 1 == dims.len() {
                cores.push(Core::from_right_unfolding(&rest, d, 1));
                break;
            }
            let cols = rest.ncols() / d;
            // (left) × (d·cols) → (left·d) × cols, row-major reinterpretation
            let m = DMatrix::from_row_slice(left * d, cols, &row_major(&rest));
            let (u, s, vt) = thin_svd(&m);
            let k = spec.rank_for(&s, budget);
            let uk = u.columns(0, k).into_owned();
            let mut svt = vt.rows(0, k).into_owned();
            for i in 0..k {
                svt.row_mut(i).scale_mut(s[i]);
            }
            cores.push(Core::from_left_unfolding(&uk, left, d));
            left = k;
            rest = svt;
        }
        Self::new(cores)
    }

    /// `Σ_σ |tt(σ)|²`, by transfer-matrix contraction.
    pub fn norm_squared(&self) -> f64 {
        let mut env = DMatrix::from_element(1, 1, C64::new(1.0, 0.0));
        for c in &self.cores {
            let mut next = DMatrix::zeros(c.right, c.right);
            for s in 0..c.phys {
                let slice = DMatrix::from_fn(c.left, c.right, |l, r| c.get(l, s, r));
                next += slice.adjoint() * &env * &slice;
            }
            env = next;
        }
        env[(0, 0)].re
    }

    pub fn scale(&mut self, factor: C64) {
        for v in &mut self.cores[0].data {
            *v *= factor;
        }
    }

    /// Right-orthonormalizes cores `1..L` by successive LQ factorizations,
    /// moving the norm into core 0.
    pub fn right_canonicalize(&mut self) {
        for l in (1..self.len()).rev() {
            let (lfac, q) = lq(&self.cores[l].right_unfolding());
            let phys = self.cores[l].phys;
            let right = self.cores[l].right;
            self.cores[l] = Core::from_right_unfolding(&q, phys, right);
            let prev = &self.cores[l - 1];
            let merged = prev.left_unfolding() * lfac;
            self.cores[l - 1] = Core::from_left_unfolding(&merged, prev.left, prev.phys);
        }
    }

    /// SVD compression. The result is left-canonical except for the final
    /// core, has every bond ≤ `spec.max_bond`, and has relative squared
    /// Frobenius error ≤ `spec.tolerance` when the bond cap permits.
    pub fn svd_truncate(&self, spec: TruncationSpec) -> Result<Self> {
        spec.validate()?;
        let mut tt = self.clone();
        tt.right_canonicalize();
        let total = tt.cores[0].data.iter().map(|v| v.norm_sqr()).sum::<f64>();
        let budget = bond_budget(spec.tolerance, total, tt.len());
        for l in 0..tt.len() - 1 {
            let c = &tt.cores[l];
            let (left, phys) = (c.left, c.phys);
            let (u, s, vt) = thin_svd(&c.left_unfolding());
            let k = spec.rank_for(&s, budget);
            let uk = u.columns(0, k).into_owned();
            let mut carry = vt.rows(0, k).into_owned();
            for i in 0..k {
                carry.row_mut(i).scale_mut(s[i]);
            }
            tt.cores[l] = Core::from_left_unfolding(&uk, left, phys);
            let next = &tt.cores[l + 1];
            let merged = carry * next.right_unfolding();
            tt.cores[l + 1] = Core::from_right_unfolding(&merged, next.phys, next.right);
        }
        Ok(tt)
    }

    /// Element-wise (Hadamard) product via the diagonal MPO of `a` applied to
    /// `b`, followed by SVD truncation unless `spec` is exact.
    pub fn elementwise_multiply(a: &Self, b: &Self, spec: TruncationSpec) -> Result<Self> {
        spec.validate()?;
        let product = DiagonalMpo::from_tt(a).apply(b)?;
        if spec.is_exact() {
            Ok(product)
        } else {
            product.svd_truncate(spec)
        }
    }

    /// Sum of all entries.
    pub fn sum(&self) -> C64 {
        let mut v = vec![C64::new(1.0, 0.0)];
        for c in &self.cores {
            let m = c.phys_sum();
            v = (0..c.right)
                .map(|r| v.iter().enumerate().map(|(l, &x)| x * m[(l, r)]).sum())
                .collect();
        }
        v[0]
    }

    /// Riemann-sum integral: `cell_volume · Σ_σ tt(σ)`.
    pub fn integrate(&self, cell_volume: f64) -> C64 {
        self.sum() * cell_volume
    }

    /// `max |tt(σ)|` over the given samples.
    pub fn max_abs_sampled<'a, I>(&self, samples: I) -> Result<f64>
    where
        I: IntoIterator<Item = &'a [usize]>,
    {
        let mut best: Option<f64> = None;
        for idx in samples {
            let v = self.evaluate(idx)?.norm();
            best = Some(best.map_or(v, |b| b.max(v)));
        }
        best.ok_or_else(|| Error::domain("max_abs_sampled needs at least one sample"))
    }
}

/// Per-bond absolute squared-error budget so that the summed discarded weight
/// over `L − 1` bonds stays within `tolerance · total`.
fn bond_budget(tolerance: f64, total: f64, len: usize) -> f64 {
    if len <= 1 {
        return 0.0;
    }
    tolerance * total / (len - 1) as f64
}

/// Thin SVD with singular values in descending order.
///
/// Strongly rectangular inputs are first reduced by QR to their square
/// triangular factor: nalgebra's bidiagonal SVD can return a wrong
/// factorization for nearly rank-deficient 2×n matrices without reporting it.
pub(crate) fn thin_svd(m: &DMatrix<C64>) -> (DMatrix<C64>, Vec<f64>, DMatrix<C64>) {
    let (u, s, vt) = if m.nrows() > m.ncols() {
        let qr = m.clone().qr();
        let (u, s, vt) = square_svd(qr.r());
        (qr.q() * u, s, vt)
    } else if m.nrows() < m.ncols() {
        let qr = m.adjoint().qr();
        let (u, s, vt) = square_svd(qr.r().adjoint());
        (u, s, vt * qr.q().adjoint())
    } else {
        square_svd(m.clone())
    };
    sort_svd(u, s, vt)
}

fn square_svd(m: DMatrix<C64>) -> (DMatrix<C64>, Vec<f64>, DMatrix<C64>) {
    let svd = m.svd(true, true);
    let s = svd.singular_values.iter().copied().collect();
    (svd.u.expect("u requested"), s, svd.v_t.expect("v_t requested"))
}

fn sort_svd(u: DMatrix<C64>, s: Vec<f64>, vt: DMatrix<C64>) -> (DMatrix<C64>, Vec<f64>, DMatrix<C64>) {
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&a, &b| s[b].total_cmp(&s[a]));
    if order.iter().enumerate().all(|(i, &o)| i == o) {
        return (u, s, vt);
    }
    let u = DMatrix::from_fn(u.nrows(), order.len(), |i, j| u[(i, order[j])]);
    let vt = DMatrix::from_fn(order.len(), vt.ncols(), |i, j| vt[(order[i], j)]);
    let s = order.iter().map(|&o| s[o]).collect();
    (u, s, vt)
}

/// `m = L · Q` with `Q` having orthonormal rows.
fn lq(m: &DMatrix<C64>) -> (DMatrix<C64>, DMatrix<C64>) {
    let qr = m.adjoint().qr();
    let q = qr.q();
    let r = qr.r();
    (r.adjoint(), q.adjoint())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn thin_svd_of_rank_one_strips() {
        for (r, n) in [(2, 256), (2, 512), (2, 1024), (512, 2), (3, 5)] {
            let m = DMatrix::from_fn(r, n, |i, j| c((1.5 * (i * n + j) as f64 / 1024.0).exp()));
            let (u, s, vt) = thin_svd(&m);
            let k = s.len();
            assert_eq!(k, r.min(n));
            let rec = &u * DMatrix::from_diagonal(&nalgebra::DVector::from_fn(k, |i, _| c(s[i]))) * &vt;
            assert!((rec - &m).norm() < 1e-12 * m.norm(), "{r}x{n}");
            assert!(s.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn exponential_compresses_to_bond_one() {
        let n = 10;
        let values: Vec<C64> = (0..1usize << n).map(|p| c((1.5 * p as f64 / 1024.0).exp())).collect();
        let tt = TensorTrain::from_dense(&values, &vec![2; n], TruncationSpec::tolerance(1e-20)).unwrap();
        assert_eq!(tt.max_bond(), 1);
        let err = tt.to_dense().iter().zip(&values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-12, "{err}");
    }

    fn all_indices(dims: &[usize]) -> Vec<Vec<usize>> {
        let mut out = vec![vec![]];
        for &d in dims {
            out = out
                .into_iter()
                .flat_map(|p| {
                    (0..d).map(move |s| {
                        let mut q = p.clone();
                        q.push(s);
                        q
                    })
                })
                .collect();
        }
        out
    }

    #[test]
    fn rejects_mismatched_bonds() {
        let a = Core::zeros(1, 2, 2);
        let b = Core::zeros(3, 2, 1);
        assert!(matches!(TensorTrain::new(vec![a, b]), Err(Error::Shape(_))));
        assert!(TensorTrain::new(vec![Core::zeros(2, 2, 1)]).is_err());
        assert!(Core::new(1, 2, 1, vec![c(1.0)]).is_err());
    }

    #[test]
    fn constant_train_evaluates_to_its_value() {
        let tt = TensorTrain::constant(&[2, 3, 2], C64::new(2.5, -1.0)).unwrap();
        for idx in all_indices(&[2, 3, 2]) {
            assert_eq!(tt.evaluate(&idx).unwrap(), C64::new(2.5, -1.0));
        }
    }

    #[test]
    fn evaluate_rejects_out_of_range() {
        let tt = TensorTrain::constant(&[2, 2], c(1.0)).unwrap();
        assert!(matches!(tt.evaluate(&[0, 2]), Err(Error::Domain(_))));
        assert!(matches!(tt.evaluate(&[0]), Err(Error::Domain(_))));
    }

    #[test]
    fn exponential_product_cores() {
        // e^{λ Σ σ_r / 2^r} as a bond-1 train.
        let lambda = 0.7;
        let r = 6;
        let cores = (1..=r)
            .map(|k| {
                Core::from_fn(1, 2, 1, |_, s, _| c((lambda * s as f64 / 2f64.powi(k)).exp()))
            })
            .collect();
        let tt = TensorTrain::new(cores).unwrap();
        let idx = [1, 0, 1, 1, 0, 1];
        let x: f64 = idx.iter().enumerate().map(|(k, &s)| s as f64 / 2f64.powi(k as i32 + 1)).sum();
        assert!((tt.evaluate(&idx).unwrap() - c((lambda * x).exp())).norm() < 1e-14);
    }

    #[test]
    fn dense_round_trip_and_sorting() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let tt = TensorTrain::random(&[2, 2, 2, 2], &[2, 3, 2], &mut rng).unwrap();
        let dense = tt.to_dense();
        let back = TensorTrain::from_dense(&dense, &[2, 2, 2, 2], TruncationSpec::exact()).unwrap();
        for (a, b) in back.to_dense().iter().zip(&dense) {
            assert!((a - b).norm() < 1e-12 * (1.0 + b.norm()));
        }
        let m = DMatrix::from_fn(5, 3, |i, j| c((i * 3 + j) as f64).powi(2) + c(1.0));
        let (_, s, _) = thin_svd(&m);
        assert!(s.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn truncation_keeps_rank_one_values() {
        let tt = TensorTrain::constant(&[2; 5], c(3.0)).unwrap();
        let t = tt.svd_truncate(TruncationSpec::max_bond(1)).unwrap();
        assert_eq!(t.max_bond(), 1);
        for idx in all_indices(&[2; 5]) {
            assert!((t.evaluate(&idx).unwrap() - c(3.0)).norm() < 1e-12 * 3.0);
        }
    }

    #[test]
    fn truncation_output_is_left_canonical() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let tt = TensorTrain::random(&[2; 6], &[2, 4, 4, 4, 2], &mut rng).unwrap();
        let t = tt.svd_truncate(TruncationSpec::max_bond(3)).unwrap();
        for core in &t.cores()[..t.len() - 1] {
            let u = core.left_unfolding();
            let id = u.adjoint() * &u;
            assert!((id - DMatrix::identity(core.right_dim(), core.right_dim())).norm() < 1e-12);
        }
    }

    #[test]
    fn truncation_rejects_zero_cap() {
        let tt = TensorTrain::constant(&[2, 2], c(1.0)).unwrap();
        assert!(tt.svd_truncate(TruncationSpec::max_bond(0)).is_err());
        assert!(tt.svd_truncate(TruncationSpec::tolerance(f64::NAN)).is_err());
    }

    #[test]
    fn constant_products_and_integrals() {
        let a = TensorTrain::constant(&[2; 4], c(2.0)).unwrap();
        let b = TensorTrain::constant(&[2; 4], c(3.0)).unwrap();
        let p = TensorTrain::elementwise_multiply(&a, &b, TruncationSpec::exact()).unwrap();
        for idx in all_indices(&[2; 4]) {
            assert!((p.evaluate(&idx).unwrap() - c(6.0)).norm() < 1e-14);
        }
        let one = TensorTrain::constant(&[2; 10], c(1.0)).unwrap();
        assert_eq!(one.integrate(2f64.powi(-10)), c(1.0));
    }

    #[test]
    fn multiply_rejects_shape_mismatch() {
        let a = TensorTrain::constant(&[2; 4], c(2.0)).unwrap();
        let b = TensorTrain::constant(&[2; 5], c(3.0)).unwrap();
        let d = TensorTrain::constant(&[2, 2, 3, 2], c(3.0)).unwrap();
        assert!(TensorTrain::elementwise_multiply(&a, &b, TruncationSpec::exact()).is_err());
        assert!(TensorTrain::elementwise_multiply(&a, &d, TruncationSpec::exact()).is_err());
    }

    #[test]
    fn max_abs_over_samples() {
        let tt = TensorTrain::constant(&[2; 3], c(-5.0)).unwrap();
        let samples: Vec<Vec<usize>> = vec![vec![0, 1, 0], vec![1, 1, 1]];
        assert_eq!(tt.max_abs_sampled(samples.iter().map(|v| v.as_slice())).unwrap(), 5.0);
        assert_eq!(tt.max_abs_sampled(samples[..1].iter().map(|v| v.as_slice())).unwrap(), 5.0);
        assert!(tt.max_abs_sampled(std::iter::empty()).is_err());
    }

    #[test]
    fn norm_squared_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let tt = TensorTrain::random(&[2, 3, 2, 2], &[2, 3, 2], &mut rng).unwrap();
        let dense: f64 = tt.to_dense().iter().map(|v| v.norm_sqr()).sum();
        assert!((tt.norm_squared() - dense).abs() < 1e-10 * dense);
    }
}
