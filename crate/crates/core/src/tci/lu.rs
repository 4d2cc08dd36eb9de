use nalgebra::DMatrix;

use crate::tt::C64;

pub(super) struct PivotSelection {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

/// Rank-revealing LU with full pivoting. Always takes one pivot; stops at
/// `max_rank` or when the largest remaining residual is `<= abs_tol`.
pub(super) fn full_pivot(mut a: DMatrix<C64>, max_rank: usize, abs_tol: f64) -> PivotSelection {
    let (m, n) = a.shape();
    let mut rperm: Vec<usize> = (0..m).collect();
    let mut cperm: Vec<usize> = (0..n).collect();
    let kmax = m.min(n).min(max_rank);
    let mut rank = 0;
    for k in 0..kmax {
        let (mut bi, mut bj, mut best) = (k, k, -1.0);
        for i in k..m {
            for j in k..n {
                let v = a[(i, j)].norm();
                if v > best {
                    best = v;
                    bi = i;
                    bj = j;
                }
            }
        }
        if best == 0.0 || (k > 0 && best <= abs_tol) {
            break;
        }
        a.swap_rows(k, bi);
        a.swap_columns(k, bj);
        rperm.swap(k, bi);
        cperm.swap(k, bj);
        let p = a[(k, k)];
        for i in k + 1..m {
            let f = a[(i, k)] / p;
            a[(i, k)] = f;
            for j in k + 1..n {
                let u = a[(k, j)];
                a[(i, j)] -= f * u;
            }
        }
        rank = k + 1;
    }
    if rank == 0 {
        return PivotSelection { rows: vec![0], cols: vec![0] };
    }
    PivotSelection { rows: rperm[..rank].to_vec(), cols: cperm[..rank].to_vec() }
}

/// `m · p⁻¹`, falling back to a pseudo-inverse for singular `p`.
pub(super) fn right_divide(m: &DMatrix<C64>, p: &DMatrix<C64>) -> DMatrix<C64> {
    left_divide(&p.transpose(), &m.transpose()).transpose()
}

/// `p⁻¹ · m`, falling back to a pseudo-inverse for singular `p`.
pub(super) fn left_divide(p: &DMatrix<C64>, m: &DMatrix<C64>) -> DMatrix<C64> {
    let lu = p.clone().lu();
    if let Some(x) = lu.solve(m) {
        if x.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
            return x;
        }
    }
    let scale = p.iter().map(|v| v.norm()).fold(0.0, f64::max);
    match p.clone().pseudo_inverse(1e-14 * scale.max(f64::MIN_POSITIVE)) {
        Ok(pinv) => pinv * m,
        Err(_) => DMatrix::zeros(p.ncols(), m.ncols()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_rank_of_outer_product() {
        let a = DMatrix::from_fn(4, 5, |i, j| C64::new((i + 1) as f64 * (j as f64 - 2.0), 0.0));
        let sel = full_pivot(a, 4, 1e-12);
        assert_eq!(sel.rows, vec![3]);
        assert_eq!(sel.cols, vec![0]);
    }

    #[test]
    fn divides_consistently() {
        let p = DMatrix::from_row_slice(2, 2, &[C64::new(2.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(3.0, 1.0)]);
        let m = DMatrix::from_fn(3, 2, |i, j| C64::new(i as f64, j as f64));
        let x = right_divide(&m, &p);
        assert!((x * &p - &m).norm() < 1e-12);
        let y = left_divide(&p, &m.transpose());
        assert!((&p * y - m.transpose()).norm() < 1e-12);
    }
}
