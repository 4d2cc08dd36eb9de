use crate::error::{Error, Result};
use crate::quantics::QuanticsGrid;
use crate::tci::{cross_interpolate, TciOptions, TciResult};
use crate::tt::{TensorTrain, TruncationSpec, C64};

use super::kernel::KernelParams;

/// Interleaved two-variable grid for `(t, t') ∈ [−T, T)²`.
pub fn time_grid(p: &KernelParams, bits: u32) -> Result<QuanticsGrid> {
    p.validate()?;
    QuanticsGrid::new(bits, &[(-p.t_max, p.t_max), (-p.t_max, p.t_max)])
}

fn check_time_grid(grid: &QuanticsGrid) -> Result<()> {
    if grid.n_vars() != 2 {
        return Err(Error::domain(format!("expected a (t, t') grid, got {} variables", grid.n_vars())));
    }
    Ok(())
}

/// Bond-1 train of `e^{iE0(t−t')}`.
pub fn build_phase_tt(e0: f64, grid: &QuanticsGrid) -> Result<TensorTrain> {
    check_time_grid(grid)?;
    grid.exp_tt(&[C64::new(0.0, e0), C64::new(0.0, -e0)])
}

/// `g(t) g(t')` is separable across every interleaved bond pair, so plain
/// two-site updates from one pivot never see rank above 1.
const KERNEL_PROBES: usize = 64;

/// Learns `g(t) g(t')` by cross interpolation at tolerance `tol`.
pub fn learn_kernel_tt(p: &KernelParams, grid: &QuanticsGrid, tol: f64) -> Result<TciResult> {
    check_time_grid(grid)?;
    let mut f = grid.tensorize(|x| C64::new(p.g(x[0]) * p.g(x[1]), 0.0));
    cross_interpolate(&mut f, &grid.local_dims(), &TciOptions::new(64, tol).with_global_probes(KERNEL_PROBES, 0)).map_err(|e| e.error)
}

fn check_operand(tt: &TensorTrain, grid: &QuanticsGrid, what: &str) -> Result<()> {
    if tt.local_dims() != grid.local_dims() {
        return Err(Error::shape(format!("{what} does not match the time grid")));
    }
    Ok(())
}

/// `kernel ⊙ corr`, the E0-independent part of the integrand.
pub fn weighted_correlator(corr_tt: &TensorTrain, kernel_tt: &TensorTrain, grid: &QuanticsGrid, spec: TruncationSpec) -> Result<TensorTrain> {
    check_time_grid(grid)?;
    check_operand(corr_tt, grid, "correlator train")?;
    check_operand(kernel_tt, grid, "kernel train")?;
    TensorTrain::elementwise_multiply(kernel_tt, corr_tt, spec)
}

/// `Δ² Σ e^{iE0(t−t')} w(t, t')` for a precomputed `w = kernel ⊙ corr`.
pub fn integrate_with_phase(weighted: &TensorTrain, e0: f64, grid: &QuanticsGrid, spec: TruncationSpec) -> Result<C64> {
    check_operand(weighted, grid, "weighted train")?;
    let phase = build_phase_tt(e0, grid)?;
    Ok(TensorTrain::elementwise_multiply(&phase, weighted, spec)?.integrate(grid.cell_volume()))
}

/// Grid estimate of `∫∫ g(t) g(t') e^{iE0(t−t')} corr(t, t') dt dt'`.
pub fn tt_estimate(corr_tt: &TensorTrain, kernel_tt: &TensorTrain, e0: f64, grid: &QuanticsGrid, spec: TruncationSpec) -> Result<C64> {
    integrate_with_phase(&weighted_correlator(corr_tt, kernel_tt, grid, spec)?, e0, grid, spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn table1() -> KernelParams {
        KernelParams::new(1.0, 2.0, 2.0).unwrap()
    }

    #[test]
    fn phase_train_is_exact() {
        let grid = time_grid(&table1(), 4).unwrap();
        let ones = build_phase_tt(0.0, &grid).unwrap();
        assert!(ones.to_dense().iter().all(|v| *v == C64::new(1.0, 0.0)));
        let phase = build_phase_tt(1.0, &grid).unwrap();
        assert_eq!(phase.max_bond(), 1);
        for idx in grid.all_indices() {
            let x = grid.decode(&idx).unwrap();
            let v = phase.evaluate(&idx).unwrap();
            assert!((v - C64::from_polar(1.0, x[0] - x[1])).norm() <= 1e-12);
            assert!((v.norm() - 1.0).abs() <= 1e-12);
        }
        assert!(build_phase_tt(1.0, &QuanticsGrid::unit(1, 4).unwrap()).is_err());
    }

    #[test]
    fn kernel_train_and_riemann_sum() {
        let p = table1();
        let grid = time_grid(&p, 8).unwrap();
        let kernel = learn_kernel_tt(&p, &grid, 1e-5).unwrap();
        let ones = TensorTrain::constant(&grid.local_dims(), C64::new(1.0, 0.0)).unwrap();
        let est = tt_estimate(&ones, &kernel.tt, 0.0, &grid, TruncationSpec::exact()).unwrap();
        let h = grid.spacing(0);
        let riemann: f64 = (0..256).map(|m| p.g(grid.coordinate(0, m)) * h).sum();
        assert!((est - C64::new(riemann * riemann, 0.0)).norm() <= 1e-6, "{est} vs {}", riemann * riemann);
        // Left sums of an even function carry only the h²/12 Euler–Maclaurin term.
        let c = p.normalization();
        let slope = (p.g(2.0 + 1e-6) - p.g(2.0 - 1e-6)) / 2e-6;
        assert!((riemann - c).abs() <= h * h / 12.0 * 2.0 * slope.abs() * 1.05);
    }

    #[test]
    fn estimate_matches_brute_force_double_sum() {
        let p = table1();
        let grid = time_grid(&p, 5).unwrap();
        let dims = grid.local_dims();
        let mut rng = stream(4);
        let corr = TensorTrain::random(&dims, &[3; 9], &mut rng).unwrap();
        let kernel = learn_kernel_tt(&p, &grid, 1e-12).unwrap().tt;
        for e0 in [-1.5, 0.0, 2.3] {
            let est = tt_estimate(&corr, &kernel, e0, &grid, TruncationSpec::exact()).unwrap();
            let mut want = C64::new(0.0, 0.0);
            for idx in grid.all_indices() {
                let x = grid.decode(&idx).unwrap();
                want += C64::from_polar(1.0, e0 * (x[0] - x[1])) * kernel.evaluate(&idx).unwrap() * corr.evaluate(&idx).unwrap();
            }
            want *= grid.cell_volume();
            assert!((est - want).norm() <= 1e-9 * want.norm().max(1.0), "{est} vs {want}");
        }
        let short = TensorTrain::constant(&[2; 8], C64::new(1.0, 0.0)).unwrap();
        assert!(tt_estimate(&short, &kernel, 0.0, &grid, TruncationSpec::exact()).is_err());
    }
}
