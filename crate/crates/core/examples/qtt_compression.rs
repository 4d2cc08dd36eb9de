//! Quantics tensor trains of elementary functions: exact low ranks,
//! SVD truncation, element-wise products and integrals.

use std::f64::consts::PI;

use qttfit::quantics::QuanticsGrid;
use qttfit::{TensorTrain, TruncationSpec, C64};

fn main() -> qttfit::Result<()> {
    let grid = QuanticsGrid::unit(1, 10)?;
    let dims = grid.local_dims();
    let sample = |f: &dyn Fn(f64) -> f64| -> Vec<C64> {
        grid.all_indices().map(|i| C64::new(f(grid.decode(&i).unwrap()[0]), 0.0)).collect()
    };

    let exp = TensorTrain::from_dense(&sample(&|x| (1.5 * x).exp()), &dims, TruncationSpec::tolerance(1e-20))?;
    let sin = TensorTrain::from_dense(&sample(&|x| (2.0 * PI * x).sin()), &dims, TruncationSpec::tolerance(1e-20))?;
    println!("e^(1.5x) bonds {:?}", exp.bond_dims());
    println!("sin(2πx) bonds {:?}", sin.bond_dims());

    // The analytic bond-1 construction agrees with the compressed one.
    let analytic = grid.exp_tt(&[C64::new(1.5, 0.0)])?;
    let diff: f64 = analytic.to_dense().iter().zip(exp.to_dense()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    println!("max |analytic − compressed| = {diff:.2e}");

    let product = TensorTrain::elementwise_multiply(&exp, &sin, TruncationSpec::tolerance(1e-24))?;
    let integral = product.integrate(grid.cell_volume());
    // ∫₀¹ e^{ax} sin(bx) dx in closed form; the train holds a left Riemann sum.
    let (a, b): (f64, f64) = (1.5, 2.0 * PI);
    let exact = (a.exp() * (a * b.sin() - b * b.cos()) + b) / (a * a + b * b);
    println!("∫ e^(1.5x) sin(2πx) dx ≈ {:.6} (exact {exact:.6}), product bonds {:?}", integral.re, product.bond_dims());

    let noisy: Vec<C64> = sample(&|x| (2.0 * PI * x).sin() + 1e-3 * (977.0 * x).sin());
    for tol in [1e-2, 1e-6, 1e-10] {
        let tt = TensorTrain::from_dense(&noisy, &dims, TruncationSpec::tolerance(tol))?;
        println!("tolerance {tol:.0e}: max bond {}", tt.max_bond());
    }
    Ok(())
}
