//! Refitting a compressed train to a fixed set of samples with L-BFGS.

use qttfit::fit::{cost, optimize, FitPlan};
use qttfit::quantics::QuanticsGrid;
use qttfit::rng::stream;
use qttfit::tci::MeasurementLedger;
use qttfit::{TensorTrain, TruncationSpec, C64};
use rand::Rng;

fn main() -> qttfit::Result<()> {
    let grid = QuanticsGrid::unit(1, 10)?;
    let dims = grid.local_dims();
    let mut rng = stream(3);
    let f = |x: f64| (6.0 * x).sin() * (-x).exp();

    // 300 random noisy samples.
    let mut points = std::collections::BTreeMap::new();
    while points.len() < 300 {
        let idx: Vec<usize> = dims.iter().map(|_| rng.random_range(0..2)).collect();
        let x = grid.decode(&idx)?[0];
        points.entry(idx).or_insert_with(|| C64::new(f(x) + 0.02 * (rng.random::<f64>() - 0.5), 0.0));
    }
    let ledger = MeasurementLedger::from_points(points)?;

    let start = TensorTrain::random(&dims, &[2; 9], &mut rng)?.svd_truncate(TruncationSpec::max_bond(2))?;
    let out = optimize(&start, &ledger, &FitPlan::new(2, 2).with_iterations(300))?;
    println!("cost {:.3e} -> {:.3e} in {} iterations", cost(&start, &ledger)?, out.trace.last().unwrap(), out.iterations);

    let err: f64 = grid
        .all_indices()
        .map(|i| (out.tt.evaluate(&i).unwrap().re - f(grid.decode(&i).unwrap()[0])).abs())
        .sum::<f64>()
        / grid.all_indices().count() as f64;
    println!("mean |tt − f| over the full grid: {err:.3e}");
    Ok(())
}
