//! Tensor cross interpolation of a two-variable function, with the
//! measurement ledger written to CSV.
//!
//! Sweeps only see blocks adjacent to the current pivots, so the local error
//! estimate can report convergence on a structured function long before the
//! train is accurate. Random global probes after each sweep catch that.

use qttfit::quantics::QuanticsGrid;
use qttfit::tci::{cross_interpolate, TciOptions};
use qttfit::C64;

fn main() -> qttfit::Result<()> {
    let grid = QuanticsGrid::new(8, &[(-1.0, 1.0), (-1.0, 1.0)])?;
    let f = |x: &[f64]| C64::new((3.0 * x[0] * x[1]).cos() * (-x[0] * x[0]).exp(), 0.0);
    let mut target = grid.tensorize(f);

    for (chi, probes) in [(4, 0), (16, 0), (4, 64), (8, 64), (16, 64), (32, 64)] {
        let opts = TciOptions::new(chi, 1e-10).with_global_probes(probes, 7);
        let res = cross_interpolate(&mut target, &grid.local_dims(), &opts).map_err(|e| e.error)?;
        let worst = grid
            .all_indices()
            .map(|i| (res.tt.evaluate(&i).unwrap() - f(&grid.decode(&i).unwrap())).norm())
            .fold(0.0, f64::max);
        println!(
            "χ̃ = {chi:2}, {probes:2} probes: ε_TCI {:.2e}, true max error {worst:.2e}, {} evaluations of {}, {} sweeps, {:?}",
            res.error(),
            res.num_evaluations(),
            grid.all_indices().count(),
            res.sweeps(),
            res.stop
        );
        if chi == 32 {
            let path = std::env::temp_dir().join("qttfit_ledger.csv");
            res.ledger.write_csv(std::fs::File::create(&path)?)?;
            println!("ledger written to {}", path.display());
        }
    }
    Ok(())
}
