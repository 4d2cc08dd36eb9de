use proptest::prelude::*;
use qttfit::experiments::{exact_energy_scan, Command, RunConfig};
use qttfit::pite::{build_phase_tt, gamma_g, gamma_t, time_grid, KernelParams};
use qttfit::qsim::{build_tfim, CircuitCorrelator, ExactCorrelator, PauliHamiltonian, ShotConfig};
use qttfit::C64;

fn table1_kernel() -> KernelParams {
    KernelParams::new(1.0, 2.0, 2.0).unwrap()
}

#[test]
fn trotter_error_falls_with_steps() {
    let h = build_tfim(2, 1.2).unwrap();
    let obs = [h.clone(), PauliHamiltonian::identity(2).unwrap()];
    let ts: Vec<f64> = (0..9).map(|k| -2.0 + 0.5 * k as f64).collect();
    for o in &obs {
        let exact = ExactCorrelator::new(&h, o).unwrap();
        let mut last = f64::INFINITY;
        for n_t in [25, 50, 100, 200] {
            let c = CircuitCorrelator::new(&h, o, ShotConfig::exact(n_t)).unwrap();
            let err = ts
                .iter()
                .flat_map(|&t| ts.iter().map(move |&tp| (t, tp)))
                .map(|(t, tp)| (c.eval(t, tp) - exact.eval(t, tp)).norm())
                .fold(0.0, f64::max);
            assert!(err < last, "N_t {n_t}: {err} after {last}");
            last = err;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn phase_train_has_unit_modulus(e0 in -6.0f64..6.0, bits in 2u32..=5) {
        let grid = time_grid(&table1_kernel(), bits).unwrap();
        let tt = build_phase_tt(e0, &grid).unwrap();
        prop_assert_eq!(tt.max_bond(), 1);
        for idx in grid.all_indices() {
            let x = grid.decode(&idx).unwrap();
            let v = tt.evaluate(&idx).unwrap();
            prop_assert!((v.norm() - 1.0).abs() <= 1e-12);
            prop_assert!((v - C64::from_polar(1.0, e0 * (x[0] - x[1]))).norm() <= 1e-9);
        }
    }

    #[test]
    fn filter_constants_are_decreasing(d in 0.25f64..5.0, tau in 0.5f64..4.0, t in 0.5f64..6.0) {
        prop_assert!(gamma_g(d * 1.1, tau) < gamma_g(d, tau));
        prop_assert!(gamma_t(1.0, tau, t * 1.1) < gamma_t(1.0, tau, t));
        prop_assert!(gamma_g(d, tau) > 0.0 && gamma_g(d, tau) <= 1.0);
    }
}

#[test]
fn exact_correlators_recover_the_ground_energy() {
    let cfg = RunConfig::defaults(Command::GsEnergy);
    let scan = exact_energy_scan(&cfg, 1e-9).unwrap();
    // The denominator is ‖G_T(H)|Ψ⟩‖² up to pipeline error.
    for p in &scan.points {
        assert!(p.denominator.re >= -1e-8, "E0 {}: {}", p.e0, p.denominator);
    }
    let e_g = -2.529822128134704;
    // Filter and truncation bias at the scan minimum, plus the grid error.
    assert!(scan.relative_error(e_g) < 1e-3, "{} vs {e_g}", scan.estimate);
}
