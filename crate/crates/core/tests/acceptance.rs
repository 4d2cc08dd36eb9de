//! End-to-end acceptance checks. Each test writes one `PASS`/`FAIL` line
//! straight to stdout, so the verdicts show up without `--nocapture`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use qttfit::experiments::bonds::{exact_bonds, tci_error_scan};
use qttfit::experiments::{
    bonddim_scan, corr_learn, gs_energy, sine_demo, BonddimReport, Command, GsEnergyReport, Method, RunConfig,
    SineDemoReport,
};
use qttfit::fit::{cost, cost_and_gradient, ParameterVector};
use qttfit::pite::{check_bounds, mc_estimate, time_grid, tt_estimate, KernelParams};
use qttfit::qsim::{build_tfim, Spectrum};
use qttfit::quantics::QuanticsGrid;
use qttfit::tci::MeasurementLedger;
use qttfit::{TensorTrain, TruncationSpec, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn verdict(n: u32, pass: bool, detail: String) {
    let line = format!("{} criterion {n:2}: {detail}\n", if pass { "PASS" } else { "FAIL" });
    // Bypasses the test harness capture.
    let mut out = std::io::stdout().lock();
    out.write_all(line.as_bytes()).unwrap();
    out.flush().unwrap();
    assert!(pass, "criterion {n} failed: {detail}");
}

struct Timed<T> {
    value: T,
    elapsed: Duration,
}

fn timed<T>(f: impl FnOnce() -> T) -> Timed<T> {
    let start = Instant::now();
    let value = f();
    Timed { value, elapsed: start.elapsed() }
}

fn sine_report() -> &'static Timed<SineDemoReport> {
    static R: OnceLock<Timed<SineDemoReport>> = OnceLock::new();
    R.get_or_init(|| timed(|| sine_demo(&RunConfig::defaults(Command::SineDemo)).unwrap()))
}

fn gs_report() -> &'static Timed<GsEnergyReport> {
    static R: OnceLock<Timed<GsEnergyReport>> = OnceLock::new();
    R.get_or_init(|| timed(|| gs_energy(&RunConfig::defaults(Command::GsEnergy)).unwrap()))
}

fn bonddim_report() -> &'static BonddimReport {
    static R: OnceLock<BonddimReport> = OnceLock::new();
    R.get_or_init(|| bonddim_scan(&RunConfig::defaults(Command::BonddimScan)).unwrap())
}

#[test]
fn c01_sine_denoising() {
    let r = sine_report();
    let beats = r.value.trials.iter().map(|o| &o.trial).filter(|t| t.err_opt < t.err_itpl && t.err_opt < t.err_init).count();
    let eps = r.value.summary.mean_tci_error;
    let pass = r.value.trials.len() == 20
        && beats >= 18
        && (0.17..=0.70).contains(&eps)
        && r.elapsed <= Duration::from_secs(300);
    verdict(
        1,
        pass,
        format!(
            "opt beats itpl and init in {beats}/20 trials; mean ε_TCI {eps:.3} in [0.17, 0.70]; {:.1} s",
            r.elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn c02_compression_ablation() {
    let s = &sine_report().value.summary;
    verdict(
        2,
        s.mean_abs_err_opt < s.mean_abs_err_uncompressed,
        format!(
            "compressed then refit {:.4e} < refit at χ̃ {:.4e}",
            s.mean_abs_err_opt, s.mean_abs_err_uncompressed
        ),
    );
}

#[test]
fn c03_exact_qtt_ranks() {
    let grid = QuanticsGrid::unit(1, 10).unwrap();
    let dims = grid.local_dims();
    let compress = |f: &dyn Fn(f64) -> f64| {
        let dense: Vec<C64> = grid.all_indices().map(|i| C64::new(f(grid.decode(&i).unwrap()[0]), 0.0)).collect();
        let tt = TensorTrain::from_dense(&dense, &dims, TruncationSpec::tolerance(1e-20)).unwrap();
        let scale = dense.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let err = tt.to_dense().iter().zip(&dense).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) / scale;
        (tt.max_bond(), err)
    };
    let lambda = 1.7;
    let (b_exp, e_exp) = compress(&|x| (lambda * x).exp());
    let (b_sin, e_sin) = compress(&|x| (2.0 * PI * x).sin());
    verdict(
        3,
        b_exp == 1 && b_sin == 2 && e_exp <= 1e-10 && e_sin <= 1e-10,
        format!("e^(λx) bond {b_exp} (error {e_exp:.1e}), sin(2πx) bond {b_sin} (error {e_sin:.1e}) at R = 10"),
    );
}

fn all_indices(dims: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &d in dims {
        out = out
            .into_iter()
            .flat_map(|p| (0..d).map(move |s| {
                let mut q = p.clone();
                q.push(s);
                q
            }))
            .collect();
    }
    out
}

#[test]
fn c04_oracle_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for len in 1..=10 {
        let dims: Vec<usize> = (0..len).map(|k| if len <= 6 && k == len / 2 { 3 } else { 2 }).collect();
        let bonds: Vec<usize> = (1..len).map(|_| rng.random_range(1..=4)).collect();
        let a = TensorTrain::random(&dims, &bonds, &mut rng).unwrap();
        let b = TensorTrain::random(&dims, &bonds, &mut rng).unwrap();
        let c = TensorTrain::elementwise_multiply(&a, &b, TruncationSpec::exact()).unwrap();
        let idx = all_indices(&dims);
        let (da, db, dc) = (a.to_dense(), b.to_dense(), c.to_dense());
        let max_a = da.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let max_c = da.iter().zip(&db).map(|(x, y)| (x * y).norm()).fold(0.0, f64::max);
        for (k, i) in idx.iter().enumerate() {
            // Dense reference by explicit matrix products.
            let mut v = vec![C64::new(1.0, 0.0)];
            for (core, &s) in a.cores().iter().zip(i) {
                v = (0..core.right_dim()).map(|r| (0..core.left_dim()).map(|l| v[l] * core.get(l, s, r)).sum()).collect();
            }
            worst = worst.max((a.evaluate(i).unwrap() - v[0]).norm() / max_a);
            worst = worst.max((da[k] - v[0]).norm() / max_a);
            worst = worst.max((dc[k] - da[k] * db[k]).norm() / max_c);
        }
        let vol = 0.37;
        let direct: C64 = da.iter().sum::<C64>() * vol;
        let abs_sum = da.iter().map(|v| v.norm()).sum::<f64>() * vol;
        worst = worst.max((a.integrate(vol) - direct).norm() / abs_sum);
    }

    let p = KernelParams::new(1.0, 2.0, 2.0).unwrap();
    let grid = time_grid(&p, 5).unwrap();
    let dims = grid.local_dims();
    let corr = TensorTrain::random(&dims, &vec![3; dims.len() - 1], &mut rng).unwrap();
    let kernel_dense: Vec<C64> = grid
        .all_indices()
        .map(|i| {
            let x = grid.decode(&i).unwrap();
            C64::new(p.g(x[0]) * p.g(x[1]), 0.0)
        })
        .collect();
    let kernel = TensorTrain::from_dense(&kernel_dense, &dims, TruncationSpec::exact()).unwrap();
    let mut worst_estimate: f64 = 0.0;
    for e0 in [-3.0, -0.4, 1.3] {
        let est = tt_estimate(&corr, &kernel, e0, &grid, TruncationSpec::exact()).unwrap();
        let (mut sum, mut abs) = (C64::new(0.0, 0.0), 0.0);
        for (k, i) in grid.all_indices().enumerate() {
            let x = grid.decode(&i).unwrap();
            let term = kernel_dense[k] * C64::from_polar(1.0, e0 * (x[0] - x[1])) * corr.evaluate(&i).unwrap();
            sum += term;
            abs += term.norm();
        }
        let h = grid.cell_volume();
        worst_estimate = worst_estimate.max((est - sum * h).norm() / (abs * h));
    }
    verdict(
        4,
        worst <= 1e-9 && worst_estimate <= 1e-9,
        format!("evaluate/multiply/integrate worst relative {worst:.1e}; estimate vs double sum at R = 5 {worst_estimate:.1e}"),
    );
}

#[test]
fn c05_gradient_check() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let dims = [2, 2, 3, 2, 2, 2];
    let tt = TensorTrain::random(&dims, &[2, 3, 4, 3, 2], &mut rng).unwrap();
    let mut points = BTreeMap::new();
    while points.len() < 60 {
        let idx: Vec<usize> = dims.iter().map(|&d| rng.random_range(0..d)).collect();
        points.insert(idx, C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    }
    let ledger = MeasurementLedger::from_points(points).unwrap();
    let (_, g) = cost_and_gradient(&tt, &ledger).unwrap();
    let x = ParameterVector::from_tt(&tt);
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let k = rng.random_range(0..x.len());
        let at = |d: f64| {
            let mut y = x.clone();
            y.0[k] += d;
            cost(&y.to_tt(&tt).unwrap(), &ledger).unwrap()
        };
        let fd = (at(h) - at(-h)) / (2.0 * h);
        // Relative to the component, floored so vanishing entries do not divide by zero.
        worst = worst.max((fd - g.0[k]).abs() / g.0[k].abs().max(1e-2));
    }
    verdict(5, worst <= 1e-6, format!("100 random components, worst relative error {worst:.1e}"));
}

#[test]
fn c06_filter_bounds() {
    let p = KernelParams::new(1.0, 2.0, 2.0).unwrap();
    let spectrum = Spectrum::new(&build_tfim(2, 1.2).unwrap()).unwrap();
    let mut held = 0;
    let mut details = Vec::new();
    for de in [0.25, 0.5, 1.0, 1.5, 2.5] {
        let c = check_bounds(&spectrum, spectrum.ground_energy() - de, &p).unwrap();
        held += c.holds() as usize;
        details.push(format!(
            "ΔE {de}: {:.1e} ≤ {:.1e}, {:.1e} ≤ {:.1e}",
            c.filter_error, c.gamma_g, c.truncation_error, c.gamma_t
        ));
    }
    verdict(6, held == 5, format!("{held}/5 E0 values; {}", details.join("; ")));
}

#[test]
fn c07_bond_dimensions_and_plateau() {
    let cfg = RunConfig::defaults(Command::BonddimScan);
    let bonds: Vec<(usize, usize)> =
        [2, 4, 6].iter().map(|&n| exact_bonds(&cfg, n).unwrap()).map(|s| (s.max_bond_num, s.max_bond_den)).collect();
    let small = bonds.iter().all(|&(a, b)| a <= 12 && b <= 12);

    // Noisy scan at the default cap χ̃*: a clear drop from χ̃ = 1, then a
    // tail that neither keeps falling nor blows up.
    let scan = &bonddim_report().tci_scan;
    let star = cfg.chi_tilde;
    let plateau = |err: &dyn Fn(usize) -> f64| {
        let at_star = err(star);
        let tail: Vec<f64> = (star..=cfg.chi_tilde_max).map(err).collect();
        let lo = tail.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = tail.iter().cloned().fold(0.0, f64::max);
        err(1) >= 1.5 * at_star && lo >= at_star / 2.0 && hi <= 3.0 * at_star
    };
    let noisy_num = |c: usize| scan[c - 1].error_num;
    let noisy_den = |c: usize| scan[c - 1].error_den;

    // Without shot noise the same scan keeps improving past the noisy floor.
    let mut free = cfg.clone();
    free.shots = 0;
    free.trials = 1;
    let control = tci_error_scan(&free).unwrap();
    let last = control.last().unwrap();
    let floor_num = (star..=cfg.chi_tilde_max).map(noisy_num).fold(f64::INFINITY, f64::min);
    let floor_den = (star..=cfg.chi_tilde_max).map(noisy_den).fold(f64::INFINITY, f64::min);
    let control_ok = last.error_num < floor_num / 5.0 && last.error_den < floor_den / 5.0;

    let pass = small && plateau(&noisy_num) && plateau(&noisy_den) && control_ok;
    verdict(
        7,
        pass,
        format!(
            "max bonds (num, den) for n = 2, 4, 6: {bonds:?}; noisy ε_TCI num {:.3} → {:.3}, den {:.3} → {:.3} (χ̃ 1 → {star}); noise-free χ̃ = {}: {:.1e}, {:.1e}",
            noisy_num(1),
            noisy_num(star),
            noisy_den(1),
            noisy_den(star),
            cfg.chi_tilde_max,
            last.error_num,
            last.error_den
        ),
    );
}

#[test]
fn c08_ground_state_energy() {
    let r = gs_report();
    let get = |m| r.value.summary(m).unwrap();
    let (p, q, mc) = (get(Method::Proposed), get(Method::Qtci), get(Method::Mc));
    let e_g = r.value.ground_energy;
    let within = ((p.mean_estimate - e_g) / e_g).abs();
    let pass = (e_g - -2.529822128134704).abs() < 1e-9
        && p.mean_relative_error < q.mean_relative_error
        && p.mean_relative_error < mc.mean_relative_error
        && within <= 0.02
        && r.elapsed <= Duration::from_secs(3600);
    verdict(
        8,
        pass,
        format!(
            "mean |relative error| proposed {:.2e} < qtci {:.2e}, < mc {:.2e} at budget {:?}; mean estimate {:.5} vs E_g {e_g:.6} ({:.2}%); {:.1} s",
            p.mean_relative_error,
            q.mean_relative_error,
            mc.mean_relative_error,
            r.value.mc_budget.unwrap(),
            p.mean_estimate,
            100.0 * within,
            r.elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn c09_monte_carlo_rate() {
    let p = KernelParams::new(1.0, 2.0, 2.0).unwrap();
    let spread = |n: usize| {
        let est: Vec<C64> = (0..50u64)
            .map(|s| mc_estimate(|_, _| C64::new(1.0, 0.0), &p, 1.0, n, 9_000 + s).unwrap().value())
            .collect();
        let mean = est.iter().sum::<C64>() / est.len() as f64;
        (est.iter().map(|z| (z - mean).norm_sqr()).sum::<f64>() / (est.len() - 1) as f64).sqrt()
    };
    let (s3, s4) = (spread(1_000), spread(10_000));
    let ratio = s3 / s4;
    let target = 10f64.sqrt();
    verdict(
        9,
        (0.7 * target..=1.3 * target).contains(&ratio),
        format!("std over 50 seeds {s3:.3e} at N = 1e3, {s4:.3e} at N = 1e4; ratio {ratio:.3} vs √10 = {target:.3}"),
    );
}

fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect()
}

#[test]
fn c10_determinism() {
    let root = tempfile::tempdir().unwrap();
    let save_twice = |name: &str, first: &dyn Fn(&Path), second: &dyn Fn(&Path)| {
        let (a, b) = (root.path().join(format!("{name}_a")), root.path().join(format!("{name}_b")));
        first(&a);
        second(&b);
        let (sa, sb) = (snapshot(&a), snapshot(&b));
        let same = !sa.is_empty() && sa == sb;
        (sa.len(), same)
    };
    let runs = [
        (
            "sine-demo",
            save_twice(
                "sine",
                &|d| sine_report().value.save(d).unwrap(),
                &|d| sine_demo(&RunConfig::defaults(Command::SineDemo)).unwrap().save(d).unwrap(),
            ),
        ),
        (
            "corr-learn",
            save_twice(
                "corr",
                &|d| corr_learn(&RunConfig::defaults(Command::CorrLearn)).unwrap().save(d).unwrap(),
                &|d| corr_learn(&RunConfig::defaults(Command::CorrLearn)).unwrap().save(d).unwrap(),
            ),
        ),
        (
            "gs-energy",
            save_twice(
                "gs",
                &|d| gs_report().value.save(d).unwrap(),
                &|d| gs_energy(&RunConfig::defaults(Command::GsEnergy)).unwrap().save(d).unwrap(),
            ),
        ),
        (
            "bonddim-scan",
            save_twice(
                "bonds",
                &|d| bonddim_report().save(d).unwrap(),
                &|d| bonddim_scan(&RunConfig::defaults(Command::BonddimScan)).unwrap().save(d).unwrap(),
            ),
        ),
    ];
    let pass = runs.iter().all(|(_, (_, same))| *same);
    let detail = runs.iter().map(|(n, (files, same))| format!("{n} {files} files {}", if *same { "identical" } else { "DIFFER" }));
    verdict(10, pass, detail.collect::<Vec<_>>().join(", "));
}
