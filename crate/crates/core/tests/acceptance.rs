//! Acceptance criteria, one line per criterion. Exits non-zero if any fails.

use std::f64::consts::FRAC_PI_4;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use chernoff_core::approx::{dyadic, error_curve, ErrorCurve, TimeInterval, TimeSpec};
use chernoff_core::bounds::{check_nonsym_trotter_kato, check_spectral_bounds, check_sqrt_n_lemma, power_defect_suite};
use chernoff_core::family::{make_resolvent_family, make_symmetrized_family, make_trotter_family};
use chernoff_core::kato::{default_grid, validate_kato, KatoFunction, REGISTRY};
use chernoff_core::linalg::{hermitian_eig, matrix_exp, matrix_function, operator_norm, unit_resolvent};
use chernoff_core::par::par_map;
use chernoff_core::random::MatrixRng;
use chernoff_core::range::{contained_in_qs_domain, contained_in_sector, range_boundary};
use chernoff_core::{Error, Operator, Regularity, SectorSpec};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn spectral_one_over_n() -> Outcome {
    let start = Instant::now();
    let dims = [2, 4, 8, 16];
    let ns: Vec<u64> = (1..=256).collect();
    let seeds: Vec<u64> = (0..200).collect();
    let worst = par_map(&seeds, |&seed| {
        let f = MatrixRng::new(1000 + seed).hermitian_contraction(dims[seed as usize % 4]);
        check_spectral_bounds(&f, &ns)
            .unwrap()
            .iter()
            .map(|r| r.lhs - (1.0 / r.params["n"] + 1e-10))
            .fold(f64::NEG_INFINITY, f64::max)
    });
    let failures = worst.iter().filter(|&&w| w > 0.0).count();
    let elapsed = start.elapsed();
    outcome(
        failures == 0 && elapsed <= Duration::from_secs(30),
        format!("51200 checks, {failures} failures, {:.2}s", elapsed.as_secs_f64()),
    )
}

fn sqrt_n_lemma() -> Outcome {
    let mut rng = MatrixRng::new(2000);
    let mut failures = 0;
    for _ in 0..500 {
        let d = 1 + rng.index(8);
        let f = rng.contraction(d);
        let w = rng.unit_vector(d);
        let n = 1 + rng.index(64) as u64;
        let r = check_sqrt_n_lemma(&f, n, &w).unwrap();
        if r.lhs > r.rhs + 1e-10 {
            failures += 1;
        }
    }
    outcome(failures == 0, format!("500 triples, {failures} failures"))
}

fn self_adjoint_rate() -> Outcome {
    let seeds: Vec<u64> = (0..20).collect();
    let ns = dyadic(3, 10);
    let curves: Vec<ErrorCurve> = par_map(&seeds, |&seed| {
        let h = MatrixRng::new(3000 + seed).psd(16, 10.0);
        let fam = make_resolvent_family(h, Regularity::SelfAdjoint).unwrap();
        error_curve(&fam, TimeSpec::At(1.0), &ns).unwrap()
    });
    let rhos: Vec<f64> = curves.iter().map(|c| c.fitted.expect("errors above floor").rho).collect();
    let spreads: Vec<f64> = curves.iter().map(|c| c.scaled_spread(1.0)).collect();
    let (rlo, rhi) = (min(&rhos), max(&rhos));
    let smax = max(&spreads);
    outcome(
        rlo >= 0.85 && rhi <= 1.15 && smax <= 3.0,
        format!("rho in [{rlo:.4}, {rhi:.4}], max n*error spread {smax:.3}"),
    )
}

struct SectorialRun {
    cube_failures: usize,
    sector_ok: bool,
    k_1024: f64,
    k_64: f64,
}

fn sectorial_ensemble() -> Vec<SectorialRun> {
    let cells: Vec<(u64, f64)> = (0..20).flat_map(|s| [0.1, 0.5, 1.0].map(|tau| (s, tau))).collect();
    par_map(&cells, |&(seed, tau)| {
        let h = MatrixRng::new(4000 + seed).sectorial(8, FRAC_PI_4, 5.0);
        let sector = SectorSpec::new(FRAC_PI_4).unwrap();
        let sector_ok = contained_in_sector(&range_boundary(&h, 360).unwrap(), sector).0;
        let f = unit_resolvent(&h, tau).unwrap();
        let (k, cube) = power_defect_suite(&f, 1024).unwrap();
        let k_64 = k
            .reports
            .iter()
            .filter(|r| r.params["n"] <= 64.0)
            .map(|r| (r.params["n"] + 1.0) * r.lhs)
            .fold(0.0, f64::max);
        SectorialRun {
            cube_failures: cube.iter().filter(|r| r.lhs > r.rhs + 1e-10).count(),
            sector_ok,
            k_1024: k.k_hat,
            k_64,
        }
    })
}

fn cube_root_bound(runs: &[SectorialRun]) -> Outcome {
    let failures: usize = runs.iter().map(|r| r.cube_failures).sum();
    let sectors = runs.iter().all(|r| r.sector_ok);
    outcome(
        failures == 0 && sectors,
        format!(
            "{} checks (n = 1..1024), {failures} failures, generators in sector: {sectors}",
            runs.len() * 1024
        ),
    )
}

fn k_stabilizes(runs: &[SectorialRun]) -> Outcome {
    let growth = runs
        .iter()
        .map(|r| r.k_1024 / r.k_64 - 1.0)
        .fold(f64::NEG_INFINITY, f64::max);
    let kmax = runs.iter().map(|r| r.k_1024).fold(0.0, f64::max);
    outcome(
        growth <= 0.05,
        format!("max K_hat(1024)/K_hat(64) - 1 = {growth:.2e}, max K_hat = {kmax:.4}"),
    )
}

fn self_adjoint_k() -> Outcome {
    let mut ks = Vec::new();
    for (i, m) in [32usize, 33, 64, 100].iter().enumerate() {
        let spectrum: Vec<f64> = (0..*m).map(|j| j as f64 / (*m - 1) as f64).collect();
        let f = MatrixRng::new(6000 + i as u64).with_spectrum(&spectrum);
        ks.push(chernoff_core::bounds::estimate_k(&f, 128).unwrap().k_hat);
    }
    let (lo, hi) = (min(&ks), max(&ks));
    outcome(lo >= 0.45 && hi <= 0.55, format!("K_hat in [{lo:.6}, {hi:.6}]"))
}

/// Noncommuting PSD pair of the Trotter ensemble.
fn psd_pair(seed: u64) -> (Operator, Operator) {
    let mut rng = MatrixRng::new(7000 + seed);
    (rng.psd(4, 2.0), rng.psd(4, 2.0))
}

/// Commuting PSD pair sharing one random eigenbasis.
fn commuting_pair(seed: u64) -> (Operator, Operator) {
    let mut rng = MatrixRng::new(7500 + seed);
    let u = rng.unitary(4);
    let mut diag = || {
        let d: Vec<Complex64> = (0..4).map(|_| Complex64::new(rng.uniform(0.0, 2.0), 0.0)).collect();
        let m = &u * DMatrix::from_diagonal(&DVector::from_vec(d)) * u.adjoint();
        Operator::new((&m + m.adjoint()) * Complex64::new(0.5, 0.0)).unwrap()
    };
    let a = diag();
    (a, diag())
}

fn commutator_norm(a: &Operator, b: &Operator) -> f64 {
    operator_norm(&(&(a * b) - &(b * a))).unwrap()
}

fn trotter() -> Outcome {
    let ns = dyadic(0, 10);
    let seeds: Vec<u64> = (0..20).collect();
    let results = par_map(&seeds, |&seed| {
        let (a, b) = psd_pair(seed);
        assert!(commutator_norm(&a, &b) > 1e-3);
        let c = error_curve(&make_trotter_family(a, b).unwrap(), TimeSpec::At(1.0), &ns).unwrap();
        let decreasing = c.errors().windows(2).all(|w| w[1] < w[0]);
        let (ca, cb) = commuting_pair(seed);
        let cc = error_curve(&make_trotter_family(ca, cb).unwrap(), TimeSpec::At(1.0), &ns).unwrap();
        (decreasing, c.fitted.unwrap().rho, max(&cc.errors()))
    });
    let decreasing = results.iter().all(|r| r.0);
    let rho_min = results.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let commuting = results.iter().map(|r| r.2).fold(0.0, f64::max);
    outcome(
        decreasing && rho_min >= 0.9 && commuting <= 1e-10,
        format!("strictly decreasing: {decreasing}, min rho {rho_min:.4}, max commuting error {commuting:.2e}"),
    )
}

fn symmetrized_trotter_kato() -> Outcome {
    let ns = dyadic(0, 10);
    let interval = TimeSpec::Over(TimeInterval::new(0.0, 5.0, 101).unwrap());
    let cells: Vec<(&str, u64)> = ["exp", "resolvent-1"]
        .iter()
        .flat_map(|id| (0..10).map(move |s| (*id, s)))
        .collect();
    let results = par_map(&cells, |&(id, seed)| {
        let f = KatoFunction::builtin(id).unwrap();
        let (a, b) = psd_pair(seed);
        let fam = make_symmetrized_family(f.clone(), f, a, b).unwrap();
        let c = error_curve(&fam, interval, &ns).unwrap();
        (c.scaled_spread(1.0), c.fitted.unwrap().rho)
    });
    let mut pass = true;
    let mut detail = Vec::new();
    for id in ["exp", "resolvent-1"] {
        let rs: Vec<(f64, f64)> = cells
            .iter()
            .zip(&results)
            .filter(|(c, _)| c.0 == id)
            .map(|(_, r)| *r)
            .collect();
        // bounded n * sup-error, or a rate beyond 1
        pass &= rs.iter().all(|&(spread, rho)| spread <= 5.0 || rho > 1.0);
        let spread = rs.iter().map(|r| r.0).fold(0.0, f64::max);
        let rho_lo = rs.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
        detail.push(format!("{id}: max spread {spread:.3}, min rho {rho_lo:.3}"));
    }
    outcome(pass, detail.join("; "))
}

fn nonsym_decomposition() -> Outcome {
    let ns = dyadic(0, 10);
    let cells: Vec<(&str, u64)> = ["exp", "resolvent-1"]
        .iter()
        .flat_map(|id| (0..20).map(move |s| (*id, s)))
        .collect();
    let results = par_map(&cells, |&(id, seed)| {
        let f = KatoFunction::builtin(id).unwrap();
        let (a, b) = psd_pair(seed);
        let mut violations = 0;
        let mut rho = f64::NAN;
        for t in [0.5, 1.0, 2.0] {
            let r = check_nonsym_trotter_kato(&f, &f, &a, &b, &ns, t).unwrap();
            violations += r.reports.iter().filter(|r| r.lhs > r.rhs + 1e-12).count();
            if t == 1.0 {
                rho = r.fit.unwrap().rho;
            }
        }
        (violations, rho)
    });
    let violations: usize = results.iter().map(|r| r.0).sum();
    let rho_min = results.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    outcome(
        violations == 0 && rho_min >= 0.9,
        format!(
            "{} (n, t) cells, {violations} violations, min fitted rho {rho_min:.4}",
            cells.len() * ns.len() * 3
        ),
    )
}

fn cross(o: Complex64, a: Complex64, b: Complex64) -> f64 {
    (a - o).re * (b - o).im - (a - o).im * (b - o).re
}

/// Distance from `z` to the convex hull of `pts` (monotone chain hull).
fn hull_distance(z: Complex64, pts: &[Complex64]) -> f64 {
    let mut p = pts.to_vec();
    p.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let mut hull: Vec<Complex64> = Vec::new();
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Complex64>> = if pass == 0 { Box::new(p.iter()) } else { Box::new(p.iter().rev()) };
        for &q in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], q) <= 0.0 {
                hull.pop();
            }
            hull.push(q);
        }
        hull.pop();
    }
    let seg = |a: Complex64, b: Complex64| {
        let ab = b - a;
        let t = if ab.norm_sqr() > 0.0 {
            (((z - a) * ab.conj()).re / ab.norm_sqr()).clamp(0.0, 1.0)
        } else {
            0.0
        };
        (z - (a + ab * t)).norm()
    };
    let k = hull.len();
    let inside = k >= 3 && (0..k).all(|i| cross(hull[i], hull[(i + 1) % k], z) >= 0.0);
    if inside {
        return 0.0;
    }
    (0..k.max(1)).map(|i| seg(hull[i], hull[(i + 1) % k])).fold(f64::INFINITY, f64::min)
}

fn numerical_range_oracle() -> Outcome {
    let jordan = Operator::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
    let b = range_boundary(&jordan, 720).unwrap();
    let radii: Vec<f64> = b.points.iter().map(|z| z.norm()).collect();
    let circle = radii.iter().all(|&r| (0.5 - 1e-3..=0.5 + 1e-9).contains(&r));

    let mut rng = MatrixRng::new(10_000);
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let (a, eig) = rng.normal_with_eigenvalues(2 + i % 7);
        let b = range_boundary(&a, 360).unwrap();
        for &z in &b.points {
            worst = worst.max(hull_distance(z, &eig));
        }
    }
    outcome(
        circle && worst <= 1e-6,
        format!(
            "Jordan radii in [{:.6}, {:.12}], worst normal hull distance {worst:.2e}",
            min(&radii),
            max(&radii)
        ),
    )
}

fn exponential_oracle() -> Outcome {
    let mut rng = MatrixRng::new(11_000);
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let a = rng.psd(1 + i % 16, 10.0);
        let spec = hermitian_eig(&a).unwrap();
        for t in [0.1, 1.0, 10.0] {
            let oracle = matrix_function(&spec, |l| (-t * l).exp()).unwrap();
            worst = worst.max(operator_norm(&(&matrix_exp(&a, t).unwrap() - &oracle)).unwrap());
        }
    }
    outcome(worst <= 1e-10, format!("300 comparisons, max deviation {worst:.2e}"))
}

fn kato_registry() -> Outcome {
    let mut gammas = Vec::new();
    for id in REGISTRY {
        match KatoFunction::builtin(id) {
            Ok(k) => gammas.push(k.gamma()),
            Err(e) => return outcome(false, format!("{id} rejected: {e}")),
        }
    }
    let grid = default_grid();
    let linear = matches!(validate_kato("1+s", |s| 1.0 + s, &grid), Err(Error::InvalidKato { .. }));
    let steep = matches!(
        validate_kato("exp(-2s)", |s: f64| (-2.0 * s).exp(), &grid),
        Err(Error::InvalidKato { clause, .. }) if clause.contains("f'(+0)")
    );
    let ok_gamma = gammas.iter().all(|g| (g - 1.0).abs() <= 1e-6);
    outcome(
        ok_gamma && linear && steep,
        format!(
            "{} accepted, gamma in [{:.9}, {:.9}]; 1+s rejected: {linear}; e^(-2s) rejected on derivative: {steep}",
            REGISTRY.len(),
            min(&gammas),
            max(&gammas)
        ),
    )
}

fn semigroup_in_lens() -> Outcome {
    let sector = SectorSpec::new(FRAC_PI_4).unwrap();
    let mut worst = f64::INFINITY;
    for seed in 0..20 {
        let h = MatrixRng::new(13_000 + seed).sectorial(8, FRAC_PI_4, 5.0);
        for t in [0.1, 1.0, 10.0] {
            let b = range_boundary(&matrix_exp(&h, t).unwrap(), 360).unwrap();
            worst = worst.min(contained_in_qs_domain(&b, sector).1);
        }
    }
    outcome(worst >= -1e-8, format!("60 semigroup ranges, min lens margin {worst:.3e}"))
}

fn scenarios_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios")
}

fn verify(config: &Path, out: &Path, threads: &str) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_chernoff-kit"))
        .args(["verify", "--config"])
        .arg(config)
        .arg("--out")
        .arg(out)
        .env("CHERNOFF_KIT_THREADS", threads)
        .output()
        .expect("run chernoff-kit")
}

fn cli_determinism() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let reference = scenarios_dir().join("reference.json");
    let (one, two) = (tmp.path().join("one"), tmp.path().join("two"));
    let r1 = verify(&reference, &one, "1");
    let r2 = verify(&reference, &two, "0");
    let read = |d: &Path, f: &str| std::fs::read(d.join(f)).unwrap_or_default();
    let identical = ["reports.json", "errors.csv", "summary.txt"]
        .iter()
        .all(|f| !read(&one, f).is_empty() && read(&one, f) == read(&two, f));

    let start = Instant::now();
    let mut statuses = Vec::new();
    let mut entries: Vec<PathBuf> = std::fs::read_dir(scenarios_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    entries.sort();
    for p in &entries {
        let out = verify(p, &tmp.path().join(p.file_stem().unwrap()), "0");
        statuses.push(out.status.code());
    }
    let elapsed = start.elapsed();
    let all_zero = statuses.iter().all(|&c| c == Some(0));
    outcome(
        r1.status.success() && r2.status.success() && identical && all_zero && elapsed <= Duration::from_secs(300),
        format!(
            "reports byte-identical across runs: {identical}; {} bundled scenarios exit 0: {all_zero}; suite {:.2}s",
            entries.len(),
            elapsed.as_secs_f64()
        ),
    )
}

fn min(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::INFINITY, f64::min)
}

fn max(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

fn run(label: &str, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let o = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        outcome(false, format!("panicked: {msg}"))
    });
    println!(
        "{} {label}: {} [{:.2}s]",
        if o.pass { "PASS" } else { "FAIL" },
        o.detail,
        start.elapsed().as_secs_f64()
    );
    o.pass
}

fn main() {
    let mut results = vec![
        run("01 spectral 1/n bound", spectral_one_over_n),
        run("02 sqrt(n) lemma", sqrt_n_lemma),
        run("03 self-adjoint resolvent rate", self_adjoint_rate),
    ];
    let mut runs = Vec::new();
    results.push(run("04 quasi-sectorial n^(-1/3) bound", || {
        runs = sectorial_ensemble();
        cube_root_bound(&runs)
    }));
    results.push(run("05 K/(n+1) estimate stabilizes", || k_stabilizes(&runs)));
    results.extend([
        run("06 self-adjoint K value", self_adjoint_k),
        run("07 Trotter formula", trotter),
        run("08 symmetrized Trotter-Kato", symmetrized_trotter_kato),
        run("09 nonsymmetric decomposition", nonsym_decomposition),
        run("10 numerical range oracle", numerical_range_oracle),
        run("11 exponential oracle agreement", exponential_oracle),
        run("12 Kato registry", kato_registry),
        run("13 semigroup range in lens domain", semigroup_in_lens),
        run("14 CLI determinism", cli_determinism),
    ]);
    let passed = results.iter().filter(|&&p| p).count();
    println!("acceptance: {passed}/{} criteria pass", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
