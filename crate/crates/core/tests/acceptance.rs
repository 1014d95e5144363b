//! Acceptance checks. Each criterion prints one PASS/FAIL line to stderr
//! (written directly, so it shows without `--nocapture`); the test fails if
//! any criterion fails. Tolerances are the constants below.

use std::collections::BTreeSet;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use juntalab::geometry::{
    hamming_junta_map, max_tail_probability, random_box_pair, random_smooth_map, separated_junta_sets, sine_family,
    VectorMap,
};
use juntalab::inequality::{random_trigpoly, run_suite, RandomPolySpec, Suite};
use juntalab::junta::{best_junta_oracle, extract_junta, select_parameters, Mode, Target};
use juntalab::quad::{
    finite_diff_influences, grid_cond_exp, lipschitz_regularize, mean_est, tent_map, tent_transfer, FiniteMetricSpace,
    FnHandle, ModulusSpec, QuadratureSpec, DEFAULT_FD_STEP, Z99,
};
use juntalab::torus::{CoordSet, GaussianHeat, TrigPoly};

const COEFF_TOL: f64 = 1e-12;
const SUITE_BUDGET: Duration = Duration::from_secs(300);
const TAIL_SE: f64 = 3.0;
const GRID_MATCH_TOL: f64 = 1e-12;
const FD_TOL: f64 = 1e-3;
const SINE_ORACLE_FLOOR: f64 = 0.05;
const ISO_EPS: f64 = 0.1;
const ISO_DELTA: f64 = 0.3;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn poly_family(count: usize, seed: u64, normalize: bool) -> Vec<TrigPoly> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let spec = RandomPolySpec {
                normalize,
                ..RandomPolySpec::new(rng.random_range(1..=5), rng.random_range(1..=3), rng.random())
            };
            random_trigpoly(&spec).unwrap()
        })
        .collect()
}

fn max_coeff_diff(a: &TrigPoly, b: &TrigPoly) -> f64 {
    let keys: BTreeSet<Vec<i32>> = a.coeffs().chain(b.coeffs()).map(|(k, _)| k.as_slice().to_vec()).collect();
    keys.iter().map(|k| (a.coeff(k) - b.coeff(k)).norm()).fold(0.0, f64::max)
}

fn c1_inequality_suite() -> Outcome {
    let suite = Suite::load(&root().join("suites/all.json")).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let reports = run_suite(&suite, None).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let names: BTreeSet<&str> = reports.iter().map(|r| r.name).collect();
    for want in ["heat_l1", "reverse_poincare", "hypercontractivity", "poincare_junta", "smoothed_junta"] {
        ensure(names.contains(want), || format!("suite has no {want} checks"))?;
    }
    let hyper_t: BTreeSet<u64> =
        reports.iter().filter(|r| r.name == "hypercontractivity").filter_map(|r| r.t.map(f64::to_bits)).collect();
    ensure([0.1, 0.5, 1.0].iter().all(|t| hyper_t.contains(&f64::to_bits(*t))), || {
        "hypercontractivity grid misses t in {0.1, 0.5, 1}".into()
    })?;
    let polys = reports.iter().filter(|r| r.name == "poincare_junta").count();
    ensure(polys >= 200, || format!("only {polys} polynomials per check"))?;
    ensure(reports.iter().all(|r| r.n <= 5 && r.degree.is_some_and(|d| d <= 3)), || "instance out of range".into())?;
    let failed: Vec<_> = reports.iter().filter(|r| !r.pass).collect();
    ensure(failed.is_empty(), || {
        format!("{} of {} checks failed, first {:?}", failed.len(), reports.len(), failed[0])
    })?;
    let robust = reports.iter().filter(|r| r.slack > r.lhs_half_width + r.rhs_half_width).count();
    ensure(elapsed < SUITE_BUDGET, || format!("suite took {elapsed:?}"))?;
    Ok(format!(
        "{} checks pass, {} with slack beyond both half-widths, {:.1} s",
        reports.len(),
        robust,
        elapsed.as_secs_f64()
    ))
}

fn heat_oracle(f: &TrigPoly, t: f64) -> TrigPoly {
    let four_pi2 = 4.0 * std::f64::consts::PI.powi(2);
    let coeffs = f.coeffs().map(|(k, c)| {
        let k2: f64 = k.as_slice().iter().map(|&v| (v as f64).powi(2)).sum();
        (k.as_slice().to_vec(), c * (-four_pi2 * k2 * t).exp())
    });
    TrigPoly::from_coeffs(f.dim(), coeffs).unwrap()
}

fn cond_exp_oracle(f: &TrigPoly, s: &CoordSet) -> TrigPoly {
    let coeffs = f
        .coeffs()
        .filter(|(k, _)| k.as_slice().iter().enumerate().all(|(n, &v)| v == 0 || s.contains(n)))
        .map(|(k, c)| (k.as_slice().to_vec(), *c));
    TrigPoly::from_coeffs(f.dim(), coeffs).unwrap()
}

fn c2_operator_algebra() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for f in poly_family(100, 2, false) {
        let (s, t) = (rng.random_range(0.001..0.2), rng.random_range(0.001..0.2));
        let both = f.heat(s).unwrap().heat(t).unwrap();
        worst = worst.max(max_coeff_diff(&both, &f.heat(s + t).unwrap()));
        worst = worst.max(max_coeff_diff(&f.heat(t).unwrap(), &heat_oracle(&f, t)));
        for n in 0..f.dim() {
            let a = f.partial_derivative(n).unwrap().heat(t).unwrap();
            let b = f.heat(t).unwrap().partial_derivative(n).unwrap();
            worst = worst.max(max_coeff_diff(&a, &b));
        }
        let set = CoordSet::new(f.dim(), (0..f.dim()).filter(|_| rng.random::<bool>())).unwrap();
        let e = f.cond_exp(&set).unwrap();
        worst = worst.max(max_coeff_diff(&e.cond_exp(&set).unwrap(), &e));
        worst = worst.max(max_coeff_diff(&e, &cond_exp_oracle(&f, &set)));
        ensure(e.l2_norm() <= f.l2_norm() + COEFF_TOL, || format!("E_S expanded the L2 norm of {f:?}"))?;
    }
    ensure(worst <= COEFF_TOL, || format!("largest coefficient mismatch {worst:e}"))?;
    Ok(format!("100 polynomials, largest coefficient mismatch {worst:.1e}"))
}

fn c3_heat_conventions() -> Outcome {
    const SAMPLES: usize = 4096;
    let mut worst_ratio = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (i, f) in poly_family(20, 3, true).into_iter().enumerate() {
        for t in [0.05, 0.2] {
            let g = GaussianHeat::new(f.dim(), 2.0 * t, SAMPLES, i as u64).unwrap();
            let smoothed = g.apply(&f).unwrap();
            let exact = f.heat(t).unwrap();
            let d = smoothed.sub(&exact).unwrap().l2_norm();
            let mu = (f.l2_norm().powi(2) - exact.l2_norm().powi(2)) / SAMPLES as f64;
            let bound = Z99 * mu.max(0.0).sqrt() + COEFF_TOL;
            ensure(d <= bound, || format!("poly {i}, t = {t}: distance {d:e} exceeds {bound:e}"))?;
            worst_ratio = worst_ratio.max(d / bound);
            // the coefficient form agrees with direct convolution
            let conv = g.smooth(&f.to_handle()).unwrap();
            for _ in 0..4 {
                let x: Vec<f64> = (0..f.dim()).map(|_| rng.random()).collect();
                let gap = (conv.eval(&x) - smoothed.eval(&x)).abs();
                ensure(gap < 1e-9, || format!("poly {i}: convolution differs by {gap:e}"))?;
            }
        }
    }
    Ok(format!("20 polynomials x 2 times, largest distance/CI ratio {worst_ratio:.2}"))
}

fn c4_junta_extraction() -> Outcome {
    let quad = QuadratureSpec::auto(4);
    let family = poly_family(20, 4, true);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for (i, f) in family.iter().enumerate() {
        let target = Target::Poly(f.clone());
        for eps in [0.1, 0.3] {
            let j = extract_junta(&target, &select_parameters(eps, Mode::Empirical).unwrap(), &quad).unwrap();
            let err = j.normalized_error();
            ensure(err.upper() < eps, || format!("poly {i}, eps {eps}: error {err:?}"))?;
            // independent Monte-Carlo measurement of ||f - E_S f||_1
            let proj = f.cond_exp(&j.s).unwrap();
            let vals: Vec<f64> = (0..4000)
                .map(|_| {
                    let x: Vec<f64> = (0..f.dim()).map(|_| rng.random()).collect();
                    (f.eval(&x) - proj.eval(&x)).abs() / j.rescaling
                })
                .collect();
            let m = vals.iter().sum::<f64>() / vals.len() as f64;
            let sd = (vals.iter().map(|v| (v - m).powi(2)).sum::<f64>() / vals.len() as f64).sqrt();
            ensure(m - Z99 * sd / (vals.len() as f64).sqrt() < eps, || {
                format!("poly {i}, eps {eps}: independent error {m}")
            })?;
        }
        for eps in [0.5, 1.0, 2.0] {
            let sched = select_parameters(eps, Mode::Certified).unwrap();
            let j = extract_junta(&target, &sched, &quad).unwrap();
            ensure(j.schedule.size_certificate_holds(j.s.len()), || {
                format!("poly {i}, eps {eps}: |S| = {} breaks eta |S| <= 1", j.s.len())
            })?;
            let ln_bound = sched.ln_eta + (j.s.len().max(1) as f64).ln();
            ensure(ln_bound <= 0.0, || format!("poly {i}: ln(eta |S|) = {ln_bound}"))?;
        }
    }
    // two-mode family a cos(2 pi x1) + b cos(2 pi x2) against the oracle
    let mut compared = 0;
    for n in 2..=5usize {
        for _ in 0..3 {
            let a = rng.random_range(0.05..0.125);
            let b = rng.random_range(0.05..0.125);
            let mut k1 = vec![0; n];
            let mut k2 = vec![0; n];
            k1[0] = 1;
            k2[1] = 1;
            let f = TrigPoly::cosine(&k1, a).unwrap().add(&TrigPoly::cosine(&k2, b).unwrap()).unwrap();
            let target = Target::Poly(f);
            for eps in [0.05, 0.1, 0.2] {
                let j = extract_junta(&target, &select_parameters(eps, Mode::Empirical).unwrap(), &quad).unwrap();
                let oracle = best_junta_oracle(&target, j.s.len(), &quad).unwrap();
                let tol = j.l1_error.half_width + oracle.error.half_width + 1e-9;
                ensure(oracle.error.value <= j.l1_error.value + tol, || {
                    format!("N={n}: oracle {:?} above extraction {:?}", oracle.error, j.l1_error)
                })?;
                ensure(j.l1_error.value <= 2.0 * oracle.error.value + tol, || {
                    format!("N={n}: extraction {:?} over twice oracle {:?}", j.l1_error, oracle.error)
                })?;
                // closed form: dropping cos with amplitude c costs 2c/pi
                let closed = match j.s.len() {
                    0 => None,
                    1 => Some(2.0 * a.min(b) / std::f64::consts::PI),
                    _ => Some(0.0),
                };
                if let Some(c) = closed {
                    ensure((j.l1_error.value - c).abs() <= tol + 1e-6, || {
                        format!("N={n}: error {} vs closed form {c}", j.l1_error.value)
                    })?;
                }
                compared += 1;
            }
        }
    }
    Ok(format!("20 random polynomials in both modes; {compared} two-mode extractions within 2x of the oracle"))
}

fn c5_max_function() -> Outcome {
    let mut lines = Vec::new();
    for (eps, n) in [(0.1, 10usize), (0.05, 20)] {
        let est = max_tail_probability(n, eps, &QuadratureSpec::monte_carlo(1 << 18, 5)).unwrap();
        let exact = 1.0 - (1.0 - eps).powi(n as i32);
        let se = est.half_width / Z99;
        ensure((est.value - exact).abs() <= TAIL_SE * se, || {
            format!("eps {eps}, N {n}: {} vs {exact} (se {se})", est.value)
        })?;
        lines.push(format!("P = {:.4} vs {:.4}", est.value, exact));
    }
    Ok(lines.join("; "))
}

/// Concave piecewise-linear modulus through the origin.
fn random_modulus(rng: &mut ChaCha8Rng) -> ModulusSpec {
    let mut knots = vec![(0.0, 0.0)];
    let mut slope: f64 = rng.random_range(0.5..5.0);
    let (mut r, mut w) = (0.0, 0.0);
    for _ in 0..rng.random_range(1..5) {
        let step = rng.random_range(0.05..0.5);
        r += step;
        w += slope * step;
        knots.push((r, w));
        slope *= rng.random_range(0.0..1.0);
    }
    ModulusSpec::new(knots).unwrap()
}

fn interpolate(knots: &[(f64, f64)], r: f64) -> f64 {
    for w in knots.windows(2) {
        if r <= w[1].0 {
            return w[0].1 + (w[1].1 - w[0].1) * (r - w[0].0) / (w[1].0 - w[0].0);
        }
    }
    let (a, b) = (knots[knots.len() - 2], knots[knots.len() - 1]);
    b.1 + (b.1 - a.1) / (b.0 - a.0) * (r - b.0)
}

fn c6_lipschitz_regularization() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst_dev = 0.0f64;
    for case in 0..50 {
        let size = rng.random_range(2..=30);
        let pts: Vec<[f64; 2]> = (0..size).map(|_| [rng.random(), rng.random()]).collect();
        let d = |i: usize, j: usize| (pts[i][0] - pts[j][0]).abs().max((pts[i][1] - pts[j][1]).abs());
        let space = FiniteMetricSpace::from_fn(size, d).unwrap();
        let omega = random_modulus(&mut rng);
        let anchors: Vec<(usize, f64)> =
            (0..3).map(|_| (rng.random_range(0..size), rng.random_range(-1.0..1.0))).collect();
        let f: Vec<f64> = (0..size)
            .map(|x| anchors.iter().map(|&(a, c)| c + omega.eval(d(x, a))).fold(f64::INFINITY, f64::min))
            .collect();
        let eps = rng.random_range(0.02..0.5);
        let out = lipschitz_regularize(&space, &f, &omega, eps).map_err(|e| format!("case {case}: {e}"))?;
        // concave modulus: omega(r)/r decreases, so K = max(omega(eps)/eps, 1)
        let k = (interpolate(omega.knots(), eps) / eps).max(1.0);
        ensure((out.lipschitz - k).abs() <= 1e-12 * k, || format!("case {case}: K = {} vs {k}", out.lipschitz))?;
        let scale = 1.0 + k * eps + f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for x in 0..size {
            let dev = (f[x] - out.values[x]).abs();
            worst_dev = worst_dev.max(dev / (k * eps));
            ensure(dev <= k * eps + 1e-12 * scale, || format!("case {case}: |f - h| = {dev} at {x}"))?;
            for y in 0..size {
                let gap = (out.values[x] - out.values[y]).abs();
                ensure(gap <= k * d(x, y) + 1e-12 * scale, || format!("case {case}: Lipschitz fails at ({x},{y})"))?;
            }
        }
    }
    Ok(format!("50 spaces, exhaustive pairs; largest |f - h| / (K eps) = {worst_dev:.3}"))
}

fn c7_tent_transfer() -> Outcome {
    let mc = QuadratureSpec::monte_carlo(1 << 16, 7);
    let m1 = mean_est(1, &mc, |x| tent_map(x[0])).unwrap();
    let m2 = mean_est(1, &mc, |x| tent_map(x[0]).powi(2)).unwrap();
    ensure((m1.value - 0.5).abs() <= m1.half_width, || format!("first moment {m1:?}"))?;
    ensure((m2.value - 1.0 / 3.0).abs() <= m2.half_width, || format!("second moment {m2:?}"))?;

    let h = FnHandle::cube(3, |y| y[0] * y[0] * y[1] + (3.0 * y[2]).sin() * y[0]).with_gradient(|y, g| {
        g[0] = 2.0 * y[0] * y[1] + (3.0 * y[2]).sin();
        g[1] = y[0] * y[0];
        g[2] = 3.0 * (3.0 * y[2]).cos() * y[0];
    });
    let lifted = tent_transfer(&h).unwrap();
    let n = 32usize;
    let mut worst = 0.0f64;
    for members in [vec![], vec![0], vec![1, 2], vec![0, 1, 2]] {
        let s = CoordSet::new(3, members).unwrap();
        let cube_side = tent_transfer(&grid_cond_exp(&h, &s, &QuadratureSpec::grid(n / 2, 0)).unwrap()).unwrap();
        let torus_side = grid_cond_exp(&lifted, &s, &QuadratureSpec::grid(n, 0)).unwrap();
        for i in 0..n * n * n {
            let theta = [i / (n * n), (i / n) % n, i % n].map(|j| (j as f64 + 0.5) / n as f64);
            worst = worst.max((cube_side.eval(&theta) - torus_side.eval(&theta)).abs());
        }
    }
    ensure(worst <= GRID_MATCH_TOL, || format!("E_S commutation off by {worst:e}"))?;

    let quad = QuadratureSpec::grid(48, 7);
    let base = finite_diff_influences(&h, DEFAULT_FD_STEP, &quad).unwrap();
    let up = finite_diff_influences(&lifted, DEFAULT_FD_STEP, &quad).unwrap();
    let mut ratios = Vec::new();
    for k in 0..3 {
        let (b, u) = (base.l1[k], up.l1[k]);
        ensure(u.value <= 2.0 * b.value + u.half_width + 2.0 * b.half_width + FD_TOL, || {
            format!("coordinate {}: {u:?} vs 2 x {b:?}", k + 1)
        })?;
        ratios.push(u.value / b.value);
    }
    Ok(format!("moments {:.4}, {:.4}; E_S mismatch {worst:.1e}; influence ratios {:.3?}", m1.value, m2.value, ratios))
}

fn c8_hamming() -> Outcome {
    let eps = 0.2;
    let quad = QuadratureSpec::grid(32, 8);
    let mut maps = vec![VectorMap::identity(3).unwrap()];
    maps.extend((0..4).map(|seed| random_smooth_map(3, 2 + seed as usize, seed).unwrap()));
    for f in &maps {
        let j = hamming_junta_map(f, eps, &quad).map_err(|e| format!("{}: {e}", f.name))?;
        let m = f.m() as f64;
        ensure(j.selected().len() as f64 >= (1.0 - eps / 2.0) * m, || format!("{}: |I| too small", f.name))?;
        ensure(j.total_error.upper() < eps, || format!("{}: total error {:?}", f.name, j.total_error))?;
        ensure(j.supports_hold(), || format!("{}: a G_m leaves its S_m", f.name))?;
    }
    let sine = sine_family(3).unwrap();
    let last = Target::Handle(sine.components()[2].clone());
    let r = best_junta_oracle(&last, 1, &QuadratureSpec::grid(64, 8)).unwrap();
    ensure(r.error.value > SINE_ORACLE_FLOOR, || format!("best 1-junta error {:?}", r.error))?;
    // every E_{n} of the last component is 1/2, leaving E|sin|/2 = 1/pi
    ensure((r.error.value - 1.0 / std::f64::consts::PI).abs() < 1e-3, || format!("oracle {:?} vs 1/pi", r.error))?;
    Ok(format!(
        "{} maps meet |I| and error bounds; sine last component best 1-junta error {:.4}",
        maps.len(),
        r.error.value
    ))
}

fn c9_isoperimetry() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst_loss = 0.0f64;
    let mut min_excess = f64::INFINITY;
    for i in 0..20u64 {
        let n = 2 + (i % 3) as usize;
        let (a, b) = random_box_pair(n, 3, ISO_DELTA, 900 + i).unwrap();
        let quad = QuadratureSpec::grid(32, i);
        let (sets, r) = separated_junta_sets(&a, &b, ISO_DELTA, ISO_EPS, &quad, 1 << 15).unwrap();
        ensure(r.loss_a + r.loss_a_half_width < ISO_EPS && r.loss_b + r.loss_b_half_width < ISO_EPS, || {
            format!("pair {i}: losses {r:?}")
        })?;
        worst_loss = worst_loss.max(r.loss_a.max(r.loss_b));
        if let Some(sep) = r.separation {
            ensure(sep >= ISO_DELTA - ISO_EPS, || format!("pair {i}: separation {sep}"))?;
            min_excess = min_excess.min(sep - (ISO_DELTA - ISO_EPS));
            // sampled points of A' and B' are never closer than reported
            let draw = |rng: &mut ChaCha8Rng, pick: &dyn Fn(&[f64]) -> bool| -> Vec<Vec<f64>> {
                let mut out = Vec::new();
                for _ in 0..20_000 {
                    let x: Vec<f64> = (0..n).map(|_| rng.random()).collect();
                    if pick(&x) {
                        out.push(x);
                    }
                    if out.len() == 200 {
                        break;
                    }
                }
                out
            };
            let xs = draw(&mut rng, &|x| sets.in_a(x));
            let ys = draw(&mut rng, &|y| sets.in_b(y));
            for x in &xs {
                for y in &ys {
                    let d = x.iter().zip(y).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
                    ensure(d >= sep, || format!("pair {i}: sampled distance {d} below {sep}"))?;
                }
            }
        }
    }
    Ok(format!("20 pairs; largest loss {worst_loss:.4}; smallest separation excess over delta - eps {min_excess:.3}"))
}

fn run_cli(args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_juntalab"))
        .args(args)
        .current_dir(root())
        .env_remove("JUNTALAB_SEED")
        .output()
        .unwrap();
    assert!(out.status.code().is_some_and(|c| c <= 1), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn c10_determinism() -> Outcome {
    let runs: &[&[&str]] = &[
        &["verify", "--suite", "suites/smoke.json", "--seed", "7"],
        &["verify", "--suite", "suites/smoke.json", "--seed", "7", "--format", "csv"],
        &["junta", "--fn", "fixtures/two_mode.json", "--epsilon", "0.05", "--mode", "empirical", "--seed", "3"],
        &["influences", "--fn", "fixtures/two_mode.json", "--samples", "4096", "--seed", "3"],
        &["oracle", "--fn", "fixtures/two_mode.json", "--p", "1", "--seed", "3"],
        &["hamming", "--map", "fixtures/random_map.json", "--epsilon", "0.2", "--points", "16", "--seed", "3"],
        &["isoperimetry", "--random", "2", "--dim", "3", "--delta", "0.3", "--points", "16", "--seed", "3"],
    ];
    for args in runs {
        let first = run_cli(args);
        ensure(!first.is_empty(), || format!("{args:?}: empty report"))?;
        ensure(first == run_cli(args), || format!("{args:?}: reports differ"))?;
    }
    let other = run_cli(&["verify", "--suite", "suites/smoke.json", "--seed", "8"]);
    ensure(other != run_cli(runs[0]), || "seed has no effect".into())?;
    Ok(format!("{} commands byte-identical on rerun", runs.len()))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        ("inequality suite", c1_inequality_suite),
        ("exact operator algebra", c2_operator_algebra),
        ("heat conventions", c3_heat_conventions),
        ("junta extraction", c4_junta_extraction),
        ("max function", c5_max_function),
        ("Lipschitz regularization", c6_lipschitz_regularization),
        ("tent transfer", c7_tent_transfer),
        ("Hamming pipeline", c8_hamming),
        ("isoperimetry", c9_isoperimetry),
        ("determinism", c10_determinism),
    ];
    let mut failures = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or(p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default())
        });
        let secs = start.elapsed().as_secs_f64();
        let line = match &outcome {
            Ok(detail) => format!("acceptance {:>2} PASS {name}: {detail} ({secs:.1} s)", i + 1),
            Err(why) => format!("acceptance {:>2} FAIL {name}: {why} ({secs:.1} s)", i + 1),
        };
        let _ = writeln!(std::io::stderr(), "{line}");
        if outcome.is_err() {
            failures.push(line);
        }
    }
    assert!(failures.is_empty(), "{failures:#?}");
}
