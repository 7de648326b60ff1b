//! Acceptance suite. Runs every criterion, prints one line each and exits
//! nonzero if any fails.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use toral_core::bounds::{BoundFormula, ExponentPair, ExponentTable};
use toral_core::determinant::{determinant_coeffs, periodic_count, trace_sums, zeros_in_disc, DEFAULT_SAFETY};
use toral_core::fourier::{aniso_norm, apply_multiplier, parseval_norm, AnisoParams, MultiplierDirection, TrigPoly};
use toral_core::growth::{norm_growth, random_test_function, two_norm_fit, GrowthEngine, Projection};
use toral_core::report::fmt_f64;
use toral_core::torus::{torus_delta, ConjugacyDiffeo, SmoothToralMap, ToralAutomorphism};
use toral_core::transfer::{assemble_galerkin, essential_radius_check, spectrum, OperatorKind};
use toral_core::Point;

type Check = std::result::Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond { Ok(()) } else { Err(msg()) }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn cat_params(t: f64) -> AnisoParams {
    let es = ToralAutomorphism::cat().stable().direction;
    AnisoParams::new(-2.0, 4.0, t, es).unwrap()
}

fn shear_map() -> SmoothToralMap {
    SmoothToralMap::conjugated(ToralAutomorphism::cat(), ConjugacyDiffeo::shear(0.03, [0, 1]).unwrap()).unwrap()
}

fn sine_map() -> SmoothToralMap {
    SmoothToralMap::conjugated(ToralAutomorphism::cat(), ConjugacyDiffeo::diagonal_sine(0.02).unwrap()).unwrap()
}

fn closed_forms() -> Check {
    let golden = (3.0 - 5f64.sqrt()) / 2.0;
    let table = ExponentTable::new(&SmoothToralMap::cat(), 8, 32).map_err(err)?;
    let exps = ExponentPair::new(-1.0, 1.0).map_err(err)?;
    let mut worst = 0.0f64;
    for f in [BoundFormula::RhoInfty, BoundFormula::RhoOne] {
        let r = table.report(f, exps, 2.0).map_err(err)?;
        for v in r.raw.iter().chain(std::iter::once(&r.limit)) {
            worst = worst.max((v - golden).abs());
        }
    }
    ensure(worst < 1e-10, || format!("max deviation {worst:e}"))?;
    Ok(format!("max deviation {worst:.1e}"))
}

/// Count `x ∈ (ℤ/D)²` with `Mⁿ x ≡ x (mod D)` where `D = |det(Mⁿ − I)|`.
fn brute_force_count(m: [[i64; 2]; 2], n: u32) -> u64 {
    let mut p = [[1i64, 0], [0, 1]];
    for _ in 0..n {
        p = [
            [p[0][0] * m[0][0] + p[0][1] * m[1][0], p[0][0] * m[0][1] + p[0][1] * m[1][1]],
            [p[1][0] * m[0][0] + p[1][1] * m[1][0], p[1][0] * m[0][1] + p[1][1] * m[1][1]],
        ];
    }
    let d = ((p[0][0] - 1) * (p[1][1] - 1) - p[0][1] * p[1][0]).abs();
    let mut count = 0;
    for i in 0..d {
        for j in 0..d {
            let a = (p[0][0] * i + p[0][1] * j - i).rem_euclid(d);
            let b = (p[1][0] * i + p[1][1] * j - j).rem_euclid(d);
            if a == 0 && b == 0 {
                count += 1;
            }
        }
    }
    count
}

fn determinant_exactness() -> Check {
    let cat = SmoothToralMap::cat();
    let traces = trace_sums(&cat, 10).map_err(err)?;
    let series = determinant_coeffs(&traces);
    for (k, c) in series.coeffs.iter().enumerate() {
        let expect = match k {
            0 => 1.0,
            1 => -1.0,
            _ => 0.0,
        };
        ensure((c - expect).abs() < 1e-13, || format!("coefficient {k} = {c:e}"))?;
    }
    let zeros = zeros_in_disc(&series, 1.0 / 0.1459, DEFAULT_SAFETY).map_err(err)?;
    ensure(zeros.len() == 1, || format!("{} zeros in the disc", zeros.len()))?;
    let dz = (zeros[0].z() - Complex64::new(1.0, 0.0)).norm();
    ensure(dz < 1e-10, || format!("zero off by {dz:e}"))?;
    let expected = [1u64, 5, 16, 45];
    for n in 1..=4u32 {
        let formula = periodic_count(cat.base(), n).map_err(err)? as u64;
        let brute = brute_force_count(cat.base().entries(), n);
        let listed = toral_core::determinant::enumerate_periodic(&cat, n).map_err(err)?.count() as u64;
        ensure(formula == expected[n as usize - 1] && brute == formula && listed == formula, || {
            format!("n = {n}: formula {formula}, brute force {brute}, enumerated {listed}")
        })?;
    }
    Ok(format!("zero at 1 within {dz:.1e}"))
}

/// Dual orbits `k, Mᵀk, …` of nonzero modes must leave the box without
/// cycling, so the nonconstant part of the section is nilpotent.
fn orbit_escape(m: [[i64; 2]; 2], n: i64) -> bool {
    let inside = |k: [i64; 2]| k[0].abs() <= n && k[1].abs() <= n;
    for k1 in -n..=n {
        for k2 in -n..=n {
            if k1 == 0 && k2 == 0 {
                continue;
            }
            let mut k = [k1, k2];
            let mut steps = 0;
            while inside(k) {
                k = [m[0][0] * k[0] + m[1][0] * k[1], m[0][1] * k[0] + m[1][1] * k[1]];
                steps += 1;
                if steps > (2 * n + 1).pow(2) {
                    return false;
                }
            }
        }
    }
    true
}

fn spectral_collapse() -> Check {
    let cat = SmoothToralMap::cat();
    let params = cat_params(2.0);
    let mut detail = Vec::new();
    for n in [8usize, 16, 32] {
        ensure(orbit_escape(cat.base().entries(), n as i64), || format!("dual orbit cycles in box {n}"))?;
        let m = assemble_galerkin(OperatorKind::L, &cat, &params, n).map_err(err)?;
        let spec = spectrum(&m).map_err(err)?;
        let big: Vec<Complex64> = spec.values().into_iter().filter(|z| z.norm() > 1e-6).collect();
        ensure(big.len() == 1, || format!("N = {n}: {} eigenvalues above 1e-6", big.len()))?;
        ensure((big[0] - 1.0).norm() < 1e-10, || format!("N = {n}: leading eigenvalue {}", big[0]))?;
        let second = spec.eigenvalues.get(1).map_or(0.0, |e| e.modulus());
        ensure(second < 1e-8, || format!("N = {n}: second modulus {second:e}"))?;
        detail.push(format!("N={n} second {second:.1e}"));
    }
    Ok(detail.join(", "))
}

fn conjugation_covariance() -> Check {
    let map = shear_map();
    let params = cat_params(2.0);
    let exps = ExponentPair::new(-2.0, 2.0).map_err(err)?;
    let bound = ExponentTable::new(&map, 10, 64)
        .and_then(|t| t.report(BoundFormula::RhoInfty, exps, 2.0))
        .map_err(err)?
        .limit;
    let coarse = spectrum(&assemble_galerkin(OperatorKind::L, &map, &params, 32).map_err(err)?).map_err(err)?;
    let fine = spectrum(&assemble_galerkin(OperatorKind::L, &map, &params, 40).map_err(err)?).map_err(err)?;
    let check = essential_radius_check(&coarse, &fine, bound, 0.05);
    let stable = check.stable_outliers();
    ensure(stable.len() == 1 && (stable[0] - 1.0).norm() < 2e-3, || format!("stable outliers {stable:?}"))?;
    let traces = trace_sums(&map, 6).map_err(err)?;
    for (i, t) in traces.iter().enumerate() {
        ensure((t - 1.0).abs() < 1e-8, || format!("t_{} = {t}", i + 1))?;
    }
    let series = determinant_coeffs(&traces);
    let zeros = zeros_in_disc(&series, 1.0 / bound, DEFAULT_SAFETY).map_err(err)?;
    let hit = zeros.iter().find(|z| (z.z() - 1.0).norm() <= z.error_bar.max(1e-12));
    ensure(hit.is_some(), || format!("no zero at 1 within its error bar: {zeros:?}"))?;
    Ok(format!("rho_infty {bound:.5}, outliers {stable:?}"))
}

fn bound_ordering() -> Check {
    let maps = [
        SmoothToralMap::cat(),
        shear_map(),
        sine_map(),
    ];
    let pairs = [(-1.0, 1.0), (-2.0, 2.0), (-1.0, 3.0), (-3.0, 1.0)];
    let ts = [1.25, 2.0, 8.0];
    let mut worst_l1 = 0.0f64;
    for map in &maps {
        let table = ExponentTable::new(map, 10, 256).map_err(err)?;
        for &(p, s) in &pairs {
            let exps = ExponentPair::new(p, s).map_err(err)?;
            let inf = table.report(BoundFormula::RhoInfty, exps, 2.0).map_err(err)?;
            let one = table.report(BoundFormula::RhoOne, exps, 2.0).map_err(err)?;
            for (n, (a, b)) in one.raw.iter().zip(&inf.raw).enumerate() {
                ensure(*a <= b + 1e-10, || format!("rho_one {a} > rho_infty {b} at n = {}", n + 1))?;
            }
            for &t in &ts {
                let u = table.report(BoundFormula::PropL1U, exps, t).map_err(err)?.limit;
                let s = table.report(BoundFormula::PropL1S, exps, t).map_err(err)?.limit;
                worst_l1 = worst_l1.max((u - s).abs());
            }
        }
        let mut prev = f64::INFINITY;
        for t in [1.5, 2.0, 4.0, 16.0, 256.0, 1e4, 1e8] {
            let gap = (table.jacobian_prefactor(t, 10) - 1.0).abs();
            ensure(gap <= prev, || format!("prefactor gap grew to {gap:e} at t = {t}"))?;
            prev = gap;
        }
        ensure(prev < 1e-6, || format!("prefactor gap {prev:e} at t = 1e8"))?;
    }
    ensure(worst_l1 < 1e-3, || format!("averaged forms differ by {worst_l1:e}"))?;
    Ok(format!("averaged forms agree to {worst_l1:.1e}"))
}

fn ly_growth() -> Check {
    let cat = SmoothToralMap::cat();
    let params = cat_params(2.0);
    let n = 16;
    let engine = GrowthEngine::new(OperatorKind::L, &cat, n, Projection::ConstantMode).map_err(err)?;
    let raw_engine = GrowthEngine::new(OperatorKind::L, &cat, n, Projection::None).map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let fs: Vec<TrigPoly> = (0..20).map(|_| random_test_function(&mut rng, n)).collect();
    let limit = 0.14590f64.ln() + 0.02;
    let mut worst_slope = f64::NEG_INFINITY;
    let mut worst_fit = 0.0f64;
    for e in [&engine, &raw_engine] {
        let records = fs
            .iter()
            .map(|f| norm_growth(e, &params, f, 12, "random"))
            .collect::<Result<Vec<_>, _>>()
            .map_err(err)?;
        if std::ptr::eq(e, &engine) {
            for r in &records {
                worst_slope = worst_slope.max(r.slope);
            }
        }
        worst_fit = worst_fit.max(two_norm_fit(&records, 0.14590).map_err(err)?.max_residual());
    }
    ensure(worst_slope <= limit, || format!("projected slope {worst_slope} above {limit}"))?;
    ensure(worst_fit < 0.05, || format!("two-norm fit residual {worst_fit:e}"))?;
    let mut worst_t = 0.0f64;
    for k in [[1i64, 0], [3, 2], [-2, 5]] {
        let f = TrigPoly::mode(n, k);
        let base = norm_growth(&raw_engine, &params, &f, 6, "mode").map_err(err)?;
        for t in [1.5, 4.0] {
            let other = norm_growth(&raw_engine, &params.with_t(t).map_err(err)?, &f, 6, "mode").map_err(err)?;
            for (a, b) in base.strong.iter().zip(&other.strong) {
                worst_t = worst_t.max((a - b).abs() / a.max(f64::MIN_POSITIVE));
            }
        }
    }
    ensure(worst_t < 1e-10, || format!("single-mode t dependence {worst_t:e}"))?;
    Ok(format!("projected slope {worst_slope:.1}, fit residual {worst_fit:.1e}, t spread {worst_t:.1e}"))
}

fn appendix_witness() -> Check {
    let map = sine_map();
    let exps = ExponentPair::new(-2.0, 2.0).map_err(err)?;
    let table = ExponentTable::new(&map, 10, 64).map_err(err)?;
    let direct = table.report(BoundFormula::AppendixLt, exps, 1.25).map_err(err)?.limit;
    let dual = table.report(BoundFormula::AppendixMt, exps, 8.0).map_err(err)?.limit;
    let n = 16;
    let mut detail = Vec::new();
    for (kind, t, bound) in [(OperatorKind::Lt(1.25), 1.25, direct), (OperatorKind::Mt(8.0), 8.0, dual)] {
        let params = cat_params(t);
        let engine = GrowthEngine::new(kind, &map, n, Projection::PointSpectrum { threshold: 0.5 }).map_err(err)?;
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut worst = f64::NEG_INFINITY;
        for _ in 0..4 {
            let f = random_test_function(&mut rng, n);
            worst = worst.max(norm_growth(&engine, &params, &f, 12, "random").map_err(err)?.slope);
        }
        let limit = bound.ln() + 0.05;
        ensure(worst <= limit, || format!("{kind}: slope {worst} above {limit}"))?;
        detail.push(format!("{kind} slope {worst:.2} vs {limit:.2}"));
    }
    Ok(detail.join(", "))
}

fn hygiene() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let params = cat_params(2.0);
    let mut worst_parseval = 0.0f64;
    let mut worst_trip = 0.0f64;
    for _ in 0..100 {
        let f = TrigPoly::random(&mut rng, 8, true);
        let q = aniso_norm(&f, &params).map_err(err)?;
        let p = parseval_norm(&f, &params);
        worst_parseval = worst_parseval.max((q - p).abs() / p);
        let back = apply_multiplier(
            &apply_multiplier(&f, &params, MultiplierDirection::Forward),
            &params,
            MultiplierDirection::Inverse,
        );
        let diff = f.coeffs().iter().zip(back.coeffs()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        worst_trip = worst_trip.max(diff / f.max_abs());
    }
    ensure(worst_parseval < 1e-10, || format!("Parseval mismatch {worst_parseval:e}"))?;
    ensure(worst_trip < 1e-13, || format!("multiplier round trip {worst_trip:e}"))?;

    let map = sine_map();
    let h = 1e-5;
    let mut worst_fd = 0.0f64;
    for i in 0..10 {
        let w = Point::new(0.1 + 0.083 * i as f64, 0.7 - 0.061 * i as f64);
        let d = map.differential(&w, 1).map_err(err)?;
        for c in 0..2 {
            let mut e = Point::zeros();
            e[c] = h;
            let fwd = map.evaluate(&(w + e), 1).map_err(err)?;
            let bwd = map.evaluate(&(w - e), 1).map_err(err)?;
            let fd = torus_delta(&fwd, &bwd) / (2.0 * h);
            for r in 0..2 {
                worst_fd = worst_fd.max((fd[r] - d[(r, c)]).abs() / d.norm());
            }
        }
    }
    ensure(worst_fd < 1e-6, || format!("differential vs finite differences {worst_fd:e}"))?;

    let a = pipeline_fingerprint().map_err(err)?;
    let b = pipeline_fingerprint().map_err(err)?;
    ensure(a == b, || "repeated runs differ".to_string())?;
    Ok(format!(
        "Parseval {worst_parseval:.1e}, round trip {worst_trip:.1e}, finite differences {worst_fd:.1e}, {} bytes identical",
        a.len()
    ))
}

fn pipeline_fingerprint() -> toral_core::Result<String> {
    let map = shear_map();
    let params = cat_params(2.0);
    let mut out = String::new();
    let m = assemble_galerkin(OperatorKind::Lt(2.0), &map, &params, 10)?;
    for z in m.data() {
        out.push_str(&format!("{},{}\n", fmt_f64(z.re), fmt_f64(z.im)));
    }
    for e in spectrum(&m)?.eigenvalues {
        out.push_str(&format!("{},{}\n", fmt_f64(e.value.re), fmt_f64(e.value.im)));
    }
    let table = ExponentTable::new(&map, 6, 32)?;
    let r = table.report(BoundFormula::Thm1, ExponentPair::new(-2.0, 2.0)?, 2.0)?;
    for v in r.raw.iter().chain(&r.accelerated) {
        out.push_str(&fmt_f64(*v));
        out.push('\n');
    }
    Ok(out)
}

fn main() {
    let criteria: [(&str, fn() -> Check, u64); 8] = [
        ("1 cat-map closed forms", closed_forms, 5),
        ("2 determinant exactness", determinant_exactness, 10),
        ("3 spectral collapse", spectral_collapse, 60),
        ("4 conjugation covariance", conjugation_covariance, 300),
        ("5 bound ordering", bound_ordering, 120),
        ("6 LY growth", ly_growth, 180),
        ("7 appendix witness", appendix_witness, 300),
        ("8 numerical hygiene", hygiene, 600),
    ];
    let mut failed = 0;
    for (name, run, budget) in criteria {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let result = result.and_then(|d| {
            if elapsed <= Duration::from_secs(budget) {
                Ok(d)
            } else {
                Err(format!("{d}; took {:.1} s, limit {budget} s", elapsed.as_secs_f64()))
            }
        });
        match result {
            Ok(d) => println!("PASS criterion {name} ({:.2} s): {d}", elapsed.as_secs_f64()),
            Err(d) => {
                failed += 1;
                println!("FAIL criterion {name} ({:.2} s): {d}", elapsed.as_secs_f64());
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
