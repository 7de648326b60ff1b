//! The four subcommands. Each writes its result files into the run directory
//! and returns a verdict for the manifest.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};
use toral_core::bounds::{kitaev_disc_radius, BoundFormula, BoundReport, ExponentTable};
use toral_core::determinant::{determinant_coeffs, resonance_match, trace_sums, zeros_in_disc, DEFAULT_SAFETY};
use toral_core::growth::{bound_comparison, norm_growth, random_test_function, two_norm_fit, GrowthEngine};
use toral_core::report::fmt_f64;
use toral_core::transfer::{assemble_galerkin_with, essential_radius_check, spectrum, GalerkinOptions};

use crate::config::RunConfig;
use crate::run::RunDir;

/// Slack on the per-`n` ordering `ρ₁ ≤ ρ∞`.
const ORDER_TOL: f64 = 1e-10;

pub struct Outcome {
    pub pass: bool,
    pub summary: String,
    pub verdict: Value,
}

#[derive(Debug)]
pub enum Failure {
    Core(toral_core::Error),
    Io(std::io::Error),
}

impl From<toral_core::Error> for Failure {
    fn from(e: toral_core::Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Io(e) => write!(f, "{e}"),
        }
    }
}

type CmdResult = Result<Outcome, Failure>;

fn opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn galerkin_options(cfg: &RunConfig) -> GalerkinOptions {
    GalerkinOptions {
        max_n: cfg.run.budget,
        ..Default::default()
    }
}

pub fn bounds(cfg: &RunConfig, dir: &mut RunDir) -> CmdResult {
    let map = cfg.build_map();
    let sets = cfg.resolved_params().expect("validated");
    let formulas = cfg.formulas().expect("validated");
    let table = ExponentTable::new(&map, cfg.run.n_max, cfg.run.grid)?;
    let results = sets
        .par_iter()
        .map(|set| {
            let requested = formulas
                .iter()
                .map(|&f| table.report(f, set.exps, set.t))
                .collect::<toral_core::Result<Vec<_>>>()?;
            let sup = table.report(BoundFormula::RhoInfty, set.exps, set.t)?;
            let mean = table.report(BoundFormula::RhoOne, set.exps, set.t)?;
            Ok((requested, sup, mean))
        })
        .collect::<toral_core::Result<Vec<_>>>()?;

    let mut summary = Vec::new();
    let mut violations = Vec::new();
    for (idx, (set, (reports, sup, mean))) in sets.iter().zip(&results).enumerate() {
        for r in reports {
            let rows: Vec<Vec<String>> = r
                .raw
                .iter()
                .zip(&r.accelerated)
                .enumerate()
                .map(|(n, (raw, acc))| vec![(n + 1).to_string(), fmt_f64(*raw), fmt_f64(*acc)])
                .collect();
            dir.write_csv(&format!("bounds_{}_{idx}.csv", r.formula), &["n", "raw", "accelerated"], &rows)?;
            summary.push(vec![
                idx.to_string(),
                fmt_f64(set.exps.p),
                fmt_f64(set.exps.s),
                opt(r.t),
                r.formula.to_string(),
                fmt_f64(r.limit),
            ]);
        }
        for (n, (one, inf)) in mean.raw.iter().zip(&sup.raw).enumerate() {
            if one > &(inf + ORDER_TOL) {
                violations.push(json!({ "param": idx, "n": n + 1, "rho_one": one, "rho_infty": inf }));
            }
        }
    }
    dir.write_csv("summary.csv", &["param", "p", "s", "t", "formula", "limit"], &summary)?;
    let pass = violations.is_empty();
    Ok(Outcome {
        pass,
        summary: format!("{} reports, {} ordering violations", summary.len(), violations.len()),
        verdict: json!({ "pass": pass, "ordering_violations": violations }),
    })
}

pub fn spectrum_cmd(cfg: &RunConfig, dir: &mut RunDir) -> CmdResult {
    let map = cfg.build_map();
    let sets = cfg.resolved_params().expect("validated");
    let table = ExponentTable::new(&map, cfg.run.n_max, cfg.run.grid)?;
    let opts = galerkin_options(cfg);
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    for (idx, set) in sets.iter().enumerate() {
        let kind = cfg.kind(set);
        let params = set.aniso(&map);
        let m = assemble_galerkin_with(kind, &map, &params, cfg.run.n, &opts)?;
        if cfg.run.dump {
            let file = std::fs::File::create(dir.file(&format!("matrix_{idx}.bin")))?;
            m.write_dump(std::io::BufWriter::new(file))?;
        }
        let eigs = spectrum(&m)?;
        drop(m);
        let refined = spectrum(&assemble_galerkin_with(kind, &map, &params, cfg.refine(), &opts)?)?;
        let bound = table.report(cfg.kind_formula(), set.exps, set.t)?.limit;
        for e in &eigs.eigenvalues {
            rows.push(vec![
                idx.to_string(),
                fmt_f64(e.value.re),
                fmt_f64(e.value.im),
                fmt_f64(e.modulus()),
                opt(e.residual),
                e.block.to_string(),
            ]);
        }
        checks.push(json!({
            "param": idx,
            "kind": kind.to_string(),
            "formula": cfg.kind_formula(),
            "check": essential_radius_check(&eigs, &refined, bound, cfg.run.margin),
        }));
    }
    dir.write_csv("eigenvalues.csv", &["param", "re", "im", "modulus", "residual", "block"], &rows)?;
    dir.write_json("check.json", &checks)?;
    let pass = checks.iter().all(|c| c["check"]["pass"] == json!(true));
    let outliers: usize = checks
        .iter()
        .map(|c| c["check"]["outliers"].as_array().map_or(0, Vec::len))
        .sum();
    Ok(Outcome {
        pass,
        summary: format!("{} eigenvalues, {outliers} outliers", rows.len()),
        verdict: json!({ "pass": pass, "checks": checks }),
    })
}

pub fn determinant(cfg: &RunConfig, dir: &mut RunDir) -> CmdResult {
    let map = cfg.build_map();
    let set = cfg.resolved_params().expect("validated")[0];
    let traces = trace_sums(&map, cfg.run.n_tr)?;
    let series = determinant_coeffs(&traces);
    let radius = kitaev_disc_radius(&map, set.exps, cfg.run.n_max, cfg.run.grid)?;
    let zeros = zeros_in_disc(&series, radius, DEFAULT_SAFETY)?;
    let kind = cfg.kind(&set);
    let m = assemble_galerkin_with(kind, &map, &set.aniso(&map), cfg.run.n, &galerkin_options(cfg))?;
    let eigs = spectrum(&m)?.values();
    let report = resonance_match(&zeros, &eigs, radius, cfg.run.match_tol);

    let rows: Vec<Vec<String>> = series
        .coeffs
        .iter()
        .enumerate()
        .map(|(n, c)| {
            let t = if n == 0 { String::new() } else { fmt_f64(series.traces[n - 1]) };
            vec![n.to_string(), t, fmt_f64(*c)]
        })
        .collect();
    dir.write_csv("determinant.csv", &["n", "t_n", "c_n"], &rows)?;
    let zero_rows: Vec<Vec<String>> = zeros
        .iter()
        .map(|z| {
            vec![
                fmt_f64(z.re),
                fmt_f64(z.im),
                fmt_f64(z.z().norm()),
                fmt_f64(z.error_bar),
                z.clustered.to_string(),
            ]
        })
        .collect();
    dir.write_csv("zeros.csv", &["re", "im", "modulus", "error_bar", "clustered"], &zero_rows)?;
    let matching = json!({
        "radius": radius,
        "kind": kind.to_string(),
        "n": cfg.run.n,
        "theta": series.theta,
        "trace_theta": series.trace_theta,
        "report": report,
    });
    dir.write_json("matching.json", &matching)?;
    let pass = report.consistent();
    Ok(Outcome {
        pass,
        summary: format!("{} zeros within radius {radius:.4}", zeros.len()),
        verdict: json!({ "pass": pass, "zeros": zeros.len(), "pairs": report.pairs.len(), "unmatched": report.unmatched.len() }),
    })
}

pub fn lynorm(cfg: &RunConfig, dir: &mut RunDir, seed: u64) -> CmdResult {
    let map = cfg.build_map();
    let sets = cfg.resolved_params().expect("validated");
    let projection = cfg.projection().expect("validated");
    let table = ExponentTable::new(&map, cfg.run.n_max.max(2), cfg.run.grid)?;
    let n = cfg.run.n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let functions: Vec<_> = (0..cfg.run.functions).map(|_| random_test_function(&mut rng, n)).collect();
    let mut verdicts = Vec::new();
    let mut fits = Vec::new();
    let mut all_pass = true;
    let mut worst = f64::NEG_INFINITY;
    for (pidx, set) in sets.iter().enumerate() {
        let kind = cfg.kind(set);
        let engine = GrowthEngine::with_options(kind, &map, n, projection, &galerkin_options(cfg))?;
        let params = set.aniso(&map);
        let bound: BoundReport = table.report(cfg.kind_formula(), set.exps, set.t)?;
        let records = functions
            .par_iter()
            .enumerate()
            .map(|(fidx, f)| norm_growth(&engine, &params, f, cfg.run.n_max, &format!("random seed {seed} #{fidx}")))
            .collect::<toral_core::Result<Vec<_>>>()?;
        for (fidx, r) in records.iter().enumerate() {
            let idx = pidx * functions.len() + fidx;
            let rows: Vec<Vec<String>> = r
                .strong
                .iter()
                .zip(&r.weak)
                .enumerate()
                .map(|(k, (s, w))| vec![k.to_string(), fmt_f64(*s), fmt_f64(*w)])
                .collect();
            dir.write_csv(&format!("growth_{}_{idx}.csv", kind.name()), &["n", "strong_norm", "weak_norm"], &rows)?;
            let v = bound_comparison(r, &bound, cfg.run.margin);
            all_pass &= v.pass;
            worst = worst.max(v.slope - (v.bound + v.margin).ln());
            verdicts.push(json!({
                "cell": idx,
                "param": pidx,
                "function": fidx,
                "kind": kind.to_string(),
                "projection": r.projection,
                "formula": bound.formula,
                "verdict": v,
            }));
        }
        let fit = two_norm_fit(&records, bound.limit)?;
        fits.push(json!({ "param": pidx, "rho": fit.rho, "max_residual": fit.max_residual() }));
    }
    Ok(Outcome {
        pass: all_pass,
        summary: format!("{} growth records, worst slope excess {worst:.3}", verdicts.len()),
        verdict: json!({ "pass": all_pass, "verdicts": verdicts, "two_norm_fits": fits }),
    })
}
