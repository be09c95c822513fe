use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use clap::ArgMatches;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use sectorlab::density::{
    density1_sigma_interval, density2_sigma_interval, minimal_constant, verify_constant, AdmissibleSigmaInterval,
    ChainParams, Density1Variant, Mode, PairSet,
};
use sectorlab::divisor::{correlation_check, DivisorInstance, KloostermanContext, SmoothWeight, Weight};
use sectorlab::exppair::{apply_word, search_optimal, sigma_lower, ExactPair, Objective, ProcessWord};
use sectorlab::gaussian::{
    almost_prime_weights, gaussian_primes_by_norm, rough_weights, write_prime_cache, AlmostPrimeConfig, PrimeCache,
    RoughNumberFilter, WeightedPoint,
};
use sectorlab::hecke::{
    hecke_spectrum, hecke_sum, large_value_count, mvt_report, prime_sum_decay_experiment, primitive_ray_reduction,
    smooth_sum_experiment, write_spectrum_dump, HeckeCoefficientVector, RoughSectorExclusion, SpectrumMethod,
};
use sectorlab::rational::{parse_rational, to_f64, Rational};
use sectorlab::sector::{
    covered_measure, exact_window_variance, pair_proximity_sum, sector_count_bound_check, window_sum, SectorWindow,
    WeightedPointSet,
};
use sectorlab::{Error, GaussianInt};

use crate::report::{CheckLine, Table};

#[derive(Debug, thiserror::Error)]
pub enum CmdError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Lib(#[from] Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CmdError {
    /// Invalid input exits 2, anything that went wrong while running exits 1.
    pub fn exit_code(&self) -> i32 {
        match self {
            CmdError::Usage(_) => 2,
            CmdError::Lib(e) => match e {
                Error::ZeroInput
                | Error::NotPrime(_)
                | Error::NoRoot(_)
                | Error::InvalidArgument(_)
                | Error::Inadmissible(_)
                | Error::Precondition(_)
                | Error::OutsideHypotheses(_)
                | Error::Format(_) => 2,
                _ => 1,
            },
            CmdError::Io(_) => 1,
        }
    }
}

type Res<T> = Result<T, CmdError>;

#[derive(Debug, Default)]
pub struct Outcome {
    pub results: Value,
    pub checks: Vec<CheckLine>,
    pub text: String,
    pub table: Option<Table>,
}

pub struct Args<'a> {
    m: &'a ArgMatches,
}

impl<'a> Args<'a> {
    pub fn new(m: &'a ArgMatches) -> Self {
        Args { m }
    }

    fn raw(&self, name: &str) -> Option<&'a String> {
        self.m.try_get_one::<String>(name).ok().flatten()
    }

    fn opt<T: FromStr>(&self, name: &str) -> Res<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.raw(name).map(|s| s.parse::<T>().map_err(|e| CmdError::Usage(format!("--{name}: {e}")))).transpose()
    }

    fn req<T: FromStr>(&self, name: &str) -> Res<T>
    where
        T::Err: std::fmt::Display,
    {
        self.opt(name)?.ok_or_else(|| CmdError::Usage(format!("missing --{name}")))
    }

    fn list<T: FromStr>(&self, name: &str) -> Res<Vec<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.m.try_get_many::<String>(name).ok().flatten() {
            None => Ok(Vec::new()),
            Some(vals) => vals.map(|s| s.parse::<T>().map_err(|e| CmdError::Usage(format!("--{name}: {e}")))).collect(),
        }
    }

    fn rational(&self, name: &str) -> Res<Option<Rational>> {
        Ok(self.raw(name).map(|s| parse_rational(s)).transpose()?)
    }

    fn req_rational(&self, name: &str) -> Res<Rational> {
        self.rational(name)?.ok_or_else(|| CmdError::Usage(format!("missing --{name}")))
    }

    fn flag(&self, name: &str) -> bool {
        self.m.try_get_one::<bool>(name).ok().flatten().copied().unwrap_or(false)
    }
}

pub fn execute(path: &str, args: &Args, seed: u64) -> Res<Outcome> {
    match path {
        "sieve" => sieve(args),
        "sectors" => sectors(args),
        "variance" => variance(args, seed),
        "hecke-sum" => hecke_sum_cmd(args),
        "spectrum" => spectrum(args),
        "mvt-check" => mvt_check(args),
        "exppair" => exppair(args),
        "density verify" => density_verify(args),
        "density minimal" => density_minimal(args),
        "density interval" => density_interval(args),
        "divisor-check" => divisor_check(args),
        "kloosterman" => kloosterman(args),
        "decay" => decay(args),
        other => Err(CmdError::Usage(format!("unknown command {other:?}"))),
    }
}

fn q(r: &Rational) -> Value {
    Value::String(r.to_string())
}

fn num(x: f64) -> String {
    x.to_string()
}

fn pair_json(p: &ExactPair) -> Value {
    json!({ "kappa": q(&p.kappa), "lambda": q(&p.lambda), "kappa_f64": to_f64(&p.kappa), "lambda_f64": to_f64(&p.lambda) })
}

fn inverse_norm_points(zs: Vec<GaussianInt>) -> Vec<WeightedPoint> {
    zs.into_iter().map(|z| WeightedPoint { z, weight: Ratio::new(1, z.norm() as u64) }).collect()
}

/// The point set selected by the shared `--set` options at scale `x`.
fn point_set(args: &Args, x: u64) -> Res<(WeightedPointSet, Value)> {
    let kind: String = args.req("set")?;
    let eta: f64 = args.req("eta")?;
    let mut info = json!({ "set": kind, "x": x });
    let points = match kind.as_str() {
        "primes" => {
            let hi = ((1.0 + eta) * x as f64).floor() as u64;
            info["norm_range"] = json!([x, hi]);
            info["eta"] = json!(eta);
            inverse_norm_points(gaussian_primes_by_norm(x.max(1), hi)?)
        }
        "rough" => {
            let exempt: Vec<f64> = args.list("exempt")?;
            let filter = RoughNumberFilter::new(&exempt, x)?;
            info["eta"] = json!(eta);
            info["exempt_intervals"] = json!(filter.exempt_intervals);
            rough_weights(&filter, x, eta)?
        }
        "almost" => {
            let k: u8 = args.req("k")?;
            let scales: Vec<f64> = args.list("scales")?;
            let epsilon: f64 = args.req("epsilon")?;
            let config = AlmostPrimeConfig::from_scales(k, x, &scales, epsilon)?;
            info["factor_windows"] = json!(config.factor_windows);
            let set = almost_prime_weights(&config)?;
            if let Some(w) = &set.warning {
                info["warning"] = json!(w);
            }
            set.points
        }
        other => return Err(CmdError::Usage(format!("unknown set {other:?}"))),
    };
    info["points"] = json!(points.len());
    Ok((WeightedPointSet::new(points, x, kind)?, info))
}

fn coefficients(set: &WeightedPointSet) -> Res<HeckeCoefficientVector> {
    Ok(HeckeCoefficientVector::from_points(&set.points)?)
}

fn sieve(args: &Args) -> Res<Outcome> {
    let lo: u64 = args.req("lo")?;
    let hi: u64 = args.req("hi")?;
    let limit: usize = args.req("list-limit")?;
    let primes = gaussian_primes_by_norm(lo, hi)?;
    let mut results = json!({ "lo": lo, "hi": hi, "count": primes.len() });
    let mut table = Table::new(&["re", "im", "norm"]);
    for z in &primes {
        table.push(vec![z.re.to_string(), z.im.to_string(), z.norm().to_string()]);
    }
    if primes.len() <= limit {
        results["primes"] = json!(primes.iter().map(|z| z.to_string()).collect::<Vec<_>>());
    }
    if let Some(path) = args.opt::<PathBuf>("cache")? {
        write_prime_cache(&path, &PrimeCache { lo, hi, primes: primes.clone() })?;
        results["cache"] = json!(path);
    }
    let mut text = format!("{} canonical Gaussian primes with norm in [{lo}, {hi}]\n", primes.len());
    if primes.len() <= limit.min(50) {
        let list: Vec<String> = primes.iter().map(|z| z.to_string()).collect();
        let _ = writeln!(text, "{}", list.join(" "));
    }
    Ok(Outcome { results, text, table: Some(table), ..Default::default() })
}

fn sectors(args: &Args) -> Res<Outcome> {
    let x: u64 = args.req("x")?;
    let eta: f64 = args.req("eta")?;
    let (set, info) = point_set(args, x)?;
    let mut checks = Vec::new();
    let mut text = String::new();
    let log_x = (x as f64).ln();

    let width: f64 = args.req("width")?;
    let mut windows = Vec::new();
    let mut window_table = Table::new(&["theta", "width", "sum"]);
    for theta in args.list::<f64>("theta")? {
        let s = window_sum(&set, SectorWindow::new(theta, width)?);
        windows.push(json!({ "theta": theta, "width": width, "sum": s }));
        window_table.push(vec![num(theta), num(width), num(s)]);
        let _ = writeln!(text, "window [{theta}, {theta}+{width}): {s}");
    }

    let t = match args.opt::<u64>("pair-t")? {
        Some(t) => t,
        None => (x as f64 / (20.0 * log_x)).floor().max(1.0) as u64,
    };
    let pair = pair_proximity_sum(&set, t)?;
    let envelope: f64 = args.req("pair-envelope")?;
    let bound = envelope * eta * eta / (log_x * log_x);
    checks.push(CheckLine::new(
        "pair sum within envelope",
        pair.value <= bound,
        format!("{} <= {bound} ({envelope} eta^2/(log X)^2, T = {t})", pair.value),
    ));
    let _ = writeln!(text, "pair sum T={t}: {} over {} pairs", pair.value, pair.pairs);

    let mut results = json!({
        "point_set": info,
        "total_weight": q(&set.total_weight_exact()),
        "windows": windows,
        "pair_sum": { "t": t, "value": pair.value, "pairs": pair.pairs, "retries": pair.retries, "envelope": bound },
    });
    let mut table = window_table;
    if let Some(n) = args.opt::<GaussianInt>("n")? {
        let big_n: u64 = args.req("norm-bound")?;
        let limit: f64 = args.req("ratio-limit")?;
        let mut rows = Vec::new();
        let mut count_table = Table::new(&["v", "count", "ratio"]);
        let mut worst = 0.0f64;
        for v in args.list::<f64>("v")? {
            let c = sector_count_bound_check(n, big_n, v)?;
            worst = worst.max(c.ratio);
            rows.push(json!({ "v": v, "count": c.count, "ratio": c.ratio }));
            count_table.push(vec![num(v), c.count.to_string(), num(c.ratio)]);
        }
        checks.push(CheckLine::new(
            "sector count ratio",
            worst <= limit,
            format!("max count/v = {worst} <= {limit} around {n}, N = {big_n}"),
        ));
        let _ = writeln!(text, "sector count around {n}: max count/v = {worst}");
        results["sector_count"] = json!({ "n": n.to_string(), "norm_bound": big_n, "rows": rows });
        table = count_table;
    }
    Ok(Outcome { results, checks, text, table: Some(table) })
}

fn variance(args: &Args, seed: u64) -> Res<Outcome> {
    let xs: Vec<u64> = args.list("x")?;
    let hs: Vec<f64> = args.list("h")?;
    let samples: u64 = args.req("mc-samples")?;
    let sets: Vec<(u64, WeightedPointSet, Value)> =
        xs.par_iter().map(|&x| point_set(args, x).map(|(s, info)| (x, s, info))).collect::<Res<_>>()?;
    let jobs: Vec<(usize, usize)> = (0..sets.len()).flat_map(|i| (0..hs.len()).map(move |j| (i, j))).collect();
    let cells: Vec<Value> = jobs
        .par_iter()
        .enumerate()
        .map(|(index, &(i, j))| {
            let (x, set, _) = &sets[i];
            let h = hs[j];
            let start = Instant::now();
            let width = h / *x as f64;
            let report = exact_window_variance(set, width)?;
            let covered = covered_measure(set, width);
            let mut cell = json!({
                "x": x,
                "h": h,
                "width": width,
                "points": set.len(),
                "variance": report.variance,
                "normalized_ratio": report.normalized_ratio,
                "mean_window_sum": report.mean_window_sum,
                "breakpoint_count": report.breakpoint_count,
                "covered_measure": covered,
            });
            if samples > 0 {
                let (mean, se) = monte_carlo(set, width, samples, seed, index as u64)?;
                cell["monte_carlo"] = json!({ "estimate": mean, "std_error": se, "samples": samples });
            }
            cell["runtime_ms"] = json!(start.elapsed().as_secs_f64() * 1e3);
            Ok(cell)
        })
        .collect::<Res<_>>()?;

    let mut checks = Vec::new();
    let mut table =
        Table::new(&["x", "h", "width", "points", "variance", "normalized_ratio", "covered_measure", "runtime_ms"]);
    let mut text = String::new();
    for c in &cells {
        let f = |k: &str| c[k].to_string();
        table.push(vec![
            f("x"),
            f("h"),
            f("width"),
            f("points"),
            f("variance"),
            f("normalized_ratio"),
            f("covered_measure"),
            f("runtime_ms"),
        ]);
        let _ = writeln!(
            text,
            "X={} h={}: variance {} normalized {} covered {}",
            c["x"], c["h"], c["variance"], c["normalized_ratio"], c["covered_measure"]
        );
        if let Some(mc) = c.get("monte_carlo") {
            let (v, e, s) =
                (c["variance"].as_f64().unwrap(), mc["estimate"].as_f64().unwrap(), mc["std_error"].as_f64().unwrap());
            checks.push(CheckLine::new(
                format!("variance vs Monte Carlo at X={} h={}", c["x"], c["h"]),
                (v - e).abs() <= 4.0 * s,
                format!("|{v:e} - {e:e}| <= 4 x {s:e}"),
            ));
        }
    }
    let sets_info: Vec<&Value> = sets.iter().map(|s| &s.2).collect();
    let results = json!({ "point_sets": sets_info, "cells": cells });
    Ok(Outcome { results, checks, text, table: Some(table) })
}

/// Sample mean and standard error of `(π/2)(S(θ) − μ)²` over uniform `θ`.
fn monte_carlo(set: &WeightedPointSet, width: f64, samples: u64, seed: u64, stream: u64) -> Res<(f64, f64)> {
    use std::f64::consts::FRAC_PI_2;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mu = width / FRAC_PI_2 * set.total_weight();
    let (mut sum, mut sq) = (0.0, 0.0);
    for _ in 0..samples {
        let theta = rng.gen_range(0.0..FRAC_PI_2);
        let s = window_sum(set, SectorWindow::new(theta, width)?);
        let v = FRAC_PI_2 * (s - mu) * (s - mu);
        sum += v;
        sq += v * v;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = if samples > 1 { ((sq - n * mean * mean) / (n - 1.0)).max(0.0) } else { 0.0 };
    Ok((mean, (var / n).sqrt()))
}

fn hecke_sum_cmd(args: &Args) -> Res<Outcome> {
    let x: u64 = args.req("x")?;
    let (set, info) = point_set(args, x)?;
    let mut coeffs = coefficients(&set)?;
    if args.flag("reduce") {
        coeffs = primitive_ray_reduction(&coeffs)?;
    }
    let mut rows = Vec::new();
    let mut table = Table::new(&["m", "re", "im", "abs"]);
    let mut text = String::new();
    for m in args.list::<i64>("m")? {
        let f = hecke_sum(&coeffs, m);
        rows.push(json!({ "m": m, "re": f.re, "im": f.im, "abs": f.norm() }));
        table.push(vec![m.to_string(), num(f.re), num(f.im), num(f.norm())]);
        let _ = writeln!(text, "F({m}) = {} {:+}i  |F| = {}", f.re, f.im, f.norm());
    }
    let results =
        json!({ "point_set": info, "coefficients": coeffs.len(), "l1_norm": coeffs.l1_norm(), "values": rows });
    Ok(Outcome { results, text, table: Some(table), ..Default::default() })
}

fn spectrum(args: &Args) -> Res<Outcome> {
    let x: u64 = args.req("x")?;
    let (set, info) = point_set(args, x)?;
    let coeffs = coefficients(&set)?;
    let (lo, hi): (i64, i64) = (args.req("m-lo")?, args.req("m-hi")?);
    let method = match args.req::<String>("method")?.as_str() {
        "direct" => SpectrumMethod::Direct,
        _ => SpectrumMethod::Binned { bits: args.req("bits")?, target_error: args.opt("target-error")? },
    };
    let spec = hecke_spectrum(&coeffs, lo, hi, method)?;
    let mut checks = Vec::new();
    if args.flag("verify") {
        let direct = hecke_spectrum(&coeffs, lo, hi, SpectrumMethod::Direct)?;
        let dev = direct.values.iter().zip(&spec.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        checks.push(CheckLine::new(
            "spectrum within certificate",
            dev <= spec.bin_error_bound,
            format!("max deviation from direct {dev} <= {}", spec.bin_error_bound),
        ));
    }
    if let Some(path) = args.opt::<PathBuf>("dump")? {
        write_spectrum_dump(&path, &spec)?;
    }
    let mut table = Table::new(&["m", "re", "im", "abs"]);
    let mut rows = Vec::new();
    let (mut peak_m, mut peak) = (lo, -1.0);
    for (m, f) in spec.ms().zip(&spec.values) {
        table.push(vec![m.to_string(), num(f.re), num(f.im), num(f.norm())]);
        rows.push(json!([m, f.re, f.im]));
        if m != 0 && f.norm() > peak {
            peak = f.norm();
            peak_m = m;
        }
    }
    let results = json!({
        "point_set": info,
        "m_lo": lo,
        "m_hi": hi,
        "method": spec.method,
        "bin_error_bound": spec.bin_error_bound,
        "peak_nonzero": if peak >= 0.0 { json!({ "m": peak_m, "abs": peak }) } else { Value::Null },
        "values": rows,
    });
    let text = format!(
        "{} frequencies in [{lo}, {hi}], certificate {}, largest |F(m)| off m=0: {}\n",
        spec.values.len(),
        spec.bin_error_bound,
        peak.max(0.0)
    );
    Ok(Outcome { results, checks, text, table: Some(table) })
}

fn mvt_check(args: &Args) -> Res<Outcome> {
    let x: u64 = args.req("x")?;
    let (set, info) = point_set(args, x)?;
    let coeffs = coefficients(&set)?;
    let large: Option<f64> = args.opt("large-value")?;
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    let mut text = String::new();
    let mut table = Table::new(&["t", "big_n", "lhs", "r1", "r2", "ratio_r1", "ratio_r2"]);
    for t in args.list::<u64>("t")? {
        let r = mvt_report(&coeffs, t)?;
        checks.push(CheckLine::new(
            format!("mean-value chain at T={t}"),
            r.lhs <= r.r2 * (1.0 + 1e-12),
            format!("{} <= {}", r.lhs, r.r2),
        ));
        table.push(vec![
            t.to_string(),
            r.big_n.to_string(),
            num(r.lhs),
            num(r.r1),
            num(r.r2),
            num(r.ratio_r1),
            num(r.ratio_r2),
        ]);
        let _ = writeln!(text, "T={t}: lhs {} r1 {} r2 {} (ratios {}, {})", r.lhs, r.r1, r.r2, r.ratio_r1, r.ratio_r2);
        let mut row = serde_json::to_value(&r).expect("reports serialize");
        if let Some(v) = large {
            let count = large_value_count(&coeffs, t, v)?;
            row["large_value_count"] = json!({ "v": v, "count": count });
            let _ = writeln!(text, "  {count} frequencies with |F(m)| >= {v}");
        }
        rows.push(row);
    }
    let results = json!({ "point_set": info, "l1_norm": coeffs.l1_norm(), "reports": rows });
    Ok(Outcome { results, checks, text, table: Some(table) })
}

fn exppair(args: &Args) -> Res<Outcome> {
    let seed = ExactPair::new(args.req_rational("kappa")?, args.req_rational("lambda")?)?;
    let (word, pair) = if args.flag("search") {
        let objective: Objective = args.req::<String>("objective")?.parse()?;
        let depth: usize = args.req("depth")?;
        search_optimal(|p| objective.evaluate(p), depth, &seed)?
    } else {
        let word: ProcessWord = args.opt("word")?.ok_or_else(|| CmdError::Usage("give --word or --search".into()))?;
        let pair = apply_word(&word, &seed)?;
        (word, pair)
    };
    let (k, l) = pair.to_f64();
    let sigma = sigma_lower(&pair);
    let text = format!("{} {}\n{k:.12} {l:.12}\nword {word}\n", pair.kappa, pair.lambda);
    let results = json!({
        "word": word.to_string(),
        "seed": pair_json(&seed),
        "pair": pair_json(&pair),
        "sigma_lower": q(&sigma),
        "sigma_lower_f64": to_f64(&sigma),
    });
    Ok(Outcome { results, text, ..Default::default() })
}

fn chain_params(args: &Args) -> Res<ChainParams> {
    let pairs = match args.req::<String>("pairs")?.as_str() {
        "exact" => PairSet::Exact,
        _ => PairSet::Rounded,
    };
    Ok(ChainParams { pairs, ..ChainParams::default() })
}

fn density_verify(args: &Args) -> Res<Outcome> {
    let c = args.req_rational("C")?;
    let mode: Mode = args.req::<String>("mode")?.parse()?;
    let report = verify_constant(&c, mode, &chain_params(args)?)?;
    let text = format!("C = {c} ({mode}): {}\n", if report.feasible { "feasible" } else { "infeasible" });
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    for ch in &report.checks {
        rows.push(json!({
            "name": ch.name,
            "lhs": q(&ch.lhs),
            "relation": ch.relation.symbol(),
            "rhs": q(&ch.rhs),
            "pass": ch.pass,
            "lhs_f64": to_f64(&ch.lhs),
            "rhs_f64": to_f64(&ch.rhs),
        }));
        checks.push(CheckLine::new(ch.name, ch.pass, format!("{} {} {}", ch.lhs, ch.relation.symbol(), ch.rhs)));
    }
    let results = json!({ "c": q(&c), "mode": mode.to_string(), "feasible": report.feasible, "checks": rows });
    Ok(Outcome { results, checks, text, ..Default::default() })
}

fn density_minimal(args: &Args) -> Res<Outcome> {
    let mode: Mode = args.req::<String>("mode")?.parse()?;
    let tol = args.req_rational("tol")?;
    let c = minimal_constant(mode, &tol, &chain_params(args)?)?;
    let text = format!("smallest feasible C ({mode}) within {tol}: {c} = {}\n", to_f64(&c));
    let results = json!({ "mode": mode.to_string(), "tol": q(&tol), "c": q(&c), "c_f64": to_f64(&c) });
    Ok(Outcome { results, text, ..Default::default() })
}

fn interval_json(i: &AdmissibleSigmaInterval) -> Value {
    json!({
        "lower": q(&i.lower),
        "upper": q(&i.upper),
        "lower_strict": i.lower_strict,
        "empty": i.is_empty(),
        "source": i.source,
        "lower_f64": to_f64(&i.lower),
        "upper_f64": to_f64(&i.upper),
    })
}

fn density_interval(args: &Args) -> Res<Outcome> {
    let beta = args.req_rational("beta")?;
    let interval = if let Some(delta) = args.rational("delta")? {
        let amp = args.rational("amp")?.ok_or_else(|| CmdError::Usage("--delta needs --amp".into()))?;
        density2_sigma_interval(&beta, &delta, &amp)?
    } else if args.flag("smooth") {
        density1_sigma_interval(&beta, &Density1Variant::Smooth)?
    } else {
        let (Some(k), Some(l)) = (args.rational("kappa")?, args.rational("lambda")?) else {
            return Err(CmdError::Usage("give --kappa and --lambda, --smooth, or --delta with --amp".into()));
        };
        density1_sigma_interval(&beta, &Density1Variant::Pair(ExactPair::new(k, l)?))?
    };
    let open = if interval.lower_strict { "(" } else { "[" };
    let text = format!(
        "sigma in {open}{}, {}]{}\n",
        interval.lower,
        interval.upper,
        if interval.is_empty() { " (empty)" } else { "" }
    );
    Ok(Outcome { results: interval_json(&interval), text, ..Default::default() })
}

fn divisor_instance(args: &Args) -> Res<DivisorInstance> {
    if let Some(path) = args.opt::<PathBuf>("instance")? {
        let text = std::fs::read_to_string(&path)?;
        return Ok(DivisorInstance::from_kv_str(&text)?);
    }
    let x: u64 = args.req("x")?;
    let k: i64 = args.req("k")?;
    let (lo, hi): (f64, f64) = (args.req("plateau-lo")?, args.req("plateau-hi")?);
    let sharp = args.req::<String>("weight")? == "sharp";
    let mut weights = Vec::with_capacity(4);
    for name in ["M1", "M2", "M3", "M4"] {
        let w = Weight::Smooth(SmoothWeight::new(args.req(name)?, lo, hi)?);
        weights.push(if sharp { w.plateau_indicator() } else { w });
    }
    let weights: [Weight; 4] = weights.try_into().expect("four weights");
    Ok(DivisorInstance::new(x, k, args.req("T1")?, args.req("T2")?, weights, args.req("delta")?)?)
}

fn divisor_check(args: &Args) -> Res<Outcome> {
    let instance = divisor_instance(args)?;
    let limit: u64 = args.req("work-limit")?;
    let check = correlation_check(&instance, limit as u128)?;
    let mut checks = Vec::new();
    if let Some(tol) = args.opt::<f64>("tolerance")? {
        checks.push(CheckLine::new(
            "relative gap",
            check.relative_gap <= tol,
            format!("{} <= {tol}", check.relative_gap),
        ));
    }
    let text = format!(
        "lhs {}\nmain term {} (singular series {} = {}·{})\nrelative gap {}\n",
        check.lhs,
        check.main_term.value,
        check.main_term.singular_series.value,
        check.main_term.singular_series.frame,
        check.main_term.singular_series.product,
        check.relative_gap
    );
    let results = json!({ "instance": instance, "check": check });
    Ok(Outcome { results, checks, text, ..Default::default() })
}

fn kloosterman(args: &Args) -> Res<Outcome> {
    let (a, b): (i64, i64) = (args.req("a")?, args.req("b")?);
    let mut moduli: Vec<u64> = args.list("c")?;
    if let Some(max) = args.opt::<u64>("c-max")? {
        moduli.extend(1..=max);
    }
    if moduli.is_empty() {
        return Err(CmdError::Usage("give --c or --c-max".into()));
    }
    let rows: Vec<(u64, f64, f64, sectorlab::divisor::WeilCheck)> = moduli
        .par_iter()
        .map(|&c| {
            let ctx = KloostermanContext::new(c)?;
            let s = ctx.sum(a, b);
            Ok((c, s.re, s.im, ctx.weil_check(a, b)))
        })
        .collect::<Res<_>>()?;
    let mut table = Table::new(&["c", "a", "b", "re", "im", "abs", "bound"]);
    let mut json_rows = Vec::new();
    let mut failures = Vec::new();
    for (c, re, im, w) in &rows {
        table.push(vec![
            c.to_string(),
            a.to_string(),
            b.to_string(),
            num(*re),
            num(*im),
            num(w.value_abs),
            num(w.bound),
        ]);
        json_rows.push(json!({ "c": c, "re": re, "im": im, "abs": w.value_abs, "bound": w.bound, "pass": w.pass }));
        if !w.pass {
            failures.push(c.to_string());
        }
    }
    let checks = vec![CheckLine::new(
        "Weil bound",
        failures.is_empty(),
        if failures.is_empty() {
            format!("{} moduli", rows.len())
        } else {
            format!("fails at c = {}", failures.join(", "))
        },
    )];
    let text = match rows.as_slice() {
        [(c, re, im, w)] => format!("S({a}, {b}; {c}) = {re} {im:+}i, |S| = {} <= {}\n", w.value_abs, w.bound),
        _ => format!("{} moduli, Weil bound {}\n", rows.len(), if failures.is_empty() { "holds" } else { "fails" }),
    };
    Ok(Outcome { results: json!({ "a": a, "b": b, "sums": json_rows }), checks, text, table: Some(table) })
}

fn decay(args: &Args) -> Res<Outcome> {
    let ns: Vec<u64> = args.list("n")?;
    let ms: Vec<i64> = args.list("m")?;
    let mut text = String::new();
    if args.req::<String>("kind")? == "smooth" {
        let n = ns[0];
        let n_prime = args.opt::<u64>("n-prime")?.unwrap_or(2 * n);
        let pair = ExactPair::new(args.req_rational("kappa")?, args.req_rational("lambda")?)?;
        let exclusion = args
            .opt::<u32>("exclude-k")?
            .map(|max_k| -> Res<_> { Ok(RoughSectorExclusion { max_k, half_width: args.req("exclude-width")? }) })
            .transpose()?;
        let rows = smooth_sum_experiment(n, n_prime, &ms, exclusion.as_ref(), &pair)?;
        let mut table = Table::new(&["m", "value_abs", "bound", "ratio", "bound_cube_root", "ratio_cube_root"]);
        for r in &rows {
            table.push(vec![
                r.m.to_string(),
                num(r.value_abs),
                num(r.bound_pair),
                num(r.ratio_pair),
                num(r.bound_cube_root),
                num(r.ratio_cube_root),
            ]);
            let _ = writeln!(
                text,
                "m={}: |S| {} ratio {} (cube root {})",
                r.m, r.value_abs, r.ratio_pair, r.ratio_cube_root
            );
        }
        let results = json!({
            "kind": "smooth", "n": n, "n_prime": n_prime, "pair": pair_json(&pair), "exclusion": exclusion, "rows": rows,
        });
        return Ok(Outcome { results, text, table: Some(table), ..Default::default() });
    }
    let rows = prime_sum_decay_experiment(&ns, &ms)?;
    let mut table = Table::new(&["n", "m", "value_abs", "bound", "ratio"]);
    for r in &rows {
        table.push(vec![r.n.to_string(), r.m.to_string(), num(r.value_abs), num(r.bound), num(r.ratio)]);
        let _ = writeln!(text, "N={} m={}: |S| {} ratio {}", r.n, r.m, r.value_abs, r.ratio);
    }
    Ok(Outcome { results: json!({ "kind": "prime", "rows": rows }), text, table: Some(table), ..Default::default() })
}
