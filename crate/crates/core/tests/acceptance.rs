//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Run with `cargo test --test acceptance`.

use std::process::Command;
use std::time::Instant;

use twistrank::arith::{gcd, is_squarefree, kronecker, parity_decompose, sieve_primes};
use twistrank::curve::{Catalog, CurveModel};
use twistrank::explicit_formula::ExplicitFormula;
use twistrank::family::{theoretical_moment_bound, GOLDFELD_BOUND};
use twistrank::kernel::{SmoothWeight, TriangleKernel};
use twistrank::verify::{
    gauss_group, jsum_enumerate, jsum_group, poisson_group, qsum_group, step1_group, CheckResult, JsumVariant,
    RankinTable, Status,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, f64, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn all_pass(results: &[CheckResult]) -> Result<usize, String> {
    match results.iter().find(|r| r.status == Status::Fail) {
        Some(r) => Err(format!("{} failed: ratio_or_error {:e}, params {:?}", r.name, r.ratio_or_error, r.params)),
        None => Ok(results.len()),
    }
}

fn curves() -> Vec<CurveModel> {
    Catalog::builtin().curves().to_vec()
}

/// #{(x, y) mod p : y^2 = x^3 + a x + b} + 1, by counting square roots.
fn short_count(a: i64, b: i64, p: i64) -> i64 {
    let mut roots = vec![0i64; p as usize];
    for y in 0..p {
        roots[(y * y % p) as usize] += 1;
    }
    1 + (0..p).map(|x| roots[(x * x % p * x + a * x + b).rem_euclid(p) as usize]).sum::<i64>()
}

/// Affine plus infinity on y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6.
fn long_count(c: [i64; 5], p: i64) -> i64 {
    let [a1, a2, a3, a4, a6] = c;
    let mut n = 1;
    for x in 0..p {
        for y in 0..p {
            if (y * y + a1 * x * y + a3 * y - x * x * x - a2 * x * x - a4 * x - a6).rem_euclid(p) == 0 {
                n += 1;
            }
        }
    }
    n
}

fn modpow(mut b: i64, mut e: i64, m: i64) -> i64 {
    let mut r = 1 % m;
    b = b.rem_euclid(m);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

fn exact_arithmetic() -> Outcome {
    let minimal = [("64a", [0, 0, 0, 1, 0]), ("37a", [0, 0, 1, -1, 0]), ("11a", [0, -1, 1, -10, -20])];
    let start = Instant::now();
    let primes = sieve_primes(1000).map_err(|e| e.to_string())?;
    let mut compared = 0;
    for c in curves() {
        let model = minimal.iter().find(|m| m.0 == c.label).ok_or("catalog label without a model")?.1;
        for &p in primes.primes() {
            if c.conductor % p == 0 {
                continue;
            }
            let pi = p as i64;
            let count = if p <= 3 { long_count(model, pi) } else { short_count(c.a, c.b, pi) };
            let ap = c.ap(p).map_err(|e| e.to_string())?;
            ensure(ap == pi + 1 - count, || format!("{} p={p}: a_p {ap} vs count {}", c.label, pi + 1 - count))?;
            compared += 1;
        }
    }
    let trace_secs = start.elapsed().as_secs_f64();
    ensure(trace_secs < 10.0, || format!("point counts took {trace_secs:.1} s"))?;
    let start = Instant::now();
    let odd = sieve_primes(500).map_err(|e| e.to_string())?;
    let mut symbols = 0;
    for &p in odd.primes().iter().filter(|&&p| p > 2) {
        let p = p as i64;
        for d in -200i64..=200 {
            let e = modpow(d, (p - 1) / 2, p);
            let euler = if e == 0 { 0 } else if e == 1 { 1 } else { -1 };
            ensure(kronecker(d, p) == euler, || format!("({d}/{p}) = {} vs Euler {euler}", kronecker(d, p)))?;
            symbols += 1;
        }
    }
    let symbol_secs = start.elapsed().as_secs_f64();
    ensure(symbol_secs < 5.0, || format!("symbols took {symbol_secs:.1} s"))?;
    Ok(format!("{compared} traces ({trace_secs:.2} s) and {symbols} symbols ({symbol_secs:.2} s) agree"))
}

fn coefficient_identities() -> Outcome {
    let primes = sieve_primes(500).map_err(|e| e.to_string())?;
    let mut n = 0;
    for c in curves() {
        for &p in primes.primes().iter().filter(|&&p| c.conductor % p != 0) {
            let ap = c.ap(p).map_err(|e| e.to_string())?;
            let c2 = c.cpm(p, 2).map_err(|e| e.to_string())?;
            ensure(c2 == ap * ap - 2 * p as i64, || format!("{} p={p}: c_p2 {c2}", c.label))?;
            for m in 1..=5u32 {
                let v = c.cpm(p, m).map_err(|e| e.to_string())? as i128;
                ensure(v * v <= 4 * (p as i128).pow(m), || format!("{} p={p} m={m}: |c| = {v}", c.label))?;
                n += 1;
            }
        }
    }
    Ok(format!("{n} coefficients within the Hasse bound"))
}

fn kernel_transform() -> Outcome {
    let mut worst: f64 = 0.0;
    for lambda in [1.0, 2.0, 5.0, 10.0, 20.0] {
        let k = TriangleKernel::new(lambda).map_err(|e| e.to_string())?;
        for i in -100..=100 {
            let t = i as f64 * 0.1;
            let q = k.mellin_phi_quadrature(num_complex::Complex64::new(1.0, t));
            worst = worst.max((q - k.mellin_phi(t)).norm());
        }
    }
    ensure(worst <= 1e-8, || format!("max deviation {worst:e}"))?;
    Ok(format!("max deviation {worst:.2e} over 1005 points"))
}

fn gauss_sums() -> Outcome {
    let g = all_pass(&gauss_group(500).map_err(|e| e.to_string())?)?;
    let j = all_pass(&jsum_group(0, 200, 10_000).map_err(|e| e.to_string())?)?;
    // pi1 pi2 | m, then gcd(pi2, m) > 1 with pi1 pi2 not dividing m.
    let mut zeros = 0;
    for tuple in [vec![3u64, 5], vec![3, 3, 5, 7], vec![5, 7, 7, 11, 11, 13]] {
        let pd = parity_decompose(&tuple);
        let full = (pd.pi1 * pd.pi2) as i64;
        let p = twistrank::arith::factorize(pd.pi2)[0].0 as i64;
        for m in [full, -2 * full, p, 4 * p] {
            for variant in [JsumVariant::All, JsumVariant::Coprime] {
                let v = jsum_enumerate(pd.pi1, pd.pi2, m, variant).norm();
                ensure(v <= 1e-9, || format!("tuple {tuple:?} m={m} {variant:?}: |sum| = {v:e}"))?;
                zeros += 1;
            }
        }
    }
    Ok(format!("{g} Gauss sums, {j} j-sums, {zeros} vanishing cases"))
}

fn poisson() -> Outcome {
    let n = all_pass(&poisson_group(SmoothWeight::default(), 50).map_err(|e| e.to_string())?)?;
    Ok(format!("{n} (q, j, l) cases within 1e-6 relative"))
}

fn rankin() -> Outcome {
    let primes = sieve_primes(100_000).map_err(|e| e.to_string())?;
    let mut parts = Vec::new();
    for c in curves() {
        let t = RankinTable::new(&c, 1e5, &primes).map_err(|e| e.to_string())?;
        let lin = t.linear_check(1e5).map_err(|e| e.to_string())?;
        let sq = t.square_check(1e5f64.ln()).map_err(|e| e.to_string())?;
        let trends = t.trend_checks(&[1e3, 1e4, 1e5]).map_err(|e| e.to_string())?;
        for r in [&lin, &sq].into_iter().chain(&trends) {
            ensure(r.pass, || format!("{} {}: {}", c.label, r.name, r.ratio_or_error))?;
        }
        parts.push(format!("{} {:.3}/{:.3}", c.label, lin.ratio_or_error, sq.ratio_or_error));
    }
    Ok(format!("linear/square ratios: {}", parts.join(", ")))
}

fn grh_proxy() -> Outcome {
    let primes = sieve_primes(10_000).map_err(|e| e.to_string())?;
    let kernel = TriangleKernel::new(1e4f64.ln()).map_err(|e| e.to_string())?;
    let mut parts = Vec::new();
    for c in curves() {
        let ef = ExplicitFormula::new(&c, kernel, &primes).map_err(|e| e.to_string())?;
        let (mut min_all, mut min_odd, mut n) = (f64::INFINITY, f64::INFINITY, 0);
        for d in (-2000i64..=2000).filter(|&d| {
            d != 0 && is_squarefree(d.unsigned_abs()) && gcd(d.unsigned_abs(), 2 * c.conductor) == 1
        }) {
            let r = ef.report(d).map_err(|e| e.to_string())?;
            min_all = min_all.min(r.rank_bound);
            if r.root_number == -1 {
                min_odd = min_odd.min(r.rank_bound);
            }
            n += 1;
        }
        ensure(min_all >= -0.1, || format!("{}: min rank bound {min_all}", c.label))?;
        ensure(min_odd >= 0.9, || format!("{}: min odd rank bound {min_odd}", c.label))?;
        parts.push(format!("{} n={n} min={min_all:.3} odd min={min_odd:.3}", c.label));
    }
    Ok(parts.join(", "))
}

fn run_cli(args: &[&str]) -> Result<std::process::Output, String> {
    Command::new(env!("CARGO_BIN_EXE_twistrank")).args(args).output().map_err(|e| e.to_string())
}

fn constants() -> Outcome {
    ensure(theoretical_moment_bound(1) == 1.5, || format!("k=1 bound {}", theoretical_moment_bound(1)))?;
    ensure(GOLDFELD_BOUND == 3.25, || "comparison line".into())?;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = dir.path().join("m.csv");
    let o = run_cli(&["sweep", "--curve", "11a", "--x", "1000", "--T", "3000", "--k", "2", "--out", out.to_str().unwrap()])?;
    ensure(o.status.success(), || String::from_utf8_lossy(&o.stderr).into_owned())?;
    let side = std::fs::read_to_string(dir.path().join("m.sidecar.json")).map_err(|e| e.to_string())?;
    for needle in [
        "\"heath_brown_bound\": 1.5",
        "\"goldfeld_bound\": 3.25",
        "\"rank_density_base\": 1.44467",
        "\"lowzero_density_base\": 1.402408",
        "\"sinc_threshold\": 0.9193953884",
    ] {
        ensure(side.contains(needle), || format!("sidecar lacks {needle}"))?;
    }
    let v: serde_json::Value = serde_json::from_str(&side).map_err(|e| e.to_string())?;
    let k2 = v["constants"]["theoretical_moment_bound"][1][1].as_f64().unwrap_or(f64::NAN);
    ensure((k2 - (6.25 + 1.0 / 3.0)).abs() < 1e-12, || format!("k=2 bound {k2}"))?;
    Ok("1.5, 3.25, 1.44467, 1.402408, 0.9193953884 echoed".into())
}

fn tuple_sums() -> Outcome {
    let primes = sieve_primes(100_000).map_err(|e| e.to_string())?;
    let cs = curves();
    let mut results = qsum_group(&cs, &primes).map_err(|e| e.to_string())?;
    results.extend(step1_group(&cs, &primes).map_err(|e| e.to_string())?);
    for r in results.iter().filter(|r| r.name.ends_with("_oracle")) {
        ensure(r.pass, || format!("{} disagrees: {:e} at {:?}", r.name, r.ratio_or_error, r.params))?;
    }
    let n = all_pass(&results)?;
    let worst = results
        .iter()
        .filter(|r| r.name.ends_with("_envelope"))
        .map(|r| r.ratio_or_error)
        .fold(0.0, f64::max);
    Ok(format!("{n} checks, worst envelope ratio {worst:.2e}"))
}

fn parse_cells(text: &str) -> Vec<Vec<String>> {
    text.lines().map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut texts = Vec::new();
    for (i, threads) in ["1", "8", "8"].iter().enumerate() {
        let out = dir.path().join(format!("m{i}.csv"));
        let o = run_cli(&[
            "sweep", "--curve", "37a", "--x", "1000", "--k", "3", "--T", "60000", "--squarefree", "--coprime",
            "--threads", threads, "--out", out.to_str().unwrap(),
        ])?;
        ensure(o.status.success(), || String::from_utf8_lossy(&o.stderr).into_owned())?;
        let side = std::fs::read(dir.path().join(format!("m{i}.sidecar.json"))).map_err(|e| e.to_string())?;
        texts.push((std::fs::read_to_string(&out).map_err(|e| e.to_string())?, side));
    }
    let (a, b) = (parse_cells(&texts[0].0), parse_cells(&texts[1].0));
    ensure(a.len() == b.len() && a.len() > 1, || "row counts differ".into())?;
    let mut worst: f64 = 0.0;
    for (ra, rb) in a.iter().zip(&b).skip(1) {
        for (x, y) in ra.iter().zip(rb) {
            match (x.parse::<f64>(), y.parse::<f64>()) {
                (Ok(u), Ok(v)) => worst = worst.max((u - v).abs() / u.abs().max(1.0)),
                _ => ensure(x == y, || format!("cell {x} vs {y}"))?,
            }
        }
    }
    ensure(worst <= 1e-10, || format!("threads 1 vs 8 differ by {worst:e}"))?;
    ensure(texts[1] == texts[2], || "reruns differ".into())?;
    Ok(format!("max cell difference {worst:e}; reruns byte-identical"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("exact arithmetic", 15.0, exact_arithmetic),
        ("coefficient identities", 10.0, coefficient_identities),
        ("kernel transform", 30.0, kernel_transform),
        ("gauss sums", 60.0, gauss_sums),
        ("poisson summation", 120.0, poisson),
        ("rankin averages", 120.0, rankin),
        ("grh positivity proxy", 300.0, grh_proxy),
        ("constants", 30.0, constants),
        ("tuple sums", 180.0, tuple_sums),
        ("determinism", 120.0, determinism),
    ];
    let mut failed = 0;
    for (name, limit, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        let outcome = match outcome {
            Ok(d) if secs > limit => Err(format!("{d}; took {secs:.1} s, limit {limit} s")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS  {name:<24} {secs:>7.2} s  {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name:<24} {secs:>7.2} s  {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
