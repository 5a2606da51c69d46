//! Numerical checks of the analytic identities and estimates behind the
//! explicit-formula machinery, run as a suite of named groups.

mod gauss;
mod logderiv;
mod poisson;
mod qsum;
mod rankin;
mod result;

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

pub use gauss::{
    epsilon, gauss_sum, gauss_sum_check, gauss_sum_closed, jsum_closed, jsum_crt_check, jsum_enumerate,
    random_jsum_cases, JsumVariant,
};
pub use logderiv::{logderiv_partial, LogDerivative};
pub use poisson::{
    decay_drop_check, decay_shape, poisson_check, required_truncation, tail_bound, wl_decay_check, DecayFit,
    PoissonCase, TAIL_TARGET,
};
pub use qsum::{
    q_shape, q_sum, q_sum_checks, q_sum_oracle, q_term, step1_checks, step1_oracle, step1_shape, step1_sum,
    BetaTable, TuplePoint, MAX_TUPLE_LEN,
};
pub use rankin::{
    rankin_doubling_check, rankin_linear_check, rankin_linear_sum, rankin_square_check, rankin_square_sum,
    rankin_trend_checks, trend_check, RankinTable,
};
pub use result::{CheckResult, Num, Status, SOFT_FACTOR};

use crate::arith::{gcd, is_squarefree, sieve_primes, PrimeTable};
use crate::curve::CurveModel;
use crate::error::{Error, Result};
use crate::kernel::{LogPowerWeight, SmoothWeight};

pub const GROUPS: [&str; 8] = ["rankin", "gauss", "jsum", "poisson", "decay", "qsum", "step1", "logderiv"];

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub curves: Vec<CurveModel>,
    pub seed: u64,
    pub weight: SmoothWeight,
    /// Groups to run, all when empty.
    pub only: Vec<String>,
}

impl SuiteConfig {
    pub fn new(curves: Vec<CurveModel>) -> Self {
        SuiteConfig { curves, seed: 0, weight: SmoothWeight::default(), only: Vec::new() }
    }

    fn selected(&self) -> Result<Vec<&'static str>> {
        for name in &self.only {
            if !GROUPS.contains(&name.as_str()) {
                return Err(Error::Config(format!(
                    "unknown check group {name:?}; known groups: {}",
                    GROUPS.join(", ")
                )));
            }
        }
        Ok(GROUPS.iter().copied().filter(|g| self.only.is_empty() || self.only.iter().any(|o| o == g)).collect())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GroupReport {
    pub group: String,
    pub seconds: f64,
    pub results: Vec<CheckResult>,
}

impl GroupReport {
    pub fn counts(&self) -> (usize, usize, usize) {
        let count = |s: Status| self.results.iter().filter(|r| r.status == s).count();
        (count(Status::Pass), count(Status::Warn), count(Status::Fail))
    }
}

/// Rankin sums at x in {10^3, 10^4, 10^5} per curve.
pub fn rankin_group(curves: &[CurveModel], primes: &PrimeTable) -> Result<Vec<CheckResult>> {
    let top = 1e5f64;
    let nested: Vec<Vec<CheckResult>> = curves
        .par_iter()
        .map(|c| {
            let t = RankinTable::new(c, top, primes)?;
            let mut out = vec![t.linear_check(top)?, t.square_check(top.ln())?, t.doubling_check(top.ln() / 2.0)?];
            out.extend(t.trend_checks(&[1e3, 1e4, 1e5])?);
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(nested.into_iter().flatten().collect())
}

/// Every odd squarefree q <= max_q and every m in [1, q-1] coprime to q.
pub fn gauss_group(max_q: u64) -> Result<Vec<CheckResult>> {
    let qs: Vec<u64> = (1..=max_q).step_by(2).filter(|&q| is_squarefree(q)).collect();
    let per_q: Vec<Vec<CheckResult>> = qs
        .par_iter()
        .map(|&q| {
            let ms: Vec<i64> = if q == 1 { vec![1] } else { (1..q as i64).filter(|&m| gcd(m as u64, q) == 1).collect() };
            ms.into_iter().map(|m| gauss_sum_check(q, m)).collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(per_q.into_iter().flatten().collect())
}

/// Random admissible j-sum cases, both variants.
pub fn jsum_group(seed: u64, count: usize, max_product: u64) -> Result<Vec<CheckResult>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cases = random_jsum_cases(&mut rng, count, max_product);
    let nested: Vec<Vec<CheckResult>> = cases
        .par_iter()
        .map(|(t, m)| {
            Ok(vec![jsum_crt_check(t, *m, JsumVariant::All)?, jsum_crt_check(t, *m, JsumVariant::Coprime)?])
        })
        .collect::<Result<_>>()?;
    Ok(nested.into_iter().flatten().collect())
}

pub const POISSON_T: f64 = 20.0;
pub const POISSON_LOG_X: f64 = 4.0;

/// q in 1..=max_q, every residue j, l in {0, 1}; X_k = T.
pub fn poisson_group(weight: SmoothWeight, max_q: u64) -> Result<Vec<CheckResult>> {
    let jobs: Vec<(u32, u64)> = [0u32, 1].iter().flat_map(|&l| (1..=max_q).map(move |q| (l, q))).collect();
    let nested: Vec<Vec<CheckResult>> = jobs
        .par_iter()
        .map(|&(l, q)| {
            let w = LogPowerWeight::new(weight, l, POISSON_LOG_X.exp(), POISSON_T)?;
            let case = PoissonCase::with_required_truncation(w, POISSON_T, q)?;
            Ok((0..q as i64).map(|j| case.check(j)).collect())
        })
        .collect::<Result<_>>()?;
    Ok(nested.into_iter().flatten().collect())
}

pub fn decay_group(weight: SmoothWeight) -> Result<Vec<CheckResult>> {
    let x = POISSON_LOG_X.exp();
    let fit = DecayFit::fit(weight, x, POISSON_T, 100.0, 0.25)?;
    let mut out: Vec<CheckResult> = (0..=3u32)
        .into_par_iter()
        .map(|l| fit.check(l))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    out.push(decay_drop_check(weight, x, POISSON_T)?);
    Ok(out)
}

pub const TUPLE_X: f64 = 1e3;
pub const TUPLE_US: [f64; 3] = [1e2, 1e3, 1e4];

pub fn qsum_group(curves: &[CurveModel], primes: &PrimeTable) -> Result<Vec<CheckResult>> {
    let mut grid = Vec::new();
    for r in 1..=MAX_TUPLE_LEN {
        for u in TUPLE_US.into_iter().filter(|&u| u <= TUPLE_X.powi(r as i32)) {
            for (n, sign) in [(1i64, 1i8), (1, -1), (-3, 1), (5, 1), (14, -1)] {
                grid.push(TuplePoint { r, u, n, sign });
            }
        }
    }
    let nested: Vec<Vec<CheckResult>> = curves
        .par_iter()
        .map(|c| {
            let b = BetaTable::new(c, TUPLE_X, primes)?;
            let eps = LogDerivative::new(c, TUPLE_X, primes)?.perron_epsilon()?;
            Ok(q_sum_checks(&b, eps, &grid)?.into_iter().map(|r| r.param("curve", &c.label)).collect())
        })
        .collect::<Result<_>>()?;
    Ok(nested.into_iter().flatten().collect())
}

pub fn step1_group(curves: &[CurveModel], primes: &PrimeTable) -> Result<Vec<CheckResult>> {
    let grid: Vec<(u32, f64)> = (1..=MAX_TUPLE_LEN)
        .flat_map(|r| TUPLE_US.into_iter().filter(move |&u| u <= TUPLE_X.powi(r as i32)).map(move |u| (r, u)))
        .collect();
    let nested: Vec<Vec<CheckResult>> = curves
        .par_iter()
        .map(|c| {
            let b = BetaTable::new(c, TUPLE_X, primes)?;
            let eps = LogDerivative::new(c, TUPLE_X, primes)?.perron_epsilon()?;
            Ok(step1_checks(&b, eps, &grid)?.into_iter().map(|r| r.param("curve", &c.label)).collect())
        })
        .collect::<Result<_>>()?;
    Ok(nested.into_iter().flatten().collect())
}

pub fn logderiv_group(curves: &[CurveModel], primes: &PrimeTable) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    for c in curves {
        let ld = LogDerivative::new(c, 1e4, primes)?;
        let s0 = ld.sigma_min();
        let grid: Vec<(f64, f64)> = [s0, 1.25, 1.5, 2.0]
            .iter()
            .flat_map(|&s| [0.0, 1.0, 5.0, 10.0, 20.0, 50.0].map(|t| (s, t)))
            .collect();
        out.extend(ld.checks(&grid)?.into_iter().map(|r| r.param("curve", &c.label)));
    }
    Ok(out)
}

/// Run the selected groups in parallel; reports come back in declaration order.
pub fn run_suite(config: &SuiteConfig) -> Result<Vec<GroupReport>> {
    let groups = config.selected()?;
    if config.curves.is_empty() {
        return Err(Error::Config("verification suite needs at least one curve".into()));
    }
    let primes = sieve_primes(100_000)?;
    groups
        .par_iter()
        .map(|&g| {
            let start = Instant::now();
            let results = match g {
                "rankin" => rankin_group(&config.curves, &primes),
                "gauss" => gauss_group(500),
                "jsum" => jsum_group(config.seed, 200, 10_000),
                "poisson" => poisson_group(config.weight, 50),
                "decay" => decay_group(config.weight),
                "qsum" => qsum_group(&config.curves, &primes),
                "step1" => step1_group(&config.curves, &primes),
                "logderiv" => logderiv_group(&config.curves, &primes),
                _ => unreachable!("groups are validated"),
            }?;
            Ok(GroupReport { group: g.to_string(), seconds: start.elapsed().as_secs_f64(), results })
        })
        .collect()
}
