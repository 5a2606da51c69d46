//! The multivariable sums over prime tuples: the Q-sum
//!   sum_{p_1...p_r <= U, pi2 > 1, (p_j, n) = 1} beta_{p_1}...beta_{p_r}
//!       sum_{d | pi1} (+-n d / pi2) / sqrt(pi1 / d)
//! and the plain product sum sum_{p_1...p_r <= U} beta_{p_1}...beta_{p_r}.

use crate::arith::{factorize, gcd, kronecker, parity_decompose, PrimeTable};
use crate::curve::{ApTable, CurveModel};
use crate::error::{Error, Result};
use crate::kernel::triangle;
use crate::numeric::CompensatedSum;

use super::CheckResult;

pub const MAX_TUPLE_LEN: u32 = 3;

/// beta_p = a_p (log p / p) F(log p / log x) for every p < x.
#[derive(Debug, Clone)]
pub struct BetaTable {
    pub x: f64,
    pub log_conductor: f64,
    primes: Vec<u64>,
    betas: Vec<f64>,
}

impl BetaTable {
    pub fn new(curve: &CurveModel, x: f64, primes: &PrimeTable) -> Result<Self> {
        if x <= 1.0 {
            return Err(Error::Domain(format!("x must exceed 1, got {x}")));
        }
        let need = if x <= 2.0 { 1 } else { x.ceil() as u64 - 1 };
        primes.ensure_covers(need)?;
        let aps = ApTable::new(curve, primes.below(x))?;
        let lx = x.ln();
        let betas = aps
            .primes()
            .iter()
            .zip(aps.values())
            .map(|(&p, &a)| {
                let lp = (p as f64).ln();
                a as f64 * lp / p as f64 * triangle(lp / lx)
            })
            .collect();
        Ok(BetaTable { x, log_conductor: (curve.conductor as f64).ln(), primes: aps.primes().to_vec(), betas })
    }

    pub fn beta(&self, p: u64) -> f64 {
        self.primes.binary_search(&p).map_or(0.0, |i| self.betas[i])
    }

    fn primes_up_to(&self, u: f64) -> &[u64] {
        let end = self.primes.partition_point(|&p| (p as f64) <= u);
        &self.primes[..end]
    }
}

fn divisors_squarefree(n: u64) -> Vec<u64> {
    let mut divs = vec![1u64];
    for (p, _) in factorize(n) {
        let more: Vec<u64> = divs.iter().map(|d| d * p).collect();
        divs.extend(more);
    }
    divs
}

/// Character part of Q: sum_{d | pi1} (sign n d / pi2) / sqrt(pi1 / d).
fn q_character(pi1: u64, pi2: u64, n: i64, sign: i8) -> f64 {
    divisors_squarefree(pi1)
        .into_iter()
        .map(|d| kronecker(sign as i64 * n * d as i64, pi2 as i64) as f64 / ((pi1 / d) as f64).sqrt())
        .sum()
}

pub fn q_term(betas: &BetaTable, tuple: &[u64], n: i64, sign: i8) -> Result<f64> {
    if tuple.is_empty() || n == 0 || (sign != 1 && sign != -1) {
        return Err(Error::Domain("Q needs a nonempty tuple, n != 0 and sign = +-1".into()));
    }
    if let Some(&p) = tuple.iter().find(|&&p| gcd(p, n.unsigned_abs()) != 1) {
        return Err(Error::Domain(format!("prime {p} of the tuple divides n = {n}")));
    }
    let pd = parity_decompose(tuple);
    if pd.pi2 == 1 {
        return Err(Error::Domain(format!("tuple {tuple:?} has a square product and is excluded")));
    }
    let prod: f64 = tuple.iter().map(|&p| betas.beta(p)).product();
    Ok(prod * q_character(pd.pi1, pd.pi2, n, sign))
}

fn check_cost(r: u32, u: f64, x: f64) -> Result<()> {
    if r == 0 {
        return Err(Error::Domain("tuple length r must be at least 1".into()));
    }
    if r > MAX_TUPLE_LEN {
        return Err(Error::Cost(format!("tuple length {r} exceeds {MAX_TUPLE_LEN}")));
    }
    if u > x.powi(r as i32) {
        return Err(Error::Domain(format!("U = {u} exceeds x^r = {}", x.powi(r as i32))));
    }
    Ok(())
}

/// Ordered tuples of primes with product <= U, visited depth first.
fn for_each_tuple(primes: &[u64], r: u32, u: f64, visit: &mut impl FnMut(&[u64])) {
    fn go(primes: &[u64], left: u32, bound: f64, tuple: &mut Vec<u64>, visit: &mut impl FnMut(&[u64])) {
        if left == 0 {
            visit(tuple);
            return;
        }
        for &p in primes {
            let pf = p as f64;
            if pf > bound {
                break;
            }
            tuple.push(p);
            go(primes, left - 1, bound / pf, tuple, visit);
            tuple.pop();
        }
    }
    go(primes, r, u, &mut Vec::with_capacity(r as usize), visit);
}

pub fn q_sum(betas: &BetaTable, r: u32, n: i64, sign: i8, u: f64) -> Result<f64> {
    check_cost(r, u, betas.x)?;
    let primes: Vec<u64> = betas.primes_up_to(u).iter().copied().filter(|&p| gcd(p, n.unsigned_abs()) == 1).collect();
    let mut s = CompensatedSum::new();
    let mut err = None;
    for_each_tuple(&primes, r, u, &mut |t| {
        if parity_decompose(t).pi2 > 1 {
            match q_term(betas, t, n, sign) {
                Ok(v) => s.add(v),
                Err(e) => err = Some(e),
            }
        }
    });
    err.map_or(Ok(s.value()), Err)
}

pub fn step1_sum(betas: &BetaTable, r: u32, u: f64) -> Result<f64> {
    check_cost(r, u, betas.x)?;
    let primes = betas.primes_up_to(u);
    let mut s = CompensatedSum::new();
    for_each_tuple(primes, r, u, &mut |t| s.add(t.iter().map(|&p| betas.beta(p)).product()));
    Ok(s.value())
}

/// Enumerate N <= U with exactly r prime factors; each multiset of primes
/// stands for r! / prod(e_i!) ordered tuples.
fn by_factorization(r: u32, u: f64, mut value: impl FnMut(&[u64]) -> Option<f64>) -> f64 {
    let mut s = CompensatedSum::new();
    let fact = |k: u32| (1..=k as u64).product::<u64>() as f64;
    for n in 2..=(u.floor() as u64) {
        let f = factorize(n);
        if f.iter().map(|&(_, e)| e).sum::<u32>() != r {
            continue;
        }
        let tuple: Vec<u64> = f.iter().flat_map(|&(p, e)| std::iter::repeat_n(p, e as usize)).collect();
        if let Some(v) = value(&tuple) {
            let arrangements = fact(r) / f.iter().map(|&(_, e)| fact(e)).product::<f64>();
            s.add(arrangements * v);
        }
    }
    s.value()
}

pub fn q_sum_oracle(betas: &BetaTable, r: u32, n: i64, sign: i8, u: f64) -> f64 {
    by_factorization(r, u, |t| {
        if t.iter().any(|&p| gcd(p, n.unsigned_abs()) != 1) || parity_decompose(t).pi2 == 1 {
            return None;
        }
        q_term(betas, t, n, sign).ok()
    })
}

pub fn step1_oracle(betas: &BetaTable, r: u32, u: f64) -> f64 {
    by_factorization(r, u, |t| Some(t.iter().map(|&p| betas.beta(p)).product()))
}

/// (log N_E + 3 log|n| + 3 log(U+2))^r (log x)^{2r+1}.
pub fn q_shape(betas: &BetaTable, r: u32, n: i64, u: f64) -> f64 {
    let lx = betas.x.ln();
    (betas.log_conductor + 3.0 * (n.unsigned_abs() as f64).ln() + 3.0 * (u + 2.0).ln()).powi(r as i32)
        * lx.powi(2 * r as i32 + 1)
}

/// (log N_E + log(U+2))^r (log x)^{2r+1}.
pub fn step1_shape(betas: &BetaTable, r: u32, u: f64) -> f64 {
    let lx = betas.x.ln();
    (betas.log_conductor + (u + 2.0).ln()).powi(r as i32) * lx.powi(2 * r as i32 + 1)
}

/// One grid point of a tuple-sum study.
#[derive(Debug, Clone, Copy)]
pub struct TuplePoint {
    pub r: u32,
    pub u: f64,
    pub n: i64,
    pub sign: i8,
}

/// Enumeration vs oracle at every point, then the envelope (2 e eps)^r q_shape
/// with eps the log-derivative constant of the curve.
pub fn q_sum_checks(betas: &BetaTable, eps: f64, grid: &[TuplePoint]) -> Result<Vec<CheckResult>> {
    let c = 2.0 * std::f64::consts::E * eps;
    let mut out = Vec::new();
    let mut envelopes = Vec::new();
    for pt in grid {
        let v = q_sum(betas, pt.r, pt.n, pt.sign, pt.u)?;
        let oracle = q_sum_oracle(betas, pt.r, pt.n, pt.sign, pt.u);
        let tag = |c: CheckResult| c.param("r", pt.r).param("U", pt.u).param("n", pt.n).param("sign", pt.sign);
        out.push(tag(CheckResult::abs_error("q_sum_oracle", v, oracle, 1e-12 * oracle.abs().max(1e-12))));
        let env = c.powi(pt.r as i32) * q_shape(betas, pt.r, pt.n, pt.u);
        envelopes.push(tag(CheckResult::envelope("q_sum_envelope", v, env)).param("c_tilde", c));
    }
    out.extend(envelopes);
    Ok(out)
}

/// Enumeration vs oracle, then the envelope (e eps)^r step1_shape.
pub fn step1_checks(betas: &BetaTable, eps: f64, grid: &[(u32, f64)]) -> Result<Vec<CheckResult>> {
    let c = std::f64::consts::E * eps;
    let mut out = Vec::new();
    let mut envelopes = Vec::new();
    for &(r, u) in grid {
        let v = step1_sum(betas, r, u)?;
        let oracle = step1_oracle(betas, r, u);
        out.push(
            CheckResult::abs_error("step1_oracle", v, oracle, 1e-12 * oracle.abs().max(1e-12))
                .param("r", r)
                .param("U", u),
        );
        let env = c.powi(r as i32) * step1_shape(betas, r, u);
        envelopes.push(
            CheckResult::envelope("step1_envelope", v, env).param("r", r).param("U", u).param("epsilon_e", eps),
        );
    }
    out.extend(envelopes);
    Ok(out)
}
