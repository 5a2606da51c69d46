//! Quadratic Gauss sums and the CRT-factored character sum over j mod pi1 pi2.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::arith::{gcd, is_squarefree, jacobi, kronecker, mobius, parity_decompose};
use crate::error::{Error, Result};

use super::CheckResult;

/// e(a / q) with a reduced mod q first.
fn e_frac(a: i128, q: u64) -> Complex64 {
    let r = a.rem_euclid(q as i128) as f64;
    Complex64::from_polar(1.0, 2.0 * PI * r / q as f64)
}

/// epsilon_q = 1 for q = 1 mod 4, i for q = 3 mod 4.
pub fn epsilon(q: u64) -> Complex64 {
    if q % 4 == 1 {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::new(0.0, 1.0)
    }
}

/// sum_{j mod q} (j/q) e(mj/q) by enumeration.
pub fn gauss_sum(q: u64, m: i64) -> Complex64 {
    (0..q).map(|j| e_frac(m as i128 * j as i128, q) * jacobi(j as i64, q) as f64).sum()
}

/// (m/q) epsilon_q sqrt(q), valid for odd squarefree q.
pub fn gauss_sum_closed(q: u64, m: i64) -> Complex64 {
    epsilon(q) * (jacobi(m, q) as f64 * (q as f64).sqrt())
}

fn check_odd_squarefree(q: u64, what: &str) -> Result<()> {
    if q == 0 || q.is_multiple_of(2) || !is_squarefree(q) {
        return Err(Error::Domain(format!("{what} must be odd and squarefree, got {q}")));
    }
    Ok(())
}

pub fn gauss_sum_check(q: u64, m: i64) -> Result<CheckResult> {
    check_odd_squarefree(q, "Gauss sum modulus")?;
    if gcd(m.unsigned_abs(), q) != 1 {
        return Err(Error::Domain(format!("m = {m} must be coprime to q = {q}")));
    }
    let computed = gauss_sum(q, m);
    let reference = gauss_sum_closed(q, m);
    // The unit sqrt(q)(1 - i(-1/q))/(1 + i) differs from epsilon_q by the factor -i.
    let alt_unit = Complex64::new(1.0, -(kronecker(-1, q as i64) as f64)) / Complex64::new(1.0, 1.0);
    let alt = alt_unit * (jacobi(m, q) as f64 * (q as f64).sqrt());
    let mut c = CheckResult::abs_error("gauss_sum", computed, reference, 1e-9 * (q as f64).sqrt())
        .param("q", q)
        .param("m", m);
    if q > 1 && (alt - computed).norm() > 1e-6 {
        c = c.with_note("the alternative unit (1 - i(-1/q))/(1 + i) is off by a factor -i");
    }
    Ok(c)
}

/// Which residues j mod pi1 pi2 are summed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum JsumVariant {
    /// Every j.
    All,
    /// j coprime to pi1, the support of prod_i (j / p_i).
    Coprime,
}

/// sum over j mod pi1 pi2 (restricted per variant) of (j/pi2) e(mj / pi1 pi2).
pub fn jsum_enumerate(pi1: u64, pi2: u64, m: i64, variant: JsumVariant) -> Complex64 {
    let n = pi1 * pi2;
    (0..n)
        .filter(|&j| variant == JsumVariant::All || gcd(j, pi1) == 1)
        .map(|j| e_frac(m as i128 * j as i128, n) * jacobi(j as i64, pi2) as f64)
        .sum()
}

/// The same sum split by the Chinese remainder theorem into a sum mod pi1
/// (pi1 [pi1 | m], or the Ramanujan sum mu(pi1/d1) phi(d1) for the coprime
/// variant) times the Gauss sum mod pi2 at m / pi1.
pub fn jsum_closed(pi1: u64, pi2: u64, m: i64, variant: JsumVariant) -> Complex64 {
    let d1 = gcd(m.unsigned_abs(), pi1);
    let first = match variant {
        JsumVariant::All => {
            if d1 == pi1 {
                pi1 as f64
            } else {
                0.0
            }
        }
        JsumVariant::Coprime => mobius(pi1 / d1) as f64 * totient_squarefree(d1) as f64,
    };
    let chi = jacobi(m, pi2) * jacobi(pi1 as i64, pi2);
    epsilon(pi2) * (first * chi as f64 * (pi2 as f64).sqrt())
}

fn totient_squarefree(n: u64) -> u64 {
    crate::arith::factorize(n).iter().map(|&(p, _)| p - 1).product()
}

pub fn jsum_crt_check(tuple: &[u64], m: i64, variant: JsumVariant) -> Result<CheckResult> {
    if tuple.is_empty() || m == 0 {
        return Err(Error::Domain("j-sum needs a nonempty tuple and m != 0".into()));
    }
    let pd = parity_decompose(tuple);
    if pd.pi2 == 1 {
        return Err(Error::Domain(format!("tuple {tuple:?} has a square product")));
    }
    check_odd_squarefree(pd.pi2, "pi2")?;
    let (pi1, pi2) = (pd.pi1, pd.pi2);
    let computed = jsum_enumerate(pi1, pi2, m, variant);
    let reference = jsum_closed(pi1, pi2, m, variant);
    let d1 = gcd(m.unsigned_abs(), pi1);
    let d2 = gcd(m.unsigned_abs(), pi2);
    let vanishes = d2 > 1 || m % (pi1 * pi2) as i64 == 0;
    let tol = 1e-9 * ((pi1 * pi2) as f64).sqrt();
    let mut c = CheckResult::abs_error("jsum_crt", computed, reference, tol)
        .param("tuple", tuple)
        .param("m", m)
        .param("pi1", pi1)
        .param("pi2", pi2)
        .param("variant", variant)
        .param("delta1", d1)
        .param("delta2", d2);
    if vanishes {
        // Must vanish exactly, independent of the closed form.
        let zero = computed.norm() <= 1e-9;
        if !zero {
            c.pass = false;
            c.status = super::Status::Fail;
        }
        c = c.param("expected_zero", true);
    }
    if variant == JsumVariant::Coprime && d1 > 1 && !vanishes {
        c = c.with_note("the factor mu(pi1/d1) d1 in place of mu(pi1/d1) phi(d1) would not match");
    }
    Ok(c)
}

/// Random admissible cases: odd-prime tuples with pi1 pi2 <= max_product and pi2 > 1.
pub fn random_jsum_cases<R: Rng>(rng: &mut R, count: usize, max_product: u64) -> Vec<(Vec<u64>, i64)> {
    let small = [3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47];
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let r = rng.gen_range(1..=5);
        let tuple: Vec<u64> = (0..r).map(|_| *small.choose(rng).expect("nonempty")).collect();
        let pd = parity_decompose(&tuple);
        if pd.pi2 == 1 || pd.pi1 * pd.pi2 > max_product {
            continue;
        }
        let n = (pd.pi1 * pd.pi2) as i64;
        let m = match out.len() % 4 {
            // Multiples of pi1 pi2, of a prime of pi2, of pi1, and generic.
            0 => n * rng.gen_range(1..=3) * if rng.gen() { 1 } else { -1 },
            1 => crate::arith::factorize(pd.pi2)[0].0 as i64 * rng.gen_range(1..=50),
            2 => pd.pi1 as i64 * rng.gen_range(1..=50),
            _ => rng.gen_range(-10_000..=10_000),
        };
        if m == 0 {
            continue;
        }
        out.push((tuple, m));
    }
    out
}
