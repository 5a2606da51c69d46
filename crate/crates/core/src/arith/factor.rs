//! Trial-division factorization and the functions built on it.

use serde::Serialize;

/// Prime factorization by trial division; intended for n up to about 10^12.
/// Returns (prime, exponent) pairs in increasing prime order. `factorize(1)` is empty.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    for p in [2u64, 3] {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    }
    let mut d = 5u64;
    let mut step = 2;
    while d * d <= n {
        let mut e = 0;
        while n.is_multiple_of(d) {
            n /= d;
            e += 1;
        }
        if e > 0 {
            out.push((d, e));
        }
        d += step;
        step = 6 - step;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Möbius function. `mobius(0)` is defined as 0.
pub fn mobius(n: u64) -> i32 {
    if n == 0 {
        return 0;
    }
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

pub fn is_squarefree(n: u64) -> bool {
    n != 0 && factorize(n).iter().all(|&(_, e)| e == 1)
}

/// Product of the primes dividing `n` to an odd power.
pub fn squarefree_part(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .filter(|&(_, e)| e % 2 == 1)
        .map(|(p, _)| p)
        .product()
}

/// Product of the distinct primes dividing `n`.
pub fn radical(n: u64) -> u64 {
    factorize(n).into_iter().map(|(p, _)| p).product()
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Split of a prime-tuple product by exponent parity.
///
/// `pi1` collects the primes of even multiplicity and `pi2` those of odd
/// multiplicity, each to the first power. So `pi1 * pi2` is the radical of
/// `pi`, the two parts are coprime, and `pi2 == 1` exactly when `pi` is a square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ParityDecomposition {
    pub pi: u64,
    pub pi1: u64,
    pub pi2: u64,
}

impl ParityDecomposition {
    pub fn is_square(&self) -> bool {
        self.pi2 == 1
    }
}

/// Decompose the product of a nonempty tuple of primes (repeats allowed).
///
/// # Panics
/// Panics on an empty tuple or if the product overflows u64.
pub fn parity_decompose(tuple: &[u64]) -> ParityDecomposition {
    assert!(!tuple.is_empty(), "parity decomposition of an empty tuple");
    let mut sorted = tuple.to_vec();
    sorted.sort_unstable();
    let pi = sorted
        .iter()
        .try_fold(1u64, |acc, &p| acc.checked_mul(p))
        .expect("prime tuple product overflows u64");
    let mut pi1 = 1;
    let mut pi2 = 1;
    for run in sorted.chunk_by(|a, b| a == b) {
        if run.len() % 2 == 0 {
            pi1 *= run[0];
        } else {
            pi2 *= run[0];
        }
    }
    ParityDecomposition { pi, pi1, pi2 }
}
