//! Segmented sieve of Eratosthenes.

use crate::error::{Error, Result};

/// Default segment length in odd numbers (256 KiB of flags).
pub const DEFAULT_SEGMENT: usize = 1 << 18;

/// All primes up to and including `limit`, in increasing order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u64>,
}

impl PrimeTable {
    pub fn new(limit: u64) -> Result<Self> {
        sieve_primes_segmented(limit, DEFAULT_SEGMENT)
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// Primes strictly below `bound`.
    pub fn below(&self, bound: f64) -> &[u64] {
        let n = self.primes.partition_point(|&p| (p as f64) < bound);
        &self.primes[..n]
    }

    /// Primes less than or equal to `bound`.
    pub fn up_to(&self, bound: u64) -> &[u64] {
        let n = self.primes.partition_point(|&p| p <= bound);
        &self.primes[..n]
    }

    /// Binary search membership; only meaningful for `n <= limit`.
    pub fn contains(&self, n: u64) -> bool {
        self.primes.binary_search(&n).is_ok()
    }

    /// Errors unless the table covers every prime up to `need`.
    pub fn ensure_covers(&self, need: u64) -> Result<()> {
        if self.limit < need {
            return Err(Error::InsufficientPrimes {
                have: self.limit,
                need,
            });
        }
        Ok(())
    }
}

pub fn sieve_primes(limit: u64) -> Result<PrimeTable> {
    PrimeTable::new(limit)
}

/// Sieve with an explicit segment size, counted in odd candidates per segment.
pub fn sieve_primes_segmented(limit: u64, segment: usize) -> Result<PrimeTable> {
    if limit < 2 {
        return Err(Error::EmptyDomain(format!(
            "sieve limit must be at least 2, got {limit}"
        )));
    }
    let segment = segment.max(64);
    let root = isqrt(limit);
    let base = simple_sieve(root);

    let mut primes = Vec::with_capacity(estimate_count(limit));
    primes.push(2);
    if limit == 2 {
        return Ok(PrimeTable { limit, primes });
    }

    // Index i in a segment starting at odd `lo` stands for lo + 2i.
    let mut flags = vec![true; segment];
    let mut lo: u64 = 3;
    while lo <= limit {
        let span = (((limit - lo) / 2 + 1) as usize).min(segment);
        let hi = lo + 2 * (span as u64 - 1);
        flags[..span].fill(true);
        for &p in base.iter().skip(1) {
            if p * p > hi {
                break;
            }
            let mut start = (p * p).max(lo.div_ceil(p) * p);
            if start % 2 == 0 {
                start += p;
            }
            let mut i = ((start - lo) / 2) as usize;
            while i < span {
                flags[i] = false;
                i += p as usize;
            }
        }
        primes.extend(
            flags[..span]
                .iter()
                .enumerate()
                .filter(|(_, &f)| f)
                .map(|(i, _)| lo + 2 * i as u64),
        );
        lo = hi + 2;
    }
    Ok(PrimeTable { limit, primes })
}

fn simple_sieve(n: u64) -> Vec<u64> {
    let n = n as usize;
    if n < 2 {
        return Vec::new();
    }
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

fn estimate_count(limit: u64) -> usize {
    let x = limit as f64;
    (1.3 * x / x.ln().max(1.0)) as usize + 16
}

/// Floor of the square root, exact for all u64.
pub fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut r = (n as f64).sqrt() as u64;
    while r.checked_mul(r).is_none_or(|v| v > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|v| v <= n) {
        r += 1;
    }
    r
}
