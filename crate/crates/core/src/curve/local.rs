//! Local data of a short Weierstrass model at a prime p > 3.

use crate::arith::kronecker;

/// Trace of Frobenius at p together with the reduction type.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalData {
    pub ap: i64,
    pub good: bool,
}

impl LocalData {
    /// c_{p^m}: the power sum alpha^m + conj(alpha)^m for good reduction,
    /// a_p^m otherwise.
    pub fn coefficient(&self, p: u64, m: u32) -> i64 {
        if self.good {
            power_sum(self.ap, p, m)
        } else {
            self.ap.pow(m)
        }
    }
}

/// alpha^m + conj(alpha)^m where alpha + conj(alpha) = a and alpha * conj(alpha) = p.
pub fn power_sum(a: i64, p: u64, m: u32) -> i64 {
    let p = p as i128;
    let a = a as i128;
    let (mut prev, mut cur) = (2i128, a);
    if m == 0 {
        return 2;
    }
    for _ in 1..m {
        let next = a * cur - p * prev;
        prev = cur;
        cur = next;
    }
    i64::try_from(cur).expect("prime-power coefficient overflows i64")
}

fn valuation(n: i128, p: i128) -> (u32, i128) {
    debug_assert!(n != 0);
    let mut n = n;
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    (v, n)
}

/// -sum over x mod p of (f(x)/p) for f = x^3 + a x + b, with a, b already reduced mod p.
pub fn character_sum_trace(a: u64, b: u64, p: u64) -> i64 {
    let add = |u: u64, v: u64| {
        let w = u + v;
        if w >= p {
            w - p
        } else {
            w
        }
    };
    let mut is_square = vec![false; p as usize];
    // (y + 1)^2 = y^2 + (2y + 1)
    let (mut sq, mut step) = (0u64, 1u64);
    for _ in 0..=(p / 2) {
        is_square[sq as usize] = true;
        sq = add(sq, step);
        step = add(step, 2 % p);
    }
    is_square[0] = false;
    // f(x) = x^3 + a x + b stepped by finite differences:
    // d1 = f(x+1) - f(x), d2 = d1(x+1) - d1(x) = 6x + 6, d3 = 6.
    let (a, b) = (a % p, b % p);
    let mut f = b;
    let mut d1 = add(1, a);
    let mut d2 = 6 % p;
    let d3 = 6 % p;
    let mut s: i64 = 0;
    for _ in 0..p {
        if f != 0 {
            s += if is_square[f as usize] { 1 } else { -1 };
        }
        f = add(f, d1);
        d1 = add(d1, d2);
        d2 = add(d2, d3);
    }
    -s
}

/// Local data at p > 3 of y^2 = x^3 + (a d^2) x + (b d^3).
///
/// The model is first made minimal at p. Nonsingular reduction gives a_p by a
/// character sum; a cusp gives 0; a node gives +1 (split) or -1 (non-split),
/// split exactly when 3*x0 is a square for the double root x0 = -3B/(2A),
/// i.e. when (-2AB / p) = 1.
pub fn local_data(a: i64, b: i64, d: i64, p: u64) -> LocalData {
    assert!(p > 3, "local_data handles p > 3 only");
    assert!(d != 0);
    let pi = p as i128;
    let (vd, ud) = valuation(d as i128, pi);
    let ud = ud.rem_euclid(pi);
    // Exponent of p in A d^2 (resp. B d^3) and the unit part mod p; None for a zero coefficient.
    let part = |c: i64, dpow: u32| -> Option<(u32, i128)> {
        (c != 0).then(|| {
            let (v, u) = valuation(c as i128, pi);
            (v + dpow * vd, u.rem_euclid(pi) * ud.pow(dpow) % pi)
        })
    };
    let pa = part(a, 2);
    let pb = part(b, 3);
    let k = match (pa, pb) {
        (Some((va, _)), Some((vb, _))) => (va / 4).min(vb / 6),
        (Some((va, _)), None) => va / 4,
        (None, Some((vb, _))) => vb / 6,
        (None, None) => panic!("singular model"),
    };
    let residue = |c: Option<(u32, i128)>, w: u32| -> u64 {
        match c {
            Some((v, u)) if v == w * k => u as u64,
            _ => 0,
        }
    };
    let ra = residue(pa, 4);
    let rb = residue(pb, 6);

    let disc = (4 * (ra as u128).pow(3) + 27 * (rb as u128).pow(2)) % p as u128;
    if disc != 0 {
        return LocalData {
            ap: character_sum_trace(ra, rb, p),
            good: true,
        };
    }
    if ra == 0 {
        return LocalData { ap: 0, good: false };
    }
    let t = -2 * (ra as i128) * (rb as i128) % pi;
    LocalData {
        ap: kronecker(t as i64, p as i64) as i64,
        good: false,
    }
}
