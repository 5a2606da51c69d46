//! Quadratic residue symbols.

/// Jacobi symbol (a/n) for odd positive `n`.
///
/// # Panics
/// Panics if `n` is even or zero.
pub fn jacobi(a: i64, n: u64) -> i32 {
    assert!(n % 2 == 1, "jacobi symbol needs an odd positive modulus");
    let mut a = (a as i128).rem_euclid(n as i128) as u64;
    let mut n = n;
    let mut t = 1;
    while a != 0 {
        let tz = a.trailing_zeros();
        a >>= tz;
        if tz % 2 == 1 && (n % 8 == 3 || n % 8 == 5) {
            t = -t;
        }
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        std::mem::swap(&mut a, &mut n);
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

/// Kronecker symbol (a/n), defined for every pair of integers.
///
/// Conventions: (a/0) is 1 when a = ±1 and 0 otherwise; (a/-1) is -1 for
/// negative a; (a/2) is 0 for even a and depends on a mod 8 otherwise.
pub fn kronecker(a: i64, n: i64) -> i32 {
    if n == 0 {
        return i32::from(a == 1 || a == -1);
    }
    let mut sign = 1;
    if n < 0 && a < 0 {
        sign = -1;
    }
    let mut m = n.unsigned_abs();
    let tz = m.trailing_zeros();
    if tz > 0 {
        if a % 2 == 0 {
            return 0;
        }
        m >>= tz;
        if tz % 2 == 1 {
            let r = a.rem_euclid(8);
            if r == 3 || r == 5 {
                sign = -sign;
            }
        }
    }
    sign * jacobi(a, m)
}

/// Quadratic character of Q(sqrt(d)) evaluated at m, realized through the
/// associated discriminant `d` if d = 1 mod 4 and `4d` otherwise.
pub fn quadratic_character(d: i64, m: i64) -> i32 {
    kronecker(associated_discriminant(d), m)
}

/// `d` when d = 1 (mod 4), otherwise `4d`.
pub fn associated_discriminant(d: i64) -> i64 {
    if d.rem_euclid(4) == 1 {
        d
    } else {
        4 * d
    }
}
