//! The catalog metadata (conductor, root number, traces at 2 and 3) is checked
//! against the functional equation of the L-series and against point counts
//! on long Weierstrass models that are minimal at 2 and 3.

use std::f64::consts::PI;

use twistrank::curve::{Catalog, CurveModel};

/// Hecke coefficients a_n for 1 <= n <= len (index 0 unused).
fn dirichlet_coefficients(curve: &CurveModel, len: usize) -> Vec<f64> {
    let mut spf = vec![0usize; len + 1];
    for n in 2..=len {
        if spf[n] == 0 {
            for k in (n..=len).step_by(n) {
                if spf[k] == 0 {
                    spf[k] = n;
                }
            }
        }
    }
    let mut a = vec![0i64; len + 1];
    a[1] = 1;
    for n in 2..=len {
        let p = spf[n];
        let mut m = n;
        let mut exp = 0;
        while m % p == 0 {
            m /= p;
            exp += 1;
        }
        if m > 1 {
            a[n] = a[m] * a[n / m];
            continue;
        }
        let ap = curve.ap(p as u64).unwrap();
        let good = !curve.conductor.is_multiple_of(p as u64);
        let mut pw = vec![1i64, ap];
        for j in 2..=exp {
            let next = ap * pw[j - 1] - if good { p as i64 * pw[j - 2] } else { 0 };
            pw.push(next);
        }
        a[n] = pw[exp];
    }
    a.into_iter().map(|v| v as f64).collect()
}

/// theta(t) = sum a_n exp(-2 pi n t / sqrt N) satisfies theta(1/t) = w t^2 theta(t).
#[test]
fn functional_equation_fixes_conductor_and_sign() {
    for curve in Catalog::builtin().curves() {
        let a = dirichlet_coefficients(curve, 4000);
        let sqrt_n = (curve.conductor as f64).sqrt();
        let theta = |t: f64| -> f64 {
            a.iter().enumerate().skip(1).map(|(n, &c)| c * (-2.0 * PI * n as f64 * t / sqrt_n).exp()).sum()
        };
        for t in [1.1f64, 1.3, 1.7] {
            let lhs = theta(1.0 / t);
            let rhs = curve.root_number as f64 * t * t * theta(t);
            assert!((lhs - rhs).abs() < 1e-8 * lhs.abs().max(1.0), "{} t={t}: {lhs} vs {rhs}", curve.label);
            // The wrong sign must fail visibly.
            assert!((lhs + rhs).abs() > 1e-3, "{} t={t}", curve.label);
        }
    }
}

/// p + 1 - #E(F_p) on y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6, singular points included.
fn long_trace(coeffs: [i64; 5], p: i64) -> i64 {
    let [a1, a2, a3, a4, a6] = coeffs;
    let mut count = 1;
    for x in 0..p {
        for y in 0..p {
            let lhs = y * y + a1 * x * y + a3 * y;
            let rhs = x * x * x + a2 * x * x + a4 * x + a6;
            if (lhs - rhs).rem_euclid(p) == 0 {
                count += 1;
            }
        }
    }
    p + 1 - count
}

#[test]
fn small_prime_metadata_matches_minimal_models() {
    let catalog = Catalog::builtin();
    let models = [("64a", [0, 0, 0, 1, 0]), ("37a", [0, 0, 1, -1, 0]), ("11a", [0, -1, 1, -10, -20])];
    for (label, coeffs) in models {
        let curve = catalog.get(label).unwrap();
        assert_eq!(curve.a2, Some(long_trace(coeffs, 2)), "{label} at 2");
        assert_eq!(curve.a3, Some(long_trace(coeffs, 3)), "{label} at 3");
        for p in [5i64, 7, 11, 13, 17, 19, 23, 29] {
            assert_eq!(curve.ap(p as u64).unwrap(), long_trace(coeffs, p), "{label} at {p}");
        }
    }
}
