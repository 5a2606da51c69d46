use num_complex::Complex64;

use super::quad::{integrate_breaks, Tolerance};
use crate::error::{Error, Result};

/// F(x) = max(0, 1 - |x|).
pub fn triangle(x: f64) -> f64 {
    (1.0 - x.abs()).max(0.0)
}

/// sin(w)/w with its limit at 0.
pub fn sinc(w: f64) -> f64 {
    if w.abs() < 1e-8 {
        1.0 - w * w / 6.0
    } else {
        w.sin() / w
    }
}

/// Triangle kernel at scale lambda: F_lambda(x) = F(x / lambda).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangleKernel {
    lambda: f64,
}

impl TriangleKernel {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::Domain(format!("kernel scale must be positive and finite, got {lambda}")));
        }
        Ok(TriangleKernel { lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn eval(&self, x: f64) -> f64 {
        triangle(x / self.lambda)
    }

    /// Phi(1 + it) = lambda * (sin(lambda t / 2) / (lambda t / 2))^2.
    pub fn mellin_phi(&self, t: f64) -> f64 {
        let s = sinc(0.5 * self.lambda * t);
        self.lambda * s * s
    }

    /// Phi(u) = 4 sinh^2(lambda z / 2) / (lambda z^2) with z = u - 1.
    pub fn mellin_phi_complex(&self, u: Complex64) -> Complex64 {
        let w = (u - 1.0) * (0.5 * self.lambda);
        let s = if w.norm() < 1e-6 { 1.0 + w * w / 6.0 } else { w.sinh() / w };
        s * s * self.lambda
    }

    /// The defining integral of F_lambda(x) e^{(u-1)x} over [-lambda, lambda], by quadrature.
    pub fn mellin_phi_quadrature(&self, u: Complex64) -> Complex64 {
        let z = u - 1.0;
        let l = self.lambda;
        integrate_breaks(
            |x: f64| (z * x).exp() * self.eval(x),
            &[-l, 0.0, l],
            Tolerance { abs: 1e-12, rel: 1e-13 },
        )
        .value
    }

    /// Integrand F(t/lambda)/(e^t - 1) - 1/(t e^t), with its limit 1/2 - 1/lambda near 0.
    pub fn archimedean_integrand(&self, t: f64) -> f64 {
        if t < 1e-8 {
            0.5 - 1.0 / self.lambda
        } else {
            self.eval(t) / t.exp_m1() - (-t).exp() / t
        }
    }

    /// Integral of the archimedean integrand over (0, infinity).
    pub fn archimedean_integral(&self) -> f64 {
        let l = self.lambda;
        let breaks = [0.0, l.min(1.0), l, l + 50.0];
        integrate_breaks(|t| self.archimedean_integrand(t), &breaks, Tolerance { abs: 1e-12, rel: 0.0 }).value
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_values() {
        assert_eq!(triangle(0.0), 1.0);
        assert_eq!(triangle(1.0), 0.0);
        assert_eq!(triangle(-1.0), 0.0);
        assert_eq!(triangle(0.25), 0.75);
        assert_eq!(triangle(3.0), 0.0);
    }

    #[test]
    fn phi_values() {
        let k = TriangleKernel::new(2.0).unwrap();
        assert_eq!(k.mellin_phi(0.0), 2.0);
        assert!((k.mellin_phi(1.0) - 2.0 * 1f64.sin().powi(2)).abs() < 1e-15);
        assert!((k.mellin_phi(1.0) - 1.416_146_836_547_142).abs() < 1e-12);
        assert!(k.mellin_phi(std::f64::consts::PI).abs() < 1e-15);
        let q = k.mellin_phi_quadrature(Complex64::new(1.0, 0.0));
        assert!((q - 2.0).norm() < 1e-12);
        assert!(TriangleKernel::new(0.0).is_err());
    }

    #[test]
    fn phi_complex_matches_quadrature_off_line() {
        let k = TriangleKernel::new(5.0).unwrap();
        for (re, im) in [(0.0, 0.0), (0.3, 1.7), (2.0, -4.0), (1.0, 1e-9), (1.5, 0.0)] {
            let u = Complex64::new(re, im);
            let d = k.mellin_phi_complex(u) - k.mellin_phi_quadrature(u);
            assert!(d.norm() < 1e-9 * k.mellin_phi_complex(u).norm().max(1.0), "u={u}");
        }
    }

    #[test]
    fn archimedean_limit_at_zero() {
        for lambda in [1.0, 3.0, 10.0] {
            let k = TriangleKernel::new(lambda).unwrap();
            let limit = 0.5 - 1.0 / lambda;
            assert_eq!(k.archimedean_integrand(0.0), limit);
            let near = k.archimedean_integrand(1e-4);
            assert!((near - limit).abs() < 1e-4, "lambda={lambda}: {near}");
        }
    }

    #[test]
    fn archimedean_values() {
        let cases = [(1.0, -0.658_96), (10.0, 0.4127), (50.0, 0.5443)];
        for (lambda, want) in cases {
            let v = TriangleKernel::new(lambda).unwrap().archimedean_integral();
            assert!((v - want).abs() < 1e-3, "lambda={lambda}: {v}");
        }
    }
}
