use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::quad::{integrate, Tolerance};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightShape {
    ExpBump,
    PolyBump,
}

/// A nonnegative C^3 bump supported on (lo, hi), peak value `scale` at the midpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmoothWeight {
    pub shape: WeightShape,
    pub lo: f64,
    pub hi: f64,
    pub scale: f64,
}

impl Default for SmoothWeight {
    fn default() -> Self {
        SmoothWeight { shape: WeightShape::ExpBump, lo: 0.5, hi: 1.0, scale: 1.0 }
    }
}

impl SmoothWeight {
    pub fn new(shape: WeightShape, lo: f64, hi: f64) -> Result<Self> {
        let positive = 0.0 < lo && lo < hi && hi <= 1.0;
        let negative = -1.0 <= lo && lo < hi && hi < 0.0;
        if !(positive || negative) {
            return Err(Error::Domain(format!(
                "weight support ({lo}, {hi}) must lie in (0, 1] or [-1, 0)"
            )));
        }
        Ok(SmoothWeight { shape, lo, hi, scale: 1.0 })
    }

    pub fn with_scale(self, scale: f64) -> Self {
        assert!(scale > 0.0);
        SmoothWeight { scale, ..self }
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t <= self.lo || t >= self.hi {
            return 0.0;
        }
        let q = (t - self.lo) * (self.hi - t);
        let peak = 0.25 * (self.hi - self.lo).powi(2);
        let v = match self.shape {
            WeightShape::ExpBump => (1.0 / peak - 1.0 / q).exp(),
            WeightShape::PolyBump => (q / peak).powi(4),
        };
        self.scale * v
    }

    pub fn fourier(&self, freq: f64) -> Complex64 {
        fourier_of(|t| self.eval(t), self.lo, self.hi, freq, 0)
    }
}

/// W_l(t) = (log(t^2 X_k^2) + (log x)/2)^l W(t).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogPowerWeight {
    pub weight: SmoothWeight,
    pub l: u32,
    pub x: f64,
    pub x_k: f64,
}

impl LogPowerWeight {
    pub fn new(weight: SmoothWeight, l: u32, x: f64, x_k: f64) -> Result<Self> {
        if !(x > 0.0 && x_k > 0.0) {
            return Err(Error::Domain(format!("x and X_k must be positive (x={x}, X_k={x_k})")));
        }
        Ok(LogPowerWeight { weight, l, x, x_k })
    }

    pub fn eval(&self, t: f64) -> f64 {
        let w = self.weight.eval(t);
        if w == 0.0 {
            return 0.0;
        }
        let log = (t * t * self.x_k * self.x_k).ln() + 0.5 * self.x.ln();
        log.powi(self.l as i32) * w
    }

    /// The integral of W_l(t) e^{-2 pi i freq t} dt.
    pub fn fourier(&self, freq: f64) -> Complex64 {
        fourier_of(|t| self.eval(t), self.weight.lo, self.weight.hi, freq, 0)
    }

    /// d/dfreq of the Fourier transform.
    pub fn fourier_derivative(&self, freq: f64) -> Complex64 {
        fourier_of(|t| self.eval(t), self.weight.lo, self.weight.hi, freq, 1)
    }
}

fn fourier_of(f: impl Fn(f64) -> f64, lo: f64, hi: f64, freq: f64, derivative: u32) -> Complex64 {
    let factor = Complex64::new(0.0, -2.0 * PI);
    let g = |t: f64| {
        let base = Complex64::from_polar(f(t), -2.0 * PI * freq * t);
        if derivative == 0 { base } else { base * factor * t }
    };
    integrate(g, lo, hi, Tolerance { abs: 1e-13, rel: 1e-11 }).value
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shapes() -> Vec<SmoothWeight> {
        vec![
            SmoothWeight::default(),
            SmoothWeight::new(WeightShape::PolyBump, 0.5, 1.0).unwrap(),
            SmoothWeight::new(WeightShape::ExpBump, -1.0, -0.5).unwrap(),
            SmoothWeight::new(WeightShape::PolyBump, 0.1, 0.9).unwrap(),
        ]
    }

    #[test]
    fn support_and_peak() {
        for w in shapes() {
            assert_eq!(w.eval(w.lo), 0.0);
            assert_eq!(w.eval(w.hi), 0.0);
            assert_eq!(w.eval(w.hi + 0.1), 0.0);
            assert_eq!(w.eval(w.lo - 0.1), 0.0);
            assert!((w.eval(0.5 * (w.lo + w.hi)) - 1.0).abs() < 1e-15);
            for i in 1..100 {
                let t = w.lo + (w.hi - w.lo) * i as f64 / 100.0;
                assert!(w.eval(t) > 0.0 && w.eval(t) <= 1.0);
            }
        }
        assert!(SmoothWeight::new(WeightShape::ExpBump, -0.5, 0.5).is_err());
        assert!(SmoothWeight::new(WeightShape::ExpBump, 0.5, 1.5).is_err());
        assert!(SmoothWeight::new(WeightShape::ExpBump, 0.7, 0.6).is_err());
    }

    /// Largest change between neighbouring central-difference third derivatives
    /// sampled at spacing h, and the largest magnitude seen.
    fn third_difference_jump(f: impl Fn(f64) -> f64, a: f64, b: f64, h: f64) -> (f64, f64) {
        let d3 = |t: f64| (f(t + 2.0 * h) - 2.0 * f(t + h) + 2.0 * f(t - h) - f(t - 2.0 * h)) / (2.0 * h * h * h);
        let n = ((b - a) / h) as usize;
        let vals: Vec<f64> = (0..=n).map(|i| d3(a + h * i as f64)).collect();
        let jump = vals.windows(2).fold(0.0f64, |m, v| m.max((v[1] - v[0]).abs()));
        let range = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        (jump, range)
    }

    /// For a continuous third derivative the largest jump halves with the step.
    #[test]
    fn third_derivative_is_continuous() {
        for w in shapes() {
            let (a, b) = (w.lo - 0.05, w.hi + 0.05);
            let (coarse, range) = third_difference_jump(|t| w.eval(t), a, b, 1e-3);
            let (fine, _) = third_difference_jump(|t| w.eval(t), a, b, 5e-4);
            assert!(fine < 0.6 * coarse, "{:?}: {fine} vs {coarse}", w.shape);
            assert!(fine < 0.05 * range, "{:?}: {fine} vs {range}", w.shape);
        }
    }

    #[test]
    fn continuity_test_detects_cubic_edge() {
        let f = |t: f64| if t > 0.0 { t * t * t } else { 0.0 };
        let (coarse, _) = third_difference_jump(f, -0.05, 0.05, 1e-3);
        let (fine, _) = third_difference_jump(f, -0.05, 0.05, 5e-4);
        assert!(fine > 0.9 * coarse);
    }

    #[test]
    fn log_power_weight() {
        let w = SmoothWeight::default();
        let w0 = LogPowerWeight::new(w, 0, 100.0, 20.0).unwrap();
        for t in [0.6, 0.75, 0.9, 1.2] {
            assert_eq!(w0.eval(t), w.eval(t));
        }
        let e = std::f64::consts::E;
        let w1 = LogPowerWeight::new(w, 1, e, e).unwrap();
        assert_eq!(w1.eval(1.0), 0.0);
        let t = 0.75;
        let want = ((t * t * e * e).ln() + 0.5) * w.eval(t);
        assert!((w1.eval(t) - want).abs() < 1e-15);
    }

    #[test]
    fn fourier_basics() {
        let w = SmoothWeight::default();
        let w0 = LogPowerWeight::new(w, 0, 100.0, 20.0).unwrap();
        let z = w0.fourier(0.0);
        assert!(z.re > 0.0 && z.im.abs() < 1e-15);
        for f in [0.3, 2.0, 7.5] {
            assert!((w0.fourier(-f) - w0.fourier(f).conj()).norm() < 1e-13);
        }
        // Derivative against a central difference.
        let w1 = LogPowerWeight::new(w, 1, 100.0, 20.0).unwrap();
        let h = 1e-5;
        let fd = (w1.fourier(1.3 + h) - w1.fourier(1.3 - h)) / (2.0 * h);
        assert!((fd - w1.fourier_derivative(1.3)).norm() < 1e-6);
    }
}
