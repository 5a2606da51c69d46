//! Poisson summation for the weights W_l and the decay of their Fourier transforms.
//!
//! With hat W(xi) = int W(t) e^{-2 pi i xi t} dt,
//!   sum_m W_l((j + mq)/T) = (T/q) sum_m hat W_l(Tm/q) e(mj/q).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernel::{LogPowerWeight, SmoothWeight};

use super::CheckResult;

/// Largest admissible bound on the dropped frequencies.
pub const TAIL_TARGET: f64 = 1e-8;
const MAX_TRUNCATION: usize = 1 << 14;

/// Bound on (T/q) sum_{|m| > M} |hat W(Tm/q)|, from gamma = max |hat W(xi)| xi^3
/// sampled on [xi_M, 2 xi_M] and sum_{m > M} m^-3 < 1/(2 M^2).
pub fn tail_bound(weight: &LogPowerWeight, t_scale: f64, q: u64, truncation: usize) -> f64 {
    let m = truncation.max(1) as f64;
    let xi_m = t_scale * m / q as f64;
    let gamma = (0..=16)
        .map(|i| {
            let xi = xi_m * (1.0 + i as f64 / 16.0);
            weight.fourier(xi).norm() * xi.powi(3)
        })
        .fold(0.0, f64::max);
    gamma * (q as f64).powi(2) / (t_scale * t_scale * m * m)
}

/// Smallest power of two M whose tail bound is below TAIL_TARGET.
pub fn required_truncation(weight: &LogPowerWeight, t_scale: f64, q: u64) -> Result<usize> {
    let mut m = 1;
    while m <= MAX_TRUNCATION {
        if tail_bound(weight, t_scale, q, m) < TAIL_TARGET {
            return Ok(m);
        }
        m *= 2;
    }
    Err(Error::Cost(format!("no truncation up to {MAX_TRUNCATION} reaches the tail target for q = {q}")))
}

/// The frequency side for one (weight, T, q), shared by every residue j.
#[derive(Debug, Clone)]
pub struct PoissonCase {
    weight: LogPowerWeight,
    t_scale: f64,
    q: u64,
    transforms: Vec<Complex64>,
}

impl PoissonCase {
    pub fn new(weight: LogPowerWeight, t_scale: f64, q: u64, truncation: usize) -> Result<Self> {
        if q == 0 || t_scale.is_nan() || t_scale <= 0.0 {
            return Err(Error::Domain(format!("Poisson check needs q >= 1 and T > 0 (q={q}, T={t_scale})")));
        }
        if tail_bound(&weight, t_scale, q, truncation) >= TAIL_TARGET {
            let required = required_truncation(&weight, t_scale, q)?;
            return Err(Error::Truncation { given: truncation, required });
        }
        let transforms = (0..=truncation).map(|m| weight.fourier(t_scale * m as f64 / q as f64)).collect();
        Ok(PoissonCase { weight, t_scale, q, transforms })
    }

    pub fn with_required_truncation(weight: LogPowerWeight, t_scale: f64, q: u64) -> Result<Self> {
        let m = required_truncation(&weight, t_scale, q)?;
        Self::new(weight, t_scale, q, m)
    }

    pub fn truncation(&self) -> usize {
        self.transforms.len() - 1
    }

    /// Every lattice point j + mq with (j + mq)/T inside the support.
    pub fn lattice_side(&self, j: i64) -> f64 {
        let w = &self.weight.weight;
        let q = self.q as f64;
        let first = ((w.lo * self.t_scale - j as f64) / q).floor() as i64;
        let last = ((w.hi * self.t_scale - j as f64) / q).ceil() as i64;
        (first..=last).map(|m| self.weight.eval((j as f64 + m as f64 * q) / self.t_scale)).sum()
    }

    pub fn frequency_side(&self, j: i64) -> Complex64 {
        let q = self.q;
        let mut s = self.transforms[0];
        for (m, &w) in self.transforms.iter().enumerate().skip(1) {
            let r = (m as i128 * j as i128).rem_euclid(q as i128) as f64;
            let e = Complex64::from_polar(1.0, 2.0 * PI * r / q as f64);
            s += w * e + w.conj() * e.conj();
        }
        s * (self.t_scale / q as f64)
    }

    pub fn check(&self, j: i64) -> CheckResult {
        let lhs = self.lattice_side(j);
        let rhs = self.frequency_side(j);
        let tol = 1e-6 * rhs.norm().max(1.0);
        CheckResult::abs_error("poisson", lhs, rhs, tol)
            .param("q", self.q)
            .param("j", j)
            .param("l", self.weight.l)
            .param("T", self.t_scale)
            .param("truncation", self.truncation())
    }
}

pub fn poisson_check(weight: &LogPowerWeight, t_scale: f64, q: u64, j: i64, truncation: usize) -> Result<CheckResult> {
    Ok(PoissonCase::new(*weight, t_scale, q, truncation)?.check(j))
}

/// max(l, 1)^3 (log X_k + log x)^l min(1, |t|^-3).
pub fn decay_shape(l: u32, x: f64, x_k: f64, t: f64) -> f64 {
    let lf = l.max(1) as f64;
    lf.powi(3) * (x_k.ln() + x.ln()).powi(l as i32) * t.abs().powi(-3).min(1.0)
}

/// Envelope constants fitted once at l = 0 on a frequency grid.
#[derive(Debug, Clone)]
pub struct DecayFit {
    pub weight: SmoothWeight,
    pub x: f64,
    pub x_k: f64,
    pub grid: Vec<f64>,
    pub gamma_transform: f64,
    pub gamma_derivative: f64,
    pub gamma_weight: f64,
}

fn sup_on_support(w: &LogPowerWeight) -> f64 {
    let n = 2000;
    let (lo, hi) = (w.weight.lo, w.weight.hi);
    (1..n).map(|i| w.eval(lo + (hi - lo) * i as f64 / n as f64).abs()).fold(0.0, f64::max)
}

impl DecayFit {
    /// Fit over t in [0, t_max] (the bounds are even in t) with the given step.
    pub fn fit(weight: SmoothWeight, x: f64, x_k: f64, t_max: f64, step: f64) -> Result<Self> {
        let n = (t_max / step).round() as usize;
        let grid: Vec<f64> = (0..=n).map(|i| i as f64 * step).collect();
        let w0 = LogPowerWeight::new(weight, 0, x, x_k)?;
        let mut gt: f64 = 0.0;
        let mut gd: f64 = 0.0;
        for &t in &grid {
            let s = decay_shape(0, x, x_k, t);
            gt = gt.max(w0.fourier(t).norm() / s);
            gd = gd.max(w0.fourier_derivative(t).norm() / s);
        }
        let gw = sup_on_support(&w0) / decay_shape(0, x, x_k, 0.0);
        Ok(DecayFit { weight, x, x_k, grid, gamma_transform: gt, gamma_derivative: gd, gamma_weight: gw })
    }

    /// Worst ratio of |hat W_l|, |d hat W_l / dt| and |W_l| to their envelopes.
    pub fn check(&self, l: u32) -> Result<Vec<CheckResult>> {
        let w = LogPowerWeight::new(self.weight, l, self.x, self.x_k)?;
        let mut worst_t: (f64, f64) = (0.0, 0.0);
        let mut worst_d: (f64, f64) = (0.0, 0.0);
        for &t in &self.grid {
            let s = decay_shape(l, self.x, self.x_k, t);
            let rt = w.fourier(t).norm() / s;
            let rd = w.fourier_derivative(t).norm() / s;
            if rt > worst_t.0 {
                worst_t = (rt, t);
            }
            if rd > worst_d.0 {
                worst_d = (rd, t);
            }
        }
        let sup = sup_on_support(&w) / decay_shape(l, self.x, self.x_k, 0.0);
        Ok(vec![
            CheckResult::envelope("wl_decay", worst_t.0, self.gamma_transform)
                .param("l", l)
                .param("worst_t", worst_t.1)
                .param("gamma_w", self.gamma_transform),
            CheckResult::envelope("wl_decay_derivative", worst_d.0, self.gamma_derivative)
                .param("l", l)
                .param("worst_t", worst_d.1)
                .param("gamma", self.gamma_derivative),
            CheckResult::envelope("wl_sup", sup, self.gamma_weight).param("l", l).param("gamma", self.gamma_weight),
        ])
    }
}

/// max |hat W_0| on [10, 11] over max on [20, 21]; t^-3 decay with slack 2 gives at least 4.
pub fn decay_drop_check(weight: SmoothWeight, x: f64, x_k: f64) -> Result<CheckResult> {
    let w0 = LogPowerWeight::new(weight, 0, x, x_k)?;
    let window = |a: f64| (0..=40).map(|i| w0.fourier(a + i as f64 / 40.0).norm()).fold(0.0, f64::max);
    let near = window(10.0);
    let far = window(20.0);
    Ok(CheckResult::ratio_band("wl_decay_drop", near, far, 4.0, f64::INFINITY)
        .param("near_max", near)
        .param("far_max", far))
}

pub fn wl_decay_check(weight: SmoothWeight, l: u32, x: f64, x_k: f64) -> Result<Vec<CheckResult>> {
    DecayFit::fit(weight, x, x_k, 100.0, 0.25)?.check(l)
}
