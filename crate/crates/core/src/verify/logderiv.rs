//! Truncated logarithmic derivative sum_{p < x} a_p (log p) p^{-s} F(log p / log x).

use num_complex::Complex64;

use crate::arith::PrimeTable;
use crate::curve::{ApTable, CurveModel};
use crate::error::{Error, Result};
use crate::kernel::triangle;

use super::CheckResult;

#[derive(Debug, Clone)]
pub struct LogDerivative {
    x: f64,
    log_conductor: f64,
    aps: ApTable,
}

impl LogDerivative {
    pub fn new(curve: &CurveModel, x: f64, primes: &PrimeTable) -> Result<Self> {
        if x <= std::f64::consts::E {
            return Err(Error::Domain(format!("x must exceed e, got {x}")));
        }
        primes.ensure_covers(x.ceil() as u64 - 1)?;
        let aps = ApTable::new(curve, primes.below(x))?;
        Ok(LogDerivative { x, log_conductor: (curve.conductor as f64).ln(), aps })
    }

    pub fn sigma_min(&self) -> f64 {
        1.0 + 1.0 / self.x.ln()
    }

    pub fn eval(&self, sigma: f64, t: f64) -> Result<Complex64> {
        if !(self.sigma_min() - 1e-12..=2.0).contains(&sigma) {
            return Err(Error::Domain(format!(
                "sigma = {sigma} outside [1 + 1/log x, 2] = [{}, 2]",
                self.sigma_min()
            )));
        }
        let lx = self.x.ln();
        let mut s = Complex64::new(0.0, 0.0);
        for (&p, &a) in self.aps.primes().iter().zip(self.aps.values()) {
            let lp = (p as f64).ln();
            let mag = a as f64 * lp * (-sigma * lp).exp() * triangle(lp / lx);
            s += Complex64::from_polar(mag, -t * lp);
        }
        Ok(s)
    }

    /// (log N_E + log(|s| + 2)) (log x)^2.
    pub fn shape(&self, sigma: f64, t: f64) -> f64 {
        let s = Complex64::new(sigma, t).norm();
        (self.log_conductor + (s + 2.0).ln()) * self.x.ln().powi(2)
    }

    /// sum_{p < x} 2 log p / p^{3/2}, which bounds the value at sigma = 2.
    pub fn absolute_bound_at_two(&self) -> f64 {
        self.aps.primes().iter().map(|&p| 2.0 * (p as f64).ln() * (p as f64).powf(-1.5)).sum()
    }

    /// Largest |value| / shape on sigma = 1 + 1/log x for 0 <= t <= sqrt(x), sampled at step 1/4.
    pub fn perron_epsilon(&self) -> Result<f64> {
        let s0 = self.sigma_min();
        let steps = (4.0 * self.x.sqrt()).floor() as usize;
        let mut eps: f64 = 0.0;
        for i in 0..=steps {
            let t = i as f64 / 4.0;
            eps = eps.max(self.eval(s0, t)?.norm() / self.shape(s0, t));
        }
        Ok(eps)
    }

    /// The envelope constant is fitted on the line sigma = 1 + 1/log x, at t = 0
    /// and at the grid heights, then checked on the whole grid.
    pub fn checks(&self, grid: &[(f64, f64)]) -> Result<Vec<CheckResult>> {
        let s0 = self.sigma_min();
        let mut eps: f64 = 0.0;
        for t in std::iter::once(0.0).chain(grid.iter().map(|g| g.1)) {
            eps = eps.max(self.eval(s0, t)?.norm() / self.shape(s0, t));
        }
        let mut out = Vec::new();
        for &(sigma, t) in grid {
            let v = self.eval(sigma, t)?;
            out.push(
                CheckResult::envelope("logderiv_envelope", v, eps * self.shape(sigma, t))
                    .param("sigma", sigma)
                    .param("t", t)
                    .param("epsilon_e", eps),
            );
            let mirror = self.eval(sigma, -t)?;
            out.push(
                CheckResult::abs_error("logderiv_conjugate", mirror, v.conj(), 1e-12 * v.norm().max(1.0))
                    .param("sigma", sigma)
                    .param("t", t),
            );
        }
        let at_two = self.eval(2.0, 0.0)?;
        let bound = self.absolute_bound_at_two();
        out.push(
            CheckResult::holds("logderiv_absolute", at_two.im == 0.0 && at_two.re.abs() <= bound)
                .param("value", at_two.re)
                .param("bound", bound),
        );
        Ok(out)
    }
}

pub fn logderiv_partial(curve: &CurveModel, sigma: f64, t: f64, x: f64, primes: &PrimeTable) -> Result<Complex64> {
    LogDerivative::new(curve, x, primes)?.eval(sigma, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::sieve_primes;
    use crate::curve::Catalog;

    #[test]
    fn range_and_symmetry() {
        let primes = sieve_primes(10_000).unwrap();
        let catalog = Catalog::builtin();
        let ld = LogDerivative::new(catalog.get("11a").unwrap(), 1e4, &primes).unwrap();
        assert!(ld.eval(1.0, 0.0).is_err());
        assert!(ld.eval(2.5, 0.0).is_err());
        let v = ld.eval(1.5, 3.0).unwrap();
        assert!((ld.eval(1.5, -3.0).unwrap() - v.conj()).norm() < 1e-14);
        let two = ld.eval(2.0, 0.0).unwrap();
        assert!(two.re.abs() <= ld.absolute_bound_at_two());
        assert!(ld.absolute_bound_at_two() < 2.0 * 3.0);
        for c in ld.checks(&[(ld.sigma_min(), 10.0), (1.5, 1.0), (2.0, 50.0)]).unwrap() {
            assert!(c.pass, "{}: {}", c.name, c.ratio_or_error);
        }
    }
}
