//! Rankin–Selberg type averages of the coefficients c_{p^2} and a_p^2.

use crate::arith::PrimeTable;
use crate::curve::{ApTable, CurveModel};
use crate::error::{Error, Result};
use crate::kernel::triangle;
use crate::numeric::CompensatedSum;

use super::CheckResult;

/// a_p for every prime below a bound, shared by all the sums of one curve.
#[derive(Debug, Clone)]
pub struct RankinTable {
    curve: CurveModel,
    bound: f64,
    aps: ApTable,
}

impl RankinTable {
    pub fn new(curve: &CurveModel, bound: f64, primes: &PrimeTable) -> Result<Self> {
        let need = if bound <= 2.0 { 1 } else { bound.ceil() as u64 - 1 };
        primes.ensure_covers(need)?;
        Ok(RankinTable { curve: curve.clone(), bound, aps: ApTable::new(curve, primes.below(bound))? })
    }

    fn below(&self, x: f64) -> Result<impl Iterator<Item = (u64, i64)> + '_> {
        if x > self.bound * (1.0 + 1e-12) {
            return Err(Error::Domain(format!("table covers p < {}, {x} requested", self.bound)));
        }
        Ok(self.aps.primes().iter().zip(self.aps.values()).take_while(move |(&p, _)| (p as f64) < x).map(|(&p, &a)| (p, a)))
    }

    /// sum_{p < x} c_{p^2} log p / p.
    pub fn linear_sum(&self, x: f64) -> Result<f64> {
        let mut s = CompensatedSum::new();
        for (p, ap) in self.below(x)? {
            let good = !self.curve.conductor.is_multiple_of(p);
            let c = if good { ap * ap - 2 * p as i64 } else { ap * ap };
            s.add(c as f64 * (p as f64).ln() / p as f64);
        }
        Ok(s.value())
    }

    /// sum_p a_p^2 (log p)^2 / p^2 F(log p / lambda)^2.
    pub fn square_sum(&self, lambda: f64) -> Result<f64> {
        if lambda <= 0.0 {
            return Err(Error::Domain(format!("lambda must be positive, got {lambda}")));
        }
        let mut s = CompensatedSum::new();
        for (p, ap) in self.below(lambda.exp())? {
            let lp = (p as f64).ln();
            let f = triangle(lp / lambda);
            s.add((ap * ap) as f64 * lp * lp / (p * p) as f64 * f * f);
        }
        Ok(s.value())
    }

    /// The linear sum is -x + o(x).
    pub fn linear_check(&self, x: f64) -> Result<CheckResult> {
        let s = self.linear_sum(x)?;
        Ok(CheckResult::ratio_band("rankin_linear", s, -x, 0.75, 1.25).param("curve", &self.curve.label).param("x", x))
    }

    /// The F-weighted square sum is lambda^2/12 + o(lambda^2).
    pub fn square_check(&self, lambda: f64) -> Result<CheckResult> {
        let s = self.square_sum(lambda)?;
        Ok(CheckResult::ratio_band("rankin_square", s, lambda * lambda / 12.0, 0.7, 1.3)
            .param("curve", &self.curve.label)
            .param("lambda", lambda))
    }

    /// Doubling lambda roughly quadruples the square sum.
    pub fn doubling_check(&self, lambda: f64) -> Result<CheckResult> {
        let small = self.square_sum(lambda)?;
        let large = self.square_sum(2.0 * lambda)?;
        Ok(CheckResult::soft_band("rankin_doubling", large, small, 2.5, 5.5)
            .param("curve", &self.curve.label)
            .param("lambda", lambda))
    }

    /// Ratios of both sums at each x, then their trend toward 1.
    pub fn trend_checks(&self, xs: &[f64]) -> Result<Vec<CheckResult>> {
        let mut linear = Vec::new();
        let mut square = Vec::new();
        for &x in xs {
            linear.push((x, self.linear_sum(x)? / -x));
            let l = x.ln();
            square.push((x, self.square_sum(l)? / (l * l / 12.0)));
        }
        Ok(vec![
            trend_check("rankin_linear_trend", &linear, 0.1).param("curve", &self.curve.label),
            trend_check("rankin_square_trend", &square, 0.1).param("curve", &self.curve.label),
        ])
    }
}

pub fn rankin_linear_sum(curve: &CurveModel, x: f64, primes: &PrimeTable) -> Result<f64> {
    RankinTable::new(curve, x, primes)?.linear_sum(x)
}

pub fn rankin_square_sum(curve: &CurveModel, lambda: f64, primes: &PrimeTable) -> Result<f64> {
    if lambda <= 0.0 {
        return Err(Error::Domain(format!("lambda must be positive, got {lambda}")));
    }
    RankinTable::new(curve, lambda.exp(), primes)?.square_sum(lambda)
}

pub fn rankin_linear_check(curve: &CurveModel, x: f64, primes: &PrimeTable) -> Result<CheckResult> {
    RankinTable::new(curve, x, primes)?.linear_check(x)
}

pub fn rankin_square_check(curve: &CurveModel, lambda: f64, primes: &PrimeTable) -> Result<CheckResult> {
    RankinTable::new(curve, lambda.exp(), primes)?.square_check(lambda)
}

pub fn rankin_doubling_check(curve: &CurveModel, lambda: f64, primes: &PrimeTable) -> Result<CheckResult> {
    RankinTable::new(curve, (2.0 * lambda).exp(), primes)?.doubling_check(lambda)
}

pub fn rankin_trend_checks(curve: &CurveModel, xs: &[f64], primes: &PrimeTable) -> Result<Vec<CheckResult>> {
    let top = xs.iter().copied().fold(0.0, f64::max);
    RankinTable::new(curve, top, primes)?.trend_checks(xs)
}

/// Distance of successive ratios from 1 may grow by at most `band`.
pub fn trend_check(name: &str, ratios: &[(f64, f64)], band: f64) -> CheckResult {
    let ok = ratios.windows(2).all(|w| (1.0 - w[1].1).abs() <= (1.0 - w[0].1).abs() + band);
    let last = ratios.last().map_or(f64::NAN, |r| r.1);
    let mut c = CheckResult::holds(name, ok).param("ratios", ratios).param("band", band);
    c.computed = last.into();
    c
}
