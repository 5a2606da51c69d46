//! Weil's explicit formula for a quadratic twist E_D with the triangle kernel:
//!
//!   sum over zeros of Phi_lambda(rho) = log N_{E_D}
//!       - 2 sum_{p^m} c_{p^m}(E_D) (log p / p^m) F(m log p / lambda)
//!       - 2 log 2pi - 2 int_0^inf (F(t/lambda)/(e^t - 1) - 1/(t e^t)) dt.

use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::arith::{kronecker, PrimeTable};
use crate::curve::{ApTable, CurveModel, TwistedCurve};
use crate::error::{Error, Result};
use crate::kernel::{triangle, TriangleKernel};
use crate::numeric::CompensatedSum;

/// The prime-power sum split by exponent: m = 1, m = 2 and m >= 3.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PrimeSide {
    pub m1: f64,
    pub m2: f64,
    pub tail: f64,
}

impl PrimeSide {
    pub fn total(&self) -> f64 {
        self.m1 + self.m2 + self.tail
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplicitFormulaReport {
    #[serde(rename = "D")]
    pub d: i64,
    pub lambda: f64,
    pub log_conductor: f64,
    pub conductor_exact: bool,
    pub prime_m1: f64,
    pub prime_m2: f64,
    pub prime_tail: f64,
    /// 2 * (archimedean integral) + 2 log 2pi.
    pub archimedean: f64,
    #[serde(rename = "total_S")]
    pub total_s: f64,
    pub rank_bound: f64,
    /// w(E_D), or 0 where it is not defined for this D.
    pub root_number: i8,
    /// f(x, D) - R(x, D) with x = e^lambda.
    pub twisted_estimate: f64,
}

pub const CSV_COLUMNS: [&str; 11] = [
    "D",
    "lambda",
    "log_conductor",
    "conductor_exact",
    "prime_m1",
    "prime_m2",
    "prime_tail",
    "archimedean",
    "total_S",
    "rank_bound",
    "root_number",
];

impl ExplicitFormulaReport {
    fn csv_record(&self) -> [String; 11] {
        [
            self.d.to_string(),
            self.lambda.to_string(),
            self.log_conductor.to_string(),
            self.conductor_exact.to_string(),
            self.prime_m1.to_string(),
            self.prime_m2.to_string(),
            self.prime_tail.to_string(),
            self.archimedean.to_string(),
            self.total_s.to_string(),
            self.rank_bound.to_string(),
            self.root_number.to_string(),
        ]
    }

    /// Recompute total_S from the stored components.
    pub fn reconstructed_total(&self) -> f64 {
        assemble_total(self.log_conductor, self.prime_m1, self.prime_m2, self.prime_tail, self.archimedean)
    }
}

fn assemble_total(log_conductor: f64, m1: f64, m2: f64, tail: f64, archimedean: f64) -> f64 {
    log_conductor - 2.0 * (m1 + m2 + tail) - archimedean
}

pub fn write_reports_csv<W: Write>(out: W, reports: &[ExplicitFormulaReport]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for r in reports {
        w.write_record(r.csv_record())?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_reports_json<W: Write>(mut out: W, reports: &[ExplicitFormulaReport]) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, reports)?;
    writeln!(out)?;
    Ok(())
}

/// S / lambda: under GRH an upper bound for the analytic rank.
pub fn rank_bound(report: &ExplicitFormulaReport) -> f64 {
    report.total_s / report.lambda
}

/// 2 log 2pi + 2 * (archimedean integral).
pub fn archimedean_term(kernel: &TriangleKernel) -> f64 {
    2.0 * (2.0 * PI).ln() + 2.0 * kernel.archimedean_integral()
}

/// Everything about a base curve and a kernel that does not depend on D.
#[derive(Debug, Clone)]
pub struct ExplicitFormula {
    curve: CurveModel,
    kernel: TriangleKernel,
    aps: ApTable,
    archimedean: f64,
}

impl ExplicitFormula {
    pub fn new(curve: &CurveModel, kernel: TriangleKernel, primes: &PrimeTable) -> Result<Self> {
        let cutoff = kernel.lambda().exp();
        primes.ensure_covers(required_limit(cutoff))?;
        let aps = ApTable::new(curve, primes.below(cutoff))?;
        Ok(ExplicitFormula { curve: curve.clone(), kernel, aps, archimedean: archimedean_term(&kernel) })
    }

    pub fn curve(&self) -> &CurveModel {
        &self.curve
    }

    pub fn kernel(&self) -> &TriangleKernel {
        &self.kernel
    }

    pub fn aps(&self) -> &ApTable {
        &self.aps
    }

    pub fn prime_side(&self, twist: &TwistedCurve) -> PrimeSide {
        let lambda = self.kernel.lambda();
        let mut m1 = CompensatedSum::new();
        let mut m2 = CompensatedSum::new();
        let mut tail = CompensatedSum::new();
        for (&p, &base_ap) in self.aps.primes().iter().zip(self.aps.values()) {
            let ld = twist.local_with_base(p, base_ap);
            let logp = (p as f64).ln();
            let pf = p as f64;
            let (mut prev, mut cur) = (2i64, ld.ap);
            let mut pm = pf;
            let mut m = 1u32;
            loop {
                let f = triangle(m as f64 * logp / lambda);
                if f == 0.0 {
                    break;
                }
                let term = cur as f64 * logp / pm * f;
                match m {
                    1 => m1.add(term),
                    2 => m2.add(term),
                    _ => tail.add(term),
                }
                let next = if ld.good { ld.ap * cur - p as i64 * prev } else { ld.ap * cur };
                prev = cur;
                cur = next;
                pm *= pf;
                m += 1;
            }
        }
        PrimeSide { m1: m1.value(), m2: m2.value(), tail: tail.value() }
    }

    /// 2 sum_{p < x} a_p(E) (D/p) (log p / p) F(log p / log x) with x = e^lambda.
    pub fn r_sum(&self, d: i64) -> f64 {
        let log_x = self.kernel.lambda();
        let mut s = CompensatedSum::new();
        for (&p, &ap) in self.aps.primes().iter().zip(self.aps.values()) {
            s.add(beta_from_ap(ap, p, log_x) * kronecker(d, p as i64) as f64);
        }
        2.0 * s.value()
    }

    pub fn report(&self, d: i64) -> Result<ExplicitFormulaReport> {
        let twist = self.curve.twist(d)?;
        let side = self.prime_side(&twist);
        let lambda = self.kernel.lambda();
        let log_conductor = twist.conductor.log;
        let total_s = assemble_total(log_conductor, side.m1, side.m2, side.tail, self.archimedean);
        Ok(ExplicitFormulaReport {
            d,
            lambda,
            log_conductor,
            conductor_exact: twist.conductor.exact,
            prime_m1: side.m1,
            prime_m2: side.m2,
            prime_tail: side.tail,
            archimedean: self.archimedean,
            total_s,
            rank_bound: total_s / lambda,
            root_number: twist.root_number().unwrap_or(0),
            twisted_estimate: f_term(lambda.exp(), d)? - self.r_sum(d),
        })
    }
}

/// Largest integer that must be in the table to cover every prime below `bound`.
fn required_limit(bound: f64) -> u64 {
    if bound <= 2.0 {
        1
    } else {
        (bound.ceil() as u64 - 1).max(2)
    }
}

pub fn prime_side(twist: &TwistedCurve, kernel: &TriangleKernel, primes: &PrimeTable) -> Result<PrimeSide> {
    Ok(ExplicitFormula::new(&twist.base, *kernel, primes)?.prime_side(twist))
}

pub fn ef_total(twist: &TwistedCurve, kernel: &TriangleKernel, primes: &PrimeTable) -> Result<ExplicitFormulaReport> {
    ExplicitFormula::new(&twist.base, *kernel, primes)?.report(twist.d)
}

/// The m >= 3 part of the prime-power sum alone; it only involves p < e^{lambda/3}.
pub fn prime_power_tail(twist: &TwistedCurve, kernel: &TriangleKernel) -> Result<f64> {
    let lambda = kernel.lambda();
    let bound = (lambda / 3.0).exp();
    let primes = crate::arith::sieve_primes(required_limit(bound).max(2))?;
    let mut tail = CompensatedSum::new();
    for &p in primes.below(bound) {
        let logp = (p as f64).ln();
        for m in 3.. {
            let f = triangle(m as f64 * logp / lambda);
            if f == 0.0 {
                break;
            }
            tail.add(twist.cpm(p, m)? as f64 * logp / (p as f64).powi(m as i32) * f);
        }
    }
    Ok(tail.value())
}

fn beta_from_ap(ap: i64, p: u64, log_x: f64) -> f64 {
    let logp = (p as f64).ln();
    ap as f64 * logp / p as f64 * triangle(logp / log_x)
}

/// beta_p = a_p(E) (log p / p) F(log p / log x).
pub fn beta_p(curve: &CurveModel, p: u64, x: f64) -> Result<f64> {
    if x <= 1.0 {
        return Err(Error::Domain(format!("beta_p needs x > 1, got {x}")));
    }
    if p as f64 >= x {
        return Ok(0.0);
    }
    Ok(beta_from_ap(curve.ap(p)?, p, x.ln()))
}

/// R(x, D) = 2 sum_{p < x} beta_p (D/p).
pub fn r_sum(curve: &CurveModel, d: i64, x: f64, primes: &PrimeTable) -> Result<f64> {
    if x <= 2.0 {
        return Ok(0.0);
    }
    primes.ensure_covers(required_limit(x))?;
    let mut s = CompensatedSum::new();
    for &p in primes.below(x) {
        s.add(beta_p(curve, p, x)? * kronecker(d, p as i64) as f64);
    }
    Ok(2.0 * s.value())
}

/// f(x, D) = 2 log|D| + (log x)/2.
pub fn f_term(x: f64, d: i64) -> Result<f64> {
    f_term_real(x, d as f64)
}

pub fn f_term_real(x: f64, d: f64) -> Result<f64> {
    if d == 0.0 {
        return Err(Error::Domain("f(x, D) needs D != 0".into()));
    }
    if x <= 1.0 {
        return Err(Error::Domain(format!("f(x, D) needs x > 1, got {x}")));
    }
    Ok(2.0 * d.abs().ln() + 0.5 * x.ln())
}
