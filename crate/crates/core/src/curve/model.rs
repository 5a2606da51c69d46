use serde::Serialize;

use super::local::{local_data, LocalData};
use crate::arith::{factorize, kronecker};
use crate::error::{Error, Result};

/// y^2 = x^3 + A x + B over Q, with the conductor, root number and the traces
/// at 2 and 3 supplied as metadata.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CurveModel {
    pub label: String,
    pub a: i64,
    pub b: i64,
    pub conductor: u64,
    pub root_number: i8,
    pub a2: Option<i64>,
    pub a3: Option<i64>,
}

impl CurveModel {
    pub fn new(
        label: impl Into<String>,
        a: i64,
        b: i64,
        conductor: u64,
        root_number: i8,
        a2: Option<i64>,
        a3: Option<i64>,
    ) -> Result<Self> {
        let label = label.into();
        let disc = 4 * (a as i128).pow(3) + 27 * (b as i128).pow(2);
        if disc == 0 {
            return Err(Error::Domain(format!("{label}: singular model (4A^3 + 27B^2 = 0)")));
        }
        if conductor == 0 {
            return Err(Error::Domain(format!("{label}: conductor must be positive")));
        }
        if root_number != 1 && root_number != -1 {
            return Err(Error::Domain(format!("{label}: root number must be +1 or -1")));
        }
        for (p, ap) in [(2i64, a2), (3, a3)] {
            if let Some(v) = ap {
                if v * v > 4 * p {
                    return Err(Error::Domain(format!("{label}: a_{p} = {v} violates the Hasse bound")));
                }
            }
        }
        Ok(CurveModel { label, a, b, conductor, root_number, a2, a3 })
    }

    pub fn discriminant(&self) -> i128 {
        -16 * (4 * (self.a as i128).pow(3) + 27 * (self.b as i128).pow(2))
    }

    fn small_prime(&self, p: u64) -> Result<i64> {
        let v = if p == 2 { self.a2 } else { self.a3 };
        v.ok_or_else(|| Error::MissingBadPrimeData { label: self.label.clone(), p })
    }

    /// Trace and reduction type at a prime p.
    pub fn local(&self, p: u64) -> Result<LocalData> {
        if p <= 3 {
            Ok(LocalData { ap: self.small_prime(p)?, good: !self.conductor.is_multiple_of(p) })
        } else {
            Ok(local_data(self.a, self.b, 1, p))
        }
    }

    pub fn ap(&self, p: u64) -> Result<i64> {
        Ok(self.local(p)?.ap)
    }

    /// Coefficient c_{p^m} of the logarithmic derivative of L(E, s).
    pub fn cpm(&self, p: u64, m: u32) -> Result<i64> {
        Ok(self.local(p)?.coefficient(p, m))
    }

    pub fn twist(&self, d: i64) -> Result<TwistedCurve> {
        TwistedCurve::new(self.clone(), d)
    }
}

/// Conductor of a twist. When `exact` is false the value is an upper bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwistConductor {
    pub value: u128,
    pub log: f64,
    pub exact: bool,
}

/// The quadratic twist E_D : y^2 = x^3 + A D^2 x + B D^3.
#[derive(Debug, Clone, PartialEq)]
pub struct TwistedCurve {
    pub base: CurveModel,
    pub d: i64,
    /// Associated discriminant of D: D if D = 1 mod 4, else 4D.
    pub d_assoc: i64,
    pub conductor: TwistConductor,
}

impl TwistedCurve {
    pub fn new(base: CurveModel, d: i64) -> Result<Self> {
        if d == 0 {
            return Err(Error::Domain("twist parameter D must be nonzero".into()));
        }
        let d_assoc = crate::arith::associated_discriminant(d);
        let conductor = twist_conductor(&base, d, d_assoc);
        Ok(TwistedCurve { base, d, d_assoc, conductor })
    }

    pub fn chi(&self, n: i64) -> i32 {
        kronecker(self.d_assoc, n)
    }

    /// Local data of E_D at p, given the base trace a_p(E).
    pub fn local_with_base(&self, p: u64, base_ap: i64) -> LocalData {
        let chi = self.chi(p as i64) as i64;
        let base_good = !self.base.conductor.is_multiple_of(p);
        if p <= 3 || base_good {
            LocalData { ap: base_ap * chi, good: base_good && chi != 0 }
        } else {
            local_data(self.base.a, self.base.b, self.d, p)
        }
    }

    pub fn local(&self, p: u64) -> Result<LocalData> {
        let base_ap = if p > 3 && self.base.conductor.is_multiple_of(p) { 0 } else { self.base.ap(p)? };
        Ok(self.local_with_base(p, base_ap))
    }

    pub fn ap(&self, p: u64) -> Result<i64> {
        Ok(self.local(p)?.ap)
    }

    pub fn cpm(&self, p: u64, m: u32) -> Result<i64> {
        Ok(self.local(p)?.coefficient(p, m))
    }

    /// Root number w(E) * chi_D(-N_E), defined for squarefree D prime to 2 N_E
    /// whose character does not vanish at -N_E.
    pub fn root_number(&self) -> Result<i8> {
        let n = self.base.conductor;
        let d = self.d;
        if !crate::arith::is_squarefree(d.unsigned_abs()) {
            return Err(Error::Domain(format!("root number: D = {d} is not squarefree")));
        }
        if crate::arith::gcd(d.unsigned_abs(), 2 * n) != 1 {
            return Err(Error::Domain(format!("root number: D = {d} shares a factor with 2N = {}", 2 * n)));
        }
        let k = kronecker(self.d_assoc, -(n as i64));
        if k == 0 {
            return Err(Error::Domain(format!(
                "root number: character of D = {d} is ramified at a prime dividing N = {n}"
            )));
        }
        Ok(self.base.root_number * k as i8)
    }
}

fn twist_conductor(base: &CurveModel, d: i64, d_assoc: i64) -> TwistConductor {
    let n = base.conductor;
    let dq = d_assoc.unsigned_abs();
    let squarefree = crate::arith::is_squarefree(d.unsigned_abs());
    let mut primes: Vec<(u64, u32, u32)> = Vec::new();
    let fn_ = factorize(n);
    let fd = factorize(dq);
    for &(p, e) in &fn_ {
        let ed = fd.iter().find(|&&(q, _)| q == p).map_or(0, |&(_, e)| e);
        primes.push((p, e, ed));
    }
    for &(p, e) in &fd {
        if !n.is_multiple_of(p) {
            primes.push((p, 0, e));
        }
    }
    primes.sort_unstable();
    let mut exact = true;
    let mut value: u128 = 1;
    let mut log = 0.0;
    for (p, en, ed) in primes {
        let f = if ed == 0 {
            en
        } else if en == 0 && squarefree {
            2 * ed
        } else {
            exact = false;
            match p {
                2 => 8,
                3 => 5,
                _ => 2,
            }
        };
        value = value
            .checked_mul((p as u128).pow(f))
            .expect("twist conductor overflows u128");
        log += f as f64 * (p as f64).ln();
    }
    TwistConductor { value, log, exact }
}

/// Traces a_p(E) for every prime of a table, computed in parallel.
#[derive(Debug, Clone)]
pub struct ApTable {
    primes: Vec<u64>,
    ap: Vec<i64>,
}

impl ApTable {
    pub fn new(curve: &CurveModel, primes: &[u64]) -> Result<Self> {
        use rayon::prelude::*;
        let ap = primes
            .par_iter()
            .map(|&p| curve.ap(p))
            .collect::<Result<Vec<_>>>()?;
        Ok(ApTable { primes: primes.to_vec(), ap })
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn values(&self) -> &[i64] {
        &self.ap
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn get(&self, p: u64) -> Option<i64> {
        self.primes.binary_search(&p).ok().map(|i| self.ap[i])
    }
}
