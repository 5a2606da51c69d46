//! Weighted moments of the explicit-formula functional over a quadratic twist family.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{gcd, is_squarefree, PrimeTable};
use crate::curve::CurveModel;
use crate::error::{Error, Result};
use crate::explicit_formula::{ExplicitFormula, ExplicitFormulaReport};
use crate::kernel::{SmoothWeight, TriangleKernel};
use crate::numeric::CompensatedSum;

/// Heath-Brown's first-moment constant.
pub const HEATH_BROWN_BOUND: f64 = 1.5;
/// Goldfeld's average rank bound.
pub const GOLDFELD_BOUND: f64 = 3.25;
pub const RANK_DENSITY_BASE: f64 = 1.44467;
pub const LOWZERO_DENSITY_BASE: f64 = 1.402408;
/// (sin(1/2) / (1/2))^2.
pub const SINC_THRESHOLD: f64 = 0.9193953884;

/// Largest family a sweep will enumerate.
pub const MAX_FAMILY: u64 = 100_000_000;

/// X_k = x^{k/2} (log x)^{2k+2}.
pub fn x_k(x: f64, k: u32) -> f64 {
    x.powf(k as f64 / 2.0) * x.ln().powi(2 * k as i32 + 2)
}

/// (1/2) [(k + 1/2 + 1/sqrt 3)^k + (k + 1/2 - 1/sqrt 3)^k].
pub fn theoretical_moment_bound(k: u32) -> f64 {
    let c = 1.0 / 3f64.sqrt();
    let k_f = k as f64;
    0.5 * ((k_f + 0.5 + c).powi(k as i32) + (k_f + 0.5 - c).powi(k as i32))
}

/// (1/2) / 1.44467^R.
pub fn rank_density_bound(r: f64) -> f64 {
    0.5 * RANK_DENSITY_BASE.powf(-r)
}

/// 1 / 1.402408^k.
pub fn lowzero_density_bound(k: u32) -> Result<f64> {
    if k == 0 {
        return Err(Error::Domain("low-zero density bound needs k >= 1".into()));
    }
    Ok(LOWZERO_DENSITY_BASE.powi(-(k as i32)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SignFilter {
    #[default]
    Any,
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
pub struct Filters {
    pub squarefree: bool,
    pub coprime: bool,
    pub sign: SignFilter,
}

impl Filters {
    pub fn label(&self) -> String {
        let mut parts = Vec::new();
        if self.squarefree {
            parts.push("squarefree");
        }
        if self.coprime {
            parts.push("coprime");
        }
        match self.sign {
            SignFilter::Any => {}
            SignFilter::Plus => parts.push("plus"),
            SignFilter::Minus => parts.push("minus"),
        }
        if parts.is_empty() {
            "none".into()
        } else {
            parts.join("+")
        }
    }

    /// The arithmetic filters only; the sign filter needs the root number.
    fn admits(&self, d: i64, conductor: u64) -> bool {
        (!self.squarefree || is_squarefree(d.unsigned_abs()))
            && (!self.coprime || gcd(d.unsigned_abs(), 2 * conductor) == 1)
    }

    fn admits_sign(&self, w: i8) -> bool {
        match self.sign {
            SignFilter::Any => true,
            SignFilter::Plus => w == 1,
            SignFilter::Minus => w == -1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentConfig {
    pub curve: CurveModel,
    pub k: u32,
    pub x: f64,
    /// Family scale; the weight is evaluated at D / T.
    pub t: f64,
    pub weight: SmoothWeight,
    pub filters: Filters,
}

impl MomentConfig {
    /// A config with T = X_k(x, k) and the default weight.
    pub fn new(curve: CurveModel, k: u32, x: f64) -> Self {
        MomentConfig { curve, k, x, t: x_k(x, k), weight: SmoothWeight::default(), filters: Filters::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        if !self.x.is_finite() || self.x <= std::f64::consts::E {
            return Err(Error::Config(format!("x must exceed e, got {}", self.x)));
        }
        if !self.t.is_finite() || self.t < 1.0 {
            return Err(Error::Config(format!("T must be at least 1, got {}", self.t)));
        }
        if self.filters.sign != SignFilter::Any && !(self.filters.squarefree && self.filters.coprime) {
            return Err(Error::Config("a sign filter requires both the squarefree and coprime filters".into()));
        }
        Ok(())
    }

    pub fn lambda(&self) -> f64 {
        self.x.ln()
    }

    /// Candidate D in the open support of W(D / T), before filtering.
    pub fn d_range(&self) -> Result<(i64, i64)> {
        let size = ((self.weight.hi - self.weight.lo) * self.t).max(0.0);
        if size > MAX_FAMILY as f64 {
            return Err(Error::Cost(format!(
                "family of {size:.0} candidate twists exceeds the cap of {MAX_FAMILY}; lower T or x"
            )));
        }
        let lo = (self.weight.lo * self.t).floor() as i64 + 1;
        let hi = (self.weight.hi * self.t).ceil() as i64 - 1;
        Ok((lo, hi))
    }
}

/// One member of a swept family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyMember {
    pub weight: f64,
    pub report: ExplicitFormulaReport,
}

/// Every twist of a config's family with its report, in increasing D.
#[derive(Debug, Clone)]
pub struct Family {
    pub config: MomentConfig,
    pub members: Vec<FamilyMember>,
}

pub fn evaluate_family(config: &MomentConfig, primes: &PrimeTable) -> Result<Family> {
    config.validate()?;
    let (lo, hi) = config.d_range()?;
    let kernel = TriangleKernel::new(config.lambda())?;
    let ef = ExplicitFormula::new(&config.curve, kernel, primes)?;
    let n = config.curve.conductor;
    let candidates: Vec<i64> = (lo..=hi)
        .filter(|&d| d != 0 && config.filters.admits(d, n) && config.weight.eval(d as f64 / config.t) > 0.0)
        .collect();
    let members: Vec<Option<FamilyMember>> = candidates
        .par_iter()
        .map(|&d| {
            let report = ef.report(d)?;
            if !config.filters.admits_sign(report.root_number) {
                return Ok(None);
            }
            Ok(Some(FamilyMember { weight: config.weight.eval(d as f64 / config.t), report }))
        })
        .collect::<Result<_>>()?;
    let members: Vec<FamilyMember> = members.into_iter().flatten().collect();
    if members.is_empty() {
        return Err(Error::EmptyFamily);
    }
    Ok(Family { config: config.clone(), members })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentRow {
    pub k: u32,
    pub x: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub filter_flags: String,
    pub weighted_count: f64,
    pub family_size: usize,
    pub empirical_moment: f64,
    pub theoretical_bound: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentTable {
    pub rows: Vec<MomentRow>,
}

impl Family {
    pub fn weighted_count(&self) -> f64 {
        self.members.iter().map(|m| m.weight).collect::<CompensatedSum>().value()
    }

    /// sum (S/lambda)^k W(D/T) / sum W(D/T).
    pub fn moment(&self, k: u32) -> f64 {
        let num: CompensatedSum = self.members.iter().map(|m| m.report.rank_bound.powi(k as i32) * m.weight).collect();
        num.value() / self.weighted_count()
    }

    /// Rows for k = 1 ..= config.k.
    pub fn moment_table(&self) -> MomentTable {
        let c = &self.config;
        let rows = (1..=c.k)
            .map(|k| {
                let empirical = self.moment(k);
                let bound = theoretical_moment_bound(k);
                MomentRow {
                    k,
                    x: c.x,
                    t: c.t,
                    filter_flags: c.filters.label(),
                    weighted_count: self.weighted_count(),
                    family_size: self.members.len(),
                    empirical_moment: empirical,
                    theoretical_bound: bound,
                    ratio: empirical / bound,
                }
            })
            .collect();
        MomentTable { rows }
    }

    /// Weighted share of the family whose rank bound is at least R; every twist counts for R <= 0.
    pub fn rank_tail(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 1.0;
        }
        let hit: CompensatedSum = self.members.iter().filter(|m| m.report.rank_bound >= r).map(|m| m.weight).collect();
        hit.value() / self.weighted_count()
    }

    pub fn sign_partition(&self) -> Result<SignPartition> {
        let f = &self.config.filters;
        if !(f.squarefree && f.coprime) {
            return Err(Error::Config("sign partition requires the squarefree and coprime filters".into()));
        }
        let part = |w: i8| -> SignClass {
            let mut weight = CompensatedSum::new();
            let mut acc = CompensatedSum::new();
            let mut count = 0;
            for m in self.members.iter().filter(|m| m.report.root_number == w) {
                weight.add(m.weight);
                acc.add(m.weight * m.report.rank_bound);
                count += 1;
            }
            let average = if count > 0 { acc.value() / weight.value() } else { f64::NAN };
            SignClass { count, weighted_count: weight.value(), average_rank_bound: average }
        };
        let plus = part(1);
        let minus = part(-1);
        let undefined = self.members.iter().filter(|m| m.report.root_number == 0).count();
        Ok(SignPartition {
            rank0_fraction_lower: rank0_fraction_lower(plus.average_rank_bound),
            rank1_fraction_lower: rank1_fraction_lower(minus.average_rank_bound),
            plus,
            minus,
            undefined,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignClass {
    pub count: usize,
    pub weighted_count: f64,
    pub average_rank_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignPartition {
    pub plus: SignClass,
    pub minus: SignClass,
    /// Twists whose root number is not defined by the twisting rule.
    pub undefined: usize,
    pub rank0_fraction_lower: f64,
    pub rank1_fraction_lower: f64,
}

/// Even twists have rank 0 or at least 2, so an average bound A gives
/// A >= 2 (1 - share of rank 0), i.e. share >= 1 - A/2.
pub fn rank0_fraction_lower(average: f64) -> f64 {
    (1.0 - average / 2.0).clamp(0.0, 1.0)
}

/// Odd twists have rank 1 or at least 3: A >= s + 3 (1 - s) gives s >= (3 - A)/2.
pub fn rank1_fraction_lower(average: f64) -> f64 {
    ((3.0 - average) / 2.0).clamp(0.0, 1.0)
}

pub const MOMENT_COLUMNS: [&str; 9] = [
    "k",
    "x",
    "T",
    "filter_flags",
    "weighted_count",
    "family_size",
    "empirical_moment",
    "theoretical_bound",
    "ratio",
];

impl MomentTable {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(MOMENT_COLUMNS)?;
        for r in &self.rows {
            w.write_record([
                r.k.to_string(),
                r.x.to_string(),
                r.t.to_string(),
                r.filter_flags.clone(),
                r.weighted_count.to_string(),
                r.family_size.to_string(),
                r.empirical_moment.to_string(),
                r.theoretical_bound.to_string(),
                r.ratio.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut out, &self.rows)?;
        writeln!(out)?;
        Ok(())
    }
}

pub fn weighted_moment(config: &MomentConfig, primes: &PrimeTable) -> Result<MomentTable> {
    Ok(evaluate_family(config, primes)?.moment_table())
}

pub fn sign_partition_stats(config: &MomentConfig, primes: &PrimeTable) -> Result<SignPartition> {
    evaluate_family(config, primes)?.sign_partition()
}

pub fn empirical_rank_tail(config: &MomentConfig, r: f64, primes: &PrimeTable) -> Result<f64> {
    Ok(evaluate_family(config, primes)?.rank_tail(r))
}

/// Reference constants echoed beside a sweep.
#[derive(Debug, Clone, Serialize)]
pub struct Constants {
    pub heath_brown_bound: f64,
    pub goldfeld_bound: f64,
    pub theoretical_moment_bound: Vec<(u32, f64)>,
    pub rank_density_base: f64,
    pub rank_density_bound: Vec<(f64, f64)>,
    pub lowzero_density_base: f64,
    pub lowzero_density_bound: Vec<(u32, f64)>,
    pub sinc_threshold: f64,
}

impl Constants {
    pub fn for_k(k: u32) -> Self {
        Constants {
            heath_brown_bound: HEATH_BROWN_BOUND,
            goldfeld_bound: GOLDFELD_BOUND,
            theoretical_moment_bound: (1..=k).map(|j| (j, theoretical_moment_bound(j))).collect(),
            rank_density_base: RANK_DENSITY_BASE,
            rank_density_bound: [1.0, 2.0, 3.0].iter().map(|&r| (r, rank_density_bound(r))).collect(),
            lowzero_density_base: LOWZERO_DENSITY_BASE,
            lowzero_density_bound: (1..=k).map(|j| (j, lowzero_density_bound(j).expect("k >= 1"))).collect(),
            sinc_threshold: SINC_THRESHOLD,
        }
    }
}
