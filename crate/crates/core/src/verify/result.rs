use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

/// A real or complex value as it appears in a report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Num {
    Real(f64),
    Complex { re: f64, im: f64 },
}

impl From<f64> for Num {
    fn from(v: f64) -> Self {
        Num::Real(v)
    }
}

impl From<Complex64> for Num {
    fn from(z: Complex64) -> Self {
        Num::Complex { re: z.re, im: z.im }
    }
}

impl Num {
    pub fn as_complex(&self) -> Complex64 {
        match *self {
            Num::Real(v) => Complex64::new(v, 0.0),
            Num::Complex { re, im } => Complex64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    /// An envelope exceeded by at most 10x.
    Warn,
    Fail,
}

/// Envelope checks may exceed their fitted bound by this factor before failing.
pub const SOFT_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub computed: Num,
    pub reference: Num,
    pub ratio_or_error: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub status: Status,
    pub params: BTreeMap<String, serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckResult {
    fn build(name: &str, computed: Num, reference: Num, ratio_or_error: f64, tolerance: f64, status: Status) -> Self {
        CheckResult {
            name: name.to_string(),
            computed,
            reference,
            ratio_or_error,
            tolerance,
            pass: status != Status::Fail,
            status,
            params: BTreeMap::new(),
            note: None,
        }
    }

    /// Passes iff |computed - reference| <= tol.
    pub fn abs_error(name: &str, computed: impl Into<Num>, reference: impl Into<Num>, tol: f64) -> Self {
        let (c, r) = (computed.into(), reference.into());
        let err = (c.as_complex() - r.as_complex()).norm();
        let status = if err <= tol { Status::Pass } else { Status::Fail };
        Self::build(name, c, r, err, tol, status)
    }

    /// Passes iff computed / reference lies in [lo, hi]; `tolerance` records hi - 1.
    pub fn ratio_band(name: &str, computed: f64, reference: f64, lo: f64, hi: f64) -> Self {
        let ratio = computed / reference;
        let status = if (lo..=hi).contains(&ratio) { Status::Pass } else { Status::Fail };
        let mut c = Self::build(name, computed.into(), reference.into(), ratio, hi - 1.0, status);
        c.params.insert("band".into(), serde_json::json!([lo, hi]));
        c
    }

    /// Like `ratio_band`, but a ratio off the band by at most 10x only warns.
    pub fn soft_band(name: &str, computed: f64, reference: f64, lo: f64, hi: f64) -> Self {
        let ratio = computed / reference;
        let miss = if ratio > 0.0 { (lo / ratio).max(ratio / hi) } else { f64::INFINITY };
        let status = if miss <= 1.0 {
            Status::Pass
        } else if miss <= SOFT_FACTOR {
            Status::Warn
        } else {
            Status::Fail
        };
        let mut c = Self::build(name, computed.into(), reference.into(), ratio, hi - 1.0, status);
        c.params.insert("band".into(), serde_json::json!([lo, hi]));
        c
    }

    /// |computed| against a fitted envelope: within it passes, within 10x warns, beyond fails.
    pub fn envelope(name: &str, computed: impl Into<Num>, envelope: f64) -> Self {
        let c = computed.into();
        let ratio = c.as_complex().norm() / envelope;
        let status = if ratio <= 1.0 {
            Status::Pass
        } else if ratio <= SOFT_FACTOR {
            Status::Warn
        } else {
            Status::Fail
        };
        Self::build(name, c, envelope.into(), ratio, 1.0, status)
    }

    /// A boolean property; computed and reference are 1 for true.
    pub fn holds(name: &str, ok: bool) -> Self {
        let status = if ok { Status::Pass } else { Status::Fail };
        Self::build(name, Num::Real(ok as u8 as f64), Num::Real(1.0), if ok { 0.0 } else { 1.0 }, 0.0, status)
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        self.params.insert(key.to_string(), serde_json::to_value(value).expect("serializable parameter"));
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}
