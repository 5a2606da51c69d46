use super::model::CurveModel;
use crate::error::{Error, Result};

const BUILTIN: &str = include_str!("../../data/catalog.csv");

#[derive(Debug, Clone, PartialEq)]
pub struct Catalog {
    curves: Vec<CurveModel>,
}

fn parse_small(field: &str) -> std::result::Result<Option<i64>, String> {
    match field {
        "" | "?" => Ok(None),
        s => s.parse().map(Some).map_err(|e| format!("bad integer {s:?}: {e}")),
    }
}

/// Parse one record `label,A,B,N,w,a2,a3`.
pub fn parse_record(fields: &[&str]) -> std::result::Result<CurveModel, String> {
    if fields.len() != 7 {
        return Err(format!("expected 7 fields (label,A,B,N,w,a2,a3), found {}", fields.len()));
    }
    let int = |s: &str| s.parse::<i64>().map_err(|e| format!("bad integer {s:?}: {e}"));
    let a = int(fields[1])?;
    let b = int(fields[2])?;
    let n = fields[3].parse::<u64>().map_err(|e| format!("bad conductor {:?}: {e}", fields[3]))?;
    let w = int(fields[4])?;
    let w = i8::try_from(w).map_err(|_| format!("root number {w} out of range"))?;
    let a2 = parse_small(fields[5])?;
    let a3 = parse_small(fields[6])?;
    CurveModel::new(fields[0], a, b, n, w, a2, a3).map_err(|e| e.to_string())
}

impl Catalog {
    pub fn builtin() -> Self {
        Catalog::parse(BUILTIN).expect("built-in catalog is valid")
    }

    /// Lines are comma separated records; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut curves: Vec<CurveModel> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let curve = parse_record(&fields).map_err(|msg| Error::Catalog { line: i + 1, msg })?;
            if curves.iter().any(|c| c.label == curve.label) {
                return Err(Error::Catalog { line: i + 1, msg: format!("duplicate label {}", curve.label) });
            }
            curves.push(curve);
        }
        if curves.is_empty() {
            return Err(Error::Catalog { line: 0, msg: "catalog has no curves".into() });
        }
        Ok(Catalog { curves })
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Catalog::parse(&text)
    }

    pub fn curves(&self) -> &[CurveModel] {
        &self.curves
    }

    pub fn get(&self, label: &str) -> Option<&CurveModel> {
        self.curves.iter().find(|c| c.label == label)
    }

    /// A catalog label, or an inline `A,B,N,w,a2,a3` specification.
    pub fn resolve(&self, label: &str) -> Result<CurveModel> {
        if let Some(c) = self.get(label) {
            return Ok(c.clone());
        }
        if label.contains(',') {
            let mut fields = vec!["custom"];
            fields.extend(label.split(',').map(str::trim));
            return parse_record(&fields).map_err(Error::Config);
        }
        let known: Vec<&str> = self.curves.iter().map(|c| c.label.as_str()).collect();
        Err(Error::Config(format!("unknown curve {label:?}; known labels: {}", known.join(", "))))
    }
}
