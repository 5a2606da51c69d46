//! Command-line front end: `ap-table`, `ef-report`, `sweep` and `verify`.
//!
//! Every flag can also come from a `key=value` file passed with `--config`;
//! flags given on the command line win.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{sieve_primes, PrimeTable};
use crate::curve::{Catalog, CurveModel};
use crate::error::{Error, Result};
use crate::explicit_formula::{write_reports_csv, write_reports_json, ExplicitFormula, ExplicitFormulaReport};
use crate::family::{evaluate_family, Constants, Filters, MomentConfig, SignFilter, SignPartition};
use crate::kernel::{SmoothWeight, TriangleKernel, WeightShape};
use crate::verify::{run_suite, Status, SuiteConfig, GROUPS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

/// Largest prime-table limit a run may request.
pub const MAX_SIEVE_LIMIT: u64 = 100_000_000;

pub const DEFAULT_X: f64 = 1e4;
pub const DEFAULT_LIMIT: u64 = 100;
pub const DEFAULT_DMIN: i64 = -100;
pub const DEFAULT_DMAX: i64 = 100;

#[derive(Debug, Parser)]
#[command(name = "twistrank", version, about = "Explicit-formula rank bounds for quadratic twists of elliptic curves")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Table of p, a_p and c_{p^2} for p <= limit.
    ApTable(Options),
    /// One explicit-formula report per twist D in [dmin, dmax].
    EfReport(Options),
    /// Weighted moments over a twist family, plus a sidecar of reference constants.
    Sweep(Options),
    /// Run the numerical verification suite.
    Verify(Options),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WeightArg {
    Exp,
    Poly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SignArg {
    Any,
    Plus,
    Minus,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Options {
    /// Catalog label or inline A,B,N,w,a2,a3.
    #[arg(long)]
    pub curve: Option<String>,
    /// Curve catalog CSV replacing the built-in one.
    #[arg(long)]
    pub catalog: Option<PathBuf>,
    /// Key=value file supplying any of these options.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Kernel cutoff; lambda = log x.
    #[arg(long)]
    pub x: Option<f64>,
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    pub dmin: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    pub dmax: Option<i64>,
    /// Family scale; defaults to X_k.
    #[arg(long = "T")]
    pub t: Option<f64>,
    #[arg(long, value_enum)]
    pub weight: Option<WeightArg>,
    /// Weight support as LO:HI.
    #[arg(long, allow_hyphen_values = true)]
    pub support: Option<String>,
    #[arg(long)]
    pub squarefree: bool,
    #[arg(long)]
    pub coprime: bool,
    #[arg(long, value_enum)]
    pub sign: Option<SignArg>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Verification groups to run (repeat or comma-separate).
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<String>,
    /// Largest prime in an a_p table.
    #[arg(long)]
    pub limit: Option<u64>,
}

const CONFIG_KEYS: [&str; 19] = [
    "curve", "catalog", "x", "k", "dmin", "dmax", "T", "weight", "support", "squarefree", "coprime", "sign",
    "format", "out", "threads", "seed", "only", "limit", "config",
];

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| Error::Config(format!("invalid value {value:?} for key {key:?}")))
}

fn parse_enum<T: ValueEnum>(key: &str, value: &str) -> Result<T> {
    T::from_str(value, true).map_err(|_| Error::Config(format!("invalid value {value:?} for key {key:?}")))
}

impl Options {
    /// Fill every option not given on the command line from a key=value text.
    pub fn merge_config(&mut self, text: &str) -> Result<()> {
        let mut seen = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key=value, got {line:?}", i + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            if !CONFIG_KEYS.contains(&key) || key == "config" {
                return Err(Error::Config(format!("line {}: unknown key {key:?}", i + 1)));
            }
            if seen.insert(key.to_string(), i + 1).is_some() {
                return Err(Error::Config(format!("line {}: duplicate key {key:?}", i + 1)));
            }
            self.set(key, value)?;
        }
        Ok(())
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn fill<T>(slot: &mut Option<T>, v: T) {
            if slot.is_none() {
                *slot = Some(v);
            }
        }
        match key {
            "curve" => fill(&mut self.curve, value.to_string()),
            "catalog" => fill(&mut self.catalog, PathBuf::from(value)),
            "x" => fill(&mut self.x, parse_value(key, value)?),
            "k" => fill(&mut self.k, parse_value(key, value)?),
            "dmin" => fill(&mut self.dmin, parse_value(key, value)?),
            "dmax" => fill(&mut self.dmax, parse_value(key, value)?),
            "T" => fill(&mut self.t, parse_value(key, value)?),
            "weight" => fill(&mut self.weight, parse_enum(key, value)?),
            "support" => fill(&mut self.support, value.to_string()),
            "squarefree" => self.squarefree |= parse_value::<bool>(key, value)?,
            "coprime" => self.coprime |= parse_value::<bool>(key, value)?,
            "sign" => fill(&mut self.sign, parse_enum(key, value)?),
            "format" => fill(&mut self.format, parse_enum(key, value)?),
            "out" => fill(&mut self.out, PathBuf::from(value)),
            "threads" => fill(&mut self.threads, parse_value(key, value)?),
            "seed" => fill(&mut self.seed, parse_value(key, value)?),
            "only" => {
                if self.only.is_empty() {
                    self.only = value.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
                }
            }
            "limit" => fill(&mut self.limit, parse_value(key, value)?),
            _ => unreachable!("keys are checked against CONFIG_KEYS"),
        }
        Ok(())
    }

    fn catalog(&self) -> Result<Catalog> {
        match &self.catalog {
            Some(p) => Catalog::load(p),
            None => Ok(Catalog::builtin()),
        }
    }

    fn curve(&self) -> Result<CurveModel> {
        let label = self.curve.as_deref().ok_or_else(|| Error::Config("missing key \"curve\"".into()))?;
        self.catalog()?.resolve(label)
    }

    fn x(&self) -> Result<f64> {
        let x = self.x.unwrap_or(DEFAULT_X);
        if !x.is_finite() || x <= std::f64::consts::E {
            return Err(Error::Config(format!("key \"x\" must exceed e, got {x}")));
        }
        Ok(x)
    }

    fn weight(&self) -> Result<SmoothWeight> {
        let shape = match self.weight.unwrap_or(WeightArg::Exp) {
            WeightArg::Exp => WeightShape::ExpBump,
            WeightArg::Poly => WeightShape::PolyBump,
        };
        let (lo, hi) = match &self.support {
            None => (0.5, 1.0),
            Some(s) => {
                let bad = || Error::Config(format!("key \"support\" must look like LO:HI, got {s:?}"));
                let (a, b) = s.split_once(':').ok_or_else(bad)?;
                (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?)
            }
        };
        SmoothWeight::new(shape, lo, hi).map_err(|e| Error::Config(format!("key \"support\": {e}")))
    }

    fn filters(&self) -> Filters {
        let sign = match self.sign.unwrap_or(SignArg::Any) {
            SignArg::Any => SignFilter::Any,
            SignArg::Plus => SignFilter::Plus,
            SignArg::Minus => SignFilter::Minus,
        };
        Filters { squarefree: self.squarefree, coprime: self.coprime, sign }
    }

    fn format(&self) -> Format {
        self.format.unwrap_or(Format::Csv)
    }
}

/// A prime table covering every p < x, refused past the cap.
fn primes_for(x: f64) -> Result<PrimeTable> {
    let need = x.ceil().max(2.0);
    if need > MAX_SIEVE_LIMIT as f64 {
        return Err(Error::Cost(format!(
            "a prime table up to {need:.0} is required, above the cap of {MAX_SIEVE_LIMIT}"
        )));
    }
    sieve_primes(need as u64)
}

fn write_output(path: Option<&Path>, stdout: &mut dyn Write, body: &[u8]) -> Result<()> {
    match path {
        Some(p) => {
            let mut f = BufWriter::new(File::create(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?);
            f.write_all(body)?;
            f.flush()?;
        }
        None => stdout.write_all(body)?,
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApRow {
    pub p: u64,
    pub a_p: i64,
    pub c_p2: i64,
}

pub fn ap_rows(curve: &CurveModel, limit: u64) -> Result<Vec<ApRow>> {
    if limit < 2 {
        return Ok(Vec::new());
    }
    if limit > MAX_SIEVE_LIMIT {
        return Err(Error::Cost(format!("limit {limit} is above the cap of {MAX_SIEVE_LIMIT}")));
    }
    let primes = sieve_primes(limit)?;
    primes
        .primes()
        .par_iter()
        .map(|&p| {
            let local = curve.local(p)?;
            Ok(ApRow { p, a_p: local.ap, c_p2: local.coefficient(p, 2) })
        })
        .collect()
}

pub fn write_ap_csv<W: Write>(out: W, rows: &[ApRow]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(["p", "a_p", "c_p2"])?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn cmd_ap_table(opts: &Options, stdout: &mut dyn Write) -> Result<()> {
    let curve = opts.curve()?;
    let rows = ap_rows(&curve, opts.limit.unwrap_or(DEFAULT_LIMIT))?;
    let mut body = Vec::new();
    match opts.format() {
        Format::Csv => write_ap_csv(&mut body, &rows)?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut body, &rows)?;
            body.push(b'\n');
        }
    }
    write_output(opts.out.as_deref(), stdout, &body)
}

pub fn ef_reports(opts: &Options) -> Result<Vec<ExplicitFormulaReport>> {
    let curve = opts.curve()?;
    let x = opts.x()?;
    let (lo, hi) = (opts.dmin.unwrap_or(DEFAULT_DMIN), opts.dmax.unwrap_or(DEFAULT_DMAX));
    if lo > hi {
        return Err(Error::Config(format!("key \"dmin\" ({lo}) exceeds key \"dmax\" ({hi})")));
    }
    let filters = opts.filters();
    if filters.sign != SignFilter::Any && !(filters.squarefree && filters.coprime) {
        return Err(Error::Config("key \"sign\" requires both squarefree and coprime".into()));
    }
    let primes = primes_for(x)?;
    let ef = ExplicitFormula::new(&curve, TriangleKernel::new(x.ln())?, &primes)?;
    let ds: Vec<i64> = (lo..=hi)
        .filter(|&d| {
            let n = d.unsigned_abs();
            d != 0
                && (!filters.squarefree || crate::arith::is_squarefree(n))
                && (!filters.coprime || crate::arith::gcd(n, 2 * curve.conductor) == 1)
        })
        .collect();
    let reports: Vec<ExplicitFormulaReport> = ds.par_iter().map(|&d| ef.report(d)).collect::<Result<_>>()?;
    Ok(reports
        .into_iter()
        .filter(|r| match filters.sign {
            SignFilter::Any => true,
            SignFilter::Plus => r.root_number == 1,
            SignFilter::Minus => r.root_number == -1,
        })
        .collect())
}

pub fn cmd_ef_report(opts: &Options, stdout: &mut dyn Write) -> Result<()> {
    let reports = ef_reports(opts)?;
    let mut body = Vec::new();
    match opts.format() {
        Format::Csv => write_reports_csv(&mut body, &reports)?,
        Format::Json => write_reports_json(&mut body, &reports)?,
    }
    write_output(opts.out.as_deref(), stdout, &body)
}

/// Rank thresholds reported in the sweep sidecar.
pub const TAIL_THRESHOLDS: [f64; 3] = [1.0, 2.0, 3.0];

#[derive(Debug, Clone, Serialize)]
pub struct Sidecar {
    pub curve: String,
    pub k: u32,
    pub x: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub filter_flags: String,
    pub constants: Constants,
    pub sign_partition: Option<SignPartition>,
    /// (R, weighted share with rank bound >= R, density bound at R).
    pub rank_tail: Vec<(f64, f64, f64)>,
}

pub fn moment_config(opts: &Options) -> Result<MomentConfig> {
    let mut c = MomentConfig::new(opts.curve()?, opts.k.unwrap_or(1), opts.x()?);
    if let Some(t) = opts.t {
        c.t = t;
    }
    c.weight = opts.weight()?;
    c.filters = opts.filters();
    c.validate()?;
    Ok(c)
}

/// The sidecar sits next to the table: `moments.csv` gets `moments.sidecar.json`.
pub fn sidecar_path(out: &Path) -> PathBuf {
    out.with_extension("sidecar.json")
}

pub fn cmd_sweep(opts: &Options, stdout: &mut dyn Write) -> Result<()> {
    let config = moment_config(opts)?;
    let primes = primes_for(config.x)?;
    let family = evaluate_family(&config, &primes)?;
    let table = family.moment_table();
    let sign_partition = if config.filters.squarefree && config.filters.coprime {
        Some(family.sign_partition()?)
    } else {
        None
    };
    let sidecar = Sidecar {
        curve: config.curve.label.clone(),
        k: config.k,
        x: config.x,
        t: config.t,
        filter_flags: config.filters.label(),
        constants: Constants::for_k(config.k),
        sign_partition,
        rank_tail: TAIL_THRESHOLDS
            .iter()
            .map(|&r| (r, family.rank_tail(r), crate::family::rank_density_bound(r)))
            .collect(),
    };
    let mut body = Vec::new();
    match opts.format() {
        Format::Csv => table.write_csv(&mut body)?,
        Format::Json => table.write_json(&mut body)?,
    }
    let mut side = serde_json::to_vec_pretty(&sidecar)?;
    side.push(b'\n');
    write_output(opts.out.as_deref(), stdout, &body)?;
    if let Some(out) = &opts.out {
        write_output(Some(&sidecar_path(out)), stdout, &side)?;
    }
    Ok(())
}

/// Returns true when no check failed hard.
pub fn cmd_verify(opts: &Options, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<bool> {
    let curves = match &opts.curve {
        Some(_) => vec![opts.curve()?],
        None => opts.catalog()?.curves().to_vec(),
    };
    let mut suite = SuiteConfig::new(curves);
    suite.seed = opts.seed.unwrap_or(0);
    suite.weight = opts.weight()?;
    suite.only = opts.only.clone();
    let reports = run_suite(&suite)?;

    let mut body = Vec::new();
    for g in &reports {
        for r in &g.results {
            let mut v = serde_json::to_value(r)?;
            v["group"] = serde_json::Value::from(g.group.clone());
            serde_json::to_writer(&mut body, &v)?;
            body.push(b'\n');
        }
    }
    write_output(opts.out.as_deref(), stdout, &body)?;

    let mut ok = true;
    writeln!(stderr, "{:<10} {:>6} {:>6} {:>6} {:>9}", "group", "pass", "warn", "fail", "seconds")?;
    for g in &reports {
        let (p, w, f) = g.counts();
        ok &= f == 0;
        writeln!(stderr, "{:<10} {:>6} {:>6} {:>6} {:>9.2}", g.group, p, w, f, g.seconds)?;
    }
    for g in &reports {
        for r in g.results.iter().filter(|r| r.status == Status::Fail) {
            writeln!(stderr, "FAIL {}: {} (ratio_or_error {:e}, tolerance {:e})", g.group, r.name, r.ratio_or_error, r.tolerance)?;
        }
    }
    Ok(ok)
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_)
        | Error::Catalog { .. }
        | Error::Domain(_)
        | Error::EmptyDomain(_)
        | Error::MissingBadPrimeData { .. }
        | Error::InsufficientPrimes { .. }
        | Error::EmptyFamily
        | Error::Cost(_)
        | Error::Truncation { .. }
        | Error::Io(_) => EXIT_DATA,
    }
}

/// Parse `args` (program name first), run, and return the process exit code.
pub fn run<I, S>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { write!(stdout, "{text}") } else { write!(stderr, "{text}") };
            return code;
        }
    };
    let (name, mut opts) = match cli.command {
        Command::ApTable(o) => ("ap-table", o),
        Command::EfReport(o) => ("ef-report", o),
        Command::Sweep(o) => ("sweep", o),
        Command::Verify(o) => ("verify", o),
    };
    if let Some(path) = opts.config.clone() {
        let loaded = std::fs::read_to_string(&path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
            .and_then(|text| opts.merge_config(&text));
        if let Err(e) = loaded {
            let _ = writeln!(stderr, "twistrank {name}: {}: {e}", path.display());
            return EXIT_DATA;
        }
    }
    if let Some(bad) = opts.only.iter().find(|g| !GROUPS.contains(&g.as_str())) {
        let _ = writeln!(stderr, "twistrank {name}: unknown check group {bad:?}; known groups: {}", GROUPS.join(", "));
        return EXIT_USAGE;
    }
    if opts.threads == Some(0) {
        let _ = writeln!(stderr, "twistrank {name}: --threads must be at least 1");
        return EXIT_USAGE;
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = opts.threads {
        builder = builder.num_threads(n);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(stderr, "twistrank {name}: cannot start worker pool: {e}");
            return EXIT_DATA;
        }
    };
    let (mut out_buf, mut err_buf) = (Vec::new(), Vec::new());
    let outcome = pool.install(|| match name {
        "ap-table" => cmd_ap_table(&opts, &mut out_buf).map(|_| true),
        "ef-report" => cmd_ef_report(&opts, &mut out_buf).map(|_| true),
        "sweep" => cmd_sweep(&opts, &mut out_buf).map(|_| true),
        _ => cmd_verify(&opts, &mut out_buf, &mut err_buf),
    });
    let _ = stdout.write_all(&out_buf).and_then(|_| stdout.flush());
    let _ = stderr.write_all(&err_buf);
    match outcome {
        Ok(true) => EXIT_OK,
        Ok(false) => {
            let _ = writeln!(stderr, "twistrank {name}: verification failed");
            EXIT_VERIFY
        }
        Err(e) => {
            let _ = writeln!(stderr, "twistrank {name}: {e}");
            exit_code(&e)
        }
    }
}
