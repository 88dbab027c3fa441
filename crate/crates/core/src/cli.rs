//! Command-line front end.
//!
//! Exit codes: 0 success, 1 failed check or numerical failure, 2 usage or
//! domain error, 3 I/O error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::activation::{Activation, Method};
use crate::config::NumericsConfig;
use crate::error::{Error, Result};
use crate::plrdt::plrdt_capacity;
use crate::rdt::{quad_capacity_closed_form, rdt_capacity, CapacityBound};
use crate::reference::{embedded, Width};
use crate::selfcheck::{self, SelfCheck};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

/// Fixed column order of CSV output.
pub const CSV_HEADER: &str =
    "activation,d,method,bound,std_error,c3_opt,gamma_opt,ez,mc_samples,seed,runtime_s";

/// Monte Carlo budget used by `--quick`.
pub const QUICK_SAMPLES: u64 = 100_000;

#[derive(Debug, Parser)]
#[command(name = "tcmcap", version, about = "Capacity upper bounds for treelike committee machines")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute one bound.
    Bound(BoundArgs),
    /// Compute bounds over a range of widths.
    Sweep(SweepArgs),
    /// Recompute the published table and compare cell by cell.
    Table1(Table1Args),
    /// Run the property suites.
    Selfcheck(SelfcheckArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct NumericArgs {
    /// Monte Carlo sample count [default: 10^7, 10^5 with --quick].
    #[arg(long)]
    mc_samples: Option<u64>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Largest |phi_bar| accepted at a partially lifted root.
    #[arg(long)]
    tol: Option<f64>,
    /// Reduced Monte Carlo budget.
    #[arg(long)]
    quick: bool,
    /// Print numbers at full precision instead of 6 significant digits.
    #[arg(long)]
    full_precision: bool,
    /// Fill the runtime_s column (output then varies between runs).
    #[arg(long)]
    timing: bool,
}

impl NumericArgs {
    fn config(&self) -> Result<NumericsConfig> {
        let default = NumericsConfig::default();
        let cfg = NumericsConfig {
            mc_samples: self
                .mc_samples
                .unwrap_or(if self.quick { QUICK_SAMPLES } else { default.mc_samples }),
            seed: self.seed,
            root_tol: self.tol.unwrap_or(default.root_tol),
            ..default
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
struct BoundArgs {
    #[arg(long)]
    activation: Activation,
    #[arg(long)]
    d: usize,
    #[arg(long, default_value = "rdt")]
    method: Method,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    numeric: NumericArgs,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long)]
    activation: Activation,
    #[arg(long)]
    d_min: usize,
    #[arg(long)]
    d_max: usize,
    #[arg(long, default_value_t = 2)]
    d_step: usize,
    /// Comma-separated list of methods.
    #[arg(long, value_delimiter = ',', default_value = "rdt")]
    method: Vec<Method>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    numeric: NumericArgs,
}

#[derive(Debug, Args)]
struct Table1Args {
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    numeric: NumericArgs,
}

#[derive(Debug, Args)]
struct SelfcheckArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Reduced suite (10^5 Monte Carlo samples).
    #[arg(long)]
    quick: bool,
    /// Adds a constant to the ReLU kernel under test.
    #[arg(long, hide = true)]
    inject_kernel_offset: Option<f64>,
}

/// One output row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundRecord {
    pub activation: Activation,
    pub d: usize,
    pub method: Method,
    pub bound: f64,
    pub std_error: f64,
    pub c3_opt: Option<f64>,
    pub gamma_opt: Option<f64>,
    pub ez: Option<f64>,
    pub mc_samples: Option<u64>,
    pub seed: u64,
    pub runtime_s: Option<f64>,
}

impl BoundRecord {
    pub fn new(b: &CapacityBound, seed: u64, runtime_s: Option<f64>) -> Self {
        BoundRecord {
            activation: b.activation,
            d: b.d,
            method: b.method,
            bound: b.alpha,
            std_error: b.error,
            c3_opt: b.diagnostics.as_ref().map(|s| s.c3_opt),
            gamma_opt: b.diagnostics.as_ref().map(|s| s.gamma_opt),
            ez: b.ez.map(|e| e.value),
            mc_samples: b.mc_samples,
            seed,
            runtime_s,
        }
    }

    /// Copy with every real rounded to 6 significant digits.
    pub fn rounded(&self) -> Self {
        let r = |x: Option<f64>| x.map(round_sig6);
        BoundRecord {
            bound: round_sig6(self.bound),
            std_error: round_sig6(self.std_error),
            c3_opt: r(self.c3_opt),
            gamma_opt: r(self.gamma_opt),
            ez: r(self.ez),
            runtime_s: r(self.runtime_s),
            ..self.clone()
        }
    }

    pub fn csv_row(&self) -> String {
        fn opt<T: ToString>(x: Option<T>) -> String {
            x.map(|v| v.to_string()).unwrap_or_default()
        }
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.activation,
            self.d,
            self.method,
            self.bound,
            self.std_error,
            opt(self.c3_opt),
            opt(self.gamma_opt),
            opt(self.ez),
            opt(self.mc_samples),
            self.seed,
            opt(self.runtime_s)
        )
    }
}

/// Rounds to 6 significant digits.
pub fn round_sig6(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.5e}").parse().unwrap_or(x)
}

/// Bound for one `(activation, d, method)`.
pub fn compute(activation: Activation, d: usize, method: Method, cfg: &NumericsConfig) -> Result<CapacityBound> {
    match method {
        Method::Rdt => rdt_capacity(activation, d, cfg),
        Method::Plrdt => plrdt_capacity(activation, d, cfg),
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Domain(_) | Error::Unsupported(_) => EXIT_USAGE,
        Error::Io(_) => EXIT_IO,
        Error::Accuracy { .. } | Error::Bracket { .. } => EXIT_CHECK,
    }
}

fn emit(text: &str, out: &Option<PathBuf>, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::Io(format!("cannot write {}: {e}", path.display()))),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| Error::Io(format!("cannot write to stdout: {e}"))),
    }
}

fn render(records: &[BoundRecord], format: Format, full_precision: bool, single: bool) -> String {
    let recs: Vec<BoundRecord> = if full_precision {
        records.to_vec()
    } else {
        records.iter().map(BoundRecord::rounded).collect()
    };
    match format {
        Format::Csv => {
            let mut s = String::from(CSV_HEADER);
            s.push('\n');
            for r in &recs {
                s.push_str(&r.csv_row());
                s.push('\n');
            }
            s
        }
        Format::Json => {
            let json = if single && recs.len() == 1 {
                serde_json::to_string_pretty(&recs[0])
            } else {
                serde_json::to_string_pretty(&recs)
            };
            json.expect("records serialize") + "\n"
        }
    }
}

fn timed(
    activation: Activation,
    d: usize,
    method: Method,
    cfg: &NumericsConfig,
    timing: bool,
) -> Result<BoundRecord> {
    let start = Instant::now();
    let b = compute(activation, d, method, cfg)?;
    let runtime = timing.then(|| start.elapsed().as_secs_f64());
    Ok(BoundRecord::new(&b, cfg.seed, runtime))
}

fn cmd_bound(a: &BoundArgs, stdout: &mut dyn Write) -> Result<i32> {
    let cfg = a.numeric.config()?;
    let rec = timed(a.activation, a.d, a.method, &cfg, a.numeric.timing)?;
    emit(&render(&[rec], a.format, a.numeric.full_precision, true), &a.out, stdout)?;
    Ok(EXIT_OK)
}

/// Widths `d_min, d_min + step, ..., <= d_max`; empty ranges are an error.
pub fn sweep_widths(d_min: usize, d_max: usize, step: usize) -> Result<Vec<usize>> {
    if step == 0 {
        return Err(Error::Domain("--d-step must be >= 1".into()));
    }
    if d_min == 0 || d_min > d_max {
        return Err(Error::Domain(format!("empty width range {d_min}..={d_max}")));
    }
    Ok((d_min..=d_max).step_by(step).collect())
}

fn cmd_sweep(a: &SweepArgs, stdout: &mut dyn Write) -> Result<i32> {
    let cfg = a.numeric.config()?;
    let ds = sweep_widths(a.d_min, a.d_max, a.d_step)?;
    for &d in &ds {
        a.activation.validate_width(d)?;
    }
    let mut methods = a.method.clone();
    methods.sort();
    methods.dedup();
    let mut records = Vec::new();
    for &m in &methods {
        for &d in &ds {
            records.push(timed(a.activation, d, m, &cfg, a.numeric.timing)?);
        }
    }
    emit(&render(&records, a.format, a.numeric.full_precision, false), &a.out, stdout)?;
    Ok(EXIT_OK)
}

/// Outcome of one published-table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum CellStatus {
    Pass,
    Fail,
    /// Not computable for this width; the reason is given.
    Skip(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub activation: Activation,
    pub d: usize,
    pub method: Method,
    pub reference: f64,
    pub tolerance: f64,
    pub computed: Option<CapacityBound>,
    pub status: CellStatus,
}

/// Recomputes every finite-width cell of the published table.
pub fn table1_cells(cfg: &NumericsConfig) -> Result<Vec<CellResult>> {
    let mut cells = Vec::new();
    for r in embedded().table() {
        let Width::Finite(d) = r.d else { continue };
        let method = match r.method {
            crate::reference::RefMethod::Rdt => Method::Rdt,
            crate::reference::RefMethod::Plrdt => Method::Plrdt,
            _ => continue,
        };
        let mut cell = CellResult {
            activation: r.activation,
            d,
            method,
            reference: r.value,
            tolerance: r.tolerance,
            computed: None,
            status: CellStatus::Fail,
        };
        if let Err(e) = r.activation.validate_width(d) {
            cell.status = CellStatus::Skip(e.to_string());
            cells.push(cell);
            continue;
        }
        let b = compute(r.activation, d, method, cfg)?;
        cell.status = if r.accepts(b.alpha) { CellStatus::Pass } else { CellStatus::Fail };
        cell.computed = Some(b);
        cells.push(cell);
    }
    Ok(cells)
}

fn cmd_table1(a: &Table1Args, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    let cfg = a.numeric.config()?;
    let cells = table1_cells(&cfg)?;
    let fmt = |x: f64| {
        if a.numeric.full_precision {
            x.to_string()
        } else {
            round_sig6(x).to_string()
        }
    };
    let mut s = String::new();
    let _ = writeln!(s, "status  activation  method  d  computed  std_error  reference  tolerance");
    let mut failed = Vec::new();
    for c in &cells {
        let (status, computed, err) = match (&c.status, &c.computed) {
            (CellStatus::Skip(_), _) => ("SKIP", "-".to_string(), "-".to_string()),
            (st, Some(b)) => (
                if *st == CellStatus::Pass { "PASS" } else { "FAIL" },
                fmt(b.alpha),
                fmt(b.error),
            ),
            (_, None) => ("FAIL", "-".into(), "-".into()),
        };
        let _ = writeln!(
            s,
            "{status}  {}  {}  {}  {computed}  {err}  {}  {}",
            c.activation, c.method, c.d, c.reference, c.tolerance
        );
        if c.status == CellStatus::Fail {
            failed.push(format!("{} {} d={}", c.activation, c.method, c.d));
        }
    }
    for c in &cells {
        if let CellStatus::Skip(reason) = &c.status {
            let _ = writeln!(s, "note: {} {} d={} skipped: {reason}", c.activation, c.method, c.d);
        }
    }
    let closed = quad_capacity_closed_form(2)?;
    let _ = writeln!(
        s,
        "note: quad rdt d=2 closed form 2/(1-2/pi) = {}; the published 5.498 is about 0.1% lower",
        fmt(closed)
    );
    emit(&s, &a.out, stdout)?;
    if failed.is_empty() {
        Ok(EXIT_OK)
    } else {
        let _ = writeln!(stderr, "failed cells: {}", failed.join(", "));
        Ok(EXIT_CHECK)
    }
}

fn cmd_selfcheck(a: &SelfcheckArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    let cfg = selfcheck::config(a.quick, a.seed);
    let base = cfg.clone();
    let offset = a.inject_kernel_offset.unwrap_or(0.0);
    let faulty = move |g: &[f64]| -> Result<f64> {
        Ok(crate::kernels::z_relu_general(g, &base)?.z + offset)
    };
    let mut check = SelfCheck::new(cfg, a.quick);
    if a.inject_kernel_offset.is_some() {
        check = check.with_relu_kernel(&faulty);
    }
    let report = check.run();
    let mut s = String::new();
    for r in &report.results {
        let _ = writeln!(s, "{} {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
    }
    stdout
        .write_all(s.as_bytes())
        .map_err(|e| Error::Io(e.to_string()))?;
    if report.passed() {
        Ok(EXIT_OK)
    } else {
        let names: Vec<&str> = report.failures().map(|r| r.name).collect();
        let _ = writeln!(stderr, "failed properties: {}", names.join(", "));
        Ok(EXIT_CHECK)
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Bound(a) => cmd_bound(a, stdout),
        Command::Sweep(a) => cmd_sweep(a, stdout),
        Command::Table1(a) => cmd_table1(a, stdout, stderr),
        Command::Selfcheck(a) => cmd_selfcheck(a, stdout, stderr),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("tcmcap").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn rounding() {
        assert_eq!(round_sig6(4.659792366), 4.65979);
        assert_eq!(round_sig6(0.000123456789), 0.000123457);
        assert_eq!(round_sig6(0.0), 0.0);
    }

    #[test]
    fn widths() {
        assert_eq!(sweep_widths(2, 8, 2).unwrap(), vec![2, 4, 6, 8]);
        assert!(sweep_widths(8, 2, 2).is_err());
        assert!(sweep_widths(2, 8, 0).is_err());
    }

    #[test]
    fn bound_json_and_errors() {
        let (code, out, _) = run_str(&["bound", "--activation", "quad", "--d", "4"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["bound"], 4.65979);
        assert_eq!(v["method"], "rdt");
        assert!(v["c3_opt"].is_null());
        let (code, _, err) = run_str(&["bound", "--activation", "relu", "--d", "3"]);
        assert_eq!(code, 2);
        assert!(err.contains("even"), "{err}");
        assert_eq!(run_str(&["bound", "--activation", "tanh", "--d", "2"]).0, 2);
        assert_eq!(run_str(&["frobnicate"]).0, 2);
        assert_eq!(run_str(&["--help"]).0, 0);
    }

    #[test]
    fn sweep_csv() {
        let (code, out, _) = run_str(&[
            "sweep", "--activation", "quad", "--d-min", "2", "--d-max", "8", "--method", "rdt",
        ]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 5);
        assert!(lines[1].starts_with("quad,2,rdt,5.50388,"));
        assert!(lines[1].ends_with(",,,0.363380,,42,") || lines[1].contains(",42,"));
        assert_eq!(run_str(&["sweep", "--activation", "quad", "--d-min", "8", "--d-max", "2"]).0, 2);
    }
}
