//! Argument parsing and command execution for the `scaffold` binary.
//!
//! Commands produce their whole output as a string so that the binary and
//! the tests see exactly the same bytes.

pub mod render;

use std::ops::RangeInclusive;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use scaffold_core::insep::{
    build_realization, default_t_range, dp_act, psi_prod_check, realize_associated_order_check,
    realize_freeness_check, verify_scaffold,
};
use scaffold_core::padic::Radix;
use scaffold_core::special::{weak_extremes, weak_report, WeakReport};
use scaffold_core::{analyze, Error, ScaffoldParams, StructureReport, VerificationReport};
use serde::{Deserialize, Serialize};

use render::Format;

/// Environment variable overriding the term-count cap of exact arithmetic.
pub const TERM_LIMIT_ENV: &str = "SCAFFOLD_TERM_LIMIT";

/// Default bound on `p^n` for sweeps.
pub const DEFAULT_MAX_PN: u64 = 256;

#[derive(Debug, Parser)]
#[command(
    name = "scaffold",
    version,
    about = "Module structure of ideals from scaffold data"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Structure report for one ideal.
    Analyze(AnalyzeArgs),
    /// Preset tables.
    Table(TableArgs),
    /// Build the divided-power realization and check it against the engine.
    Verify(VerifyArgs),
    /// Reports for many shift parameters and ideal exponents.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub n: u32,
    /// Shift parameters b_1,..,b_n.
    #[arg(
        long,
        value_delimiter = ',',
        allow_negative_numbers = true,
        required = true
    )]
    pub b: Vec<i64>,
    /// Ideal exponent; write negative values as `--h=-2`.
    #[arg(long, allow_negative_numbers = true)]
    pub h: i64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    Biquadratic,
    Weak,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[arg(long, value_enum)]
    pub preset: Preset,
    #[arg(long)]
    pub p: Option<u64>,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub b: i64,
    #[arg(long, allow_negative_numbers = true)]
    pub h: i64,
    /// Range `lo:hi` (inclusive) of t for the scaffold equalities;
    /// defaults to `[h - p^n, h + 2 p^n]`.
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    pub t_range: Option<(i64, i64)>,
    /// Print every λ_t and Ψ_i·λ_t in the range.
    #[arg(long)]
    pub trace: bool,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub n: u32,
    /// Residues of the (uniform) shift parameter.
    #[arg(
        long,
        value_delimiter = ',',
        allow_negative_numbers = true,
        conflicts_with = "all_b"
    )]
    pub b_mod: Vec<i64>,
    /// Every b in [1, p^n) prime to p.
    #[arg(long)]
    pub all_b: bool,
    /// Every h in [0, p^n).
    #[arg(long, conflicts_with = "h")]
    pub h_all: bool,
    #[arg(long, allow_negative_numbers = true)]
    pub h: Option<i64>,
    /// Worker threads; output does not depend on it.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long, default_value_t = DEFAULT_MAX_PN)]
    pub max_pn: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("expected lo:hi, got {s:?}"))?;
    let lo: i64 = lo
        .trim()
        .parse()
        .map_err(|e| format!("bad lower bound: {e}"))?;
    let hi: i64 = hi
        .trim()
        .parse()
        .map_err(|e| format!("bad upper bound: {e}"))?;
    if lo > hi {
        return Err(format!("empty range {lo}:{hi}"));
    }
    Ok((lo, hi))
}

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or flag combinations.
    Usage(String),
    Core(Error),
    /// The realization disagreed with the engine, or a check failed.
    Verification(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Core(e) => e.kind(),
            CliError::Verification(_) => "verification",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(e) if e.is_validation() => 2,
            CliError::Core(_) | CliError::Verification(_) => 1,
        }
    }

    pub fn message(&self) -> String {
        match self {
            CliError::Usage(m) | CliError::Verification(m) => m.clone(),
            CliError::Core(e) => e.to_string(),
        }
    }

    /// `{"error":{"kind":..,"message":..}}`.
    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": { "kind": self.kind(), "message": self.message() } })
            .to_string()
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

/// What a command printed, and the error to report after printing it.
#[derive(Debug)]
pub struct Outcome {
    pub stdout: String,
    pub error: Option<CliError>,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            stdout,
            error: None,
        }
    }
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Analyze(a) => cmd_analyze(a),
        Command::Table(a) => cmd_table(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Sweep(a) => cmd_sweep(a),
    }
}

fn cmd_analyze(a: &AnalyzeArgs) -> Result<Outcome, CliError> {
    let params = ScaffoldParams::new(a.p, a.n, a.b.clone())?;
    let report = analyze(a.h, &params)?;
    Ok(Outcome::ok(match a.format {
        Format::Json => render::json(&report),
        f => render::rows(&[report], f),
    }))
}

/// The eight biquadratic rows, `b ∈ {1, 3}` with `b - 3 <= h <= b`, in
/// decreasing `h`.
pub fn biquadratic_rows() -> scaffold_core::Result<Vec<StructureReport>> {
    let mut rows = Vec::new();
    for b in [1i64, 3] {
        let params = ScaffoldParams::uniform(2, 2, b)?;
        for h in (b - 3..=b).rev() {
            rows.push(analyze(h, &params)?);
        }
    }
    Ok(rows)
}

/// One weak-case row per `h` in `[0, p^n)`, checked against the engine
/// and the known extremes.
pub fn weak_rows(p: u64, n: u32) -> Result<Vec<WeakReport>, CliError> {
    let params = ScaffoldParams::uniform(p, n, 1)?;
    let q = params.modulus() as i64;
    let mut rows = Vec::new();
    for h in 0..q {
        let weak = weak_report(p, n, h)?;
        let full = analyze(h, &params)?;
        if (weak.free, weak.min_generators, weak.embedding_dimension)
            != (full.free, full.min_generators, full.embedding_dimension)
        {
            return Err(CliError::Verification(format!(
                "weak formula and engine disagree at p={p}, n={n}, h={h}"
            )));
        }
        rows.push(weak);
    }
    weak_extremes(p, n)?;
    Ok(rows)
}

fn cmd_table(a: &TableArgs) -> Result<Outcome, CliError> {
    match a.preset {
        Preset::Biquadratic => {
            if a.p.is_some_and(|p| p != 2) || a.n.is_some_and(|n| n != 2) {
                return Err(CliError::Usage(
                    "the biquadratic preset has p = 2, n = 2".into(),
                ));
            }
            let rows = biquadratic_rows()?;
            Ok(Outcome::ok(match a.format {
                Format::Table => {
                    let cells: Vec<Vec<String>> = rows
                        .iter()
                        .map(|r| {
                            vec![
                                r.b[0].to_string(),
                                r.h.to_string(),
                                render::vec_notation(&r.d),
                                render::vec_notation(&r.w),
                                render::set_notation(&r.dd),
                                render::set_notation(&r.ee),
                            ]
                        })
                        .collect();
                    render::table(&["b", "h", "d", "w", "dd", "ee"], &cells)
                }
                f => render::rows(&rows, f),
            }))
        }
        Preset::Weak => {
            let (Some(p), Some(n)) = (a.p, a.n) else {
                return Err(CliError::Usage("the weak preset needs --p and --n".into()));
            };
            Ok(Outcome::ok(render::rows(&weak_rows(p, n)?, a.format)))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Section {
    pub name: String,
    pub report: VerificationReport,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifySummary {
    pub p: u64,
    pub n: u32,
    pub b: i64,
    pub h: i64,
    pub t_range: (i64, i64),
    pub free: bool,
    pub sections: Vec<Section>,
    pub passed: bool,
}

/// Runs the scaffold equalities and the three engine-vs-realization checks.
pub fn verify(
    p: u64,
    n: u32,
    b: i64,
    h: i64,
    t_range: Option<RangeInclusive<i64>>,
) -> scaffold_core::Result<VerifySummary> {
    let real = build_realization(p, n, b)?;
    let range = t_range.unwrap_or_else(|| default_t_range(&real, h));
    let report = analyze(h, real.engine_params())?;
    let sections = vec![
        Section {
            name: "scaffold".into(),
            report: verify_scaffold(&real, range.clone())?,
        },
        Section {
            name: "associated_order".into(),
            report: realize_associated_order_check(&real, h, &report)?,
        },
        Section {
            name: "freeness".into(),
            report: realize_freeness_check(&real, h, &report)?,
        },
        Section {
            name: "psi_prod".into(),
            report: psi_prod_check(&real, h, &report)?,
        },
    ];
    let passed = sections.iter().all(|s| s.report.passed());
    Ok(VerifySummary {
        p,
        n,
        b,
        h,
        t_range: (*range.start(), *range.end()),
        free: report.free,
        sections,
        passed,
    })
}

fn trace(p: u64, n: u32, b: i64, range: RangeInclusive<i64>) -> scaffold_core::Result<String> {
    let real = build_realization(p, n, b)?;
    let mut out = String::new();
    for t in range {
        let lt = real.lambda(t);
        out.push_str(&format!("λ_{t} = {lt}\n"));
        for i in 1..=n {
            out.push_str(&format!("  Ψ_{i}·λ_{t} = {}\n", dp_act(real.psi(i), &lt)?));
        }
    }
    Ok(out)
}

fn cmd_verify(a: &VerifyArgs) -> Result<Outcome, CliError> {
    let range = a.t_range.map(|(lo, hi)| lo..=hi);
    let summary = verify(a.p, a.n, a.b, a.h, range)?;
    let mut out = String::new();
    match a.format {
        Format::Json => out.push_str(&render::json(&summary)),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["section", "checks_run", "failures", "passed"])
                .expect("in-memory write");
            for s in &summary.sections {
                w.write_record([
                    s.name.clone(),
                    s.report.checks_run.to_string(),
                    s.report.failures.len().to_string(),
                    s.report.passed().to_string(),
                ])
                .expect("in-memory write");
            }
            out.push_str(&String::from_utf8(w.into_inner().expect("flush")).expect("utf-8"));
        }
        Format::Table => {
            if a.trace {
                let (lo, hi) = summary.t_range;
                out.push_str(&trace(a.p, a.n, a.b, lo..=hi)?);
            }
            let cells: Vec<Vec<String>> = summary
                .sections
                .iter()
                .map(|s| {
                    vec![
                        s.name.clone(),
                        s.report.checks_run.to_string(),
                        s.report.failures.len().to_string(),
                        if s.report.passed() { "pass" } else { "FAIL" }.to_string(),
                    ]
                })
                .collect();
            out.push_str(&render::table(
                &["section", "checks", "failures", "result"],
                &cells,
            ));
            for s in &summary.sections {
                for f in &s.report.failures {
                    out.push_str(&format!(
                        "{}: {} i={:?} s={:?} t={:?} expected {} got {}\n",
                        s.name, f.kind, f.i, f.s, f.t, f.expected, f.got
                    ));
                }
            }
            let (lo, hi) = summary.t_range;
            out.push_str(&format!(
                "p={} n={} b={} h={} t={lo}:{hi}: {}, {} confirmed\n",
                a.p,
                a.n,
                a.b,
                a.h,
                if summary.passed {
                    "all checks pass"
                } else {
                    "checks FAILED"
                },
                if summary.free { "free" } else { "non-free" },
            ));
        }
    }
    let error = (!summary.passed).then(|| {
        let failed: Vec<&str> = summary
            .sections
            .iter()
            .filter(|s| !s.report.passed())
            .map(|s| s.name.as_str())
            .collect();
        CliError::Verification(format!("failed sections: {}", failed.join(", ")))
    });
    Ok(Outcome { stdout: out, error })
}

/// `(b, h)` cells of a sweep, ordered by `b` then `h`.
pub fn sweep_cells(a: &SweepArgs) -> Result<Vec<(i64, i64)>, CliError> {
    let radix = Radix::new(a.p, a.n)?;
    let q = radix.modulus();
    if q > a.max_pn {
        return Err(Error::TooLarge(format!("p^n = {q} exceeds --max-pn {}", a.max_pn)).into());
    }
    let q = q as i64;
    let mut bs: Vec<i64> = if a.all_b {
        (1..q).filter(|b| b % a.p as i64 != 0).collect()
    } else if !a.b_mod.is_empty() {
        a.b_mod.iter().map(|b| b.rem_euclid(q)).collect()
    } else {
        return Err(CliError::Usage("give --b-mod or --all-b".into()));
    };
    bs.sort_unstable();
    bs.dedup();
    let hs: Vec<i64> = match (a.h_all, a.h) {
        (true, _) => (0..q).collect(),
        (false, Some(h)) => vec![h],
        (false, None) => return Err(CliError::Usage("give --h-all or --h".into())),
    };
    Ok(bs
        .iter()
        .flat_map(|&b| hs.iter().map(move |&h| (b, h)))
        .collect())
}

fn cmd_sweep(a: &SweepArgs) -> Result<Outcome, CliError> {
    if a.jobs == 0 {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    let cells = sweep_cells(a)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.jobs)
        .build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    let (p, n) = (a.p, a.n);
    // Indexed collect keeps the cell order regardless of scheduling.
    let rows: Vec<StructureReport> = pool.install(|| {
        cells
            .par_iter()
            .map(|&(b, h)| analyze(h, &ScaffoldParams::uniform(p, n, b)?))
            .collect::<scaffold_core::Result<Vec<_>>>()
    })?;
    Ok(Outcome::ok(render::rows(&rows, a.format)))
}
