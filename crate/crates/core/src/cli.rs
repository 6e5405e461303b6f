//! Command-line front end: `analyze`, `generate`, `suite` and `search`.
//!
//! [`run`] parses arguments, writes the report to `out` and diagnostics to
//! `err`, and returns the process exit code: 0 on success, 1 when a
//! verification fails, 2 on usage or parse errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;

use crate::decomp::{
    check_sum_bound, coefficients_for, is_nonredundant, pair_report, predict_cases, Decomposition,
    PairReport, TrichotomyCase,
};
use crate::error::Error;
use crate::exact::Rat;
use crate::families::{generate, random_kruskal_set, Witness};
use crate::forms::Form;
use crate::numsearch::{matching_distance, search, NumDecomp, ResidualModel, SearchConfig, SearchReport};
use crate::points::{cb_check, h_vector, kruskal_rank, normalize_orbit, PointSet};
use crate::suite::{run_suite, SuiteConfig, SuiteSummary, Theorem};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "waringlab", version, about = "Exact and numerical tools for Waring decompositions of cubics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Report conciseness, catalecticant data and decomposition structure.
    Analyze(AnalyzeArgs),
    /// Write a certified witness for one of the families.
    Generate(GenerateArgs),
    /// Run a randomized verification suite.
    Suite(SuiteArgs),
    /// Numerical search for complex decompositions of a cubic.
    Search(SearchArgs),
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    /// Form or witness JSON file.
    file: PathBuf,
    /// Point set or decomposition JSON file.
    #[arg(long)]
    points: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long)]
    family: String,
    #[arg(long)]
    n: usize,
    #[arg(long, env = "WARINGLAB_SEED", default_value_t = 0)]
    seed: u64,
    /// Kruskal rank for the kruskal-set family.
    #[arg(long)]
    rank: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct SuiteArgs {
    #[arg(long)]
    theorem: Theorem,
    /// Dimension or inclusive range `lo..hi`.
    #[arg(long, value_parser = parse_range)]
    n: (usize, usize),
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, env = "WARINGLAB_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct SearchArgs {
    /// Form or witness JSON file.
    file: PathBuf,
    #[arg(long, value_parser = parse_rank)]
    rank: usize,
    #[arg(long, default_value_t = 50)]
    restarts: usize,
    #[arg(long, default_value_t = crate::numsearch::DEFAULT_TOL)]
    tol: f64,
    #[arg(long, env = "WARINGLAB_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

fn parse_rank(s: &str) -> std::result::Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("rank must be at least 1".into()),
        Ok(r) => Ok(r),
        Err(e) => Err(e.to_string()),
    }
}

fn parse_range(s: &str) -> std::result::Result<(usize, usize), String> {
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
    match s.split_once("..") {
        Some((lo, hi)) => Ok((parse(lo)?, parse(hi.trim_start_matches('='))?)),
        None => parse(s).map(|n| (n, n)),
    }
}

/// Failure carrying its exit code.
#[derive(Debug)]
struct Exit {
    code: i32,
    message: String,
}

impl Exit {
    fn usage(message: impl Into<String>) -> Self {
        Exit {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn verify(message: impl Into<String>) -> Self {
        Exit {
            code: EXIT_VERIFY,
            message: message.into(),
        }
    }
}

impl From<Error> for Exit {
    fn from(e: Error) -> Self {
        match e {
            Error::ResampleExhausted { .. } | Error::NotADecomposition => Exit::verify(e.to_string()),
            _ => Exit::usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Exit {
    fn from(e: std::io::Error) -> Self {
        Exit::usage(e.to_string())
    }
}

type CmdResult = std::result::Result<i32, Exit>;

pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Analyze(a) => cmd_analyze(&a, out),
        Command::Generate(a) => cmd_generate(&a, out),
        Command::Suite(a) => cmd_suite(&a, out),
        Command::Search(a) => cmd_search(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message);
            e.code
        }
    }
}

fn read_json(path: &Path) -> std::result::Result<Value, Exit> {
    let text = std::fs::read_to_string(path).map_err(|e| Exit::usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Exit::usage(format!("{}: {e}", path.display())))
}

fn decode<T: serde::de::DeserializeOwned>(path: &Path, v: Value) -> std::result::Result<T, Exit> {
    serde_json::from_value(v).map_err(|e| Exit::usage(format!("{}: {e}", path.display())))
}

/// A form file or a witness file.
enum Instance {
    Form(Form),
    Witness(Witness),
}

impl Instance {
    fn form(&self) -> &Form {
        match self {
            Instance::Form(f) => f,
            Instance::Witness(w) => &w.form,
        }
    }
}

fn read_instance(path: &Path) -> std::result::Result<Instance, Exit> {
    let v = read_json(path)?;
    if v.get("decomps").is_some() {
        Ok(Instance::Witness(decode(path, v)?))
    } else if v.get("terms").is_some() {
        Ok(Instance::Form(decode(path, v)?))
    } else {
        Err(Exit::usage(format!(
            "{}: expected a form (\"terms\") or a witness (\"decomps\")",
            path.display()
        )))
    }
}

/// A point set file, or a decomposition file whose points are used.
fn read_points(path: &Path) -> std::result::Result<PointSet, Exit> {
    let v = read_json(path)?;
    if v.get("coeffs").is_some() {
        Ok(decode::<Decomposition>(path, v)?.points)
    } else {
        decode(path, v)
    }
}

fn emit_json<T: Serialize>(out: &mut dyn Write, value: &T) -> std::result::Result<(), Exit> {
    let s = serde_json::to_string_pretty(value).expect("report serializes");
    writeln!(out, "{s}")?;
    Ok(())
}

fn write_file(path: &Path, text: &str) -> std::result::Result<(), Exit> {
    std::fs::write(path, format!("{text}\n")).map_err(|e| Exit::usage(format!("{}: {e}", path.display())))
}

#[derive(Serialize, Debug)]
pub struct FormReport {
    pub n: usize,
    pub d: u32,
    pub concise: bool,
    pub catalecticant_rank: usize,
    pub concise_support_dim: usize,
}

#[derive(Serialize, Debug)]
pub struct PointsReport {
    pub len: usize,
    pub coefficients: Option<Vec<Rat>>,
    pub nonredundant: Option<bool>,
    pub kruskal_rank: usize,
    pub h_vector: Vec<usize>,
    pub cb3: bool,
    pub predicted_cases: Option<Vec<TrichotomyCase>>,
}

#[derive(Serialize, Debug)]
pub struct PairSummary {
    pub report: PairReport,
    pub union_h_vector: Vec<usize>,
    pub sum_bound_slack: Option<i64>,
}

#[derive(Serialize, Debug)]
pub struct AnalyzeReport {
    pub form: FormReport,
    pub family: Option<String>,
    pub certified: Option<bool>,
    pub decompositions: Vec<PointsReport>,
    pub pair: Option<PairSummary>,
}

pub fn form_report(f: &Form) -> crate::Result<FormReport> {
    Ok(FormReport {
        n: f.n(),
        d: f.degree(),
        concise: f.is_concise()?,
        catalecticant_rank: f.catalecticant_rank()?,
        concise_support_dim: f.concise_support()?.0.len(),
    })
}

pub fn points_report(f: &Form, a: &PointSet) -> crate::Result<PointsReport> {
    let coefficients = coefficients_for(f, a)?;
    let nonredundant = match is_nonredundant(f, a) {
        Ok(b) => Some(b),
        Err(Error::NotADecomposition) => None,
        Err(e) => return Err(e),
    };
    let predicted_cases = if a.len() == a.n() + 2 && a.n() >= 3 && f.is_concise()? {
        predict_cases(a).ok().map(|s| s.into_iter().collect())
    } else {
        None
    };
    Ok(PointsReport {
        len: a.len(),
        coefficients,
        nonredundant,
        kruskal_rank: kruskal_rank(a),
        h_vector: h_vector(a).values,
        cb3: cb_check(a, 3).unwrap_or(false),
        predicted_cases,
    })
}

pub fn analyze(instance_form: &Form, witness: Option<&Witness>, points: Option<&PointSet>) -> crate::Result<AnalyzeReport> {
    let form = form_report(instance_form)?;
    let mut decompositions = Vec::new();
    let mut pair = None;
    let mut certified = None;
    if let Some(w) = witness {
        certified = Some(w.certify().is_ok());
        for dec in &w.decomps {
            decompositions.push(points_report(&w.form, &dec.points)?);
        }
        if let Some((a, b)) = w.pair() {
            pair = Some(PairSummary {
                report: pair_report(&a.points, &b.points)?,
                union_h_vector: h_vector(&a.points.union(&b.points)).values,
                sum_bound_slack: check_sum_bound(&w.form, a, b).ok().map(|(_, s)| s),
            });
        }
    }
    if let Some(p) = points {
        if p.n() != instance_form.n() {
            return Err(Error::DimensionMismatch(format!(
                "points live in P^{}, form in {} variables",
                p.n(),
                instance_form.nvars()
            )));
        }
        decompositions.push(points_report(instance_form, p)?);
    }
    Ok(AnalyzeReport {
        form,
        family: witness.map(|w| w.family.clone()),
        certified,
        decompositions,
        pair,
    })
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn fmt_list<T: std::fmt::Display>(items: &[T]) -> String {
    items.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

fn fmt_tuple(v: &[usize]) -> String {
    format!("({})", v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
}

fn cmd_analyze(args: &AnalyzeArgs, out: &mut dyn Write) -> CmdResult {
    let instance = read_instance(&args.file)?;
    let points = args.points.as_deref().map(read_points).transpose()?;
    let witness = match &instance {
        Instance::Witness(w) => Some(w),
        Instance::Form(_) => None,
    };
    let report = analyze(instance.form(), witness, points.as_ref())?;
    let ok = report.certified != Some(false)
        && report.decompositions.iter().all(|d| d.coefficients.is_some());
    if args.json {
        emit_json(out, &report)?;
    } else {
        let f = &report.form;
        writeln!(out, "n: {}", f.n)?;
        writeln!(out, "d: {}", f.d)?;
        writeln!(out, "concise: {}", yes_no(f.concise))?;
        writeln!(out, "catalecticant rank: {}", f.catalecticant_rank)?;
        writeln!(out, "concise support dimension: {}", f.concise_support_dim)?;
        if let Some(fam) = &report.family {
            writeln!(out, "family: {fam}")?;
        }
        if let Some(c) = report.certified {
            writeln!(out, "certified: {}", yes_no(c))?;
        }
        for (i, d) in report.decompositions.iter().enumerate() {
            writeln!(out, "decomposition {i}: length {}", d.len)?;
            match &d.coefficients {
                Some(c) => writeln!(out, "  coefficients: {}", fmt_list(c))?,
                None => writeln!(out, "  coefficients: not a decomposition")?,
            }
            if let Some(nr) = d.nonredundant {
                writeln!(out, "  non-redundant: {}", yes_no(nr))?;
            }
            writeln!(out, "  Kruskal rank: {}", d.kruskal_rank)?;
            writeln!(out, "  h-vector: {}", fmt_tuple(&d.h_vector))?;
            writeln!(out, "  CB(3): {}", yes_no(d.cb3))?;
            if let Some(cases) = &d.predicted_cases {
                writeln!(out, "  cases: {{{}}}", fmt_list(cases))?;
            }
        }
        if let Some(p) = &report.pair {
            writeln!(out, "pair: intersection {}", p.report.intersection)?;
            writeln!(out, "  union h-vector: {}", fmt_tuple(&p.union_h_vector))?;
            writeln!(
                out,
                "  difference: collinear {}, two lines {}, two planes {}",
                yes_no(p.report.diff_collinear),
                yes_no(p.report.diff_two_lines),
                yes_no(p.report.diff_two_planes)
            )?;
            if let Some(s) = p.sum_bound_slack {
                writeln!(out, "  sum bound slack: {s}")?;
            }
        }
    }
    Ok(if ok { EXIT_OK } else { EXIT_VERIFY })
}

#[derive(Serialize, Debug)]
pub struct GenerateReport {
    pub family: String,
    pub n: usize,
    pub seed: u64,
    pub lengths: Vec<usize>,
    pub intersection: Option<usize>,
    pub union_h_vector: Option<Vec<usize>>,
    pub certified: bool,
    pub witness: Witness,
}

#[derive(Serialize, Debug)]
pub struct KruskalSetReport {
    pub family: String,
    pub n: usize,
    pub rank: usize,
    pub seed: u64,
    pub points: PointSet,
}

fn cmd_generate(args: &GenerateArgs, out: &mut dyn Write) -> CmdResult {
    if args.family == "kruskal-set" {
        let r = args
            .rank
            .ok_or_else(|| Exit::usage("kruskal-set requires --rank"))?;
        let pts = random_kruskal_set(args.n, r, args.seed)?;
        let recovered = normalize_orbit(&pts)?.1;
        let report = KruskalSetReport {
            family: args.family.clone(),
            n: args.n,
            rank: r,
            seed: args.seed,
            points: pts,
        };
        if let Some(path) = &args.out {
            write_file(path, &serde_json::to_string_pretty(&report.points).expect("points serialize"))?;
        }
        if args.json {
            emit_json(out, &report)?;
        } else {
            writeln!(out, "family: kruskal-set")?;
            writeln!(out, "n: {}, seed: {}", args.n, args.seed)?;
            writeln!(out, "Kruskal rank: {recovered}")?;
            for p in report.points.points() {
                writeln!(out, "  {p}")?;
            }
        }
        return Ok(if recovered == r { EXIT_OK } else { EXIT_VERIFY });
    }
    let w = generate(&args.family, args.n, args.seed)?;
    let certified = w.certify().is_ok();
    let pair = w.pair();
    let report = GenerateReport {
        family: w.family.clone(),
        n: w.n,
        seed: w.seed,
        lengths: w.decomps.iter().map(Decomposition::len).collect(),
        intersection: pair.map(|(a, b)| a.points.intersection(&b.points).len()),
        union_h_vector: pair.map(|(a, b)| h_vector(&a.points.union(&b.points)).values),
        certified,
        witness: w.clone(),
    };
    if let Some(path) = &args.out {
        if certified {
            write_file(path, &w.to_json())?;
        }
    }
    if args.json {
        emit_json(out, &report)?;
    } else {
        writeln!(out, "family: {}", report.family)?;
        writeln!(out, "n: {}, seed: {}", report.n, report.seed)?;
        writeln!(out, "lengths: {}", fmt_list(&report.lengths))?;
        if let Some(i) = report.intersection {
            writeln!(out, "intersection: {i}")?;
        }
        if let Some(h) = &report.union_h_vector {
            writeln!(out, "union h-vector: {}", fmt_tuple(h))?;
        }
        writeln!(out, "certified: {}", yes_no(certified))?;
        if let Some(path) = &args.out {
            writeln!(out, "wrote {}", path.display())?;
        } else {
            writeln!(out, "{}", w.to_json())?;
        }
    }
    Ok(if certified { EXIT_OK } else { EXIT_VERIFY })
}

fn print_suite(out: &mut dyn Write, s: &SuiteSummary) -> std::io::Result<()> {
    writeln!(out, "suite {} (n {}..{}, {} trials, seed {})", s.theorem, s.n_min, s.n_max, s.trials, s.seed)?;
    for d in &s.per_n {
        write!(out, "  n={}: {} passed, {} failed", d.n, d.passed, d.failed)?;
        if s.theorem == Theorem::SylvesterBound {
            write!(out, ", {} sharp", d.sharp)?;
        }
        writeln!(out)?;
    }
    if let Some(c) = &s.first_counterexample {
        writeln!(
            out,
            "first counterexample: n={}, trial {}, seed {}: {}",
            c.n,
            c.trial,
            c.seed,
            c.reason.as_deref().unwrap_or("")
        )?;
    }
    writeln!(out, "{}", if s.all_passed { "all passed" } else { "FAILED" })
}

fn cmd_suite(args: &SuiteArgs, out: &mut dyn Write) -> CmdResult {
    let cfg = SuiteConfig {
        theorem: args.theorem,
        n_range: args.n,
        trials: args.trials,
        seed: args.seed,
        output: args.out.clone(),
    };
    let summary = run_suite(&cfg)?;
    if args.json {
        emit_json(out, &summary)?;
    } else {
        print_suite(out, &summary)?;
    }
    Ok(if summary.all_passed { EXIT_OK } else { EXIT_VERIFY })
}

#[derive(Serialize, Debug)]
pub struct SearchOutput {
    #[serde(flatten)]
    pub report: SearchReport,
    /// For each exact decomposition of length `r` in the input witness, the
    /// index of the class matching it.
    pub witness_matches: Option<Vec<Option<usize>>>,
}

pub fn match_witness(w: &Witness, report: &SearchReport) -> crate::Result<Vec<Option<usize>>> {
    let scale = ResidualModel::new(&w.form, report.r)?.scale();
    w.decomps
        .iter()
        .filter(|d| d.len() == report.r)
        .map(|d| {
            let exact = NumDecomp::from_exact(d)?;
            Ok(report
                .classes
                .iter()
                .position(|c| matching_distance(c, &exact, scale) < crate::numsearch::MATCH_THRESHOLD))
        })
        .collect()
}

fn cmd_search(args: &SearchArgs, out: &mut dyn Write) -> CmdResult {
    let instance = read_instance(&args.file)?;
    let r = args.rank;
    let report = search(instance.form(), &SearchConfig::new(r, args.restarts, args.tol, args.seed))?;
    let witness_matches = match &instance {
        Instance::Witness(w) => Some(match_witness(w, &report)?),
        Instance::Form(_) => None,
    };
    let output = SearchOutput {
        report,
        witness_matches,
    };
    if let Some(path) = &args.out {
        write_file(path, &serde_json::to_string_pretty(&output).expect("report serializes"))?;
    }
    if args.json {
        emit_json(out, &output)?;
    } else {
        let rep = &output.report;
        writeln!(out, "rank: {}", rep.r)?;
        writeln!(
            out,
            "converged: {}/{} ({:.0}%)",
            rep.converged,
            rep.restarts,
            100.0 * rep.convergence_rate
        )?;
        writeln!(out, "best residual: {:.3e}", rep.best_residual)?;
        writeln!(out, "distinct classes: {}", rep.classes.len())?;
        for (i, (c, size)) in rep.classes.iter().zip(&rep.class_sizes).enumerate() {
            writeln!(out, "class {i}: {size} runs, residual {:.3e}", c.residual)?;
            for v in &c.vectors {
                let coords: Vec<String> = v.iter().map(|z| format!("{:.6}{:+.6}i", z.re, z.im)).collect();
                writeln!(out, "  [{}]", coords.join(", "))?;
            }
        }
        if let Some(m) = &output.witness_matches {
            for (i, k) in m.iter().enumerate() {
                match k {
                    Some(k) => writeln!(out, "witness decomposition {i}: class {k}")?,
                    None => writeln!(out, "witness decomposition {i}: not found")?,
                }
            }
        }
    }
    Ok(EXIT_OK)
}

/// Entry point for the binary.
pub fn main_with_std() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["waringlab"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn range_parsing() {
        assert_eq!(parse_range("4..8").unwrap(), (4, 8));
        assert_eq!(parse_range("4..=8").unwrap(), (4, 8));
        assert_eq!(parse_range("3").unwrap(), (3, 3));
        assert!(parse_range("x..3").is_err());
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run_capture(&["generate", "--family", "conic8", "--n", "5", "--seed", "1"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["bogus"]).0, EXIT_USAGE);
        let (code, _, err) = run_capture(&["suite", "--theorem", "main", "--n", "4..12", "--trials", "1"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("supports n"));
    }

    #[test]
    fn generate_reports_structure() {
        let (code, out, _) = run_capture(&["generate", "--family", "two-lines", "--n", "3", "--seed", "42"]);
        assert_eq!(code, 0);
        assert!(out.contains("union h-vector: (1,3,2,2,2)"));
        let (code, out, _) = run_capture(&["generate", "--family", "case-ii", "--n", "6", "--seed", "7"]);
        assert_eq!(code, 0);
        assert!(out.contains("intersection: 3"));
    }
}
