//! The `oscillift` command line: solve, verify, spectrum and report.
//!
//! Exit codes: 0 ok, 1 input error, 2 empty result, 3 verification failure.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lift::{self, CaseTag, LiftSolution, SolveOptions, Transcription};
use crate::numeric::working_digits;
use crate::oracle::{verify_all, VerificationReport, Verdict, VerifyTolerances};
use crate::oscillator::{
    algebras_equal, dimension_check, hamiltonian_spectrum, verify_algebra_relations, DimensionVerdict, OscillatorTruncation,
    RelationReport, Spectrum,
};
use crate::records::{CaseRequest, InputDocument, RunConfig, SolutionRecord, SolutionsFile, Tolerances};
use crate::recurrence::PeriodicRecurrence;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_EMPTY: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "oscillift", version, about = "Linear lifts of periodic orthogonal polynomial families")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve for every admissible lift of the input family.
    Solve(Args),
    /// Check solutions against the recurrence oracle, quadrature and algebra equality.
    Verify(Args),
    /// Truncated Hamiltonian spectrum of P and of each lift.
    Spectrum(Args),
    /// Solve, verify and summarize the algebra of one family.
    Report(Args),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<f64>);

impl FromStr for Grid {
    type Err = String;

    /// `a:b:step`, both ends included; a single number is a one-point grid.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<f64> = s
            .split(':')
            .map(|x| x.trim().parse::<f64>().map_err(|_| format!("bad grid value {x:?}")))
            .collect::<std::result::Result<_, _>>()?;
        match parts[..] {
            [x] => Ok(Grid(vec![x])),
            [a, b, step] => {
                if !(step > 0.0) || !(b >= a) {
                    return Err(format!("grid {s:?} needs a <= b and step > 0"));
                }
                let n = ((b - a) / step + 1e-9).floor() as usize;
                if n > 100_000 {
                    return Err(format!("grid {s:?} has more than 100000 points"));
                }
                Ok(Grid((0..=n).map(|i| a + i as f64 * step).collect()))
            }
            _ => Err(format!("grid {s:?} must be a:b:step")),
        }
    }
}

#[derive(Debug, Clone, clap::Args)]
pub struct Args {
    /// Run config, bare family, or (for verify/spectrum) a solve output file.
    #[arg(long)]
    pub input: PathBuf,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Truncation dimension for spectra.
    #[arg(long)]
    pub dim: Option<usize>,
    /// Use the closed forms exactly as printed instead of the verified ones.
    #[arg(long)]
    pub paper_literal: bool,
    #[arg(long)]
    pub lambda_grid: Option<Grid>,
    #[arg(long)]
    pub theta_grid: Option<Grid>,
    /// Solutions file from `solve`, when --input holds only the family.
    #[arg(long)]
    pub solutions: Option<PathBuf>,
    /// Overrides the case in the config: I..VIII or all.
    #[arg(long)]
    pub case: Option<String>,
}

/// What a command produced: exit code, report body, and a one-line diagnostic.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub body: String,
    pub message: Option<String>,
}

impl Outcome {
    fn fail(code: i32, message: impl Into<String>) -> Self {
        Self { code, body: String::new(), message: Some(message.into()) }
    }
}

fn input_error(e: Error) -> Outcome {
    Outcome::fail(EXIT_INPUT, e.to_string())
}

fn read_document(path: &Path) -> std::result::Result<InputDocument, Outcome> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Outcome::fail(EXIT_INPUT, format!("cannot read {}: {e}", path.display())))?;
    InputDocument::from_json(&text).map_err(input_error)
}

struct Loaded {
    family: PeriodicRecurrence,
    config: RunConfig,
    solutions: Option<SolutionsFile>,
    format: Format,
}

fn load(args: &Args) -> std::result::Result<Loaded, Outcome> {
    let doc = read_document(&args.input)?;
    let family = doc.family().to_family().map_err(input_error)?;
    let (mut config, mut solutions) = match doc {
        InputDocument::Config(c) => (c, None),
        InputDocument::Solutions(s) => {
            let mut c = RunConfig::for_family(s.family.clone());
            c.request = s.request.clone();
            (c, Some(s))
        }
    };
    if let Some(path) = &args.solutions {
        match read_document(path)? {
            InputDocument::Solutions(s) => solutions = Some(s),
            InputDocument::Config(_) => {
                return Err(Outcome::fail(EXIT_INPUT, format!("{} is not a solutions file", path.display())));
            }
        }
    }
    if let Some(case) = &args.case {
        config.request.case = case.clone();
    }
    if args.paper_literal {
        config.request.paper_literal = true;
    }
    let from_config = config.output.as_ref().and_then(|o| o.format.as_deref()).map(|f| match f {
        "text" => Ok(Format::Text),
        "json" => Ok(Format::Json),
        other => Err(Outcome::fail(EXIT_INPUT, format!("output format must be json or text, got {other:?}"))),
    });
    let format = match (args.format, from_config) {
        (Some(f), _) => f,
        (None, Some(f)) => f?,
        (None, None) => Format::Json,
    };
    Ok(Loaded { family, config, solutions, format })
}

/// `--output`, else the config's output path.
pub fn output_path(args: &Args) -> Option<PathBuf> {
    if args.output.is_some() {
        return args.output.clone();
    }
    let text = std::fs::read_to_string(&args.input).ok()?;
    match InputDocument::from_json(&text).ok()? {
        InputDocument::Config(c) => c.output.and_then(|o| o.path).map(PathBuf::from),
        InputDocument::Solutions(_) => None,
    }
}

fn solve_options(request: &CaseRequest, tol: &Tolerances) -> SolveOptions {
    SolveOptions {
        transcription: if request.paper_literal { Transcription::PaperLiteral } else { Transcription::Verified },
        eps_zero: tol.zero,
        eps_case: tol.case_routing,
        eps_residual: tol.residual,
        digits: working_digits(),
        ..SolveOptions::default()
    }
}

fn grids(args: &Args, request: &CaseRequest) -> (Vec<f64>, Vec<f64>) {
    let lambdas = match &args.lambda_grid {
        Some(g) => g.0.clone(),
        None => request.lambda.as_ref().map(|x| x.to_vec()).unwrap_or_default(),
    };
    let thetas = match &args.theta_grid {
        Some(g) => g.0.clone(),
        None => request.theta.as_ref().map(|x| x.to_vec()).unwrap_or_default(),
    };
    (lambdas, thetas)
}

/// Every candidate for the requested case, admissible or not.
pub fn candidates(
    p: &PeriodicRecurrence,
    tag: Option<CaseTag>,
    lambdas: &[f64],
    thetas: &[f64],
    opts: &SolveOptions,
) -> Result<Vec<LiftSolution>> {
    let need = |xs: &[f64], what: &str| {
        if xs.is_empty() {
            Err(Error::ParameterDomain(format!("case {} needs at least one {what} value", tag.expect("specific case"))))
        } else {
            Ok(())
        }
    };
    let per = |xs: &[f64], f: &dyn Fn(f64) -> Result<Vec<LiftSolution>>| -> Result<Vec<LiftSolution>> {
        let mut out = Vec::new();
        for &x in xs {
            out.extend(f(x)?);
        }
        Ok(out)
    };
    match tag {
        None => lift::enumerate_candidates(p, lambdas, thetas, opts),
        Some(CaseTag::I) => lift::solve_case_i(p, opts).map(|s| vec![s]),
        Some(CaseTag::II) => lift::solve_case_ii(p, opts).map(|s| vec![s]),
        Some(CaseTag::III) => lift::solve_case_iii(p, opts),
        Some(CaseTag::IV) => lift::solve_case_iv(p, opts),
        Some(CaseTag::V) => {
            need(lambdas, "lambda")?;
            per(lambdas, &|l| lift::solve_case_v(p, l, opts))
        }
        Some(CaseTag::VI) => {
            need(lambdas, "lambda")?;
            per(lambdas, &|l| lift::solve_case_vi(p, l, opts))
        }
        Some(t @ (CaseTag::VII | CaseTag::VIII)) => {
            need(thetas, "theta")?;
            let kappa_tag = |th: f64| -> Result<Vec<LiftSolution>> {
                let kappa = lift::kappa_from_theta(th, opts.eps_zero)?;
                lift::solve_at_kappa(p, &kappa, t, Some(th), opts)
            };
            per(thetas, &kappa_tag)
        }
    }
}

fn render<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn solution_line(i: usize, s: &SolutionRecord) -> String {
    let b = &s.beta_tilde;
    format!(
        "#{i} case {} a1={} a2={} beta~=({}, {}, {})",
        s.case,
        s.a1.rational.as_deref().unwrap_or(&s.a1.decimal),
        s.a2.rational.as_deref().unwrap_or(&s.a2.decimal),
        b[0].decimal,
        b[1].decimal,
        b[2].decimal
    )
}

fn run_solve(args: &Args) -> Outcome {
    let l = match load(args) {
        Ok(l) => l,
        Err(o) => return o,
    };
    let request = &l.config.request;
    let tag = match request.case_tag() {
        Ok(t) => t,
        Err(e) => return input_error(e),
    };
    let opts = solve_options(request, &l.config.tolerances);
    let (lambdas, thetas) = grids(args, request);
    let all = match candidates(&l.family, tag, &lambdas, &thetas, &opts) {
        Ok(c) => c,
        Err(e) => return input_error(e),
    };
    let (good, bad): (Vec<_>, Vec<_>) = all.iter().partition(|s| s.admissible);
    let mut request = request.clone();
    if !lambdas.is_empty() {
        request.lambda = Some(crate::records::OneOrMany::Many(lambdas));
    }
    if !thetas.is_empty() {
        request.theta = Some(crate::records::OneOrMany::Many(thetas));
    }
    let file = SolutionsFile {
        family: l.config.family.clone(),
        request,
        solutions: good.iter().map(|s| SolutionRecord::of(s)).collect(),
        rejected: bad.iter().map(|s| SolutionRecord::of(s)).collect(),
    };
    let code = if file.solutions.is_empty() { EXIT_EMPTY } else { EXIT_OK };
    let message = (code == EXIT_EMPTY).then(|| {
        let reasons: Vec<String> = file.rejected.iter().filter_map(|r| r.reason.clone().map(|m| format!("case {}: {m}", r.case))).collect();
        if reasons.is_empty() {
            "no solution: no real candidate".to_string()
        } else {
            format!("no solution: {}", reasons.join(" | "))
        }
    });
    let body = match l.format {
        Format::Json => render(&file),
        Format::Text => {
            let mut t = format!("{} solution(s), {} rejected\n", file.solutions.len(), file.rejected.len());
            for (i, s) in file.solutions.iter().enumerate() {
                let _ = writeln!(t, "{}", solution_line(i, s));
            }
            for r in &file.rejected {
                let _ = writeln!(t, "rejected case {}: {}", r.case, r.reason.as_deref().unwrap_or(""));
            }
            t
        }
    };
    Outcome { code, body, message }
}

#[derive(Debug, Serialize)]
struct VerifyOutput {
    all_pass: bool,
    reports: Vec<VerificationReport>,
}

fn verify_tolerances(tol: &Tolerances) -> VerifyTolerances {
    VerifyTolerances { residual: tol.residual, oracle: tol.residual, ..VerifyTolerances::default() }
}

fn run_verify(args: &Args) -> Outcome {
    let l = match load(args) {
        Ok(l) => l,
        Err(o) => return o,
    };
    let Some(file) = &l.solutions else {
        return Outcome::fail(EXIT_INPUT, "verify needs a solutions file (--input from solve, or --solutions)");
    };
    let sols = match file.to_solutions() {
        Ok(s) => s,
        Err(e) => return input_error(e),
    };
    if sols.is_empty() {
        return Outcome::fail(EXIT_EMPTY, "nothing to verify");
    }
    let reports = verify_all(&l.family, &sols, &verify_tolerances(&l.config.tolerances));
    let all_pass = reports.iter().all(|r| r.verdict == Verdict::Pass);
    let out = VerifyOutput { all_pass, reports };
    let body = match l.format {
        Format::Json => render(&out),
        Format::Text => {
            let mut t = String::new();
            for r in &out.reports {
                let verdict = if r.verdict == Verdict::Pass { "pass" } else { "fail" };
                let _ = writeln!(t, "#{} case {} {verdict} residual={:e} oracle_match={}", r.solution, r.case, r.residual, r.oracle_match);
                for why in &r.reasons {
                    let _ = writeln!(t, "  {why}");
                }
            }
            t
        }
    };
    let failed = out.reports.iter().filter(|r| r.verdict == Verdict::Fail).count();
    Outcome {
        code: if all_pass { EXIT_OK } else { EXIT_VERIFY },
        body,
        message: (!all_pass).then(|| format!("{failed} of {} solution(s) failed verification", out.reports.len())),
    }
}

#[derive(Debug, Serialize)]
struct LiftSpectrum {
    solution: usize,
    case: CaseTag,
    algebras_equal: bool,
    spectrum: Spectrum,
}

#[derive(Debug, Serialize)]
struct SpectrumOutput {
    family: Spectrum,
    lifts: Vec<LiftSpectrum>,
}

fn truncation(p: &PeriodicRecurrence, dim: usize) -> std::result::Result<OscillatorTruncation, Outcome> {
    if !p.is_positive() {
        return Err(Outcome::fail(EXIT_INPUT, "spectrum requires positive-definite family"));
    }
    OscillatorTruncation::build(p, dim).map_err(input_error)
}

fn run_spectrum(args: &Args) -> Outcome {
    let l = match load(args) {
        Ok(l) => l,
        Err(o) => return o,
    };
    let dim = args.dim.unwrap_or(l.config.truncation_dim);
    let t = match truncation(&l.family, dim) {
        Ok(t) => t,
        Err(o) => return o,
    };
    let sols = match l.solutions.as_ref().map(SolutionsFile::to_solutions).transpose() {
        Ok(s) => s.unwrap_or_default(),
        Err(e) => return input_error(e),
    };
    let mut lifts = Vec::new();
    for (i, s) in sols.iter().enumerate() {
        let tq = match truncation(&s.q_family, dim) {
            Ok(t) => t,
            Err(o) => return o,
        };
        lifts.push(LiftSpectrum {
            solution: i,
            case: s.case,
            algebras_equal: algebras_equal(&l.family, &s.q_family),
            spectrum: hamiltonian_spectrum(&tq),
        });
    }
    let out = SpectrumOutput { family: hamiltonian_spectrum(&t), lifts };
    let body = match l.format {
        Format::Json => render(&out),
        Format::Text => {
            let head: Vec<String> = out.family.eigenvalues.iter().take(8).map(|e| format!("{e}")).collect();
            let mut t = format!("dim {} max_rel_dev {:e}\neigenvalues {} ...\n", out.family.dim, out.family.max_rel_dev, head.join(" "));
            for q in &out.lifts {
                let same = q.spectrum.eigenvalues == out.family.eigenvalues;
                let _ = writeln!(t, "#{} case {} algebras_equal={} identical_spectrum={same}", q.solution, q.case, q.algebras_equal);
            }
            t
        }
    };
    Outcome { code: EXIT_OK, body, message: None }
}

#[derive(Debug, Serialize)]
struct ReportOutput {
    family: crate::records::FamilyRecord,
    transcription: Transcription,
    solutions: Vec<SolutionRecord>,
    rejected: Vec<SolutionRecord>,
    verification: Vec<VerificationReport>,
    relations: Option<RelationReport>,
    spectrum_max_rel_dev: Option<f64>,
    dimension: Option<DimensionVerdict>,
}

fn run_report(args: &Args) -> Outcome {
    let l = match load(args) {
        Ok(l) => l,
        Err(o) => return o,
    };
    let request = &l.config.request;
    let tag = match request.case_tag() {
        Ok(t) => t,
        Err(e) => return input_error(e),
    };
    let opts = solve_options(request, &l.config.tolerances);
    let (lambdas, thetas) = grids(args, request);
    let all = match candidates(&l.family, tag, &lambdas, &thetas, &opts) {
        Ok(c) => c,
        Err(e) => return input_error(e),
    };
    let good: Vec<LiftSolution> = all.iter().filter(|s| s.admissible).cloned().collect();
    let verification = verify_all(&l.family, &good, &verify_tolerances(&l.config.tolerances));
    let dim = args.dim.unwrap_or(l.config.truncation_dim);
    let (relations, spectrum_dev, dimension) = if l.family.is_positive() {
        let t = match OscillatorTruncation::build(&l.family, dim) {
            Ok(t) => t,
            Err(e) => return input_error(e),
        };
        (verify_algebra_relations(&t).ok(), Some(hamiltonian_spectrum(&t).max_rel_dev), dimension_check(&l.family).ok())
    } else {
        (None, None, None)
    };
    let out = ReportOutput {
        family: l.config.family.clone(),
        transcription: opts.transcription,
        solutions: good.iter().map(SolutionRecord::of).collect(),
        rejected: all.iter().filter(|s| !s.admissible).map(SolutionRecord::of).collect(),
        verification,
        relations,
        spectrum_max_rel_dev: spectrum_dev,
        dimension,
    };
    let all_pass = out.verification.iter().all(|r| r.verdict == Verdict::Pass);
    let body = match l.format {
        Format::Json => render(&out),
        Format::Text => {
            let mut t = format!("{} solution(s), {} rejected\n", out.solutions.len(), out.rejected.len());
            for (i, s) in out.solutions.iter().enumerate() {
                let pass = out.verification[i].verdict == Verdict::Pass;
                let _ = writeln!(t, "{} verified={pass}", solution_line(i, s));
            }
            for r in &out.rejected {
                let _ = writeln!(t, "rejected case {}: {}", r.case, r.reason.as_deref().unwrap_or(""));
            }
            if let Some(r) = &out.relations {
                let _ = writeln!(t, "algebra relations max deviation {:e}", r.max());
            }
            if let Some(d) = &out.dimension {
                let _ = writeln!(t, "dimension {}", if *d == DimensionVerdict::Infinite { "infinite" } else { "finite-candidate" });
            }
            t
        }
    };
    let code = if !all_pass {
        EXIT_VERIFY
    } else if out.solutions.is_empty() {
        EXIT_EMPTY
    } else {
        EXIT_OK
    };
    let message = match code {
        EXIT_VERIFY => Some("some solutions failed verification".to_string()),
        EXIT_EMPTY => Some("no solution".to_string()),
        _ => None,
    };
    Outcome { code, body, message }
}

pub fn execute(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Solve(a) => run_solve(a),
        Command::Verify(a) => run_verify(a),
        Command::Spectrum(a) => run_spectrum(a),
        Command::Report(a) => run_report(a),
    }
}

/// Parses, runs, writes the body to `--output` (or stdout) and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let outcome = execute(&cli);
    let args = match &cli.command {
        Command::Solve(a) | Command::Verify(a) | Command::Spectrum(a) | Command::Report(a) => a,
    };
    if !outcome.body.is_empty() {
        match output_path(args) {
            Some(path) => {
                if let Err(e) = std::fs::write(&path, &outcome.body) {
                    eprintln!("cannot write {}: {e}", path.display());
                    return EXIT_INPUT;
                }
            }
            None => print!("{}", outcome.body),
        }
    }
    if let Some(m) = &outcome.message {
        eprintln!("{m}");
    }
    outcome.code
}
