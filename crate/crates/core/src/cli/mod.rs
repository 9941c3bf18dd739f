// Copyright 2026 The conebound Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


//! Command-line surface of the `conebound` binary.
//!
//! Exit codes: 0 success, 1 input or runtime error, 2 indeterminate
//! classification, 3 infeasible problem, 4 sampling hint contradicts the
//! classifier, 5 self-test failure.

mod problem;
mod report;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::certify::{
    example51_suite, modulus_estimate, tau_estimate, Certifier, ModulusOpts, SolveOpts, TauOpts,
};
use crate::classify::{classify_geb, ClassifyOpts, TheoremCase};
use crate::conegeom::{classify_point, distance, ClosedCone, ConeSpec, ExponentRule, DEFAULT_TOL};
use crate::selftest::{run_selftest, SelftestOpts};
use crate::{Error, Result};

pub use problem::{ProblemError, ProblemFile};
pub use report::{emit, to_json, write_trace, PhaseTimes, RunReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_INDETERMINATE: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_CONTRADICTION: i32 = 4;
pub const EXIT_SELFTEST: i32 = 5;

#[derive(Debug, Parser)]
#[command(name = "conebound", version, about = "Global error bounds for affine conic inclusions Ax + b ∈ K")]
pub struct Cli {
    /// Seed for every random stream.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Classification threshold on normalized margins.
    #[arg(long, global = true, default_value_t = 1e-7)]
    pub eps: f64,
    /// Write the JSON result here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Suppress the human-readable summary on stderr.
    #[arg(long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide the theorem case of a problem file.
    Classify(ClassifyArgs),
    /// Classify, then estimate the error-bound modulus and τ by sampling.
    Certify(CertifyArgs),
    /// Evaluate one cone primitive.
    Cone(ConeArgs),
    /// Run the checks on the built-in nonlinear example.
    Example51,
    /// Run every invariant suite.
    Selftest(SelftestArgs),
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// Problem file (JSON with `A`, `b`, `cone`)
    #[arg(long)]
    pub problem: PathBuf,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    /// Problem file (JSON with `A`, `b`, `cone`)
    #[arg(long)]
    pub problem: PathBuf,
    /// Ball center; a single value is repeated in every coordinate.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub center: Option<Vec<f64>>,
    /// Strictly increasing ball radii
    #[arg(long, value_delimiter = ',', default_value = "1,10,100,1000,10000")]
    pub radii: Vec<f64>,
    /// Samples per radius.
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    /// Per-sample CSV: radius,sample_id,dist,residual,ratio.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Worker threads; all cores when absent.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Skip the τ estimate.
    #[arg(long)]
    pub no_tau: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConeOp {
    Project,
    Distance,
    Member,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConeKind {
    #[value(name = "second_order")]
    SecondOrder,
    #[value(name = "p_cone")]
    PCone,
    #[value(name = "circular")]
    Circular,
    #[value(name = "orthant")]
    Orthant,
}

#[derive(Debug, Args)]
pub struct ConeArgs {
    #[arg(value_enum)]
    pub op: ConeOp,
    #[arg(long, value_enum)]
    pub kind: ConeKind,
    /// Ambient dimension
    #[arg(long)]
    pub m: usize,
    /// Exponent for `p_cone`, greater than 1
    #[arg(long)]
    pub p: Option<f64>,
    /// Half-angle in radians for `circular`
    #[arg(long)]
    pub theta: Option<f64>,
    /// Comma-separated coordinates
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub point: Vec<f64>,
    /// Boundary tolerance for `member`.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RuleArg {
    Hoelder,
    SumTwo,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    /// A tenth of the sample counts.
    #[arg(long)]
    pub quick: bool,
    /// p-cone polar exponent rule; `sum-two` is a deliberate fault.
    #[arg(long, value_enum, default_value_t = RuleArg::Hoelder)]
    pub exponent_rule: RuleArg,
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let echo = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    match dispatch(&cli, echo) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    }
}

fn dispatch(cli: &Cli, echo: Vec<String>) -> Result<i32> {
    match &cli.command {
        Command::Classify(a) => cmd_classify(cli, a),
        Command::Certify(a) => cmd_certify(cli, a, echo),
        Command::Cone(a) => cmd_cone(cli, a),
        Command::Example51 => cmd_example51(cli),
        Command::Selftest(a) => cmd_selftest(cli, a),
    }
}

fn say(cli: &Cli, msg: impl FnOnce() -> String) {
    if !cli.quiet {
        eprintln!("{}", msg());
    }
}

fn load(path: &Path) -> Result<ProblemFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    ProblemFile::parse(&text).map_err(|e| Error::InvalidProblem(format!("{}: {e}", path.display())))
}

fn classify_opts(cli: &Cli) -> ClassifyOpts {
    ClassifyOpts::with_eps(cli.eps).with_seed(cli.seed)
}

fn case_exit(case: TheoremCase) -> i32 {
    match case {
        TheoremCase::Indeterminate => EXIT_INDETERMINATE,
        TheoremCase::Infeasible => EXIT_INFEASIBLE,
        _ => EXIT_OK,
    }
}

fn cmd_classify(cli: &Cli, a: &ClassifyArgs) -> Result<i32> {
    let file = load(&a.problem)?;
    let problem = file.inclusion().map_err(|e| Error::InvalidProblem(e.to_string()))?;
    let c = classify_geb(&problem, &classify_opts(cli))?;
    emit(&to_json(&c)?, cli.out.as_deref())?;
    say(cli, || format!("case {} (geb {:?}, acq {:?})", c.case.name(), c.geb, c.acq));
    Ok(case_exit(c.case))
}

fn cmd_certify(cli: &Cli, a: &CertifyArgs, echo: Vec<String>) -> Result<i32> {
    let file = load(&a.problem)?;
    let problem = file.inclusion().map_err(|e| Error::InvalidProblem(e.to_string()))?;
    // fail on an unwritable trace before the expensive part
    let trace = a
        .trace
        .as_ref()
        .map(|p| std::fs::File::create(p).map_err(|e| Error::Io(format!("{}: {e}", p.display()))))
        .transpose()?;
    let center = match a.center.as_deref() {
        None => None,
        Some([c]) => Some(vec![*c; problem.n()]),
        Some(c) => Some(c.to_vec()),
    };

    let copts = classify_opts(cli);
    let mut report = RunReport::new(echo, cli.seed);
    report.problem_name = file.name.clone();
    let t0 = Instant::now();
    let classification = classify_geb(&problem, &copts)?;
    report.wall_clock_seconds.classify = Some(t0.elapsed().as_secs_f64());
    let case = classification.case;
    report.classification = Some(classification.clone());
    if !case.is_definite() {
        emit(&to_json(&report)?, cli.out.as_deref())?;
        say(cli, || format!("case {}; nothing to certify", case.name()));
        return Ok(case_exit(case));
    }

    let certifier = Certifier::with_classification(&problem, classification, &SolveOpts::default(), copts.rank_tol)?;
    let mopts = ModulusOpts {
        center,
        radii: a.radii.clone(),
        samples_per_radius: a.samples,
        seed: cli.seed,
        threads: a.threads,
        ..ModulusOpts::default()
    };
    let t1 = Instant::now();
    let mut cert = modulus_estimate(&certifier, &mopts)?;
    report.wall_clock_seconds.modulus = Some(t1.elapsed().as_secs_f64());
    if !a.no_tau {
        let topts = TauOpts { radii: a.radii.clone(), seed: cli.seed, threads: a.threads, ..TauOpts::default() };
        let t2 = Instant::now();
        cert.tau = Some(tau_estimate(&certifier, &topts)?);
        report.wall_clock_seconds.tau = Some(t2.elapsed().as_secs_f64());
    }
    if let Some(f) = trace {
        write_trace(std::io::BufWriter::new(f), &cert.samples)?;
    }
    let failures: usize = cert.per_radius.iter().map(|r| r.solver_failures).sum();
    let contradicts = cert.contradicts_classifier();
    say(cli, || {
        let mut s = format!(
            "case {}, geb {:?}; hint {:?} ({}); sup ratio {:.6e}",
            case.name(),
            cert.geb,
            cert.hint,
            cert.hint_basis,
            cert.sup_ratio
        );
        if let Some(t) = &cert.tau {
            match t.tau {
                Some(v) => s.push_str(&format!("; tau {v:.6e}")),
                None => s.push_str("; tau unbounded"),
            }
        }
        if failures > 0 {
            let per: Vec<String> = cert.per_radius.iter().map(|r| format!("r={}: {}", r.radius, r.solver_failures)).collect();
            s.push_str(&format!("\nsolver failures excluded from statistics: {failures} ({})", per.join(", ")));
        }
        s
    });
    report.certification = Some(cert);
    emit(&to_json(&report)?, cli.out.as_deref())?;
    if contradicts {
        eprintln!("sampling hint contradicts the classifier; flagged for investigation");
        return Ok(EXIT_CONTRADICTION);
    }
    Ok(EXIT_OK)
}

fn cone_spec(a: &ConeArgs) -> Result<ConeSpec> {
    let stray = |flag: &str| Error::InvalidCone(format!("--{flag} does not apply to this cone kind"));
    match a.kind {
        ConeKind::SecondOrder | ConeKind::Orthant if a.p.is_some() => Err(stray("p")),
        ConeKind::SecondOrder | ConeKind::Orthant | ConeKind::PCone if a.theta.is_some() => Err(stray("theta")),
        ConeKind::Circular if a.p.is_some() => Err(stray("p")),
        ConeKind::SecondOrder => ConeSpec::second_order(a.m),
        ConeKind::Orthant => ConeSpec::orthant(a.m),
        ConeKind::PCone => ConeSpec::p_cone(a.m, a.p.ok_or_else(|| Error::InvalidCone("p_cone needs --p".into()))?),
        ConeKind::Circular => {
            ConeSpec::circular(a.m, a.theta.ok_or_else(|| Error::InvalidCone("circular needs --theta".into()))?)
        }
    }
}

fn cmd_cone(cli: &Cli, a: &ConeArgs) -> Result<i32> {
    let cone = cone_spec(a)?;
    if a.point.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("point"));
    }
    let line = match a.op {
        ConeOp::Project => serde_json::to_string(&cone.project(&a.point)?),
        ConeOp::Distance => serde_json::to_string(&distance(&cone, &a.point)?),
        ConeOp::Member => serde_json::to_string(&classify_point(&cone, &a.point, a.tol)?),
    }
    .map_err(|e| Error::Io(e.to_string()))?;
    emit(&line, cli.out.as_deref())?;
    Ok(EXIT_OK)
}

fn cmd_example51(cli: &Cli) -> Result<i32> {
    let r = example51_suite(cli.seed);
    emit(&to_json(&r)?, cli.out.as_deref())?;
    say(cli, || {
        format!(
            "stated Slater point h{:?} = {:?}; witness h{:?} = {:?}; concavity worst slack {:.3e}; \
             residual identity max error {:.3e}; divergence search {:?} (max lower ratio {:.3e})",
            r.scq_stated.point,
            r.scq_stated.value,
            r.scq_witness.point,
            r.scq_witness.value,
            r.concavity.worst_slack,
            r.residual_identity.max_error,
            r.divergence.hint,
            r.divergence.max_lower_ratio
        )
    });
    Ok(EXIT_OK)
}

fn cmd_selftest(cli: &Cli, a: &SelftestArgs) -> Result<i32> {
    let opts = SelftestOpts {
        seed: cli.seed,
        quick: a.quick,
        exponent_rule: match a.exponent_rule {
            RuleArg::Hoelder => ExponentRule::Hoelder,
            RuleArg::SumTwo => ExponentRule::SumTwo,
        },
    };
    let r = run_selftest(&opts);
    say(cli, || {
        let mut s = String::new();
        for suite in &r.suites {
            let mark = if suite.passed { "PASS" } else { "FAIL" };
            s.push_str(&format!("{mark}  {:<28} {:<9} {:>6} checks", suite.name, suite.module, suite.checks));
            if !suite.note.is_empty() {
                s.push_str(&format!("  ({})", suite.note));
            }
            s.push('\n');
        }
        s.trim_end().to_string()
    });
    emit(&to_json(&r)?, cli.out.as_deref())?;
    if r.passed {
        return Ok(EXIT_OK);
    }
    eprintln!("selftest failed: {}", r.failing().join(", "));
    Ok(EXIT_SELFTEST)
}
