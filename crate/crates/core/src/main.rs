use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde::Serialize;

use natfarkas::certificates::CertificateKind;
use natfarkas::engine::{check, check_semigroup, check_zsystem, CheckOptions, Decision, Route, ZDecision};
use natfarkas::hierarchy::{hierarchy_beta, is_monotone, Hierarchy, LevelStatus};
use natfarkas::io::{
    rational_strings, strings, to_json, witness_docs, witness_from_docs, CertificateDoc, GroupFile, LoadedProblem,
    NSystemDoc, ProblemFile, WitnessDoc,
};
use natfarkas::matrices::{build_delta, build_theta, delta_theta_dense, dense_dump, ColumnLayout};
use natfarkas::oracle::{zsystem_box_solutions, Oracle};
use natfarkas::rational::format_rational;
use natfarkas::reduction::{box_bound, semigroup_to_zsystem, zsystem_to_nsystem, BoxChoice, ZSystem};
use natfarkas::verify::{verify_certificate, verify_feasibility, Verdict};
use natfarkas::{Error, IpProblem, Result};

const FEASIBLE: u8 = 0;
const FAILURE: u8 = 1;
const INFEASIBLE: u8 = 2;

/// Exact feasibility certificates for Ax = b over the natural numbers.
#[derive(Parser)]
#[command(name = "natfarkas", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide feasibility and print a witness or an infeasibility certificate.
    Check(CheckArgs),
    /// Solve the moment relaxations level by level.
    Hierarchy(HierarchyArgs),
    /// Decide semigroup membership in a finitely generated abelian group.
    Semigroup(SemigroupArgs),
    /// Print the nonnegative system an integer system reduces to.
    Reduce(ReduceArgs),
    /// Decide by brute-force enumeration.
    Oracle(OracleArgs),
    /// Re-check a certificate or witness against a problem.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Poly,
    Exp,
}

impl From<KindArg> for CertificateKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Poly => CertificateKind::Polynomial,
            KindArg::Exp => CertificateKind::Exponential,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum RouteArg {
    Auto,
    Theta,
    Moment,
    Network,
}

impl From<RouteArg> for Route {
    fn from(r: RouteArg) -> Self {
        match r {
            RouteArg::Auto => Route::Auto,
            RouteArg::Theta => Route::Theta,
            RouteArg::Moment => Route::Moment,
            RouteArg::Network => Route::Network,
        }
    }
}

#[derive(Args)]
struct BoxArgs {
    /// Bound on the coordinate sum used by the integer reduction.
    #[arg(long = "box", value_name = "N", conflicts_with = "theoretical_box")]
    box_bound: Option<String>,
    /// Use the worst-case bound 2^(6 l^3 phi) from the facet complexity.
    #[arg(long)]
    theoretical_box: bool,
}

impl BoxArgs {
    fn choice(&self, from_file: Option<BigInt>) -> Result<Option<BoxChoice>> {
        if self.theoretical_box {
            return Ok(Some(BoxChoice::Theoretical));
        }
        if let Some(text) = &self.box_bound {
            let m = text
                .parse::<BigInt>()
                .map_err(|_| Error::Parse(format!("--box `{text}` is not an integer")))?;
            return Ok(Some(BoxChoice::Explicit(m)));
        }
        Ok(from_file.map(BoxChoice::Explicit))
    }
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, value_enum, default_value = "poly")]
    certificate_kind: KindArg,
    #[arg(long, value_enum, default_value = "auto")]
    route: RouteArg,
    /// Largest lattice for which an infeasibility certificate is built.
    #[arg(long, default_value_t = 4096)]
    certificate_limit: usize,
    /// Add wall-clock timings to the report (makes it non-reproducible).
    #[arg(long)]
    timings: bool,
}

impl SolveArgs {
    fn options(&self) -> CheckOptions {
        CheckOptions {
            route: self.route.into(),
            kind: self.certificate_kind.into(),
            certificate_limit: self.certificate_limit,
            ..CheckOptions::default()
        }
    }
}

#[derive(Args)]
struct CheckArgs {
    problem: PathBuf,
    /// Degree box, comma separated; defaults to max(b, A_k).
    #[arg(long, value_delimiter = ',')]
    beta: Option<Vec<u64>>,
    #[command(flatten)]
    boxes: BoxArgs,
    #[command(flatten)]
    solve: SolveArgs,
    /// Write delta.txt, theta.txt and delta_theta.txt into this directory.
    #[arg(long, value_name = "DIR")]
    dump_matrices: Option<PathBuf>,
}

#[derive(Args)]
struct HierarchyArgs {
    problem: PathBuf,
    /// Degree box, comma separated; defaults to b.
    #[arg(long, value_delimiter = ',')]
    beta: Option<Vec<u64>>,
    #[arg(long)]
    max_level: Option<u64>,
}

#[derive(Args)]
struct SemigroupArgs {
    group: PathBuf,
    #[command(flatten)]
    boxes: BoxArgs,
    #[command(flatten)]
    solve: SolveArgs,
}

#[derive(Args)]
struct ReduceArgs {
    file: PathBuf,
    /// Read a group file instead of a problem file.
    #[arg(long)]
    group: bool,
    #[command(flatten)]
    boxes: BoxArgs,
}

#[derive(Args)]
struct OracleArgs {
    problem: PathBuf,
    #[command(flatten)]
    boxes: BoxArgs,
    /// Largest search box.
    #[arg(long, default_value_t = 10_000_000)]
    budget: u128,
}

#[derive(Args)]
struct VerifyArgs {
    /// A `check` or `semigroup` report, or a bare certificate.
    certificate: PathBuf,
    /// The problem or group file the certificate is about.
    problem: PathBuf,
    #[command(flatten)]
    boxes: BoxArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Check(a) => cmd_check(&a),
        Command::Hierarchy(a) => cmd_hierarchy(&a),
        Command::Semigroup(a) => cmd_semigroup(&a),
        Command::Reduce(a) => cmd_reduce(&a),
        Command::Oracle(a) => cmd_oracle(&a),
        Command::Verify(a) => cmd_verify(&a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(FAILURE)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn status(feasible: bool) -> &'static str {
    if feasible {
        "feasible"
    } else {
        "infeasible"
    }
}

fn exit_for(feasible: bool) -> u8 {
    if feasible {
        FEASIBLE
    } else {
        INFEASIBLE
    }
}

fn need_box(choice: Option<BoxChoice>) -> Result<BoxChoice> {
    choice.ok_or_else(|| {
        Error::Parse("integer data needs a box: give --box N, --theoretical-box, or \"box\" in the file".into())
    })
}

#[derive(Serialize)]
struct Timings {
    total_ms: String,
}

#[derive(Serialize)]
struct ReductionDoc {
    #[serde(flatten)]
    system: NSystemDoc,
    /// Columns of `A*` kept in the decided problem (zero columns dropped).
    kept_columns: Vec<usize>,
}

#[derive(Serialize)]
struct CheckReport {
    command: &'static str,
    status: &'static str,
    m: usize,
    n: usize,
    beta: Vec<u64>,
    b: Vec<String>,
    lattice_points: usize,
    route: &'static str,
    x: Option<Vec<String>>,
    witness: Option<Vec<WitnessDoc>>,
    certificate: Option<CertificateDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reduction: Option<ReductionDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    solution: Option<Vec<String>>,
    note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    timings: Option<Timings>,
}

impl CheckReport {
    fn natural(problem: &IpProblem, d: &Decision) -> Self {
        Self {
            command: "check",
            status: status(d.feasible),
            m: problem.m(),
            n: problem.n(),
            beta: problem.beta().to_vec(),
            b: strings(problem.b()),
            lattice_points: d.lattice_points,
            route: d.route.as_str(),
            x: d.x.as_ref().map(|x| strings(x)),
            witness: d.witness.as_ref().map(witness_docs),
            certificate: d.certificate.as_ref().map(CertificateDoc::from_certificate),
            reduction: None,
            solution: None,
            note: d.note.clone(),
            timings: None,
        }
    }

    fn integer(sys: &ZSystem, z: &ZDecision) -> Self {
        let (Some(decision), Some(reduced), Some(nsystem)) = (&z.decision, &z.reduced, &z.nsystem) else {
            return Self {
                command: "check",
                status: status(false),
                m: sys.rows(),
                n: sys.cols(),
                beta: Vec::new(),
                b: strings(sys.rhs()),
                lattice_points: 0,
                route: "reduction",
                x: None,
                witness: None,
                certificate: None,
                reduction: None,
                solution: None,
                note: z.note.clone(),
                timings: None,
            };
        };
        let mut report = Self::natural(&reduced.problem, decision);
        report.m = sys.rows();
        report.n = sys.cols();
        report.b = strings(sys.rhs());
        report.reduction = Some(ReductionDoc {
            system: NSystemDoc::from_nsystem(nsystem),
            kept_columns: reduced.kept_columns.clone(),
        });
        report.solution = z.solution.as_ref().map(|s| strings(s));
        report
    }
}

fn cmd_check(args: &CheckArgs) -> Result<u8> {
    let start = Instant::now();
    let file = ProblemFile::parse(&read(&args.problem)?)?;
    let opts = args.solve.options();
    let mut report = match file.load(args.beta.clone())? {
        LoadedProblem::Natural(problem) => {
            if let Some(dir) = &args.dump_matrices {
                dump_matrices(&problem, dir)?;
            }
            let d = check(&problem, &opts)?;
            CheckReport::natural(&problem, &d)
        }
        LoadedProblem::Integer(sys) => {
            if args.dump_matrices.is_some() {
                return Err(Error::Parse("--dump-matrices needs nonnegative data".into()));
            }
            let m = need_box(args.boxes.choice(file.box_bound()?)?)?.resolve(&sys);
            let z = check_zsystem(&sys, &m, &opts)?;
            CheckReport::integer(&sys, &z)
        }
    };
    if args.solve.timings {
        report.timings = Some(Timings {
            total_ms: start.elapsed().as_millis().to_string(),
        });
    }
    print!("{}", to_json(&report));
    Ok(exit_for(report.status == "feasible"))
}

fn dump_matrices(problem: &IpProblem, dir: &Path) -> Result<()> {
    const LIMIT: usize = 1024;
    let layout = ColumnLayout::new(problem.columns(), problem.beta())?;
    if layout.lattice().len() > LIMIT {
        return Err(Error::BoxTooLarge {
            volume: layout.lattice().len().to_string(),
            budget: LIMIT as u128,
        });
    }
    let io = |e: std::io::Error| Error::Parse(format!("{}: {e}", dir.display()));
    fs::create_dir_all(dir).map_err(io)?;
    let delta = build_delta(problem.beta())?;
    let theta = build_theta(problem.columns(), problem.beta())?;
    fs::write(dir.join("delta.txt"), dense_dump(&delta.to_dense())).map_err(io)?;
    fs::write(dir.join("theta.txt"), dense_dump(&theta.to_dense())).map_err(io)?;
    fs::write(dir.join("delta_theta.txt"), dense_dump(&delta_theta_dense(&layout))).map_err(io)?;
    Ok(())
}

#[derive(Serialize)]
struct LevelRow {
    level: u64,
    rows: usize,
    status: &'static str,
    value: Option<String>,
    x_hat: Option<Vec<String>>,
}

#[derive(Serialize)]
struct HierarchyReport {
    command: &'static str,
    beta: Vec<u64>,
    b: Vec<String>,
    top_level: u64,
    objective: bool,
    levels: Vec<LevelRow>,
    first_infeasible: Option<u64>,
}

fn cmd_hierarchy(args: &HierarchyArgs) -> Result<u8> {
    let file = ProblemFile::parse(&read(&args.problem)?)?;
    let LoadedProblem::Natural(problem) = file.load(args.beta.clone())? else {
        return Err(Error::Parse("the hierarchy needs nonnegative data".into()));
    };
    let problem = if args.beta.is_none() && file.beta.is_none() {
        let beta = hierarchy_beta(problem.columns(), problem.b());
        let rebuilt = IpProblem::new(problem.rows().to_vec(), problem.b().to_vec(), Some(beta))?;
        match problem.cost() {
            Some(c) => rebuilt.with_cost(c.to_vec())?,
            None => rebuilt,
        }
    } else {
        problem
    };
    let h = Hierarchy::new(&problem)?;
    let levels = h.solve(args.max_level)?;
    if !is_monotone(&levels) {
        return Err(Error::Parse("hierarchy values are not monotone".into()));
    }
    let first_infeasible = levels
        .iter()
        .find(|l| l.status == LevelStatus::Infeasible)
        .map(|l| l.level);
    let report = HierarchyReport {
        command: "hierarchy",
        beta: problem.beta().to_vec(),
        b: strings(problem.b()),
        top_level: h.max_level(),
        objective: problem.cost().is_some(),
        levels: levels
            .iter()
            .map(|l| LevelRow {
                level: l.level,
                rows: l.rows,
                status: l.status.as_str(),
                value: l.value.as_ref().map(format_rational),
                x_hat: l.x_hat.as_ref().map(|x| rational_strings(x)),
            })
            .collect(),
        first_infeasible,
    };
    print!("{}", to_json(&report));
    Ok(exit_for(first_infeasible.is_none()))
}

#[derive(Serialize)]
struct SemigroupReport {
    command: &'static str,
    status: &'static str,
    #[serde(rename = "P")]
    moduli: Vec<Option<String>>,
    generators: Vec<Vec<String>>,
    target: Vec<String>,
    #[serde(rename = "box")]
    box_bound: String,
    x: Option<Vec<String>>,
    u: Option<Vec<String>>,
    w: Option<Vec<String>>,
    check: CheckReport,
}

fn cmd_semigroup(args: &SemigroupArgs) -> Result<u8> {
    let file = GroupFile::parse(&read(&args.group)?)?;
    let spec = file.spec()?;
    let sys = semigroup_to_zsystem(&spec)?;
    let m = need_box(args.boxes.choice(file.box_bound()?)?)?.resolve(&sys);
    let start = Instant::now();
    let z = check_semigroup(&spec, &m, &args.solve.options())?;
    let mut check_report = CheckReport::integer(&sys, &z);
    check_report.command = "semigroup";
    if args.solve.timings {
        check_report.timings = Some(Timings {
            total_ms: start.elapsed().as_millis().to_string(),
        });
    }
    let n = spec.generators().len();
    let q = spec.finite_count();
    let split = |range: std::ops::Range<usize>| z.solution.as_ref().map(|s| strings(&s[range]));
    let report = SemigroupReport {
        command: "semigroup",
        status: if z.feasible { "member" } else { "non-member" },
        moduli: spec
            .moduli()
            .iter()
            .map(|p| match p {
                natfarkas::reduction::Modulus::Finite(v) => Some(v.to_string()),
                natfarkas::reduction::Modulus::Infinite => None,
            })
            .collect(),
        generators: spec.generators().iter().map(|g| strings(g)).collect(),
        target: strings(spec.target()),
        box_bound: m.to_string(),
        x: split(0..n),
        u: split(n..n + q),
        w: split(n + q..n + 2 * q),
        check: check_report,
    };
    print!("{}", to_json(&report));
    Ok(exit_for(z.feasible))
}

#[derive(Serialize)]
struct ReduceReport {
    command: &'static str,
    facet_complexity: u64,
    theoretical_box: String,
    system: Option<NSystemDoc>,
    note: Option<String>,
}

fn cmd_reduce(args: &ReduceArgs) -> Result<u8> {
    let text = read(&args.file)?;
    let (sys, from_file) = if args.group {
        let g = GroupFile::parse(&text)?;
        (semigroup_to_zsystem(&g.spec()?)?, g.box_bound()?)
    } else {
        let f = ProblemFile::parse(&text)?;
        (f.zsystem()?, f.box_bound()?)
    };
    let m = need_box(args.boxes.choice(from_file)?)?.resolve(&sys);
    let (system, note) = match zsystem_to_nsystem(&sys, &m) {
        Ok(n) => (Some(NSystemDoc::from_nsystem(&n)), None),
        Err(e @ Error::NegativeRhs { .. }) => (None, Some(format!("{e}; no solution lies in the box"))),
        Err(e) => return Err(e),
    };
    let report = ReduceReport {
        command: "reduce",
        facet_complexity: natfarkas::reduction::facet_complexity(&sys),
        theoretical_box: box_bound(&sys).to_string(),
        system,
        note,
    };
    print!("{}", to_json(&report));
    Ok(FEASIBLE)
}

#[derive(Serialize)]
struct OracleReport {
    command: &'static str,
    status: &'static str,
    count: usize,
    solutions: Vec<Vec<String>>,
    optimum: Option<String>,
}

fn cmd_oracle(args: &OracleArgs) -> Result<u8> {
    let file = ProblemFile::parse(&read(&args.problem)?)?;
    let oracle = Oracle::with_budget(args.budget);
    let (solutions, optimum) = match file.load(None)? {
        LoadedProblem::Natural(problem) => {
            let set = oracle.enumerate_solutions(&problem)?;
            let optimum = match problem.cost() {
                Some(_) => oracle.ip_optimum(&problem)?.map(|(v, _)| format_rational(&v)),
                None => None,
            };
            (set.solutions, optimum)
        }
        LoadedProblem::Integer(sys) => {
            let BoxChoice::Explicit(m) = need_box(args.boxes.choice(file.box_bound()?)?)? else {
                return Err(Error::Parse("the oracle needs an explicit --box".into()));
            };
            let m = u64::try_from(&m).map_err(|_| Error::ValueTooLarge(m.to_string()))?;
            (zsystem_box_solutions(&sys, m), None)
        }
    };
    let report = OracleReport {
        command: "oracle",
        status: status(!solutions.is_empty()),
        count: solutions.len(),
        solutions: solutions.iter().map(|s| strings(s)).collect(),
        optimum,
    };
    print!("{}", to_json(&report));
    Ok(exit_for(report.count > 0))
}

#[derive(Serialize)]
struct VerifyReport {
    command: &'static str,
    accepted: bool,
    checked: &'static str,
    reasons: Vec<String>,
    value_at_b: Option<String>,
    min_residual: Option<String>,
}

/// Problem the certificate talks about: the natural problem itself, or the
/// reduced system of integer data.
fn verification_target(args: &VerifyArgs, text: &str) -> Result<IpProblem> {
    if let Ok(g) = GroupFile::parse(text) {
        let sys = semigroup_to_zsystem(&g.spec()?)?;
        let m = need_box(args.boxes.choice(g.box_bound()?)?)?.resolve(&sys);
        return Ok(zsystem_to_nsystem(&sys, &m)?.to_problem()?.problem);
    }
    let file = ProblemFile::parse(text)?;
    match file.load(None)? {
        LoadedProblem::Natural(p) => Ok(p),
        LoadedProblem::Integer(sys) => {
            let m = need_box(args.boxes.choice(file.box_bound()?)?)?.resolve(&sys);
            Ok(zsystem_to_nsystem(&sys, &m)?.to_problem()?.problem)
        }
    }
}

fn cmd_verify(args: &VerifyArgs) -> Result<u8> {
    let doc: serde_json::Value =
        serde_json::from_str(&read(&args.certificate)?).map_err(|e| Error::Parse(format!("certificate file: {e}")))?;
    let problem = verification_target(args, &read(&args.problem)?)?;
    // reports nest the check under "check" for semigroups
    let body = doc.get("check").unwrap_or(&doc);
    let parse_err = |e: serde_json::Error| Error::Parse(format!("certificate file: {e}"));
    let (checked, verdict): (&'static str, Verdict) = match (body.get("certificate"), body.get("witness")) {
        (Some(c), _) if !c.is_null() => (
            "certificate",
            certificate_verdict(serde_json::from_value(c.clone()).map_err(parse_err)?, &problem)?,
        ),
        (_, Some(w)) if !w.is_null() => {
            let docs: Vec<WitnessDoc> = serde_json::from_value(w.clone()).map_err(parse_err)?;
            let beta: Vec<u64> = body
                .get("beta")
                .map(|b| serde_json::from_value(b.clone()).map_err(parse_err))
                .transpose()?
                .unwrap_or_else(|| problem.beta().to_vec());
            let w = witness_from_docs(&docs, problem.n())?;
            ("witness", verify_feasibility(&w, problem.columns(), problem.b(), &beta))
        }
        _ if body.get("kind").is_some() => (
            "certificate",
            certificate_verdict(serde_json::from_value(body.clone()).map_err(parse_err)?, &problem)?,
        ),
        _ => {
            return Err(Error::Parse(
                "the file holds neither a certificate nor a witness".into(),
            ))
        }
    };
    let report = VerifyReport {
        command: "verify",
        accepted: verdict.accepted,
        checked,
        reasons: verdict.reasons,
        value_at_b: verdict.value_at_b.map(|v| v.to_string()),
        min_residual: verdict.min_residual.map(|v| v.to_string()),
    };
    print!("{}", to_json(&report));
    Ok(if report.accepted { FEASIBLE } else { INFEASIBLE })
}

fn certificate_verdict(doc: CertificateDoc, problem: &IpProblem) -> Result<Verdict> {
    let support = doc.parsed_support()?;
    Ok(verify_certificate(
        doc.kind,
        &doc.beta,
        &support,
        problem.columns(),
        problem.b(),
    ))
}
