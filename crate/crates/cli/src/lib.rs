// SPDX-License-Identifier: Apache-2.0

//! The `pbcore` command line: `check`, `verify-paper`, `search`, `convert`.
//!
//! Exit codes: 0 success, 1 negative answer under `--expect` (or a failed
//! theorem condition), 2 input error, 3 undecided comparison, 4 limit
//! exceeded.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pbcore::core_check::{verify_certificate, CheckMode};
use pbcore::instance::parse_pabulib;
use pbcore::search::{Family, SearchLimits, SearchSpace};
use pbcore::theorems::{TheoremError, TheoremParams};
use pbcore::{
    core_empty, find_blocking_with, json, parse_rational, run_search, verify_theorem, Allocation,
    BigRational, CoreError, CoreOptions, CoreVerdict, Election, FormatError, SatError, SatKind,
    SearchError,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INDETERMINATE: i32 = 3;
pub const EXIT_LIMIT: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "pbcore", version, about = "Core stability for approval-based participatory budgeting")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check one allocation, or decide whether the core is empty.
    Check(CheckArgs),
    /// Verify one of the built-in counterexample constructions.
    VerifyPaper(VerifyArgs),
    /// Search for elections with an empty core.
    Search(SearchArgs),
    /// Convert a Pabulib file to the native JSON format.
    Convert(ConvertArgs),
}

#[derive(Args, Debug)]
struct Common {
    /// Worker threads (1 = sequential; default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Print JSON instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
#[command(group(clap::ArgGroup::new("target").required(true).args(["allocation", "all"])))]
struct CheckArgs {
    /// Election file (native JSON, or Pabulib when it ends in .pb).
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_parser = parse_kind)]
    sat: SatKind,
    /// Comma-separated project ids.
    #[arg(long, value_delimiter = ',')]
    allocation: Option<Vec<String>>,
    /// Decide core emptiness over all allocations.
    #[arg(long)]
    all: bool,
    /// Use the unpruned search over every feasible allocation and deviation.
    #[arg(long)]
    naive_oracle: bool,
    /// Exit with 1 when the allocation is blocked or the core is empty.
    #[arg(long)]
    expect: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    theorem: u8,
    #[arg(long, value_parser = parse_kind)]
    sat: Option<SatKind>,
    #[arg(long, value_parser = parse_rat)]
    b: Option<BigRational>,
    #[arg(long, value_parser = parse_rat)]
    eps: Option<BigRational>,
    /// Also print every certificate.
    #[arg(long)]
    witnesses: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum FamilyArg {
    Gadget,
    Random,
    All,
}

#[derive(Args, Debug)]
struct SearchArgs {
    #[arg(long, value_parser = parse_kind)]
    sat: SatKind,
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Voter counts: `3`, `2,3` or `1..4` (gadget: k).
    #[arg(long, default_value = "3", value_parser = parse_sizes)]
    voters: Sizes,
    /// Project counts, same syntax (ignored for gadgets).
    #[arg(long, default_value = "3", value_parser = parse_sizes)]
    projects: Sizes,
    /// Cost domain: comma-separated rationals or an integer range `a..b`.
    #[arg(long, value_parser = parse_rat_set)]
    costs: Option<RatSet>,
    /// Budget domain, same syntax.
    #[arg(long, value_parser = parse_rat_set)]
    budget: RatSet,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Checkpoint log; counterexamples are written next to it.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    #[arg(long, default_value_t = pbcore::search::DEFAULT_CHECKPOINT_EVERY)]
    checkpoint_every: u64,
    #[arg(long)]
    max_instances: Option<u64>,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    /// Random family: samples per (voters, projects) size.
    #[arg(long, default_value_t = 1000)]
    samples: u64,
    /// Random family: probability that a voter approves a project.
    #[arg(long, default_value_t = 0.5)]
    approval_probability: f64,
    /// All costs 1.
    #[arg(long)]
    unit_cost: bool,
    /// Enumerate every labelled profile instead of sorted ones.
    #[arg(long)]
    no_symmetry: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct ConvertArgs {
    /// Source format and file, e.g. `--from pabulib in.pb`.
    #[arg(long, num_args = 2, value_names = ["FORMAT", "FILE"])]
    from: Vec<String>,
    /// Target format and file, e.g. `--to native out.json`.
    #[arg(long, num_args = 2, value_names = ["FORMAT", "FILE"])]
    to: Vec<String>,
    /// Keep only the first M projects.
    #[arg(long)]
    truncate: Option<usize>,
}

#[derive(Debug, Clone)]
struct Sizes(Vec<usize>);

#[derive(Debug, Clone)]
struct RatSet(Vec<BigRational>);

fn parse_kind(s: &str) -> Result<SatKind, String> {
    s.parse().map_err(|e: pbcore::satisfaction::UnknownSatKind| e.to_string())
}

fn parse_rat(s: &str) -> Result<BigRational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn integer_range(s: &str) -> Option<Result<(i64, i64), String>> {
    let (a, b) = s.split_once("..")?;
    let bounds = a.trim().parse::<i64>().and_then(|a| Ok((a, b.trim().parse::<i64>()?)));
    Some(match bounds {
        Ok((a, b)) if a <= b => Ok((a, b)),
        Ok(_) => Err(format!("empty range {s:?}")),
        Err(e) => Err(format!("bad range {s:?}: {e}")),
    })
}

fn parse_sizes(s: &str) -> Result<Sizes, String> {
    if let Some(range) = integer_range(s) {
        let (a, b) = range?;
        if a < 0 {
            return Err(format!("negative size in {s:?}"));
        }
        return Ok(Sizes((a as usize..=b as usize).collect()));
    }
    s.split(',')
        .map(|x| x.trim().parse::<usize>().map_err(|e| format!("bad size {x:?}: {e}")))
        .collect::<Result<_, _>>()
        .map(Sizes)
}

fn parse_rat_set(s: &str) -> Result<RatSet, String> {
    if let Some(range) = integer_range(s) {
        let (a, b) = range?;
        return Ok(RatSet((a..=b).map(|v| BigRational::from_integer(v.into())).collect()));
    }
    s.split(',').map(|x| parse_rat(x.trim())).collect::<Result<_, _>>().map(RatSet)
}

/// Failure carrying its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: impl ToString) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: message.to_string(),
        }
    }
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        let code = match &e {
            CoreError::Sat(SatError::IndeterminateComparison { .. }) => EXIT_INDETERMINATE,
            CoreError::EnumerationLimitExceeded { .. } => EXIT_LIMIT,
            CoreError::Sat(_) => EXIT_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        Failure::input(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::input(e)
    }
}

type Outcome = Result<i32, Failure>;

/// Parses `args` (including the program name) and runs the command,
/// writing results to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = if code == EXIT_OK {
                write!(out, "{e}")
            } else {
                write!(err, "{e}")
            };
            return code;
        }
    };
    let threads = match &cli.command {
        Command::Check(a) => a.common.threads,
        Command::VerifyPaper(a) => a.common.threads,
        Command::Search(a) => a.common.threads,
        Command::Convert(_) => Some(1),
    };
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
    {
        Ok(pool) => pool,
        Err(e) => {
            let _ = writeln!(err, "error: cannot start worker threads: {e}");
            return EXIT_INPUT;
        }
    };
    let parallel = threads != Some(1);
    let (result, buffer) = pool.install(|| {
        let mut buffer = Vec::new();
        let result = match cli.command {
            Command::Check(a) => check(a, parallel, &mut buffer),
            Command::VerifyPaper(a) => verify_paper(a, parallel, &mut buffer),
            Command::Search(a) => search(a, parallel, &mut buffer),
            Command::Convert(a) => convert(a, &mut buffer),
        };
        (result, buffer)
    });
    if let Err(e) = out.write_all(&buffer).and_then(|_| out.flush()) {
        let _ = writeln!(err, "error: cannot write output: {e}");
        return EXIT_INPUT;
    }
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn load(path: &Path) -> Result<Election, Failure> {
    if path.extension().is_some_and(|e| e == "pb") {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
        let raw = parse_pabulib(&text).map_err(Failure::input)?;
        return raw.validate().map_err(Failure::input);
    }
    Ok(Election::from_file(path)?)
}

fn emit_json(out: &mut dyn Write, value: &serde_json::Value) -> std::io::Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(value).expect("serializable"))
}

fn check(a: CheckArgs, parallel: bool, out: &mut dyn Write) -> Outcome {
    let election = load(&a.instance)?;
    let options = CoreOptions {
        mode: if a.naive_oracle {
            CheckMode::Naive
        } else {
            CheckMode::Pruned
        },
        parallel,
        ..CoreOptions::default()
    };
    let kind = a.sat;
    if let Some(ids) = a.allocation {
        let allocation = Allocation::from_ids(&election, &ids).map_err(Failure::input)?;
        let cert = find_blocking_with(kind, &election, &allocation, &options)?;
        if let Some(cert) = &cert {
            verify_certificate(kind, &election, &allocation, cert, &options.policy).map_err(|r| Failure {
                code: EXIT_INPUT,
                message: format!("internal error: certificate rejected ({})", r.code()),
            })?;
        }
        if a.common.json {
            emit_json(
                out,
                &serde_json::json!({
                    "sat": kind.name(),
                    "allocation": json::allocation(&election, &allocation),
                    "in_core": cert.is_none(),
                    "certificate": cert.as_ref().map(|c| json::certificate(&election, c)),
                }),
            )?;
        } else {
            match &cert {
                None => writeln!(out, "IN CORE")?,
                Some(c) => {
                    writeln!(out, "BLOCKED")?;
                    writeln!(out, "{}", c.describe(&election))?;
                }
            }
        }
        return Ok(if a.expect && cert.is_some() {
            EXIT_NEGATIVE
        } else {
            EXIT_OK
        });
    }

    let verdict = core_empty(kind, &election, &options)?;
    pbcore::verify_verdict(kind, &election, &verdict, &options.policy).map_err(|(_, r)| Failure {
        code: EXIT_INPUT,
        message: format!("internal error: certificate rejected ({})", r.code()),
    })?;
    if a.common.json {
        emit_json(out, &json::verdict(kind, &election, &verdict))?;
    } else {
        let m = election.num_projects();
        let scanned = election.feasible_sets().count();
        match &verdict {
            CoreVerdict::InCore(allocation) => {
                writeln!(out, "IN CORE")?;
                writeln!(
                    out,
                    "allocation {{{}}} admits no blocking coalition",
                    election.project_ids(allocation.projects()).join(",")
                )?;
            }
            CoreVerdict::Empty(map) => {
                writeln!(out, "CORE EMPTY")?;
                writeln!(
                    out,
                    "scanned {} subsets ({} feasible), {} {} allocations blocked",
                    1u128 << m,
                    scanned,
                    map.len(),
                    if a.naive_oracle { "feasible" } else { "exhaustive" }
                )?;
                for (allocation, cert) in map {
                    writeln!(
                        out,
                        "{{{}}}: {}",
                        election.project_ids(allocation.projects()).join(","),
                        cert.describe(&election)
                    )?;
                }
            }
        }
    }
    Ok(if a.expect && verdict.is_empty() {
        EXIT_NEGATIVE
    } else {
        EXIT_OK
    })
}

fn verify_paper(a: VerifyArgs, parallel: bool, out: &mut dyn Write) -> Outcome {
    let params = match (a.sat, a.b, a.eps) {
        (None, None, None) => None,
        (Some(kind), Some(budget), Some(eps)) => Some(TheoremParams {
            kind,
            budget,
            eps: Some(eps),
        }),
        _ => return Err(Failure::input("--sat, --b and --eps go together")),
    };
    let options = CoreOptions {
        parallel,
        ..CoreOptions::default()
    };
    match verify_theorem(a.theorem, params, &options) {
        Ok(report) => {
            if a.common.json {
                emit_json(out, &report.to_json(a.witnesses))?;
            } else {
                write!(out, "{}", report.render(a.witnesses))?;
            }
            Ok(EXIT_OK)
        }
        Err(TheoremError::ConditionFailed { condition, report }) => {
            if a.common.json {
                let mut v = report.to_json(false);
                v["failed_condition"] = condition.into();
                emit_json(out, &v)?;
            } else {
                write!(out, "{}", report.render(false))?;
                writeln!(out, "ConditionFailed({condition})")?;
            }
            Ok(EXIT_NEGATIVE)
        }
        Err(TheoremError::Core(e)) => Err(e.into()),
        Err(e) => Err(Failure::input(e)),
    }
}

fn search(a: SearchArgs, parallel: bool, out: &mut dyn Write) -> Outcome {
    let family = match a.family {
        FamilyArg::Gadget => Family::Gadget,
        FamilyArg::All => Family::All,
        FamilyArg::Random => Family::Random {
            approval_probability: a.approval_probability,
            samples: a.samples,
        },
    };
    let costs = match (a.costs, a.unit_cost) {
        (Some(c), _) => c.0,
        (None, true) => Vec::new(),
        (None, false) => return Err(Failure::input("--costs is required unless --unit-cost is given")),
    };
    let space = SearchSpace {
        family,
        voters: a.voters.0,
        projects: a.projects.0,
        costs,
        budgets: a.budget.0,
        symmetry_reduction: !a.no_symmetry,
        unit_cost: a.unit_cost,
    };
    let time_limit = match a.time_limit {
        Some(t) if !(t.is_finite() && t >= 0.0) => return Err(Failure::input("--time-limit must be a nonnegative number")),
        Some(t) => Some(Duration::from_secs_f64(t)),
        None => None,
    };
    let limits = SearchLimits {
        max_instances: a.max_instances,
        time_limit,
        core: CoreOptions {
            parallel,
            ..CoreOptions::default()
        },
        checkpoint: a.checkpoint,
        checkpoint_every: a.checkpoint_every,
    };
    let (report, code) = match run_search(a.sat, &space, a.seed, &limits) {
        Ok(report) => (report, EXIT_OK),
        Err(SearchError::LimitExceeded { reason, report }) => {
            if !a.common.json {
                writeln!(out, "limit exceeded: {reason}")?;
            }
            (*report, EXIT_LIMIT)
        }
        Err(SearchError::Core(e)) => return Err(e.into()),
        Err(e) => return Err(Failure::input(e)),
    };
    if a.common.json {
        emit_json(out, &report.to_json())?;
    } else {
        write!(out, "{report}")?;
    }
    Ok(code)
}

fn convert(a: ConvertArgs, out: &mut dyn Write) -> Outcome {
    let (from_format, from_file) = (&a.from[0], &a.from[1]);
    let (to_format, to_file) = (&a.to[0], &a.to[1]);
    if from_format != "pabulib" {
        return Err(Failure::input(format!("unsupported source format {from_format:?} (expected pabulib)")));
    }
    if to_format != "native" {
        return Err(Failure::input(format!("unsupported target format {to_format:?} (expected native)")));
    }
    let text = std::fs::read_to_string(from_file)
        .map_err(|e| Failure::input(format!("cannot read {from_file}: {e}")))?;
    let mut raw = parse_pabulib(&text).map_err(Failure::input)?;
    if let Some(m) = a.truncate {
        raw.truncate_projects(m);
    }
    let election = raw.validate().map_err(Failure::input)?;
    std::fs::write(to_file, election.to_json())
        .map_err(|e| Failure::input(format!("cannot write {to_file}: {e}")))?;
    writeln!(
        out,
        "wrote {} ({} projects, {} voters, budget {})",
        to_file,
        election.num_projects(),
        election.num_voters(),
        election.budget()
    )?;
    Ok(EXIT_OK)
}
