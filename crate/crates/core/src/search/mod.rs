// SPDX-License-Identifier: Apache-2.0

//! Search for elections with an empty core.
//!
//! Candidates come from one of three families, in increasing
//! `(voters, projects, budget)` order:
//!
//! * `gadget`: k-voter gadgets over every cost triple joint > large > small;
//! * `all`: every approval profile over every cost assignment;
//! * `random`: seeded samples with independent approvals.
//!
//! Each candidate is validated, deduplicated by [`canonical_key`] and passed
//! to [`core_empty`]. Batches are checked in parallel but consumed in order,
//! so the report depends only on the space, the seed and the limits.

pub mod canonical;
pub mod checkpoint;
pub mod gadget;

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::core_check::{core_empty, verify_verdict, CoreError, CoreOptions, CoreVerdict};
use crate::instance::{Election, RawElection, RawProject, RawVoter};
use crate::json;
use crate::rational::format_rational;
use crate::satisfaction::SatKind;

pub use canonical::canonical_key;
pub use checkpoint::Status;
pub use gadget::{gadget, gadget_raw};

pub const DEFAULT_CHECKPOINT_EVERY: u64 = 10_000;
const BATCH: usize = 256;

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    Gadget,
    All,
    Random {
        approval_probability: f64,
        samples: u64,
    },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Gadget => "gadget",
            Family::All => "all",
            Family::Random { .. } => "random",
        }
    }
}

/// The candidate space. `voters` and `projects` list the sizes to visit
/// (for gadgets `voters` is k and `projects` is ignored).
#[derive(Debug, Clone, PartialEq)]
pub struct SearchSpace {
    pub family: Family,
    pub voters: Vec<usize>,
    pub projects: Vec<usize>,
    pub costs: Vec<BigRational>,
    pub budgets: Vec<BigRational>,
    /// Enumerate costs as nondecreasing tuples and profiles as multisets of
    /// ballots (`all` family only).
    pub symmetry_reduction: bool,
    /// Replace the cost domain by `{1}`.
    pub unit_cost: bool,
}

impl SearchSpace {
    pub fn gadget(ks: &[usize], costs: &[BigRational], budgets: &[BigRational]) -> Self {
        SearchSpace {
            family: Family::Gadget,
            voters: ks.to_vec(),
            projects: Vec::new(),
            costs: costs.to_vec(),
            budgets: budgets.to_vec(),
            symmetry_reduction: true,
            unit_cost: false,
        }
    }

    fn normalized(&self) -> Result<SearchSpace, SearchError> {
        let mut s = self.clone();
        if s.unit_cost {
            s.costs = vec![BigRational::from_integer(BigInt::from(1))];
        }
        for v in [&mut s.costs, &mut s.budgets] {
            v.sort();
            v.dedup();
        }
        s.voters.sort_unstable();
        s.voters.dedup();
        s.projects.sort_unstable();
        s.projects.dedup();
        let bad = |what: &str| Err(SearchError::InvalidParameters(what.to_string()));
        if s.voters.is_empty() || s.voters.contains(&0) {
            return bad("voter counts must be positive");
        }
        if s.family != Family::Gadget && (s.projects.is_empty() || s.projects.contains(&0)) {
            return bad("project counts must be positive");
        }
        if s.family == Family::Gadget && s.voters[0] < 2 {
            return bad("a gadget needs at least 2 voters");
        }
        if s.costs.is_empty() || s.costs.iter().any(|c| !c.is_positive()) {
            return bad("costs must be positive");
        }
        if s.budgets.is_empty() || s.budgets.iter().any(|c| !c.is_positive()) {
            return bad("budgets must be positive");
        }
        if let Family::Random {
            approval_probability,
            ..
        } = s.family
        {
            if !(0.0..=1.0).contains(&approval_probability) {
                return bad("approval probability must lie in [0, 1]");
            }
        }
        Ok(s)
    }

    fn max_projects(&self) -> usize {
        match self.family {
            Family::Gadget => self
                .voters
                .iter()
                .map(|k| k * (k - 1) / 2 + 2 * k)
                .max()
                .unwrap_or(0),
            _ => self.projects.iter().copied().max().unwrap_or(0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchLimits {
    /// Stop normally after this many instances have been checked.
    pub max_instances: Option<u64>,
    /// Stop with [`SearchError::LimitExceeded`] once exceeded.
    pub time_limit: Option<Duration>,
    pub core: CoreOptions,
    pub checkpoint: Option<PathBuf>,
    pub checkpoint_every: u64,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            max_instances: None,
            time_limit: None,
            core: CoreOptions::default(),
            checkpoint: None,
            checkpoint_every: DEFAULT_CHECKPOINT_EVERY,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub key: String,
    pub election: Election,
    pub verdict: CoreVerdict,
    /// Where the election was written, if a checkpoint was given.
    pub file: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Exhausted,
    MaxInstances,
    TimeLimit,
}

impl StopReason {
    pub fn name(self) -> &'static str {
        match self {
            StopReason::Exhausted => "exhausted",
            StopReason::MaxInstances => "max_instances",
            StopReason::TimeLimit => "time_limit",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchReport {
    pub kind: SatKind,
    pub family: Family,
    pub seed: u64,
    pub generated: u64,
    pub invalid: u64,
    pub duplicates: u64,
    /// Skipped because the checkpoint already recorded them as in core.
    pub resumed: u64,
    pub examined: u64,
    pub counterexamples: Vec<Counterexample>,
    pub stopped: StopReason,
    pub duration: Duration,
}

#[derive(Debug, thiserror::Error)]
pub enum SearchError {
    #[error("invalid search parameters: {0}")]
    InvalidParameters(String),
    #[error("limit exceeded: {reason}")]
    LimitExceeded {
        reason: String,
        report: Box<SearchReport>,
    },
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(CoreError),
    #[error("counterexample {0} failed re-verification")]
    ReverificationFailed(String),
}

/// Odometer over `len`-tuples of `0..base`, optionally nondecreasing.
struct Tuples {
    current: Option<Vec<usize>>,
    base: usize,
    nondecreasing: bool,
}

impl Tuples {
    fn new(len: usize, base: usize, nondecreasing: bool) -> Self {
        Tuples {
            current: (base > 0 || len == 0).then(|| vec![0; len]),
            base,
            nondecreasing,
        }
    }
}

impl Iterator for Tuples {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let cur = self.current.as_mut().expect("checked");
        // the last position varies fastest
        let mut k = cur.len();
        loop {
            if k == 0 {
                self.current = None;
                break;
            }
            k -= 1;
            if cur[k] + 1 < self.base {
                cur[k] += 1;
                let v = cur[k];
                for x in cur.iter_mut().skip(k + 1) {
                    *x = if self.nondecreasing { v } else { 0 };
                }
                break;
            }
        }
        Some(out)
    }
}

fn plain_election(
    budget: &BigRational,
    costs: Vec<BigRational>,
    ballots: Vec<Vec<usize>>,
) -> RawElection {
    RawElection {
        budget: budget.clone(),
        projects: costs
            .into_iter()
            .enumerate()
            .map(|(j, cost)| RawProject {
                id: format!("p{}", j + 1),
                cost,
            })
            .collect(),
        voters: ballots
            .into_iter()
            .enumerate()
            .map(|(i, ballot)| RawVoter {
                id: (i + 1).to_string(),
                approves: ballot.into_iter().map(|j| format!("p{}", j + 1)).collect(),
            })
            .collect(),
    }
}

fn candidates<'s>(space: &'s SearchSpace, seed: u64) -> Box<dyn Iterator<Item = RawElection> + 's> {
    let costs = &space.costs;
    let budgets = &space.budgets;
    match space.family {
        Family::Gadget => Box::new(space.voters.iter().flat_map(move |&k| {
            budgets.iter().flat_map(move |b| {
                // costs are sorted, so this yields joint > large > small
                Tuples::new(3, costs.len(), false)
                    .filter(|t| t[0] > t[1] && t[1] > t[2])
                    .map(move |t| gadget_raw(k, &costs[t[0]], &costs[t[1]], &costs[t[2]], b))
            })
        })),
        Family::All => {
            let sym = space.symmetry_reduction;
            Box::new(space.voters.iter().flat_map(move |&n| {
                space.projects.iter().flat_map(move |&m| {
                    budgets.iter().flat_map(move |b| {
                        Tuples::new(m, costs.len(), sym).flat_map(move |ct| {
                            Tuples::new(n, 1 << m, sym).map(move |profile| {
                                let ballots = profile
                                    .iter()
                                    .map(|&mask| (0..m).filter(|j| mask >> j & 1 == 1).collect())
                                    .collect();
                                plain_election(b, ct.iter().map(|&c| costs[c].clone()).collect(), ballots)
                            })
                        })
                    })
                })
            }))
        }
        Family::Random {
            approval_probability,
            samples,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let sizes: Vec<(usize, usize)> = space
                .voters
                .iter()
                .flat_map(|&n| space.projects.iter().map(move |&m| (n, m)))
                .collect();
            Box::new(sizes.into_iter().flat_map(move |(n, m)| {
                (0..samples)
                    .map(|_| {
                        let b = &budgets[rng.random_range(0..budgets.len())];
                        let cs = (0..m)
                            .map(|_| costs[rng.random_range(0..costs.len())].clone())
                            .collect();
                        let ballots = (0..n)
                            .map(|_| (0..m).filter(|_| rng.random_bool(approval_probability)).collect())
                            .collect();
                        plain_election(b, cs, ballots)
                    })
                    .collect::<Vec<_>>()
            }))
        }
    }
}

fn io_error(path: &Path, source: std::io::Error) -> SearchError {
    SearchError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn counterexample_path(checkpoint: &Path, index: usize) -> PathBuf {
    let stem = checkpoint
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "search".into());
    checkpoint.with_file_name(format!("{stem}-counterexample-{index:04}.json"))
}

/// Checks an empty-core verdict again from a freshly parsed copy of the
/// election.
fn reverify(kind: SatKind, election: &Election, verdict: &CoreVerdict, options: &CoreOptions) -> bool {
    let Ok(fresh) = Election::from_json(&election.to_json()) else {
        return false;
    };
    let again = core_empty(kind, &fresh, options);
    again.as_ref() == Ok(verdict) && verify_verdict(kind, &fresh, verdict, &options.policy).is_ok()
}

pub fn run_search(
    kind: SatKind,
    space: &SearchSpace,
    seed: u64,
    limits: &SearchLimits,
) -> Result<SearchReport, SearchError> {
    let started = Instant::now();
    let space = space.normalized()?;
    let mut report = SearchReport {
        kind,
        family: space.family.clone(),
        seed,
        generated: 0,
        invalid: 0,
        duplicates: 0,
        resumed: 0,
        examined: 0,
        counterexamples: Vec::new(),
        stopped: StopReason::Exhausted,
        duration: Duration::ZERO,
    };
    let limit = |reason: String, mut report: SearchReport| {
        report.duration = started.elapsed();
        Err(SearchError::LimitExceeded {
            reason,
            report: Box::new(report),
        })
    };
    let max_voters = space.voters.last().copied().unwrap_or(0);
    if max_voters > limits.core.max_voters {
        return limit(
            format!("{max_voters} voters exceed the limit {}", limits.core.max_voters),
            report,
        );
    }
    if space.max_projects() > limits.core.max_projects {
        return limit(
            format!(
                "{} projects exceed the limit {}",
                space.max_projects(),
                limits.core.max_projects
            ),
            report,
        );
    }

    let (mut checkpoint, resume) = match &limits.checkpoint {
        Some(path) => {
            let (c, seen) = checkpoint::Checkpoint::open(path, limits.checkpoint_every)?;
            (Some(c), seen)
        }
        None => (None, HashMap::new()),
    };
    let outer_parallel = limits.core.parallel;
    let inner = CoreOptions {
        parallel: false,
        ..limits.core
    };
    let mut seen: HashSet<String> = HashSet::new();
    let mut source = candidates(&space, seed);
    let mut exhausted = false;
    while !exhausted {
        if limits.max_instances.is_some_and(|k| report.examined >= k) {
            report.stopped = StopReason::MaxInstances;
            break;
        }
        let mut batch: Vec<(String, Election)> = Vec::new();
        while batch.len() < BATCH {
            if limits
                .max_instances
                .is_some_and(|k| report.examined + batch.len() as u64 >= k)
            {
                break;
            }
            let Some(raw) = source.next() else {
                exhausted = true;
                break;
            };
            report.generated += 1;
            let Ok(election) = raw.validate() else {
                report.invalid += 1;
                continue;
            };
            let key = canonical_key(&election);
            if !seen.insert(key.clone()) {
                report.duplicates += 1;
                continue;
            }
            if resume.get(&key) == Some(&Status::InCore) {
                report.resumed += 1;
                continue;
            }
            batch.push((key, election));
        }
        let results: Vec<Result<CoreVerdict, CoreError>> = if outer_parallel {
            batch
                .par_iter()
                .map(|(_, e)| core_empty(kind, e, &inner))
                .collect()
        } else {
            batch.iter().map(|(_, e)| core_empty(kind, e, &inner)).collect()
        };
        for ((key, election), result) in batch.into_iter().zip(results) {
            let verdict = match result {
                Ok(v) => v,
                Err(CoreError::EnumerationLimitExceeded { what, count, limit: max }) => {
                    if let Some(c) = checkpoint.as_mut() {
                        c.flush()?;
                    }
                    return limit(format!("{what} count {count} exceeds {max}"), report);
                }
                Err(e) => return Err(SearchError::Core(e)),
            };
            report.examined += 1;
            let status = if verdict.is_empty() {
                Status::Empty
            } else {
                Status::InCore
            };
            if let Some(c) = checkpoint.as_mut() {
                if !resume.contains_key(&key) {
                    c.record(&key, status)?;
                }
            }
            if verdict.is_empty() {
                if !reverify(kind, &election, &verdict, &inner) {
                    return Err(SearchError::ReverificationFailed(key));
                }
                let file = match &limits.checkpoint {
                    Some(path) => {
                        let file = counterexample_path(path, report.counterexamples.len() + 1);
                        std::fs::write(&file, election.to_json()).map_err(|e| io_error(&file, e))?;
                        Some(file)
                    }
                    None => None,
                };
                report.counterexamples.push(Counterexample {
                    key,
                    election,
                    verdict,
                    file,
                });
            }
        }
        if let Some(t) = limits.time_limit {
            if started.elapsed() > t && !exhausted {
                if let Some(c) = checkpoint.as_mut() {
                    c.flush()?;
                }
                report.stopped = StopReason::TimeLimit;
                return limit(format!("time limit of {:?} reached", t), report);
            }
        }
    }
    if let Some(c) = checkpoint.as_mut() {
        c.flush()?;
    }
    report.duration = started.elapsed();
    Ok(report)
}

impl SearchReport {
    /// JSON form. The wall-clock duration and file locations are left out so
    /// that equal runs give byte-identical output.
    pub fn to_json(&self) -> Value {
        let counterexamples: Vec<Value> = self
            .counterexamples
            .iter()
            .map(|c| {
                json!({
                    "key": c.key,
                    "election": serde_json::to_value(c.election.to_native()).unwrap_or(Value::Null),
                    "core": json::verdict(self.kind, &c.election, &c.verdict),
                })
            })
            .collect();
        json!({
            "sat": self.kind.name(),
            "family": self.family.name(),
            "seed": self.seed,
            "generated": self.generated,
            "invalid": self.invalid,
            "duplicates": self.duplicates,
            "resumed": self.resumed,
            "examined": self.examined,
            "stopped": self.stopped.name(),
            "counterexamples": counterexamples,
        })
    }
}

impl fmt::Display for SearchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "search sat={} family={} seed={}: {} generated, {} invalid, {} duplicates, {} resumed, {} checked ({})",
            self.kind,
            self.family.name(),
            self.seed,
            self.generated,
            self.invalid,
            self.duplicates,
            self.resumed,
            self.examined,
            self.stopped.name()
        )?;
        writeln!(f, "{} counterexamples", self.counterexamples.len())?;
        for (i, c) in self.counterexamples.iter().enumerate() {
            let costs: Vec<String> = c
                .election
                .projects()
                .iter()
                .map(|p| format!("{}={}", p.id, format_rational(p.cost.as_rational())))
                .collect();
            write!(
                f,
                "  #{} b={} {}",
                i + 1,
                c.election.budget(),
                costs.join(" ")
            )?;
            if let Some(path) = &c.file {
                write!(f, " -> {}", path.display())?;
            }
            writeln!(f)?;
        }
        writeln!(f, "time: {:.3}s", self.duration.as_secs_f64())
    }
}
