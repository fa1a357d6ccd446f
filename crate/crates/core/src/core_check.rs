// SPDX-License-Identifier: Apache-2.0

//! Core membership and core emptiness.
//!
//! An allocation `pi` is blocked when some coalition `N` can afford a set of
//! projects `P` with its proportional share of the budget
//! (`|N| / n >= c(P) / b`) and every member strictly prefers `P` to `pi`.
//!
//! Two reductions keep the search small without changing the answer:
//!
//! * only exhaustive allocations need checking, since a deviation that blocks
//!   an allocation also blocks each of its feasible subsets;
//! * a coalition's deviations only need projects some member approves, since
//!   dropping the others leaves every member's satisfaction unchanged and
//!   lowers the cost.
//!
//! [`CheckMode::Naive`] switches both off and serves as the reference.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;

use crate::instance::{Allocation, Election, ProjectSet, VoterSet};
use crate::satisfaction::{
    sat_compare, sat_set_with_precision, sat_voter, PrecisionPolicy, SatError, SatEvaluator,
    SatKind, SatValue,
};

pub const DEFAULT_MAX_PROJECTS: usize = 20;
pub const DEFAULT_MAX_VOTERS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CheckMode {
    /// Exhaustive allocations only, deviations within the coalition's
    /// approval union.
    #[default]
    Pruned,
    /// Every feasible allocation and every affordable deviation.
    Naive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoreOptions {
    pub mode: CheckMode,
    /// Spread allocations over the current rayon pool.
    pub parallel: bool,
    pub max_projects: usize,
    pub max_voters: usize,
    pub policy: PrecisionPolicy,
}

impl Default for CoreOptions {
    fn default() -> Self {
        CoreOptions {
            mode: CheckMode::Pruned,
            parallel: false,
            max_projects: DEFAULT_MAX_PROJECTS,
            max_voters: DEFAULT_MAX_VOTERS,
            policy: PrecisionPolicy::default(),
        }
    }
}

impl CoreOptions {
    pub fn naive() -> Self {
        CoreOptions {
            mode: CheckMode::Naive,
            ..CoreOptions::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CoreError {
    #[error(transparent)]
    Sat(#[from] SatError),
    #[error("{what} count {count} exceeds the enumeration limit {limit}")]
    EnumerationLimitExceeded {
        what: &'static str,
        count: usize,
        limit: usize,
    },
}

impl CoreError {
    pub fn is_indeterminate(&self) -> bool {
        matches!(self, CoreError::Sat(SatError::IndeterminateComparison { .. }))
    }
}

/// One coalition member's satisfaction before and after deviating.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MemberRecord {
    pub voter: usize,
    pub before: SatValue,
    pub after: SatValue,
}

/// A coalition, the projects it deviates to, and each member's
/// satisfaction under the blocked allocation and under the deviation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockingCertificate {
    pub coalition: VoterSet,
    pub deviation: ProjectSet,
    pub members: Vec<MemberRecord>,
}

impl BlockingCertificate {
    pub fn describe(&self, election: &Election) -> String {
        let members = self
            .members
            .iter()
            .map(|m| {
                format!(
                    "voter {}: {} -> {}",
                    election.voter_id(m.voter),
                    m.before,
                    m.after
                )
            })
            .collect::<Vec<_>>()
            .join("; ");
        format!(
            "N={{{}}} P={{{}}} cost {} <= share {}; {}",
            election.voter_ids_of(self.coalition).join(","),
            election.project_ids(self.deviation).join(","),
            election.total_cost(self.deviation),
            election.budget_share(self.coalition.len()),
            members
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoreVerdict {
    InCore(Allocation),
    /// Every checked allocation with the first certificate found against it,
    /// keyed (and ordered) by allocation bitmask.
    Empty(BTreeMap<Allocation, BlockingCertificate>),
}

impl CoreVerdict {
    pub fn is_empty(&self) -> bool {
        matches!(self, CoreVerdict::Empty(_))
    }

    pub fn witnesses(&self) -> Option<&BTreeMap<Allocation, BlockingCertificate>> {
        match self {
            CoreVerdict::InCore(_) => None,
            CoreVerdict::Empty(w) => Some(w),
        }
    }
}

/// Why a certificate was rejected.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Rejection {
    #[error("allocation is not a feasible allocation of this election")]
    AllocationInvalid,
    #[error("coalition is empty")]
    EmptyCoalition,
    #[error("coalition names a voter outside the election")]
    UnknownVoter,
    #[error("deviation names a project outside the election")]
    UnknownProject,
    #[error("deviation costs {cost} but the coalition commands only {share}")]
    BudgetShareViolated { cost: String, share: String },
    #[error("voter {voter} does not strictly improve")]
    MemberNotImproved { voter: usize },
    #[error("member records do not match the coalition")]
    MemberRecordMismatch,
    #[error("recorded satisfaction of voter {voter} is wrong")]
    RecordedValueMismatch { voter: usize },
    #[error("could not re-evaluate: {0}")]
    EvaluationFailed(SatError),
}

impl Rejection {
    /// Stable machine-readable reason code.
    pub fn code(&self) -> &'static str {
        match self {
            Rejection::AllocationInvalid => "AllocationInvalid",
            Rejection::EmptyCoalition => "EmptyCoalition",
            Rejection::UnknownVoter => "UnknownVoter",
            Rejection::UnknownProject => "UnknownProject",
            Rejection::BudgetShareViolated { .. } => "BudgetShareViolated",
            Rejection::MemberNotImproved { .. } => "MemberNotImproved",
            Rejection::MemberRecordMismatch => "MemberRecordMismatch",
            Rejection::RecordedValueMismatch { .. } => "RecordedValueMismatch",
            Rejection::EvaluationFailed(_) => "EvaluationFailed",
        }
    }
}

impl fmt::Display for CheckMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckMode::Pruned => f.write_str("pruned"),
            CheckMode::Naive => f.write_str("naive"),
        }
    }
}

/// Searches coalitions in ascending bitmask order and, per coalition,
/// deviations in ascending bitmask order; returns the first certificate.
pub(crate) fn first_blocking(
    ev: &mut SatEvaluator<'_>,
    allocation: ProjectSet,
    mode: CheckMode,
) -> Result<Option<BlockingCertificate>, SatError> {
    let election = ev.election();
    let n = election.num_voters();
    let before: Vec<ProjectSet> = (0..n)
        .map(|i| allocation.intersection(election.approvals(i)))
        .collect();
    let everything = election.all_projects();
    for coalition in VoterSet::all_subsets(n).skip(1) {
        let size = coalition.len();
        let scope = match mode {
            CheckMode::Pruned => coalition
                .iter()
                .fold(ProjectSet::EMPTY, |acc, i| acc.union(election.approvals(i))),
            CheckMode::Naive => everything,
        };
        'deviation: for deviation in scope.subsets().skip(1) {
            if !election.within_budget_share(size, deviation) {
                continue;
            }
            for i in coalition.iter() {
                let after = deviation.intersection(election.approvals(i));
                if ev.compare_sets(after, before[i])? != Ordering::Greater {
                    continue 'deviation;
                }
            }
            let members = coalition
                .iter()
                .map(|i| {
                    Ok(MemberRecord {
                        voter: i,
                        before: ev.value(before[i])?.clone(),
                        after: ev.value(deviation.intersection(election.approvals(i)))?.clone(),
                    })
                })
                .collect::<Result<_, SatError>>()?;
            return Ok(Some(BlockingCertificate {
                coalition,
                deviation,
                members,
            }));
        }
    }
    Ok(None)
}

/// The first blocking certificate against `allocation`, if any.
pub fn find_blocking(
    kind: SatKind,
    election: &Election,
    allocation: &Allocation,
) -> Result<Option<BlockingCertificate>, CoreError> {
    find_blocking_with(kind, election, allocation, &CoreOptions::default())
}

pub fn find_blocking_with(
    kind: SatKind,
    election: &Election,
    allocation: &Allocation,
    options: &CoreOptions,
) -> Result<Option<BlockingCertificate>, CoreError> {
    check_limits(election, options, false)?;
    let mut ev = SatEvaluator::new(kind, election, options.policy);
    Ok(first_blocking(&mut ev, allocation.projects(), options.mode)?)
}

pub fn in_core(kind: SatKind, election: &Election, allocation: &Allocation) -> Result<bool, CoreError> {
    Ok(find_blocking(kind, election, allocation)?.is_none())
}

fn check_limits(election: &Election, options: &CoreOptions, projects: bool) -> Result<(), CoreError> {
    if projects && election.num_projects() > options.max_projects {
        return Err(CoreError::EnumerationLimitExceeded {
            what: "project",
            count: election.num_projects(),
            limit: options.max_projects,
        });
    }
    if election.num_voters() > options.max_voters {
        return Err(CoreError::EnumerationLimitExceeded {
            what: "voter",
            count: election.num_voters(),
            limit: options.max_voters,
        });
    }
    Ok(())
}

const PARALLEL_CHUNK: usize = 64;

/// Decides whether the core is empty: returns the first allocation (in
/// bitmask order) that admits no blocking certificate, or a certificate for
/// every candidate allocation.
pub fn core_empty(
    kind: SatKind,
    election: &Election,
    options: &CoreOptions,
) -> Result<CoreVerdict, CoreError> {
    check_limits(election, options, true)?;
    let candidates: Vec<ProjectSet> = match options.mode {
        CheckMode::Pruned => election.exhaustive_sets().collect(),
        CheckMode::Naive => election.feasible_sets().collect(),
    };
    let mut witnesses = BTreeMap::new();
    if !options.parallel {
        let mut ev = SatEvaluator::new(kind, election, options.policy);
        for set in candidates {
            match first_blocking(&mut ev, set, options.mode)? {
                Some(cert) => {
                    witnesses.insert(Allocation::new(election, set).expect("feasible"), cert);
                }
                None => return Ok(CoreVerdict::InCore(Allocation::new(election, set).expect("feasible"))),
            }
        }
        return Ok(CoreVerdict::Empty(witnesses));
    }
    for chunk in candidates.chunks(PARALLEL_CHUNK * rayon::current_num_threads().max(1)) {
        let results: Vec<Result<Option<BlockingCertificate>, SatError>> = chunk
            .par_iter()
            .map_init(
                || SatEvaluator::new(kind, election, options.policy),
                |ev, &set| first_blocking(ev, set, options.mode),
            )
            .collect();
        for (&set, result) in chunk.iter().zip(results) {
            let allocation = Allocation::new(election, set).expect("feasible");
            match result? {
                Some(cert) => {
                    witnesses.insert(allocation, cert);
                }
                None => return Ok(CoreVerdict::InCore(allocation)),
            }
        }
    }
    Ok(CoreVerdict::Empty(witnesses))
}

/// Re-checks a certificate from scratch: the budget inequality exactly, and
/// both satisfactions of every member by fresh evaluation.
pub fn verify_certificate(
    kind: SatKind,
    election: &Election,
    allocation: &Allocation,
    cert: &BlockingCertificate,
    policy: &PrecisionPolicy,
) -> Result<(), Rejection> {
    let pi = allocation.projects();
    if !pi.is_subset(election.all_projects()) || !election.is_feasible(pi) {
        return Err(Rejection::AllocationInvalid);
    }
    if cert.coalition.is_empty() {
        return Err(Rejection::EmptyCoalition);
    }
    if !cert.coalition.is_subset(election.all_voters()) {
        return Err(Rejection::UnknownVoter);
    }
    if !cert.deviation.is_subset(election.all_projects()) {
        return Err(Rejection::UnknownProject);
    }
    if !election.within_budget_share(cert.coalition.len(), cert.deviation) {
        return Err(Rejection::BudgetShareViolated {
            cost: election.total_cost(cert.deviation).to_string(),
            share: election.budget_share(cert.coalition.len()).to_string(),
        });
    }
    let mut fresh = Vec::with_capacity(cert.coalition.len());
    for voter in cert.coalition.iter() {
        let before = sat_voter(kind, election, voter, pi).map_err(Rejection::EvaluationFailed)?;
        let after = sat_voter(kind, election, voter, cert.deviation)
            .map_err(Rejection::EvaluationFailed)?;
        match sat_compare(&after, &before, policy) {
            Ok(Ordering::Greater) => {}
            Ok(_) => return Err(Rejection::MemberNotImproved { voter }),
            Err(e) => return Err(Rejection::EvaluationFailed(e)),
        }
        fresh.push(voter);
    }
    let recorded: Vec<usize> = cert.members.iter().map(|m| m.voter).collect();
    if recorded != fresh {
        return Err(Rejection::MemberRecordMismatch);
    }
    for m in &cert.members {
        let approvals = election.approvals(m.voter);
        for (value, set) in [(&m.before, pi), (&m.after, cert.deviation)] {
            let bits = value.precision_bits().unwrap_or(policy.initial_bits);
            let expected = sat_set_with_precision(kind, election, set.intersection(approvals), bits)
                .map_err(Rejection::EvaluationFailed)?;
            if *value != expected {
                return Err(Rejection::RecordedValueMismatch { voter: m.voter });
            }
        }
    }
    Ok(())
}

/// Verifies every witness of an `Empty` verdict and that the witnesses cover
/// exactly the exhaustive allocations. Returns the number of certificates
/// checked.
pub fn verify_verdict(
    kind: SatKind,
    election: &Election,
    verdict: &CoreVerdict,
    policy: &PrecisionPolicy,
) -> Result<usize, (Option<Allocation>, Rejection)> {
    let CoreVerdict::Empty(witnesses) = verdict else {
        return Ok(0);
    };
    let mut expected = election.exhaustive_sets();
    for (allocation, cert) in witnesses {
        verify_certificate(kind, election, allocation, cert, policy)
            .map_err(|r| (Some(*allocation), r))?;
        // keys may be a superset (naive mode) but must include each
        // exhaustive allocation
        if election.is_exhaustive(allocation.projects()) {
            match expected.next() {
                Some(set) if set == allocation.projects() => {}
                _ => return Err((Some(*allocation), Rejection::AllocationInvalid)),
            }
        }
    }
    if expected.next().is_some() {
        return Err((None, Rejection::AllocationInvalid));
    }
    Ok(witnesses.len())
}
