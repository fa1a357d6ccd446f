// SPDX-License-Identifier: Apache-2.0

//! Approval-based satisfaction functions.
//!
//! A satisfaction function maps a set of projects to a nonnegative real; a
//! voter's satisfaction with an allocation is the function applied to the
//! funded projects they approve. Cost, cardinality, Chamberlin-Courant and
//! share are rational and evaluated exactly. The log and square-root kinds
//! are evaluated as sound enclosures that are refined on demand until a
//! comparison is decided.

mod conditions;
mod interval;

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::instance::{Election, InstanceError, ProjectSet};
use crate::rational::format_rational;

pub use conditions::{
    check_condition1, check_condition2, check_condition3, check_condition4, ConditionOutcome,
    ConditionWitness, Sampling, EXHAUSTIVE_LIMIT,
};
pub use interval::{Enclosure, IrrationalExpr};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SatKind {
    Cost,
    Cardinality,
    ChamberlinCourant,
    Share,
    SumLog,
    SumSqrt,
    GlobalLog,
    GlobalSqrt,
}

impl SatKind {
    pub const ALL: [SatKind; 8] = [
        SatKind::Cost,
        SatKind::Cardinality,
        SatKind::ChamberlinCourant,
        SatKind::Share,
        SatKind::SumLog,
        SatKind::SumSqrt,
        SatKind::GlobalLog,
        SatKind::GlobalSqrt,
    ];

    /// Short name used on the command line.
    pub fn name(self) -> &'static str {
        match self {
            SatKind::Cost => "cost",
            SatKind::Cardinality => "card",
            SatKind::ChamberlinCourant => "cc",
            SatKind::Share => "share",
            SatKind::SumLog => "sumlog",
            SatKind::SumSqrt => "sumsqrt",
            SatKind::GlobalLog => "log",
            SatKind::GlobalSqrt => "sqrt",
        }
    }

    /// Whether values of this kind are always exact rationals.
    pub fn is_exact(self) -> bool {
        matches!(
            self,
            SatKind::Cost | SatKind::Cardinality | SatKind::ChamberlinCourant | SatKind::Share
        )
    }
}

impl fmt::Display for SatKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown satisfaction function {0:?} (expected one of cost, card, cc, share, sumlog, sumsqrt, log, sqrt)")]
pub struct UnknownSatKind(pub String);

impl FromStr for SatKind {
    type Err = UnknownSatKind;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        SatKind::ALL
            .into_iter()
            .find(|k| k.name() == lower)
            .ok_or_else(|| UnknownSatKind(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SatError {
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error("project {0:?} has no approvers, its share is undefined")]
    ShareOfUnapprovedProject(String),
    #[error("comparison undecided at {bits} bits of precision")]
    IndeterminateComparison { bits: u32 },
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
}

/// Precision schedule for deciding comparisons between enclosures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrecisionPolicy {
    pub initial_bits: u32,
    pub max_bits: u32,
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        PrecisionPolicy {
            initial_bits: 64,
            max_bits: 4096,
        }
    }
}

/// An exact satisfaction value or a sound enclosure of one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatValue {
    Exact(BigRational),
    Interval(Enclosure),
}

impl SatValue {
    pub fn zero() -> Self {
        SatValue::Exact(BigRational::zero())
    }

    pub fn lo(&self) -> &BigRational {
        match self {
            SatValue::Exact(v) => v,
            SatValue::Interval(e) => e.lo(),
        }
    }

    pub fn hi(&self) -> &BigRational {
        match self {
            SatValue::Exact(v) => v,
            SatValue::Interval(e) => e.hi(),
        }
    }

    pub fn precision_bits(&self) -> Option<u32> {
        match self {
            SatValue::Exact(_) => None,
            SatValue::Interval(e) => Some(e.precision_bits()),
        }
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            SatValue::Exact(v) => Some(v),
            SatValue::Interval(_) => None,
        }
    }

    pub fn refined(&self, bits: u32) -> SatValue {
        match self {
            SatValue::Exact(_) => self.clone(),
            SatValue::Interval(e) => SatValue::Interval(e.refine(bits)),
        }
    }
}

impl fmt::Display for SatValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SatValue::Exact(v) => f.write_str(&format_rational(v)),
            SatValue::Interval(e) => write!(
                f,
                "[{:.9}, {:.9}]@{}",
                crate::rational::to_f64(e.lo()),
                crate::rational::to_f64(e.hi()),
                e.precision_bits()
            ),
        }
    }
}

fn rational_from(n: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn evaluate(
    kind: SatKind,
    election: &Election,
    set: ProjectSet,
    bits: u32,
) -> Result<SatValue, SatError> {
    if set.is_empty() {
        return Ok(SatValue::zero());
    }
    if let Some(j) = set.iter().find(|&j| j >= election.num_projects()) {
        return Err(InstanceError::UnknownProject(format!("#{j}")).into());
    }
    let costs = || set.iter().map(|j| election.project(j).cost.as_rational().clone());
    let total = || costs().fold(BigRational::zero(), |acc, c| acc + c);
    Ok(match kind {
        SatKind::Cost => SatValue::Exact(total()),
        SatKind::Cardinality => SatValue::Exact(rational_from(set.len())),
        SatKind::ChamberlinCourant => SatValue::Exact(BigRational::one()),
        SatKind::Share => {
            let mut sum = BigRational::zero();
            for j in set.iter() {
                let approvers = election.approver_count(j);
                if approvers == 0 {
                    return Err(SatError::ShareOfUnapprovedProject(
                        election.project(j).id.clone(),
                    ));
                }
                sum += election.project(j).cost.as_rational() / rational_from(approvers as usize);
            }
            SatValue::Exact(sum)
        }
        SatKind::SumLog => SatValue::Interval(Enclosure::new(
            IrrationalExpr::sum_ln1p(costs().collect()),
            bits,
        )),
        SatKind::SumSqrt => SatValue::Interval(Enclosure::new(
            IrrationalExpr::sum_sqrt(costs().collect()),
            bits,
        )),
        SatKind::GlobalLog => {
            SatValue::Interval(Enclosure::new(IrrationalExpr::Ln1p(total()), bits))
        }
        SatKind::GlobalSqrt => {
            SatValue::Interval(Enclosure::new(IrrationalExpr::Sqrt(total()), bits))
        }
    })
}

/// Satisfaction of a set of projects, at the default starting precision.
pub fn sat_set(kind: SatKind, election: &Election, set: ProjectSet) -> Result<SatValue, SatError> {
    evaluate(kind, election, set, PrecisionPolicy::default().initial_bits)
}

/// [`sat_set`] at an explicit precision (ignored by exact kinds).
pub fn sat_set_with_precision(
    kind: SatKind,
    election: &Election,
    set: ProjectSet,
    bits: u32,
) -> Result<SatValue, SatError> {
    evaluate(kind, election, set, bits)
}

pub fn sat_set_ids<S: AsRef<str>>(
    kind: SatKind,
    election: &Election,
    ids: &[S],
) -> Result<SatValue, SatError> {
    sat_set(kind, election, election.project_set(ids)?)
}

/// Satisfaction of voter `voter` (by index) with the projects `pi`: the
/// function applied to `pi` intersected with the voter's ballot. Share uses
/// approval counts over the whole electorate.
pub fn sat_voter(
    kind: SatKind,
    election: &Election,
    voter: usize,
    pi: ProjectSet,
) -> Result<SatValue, SatError> {
    if voter >= election.num_voters() {
        return Err(InstanceError::UnknownVoter(format!("#{voter}")).into());
    }
    sat_set(kind, election, pi.intersection(election.approvals(voter)))
}

pub fn sat_voter_ids<S: AsRef<str>>(
    kind: SatKind,
    election: &Election,
    voter: &str,
    pi: &[S],
) -> Result<SatValue, SatError> {
    let voter = election.voter_index(voter)?;
    sat_voter(kind, election, voter, election.project_set(pi)?)
}

fn same_real(a: &SatValue, b: &SatValue) -> bool {
    match (a, b) {
        (SatValue::Interval(x), SatValue::Interval(y)) => {
            x.expr() == y.expr() || x.expr().identity() == y.expr().identity()
        }
        _ => false,
    }
}

/// Sound three-way comparison. Enclosures are refined at doubling precision
/// until they separate; values with the same defining terms compare equal
/// without refinement.
pub fn sat_compare(
    a: &SatValue,
    b: &SatValue,
    policy: &PrecisionPolicy,
) -> Result<Ordering, SatError> {
    if let (SatValue::Exact(x), SatValue::Exact(y)) = (a, b) {
        return Ok(x.cmp(y));
    }
    if same_real(a, b) {
        return Ok(Ordering::Equal);
    }
    let mut a = a.clone();
    let mut b = b.clone();
    loop {
        if a.hi() < b.lo() {
            return Ok(Ordering::Less);
        }
        if a.lo() > b.hi() {
            return Ok(Ordering::Greater);
        }
        if a.lo() == a.hi() && b.lo() == b.hi() {
            // both are points and they overlap
            return Ok(Ordering::Equal);
        }
        let bits = a
            .precision_bits()
            .into_iter()
            .chain(b.precision_bits())
            .max()
            .unwrap_or(policy.initial_bits);
        if bits >= policy.max_bits {
            return Err(SatError::IndeterminateComparison { bits });
        }
        let next = (bits.max(policy.initial_bits / 2) * 2).min(policy.max_bits);
        a = a.refined(next);
        b = b.refined(next);
    }
}

/// Memoising evaluator over one election and one satisfaction function.
///
/// Not shared between threads; parallel callers create one per worker.
pub struct SatEvaluator<'e> {
    election: &'e Election,
    kind: SatKind,
    policy: PrecisionPolicy,
    cache: HashMap<ProjectSet, SatValue>,
}

impl<'e> SatEvaluator<'e> {
    pub fn new(kind: SatKind, election: &'e Election, policy: PrecisionPolicy) -> Self {
        SatEvaluator {
            election,
            kind,
            policy,
            cache: HashMap::new(),
        }
    }

    pub fn kind(&self) -> SatKind {
        self.kind
    }

    pub fn election(&self) -> &'e Election {
        self.election
    }

    pub fn policy(&self) -> &PrecisionPolicy {
        &self.policy
    }

    pub fn value(&mut self, set: ProjectSet) -> Result<&SatValue, SatError> {
        if !self.cache.contains_key(&set) {
            let v = evaluate(self.kind, self.election, set, self.policy.initial_bits)?;
            self.cache.insert(set, v);
        }
        Ok(&self.cache[&set])
    }

    pub fn voter_value(&mut self, voter: usize, pi: ProjectSet) -> Result<SatValue, SatError> {
        let set = pi.intersection(self.election.approvals(voter));
        self.value(set).cloned()
    }

    pub fn compare_sets(&mut self, a: ProjectSet, b: ProjectSet) -> Result<Ordering, SatError> {
        if a == b {
            return Ok(Ordering::Equal);
        }
        self.value(a)?;
        self.value(b)?;
        sat_compare(&self.cache[&a], &self.cache[&b], &self.policy)
    }
}
