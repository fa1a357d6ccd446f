// SPDX-License-Identifier: Apache-2.0

//! Participatory budgeting elections: projects with exact rational costs, a
//! budget limit, and one approval ballot per voter.
//!
//! Subsets of projects (and of voters) are bitmasks over the election's
//! ordering, so every election holds at most 64 projects and 64 voters.
//! Enumeration order is ascending bitmask value throughout the crate.

mod native;
mod pabulib;
mod sets;

use std::collections::HashMap;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Deref};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::rational::format_rational;

pub use native::{NativeElection, NativeProject, NativeVoter};
pub use pabulib::{parse_pabulib, PabulibError};
pub use sets::{ProjectSet, SetIter, VoterSet};

/// Hard cap imposed by the bitmask representation.
pub const MAX_PROJECTS: usize = 64;
pub const MAX_VOTERS: usize = 64;

/// An exact, nonnegative amount of money.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Cost(BigRational);

impl Cost {
    pub fn new(value: BigRational) -> Self {
        Cost(value)
    }

    pub fn zero() -> Self {
        Cost(BigRational::zero())
    }

    pub fn from_integer(value: i64) -> Self {
        Cost(BigRational::from_integer(BigInt::from(value)))
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn into_rational(self) -> BigRational {
        self.0
    }
}

impl Deref for Cost {
    type Target = BigRational;

    fn deref(&self) -> &BigRational {
        &self.0
    }
}

impl From<BigRational> for Cost {
    fn from(value: BigRational) -> Self {
        Cost(value)
    }
}

impl Add for Cost {
    type Output = Cost;

    fn add(self, rhs: Cost) -> Cost {
        Cost(self.0 + rhs.0)
    }
}

impl<'a> Add<&'a Cost> for Cost {
    type Output = Cost;

    fn add(self, rhs: &'a Cost) -> Cost {
        Cost(self.0 + &rhs.0)
    }
}

impl Sum for Cost {
    fn sum<I: Iterator<Item = Cost>>(iter: I) -> Cost {
        iter.fold(Cost::zero(), |acc, c| acc + c)
    }
}

impl<'a> Sum<&'a Cost> for Cost {
    fn sum<I: Iterator<Item = &'a Cost>>(iter: I) -> Cost {
        iter.fold(Cost::zero(), |acc, c| acc + c)
    }
}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(&self.0))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Project {
    pub id: String,
    pub cost: Cost,
}

/// Election data before validation. Field order is preserved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawElection {
    pub budget: BigRational,
    pub projects: Vec<RawProject>,
    pub voters: Vec<RawVoter>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawProject {
    pub id: String,
    pub cost: BigRational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawVoter {
    pub id: String,
    pub approves: Vec<String>,
}

impl RawElection {
    /// Keeps only the first `max_projects` projects and drops approvals of the
    /// removed ones.
    pub fn truncate_projects(&mut self, max_projects: usize) {
        if self.projects.len() <= max_projects {
            return;
        }
        self.projects.truncate(max_projects);
        let kept: std::collections::HashSet<&str> =
            self.projects.iter().map(|p| p.id.as_str()).collect();
        for voter in &mut self.voters {
            voter.approves.retain(|id| kept.contains(id.as_str()));
        }
    }

    pub fn validate(self) -> Result<Election, ValidationErrors> {
        Election::validate(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdKind {
    Project,
    Voter,
}

impl fmt::Display for IdKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IdKind::Project => f.write_str("project"),
            IdKind::Voter => f.write_str("voter"),
        }
    }
}

/// A single violated election invariant.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Violation {
    #[error("project {project:?} has non-positive cost {cost}")]
    NonPositiveCost { project: String, cost: String },
    #[error("budget {budget} is not positive")]
    NonPositiveBudget { budget: String },
    #[error("project {project:?} costs {cost}, more than the budget {budget}")]
    ProjectExceedsBudget {
        project: String,
        cost: String,
        budget: String,
    },
    #[error("voter {voter:?} approves unknown project {project:?}")]
    UnknownApprovedProject { voter: String, project: String },
    #[error("duplicate {kind} id {id:?}")]
    DuplicateId { kind: IdKind, id: String },
    #[error("election has no {0}")]
    EmptyElection(IdKind),
    #[error("{kind} count {count} exceeds the supported maximum of {max}")]
    TooMany {
        kind: IdKind,
        count: usize,
        max: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationErrors(pub Vec<Violation>);

impl fmt::Display for ValidationErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid election:")?;
        for v in &self.0 {
            write!(f, "\n  - {v}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationErrors {}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InstanceError {
    #[error("unknown project {0:?}")]
    UnknownProject(String),
    #[error("unknown voter {0:?}")]
    UnknownVoter(String),
    #[error("allocation costs {cost}, more than the budget {budget}")]
    Infeasible { cost: String, budget: String },
}

/// Integer image of all costs over a common denominator, used when it fits
/// in `u128` (the sum of all costs included).
#[derive(Debug, Clone)]
struct ScaledCosts {
    costs: Vec<u128>,
    budget: u128,
}

impl ScaledCosts {
    fn build(projects: &[Project], budget: &BigRational) -> Option<Self> {
        let mut denom = budget.denom().clone();
        for p in projects {
            denom = denom.lcm(p.cost.denom());
        }
        let scale = |v: &BigRational| -> Option<u128> {
            let scaled = v * BigRational::from_integer(denom.clone());
            debug_assert!(scaled.is_integer());
            scaled.to_integer().to_u128()
        };
        let costs: Vec<u128> = projects
            .iter()
            .map(|p| scale(&p.cost))
            .collect::<Option<_>>()?;
        let budget = scale(budget)?;
        costs
            .iter()
            .try_fold(0u128, |acc, &c| acc.checked_add(c))?;
        Some(ScaledCosts { costs, budget })
    }

    fn total(&self, set: ProjectSet) -> u128 {
        set.iter().map(|i| self.costs[i]).sum()
    }
}

/// A validated, immutable election.
#[derive(Debug, Clone)]
pub struct Election {
    projects: Vec<Project>,
    budget: Cost,
    voters: Vec<String>,
    approvals: Vec<ProjectSet>,
    approver_counts: Vec<u32>,
    project_index: HashMap<String, usize>,
    voter_index: HashMap<String, usize>,
    scaled: Option<ScaledCosts>,
}

impl PartialEq for Election {
    fn eq(&self, other: &Self) -> bool {
        self.projects == other.projects
            && self.budget == other.budget
            && self.voters == other.voters
            && self.approvals == other.approvals
    }
}

impl Eq for Election {}

impl Election {
    /// Checks every invariant and reports all violations at once.
    pub fn validate(raw: RawElection) -> Result<Election, ValidationErrors> {
        let mut violations = Vec::new();
        if raw.projects.is_empty() {
            violations.push(Violation::EmptyElection(IdKind::Project));
        }
        if raw.voters.is_empty() {
            violations.push(Violation::EmptyElection(IdKind::Voter));
        }
        if raw.projects.len() > MAX_PROJECTS {
            violations.push(Violation::TooMany {
                kind: IdKind::Project,
                count: raw.projects.len(),
                max: MAX_PROJECTS,
            });
        }
        if raw.voters.len() > MAX_VOTERS {
            violations.push(Violation::TooMany {
                kind: IdKind::Voter,
                count: raw.voters.len(),
                max: MAX_VOTERS,
            });
        }
        let budget_ok = raw.budget.is_positive();
        if !budget_ok {
            violations.push(Violation::NonPositiveBudget {
                budget: format_rational(&raw.budget),
            });
        }

        let mut project_index = HashMap::with_capacity(raw.projects.len());
        for (i, p) in raw.projects.iter().enumerate() {
            if project_index.insert(p.id.clone(), i).is_some() {
                violations.push(Violation::DuplicateId {
                    kind: IdKind::Project,
                    id: p.id.clone(),
                });
            }
            if !p.cost.is_positive() {
                violations.push(Violation::NonPositiveCost {
                    project: p.id.clone(),
                    cost: format_rational(&p.cost),
                });
            } else if budget_ok && p.cost > raw.budget {
                violations.push(Violation::ProjectExceedsBudget {
                    project: p.id.clone(),
                    cost: format_rational(&p.cost),
                    budget: format_rational(&raw.budget),
                });
            }
        }

        let mut voter_index = HashMap::with_capacity(raw.voters.len());
        let mut approvals = Vec::with_capacity(raw.voters.len());
        for (i, v) in raw.voters.iter().enumerate() {
            if voter_index.insert(v.id.clone(), i).is_some() {
                violations.push(Violation::DuplicateId {
                    kind: IdKind::Voter,
                    id: v.id.clone(),
                });
            }
            let mut ballot = ProjectSet::EMPTY;
            for id in &v.approves {
                match project_index.get(id) {
                    Some(&j) if j < MAX_PROJECTS => ballot = ballot.with(j),
                    Some(_) => {}
                    None => violations.push(Violation::UnknownApprovedProject {
                        voter: v.id.clone(),
                        project: id.clone(),
                    }),
                }
            }
            approvals.push(ballot);
        }

        if !violations.is_empty() {
            return Err(ValidationErrors(violations));
        }

        let projects: Vec<Project> = raw
            .projects
            .into_iter()
            .map(|p| Project {
                id: p.id,
                cost: Cost(p.cost),
            })
            .collect();
        let approver_counts = (0..projects.len())
            .map(|j| approvals.iter().filter(|a| a.contains(j)).count() as u32)
            .collect();
        let scaled = ScaledCosts::build(&projects, &raw.budget);
        Ok(Election {
            projects,
            budget: Cost(raw.budget),
            voters: raw.voters.into_iter().map(|v| v.id).collect(),
            approvals,
            approver_counts,
            project_index,
            voter_index,
            scaled,
        })
    }

    /// Unit-cost election: every project costs 1 and the budget is an
    /// integer. Projects are named `p1..pm`, voters `1..n`; ballots list
    /// project indices.
    pub fn unit_cost(
        num_projects: usize,
        budget: u64,
        ballots: &[Vec<usize>],
    ) -> Result<Election, ValidationErrors> {
        let projects = (0..num_projects)
            .map(|j| RawProject {
                id: format!("p{}", j + 1),
                cost: BigRational::one(),
            })
            .collect();
        let voters = ballots
            .iter()
            .enumerate()
            .map(|(i, ballot)| RawVoter {
                id: (i + 1).to_string(),
                approves: ballot.iter().map(|j| format!("p{}", j + 1)).collect(),
            })
            .collect();
        Election::validate(RawElection {
            budget: BigRational::from_integer(BigInt::from(budget)),
            projects,
            voters,
        })
    }

    pub fn to_raw(&self) -> RawElection {
        RawElection {
            budget: self.budget.0.clone(),
            projects: self
                .projects
                .iter()
                .map(|p| RawProject {
                    id: p.id.clone(),
                    cost: p.cost.0.clone(),
                })
                .collect(),
            voters: self
                .voters
                .iter()
                .zip(&self.approvals)
                .map(|(id, ballot)| RawVoter {
                    id: id.clone(),
                    approves: self.project_ids(*ballot),
                })
                .collect(),
        }
    }

    pub fn projects(&self) -> &[Project] {
        &self.projects
    }

    pub fn project(&self, index: usize) -> &Project {
        &self.projects[index]
    }

    pub fn num_projects(&self) -> usize {
        self.projects.len()
    }

    pub fn num_voters(&self) -> usize {
        self.voters.len()
    }

    pub fn budget(&self) -> &Cost {
        &self.budget
    }

    pub fn voter_ids(&self) -> &[String] {
        &self.voters
    }

    pub fn voter_id(&self, index: usize) -> &str {
        &self.voters[index]
    }

    /// Approval ballot of voter `index`.
    pub fn approvals(&self, index: usize) -> ProjectSet {
        self.approvals[index]
    }

    pub fn ballots(&self) -> &[ProjectSet] {
        &self.approvals
    }

    /// Number of voters approving project `index` (over the whole electorate).
    pub fn approver_count(&self, index: usize) -> u32 {
        self.approver_counts[index]
    }

    pub fn all_projects(&self) -> ProjectSet {
        ProjectSet::full(self.projects.len())
    }

    pub fn all_voters(&self) -> VoterSet {
        VoterSet::full(self.voters.len())
    }

    pub fn project_index(&self, id: &str) -> Result<usize, InstanceError> {
        self.project_index
            .get(id)
            .copied()
            .ok_or_else(|| InstanceError::UnknownProject(id.to_string()))
    }

    pub fn voter_index(&self, id: &str) -> Result<usize, InstanceError> {
        self.voter_index
            .get(id)
            .copied()
            .ok_or_else(|| InstanceError::UnknownVoter(id.to_string()))
    }

    /// Resolves project ids to a set.
    pub fn project_set<S: AsRef<str>>(&self, ids: &[S]) -> Result<ProjectSet, InstanceError> {
        ids.iter().try_fold(ProjectSet::EMPTY, |set, id| {
            Ok(set.with(self.project_index(id.as_ref())?))
        })
    }

    pub fn voter_set<S: AsRef<str>>(&self, ids: &[S]) -> Result<VoterSet, InstanceError> {
        ids.iter().try_fold(VoterSet::EMPTY, |set, id| {
            Ok(set.with(self.voter_index(id.as_ref())?))
        })
    }

    pub fn project_ids(&self, set: ProjectSet) -> Vec<String> {
        set.iter().map(|j| self.projects[j].id.clone()).collect()
    }

    pub fn voter_ids_of(&self, set: VoterSet) -> Vec<String> {
        set.iter().map(|i| self.voters[i].clone()).collect()
    }

    /// Exact total cost of a set of projects.
    pub fn total_cost(&self, set: ProjectSet) -> Cost {
        debug_assert!(set.is_subset(self.all_projects()));
        set.iter().map(|j| &self.projects[j].cost).sum()
    }

    pub fn total_cost_of<S: AsRef<str>>(&self, ids: &[S]) -> Result<Cost, InstanceError> {
        Ok(self.total_cost(self.project_set(ids)?))
    }

    pub fn is_feasible(&self, set: ProjectSet) -> bool {
        match &self.scaled {
            Some(s) => s.total(set) <= s.budget,
            None => self.total_cost(set) <= self.budget,
        }
    }

    /// Feasible, and no single project outside the set still fits.
    pub fn is_exhaustive(&self, set: ProjectSet) -> bool {
        let outside = self.all_projects().difference(set);
        match &self.scaled {
            Some(s) => {
                let total = s.total(set);
                total <= s.budget && outside.iter().all(|j| total + s.costs[j] > s.budget)
            }
            None => {
                let total = self.total_cost(set);
                total <= self.budget
                    && outside
                        .iter()
                        .all(|j| total.clone() + &self.projects[j].cost > self.budget)
            }
        }
    }

    /// `b * size / n`: the most a coalition of `size` voters may spend.
    pub fn budget_share(&self, coalition_size: usize) -> Cost {
        Cost(
            &self.budget.0 * BigRational::from_integer(BigInt::from(coalition_size))
                / BigRational::from_integer(BigInt::from(self.voters.len())),
        )
    }

    /// Exact test of `|N| / n >= c(P) / b`, evaluated as `b*|N| >= n*c(P)`.
    pub fn within_budget_share(&self, coalition_size: usize, deviation: ProjectSet) -> bool {
        let n = self.voters.len() as u128;
        let size = coalition_size as u128;
        if let Some(s) = &self.scaled {
            if let (Some(lhs), Some(rhs)) = (
                s.budget.checked_mul(size),
                s.total(deviation).checked_mul(n),
            ) {
                return lhs >= rhs;
            }
        }
        let lhs = &self.budget.0 * BigRational::from_integer(BigInt::from(coalition_size));
        let rhs = self.total_cost(deviation).0 * BigRational::from_integer(BigInt::from(n));
        lhs >= rhs
    }

    /// Every feasible subset, ascending by bitmask.
    pub fn feasible_sets(&self) -> impl Iterator<Item = ProjectSet> + '_ {
        ProjectSet::all_subsets(self.projects.len()).filter(move |&s| self.is_feasible(s))
    }

    /// Every exhaustive subset, ascending by bitmask.
    pub fn exhaustive_sets(&self) -> impl Iterator<Item = ProjectSet> + '_ {
        ProjectSet::all_subsets(self.projects.len()).filter(move |&s| self.is_exhaustive(s))
    }

    pub fn enumerate_feasible(&self) -> impl Iterator<Item = Allocation> + '_ {
        self.feasible_sets().map(Allocation)
    }

    pub fn enumerate_exhaustive(&self) -> impl Iterator<Item = Allocation> + '_ {
        self.exhaustive_sets().map(Allocation)
    }

    /// Same election with relabelled order: `voter_order[k]` is the old index
    /// of the new k-th voter, likewise for projects.
    pub fn permuted(&self, voter_order: &[usize], project_order: &[usize]) -> Election {
        let raw = self.to_raw();
        let projects = project_order.iter().map(|&j| raw.projects[j].clone()).collect();
        let voters = voter_order.iter().map(|&i| raw.voters[i].clone()).collect();
        Election::validate(RawElection {
            budget: raw.budget,
            projects,
            voters,
        })
        .expect("a permutation of a valid election is valid")
    }
}

impl fmt::Display for Election {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "budget {} | {} projects | {} voters",
            self.budget,
            self.projects.len(),
            self.voters.len()
        )?;
        for p in &self.projects {
            writeln!(f, "  {:<8} cost {}", p.id, p.cost)?;
        }
        for (id, ballot) in self.voters.iter().zip(&self.approvals) {
            writeln!(f, "  voter {:<4} approves {{{}}}", id, self.project_ids(*ballot).join(", "))?;
        }
        Ok(())
    }
}

/// A feasible set of projects, checked against its election at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Allocation(ProjectSet);

impl Allocation {
    pub fn new(election: &Election, set: ProjectSet) -> Result<Allocation, InstanceError> {
        if let Some(j) = set.iter().find(|&j| j >= election.num_projects()) {
            return Err(InstanceError::UnknownProject(format!("#{j}")));
        }
        if !election.is_feasible(set) {
            return Err(InstanceError::Infeasible {
                cost: election.total_cost(set).to_string(),
                budget: election.budget().to_string(),
            });
        }
        Ok(Allocation(set))
    }

    pub fn from_ids<S: AsRef<str>>(
        election: &Election,
        ids: &[S],
    ) -> Result<Allocation, InstanceError> {
        Allocation::new(election, election.project_set(ids)?)
    }

    pub fn projects(&self) -> ProjectSet {
        self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, ratio};
    use crate::theorems::build_thm1;

    fn raw(budget: i64, projects: &[(&str, i64)], voters: &[(&str, &[&str])]) -> RawElection {
        RawElection {
            budget: rat(budget),
            projects: projects
                .iter()
                .map(|(id, c)| RawProject {
                    id: id.to_string(),
                    cost: rat(*c),
                })
                .collect(),
            voters: voters
                .iter()
                .map(|(id, a)| RawVoter {
                    id: id.to_string(),
                    approves: a.iter().map(|s| s.to_string()).collect(),
                })
                .collect(),
        }
    }

    #[test]
    fn rejects_project_over_budget() {
        let err = raw(15, &[("p", 16)], &[("1", &["p"])]).validate().unwrap_err();
        assert!(matches!(err.0[..], [Violation::ProjectExceedsBudget { .. }]));
    }

    #[test]
    fn rejects_unknown_approval() {
        let err = raw(15, &[("p", 1)], &[("1", &["x"])]).validate().unwrap_err();
        assert_eq!(
            err.0,
            vec![Violation::UnknownApprovedProject {
                voter: "1".into(),
                project: "x".into()
            }]
        );
    }

    #[test]
    fn reports_every_violation() {
        let mut r = raw(5, &[("a", 0), ("a", 9)], &[("1", &["zz"]), ("1", &[])]);
        r.projects[0].cost = ratio(-1, 2);
        let err = r.validate().unwrap_err();
        assert_eq!(err.0.len(), 5, "{err}");
        assert!(err.0.contains(&Violation::DuplicateId {
            kind: IdKind::Project,
            id: "a".into()
        }));
        assert!(err.0.contains(&Violation::DuplicateId {
            kind: IdKind::Voter,
            id: "1".into()
        }));
        assert!(err.0.iter().any(|v| matches!(v, Violation::NonPositiveCost { .. })));

        let empty = raw(5, &[], &[]).validate().unwrap_err();
        assert_eq!(
            empty.0,
            vec![
                Violation::EmptyElection(IdKind::Project),
                Violation::EmptyElection(IdKind::Voter)
            ]
        );
    }

    #[test]
    fn thm1_costs() {
        let e = build_thm1();
        assert_eq!(e.total_cost_of(&["p12", "l3"]).unwrap(), Cost::from_integer(13));
        assert_eq!(e.total_cost(ProjectSet::EMPTY), Cost::zero());
        assert!(matches!(
            e.total_cost_of(&["nope"]),
            Err(InstanceError::UnknownProject(_))
        ));
        let full = e.project_set(&["p12", "l3", "s1"]).unwrap();
        assert!(e.is_feasible(full) && e.is_exhaustive(full));
        let over = e.project_set(&["p12", "p13"]).unwrap();
        assert!(!e.is_feasible(over));
        assert!(e.is_feasible(ProjectSet::EMPTY) && !e.is_exhaustive(ProjectSet::EMPTY));
        assert!(Allocation::new(&e, over).is_err());
    }

    #[test]
    fn tiny_enumerations() {
        let e = raw(1, &[("a", 1), ("b", 1)], &[("1", &["a"])]).validate().unwrap();
        let feasible: Vec<_> = e.feasible_sets().map(|s| e.project_ids(s)).collect();
        assert_eq!(feasible, vec![vec![], vec!["a".to_string()], vec!["b".to_string()]]);
        let exhaustive: Vec<_> = e.exhaustive_sets().map(|s| e.project_ids(s)).collect();
        assert_eq!(exhaustive, vec![vec!["a".to_string()], vec!["b".to_string()]]);

        let single = raw(7, &[("p", 7)], &[("1", &["p"])]).validate().unwrap();
        assert_eq!(single.feasible_sets().count(), 2);
        assert_eq!(single.exhaustive_sets().collect::<Vec<_>>(), vec![ProjectSet::full(1)]);
    }

    #[test]
    fn budget_share_is_exact() {
        let e = build_thm1();
        assert_eq!(e.budget_share(2), Cost::from_integer(10));
        assert_eq!(e.budget_share(3), *e.budget());
        assert_eq!(*e.budget_share(1), rat(5));
        let p12 = e.project_set(&["p12"]).unwrap();
        assert!(e.within_budget_share(2, p12));
        assert!(!e.within_budget_share(1, p12));
    }

    #[test]
    fn unit_cost_constructor() {
        let e = Election::unit_cost(2, 2, &[vec![0], vec![1]]).unwrap();
        assert_eq!(e.budget(), &Cost::from_integer(2));
        assert!(e.projects().iter().all(|p| p.cost == Cost::from_integer(1)));
        assert_eq!(e.approvals(1), ProjectSet::EMPTY.with(1));
    }

    #[test]
    fn rational_fallback_agrees() {
        // denominators too large for the u128 fast path
        let big = BigRational::new(BigInt::one(), BigInt::from(3u8).pow(90));
        let r = RawElection {
            budget: rat(2),
            projects: vec![
                RawProject { id: "a".into(), cost: rat(1) + &big },
                RawProject { id: "b".into(), cost: rat(1) - &big },
                RawProject { id: "c".into(), cost: big.clone() },
            ],
            voters: vec![RawVoter { id: "1".into(), approves: vec!["a".into()] }],
        };
        let e = r.validate().unwrap();
        assert!(e.scaled.is_none());
        let exhaustive: Vec<_> = e.exhaustive_sets().map(|s| e.project_ids(s)).collect();
        assert_eq!(exhaustive, vec![vec!["a", "b"], vec!["a", "c"], vec!["b", "c"]]);
        assert!(!e.is_feasible(e.all_projects()));
    }
}
