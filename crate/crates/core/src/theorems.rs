// SPDX-License-Identifier: Apache-2.0

//! The three-voter counterexamples and their end-to-end verification.
//!
//! All three instances are 3-voter gadgets (see [`crate::search::gadget`]):
//!
//! * cost satisfaction, b = 15, joint/large/small costs 8/5/2;
//! * any satisfaction meeting conditions 1 to 4, b and eps free, costs
//!   `2b/3 - eps`, `b/3`, `eps`;
//! * share satisfaction, b = 21, costs 11/3/2.
//!
//! Besides running the core check, verification rebuilds the hand-made
//! blocking argument for every feasible allocation (see
//! [`case_certificate`]) and re-checks it independently.

use std::collections::BTreeMap;
use std::fmt;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use serde_json::{json, Value};

use crate::core_check::{
    core_empty, verify_certificate, verify_verdict, BlockingCertificate, CoreError, CoreOptions,
    CoreVerdict, MemberRecord, Rejection,
};
use crate::instance::{Allocation, Election, ProjectSet, ValidationErrors, VoterSet};
use crate::json;
use crate::rational::{format_rational, to_f64};
use crate::satisfaction::{
    check_condition1, check_condition2, check_condition3, check_condition4, sat_voter,
    ConditionOutcome, ConditionWitness, PrecisionPolicy, SatError, SatKind, Sampling,
};
use crate::search::gadget::gadget_raw;

fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// b = 15; joint projects cost 8, large 5, small 2.
pub fn build_thm1() -> Election {
    gadget_raw(3, &int(8), &int(5), &int(2), &int(15))
        .validate()
        .expect("fixed instance is valid")
}

/// Joint projects cost `2b/3 - eps`, large `b/3`, small `eps`. Fails
/// validation when a cost is not positive or exceeds `b`.
pub fn build_thm2(budget: &BigRational, eps: &BigRational) -> Result<Election, ValidationErrors> {
    let third = budget / int(3);
    let joint = &third * int(2) - eps;
    gadget_raw(3, &joint, &third, eps, budget).validate()
}

/// b = 21; joint projects cost 11, large 3, small 2.
pub fn build_thm3() -> Election {
    gadget_raw(3, &int(11), &int(3), &int(2), &int(21))
        .validate()
        .expect("fixed instance is valid")
}

/// Which satisfaction function and instance parameters a theorem uses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TheoremParams {
    pub kind: SatKind,
    pub budget: BigRational,
    pub eps: Option<BigRational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionResult {
    pub condition: u8,
    /// `None` when the condition could not be evaluated.
    pub holds: Option<bool>,
    pub detail: String,
    pub witness: Option<ConditionWitness>,
}

/// Shape of a blocking certificate against a 3-voter gadget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum WitnessFamily {
    /// A pair deviates to its joint project.
    JointForPair,
    /// A voter deviates alone to its large project.
    LargeAlone,
    /// A pair deviates to its joint project plus one member's small project.
    JointPlusSmall,
    /// A voter deviates alone to both personal projects.
    PersonalPair,
    /// A pair deviates to its joint project plus one member's large project.
    JointPlusLarge,
    Other,
}

impl WitnessFamily {
    pub fn name(self) -> &'static str {
        match self {
            WitnessFamily::JointForPair => "joint-for-pair",
            WitnessFamily::LargeAlone => "large-alone",
            WitnessFamily::JointPlusSmall => "joint-plus-small",
            WitnessFamily::PersonalPair => "personal-pair",
            WitnessFamily::JointPlusLarge => "joint-plus-large",
            WitnessFamily::Other => "other",
        }
    }
}

/// Outcome of re-checking the hand-made blocking argument on every feasible
/// allocation.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CaseCheck {
    pub verified: usize,
    pub failed: Vec<(Allocation, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TheoremReport {
    pub theorem: u8,
    pub params: TheoremParams,
    pub conditions: Vec<ConditionResult>,
    pub election: Option<Election>,
    /// Present iff every condition held.
    pub verdict: Option<CoreVerdict>,
    pub certificates_verified: usize,
    pub families: BTreeMap<WitnessFamily, usize>,
    /// Witnesses whose shape equals that of the hand-made certificate for
    /// the same allocation.
    pub matching_case: usize,
    pub cases: Option<CaseCheck>,
    pub notes: Vec<String>,
    pub duration: Duration,
}

#[derive(Debug, thiserror::Error)]
pub enum TheoremError {
    #[error("condition {condition} fails")]
    ConditionFailed {
        condition: u8,
        report: Box<TheoremReport>,
    },
    #[error("no theorem {0}; expected 1, 2 or 3")]
    UnknownTheorem(u8),
    #[error("theorem 2 needs a satisfaction kind, b and eps")]
    MissingParameters,
    #[error("theorem {0} has fixed parameters")]
    FixedParameters(u8),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("emitted certificate for {{{allocation}}} rejected: {reason}")]
    CertificateRejected { allocation: String, reason: Rejection },
}

impl From<SatError> for TheoremError {
    fn from(e: SatError) -> Self {
        TheoremError::Core(CoreError::Sat(e))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Role {
    Joint(usize, usize),
    Large(usize),
    Small(usize),
}

/// Project roles of a 3-voter gadget, 0-based voter indices.
fn roles(election: &Election) -> Option<Vec<Role>> {
    let mut out = Vec::with_capacity(election.num_projects());
    for p in election.projects() {
        let mut chars = p.id.chars();
        let head = chars.next()?;
        let digits: Vec<usize> = chars
            .map(|c| c.to_digit(10).map(|d| d as usize))
            .collect::<Option<_>>()?;
        let role = match (head, digits.as_slice()) {
            ('p', [i, j]) if i < j && *j <= 3 && *i >= 1 => Role::Joint(i - 1, j - 1),
            ('l', [i]) if (1..=3).contains(i) => Role::Large(i - 1),
            ('s', [i]) if (1..=3).contains(i) => Role::Small(i - 1),
            _ => return None,
        };
        out.push(role);
    }
    (election.num_voters() == 3).then_some(out)
}

/// Classifies a certificate against a 3-voter gadget by the shape of its
/// coalition and deviation.
pub fn classify_witness(election: &Election, cert: &BlockingCertificate) -> WitnessFamily {
    let Some(roles) = roles(election) else {
        return WitnessFamily::Other;
    };
    let members: Vec<usize> = cert.coalition.iter().collect();
    let mut dev: Vec<Role> = cert.deviation.iter().map(|p| roles[p]).collect();
    dev.sort_by_key(|r| match r {
        Role::Joint(..) => 0,
        Role::Large(_) => 1,
        Role::Small(_) => 2,
    });
    match (members.as_slice(), dev.as_slice()) {
        ([a, b], [Role::Joint(i, j)]) if (*a, *b) == (*i, *j) => WitnessFamily::JointForPair,
        ([t], [Role::Large(u)]) if t == u => WitnessFamily::LargeAlone,
        ([a, b], [Role::Joint(i, j), Role::Small(u)]) if (*a, *b) == (*i, *j) && (u == a || u == b) => {
            WitnessFamily::JointPlusSmall
        }
        ([t], [Role::Large(u), Role::Small(v)]) if t == u && t == v => WitnessFamily::PersonalPair,
        ([a, b], [Role::Joint(i, j), Role::Large(u)]) if (*a, *b) == (*i, *j) && (u == a || u == b) => {
            WitnessFamily::JointPlusLarge
        }
        _ => WitnessFamily::Other,
    }
}

/// Which hand-made argument to rebuild.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseArgument {
    /// The cost and conditions 1 to 4 argument: a pair to its joint
    /// project, a voter alone to its large project, or a pair to a joint
    /// project plus a small one.
    SmallCompletion,
    /// The share argument: a pair to its joint project, a voter alone to
    /// both personal projects, or a pair to a joint project plus a large
    /// one.
    LargeCompletion,
}

/// Builds the certificate the hand-made argument prescribes for a feasible
/// gadget allocation, or `None` if the allocation falls outside every case
/// (or the election is not a 3-voter gadget).
pub fn case_certificate(
    kind: SatKind,
    election: &Election,
    allocation: &Allocation,
    argument: CaseArgument,
) -> Result<Option<BlockingCertificate>, SatError> {
    let Some(roles) = roles(election) else {
        return Ok(None);
    };
    let pi = allocation.projects();
    let find = |want: Role| roles.iter().position(|r| *r == want);
    let joints: Vec<(usize, usize)> = pi
        .iter()
        .filter_map(|p| match roles[p] {
            Role::Joint(i, j) => Some((i, j)),
            _ => None,
        })
        .collect();
    let joint = |a: usize, b: usize| find(Role::Joint(a.min(b), a.max(b)));
    let (coalition, deviation): (Vec<usize>, Vec<Option<usize>>) = match joints.as_slice() {
        [] => (vec![0, 1], vec![joint(0, 1)]),
        [(j, k)] => {
            let t = 3 - j - k;
            let has = |r: Role| find(r).is_some_and(|p| pi.contains(p));
            match argument {
                CaseArgument::SmallCompletion => {
                    if !has(Role::Large(t)) {
                        (vec![t], vec![find(Role::Large(t))])
                    } else {
                        let Some(u) = [*j, *k].into_iter().find(|&u| !has(Role::Small(u))) else {
                            return Ok(None);
                        };
                        (vec![u.min(t), u.max(t)], vec![joint(u, t), find(Role::Small(u))])
                    }
                }
                CaseArgument::LargeCompletion => {
                    if !has(Role::Large(t)) || !has(Role::Small(t)) {
                        (vec![t], vec![find(Role::Large(t)), find(Role::Small(t))])
                    } else {
                        let Some(u) = [*j, *k].into_iter().find(|&u| !has(Role::Large(u))) else {
                            return Ok(None);
                        };
                        (vec![u.min(t), u.max(t)], vec![joint(u, t), find(Role::Large(u))])
                    }
                }
            }
        }
        _ => return Ok(None),
    };
    let Some(deviation) = deviation.into_iter().collect::<Option<Vec<usize>>>() else {
        return Ok(None);
    };
    let deviation: ProjectSet = deviation.into_iter().collect();
    let coalition: VoterSet = coalition.into_iter().collect();
    let members = coalition
        .iter()
        .map(|voter| {
            Ok(MemberRecord {
                voter,
                before: sat_voter(kind, election, voter, pi)?,
                after: sat_voter(kind, election, voter, deviation)?,
            })
        })
        .collect::<Result<_, SatError>>()?;
    Ok(Some(BlockingCertificate {
        coalition,
        deviation,
        members,
    }))
}

/// Rebuilds and independently verifies the hand-made certificate for every
/// feasible allocation.
pub fn check_cases(
    kind: SatKind,
    election: &Election,
    argument: CaseArgument,
    policy: &PrecisionPolicy,
) -> Result<CaseCheck, SatError> {
    let mut out = CaseCheck::default();
    for allocation in election.enumerate_feasible() {
        let ids = || election.project_ids(allocation.projects()).join(",");
        match case_certificate(kind, election, &allocation, argument)? {
            None => out.failed.push((allocation, format!("{{{}}}: no case applies", ids()))),
            Some(cert) => match verify_certificate(kind, election, &allocation, &cert, policy) {
                Ok(()) => out.verified += 1,
                Err(r) => out
                    .failed
                    .push((allocation, format!("{{{}}}: {}", ids(), r.code()))),
            },
        }
    }
    Ok(out)
}

fn outcome_result(condition: u8, outcome: ConditionOutcome, election: &Election) -> ConditionResult {
    match outcome {
        ConditionOutcome::Holds {
            pairs_checked,
            exhaustive,
        } => ConditionResult {
            condition,
            holds: Some(true),
            detail: format!(
                "{} pairs checked{}",
                pairs_checked,
                if exhaustive { " (exhaustive)" } else { " (sampled)" }
            ),
            witness: None,
        },
        ConditionOutcome::Violated(w) => ConditionResult {
            condition,
            holds: Some(false),
            detail: format!(
                "sat({{{}}}) = {} is not below sat({{{}}}) = {}",
                election.project_ids(w.first).join(","),
                w.sat_first,
                election.project_ids(w.second).join(","),
                w.sat_second
            ),
            witness: Some(*w),
        },
    }
}

/// Runs the verification of theorem `id`. Theorem 2 requires `params`;
/// theorems 1 and 3 reject them.
pub fn verify_theorem(
    id: u8,
    params: Option<TheoremParams>,
    options: &CoreOptions,
) -> Result<TheoremReport, TheoremError> {
    let started = Instant::now();
    let (params, election, conditions, notes, argument) = match id {
        1 | 3 => {
            if params.is_some() {
                return Err(TheoremError::FixedParameters(id));
            }
            let (kind, budget, election, argument) = if id == 1 {
                (SatKind::Cost, int(15), build_thm1(), CaseArgument::SmallCompletion)
            } else {
                (SatKind::Share, int(21), build_thm3(), CaseArgument::LargeCompletion)
            };
            let params = TheoremParams {
                kind,
                budget,
                eps: None,
            };
            (params, election, Vec::new(), Vec::new(), argument)
        }
        2 => {
            let params = params.ok_or(TheoremError::MissingParameters)?;
            let eps = params.eps.clone().ok_or(TheoremError::MissingParameters)?;
            if !params.budget.is_positive() || !eps.is_positive() {
                return Err(TheoremError::InvalidParameters(
                    "b and eps must be positive".into(),
                ));
            }
            let (election, conditions, notes) = check_conditions(&params, &eps, options)?;
            let failed = conditions
                .iter()
                .find(|c| c.holds == Some(false))
                .or_else(|| conditions.iter().find(|c| c.holds.is_none()))
                .map(|c| c.condition);
            if let Some(condition) = failed {
                let report = TheoremReport {
                    theorem: 2,
                    params,
                    conditions,
                    election,
                    verdict: None,
                    certificates_verified: 0,
                    families: BTreeMap::new(),
                    matching_case: 0,
                    cases: None,
                    notes,
                    duration: started.elapsed(),
                };
                return Err(TheoremError::ConditionFailed {
                    condition,
                    report: Box::new(report),
                });
            }
            let election = election.expect("conditions 1 and 2 ran on a built instance");
            (params, election, conditions, notes, CaseArgument::SmallCompletion)
        }
        other => return Err(TheoremError::UnknownTheorem(other)),
    };

    let kind = params.kind;
    let verdict = core_empty(kind, &election, options)?;
    let certificates_verified = verify_verdict(kind, &election, &verdict, &options.policy).map_err(
        |(allocation, reason)| TheoremError::CertificateRejected {
            allocation: allocation
                .map(|a| election.project_ids(a.projects()).join(","))
                .unwrap_or_default(),
            reason,
        },
    )?;
    let mut families = BTreeMap::new();
    let mut matching_case = 0;
    if let Some(witnesses) = verdict.witnesses() {
        for (allocation, cert) in witnesses {
            let family = classify_witness(&election, cert);
            *families.entry(family).or_insert(0) += 1;
            if let Some(hand) = case_certificate(kind, &election, allocation, argument)? {
                if classify_witness(&election, &hand) == family {
                    matching_case += 1;
                }
            }
        }
    }
    let cases = check_cases(kind, &election, argument, &options.policy)?;
    Ok(TheoremReport {
        theorem: id,
        params,
        conditions,
        election: Some(election),
        verdict: Some(verdict),
        certificates_verified,
        families,
        matching_case,
        cases: Some(cases),
        notes,
        duration: started.elapsed(),
    })
}

type Checked = (Option<Election>, Vec<ConditionResult>, Vec<String>);

fn check_conditions(
    params: &TheoremParams,
    eps: &BigRational,
    options: &CoreOptions,
) -> Result<Checked, TheoremError> {
    let kind = params.kind;
    let b = &params.budget;
    let joint = b * int(2) / int(3) - eps;
    let mut notes = vec![format!(
        "joint project cost 2b/3 - eps = {} (~{}) is used exactly",
        format_rational(&joint),
        to_f64(&joint)
    )];
    if matches!(kind, SatKind::SumLog | SatKind::GlobalLog) && joint == int(13331) / int(2) {
        let approx = (1.0 + to_f64(&joint)).ln();
        notes.push(format!(
            "the hand calculation ln(1 + 6666 - 1) ~ 8.8 rounds the joint cost; here ln(1 + {}) ~ {:.4}",
            format_rational(&joint),
            approx
        ));
    }
    let mut results = Vec::new();
    let election = match build_thm2(b, eps) {
        Ok(e) => {
            let c1 = check_condition1(kind, &e, Sampling::default(), options.policy)?;
            results.push(outcome_result(1, c1, &e));
            let c2 = check_condition2(kind, &e, Sampling::default(), options.policy)?;
            results.push(outcome_result(2, c2, &e));
            Some(e)
        }
        Err(errors) => {
            notes.push(format!("instance is not valid: {errors}"));
            for condition in [1, 2] {
                results.push(ConditionResult {
                    condition,
                    holds: None,
                    detail: "not evaluated: instance is not valid".into(),
                    witness: None,
                });
            }
            None
        }
    };
    let c3 = check_condition3(b, eps);
    results.push(ConditionResult {
        condition: 3,
        holds: Some(c3),
        detail: format!(
            "2b/3 - eps = {} {} b/2 = {}",
            format_rational(&joint),
            if c3 { ">" } else { "<=" },
            format_rational(&(b / int(2)))
        ),
        witness: None,
    });
    let c4 = if joint.is_positive() {
        let holds = check_condition4(kind, b, eps, options.policy)?;
        ConditionResult {
            condition: 4,
            holds: Some(holds),
            detail: format!(
                "sat({{b/3, eps}}) {} sat({{2b/3 - eps}})",
                if holds { "<" } else { ">=" }
            ),
            witness: None,
        }
    } else {
        ConditionResult {
            condition: 4,
            holds: Some(false),
            detail: "2b/3 - eps is not a positive cost".into(),
            witness: None,
        }
    };
    results.push(c4);
    Ok((election, results, notes))
}

impl TheoremReport {
    pub fn is_empty(&self) -> bool {
        self.verdict.as_ref().is_some_and(CoreVerdict::is_empty)
    }

    /// JSON form; `witnesses` adds the full certificate map.
    pub fn to_json(&self, witnesses: bool) -> Value {
        let conditions: Vec<Value> = self
            .conditions
            .iter()
            .map(|c| {
                json!({
                    "condition": c.condition,
                    "holds": c.holds,
                    "detail": c.detail,
                })
            })
            .collect();
        let families: BTreeMap<&str, usize> =
            self.families.iter().map(|(f, n)| (f.name(), *n)).collect();
        let mut out = json!({
            "theorem": self.theorem,
            "sat": self.params.kind.name(),
            "b": format_rational(&self.params.budget),
            "eps": self.params.eps.as_ref().map(format_rational),
            "conditions": conditions,
            "verdict": self.verdict.as_ref().map(|v| if v.is_empty() { "empty" } else { "in_core" }),
            "certificates_verified": self.certificates_verified,
            "witness_families": families,
            "witnesses_matching_case": self.matching_case,
            "case_argument": self.cases.as_ref().map(|c| json!({
                "verified": c.verified,
                "failed": c.failed.iter().map(|(_, why)| why.clone()).collect::<Vec<_>>(),
            })),
            "notes": self.notes,
            "duration_ms": self.duration.as_millis() as u64,
        });
        if let (true, Some(verdict), Some(election)) = (witnesses, &self.verdict, &self.election) {
            out["core"] = json::verdict(self.params.kind, election, verdict);
        }
        out
    }

    /// Line-oriented summary; `witnesses` adds one line per certificate.
    pub fn render(&self, witnesses: bool) -> String {
        let mut s = self.to_string();
        if let (true, Some(verdict), Some(election)) = (witnesses, &self.verdict, &self.election) {
            match verdict {
                CoreVerdict::InCore(a) => {
                    s.push_str(&format!(
                        "in core: {{{}}}\n",
                        election.project_ids(a.projects()).join(",")
                    ));
                }
                CoreVerdict::Empty(map) => {
                    for (a, cert) in map {
                        s.push_str(&format!(
                            "{{{}}} blocked by {}\n",
                            election.project_ids(a.projects()).join(","),
                            cert.describe(election)
                        ));
                    }
                }
            }
        }
        s
    }
}

impl fmt::Display for TheoremReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "theorem {}: sat={} b={}",
            self.theorem,
            self.params.kind,
            format_rational(&self.params.budget)
        )?;
        if let Some(eps) = &self.params.eps {
            write!(f, " eps={}", format_rational(eps))?;
        }
        writeln!(f)?;
        for c in &self.conditions {
            let status = match c.holds {
                Some(true) => "holds",
                Some(false) => "FAILS",
                None => "not evaluated",
            };
            writeln!(f, "condition {}: {} ({})", c.condition, status, c.detail)?;
        }
        for note in &self.notes {
            writeln!(f, "note: {note}")?;
        }
        match &self.verdict {
            None => writeln!(f, "core check not run")?,
            Some(CoreVerdict::InCore(a)) => match &self.election {
                Some(e) => writeln!(
                    f,
                    "IN CORE: {{{}}}",
                    e.project_ids(a.projects()).join(",")
                )?,
                None => writeln!(f, "IN CORE")?,
            },
            Some(CoreVerdict::Empty(map)) => {
                writeln!(
                    f,
                    "CORE EMPTY: {} exhaustive allocations, {} certificates verified",
                    map.len(),
                    self.certificates_verified
                )?;
                for (family, n) in &self.families {
                    writeln!(f, "  {}: {}", family.name(), n)?;
                }
                writeln!(
                    f,
                    "  {} of {} witnesses have the shape of the case argument's certificate",
                    self.matching_case,
                    map.len()
                )?;
            }
        }
        if let Some(cases) = &self.cases {
            writeln!(
                f,
                "case argument: {} feasible allocations verified, {} failed",
                cases.verified,
                cases.failed.len()
            )?;
            for (_, why) in &cases.failed {
                writeln!(f, "  {why}")?;
            }
        }
        writeln!(f, "time: {:.3}s", self.duration.as_secs_f64())
    }
}
