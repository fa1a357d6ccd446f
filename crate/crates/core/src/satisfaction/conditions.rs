// SPDX-License-Identifier: Apache-2.0

//! Checks for the four sufficient conditions under which the three-voter
//! joint/large/small construction has an empty core:
//!
//! 1. strict inclusion monotonicity, `P ⊊ P'` implies `sat(P) < sat(P')`;
//! 2. strict cost monotonicity on singletons, `c(p) < c(q)` implies
//!    `sat({p}) < sat({q})`;
//! 3. `2b/3 - eps > b/2`;
//! 4. `sat({p_(b/3), p_eps}) < sat({p_(2b/3 - eps)})`.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{sat_compare, sat_set, PrecisionPolicy, SatError, SatEvaluator, SatKind, SatValue};
use crate::instance::{Election, ProjectSet, RawElection, RawProject, RawVoter};

/// Elections with at most this many projects are checked exhaustively.
pub const EXHAUSTIVE_LIMIT: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sampling {
    pub samples: u64,
    pub seed: u64,
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling {
            samples: 100_000,
            seed: 0,
        }
    }
}

/// A pair of sets for which the required strict inequality fails:
/// `sat(first) >= sat(second)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionWitness {
    pub first: ProjectSet,
    pub second: ProjectSet,
    pub sat_first: SatValue,
    pub sat_second: SatValue,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConditionOutcome {
    Holds { pairs_checked: u64, exhaustive: bool },
    Violated(Box<ConditionWitness>),
}

impl ConditionOutcome {
    pub fn holds(&self) -> bool {
        matches!(self, ConditionOutcome::Holds { .. })
    }

    pub fn witness(&self) -> Option<&ConditionWitness> {
        match self {
            ConditionOutcome::Holds { .. } => None,
            ConditionOutcome::Violated(w) => Some(w),
        }
    }
}

fn strictly_less(
    ev: &mut SatEvaluator<'_>,
    first: ProjectSet,
    second: ProjectSet,
) -> Result<Option<ConditionWitness>, SatError> {
    if ev.compare_sets(first, second)? == Ordering::Less {
        return Ok(None);
    }
    Ok(Some(ConditionWitness {
        first,
        second,
        sat_first: ev.value(first)?.clone(),
        sat_second: ev.value(second)?.clone(),
    }))
}

/// Condition 1 over all pairs `P ⊊ P'` (or `sampling.samples` random pairs
/// when the election has more than [`EXHAUSTIVE_LIMIT`] projects).
pub fn check_condition1(
    kind: SatKind,
    election: &Election,
    sampling: Sampling,
    policy: PrecisionPolicy,
) -> Result<ConditionOutcome, SatError> {
    let m = election.num_projects();
    let mut ev = SatEvaluator::new(kind, election, policy);
    let mut checked = 0u64;
    if m <= EXHAUSTIVE_LIMIT {
        for larger in ProjectSet::all_subsets(m) {
            for smaller in larger.subsets() {
                if smaller == larger {
                    continue;
                }
                checked += 1;
                if let Some(w) = strictly_less(&mut ev, smaller, larger)? {
                    return Ok(ConditionOutcome::Violated(Box::new(w)));
                }
            }
        }
        return Ok(ConditionOutcome::Holds {
            pairs_checked: checked,
            exhaustive: true,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(sampling.seed);
    let full = election.all_projects().bits();
    for _ in 0..sampling.samples {
        let larger = loop {
            let bits = rng.random::<u64>() & full;
            if bits != 0 {
                break ProjectSet::from_bits(bits);
            }
        };
        let mut smaller = ProjectSet::from_bits(rng.random::<u64>() & larger.bits());
        if smaller == larger {
            let drop = larger.iter().nth(rng.random_range(0..larger.len())).unwrap();
            smaller = smaller.without(drop);
        }
        checked += 1;
        if let Some(w) = strictly_less(&mut ev, smaller, larger)? {
            return Ok(ConditionOutcome::Violated(Box::new(w)));
        }
    }
    Ok(ConditionOutcome::Holds {
        pairs_checked: checked,
        exhaustive: false,
    })
}

/// Condition 2 over all project pairs with `c(p) < c(q)` (sampled above
/// [`EXHAUSTIVE_LIMIT`] projects).
pub fn check_condition2(
    kind: SatKind,
    election: &Election,
    sampling: Sampling,
    policy: PrecisionPolicy,
) -> Result<ConditionOutcome, SatError> {
    let m = election.num_projects();
    let mut ev = SatEvaluator::new(kind, election, policy);
    let mut checked = 0u64;
    let mut check = |ev: &mut SatEvaluator<'_>, p: usize, q: usize| {
        if election.project(p).cost >= election.project(q).cost {
            return Ok(None);
        }
        checked += 1;
        strictly_less(ev, ProjectSet::singleton(p), ProjectSet::singleton(q))
    };
    let exhaustive = m <= EXHAUSTIVE_LIMIT;
    if exhaustive {
        for p in 0..m {
            for q in 0..m {
                if let Some(w) = check(&mut ev, p, q)? {
                    return Ok(ConditionOutcome::Violated(Box::new(w)));
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(sampling.seed);
        for _ in 0..sampling.samples {
            let p = rng.random_range(0..m);
            let q = rng.random_range(0..m);
            if let Some(w) = check(&mut ev, p, q)? {
                return Ok(ConditionOutcome::Violated(Box::new(w)));
            }
        }
    }
    Ok(ConditionOutcome::Holds {
        pairs_checked: checked,
        exhaustive,
    })
}

/// `2b/3 - eps > b/2`, which is the same as `eps < b/6`.
pub fn check_condition3(budget: &BigRational, eps: &BigRational) -> bool {
    let two_thirds = BigRational::new(BigInt::from(2), BigInt::from(3));
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    two_thirds * budget - eps > half * budget
}

/// Evaluates condition 4 on three stand-alone projects costing `b/3`, `eps`
/// and `2b/3 - eps`, all approved by a single voter (so the share coincides
/// with the cost). Returns `false` when `2b/3 - eps` is not a positive cost.
pub fn check_condition4(
    kind: SatKind,
    budget: &BigRational,
    eps: &BigRational,
    policy: PrecisionPolicy,
) -> Result<bool, SatError> {
    if !budget.is_positive() || !eps.is_positive() {
        return Err(SatError::InvalidParameters(
            "b and eps must be positive".into(),
        ));
    }
    let third = budget / BigRational::from_integer(BigInt::from(3));
    let joint = &third * BigRational::from_integer(BigInt::from(2)) - eps;
    if joint <= BigRational::zero() {
        return Ok(false);
    }
    let costs = [third, eps.clone(), joint];
    let ceiling = costs.iter().cloned().fold(budget.clone(), |a, b| a + b);
    let ids = ["b/3", "eps", "2b/3-eps"];
    let election = RawElection {
        budget: ceiling,
        projects: ids
            .iter()
            .zip(&costs)
            .map(|(id, c)| RawProject {
                id: id.to_string(),
                cost: c.clone(),
            })
            .collect(),
        voters: vec![RawVoter {
            id: "1".into(),
            approves: ids.iter().map(|s| s.to_string()).collect(),
        }],
    }
    .validate()
    .map_err(|e| SatError::InvalidParameters(e.to_string()))?;
    let pair = sat_set(kind, &election, ProjectSet::from_bits(0b011))?;
    let single = sat_set(kind, &election, ProjectSet::from_bits(0b100))?;
    Ok(sat_compare(&pair, &single, &policy)? == Ordering::Less)
}
