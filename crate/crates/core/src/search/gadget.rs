// SPDX-License-Identifier: Apache-2.0

//! The k-voter gadget: one joint project per voter pair plus a large and a
//! small personal project per voter. Voter `i` approves every project whose
//! subscript contains `i`.

use num_rational::BigRational;

use crate::instance::{Election, RawElection, RawProject, RawVoter};

use super::SearchError;

/// Project id of the joint project of voters `i < j` (1-based).
pub fn joint_id(k: usize, i: usize, j: usize) -> String {
    if k < 10 {
        format!("p{i}{j}")
    } else {
        format!("p{i}_{j}")
    }
}

pub fn large_id(i: usize) -> String {
    format!("l{i}")
}

pub fn small_id(i: usize) -> String {
    format!("s{i}")
}

/// Unvalidated gadget data. Projects are ordered joint (pairs in
/// lexicographic order), then large, then small.
pub fn gadget_raw(
    k: usize,
    joint: &BigRational,
    large: &BigRational,
    small: &BigRational,
    budget: &BigRational,
) -> RawElection {
    let mut projects = Vec::new();
    for i in 1..=k {
        for j in i + 1..=k {
            projects.push(RawProject {
                id: joint_id(k, i, j),
                cost: joint.clone(),
            });
        }
    }
    for i in 1..=k {
        projects.push(RawProject {
            id: large_id(i),
            cost: large.clone(),
        });
    }
    for i in 1..=k {
        projects.push(RawProject {
            id: small_id(i),
            cost: small.clone(),
        });
    }
    let voters = (1..=k)
        .map(|v| {
            let mut approves = Vec::new();
            for i in 1..=k {
                for j in i + 1..=k {
                    if v == i || v == j {
                        approves.push(joint_id(k, i, j));
                    }
                }
            }
            approves.push(large_id(v));
            approves.push(small_id(v));
            RawVoter {
                id: v.to_string(),
                approves,
            }
        })
        .collect();
    RawElection {
        budget: budget.clone(),
        projects,
        voters,
    }
}

pub fn gadget(
    k: usize,
    joint: &BigRational,
    large: &BigRational,
    small: &BigRational,
    budget: &BigRational,
) -> Result<Election, SearchError> {
    if k < 2 {
        return Err(SearchError::InvalidParameters(format!(
            "a gadget needs at least 2 voters, got {k}"
        )));
    }
    gadget_raw(k, joint, large, small, budget)
        .validate()
        .map_err(|e| SearchError::InvalidParameters(e.to_string()))
}
