// SPDX-License-Identifier: Apache-2.0

//! Relabeling-invariant keys for elections.
//!
//! Voters are split into classes by an invariant (the sorted multiset of
//! `(cost, approver count)` over their ballot) and classes are laid out in
//! invariant order. Within classes every ordering is tried, each project
//! becomes a `(cost rank, approver bitmask)` column, and the
//! lexicographically smallest sorted column list wins. When the within-class
//! orderings exceed [`MAX_ORDERINGS`] only the identity ordering is used, so
//! the key may separate isomorphic elections but never merges
//! non-isomorphic ones.

use std::fmt::Write;

use num_rational::BigRational;

use crate::instance::Election;
use crate::rational::format_rational;

pub const MAX_ORDERINGS: usize = 40_320;

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for (i, &first) in items.iter().enumerate() {
        let mut rest = items.to_vec();
        rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, first);
            out.push(tail);
        }
    }
    out
}

/// The key as a string: budget, voter count, distinct costs, then the
/// canonical column list.
pub fn canonical_key(election: &Election) -> String {
    let n = election.num_voters();
    let m = election.num_projects();
    let mut costs: Vec<&BigRational> = election.projects().iter().map(|p| p.cost.as_rational()).collect();
    costs.sort();
    costs.dedup();
    let rank: Vec<usize> = election
        .projects()
        .iter()
        .map(|p| costs.binary_search(&p.cost.as_rational()).expect("present"))
        .collect();

    let mut invariant: Vec<(Vec<(usize, u32)>, usize)> = (0..n)
        .map(|i| {
            let mut inv: Vec<(usize, u32)> = election
                .approvals(i)
                .iter()
                .map(|p| (rank[p], election.approver_count(p)))
                .collect();
            inv.sort();
            (inv, i)
        })
        .collect();
    invariant.sort();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for (k, (inv, voter)) in invariant.iter().enumerate() {
        if k > 0 && invariant[k - 1].0 == *inv {
            classes.last_mut().expect("nonempty").push(*voter);
        } else {
            classes.push(vec![*voter]);
        }
    }

    let mut orderings: usize = 1;
    for c in &classes {
        orderings = (1..=c.len()).fold(orderings, |acc, x| acc.saturating_mul(x));
    }
    let class_perms: Vec<Vec<Vec<usize>>> = if orderings <= MAX_ORDERINGS {
        classes.iter().map(|c| permutations(c)).collect()
    } else {
        classes.iter().map(|c| vec![c.clone()]).collect()
    };

    let columns = |order: &[usize]| -> Vec<(usize, u64)> {
        let mut position = vec![0usize; n];
        for (pos, &voter) in order.iter().enumerate() {
            position[voter] = pos;
        }
        let mut bits = vec![0u64; m];
        for (voter, &pos) in position.iter().enumerate() {
            for p in election.approvals(voter).iter() {
                bits[p] |= 1 << pos;
            }
        }
        let mut cols: Vec<(usize, u64)> = (0..m).map(|p| (rank[p], bits[p])).collect();
        cols.sort_unstable();
        cols
    };

    let mut best: Option<Vec<(usize, u64)>> = None;
    let mut choice = vec![0usize; class_perms.len()];
    loop {
        let order: Vec<usize> = class_perms
            .iter()
            .zip(&choice)
            .flat_map(|(perms, &c)| perms[c].iter().copied())
            .collect();
        let cols = columns(&order);
        if best.as_ref().is_none_or(|b| cols < *b) {
            best = Some(cols);
        }
        // odometer over the per-class permutations
        let mut k = 0;
        while k < choice.len() {
            choice[k] += 1;
            if choice[k] < class_perms[k].len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
        if k == choice.len() {
            break;
        }
    }

    let mut key = format!(
        "b={};n={};{}c=",
        format_rational(election.budget().as_rational()),
        n,
        if orderings <= MAX_ORDERINGS { "" } else { "r;" }
    );
    for (i, c) in costs.iter().enumerate() {
        if i > 0 {
            key.push(',');
        }
        key.push_str(&format_rational(c));
    }
    key.push(';');
    for (r, bits) in best.expect("at least one ordering") {
        let _ = write!(key, "{r}:{bits:x}.");
    }
    key
}
