// SPDX-License-Identifier: Apache-2.0

#![allow(dead_code)]

use pbcore::{BigInt, BigRational, Election, RawElection, RawProject, RawVoter};
use rand::Rng;

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Cost grid for random elections, in halves.
const COST_HALVES: [i64; 7] = [1, 2, 3, 4, 5, 6, 10];

/// A random valid election with `n` voters and `m` projects. Costs come from
/// a small grid so that ties and exact budget boundaries show up often.
pub fn random_election(rng: &mut impl Rng, n: usize, m: usize, approval_probability: f64) -> Election {
    let costs: Vec<BigRational> = (0..m)
        .map(|_| q(COST_HALVES[rng.random_range(0..COST_HALVES.len())], 2))
        .collect();
    let max = costs.iter().max().cloned().unwrap_or_else(|| int(1));
    let total: BigRational = costs.iter().cloned().sum();
    // budget anywhere between the dearest project and the total cost
    let slack = &total - &max;
    let steps = 4;
    let budget = &max + &slack * q(rng.random_range(0..=steps), steps);
    let projects = costs
        .into_iter()
        .enumerate()
        .map(|(j, cost)| RawProject {
            id: format!("p{}", j + 1),
            cost,
        })
        .collect();
    let voters = (0..n)
        .map(|i| RawVoter {
            id: format!("v{}", i + 1),
            approves: (0..m)
                .filter(|_| rng.random_bool(approval_probability))
                .map(|j| format!("p{}", j + 1))
                .collect(),
        })
        .collect();
    Election::validate(RawElection {
        budget,
        projects,
        voters,
    })
    .expect("generated election is valid")
}

/// All permutations of `0..len` in lexicographic order.
pub fn permutations(len: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for k in 0..used.len() {
            if !used[k] {
                used[k] = true;
                prefix.push(k);
                go(prefix, used, out);
                prefix.pop();
                used[k] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; len], &mut out);
    out
}
