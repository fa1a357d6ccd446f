// SPDX-License-Identifier: Apache-2.0

mod common;

use std::cmp::Ordering;

use common::{int, permutations, q, random_election};
use pbcore::satisfaction::{
    check_condition1, check_condition2, check_condition3, check_condition4, Enclosure,
    IrrationalExpr, Sampling,
};
use pbcore::{
    build_thm1, build_thm2, canonical_key, core_empty, sat_compare, sat_set, sat_voter,
    verify_certificate, verify_verdict, Allocation, BigRational, BlockingCertificate, CoreOptions,
    CoreVerdict, Election, MemberRecord, PrecisionPolicy, ProjectSet, RawElection, RawProject,
    RawVoter, SatKind, SatValue, VoterSet,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn emptiness(kind: SatKind, e: &Election, options: &CoreOptions) -> bool {
    core_empty(kind, e, options).unwrap().is_empty()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pruned_agrees_with_naive(seed: u64, n in 1usize..=3, m in 1usize..=5, p in 0.2f64..0.9) {
        let e = random_election(&mut ChaCha8Rng::seed_from_u64(seed), n, m, p);
        for kind in SatKind::ALL {
            let pruned = core_empty(kind, &e, &CoreOptions::default()).unwrap();
            let naive = emptiness(kind, &e, &CoreOptions::naive());
            prop_assert_eq!(pruned.is_empty(), naive, "{} on\n{}", kind, e);
            if let CoreVerdict::InCore(pi) = pruned {
                let oracle = pbcore::find_blocking_with(kind, &e, &pi, &CoreOptions::naive()).unwrap();
                prop_assert!(oracle.is_none());
            }
        }
    }

    #[test]
    fn sat_voter_is_sat_of_approved_part(seed: u64, n in 1usize..=3, m in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = random_election(&mut rng, n, m, 0.6);
        let pi = ProjectSet::from_bits(rng.random_range(0..1u64 << m));
        for kind in SatKind::ALL {
            for i in 0..n {
                let direct = sat_voter(kind, &e, i, pi).unwrap();
                let via_set = sat_set(kind, &e, pi.intersection(e.approvals(i))).unwrap();
                prop_assert_eq!(direct, via_set);
            }
        }
    }

    #[test]
    fn exhaustive_is_filtered_feasible(seed: u64, m in 1usize..=6) {
        let e = random_election(&mut ChaCha8Rng::seed_from_u64(seed), 2, m, 0.5);
        let filtered: Vec<_> = e.feasible_sets().filter(|&s| e.is_exhaustive(s)).collect();
        prop_assert_eq!(e.exhaustive_sets().collect::<Vec<_>>(), filtered);
        for s in e.feasible_sets() {
            for t in s.subsets() {
                prop_assert!(e.is_feasible(t));
            }
        }
    }

    #[test]
    fn refinement_never_leaves_the_enclosure(costs in prop::collection::vec((1i64..20000, 1i64..8), 1..4)) {
        let terms: Vec<BigRational> = costs.iter().map(|&(a, b)| q(a, b)).collect();
        let total: BigRational = terms.iter().cloned().sum();
        for expr in [
            IrrationalExpr::sum_ln1p(terms.clone()),
            IrrationalExpr::sum_sqrt(terms.clone()),
            IrrationalExpr::Ln1p(total.clone()),
            IrrationalExpr::Sqrt(total.clone()),
        ] {
            let coarse = Enclosure::new(expr, 64);
            let fine = coarse.refine(256);
            prop_assert!(fine.lo() >= coarse.lo() && fine.hi() <= coarse.hi());
            let fresh = Enclosure::new(coarse.expr().clone(), 512);
            prop_assert!(fresh.lo() <= coarse.hi() && fresh.hi() >= coarse.lo());
            prop_assert!(fresh.lo() <= fresh.hi());
        }
    }
}

/// Brute-force isomorphism: some relabeling of voters and projects maps
/// one election onto the other.
fn isomorphic(a: &Election, b: &Election) -> bool {
    if a.budget() != b.budget() || a.num_voters() != b.num_voters() || a.num_projects() != b.num_projects() {
        return false;
    }
    let (n, m) = (a.num_voters(), a.num_projects());
    let project_perms = permutations(m);
    permutations(n).iter().any(|vp| {
        project_perms.iter().any(|pp| {
            (0..m).all(|j| a.project(j).cost == b.project(pp[j]).cost)
                && (0..n).all(|i| {
                    let mapped: ProjectSet = a.approvals(i).iter().map(|j| pp[j]).collect();
                    mapped == b.approvals(vp[i])
                })
        })
    })
}

fn small_election(rng: &mut impl Rng, n: usize, m: usize) -> Election {
    let costs: Vec<BigRational> = (0..m).map(|_| int(rng.random_range(1..=2))).collect();
    Election::validate(RawElection {
        budget: int(3),
        projects: costs
            .into_iter()
            .enumerate()
            .map(|(j, cost)| RawProject {
                id: format!("p{j}"),
                cost,
            })
            .collect(),
        voters: (0..n)
            .map(|i| RawVoter {
                id: format!("v{i}"),
                approves: (0..m)
                    .filter(|_| rng.random_bool(0.5))
                    .map(|j| format!("p{j}"))
                    .collect(),
            })
            .collect(),
    })
    .unwrap()
}

#[test]
fn canonical_key_matches_isomorphism() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut pool = Vec::new();
    for _ in 0..400 {
        let n = rng.random_range(1..=3);
        let m = rng.random_range(1..=4);
        pool.push(small_election(&mut rng, n, m));
    }
    let keys: Vec<String> = pool.iter().map(canonical_key).collect();
    let mut isomorphic_pairs = 0;
    for a in 0..pool.len() {
        for b in a + 1..pool.len() {
            let iso = isomorphic(&pool[a], &pool[b]);
            assert_eq!(iso, keys[a] == keys[b], "\n{}\n{}", pool[a], pool[b]);
            isomorphic_pairs += iso as usize;
        }
    }
    assert!(isomorphic_pairs > 100, "pool too sparse: {isomorphic_pairs}");

    for e in &pool {
        let vp = permutations(e.num_voters());
        let pp = permutations(e.num_projects());
        for _ in 0..4 {
            let relabeled = e.permuted(&vp[rng.random_range(0..vp.len())], &pp[rng.random_range(0..pp.len())]);
            assert_eq!(canonical_key(&relabeled), canonical_key(e));
        }
    }
}

fn map_projects(set: ProjectSet, new_index: &[usize]) -> ProjectSet {
    set.iter().map(|j| new_index[j]).collect()
}

fn inverse(order: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; order.len()];
    for (new, &old) in order.iter().enumerate() {
        inv[old] = new;
    }
    inv
}

#[test]
fn relabeling_thm1_permutes_the_witnesses() {
    let e = build_thm1();
    let kind = SatKind::Cost;
    let options = CoreOptions::default();
    let policy = PrecisionPolicy::default();
    let CoreVerdict::Empty(original) = core_empty(kind, &e, &options).unwrap() else {
        panic!("core should be empty");
    };
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let vperms = permutations(3);
    let pperms = permutations(9);
    for _ in 0..12 {
        let vo = &vperms[rng.random_range(0..vperms.len())];
        let po = &pperms[rng.random_range(0..pperms.len())];
        let relabeled = e.permuted(vo, po);
        let (vi, pi) = (inverse(vo), inverse(po));
        let verdict = core_empty(kind, &relabeled, &options).unwrap();
        let CoreVerdict::Empty(witnesses) = &verdict else {
            panic!("relabeling changed the verdict");
        };
        assert_eq!(witnesses.len(), original.len());
        for (alloc, cert) in &original {
            let mapped_alloc = Allocation::new(&relabeled, map_projects(alloc.projects(), &pi)).unwrap();
            assert!(witnesses.contains_key(&mapped_alloc));
            let mut members: Vec<MemberRecord> = cert
                .members
                .iter()
                .map(|r| MemberRecord {
                    voter: vi[r.voter],
                    ..r.clone()
                })
                .collect();
            members.sort_by_key(|r| r.voter);
            let mapped = BlockingCertificate {
                coalition: cert.coalition.iter().map(|i| vi[i]).collect::<VoterSet>(),
                deviation: map_projects(cert.deviation, &pi),
                members,
            };
            assert_eq!(verify_certificate(kind, &relabeled, &mapped_alloc, &mapped, &policy), Ok(()));
        }
        assert_eq!(verify_verdict(kind, &relabeled, &verdict, &policy), Ok(original.len()));
    }
}

#[test]
fn runs_are_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let parallel = CoreOptions {
        parallel: true,
        ..CoreOptions::default()
    };
    for _ in 0..20 {
        let e = random_election(&mut rng, 3, 6, 0.5);
        for kind in SatKind::ALL {
            let first = core_empty(kind, &e, &CoreOptions::default()).unwrap();
            assert_eq!(core_empty(kind, &e, &CoreOptions::default()).unwrap(), first);
            assert_eq!(core_empty(kind, &e, &parallel).unwrap(), first);
        }
    }
}

/// Ballot profiles over `voters` voters in which every one of `m` projects
/// has at least one approver.
fn covering_profiles(voters: usize, m: usize) -> Vec<Vec<ProjectSet>> {
    let per_project: Vec<u64> = (1..1u64 << voters).collect();
    let mut out = vec![vec![ProjectSet::EMPTY; voters]];
    for j in 0..m {
        out = out
            .into_iter()
            .flat_map(|ballots| {
                per_project.iter().map(move |&mask| {
                    let mut b = ballots.clone();
                    for (i, ballot) in b.iter_mut().enumerate() {
                        if mask >> i & 1 == 1 {
                            *ballot = ballot.with(j);
                        }
                    }
                    b
                })
            })
            .collect();
    }
    out
}

fn cost_vectors(grid: &[BigRational], m: usize) -> Vec<Vec<BigRational>> {
    let mut out = vec![Vec::new()];
    for _ in 0..m {
        out = out
            .into_iter()
            .flat_map(|v| {
                grid.iter().map(move |c| {
                    let mut w = v.clone();
                    w.push(c.clone());
                    w
                })
            })
            .collect();
    }
    out
}

fn build(costs: &[BigRational], ballots: &[ProjectSet]) -> Election {
    let budget: BigRational = costs.iter().cloned().sum();
    Election::validate(RawElection {
        budget,
        projects: costs
            .iter()
            .enumerate()
            .map(|(j, c)| RawProject {
                id: format!("p{j}"),
                cost: c.clone(),
            })
            .collect(),
        voters: ballots
            .iter()
            .enumerate()
            .map(|(i, b)| RawVoter {
                id: format!("v{i}"),
                approves: b.iter().map(|j| format!("p{j}")).collect(),
            })
            .collect(),
    })
    .unwrap()
}

/// Monotonicity over every covering pair `S ⊂ S + p` (which implies it for
/// every pair by transitivity) and the zero law.
fn check_axioms(kind: SatKind, e: &Election) {
    let policy = PrecisionPolicy::default();
    let m = e.num_projects();
    let values: Vec<SatValue> = ProjectSet::all_subsets(m).map(|s| sat_set(kind, e, s).unwrap()).collect();
    for s in ProjectSet::all_subsets(m) {
        let v = &values[s.bits() as usize];
        if s.is_empty() {
            assert_eq!(v, &SatValue::zero(), "{kind}");
        } else {
            assert!(v.lo() > &int(0), "{kind} {s:?} on\n{e}");
        }
        for p in 0..m {
            if !s.contains(p) {
                let bigger = &values[s.with(p).bits() as usize];
                assert_ne!(sat_compare(bigger, v, &policy).unwrap(), Ordering::Less, "{kind} {s:?}+{p}");
            }
        }
    }
}

#[test]
fn monotonicity_and_zero_law() {
    let grid = [q(1, 2), int(1), q(5, 2)];
    for m in 1..=5 {
        for costs in cost_vectors(&grid, m) {
            let e = build(&costs, &[ProjectSet::full(m)]);
            for kind in SatKind::ALL {
                check_axioms(kind, &e);
            }
        }
        // only the share depends on the profile
        for costs in cost_vectors(&grid[1..], m) {
            for ballots in covering_profiles(2, m) {
                check_axioms(SatKind::Share, &build(&costs, &ballots));
            }
        }
    }
    for m in 1..=3 {
        for ballots in covering_profiles(3, m) {
            check_axioms(SatKind::Share, &build(&vec![int(1); m], &ballots));
        }
    }
}

#[test]
fn cost_satisfies_all_conditions_on_a_grid() {
    let policy = PrecisionPolicy::default();
    for b in [int(15), int(21), q(100, 3), int(60)] {
        for eps in [q(1, 2), int(1), int(2), q(7, 3), int(5)] {
            if eps >= &b / int(6) {
                assert!(!check_condition3(&b, &eps));
                continue;
            }
            assert!(check_condition3(&b, &eps));
            assert!(check_condition4(SatKind::Cost, &b, &eps, policy).unwrap());
            let e = build_thm2(&b, &eps).unwrap();
            assert!(check_condition1(SatKind::Cost, &e, Sampling::default(), policy).unwrap().holds());
            assert!(check_condition2(SatKind::Cost, &e, Sampling::default(), policy).unwrap().holds());
        }
    }
}
