// SPDX-License-Identifier: Apache-2.0

mod common;

use std::cmp::Ordering;

use common::{int, q};
use pbcore::satisfaction::{
    check_condition1, check_condition2, check_condition3, check_condition4, sat_set_ids,
    sat_voter_ids, Sampling,
};
use pbcore::{
    build_thm1, build_thm3, core_empty, find_blocking, in_core, parse_rational, sat_compare,
    verify_certificate, Allocation, BlockingCertificate, CoreOptions, CoreVerdict, Cost, Election,
    PrecisionPolicy, ProjectSet, RawElection, RawProject, RawVoter, Rejection, SatKind, SatValue,
};

fn election(budget: i64, projects: &[(&str, i64)], voters: &[&[&str]]) -> Election {
    Election::validate(RawElection {
        budget: int(budget),
        projects: projects
            .iter()
            .map(|(id, c)| RawProject {
                id: id.to_string(),
                cost: int(*c),
            })
            .collect(),
        voters: voters
            .iter()
            .enumerate()
            .map(|(i, a)| RawVoter {
                id: (i + 1).to_string(),
                approves: a.iter().map(|s| s.to_string()).collect(),
            })
            .collect(),
    })
    .unwrap()
}

fn exact(v: i64) -> SatValue {
    SatValue::Exact(int(v))
}

#[test]
fn decimal_costs_parse_exactly() {
    assert_eq!(parse_rational("0.5").unwrap(), q(1, 2));
    assert!(parse_rational("2b").is_err());
}

#[test]
fn feasibility_and_exhaustiveness() {
    let e = build_thm1();
    let set = |ids: &[&str]| e.project_set(ids).unwrap();
    assert!(e.is_exhaustive(set(&["p12", "l3", "s1"])));
    assert!(!e.is_feasible(set(&["p12", "p13"])));
    assert!(e.is_feasible(ProjectSet::EMPTY));
    assert!(!e.is_exhaustive(ProjectSet::EMPTY));

    let two = election(1, &[("a", 1), ("b", 1)], &[&["a"]]);
    let feasible: Vec<_> = two.feasible_sets().map(|s| two.project_ids(s)).collect();
    assert_eq!(feasible, vec![vec![], vec!["a".to_string()], vec!["b".to_string()]]);
    assert_eq!(two.exhaustive_sets().count(), 2);

    let one = election(3, &[("p", 3)], &[&["p"]]);
    assert_eq!(one.feasible_sets().count(), 2);
    assert_eq!(one.exhaustive_sets().collect::<Vec<_>>(), vec![ProjectSet::singleton(0)]);
}

#[test]
fn enumeration_matches_brute_force() {
    let e = build_thm1();
    let budget = e.budget().clone();
    let brute: Vec<ProjectSet> = (0u64..512)
        .map(ProjectSet::from_bits)
        .filter(|&s| e.total_cost(s) <= budget)
        .collect();
    assert_eq!(e.feasible_sets().collect::<Vec<_>>(), brute);
    let exhaustive: Vec<ProjectSet> = brute.iter().copied().filter(|&s| e.is_exhaustive(s)).collect();
    assert_eq!(e.exhaustive_sets().collect::<Vec<_>>(), exhaustive);
    assert_eq!(brute.len(), 114);
    assert_eq!(exhaustive.len(), 43);
}

#[test]
fn satisfaction_values() {
    let e1 = build_thm1();
    let e3 = build_thm3();
    assert_eq!(sat_set_ids(SatKind::Cost, &e1, &["p13", "s1"]).unwrap(), exact(10));
    assert_eq!(
        sat_set_ids(SatKind::Share, &e3, &["p12"]).unwrap(),
        SatValue::Exact(q(11, 2))
    );
    for kind in SatKind::ALL {
        assert_eq!(sat_set_ids::<&str>(kind, &e1, &[]).unwrap(), SatValue::zero());
    }
    assert_eq!(
        sat_voter_ids(SatKind::Cost, &e1, "3", &["p12", "l3", "s3"]).unwrap(),
        exact(7)
    );
    assert_eq!(
        sat_voter_ids(SatKind::Share, &e3, "1", &["p13", "l1"]).unwrap(),
        SatValue::Exact(q(17, 2))
    );
    let silent = election(5, &[("a", 2), ("b", 3)], &[&["a"], &[]]);
    assert_eq!(
        sat_voter_ids(SatKind::Cardinality, &silent, "2", &["a", "b"]).unwrap(),
        SatValue::zero()
    );
}

#[test]
fn log_values_and_comparison() {
    let e = Election::validate(RawElection {
        budget: int(9999),
        projects: vec![
            RawProject { id: "a".into(), cost: int(3333) },
            RawProject { id: "e".into(), cost: q(1, 2) },
            RawProject { id: "j".into(), cost: q(13331, 2) },
        ],
        voters: vec![RawVoter {
            id: "1".into(),
            approves: vec!["a".into(), "e".into(), "j".into()],
        }],
    })
    .unwrap();
    let pair = sat_set_ids(SatKind::SumLog, &e, &["a", "e"]).unwrap();
    // ln(3334) + ln(3/2) = 8.5175...
    assert!(pair.lo() > &q(851, 100) && pair.hi() < &q(852, 100), "{pair:?}");
    let joint = sat_set_ids(SatKind::SumLog, &e, &["j"]).unwrap();
    let policy = PrecisionPolicy::default();
    assert_eq!(sat_compare(&pair, &joint, &policy).unwrap(), Ordering::Less);
    assert_eq!(sat_compare(&pair, &pair.clone(), &policy).unwrap(), Ordering::Equal);
    assert_eq!(sat_compare(&exact(8), &exact(7), &policy).unwrap(), Ordering::Greater);
}

#[test]
fn conditions_examples() {
    let policy = PrecisionPolicy::default();
    let e1 = build_thm1();
    for check in [check_condition1, check_condition2] {
        assert!(check(SatKind::Cost, &e1, Sampling::default(), policy).unwrap().holds());
    }

    let two = election(5, &[("s", 2), ("l", 5)], &[&["s", "l"]]);
    let out = check_condition2(SatKind::Cardinality, &two, Sampling::default(), policy).unwrap();
    let w = out.witness().expect("cardinality ignores cost");
    assert_eq!((w.first, w.second), (ProjectSet::singleton(0), ProjectSet::singleton(1)));
    assert_eq!((&w.sat_first, &w.sat_second), (&exact(1), &exact(1)));

    let ab = election(2, &[("a", 1), ("b", 1)], &[&["a", "b"]]);
    let out = check_condition1(SatKind::ChamberlinCourant, &ab, Sampling::default(), policy).unwrap();
    let w = out.witness().expect("cc saturates at one project");
    assert_eq!((w.first, w.second), (ProjectSet::singleton(0), ProjectSet::from_bits(0b11)));

    assert!(check_condition3(&int(9999), &q(1, 2)));
    assert!(check_condition3(&int(15), &int(2)));
    assert!(!check_condition3(&int(6), &int(1)));
    assert!(check_condition4(SatKind::SumLog, &int(9999), &q(1, 2), policy).unwrap());
    assert!(check_condition4(SatKind::Cost, &int(15), &int(2), policy).unwrap());
}

#[test]
fn budget_shares() {
    let e1 = build_thm1();
    assert_eq!(e1.budget_share(2), Cost::new(int(10)));
    assert_eq!(e1.budget_share(3), e1.budget().clone());
    assert_eq!(build_thm3().budget_share(1), Cost::new(int(7)));
}

#[test]
fn blocking_examples() {
    let e = build_thm1();
    let alloc = |ids: &[&str]| Allocation::from_ids(&e, ids).unwrap();

    let cert = find_blocking(SatKind::Cost, &e, &alloc(&["l1", "s1", "l2"])).unwrap().unwrap();
    let coalition = e.voter_ids_of(cert.coalition);
    assert!(coalition == ["1", "2"] || coalition == ["2", "3"], "{coalition:?}");
    let dev = e.project_ids(cert.deviation);
    assert_eq!(dev.len(), 1);
    assert!(dev[0].starts_with('p'));
    assert_eq!(e.total_cost(cert.deviation), Cost::new(int(8)));

    let cert = find_blocking(SatKind::Cost, &e, &alloc(&["p12", "l3", "s2"])).unwrap().unwrap();
    assert_eq!(e.voter_ids_of(cert.coalition), ["1", "3"]);
    assert_eq!(e.project_ids(cert.deviation), ["p13", "s1"]);

    let single = election(4, &[("p", 3), ("q", 4)], &[&["p"]]);
    let pi = Allocation::from_ids(&single, &["p"]).unwrap();
    for kind in SatKind::ALL {
        assert!(find_blocking(kind, &single, &pi).unwrap().is_none());
    }
}

#[test]
fn core_membership_examples() {
    let e1 = build_thm1();
    for set in e1.feasible_sets() {
        let pi = Allocation::new(&e1, set).unwrap();
        assert!(!in_core(SatKind::Cost, &e1, &pi).unwrap());
    }
    let e3 = build_thm3();
    let pi = Allocation::from_ids(&e3, &["p12", "l3", "s3", "l1"]).unwrap();
    assert!(!in_core(SatKind::Share, &e3, &pi).unwrap());

    let lone = election(5, &[("a", 2), ("b", 3), ("c", 4)], &[&["a", "b", "c"]]);
    let best = Allocation::from_ids(&lone, &["a", "b"]).unwrap();
    assert!(in_core(SatKind::Cost, &lone, &best).unwrap());

    let options = CoreOptions::default();
    assert!(core_empty(SatKind::Cost, &e1, &options).unwrap().is_empty());
    assert!(core_empty(SatKind::Share, &e3, &options).unwrap().is_empty());
    let unit = Election::unit_cost(2, 2, &[vec![0], vec![1]]).unwrap();
    assert_eq!(
        core_empty(SatKind::Cost, &unit, &options).unwrap(),
        CoreVerdict::InCore(Allocation::from_ids(&unit, &["p1", "p2"]).unwrap())
    );
}

#[test]
fn certificate_verification_examples() {
    let e = build_thm1();
    let policy = PrecisionPolicy::default();
    let pi = Allocation::from_ids(&e, &["l1", "s1", "l2"]).unwrap();
    let record = |voter: usize, before: i64, after: i64| pbcore::MemberRecord {
        voter,
        before: exact(before),
        after: exact(after),
    };
    let good = BlockingCertificate {
        coalition: e.voter_set(&["1", "2"]).unwrap(),
        deviation: e.project_set(&["p12"]).unwrap(),
        members: vec![record(0, 7, 8), record(1, 5, 8)],
    };
    assert_eq!(verify_certificate(SatKind::Cost, &e, &pi, &good, &policy), Ok(()));

    let alone = BlockingCertificate {
        coalition: e.voter_set(&["1"]).unwrap(),
        members: vec![record(0, 7, 8)],
        ..good.clone()
    };
    let err = verify_certificate(SatKind::Cost, &e, &pi, &alone, &policy).unwrap_err();
    assert_eq!(
        err,
        Rejection::BudgetShareViolated {
            cost: "8".into(),
            share: "5".into()
        }
    );

    let weak = BlockingCertificate {
        coalition: e.voter_set(&["1", "2"]).unwrap(),
        deviation: e.project_set(&["s1", "s2"]).unwrap(),
        members: vec![record(0, 7, 2), record(1, 5, 2)],
    };
    let err = verify_certificate(SatKind::Cost, &e, &pi, &weak, &policy).unwrap_err();
    assert_eq!(err.code(), "MemberNotImproved");
}
