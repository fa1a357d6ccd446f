// SPDX-License-Identifier: Apache-2.0

mod common;

use std::collections::BTreeMap;

use common::{int, q, random_election};
use pbcore::{
    build_thm1, build_thm2, build_thm3, core_empty, find_blocking, verify_certificate,
    verify_verdict, Allocation, BlockingCertificate, CoreOptions, CoreVerdict, Election,
    PrecisionPolicy, ProjectSet, SatKind, VoterSet,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Case = (SatKind, Election, Allocation, BlockingCertificate);

/// Certificates produced by the checker, over the fixed instances and a
/// batch of random elections.
fn corpus() -> Vec<Case> {
    let options = CoreOptions::default();
    let mut out = Vec::new();
    let mut add = |kind: SatKind, e: &Election| {
        let mut ev_cases = Vec::new();
        match core_empty(kind, e, &options).unwrap() {
            CoreVerdict::Empty(w) => ev_cases.extend(w),
            CoreVerdict::InCore(_) => {
                for set in e.feasible_sets() {
                    let pi = Allocation::new(e, set).unwrap();
                    if let Some(cert) = find_blocking(kind, e, &pi).unwrap() {
                        ev_cases.push((pi, cert));
                    }
                }
            }
        }
        for (pi, cert) in ev_cases {
            out.push((kind, e.clone(), pi, cert));
        }
    };
    add(SatKind::Cost, &build_thm1());
    add(SatKind::Share, &build_thm3());
    add(SatKind::SumLog, &build_thm2(&int(9999), &q(1, 2)).unwrap());
    add(SatKind::GlobalSqrt, &build_thm2(&int(9999), &q(1, 2)).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for round in 0..24 {
        let e = random_election(&mut rng, 3, 5, 0.5);
        add(SatKind::ALL[round % SatKind::ALL.len()], &e);
    }
    out
}

#[test]
fn every_produced_certificate_verifies() {
    let policy = PrecisionPolicy::default();
    let cases = corpus();
    assert!(cases.len() > 500, "{}", cases.len());
    for (kind, e, pi, cert) in &cases {
        assert_eq!(verify_certificate(*kind, e, pi, cert, &policy), Ok(()), "{}", cert.describe(e));
    }
}

/// Applies mutation `which` and returns the reason code it must be
/// rejected with, or `None` if the mutation does not apply to this case.
fn corrupt(which: usize, e: &Election, cert: &BlockingCertificate) -> Option<(BlockingCertificate, &'static str)> {
    let mut bad = cert.clone();
    let code = match which {
        0 => {
            bad.coalition = VoterSet::EMPTY;
            "EmptyCoalition"
        }
        1 => {
            bad.coalition = bad.coalition.with(e.num_voters());
            "UnknownVoter"
        }
        2 => {
            bad.deviation = bad.deviation.with(e.num_projects());
            "UnknownProject"
        }
        3 => {
            let all = e.all_projects();
            if e.within_budget_share(cert.coalition.len(), all) {
                return None;
            }
            bad.deviation = all;
            "BudgetShareViolated"
        }
        4 => {
            bad.deviation = ProjectSet::EMPTY;
            "MemberNotImproved"
        }
        5 => {
            bad.members.pop();
            "MemberRecordMismatch"
        }
        6 => {
            let m = &mut bad.members[0];
            m.before = m.after.clone();
            "RecordedValueMismatch"
        }
        _ => {
            // a member dropped from the coalition but kept in the records
            if cert.coalition.len() < 2 {
                return None;
            }
            let last = cert.coalition.iter().last().expect("nonempty");
            bad.coalition = bad.coalition.without(last);
            if !e.within_budget_share(bad.coalition.len(), bad.deviation) {
                return None;
            }
            "MemberRecordMismatch"
        }
    };
    Some((bad, code))
}

#[test]
fn corrupted_certificates_are_rejected_with_the_right_code() {
    let policy = PrecisionPolicy::default();
    let cases = corpus();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut seen: BTreeMap<&'static str, usize> = BTreeMap::new();
    for _ in 0..3000 {
        let (kind, e, pi, cert) = &cases[rng.random_range(0..cases.len())];
        let Some((bad, code)) = corrupt(rng.random_range(0..8), e, cert) else {
            continue;
        };
        let rejection = verify_certificate(*kind, e, pi, &bad, &policy).unwrap_err();
        assert_eq!(rejection.code(), code, "{} -> {:?}", cert.describe(e), bad);
        *seen.entry(code).or_default() += 1;
    }
    assert_eq!(seen.len(), 7, "{seen:?}");
}

#[test]
fn verdicts_with_missing_or_wrong_witnesses_are_rejected() {
    let e = build_thm1();
    let policy = PrecisionPolicy::default();
    let verdict = core_empty(SatKind::Cost, &e, &CoreOptions::default()).unwrap();
    assert_eq!(verify_verdict(SatKind::Cost, &e, &verdict, &policy), Ok(43));
    let CoreVerdict::Empty(witnesses) = verdict else {
        unreachable!()
    };

    let mut missing = witnesses.clone();
    let first = *missing.keys().next().unwrap();
    missing.remove(&first);
    assert!(verify_verdict(SatKind::Cost, &e, &CoreVerdict::Empty(missing), &policy).is_err());

    // the same certificates under another satisfaction function
    let err = verify_verdict(SatKind::Cardinality, &e, &CoreVerdict::Empty(witnesses), &policy).unwrap_err();
    assert!(err.0.is_some());
}
