// SPDX-License-Identifier: Apache-2.0

mod common;

use std::io::Write;

use common::int;
use pbcore::search::{Family, SearchLimits};
use pbcore::{
    build_thm1, build_thm3, canonical_key, run_search, verify_verdict, CoreOptions,
    PrecisionPolicy, SatKind, SearchSpace,
};

fn all_space() -> SearchSpace {
    SearchSpace {
        family: Family::All,
        voters: vec![2, 3],
        projects: vec![3],
        costs: vec![int(1), int(2), int(3)],
        budgets: vec![int(3), int(4)],
        symmetry_reduction: true,
        unit_cost: false,
    }
}

fn keys(report: &pbcore::SearchReport) -> Vec<String> {
    report.counterexamples.iter().map(|c| c.key.clone()).collect()
}

#[test]
fn gadget_grid_rediscovers_the_fixed_instances() {
    let costs = [int(2), int(3), int(5), int(8), int(11)];
    let space = SearchSpace::gadget(&[3], &costs, &[int(15), int(21)]);
    let limits = SearchLimits::default();
    let cost = run_search(SatKind::Cost, &space, 0, &limits).unwrap();
    assert!(keys(&cost).contains(&canonical_key(&build_thm1())));
    let share = run_search(SatKind::Share, &space, 0, &limits).unwrap();
    assert!(keys(&share).contains(&canonical_key(&build_thm3())));
    for c in cost.counterexamples.iter().chain(&share.counterexamples) {
        assert!(c.verdict.is_empty());
    }
}

#[test]
fn parallel_and_sequential_reports_match() {
    let space = all_space();
    let sequential = run_search(SatKind::Cost, &space, 1, &SearchLimits::default()).unwrap();
    let parallel = run_search(
        SatKind::Cost,
        &space,
        1,
        &SearchLimits {
            core: CoreOptions {
                parallel: true,
                ..CoreOptions::default()
            },
            ..SearchLimits::default()
        },
    )
    .unwrap();
    assert_eq!(
        serde_json::to_string(&sequential.to_json()).unwrap(),
        serde_json::to_string(&parallel.to_json()).unwrap()
    );
    assert!(sequential.duplicates > 0);
}

#[test]
fn counterexamples_carry_valid_certificates() {
    let space = SearchSpace {
        family: Family::Random {
            approval_probability: 0.5,
            samples: 300,
        },
        voters: vec![3],
        projects: vec![5],
        costs: vec![int(1), int(2), int(3), int(5), int(8)],
        budgets: vec![int(8), int(15)],
        symmetry_reduction: false,
        unit_cost: false,
    };
    for kind in [SatKind::Cost, SatKind::Share, SatKind::SumSqrt] {
        let report = run_search(kind, &space, 42, &SearchLimits::default()).unwrap();
        assert_eq!(report.generated, 300);
        for c in &report.counterexamples {
            let n = verify_verdict(kind, &c.election, &c.verdict, &PrecisionPolicy::default()).unwrap();
            assert_eq!(n, c.election.exhaustive_sets().count());
        }
    }
}

#[test]
fn interrupted_search_resumes_from_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("grid.ckpt");
    let space = all_space();
    let kind = SatKind::Cost;
    let full = run_search(kind, &space, 0, &SearchLimits::default()).unwrap();
    assert!(full.examined > 20);

    let first = run_search(
        kind,
        &space,
        0,
        &SearchLimits {
            max_instances: Some(full.examined / 2),
            checkpoint: Some(path.clone()),
            checkpoint_every: 3,
            ..SearchLimits::default()
        },
    )
    .unwrap();
    assert_eq!(first.examined, full.examined / 2);
    let logged = std::fs::read_to_string(&path).unwrap();
    assert_eq!(logged.lines().count() as u64, first.examined);

    // a torn final line from a crash mid-write is ignored
    let mut f = std::fs::OpenOptions::new().append(true).open(&path).unwrap();
    f.write_all(b"b=3;n=2;c=1,2").unwrap();
    drop(f);

    let resumed = run_search(
        kind,
        &space,
        0,
        &SearchLimits {
            checkpoint: Some(path.clone()),
            ..SearchLimits::default()
        },
    )
    .unwrap();
    let in_core_logged = logged.lines().filter(|l| l.ends_with("\tin_core")).count() as u64;
    assert_eq!(resumed.resumed, in_core_logged);
    assert_eq!(resumed.examined + resumed.resumed, full.examined);
    assert_eq!(keys(&resumed), keys(&full));
    let entries: Vec<String> = std::fs::read_to_string(&path)
        .unwrap()
        .lines()
        .filter(|l| l.contains('\t'))
        .map(str::to_string)
        .collect();
    assert_eq!(entries.len() as u64, full.examined);
}
