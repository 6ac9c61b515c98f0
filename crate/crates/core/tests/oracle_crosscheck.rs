//! Checks the partition-refinement oracle against plain trajectory
//! comparison, and the realization against the oracle on random systems.

mod common;

use common::{exhaustive_binary_pairs, random_corpus};
use dsff::funcspace::{FuncTable, StateIndexing, StateMap};
use dsff::observability::analyze;
use dsff::oracle::{oracle_state_index, oracle_system};
use dsff::system::{simulate, Dsff};
use proptest::prelude::*;

/// `K_{x0}` from full trajectories: the shortest prefix no other state shares.
fn pairwise_index(sys: &Dsff, x0: usize) -> Option<usize> {
    let horizon = sys.num_states();
    let mine = simulate(sys, x0, horizon).unwrap();
    let mut worst = 1;
    for other in sys.indexing().states().filter(|&s| s != x0) {
        let theirs = simulate(sys, other, horizon).unwrap();
        let split = mine.samples().iter().zip(theirs.samples()).position(|(a, b)| a != b)?;
        worst = worst.max(split + 1);
    }
    Some(worst)
}

#[test]
fn refinement_matches_pairwise_prefixes() {
    let cases = exhaustive_binary_pairs().into_iter().chain(random_corpus(120));
    for case in cases {
        let verdict = oracle_system(&case.sys);
        for x0 in case.sys.indexing().states() {
            let expected = pairwise_index(&case.sys, x0);
            assert_eq!(verdict.per_state_index[x0], expected, "{} x0={x0}", case.name);
            assert_eq!(oracle_state_index(&case.sys, x0).unwrap(), expected, "{} x0={x0}", case.name);
        }
    }
}

#[test]
fn indistinguishable_classes_share_trajectories() {
    for case in random_corpus(120) {
        let verdict = oracle_system(&case.sys);
        let horizon = case.sys.num_states();
        for class in &verdict.indistinguishable {
            let z = simulate(&case.sys, class[0], horizon).unwrap();
            for &x in &class[1..] {
                assert_eq!(simulate(&case.sys, x, horizon).unwrap(), z, "{}", case.name);
            }
        }
    }
}

fn arb_system() -> impl Strategy<Value = Dsff> {
    (prop_oneof![Just(2u32), Just(3), Just(4)], 1usize..=3, 1usize..=2).prop_flat_map(|(q, n, m)| {
        let size = (q as usize).pow(n as u32);
        (proptest::collection::vec(0..size, size), proptest::collection::vec(proptest::collection::vec(0..q, size), m))
            .prop_map(move |(next, outs)| {
                let f = common::field(q);
                let idx = StateIndexing::new(&f, n).unwrap();
                let map = StateMap::new(&idx, next).unwrap();
                let outputs = outs.iter().map(|col| FuncTable::from_fn(&idx, |s| f.element(col[s]).unwrap())).collect();
                Dsff::new(map, outputs).unwrap()
            })
    })
}

proptest! {
    #[test]
    fn realization_verdict_matches_oracle(sys in arb_system()) {
        let report = analyze(&sys).unwrap();
        let verdict = oracle_system(&sys);
        prop_assert_eq!(report.system_observable, verdict.observable);
        if let Some(k) = verdict.system_index {
            prop_assert!(k <= report.dim);
        }
    }
}
