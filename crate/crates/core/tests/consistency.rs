mod common;

use common::{fs_oracle, random_intervals, random_model, ModelShape};
use pipta::bundled;
use pipta::consistency::{feasible_supports, ipta_consistent, locally_consistent, prune_imdp, prune_imdp_by, witness_distribution};
use pipta::model::Interval;
use pipta::rational::parse;
use pipta::zonegraph::{build_zone_graph, ZoneGraphOptions};
use proptest::prelude::*;
use rand::seq::IteratorRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn iv(lo: &str, hi: &str) -> Interval {
    Interval::new(parse(lo).unwrap(), parse(hi).unwrap())
}

#[test]
fn supports_agree_with_construction() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..2000 {
        let ivs = random_intervals(&mut rng, 5);
        assert_eq!(feasible_supports(&ivs).supports, fs_oracle(&ivs), "{ivs:?}");
    }
}

#[test]
fn rcp_node_intervals() {
    assert!(feasible_supports(&[iv("0.3", "0.4"), iv("0.3", "0.4")]).is_empty());
    assert_eq!(feasible_supports(&[iv("0.5", "1"), iv("0.5", "1")]).len(), 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn local_consistency_is_support_existence(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ivs = random_intervals(&mut rng, 6);
        prop_assert_eq!(locally_consistent(&ivs), !feasible_supports(&ivs).is_empty());
        if let Some(mu) = witness_distribution(&ivs) {
            prop_assert_eq!(mu.iter().cloned().sum::<pipta::Rational>(), pipta::rational::one());
            prop_assert!(ivs.iter().zip(&mu).all(|(i, p)| i.contains(p)));
        }
    }
}

fn random_graphs(seed: u64, count: usize) -> Vec<(pipta::Pipta, pipta::zonegraph::SymbolicImdp)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shape = ModelShape { clocks: 2, params: 0, locations: 5, ..Default::default() };
    let opts = ZoneGraphOptions { max_states: 60, ..Default::default() };
    let mut out = Vec::new();
    while out.len() < count {
        let m = random_model(&mut rng, &shape);
        if let Ok(g) = build_zone_graph(&m, &opts) {
            if g.is_complete() {
                out.push((m, g));
            }
        }
    }
    out
}

#[test]
fn pruning_order_does_not_matter() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for (_, g) in random_graphs(23, 60) {
        let base = prune_imdp(&g);
        for _ in 0..3 {
            let other = prune_imdp_by(&g, |inc| *inc.iter().choose(&mut rng).unwrap());
            assert_eq!(base.consistent, other.consistent);
        }
    }
}

#[test]
fn witnesses_check_and_reconstruct() {
    let opts = ZoneGraphOptions::default();
    let mut consistent = 0;
    for (m, g) in random_graphs(24, 60) {
        let r = ipta_consistent(&m, &opts).unwrap();
        assert_eq!(r.verdict.consistent, prune_imdp(&g).consistent);
        if let Some(w) = &r.verdict.witness {
            consistent += 1;
            w.check(&r.graph).unwrap();
            let imp = r.implementation.as_ref().unwrap();
            assert!(imp.validate().is_ok(), "{}", imp.validate());
            assert!(imp.is_point_model());
            // The implementation is a consistent probabilistic model in its own right.
            assert!(ipta_consistent(imp, &opts).unwrap().verdict.consistent);
        }
    }
    assert!(consistent > 0, "random corpus never consistent");
}

#[test]
fn rcp_node_is_inconsistent_at_root_idle() {
    let m = bundled::rcp_node();
    let values: Vec<pipta::Rational> = ["76", "85", "159", "167"].iter().map(|v| parse(v).unwrap()).collect();
    let r = ipta_consistent(&m.instantiate(&values), &ZoneGraphOptions::default()).unwrap();
    assert!(!r.verdict.consistent);
    let first = r.verdict.pruned[0];
    assert_eq!(r.graph.locations[r.graph.states[first].loc.0], "ROOT_IDLE");
}
