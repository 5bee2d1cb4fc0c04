mod common;

use std::collections::BTreeSet;

use common::{brute_force_const_ef_synth, brute_force_const_synth, random_model, valuation_grid, ModelShape};
use pipta::consistency::ipta_consistent;
use pipta::model::LocId;
use pipta::synthesis::{const_ef_synth, const_synth, lu_consistency_empty, SynthesisOptions, Verdict};
use pipta::zonegraph::{build_zone_graph, SymbolicImdp, ZoneGraphOptions};
use pipta::Pipta;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn corpus(seed: u64, count: usize, shape: &ModelShape, max_states: usize) -> Vec<(Pipta, SymbolicImdp)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let opts = ZoneGraphOptions { max_states, ..Default::default() };
    let mut out = Vec::new();
    let mut tries = 0;
    while out.len() < count {
        tries += 1;
        assert!(tries < 100 * count, "generator rarely yields small graphs");
        let m = random_model(&mut rng, shape);
        if let Ok(g) = build_zone_graph(&m, &opts) {
            if g.is_complete() && !g.transitions.is_empty() {
                out.push((m, g));
            }
        }
    }
    out
}

#[test]
fn const_synth_matches_exhaustive_enumeration() {
    let shape = ModelShape { params: 2, ..Default::default() };
    for (_, g) in corpus(31, 40, &shape, 9) {
        let fast = const_synth(&g, &SynthesisOptions::default()).unwrap().region;
        let slow = brute_force_const_synth(&g);
        assert!(fast.same_set(&slow), "{fast:?} vs {slow:?}");
    }
}

#[test]
fn const_ef_synth_matches_path_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let shape = ModelShape { params: 2, ..Default::default() };
    for (m, g) in corpus(33, 40, &shape, 8) {
        let goal: BTreeSet<LocId> = (0..m.locations.len()).filter(|_| rng.gen_bool(0.3)).map(LocId).collect();
        let fast = const_ef_synth(&g, &goal, &SynthesisOptions::default()).unwrap().region;
        let slow = brute_force_const_ef_synth(&g, &goal);
        assert!(fast.same_set(&slow), "goal {goal:?}: {fast:?} vs {slow:?}");
        let cons = const_synth(&g, &SynthesisOptions::default()).unwrap().region;
        assert!(cons.includes(&fast));
    }
}

#[test]
fn synthesised_regions_agree_with_instantiation() {
    let shape = ModelShape { clocks: 2, params: 1, ..Default::default() };
    let zg = ZoneGraphOptions::default();
    let mut checked = 0;
    for (m, g) in corpus(34, 40, &shape, 30) {
        let region = const_synth(&g, &SynthesisOptions::default()).unwrap().region;
        let mut points = valuation_grid(1);
        points.extend(region.sample_point());
        points.extend(region.complement().sample_point());
        for v in points {
            // Instantiation can merge two targets of one distribution.
            let Ok(concrete) = ipta_consistent(&m.instantiate(&v), &zg) else { continue };
            assert_eq!(region.contains_point(&v), concrete.verdict.consistent, "valuation {v:?}");
            checked += 1;
        }
    }
    assert!(checked > 200);
}

#[test]
fn lu_emptiness_agrees_with_synthesis() {
    let shape = ModelShape { params: 2, lu: true, ..Default::default() };
    let zg = ZoneGraphOptions::default();
    for (m, g) in corpus(35, 40, &shape, 30) {
        let region = const_synth(&g, &SynthesisOptions::default()).unwrap().region;
        let verdict = lu_consistency_empty(&m, &zg).unwrap();
        assert_ne!(verdict, Verdict::Unknown);
        assert_eq!(verdict == Verdict::True, region.is_empty(), "{}", pipta::cli::print_model(&m));
    }
}

#[test]
fn lu_reachability_is_monotone() {
    let shape = ModelShape { clocks: 2, params: 2, lu: true, ..Default::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(36);
    let zg = ZoneGraphOptions { max_states: 200, ..Default::default() };
    for (m, _) in corpus(37, 30, &shape, 30) {
        // p0 is an upper bound (raise it), p1 a lower bound (lower it).
        let v = vec![pipta::rational::int(rng.gen_range(0..=3)), pipta::rational::int(rng.gen_range(1..=4))];
        let w = vec![&v[0] + pipta::rational::int(1), &v[1] - pipta::rational::int(1)];
        let reach = |vals: &[pipta::Rational]| -> BTreeSet<LocId> {
            let g = build_zone_graph(&m.instantiate(vals), &zg).unwrap();
            assert!(g.is_complete());
            g.states.iter().map(|s| s.loc).collect()
        };
        assert!(reach(&v).is_subset(&reach(&w)));
    }
}
