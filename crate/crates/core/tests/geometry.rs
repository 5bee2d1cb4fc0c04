mod common;

use common::{lp_feasible, lp_projection_contains, random_zone_ineqs, valuation_grid};
use pipta::geometry::{Ineq, LinTerm, Names, PZone, ParamRegion};
use pipta::rational::int;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn emptiness_agrees_with_linear_programming() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..300 {
        let (c, p) = (rng.gen_range(1..=3), rng.gen_range(0..=2));
        let sys = random_zone_ineqs(&mut rng, c, p);
        let z = PZone::from_ineqs(c, p, sys.clone());
        assert_eq!(z.is_empty(), !lp_feasible(c + p, &sys), "{sys:?}");
    }
}

#[test]
fn projection_agrees_with_linear_programming() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..200 {
        let (c, p) = (rng.gen_range(1..=3), rng.gen_range(1..=2));
        let sys = random_zone_ineqs(&mut rng, c, p);
        let proj = PZone::from_ineqs(c, p, sys.clone()).project_params();
        for v in valuation_grid(p) {
            assert_eq!(proj.contains_point(&v), lp_projection_contains(c, &sys, &v), "{sys:?} at {v:?}");
        }
    }
}

fn arb_zone() -> impl Strategy<Value = PZone> {
    (1usize..=2, 0usize..=1, any::<u64>()).prop_map(|(c, p, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        PZone::from_ineqs(c, p, random_zone_ineqs(&mut rng, c, p))
    })
}

fn clock_names() -> Vec<String> {
    vec!["x".into(), "y".into()]
}

fn param_names() -> Vec<String> {
    vec!["p".into()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn elapse_is_idempotent_and_extensive(z in arb_zone()) {
        let e = z.time_elapse();
        prop_assert!(e.includes(&z));
        prop_assert_eq!(e.time_elapse(), e);
    }

    #[test]
    fn reset_pins_clock_to_zero(z in arb_zone()) {
        let r = z.reset(&[0]);
        if !r.is_empty() {
            let mut pt = r.sample_point().unwrap();
            prop_assert_eq!(&pt[0], &int(0));
            pt[0] = int(1);
            prop_assert!(!r.contains_point(&pt));
        }
        prop_assert_eq!(r.is_empty(), z.is_empty());
    }

    #[test]
    fn canonical_form_ignores_constraint_order(c in 1usize..=2, p in 0usize..=1, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut sys = random_zone_ineqs(&mut rng, c, p);
        let a = PZone::from_ineqs(c, p, sys.clone());
        sys.reverse();
        let b = PZone::from_ineqs(c, p, sys);
        prop_assert_eq!(&a, &b);
        let (cn, pn) = (clock_names(), param_names());
        let names = Names::new(&cn[..c], &pn[..p]);
        prop_assert_eq!(a.render(&names), b.render(&names));
    }

    #[test]
    fn canonical_form_and_hull_are_set_invariants(c in 1usize..=3, p in 0usize..=2, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut sys = random_zone_ineqs(&mut rng, c, p);
        // Pin a random form so the zone is often lower dimensional.
        if let Some(i) = sys.iter().position(|i| !i.strict) {
            sys.push(Ineq::le(sys[i].term.scale(&int(-1))));
        }
        let z = PZone::from_ineqs(c, p, sys.clone());
        let mut implied = sys.clone();
        implied.reverse();
        if sys.len() >= 2 {
            let sum = sys[0].term.add_scaled(&sys[1].term, &int(1));
            implied.push(Ineq { term: sum, strict: sys[0].strict || sys[1].strict });
        }
        let w = PZone::from_ineqs(c, p, implied);
        prop_assert!(z.same_set(&w));
        prop_assert_eq!(&z, &w);
        let hull = z.affine_hull();
        prop_assert_eq!(&hull, &w.affine_hull());
        if let Some(pt) = z.sample_point() {
            for row in &hull {
                prop_assert_eq!(row.eval(&pt), int(0));
                prop_assert!(z.constrain([Ineq::lt(row.clone())]).is_empty());
            }
        }
    }

    #[test]
    fn sample_points_belong_to_the_zone(z in arb_zone()) {
        match z.sample_point() {
            Some(pt) => prop_assert!(z.contains_point(&pt)),
            None => prop_assert!(z.is_empty()),
        }
    }

    #[test]
    fn inclusion_is_a_preorder(a in arb_zone(), seed in any::<u64>()) {
        prop_assert!(a.includes(&a));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = a.constrain(random_zone_ineqs(&mut rng, a.clocks(), a.params()));
        prop_assert!(a.includes(&b));
        prop_assert!(a.intersect(&b).same_set(&b));
    }

    #[test]
    fn extrapolation_only_widens(z in arb_zone(), k in 0i64..=3) {
        let e = z.k_extrapolate(&int(k), &[]);
        prop_assert!(e.includes(&z));
        prop_assert_eq!(e.k_extrapolate(&int(k), &[]), e);
    }

    #[test]
    fn projection_contains_projected_samples(z in arb_zone()) {
        if let Some(pt) = z.sample_point() {
            let params = &pt[z.clocks()..];
            prop_assert!(z.project_params().contains_point(params));
        }
    }

    #[test]
    fn complement_partitions_the_orthant(seed in any::<u64>(), p in 1usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = ParamRegion::from_zone(PZone::from_ineqs(0, p, random_zone_ineqs(&mut rng, p, 0)));
        let b = ParamRegion::from_zone(PZone::from_ineqs(0, p, random_zone_ineqs(&mut rng, p, 0)));
        let r = a.union(&b);
        let c = r.complement();
        prop_assert!(r.intersect(&c).is_empty());
        prop_assert!(r.union(&c).is_top());
        prop_assert!(c.complement().same_set(&r));
        prop_assert!(r.includes(&a) && r.includes(&b));
    }
}

#[test]
fn rendering_of_parametric_diagonals() {
    let clocks = clock_names();
    let params = param_names();
    let names = Names::new(&clocks, &params);
    let x = LinTerm::var(0);
    let y = LinTerm::var(1);
    let p = LinTerm::var(2);
    let z = PZone::from_ineqs(
        2,
        1,
        vec![Ineq::le(LinTerm::constant(int(2)) - y.clone() + x.clone()), Ineq::le(y - x - p)],
    );
    assert_eq!(z.render(&names), "x >= 0 && 2 <= y - x <= p");
}
