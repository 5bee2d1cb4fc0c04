mod common;

use common::{random_model, ModelShape};
use pipta::cli::{parse_model, print_model};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn print_then_parse_is_identity(seed in any::<u64>(), clocks in 1usize..=3, params in 0usize..=2, shuffle in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shape = ModelShape { clocks, params, locations: 5, max_edges: 3, ..Default::default() };
        let mut m = random_model(&mut rng, &shape);
        if shuffle {
            m.edges.shuffle(&mut rng);
        }
        let text = print_model(&m);
        let back = parse_model(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(&back, &m, "{}", text);
        prop_assert_eq!(print_model(&back), text);
    }
}

#[test]
fn bundled_models_round_trip() {
    for (name, m) in pipta::bundled::all() {
        let back = parse_model(&print_model(&m)).unwrap();
        assert_eq!(back, m, "{name}");
    }
}
