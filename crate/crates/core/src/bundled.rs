//! Example models shipped with the crate.

use crate::cli::parse_model;
use crate::model::Pipta;

pub const EXAMPLE_PROBTA: &str = include_str!("../models/example_probta.pipta");
pub const EXAMPLE_PIPTA: &str = include_str!("../models/example_pipta.pipta");
pub const LU_PIPTA: &str = include_str!("../models/lu_pipta.pipta");
pub const COUNTER_EXAMPLE_LU: &str = include_str!("../models/counter_example_lu.pipta");
pub const COUNTER_EXAMPLE_EF: &str = include_str!("../models/counter_example_ef.pipta");
pub const RCP_NODE: &str = include_str!("../models/rcp_node.pipta");

/// Source text of every bundled model, by name.
pub const SOURCES: [(&str, &str); 6] = [
    ("example_probta", EXAMPLE_PROBTA),
    ("example_pipta", EXAMPLE_PIPTA),
    ("lu_pipta", LU_PIPTA),
    ("counter_example_lu", COUNTER_EXAMPLE_LU),
    ("counter_example_ef", COUNTER_EXAMPLE_EF),
    ("rcp_node", RCP_NODE),
];

fn load(src: &str) -> Pipta {
    parse_model(src).expect("bundled model parses")
}

pub fn example_probta() -> Pipta {
    load(EXAMPLE_PROBTA)
}

pub fn example_pipta() -> Pipta {
    load(EXAMPLE_PIPTA)
}

pub fn lu_pipta() -> Pipta {
    load(LU_PIPTA)
}

pub fn counter_example_lu() -> Pipta {
    load(COUNTER_EXAMPLE_LU)
}

pub fn counter_example_ef() -> Pipta {
    load(COUNTER_EXAMPLE_EF)
}

pub fn rcp_node() -> Pipta {
    load(RCP_NODE)
}

pub fn by_name(name: &str) -> Option<Pipta> {
    SOURCES.iter().find(|(n, _)| *n == name).map(|(_, s)| load(s))
}

pub fn all() -> Vec<(&'static str, Pipta)> {
    SOURCES.iter().map(|(n, s)| (*n, load(s))).collect()
}
