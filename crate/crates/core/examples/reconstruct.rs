// Turns a zone graph back into a model whose locations are the graph's
// states; its own zone graph has the same shape.

use std::error::Error;

use pipta::bundled;
use pipta::cli::print_model;
use pipta::zonegraph::{build_zone_graph, isomorphic, reconstruct, ZoneGraphOptions};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let opts = ZoneGraphOptions::default();
    for m in [bundled::example_probta(), bundled::example_pipta()] {
        let g = build_zone_graph(&m, &opts)?;
        let r = reconstruct(&g, &m)?;
        print!("{}", print_model(&r));
        let again = build_zone_graph(&r, &opts)?;
        isomorphic(&g, &again)?;
        println!("{} states on both sides\n", again.states.len());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
