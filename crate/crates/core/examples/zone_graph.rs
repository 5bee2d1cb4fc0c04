// Builds the parametric zone graph of a bundled model and exports it as DOT.

use std::error::Error;

use pipta::bundled;
use pipta::zonegraph::{build_zone_graph, export_dot, reachability_condition, ZoneGraphOptions};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let m = bundled::example_pipta();
    let g = build_zone_graph(&m, &ZoneGraphOptions::default())?;
    let names = g.names();
    for s in 0..g.states.len() {
        let cond = reachability_condition(&g, s);
        println!("{}  reachable when {}", g.render_state(s), cond.render(&names));
    }
    println!("{} states, {} transitions, extrapolation constant {}", g.states.len(), g.transitions.len(), g.k);
    assert!(g.is_complete());

    let dot = export_dot(&g);
    assert!(dot.starts_with("digraph"));
    println!("DOT export: {} lines", dot.lines().count());

    // A tight state budget truncates the exploration and says so.
    let small = build_zone_graph(&m, &ZoneGraphOptions { max_states: 4, ..Default::default() })?;
    println!("with max_states = 4: {} states, complete = {}", small.states.len(), small.is_complete());
    assert!(!small.is_complete());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
