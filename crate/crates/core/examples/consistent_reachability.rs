// Valuations that are consistent and let an implementation reach a goal.

use std::collections::BTreeSet;
use std::error::Error;

use pipta::bundled;
use pipta::synthesis::{const_ef_synth, const_synth, SynthesisOptions};
use pipta::zonegraph::{build_zone_graph, ZoneGraphOptions};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let opts = SynthesisOptions::default();
    for (model, goals) in [(bundled::example_pipta(), ["l5", "l3"]), (bundled::counter_example_ef(), ["l1", "l2"])] {
        let g = build_zone_graph(&model, &ZoneGraphOptions::default())?;
        let names = g.names();
        println!("{}: consistent when {}", model.name, const_synth(&g, &opts)?.region.render(&names));
        for goal in goals {
            let target = BTreeSet::from([model.location(goal).ok_or("unknown location")?]);
            let res = const_ef_synth(&g, &target, &opts)?;
            println!("  reach {goal}: {}", res.region.render(&names));
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
