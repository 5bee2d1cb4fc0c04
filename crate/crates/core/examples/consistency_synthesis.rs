// Synthesises the parameter valuations that make a model consistent.

use std::error::Error;

use pipta::bundled;
use pipta::synthesis::{synthesize, SynthesisOptions};
use pipta::zonegraph::ZoneGraphOptions;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    for (name, m) in bundled::all() {
        if !m.is_parametric() {
            continue;
        }
        let (g, res) = synthesize(&m, &ZoneGraphOptions::default(), &SynthesisOptions::default())?;
        println!(
            "{name:20} {:40} ({} states, {} kept sets examined)",
            res.region.render(&g.names()),
            g.states.len(),
            res.assignments_explored
        );
    }

    let m = bundled::example_pipta();
    let (g, res) = synthesize(&m, &ZoneGraphOptions::default(), &SynthesisOptions::default())?;
    assert_eq!(res.region.render_disjuncts(&g.names()), vec!["0 <= p < 2".to_string()]);
    if let Some(v) = res.region.sample_point() {
        println!("a consistent valuation: p = {}", pipta::rational::format(&v[0]));
    }
    if let Some(v) = res.region.complement().sample_point() {
        println!("an inconsistent valuation: p = {}", pipta::rational::format(&v[0]));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
