// Decides consistency of interval models: single distributions, whole
// models, and a parametric model at fixed parameter values.

use std::error::Error;

use pipta::bundled;
use pipta::consistency::{feasible_supports, ipta_consistent, witness_distribution};
use pipta::model::Interval;
use pipta::rational::{self, ratio};
use pipta::zonegraph::ZoneGraphOptions;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    // The contention step of the root contention protocol: two choices of
    // [0.3, 0.4] can never add up to one.
    let contention = [Interval::new(ratio(3, 10), ratio(2, 5)), Interval::new(ratio(3, 10), ratio(2, 5))];
    println!("contention supports: {:?}", feasible_supports(&contention).supports);
    assert!(feasible_supports(&contention).is_empty());

    let ok = [Interval::new(ratio(0, 1), ratio(1, 5)), Interval::new(ratio(4, 5), ratio(1, 1))];
    let fs = feasible_supports(&ok);
    let w = witness_distribution(&ok).expect("consistent");
    let shown: Vec<String> = w.iter().map(rational::format).collect();
    println!("supports {:?}, witness [{}]", fs.supports, shown.join(", "));

    let opts = ZoneGraphOptions::default();
    let probta = ipta_consistent(&bundled::example_probta(), &opts)?;
    println!("example_probta consistent: {}", probta.verdict.consistent);
    assert!(probta.verdict.consistent);

    let m = bundled::example_pipta();
    for p in ["1", "3"] {
        let v = vec![rational::parse(p).unwrap()];
        let res = ipta_consistent(&m.instantiate(&v), &opts)?;
        let pruned: Vec<String> = res.verdict.pruned.iter().map(|&s| res.graph.state_label(s)).collect();
        println!("p = {p}: consistent = {}, pruned [{}]", res.verdict.consistent, pruned.join(", "));
        if let Some(imp) = &res.implementation {
            print!("{}", pipta::cli::print_model(imp));
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
