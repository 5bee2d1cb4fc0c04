// Parses a model from text, validates it and prints it back.

use std::error::Error;

use pipta::cli::{parse_model, print_model};

const SOURCE: &str = "
pipta toss
clocks x;
params p;
actions throw, land;
init idle;

loc idle {
  when x >= p sync throw goto { [0.3, 0.7] reset {x} -> heads; [0.3, 0.7] reset {x} -> tails }
}
loc heads {
  when x <= 1 sync land goto idle
}
loc tails {
  when x <= 1 sync land goto idle
}
";

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let m = parse_model(SOURCE)?;
    let report = m.validate();
    println!("{}: {} locations, {} edges, valid = {}", m.name, m.locations.len(), m.edges.len(), report.is_ok());
    assert!(report.is_ok());
    assert!(m.is_lu());

    // A broken interval is reported with its position in the model.
    let broken = SOURCE.replace("[0.3, 0.7] reset {x} -> heads", "[0.8, 0.7] reset {x} -> heads");
    let report = parse_model(&broken)?.validate();
    for v in &report.violations {
        println!("violation: {v}");
    }
    assert!(!report.is_ok());

    // Syntax errors carry line and column.
    let err = parse_model("pipta bad\nclocks x;\ninit l0;\nloc l0 { when x <= sync a goto l0 }").unwrap_err();
    println!("syntax error: {err}");

    let text = print_model(&m);
    assert_eq!(parse_model(&text)?, m);
    print!("{text}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
