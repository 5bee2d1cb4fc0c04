// Consistency-emptiness for models whose parameters are only lower or only
// upper bounds, through support combinations and universal reachability.

use std::error::Error;

use pipta::bundled;
use pipta::synthesis::{comb_fs, ef_univ, lu_consistency_empty_jobs, make_non_det};
use pipta::zonegraph::ZoneGraphOptions;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let opts = ZoneGraphOptions::default();
    let m = bundled::lu_pipta();
    println!("parameter classes: {:?}", m.classify_lu());

    let combos = comb_fs(&m);
    println!("{} support combinations", combos.len());
    for (i, c) in combos.iter().enumerate() {
        let (nd, acc) = make_non_det(c);
        let acc_names: Vec<&str> = acc.iter().map(|&l| nd.loc_name(l)).collect();
        let v = ef_univ(&nd, &acc, &opts)?;
        println!("  combination {i}: some of {{{}}} always reachable = {}", acc_names.join(", "), v.as_str());
    }

    for (name, model) in bundled::all() {
        if model.is_lu() && model.is_parametric() {
            let v = lu_consistency_empty_jobs(&model, &opts, 2)?;
            println!("{name:20} no consistent valuation: {}", v.as_str());
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
