//! Checks (NA), (NA1) and (NFLVR) on the one-step binomial and on a
//! deterministic drift, printing the optimum and any witness.

use deflator_lab::arbitrage::{check_both, WealthProblem};
use deflator_lab::rational::format;
use deflator_lab::scenarios;

fn main() -> deflator_lab::Result<()> {
    for (name, f) in [("binomial", scenarios::binomial()), ("deterministic drift", scenarios::deterministic_drift())] {
        let s = f.process("S")?;
        let r = check_both(&WealthProblem::new(&f.tree, &f.measure, s)?)?;
        let na1 = r.na1.as_ref().expect("both checks ran");
        println!("{name}:");
        println!("  NA    {}", r.na_holds().unwrap());
        match na1.optimal_value.finite() {
            Some(v) => println!("  NA1   true, sup E[X] over 1-admissible wealth = {}", format(v)),
            None => println!("  NA1   false, unbounded along ray {:?}", na1.ray.as_ref().map(|h| h.values().iter().map(format).collect::<Vec<_>>())),
        }
        println!("  NFLVR {}", r.nflvr().unwrap());
    }
    Ok(())
}
