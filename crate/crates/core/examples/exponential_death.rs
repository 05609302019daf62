//! A price that doubles while the density halves: the stopped price is not
//! a martingale under the dominating measure, yet P stays dominated.

use deflator_lab::kunita_yoeurp::{build_dominating_measure, check_domination, check_stopped_price};
use deflator_lab::rational::format;
use deflator_lab::scenarios;

fn main() -> deflator_lab::Result<()> {
    let f = scenarios::exponential_death();
    let dm = build_dominating_measure(&f.tree, &f.measure, f.process("Z")?)?;
    let r = check_stopped_price(&f.tree, &dm, f.process("S")?)?;
    println!("stopped price is a Q-martingale: {}", r.martingale);
    for v in &r.violations {
        println!("  step {} -> {}: drift {}", v.step, v.step + 1, format(&v.drift[0]));
    }
    println!("P << Q: {}", check_domination(&f.tree, &dm).holds);
    Ok(())
}
