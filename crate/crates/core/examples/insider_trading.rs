//! An insider who knows the terminal state of a complete binomial market:
//! the replicating hedge of the known event is an arbitrage, and no
//! equivalent martingale measure exists on the enlarged filtration.

use deflator_lab::enlargement::{insider_example, EmmVerdict, EnlargementSpec};
use deflator_lab::rational::format;
use deflator_lab::scenarios;

fn main() -> deflator_lab::Result<()> {
    let (f, labels) = scenarios::insider_binomial_two_step();
    let spec = EnlargementSpec::new(&f.tree, &labels)?;
    let a = spec.label_index("above").expect("fixture label");
    let r = insider_example(&f.tree, &f.measure, f.process("S")?, &spec, &[a])?;
    println!("P(A) = {}, replication cost = {}", format(&r.prob_a), format(&r.replication_cost));
    println!("insider terminal wealth: {:?}", r.g_terminal_wealth.iter().map(format).collect::<Vec<_>>());
    println!("arbitrage verified: {}, NA under G: {}", r.arbitrage_verified, r.na_under_g);
    match &r.emm {
        EmmVerdict::Infeasible { verified, .. } => println!("martingale measure: none (Farkas certificate verified: {verified})"),
        other => println!("martingale measure: {other:?}"),
    }
    println!("strict NA1 under G: {}", r.na1_under_g);
    println!("product deflator certificate for path-admissible strategies: {}", r.robust_na1.passed);
    Ok(())
}
