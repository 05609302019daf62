//! Builds the minimal supermartingale deflator of a random market by
//! backward induction and certifies it exactly.

use deflator_lab::arbitrage::WealthProblem;
use deflator_lab::deflator::{construct_deflator, verify_deflation};
use deflator_lab::random::{random_market, MarketShape};
use deflator_lab::rational::format;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> deflator_lab::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let shape = MarketShape::default();
    // draw until the market satisfies NA1
    let (m, d) = loop {
        let m = random_market(&mut rng, &shape);
        let wp = WealthProblem::new(&m.tree, &m.p, &m.s)?;
        if let Ok(d) = construct_deflator(&wp) {
            break (m, d);
        }
    };
    println!("tree: horizon {}, {} nodes", m.tree.horizon(), m.tree.num_nodes());
    for v in 0..m.tree.num_nodes() {
        let da = if m.tree.is_leaf(v) { "-".to_string() } else { format(&d.doob.increments.at(v)[0]) };
        println!("  node {v:>2} t={} S={:>6} Z={:>8} dA={da}", m.tree.time(v), format(m.s.at(v)), format(d.z.at(v)));
    }
    let wp = WealthProblem::new(&m.tree, &m.p, &m.s)?;
    let cert = verify_deflation(&wp, &d.z, 200, 1)?;
    println!("certificate passed: {}, sampled strategies: {}", cert.passed(), cert.trials);
    Ok(())
}
