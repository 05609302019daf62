//! Constructs the dominating measure on the space enlarged by a death time
//! and checks its defining properties.

use deflator_lab::filtered_space::StoppingTime;
use deflator_lab::kunita_yoeurp::{build_dominating_measure, check_domination, verify_ky, Death};
use deflator_lab::rational::format;
use deflator_lab::scenarios;

fn main() -> deflator_lab::Result<()> {
    let f = scenarios::singleton_supermartingale();
    let dm = build_dominating_measure(&f.tree, &f.measure, f.process("Z")?)?;
    for i in 0..f.tree.num_leaves() {
        for d in dm.space.deaths() {
            let label = match d {
                Death::Never => "alive".to_string(),
                Death::At(k) => format!("dead at {k}"),
            };
            println!("leaf {i}, {label:>10}: Q = {}", format(dm.mass(i, d)));
        }
    }
    let times: Vec<StoppingTime> = (0..=f.tree.horizon()).map(|k| StoppingTime::deterministic(&f.tree, k)).collect();
    println!("Kunita-Yoeurp properties hold: {}", verify_ky(&f.tree, &dm, &times).passed());
    println!("P << Q on the final layer: {}", check_domination(&f.tree, &dm).holds);
    Ok(())
}
