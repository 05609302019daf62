//! Jacod's condition and the universal supermartingale density for an
//! initial enlargement by the first of two coins.

use deflator_lab::enlargement::{
    check_deflated_supermartingale, indicator_martingale, jacod_check, log_utility_identity, universal_density,
    EnlargementSpec,
};
use deflator_lab::rational::format;
use deflator_lab::scenarios;

fn main() -> deflator_lab::Result<()> {
    let (f, labels) = scenarios::jacod_coins();
    let spec = EnlargementSpec::new(&f.tree, &labels)?;
    let j = jacod_check(&f.tree, &f.measure, &spec)?;
    println!("Jacod's condition: {}, reverse absolute continuity: {}", j.holds, j.reverse_holds);
    let (gt, z) = universal_density(&f.tree, &f.measure, &spec)?;
    for g in gt.tree.layer(2) {
        let (base, label) = gt.origin[g].expect("non-root");
        println!("  base node {base}, label {}: Z = {}", spec.label_set[label], format(z.at(g)));
    }
    let violations: usize = (0..f.tree.num_leaves())
        .map(|i| check_deflated_supermartingale(&gt, &z, &indicator_martingale(&f.tree, &f.measure, i)).len())
        .sum();
    println!("Z*M supermartingale violations over leaf martingales: {violations}");
    let u = log_utility_identity(&f.tree, &f.measure, f.process("S")?, &spec)?;
    println!("u_G - u_F = {:.6}, mutual information = {:.6}", u.u_g - u.u_f, u.mutual_information);
    Ok(())
}
