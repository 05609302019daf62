//! Builds the concave utility whose marginal slopes diverge in sum while
//! their tail-weighted sum stays below pi^2/6, for a geometric tail.

use deflator_lab::rational::{rat, to_f64};
use deflator_lab::utility::{build_utility, Tail, UtilityConfig};

fn main() -> deflator_lab::Result<()> {
    let config = UtilityConfig {
        k: 2_000,
        n_sum: 100_000,
        ..UtilityConfig::default()
    };
    let r = build_utility(&Tail::geometric(rat(1, 2)), &config)?;
    println!("cut levels K_1..K_8: {:?}", &r.cut_levels[..8]);
    println!("g_1..g_5 (midpoints): {:?}", &r.g_midpoints()[..5]);
    println!(
        "sum g_k >= {:.4} (harmonic bound over {} levels), certified: {}",
        to_f64(&r.sum_g_lo),
        r.harmonic_count,
        r.divergence_certified
    );
    println!(
        "sum g_k F(k-1) <= {:.6} <= {:.6}, certified: {}",
        to_f64(&r.weighted_sum_hi),
        to_f64(&r.zeta2_lower),
        r.weighted_bound_certified
    );
    Ok(())
}
