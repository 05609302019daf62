//! A Levy process killed at an independent exponential time: the stopped
//! process is biased, the jump-corrected one is centred.

use deflator_lab::montecarlo::{simulate_levy_counterexample, LevyScenario, RunConfig};

fn main() -> deflator_lab::Result<()> {
    let sc = LevyScenario::default();
    let r = simulate_levy_counterexample(&sc, &RunConfig::default())?;
    println!("paths {}, seed {}", sc.paths, sc.seed);
    println!("raw:       mean {:.5} (SE {:.5}, analytic {:.5}) -> {:?}", r.raw.mean, r.raw.se, sc.raw_mean(), r.raw.verdict);
    println!("corrected: mean {:.5} (SE {:.5}) -> {:?}", r.corrected.mean, r.corrected.se, r.corrected.verdict);
    Ok(())
}
