//! Deflated wealth in a Brownian market and the information-drift density
//! of an insider who knows W_1.

use deflator_lab::montecarlo::{
    information_drift_deflator, simulate_deflated_wealth, DiffusionScenario, InsiderScenario, PiecewiseConstant,
    RunConfig,
};

fn main() -> deflator_lab::Result<()> {
    let run = RunConfig::default();
    let sc = DiffusionScenario {
        paths: 20_000,
        ..DiffusionScenario::default()
    };
    let r = simulate_deflated_wealth(&sc, &PiecewiseConstant::alternating(1.0, 4, 1.0), &run)?;
    println!("E[Z_T] - 1        = {:+.5} (SE {:.5})", r.density.mean, r.density.se);
    println!("E[Z_T X_T] - X_0  = {:+.5} (SE {:.5}), passed: {}", r.wealth.mean, r.wealth.se, r.passed);
    let ins = information_drift_deflator(
        &InsiderScenario {
            paths: 20_000,
            ..InsiderScenario::default()
        },
        &run,
    )?;
    println!("insider E[Z] - 1  = {:+.5} (SE {:.5}), passed: {}", ins.density.mean, ins.density.se, ins.passed);
    Ok(())
}
