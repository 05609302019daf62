//! Named fixtures: small trees, label maps and simulation parameters.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::filtered_space::{AdaptedProcess, EventTree, ProbMeasure};
use crate::io::{label_map_value, write_atomic, TreeFile};
use crate::montecarlo::{DiffusionScenario, InsiderScenario, LevyScenario};
use crate::rational::{int, rat, Rational};

pub const NAMES: &[&str] = &[
    "binomial",
    "binomial-2step",
    "deterministic-drift",
    "insider-binomial",
    "insider-binomial-2step",
    "singleton-supermartingale",
    "exponential-death",
    "jacod-coins",
    "levy-counterexample",
    "diffusion",
    "brownian-insider",
];

fn scalars(tree: &EventTree, xs: &[Rational]) -> AdaptedProcess {
    AdaptedProcess::from_scalars(tree, xs.to_vec()).expect("one value per node")
}

fn labels(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

/// One step, `S: 1 → (2, 1/2)` with equal probabilities.
pub fn binomial() -> TreeFile {
    let t = EventTree::uniform(1, 2, 1).expect("valid shape");
    let p = ProbMeasure::uniform_branching(&t);
    let s = scalars(&t, &[int(1), int(2), rat(1, 2)]);
    TreeFile::new(t, p).with_process("S", s)
}

/// Two independent repetitions of the binomial step.
pub fn binomial_two_step() -> TreeFile {
    let t = EventTree::uniform(2, 2, 1).expect("valid shape");
    let p = ProbMeasure::uniform_branching(&t);
    let s = scalars(&t, &[int(1), int(2), rat(1, 2), int(4), int(1), int(1), rat(1, 4)]);
    TreeFile::new(t, p).with_process("S", s)
}

/// Single path, `S: 1 → 2`.
pub fn deterministic_drift() -> TreeFile {
    let t = EventTree::uniform(1, 1, 1).expect("valid shape");
    let p = ProbMeasure::uniform_branching(&t);
    let s = scalars(&t, &[int(1), int(2)]);
    TreeFile::new(t, p).with_process("S", s)
}

/// Binomial step with `L` the terminal state.
pub fn insider_binomial() -> (TreeFile, Vec<String>) {
    (binomial(), labels(&["up", "down"]))
}

/// Two-step binomial with `L = 1{S_2 ≥ 1}`.
pub fn insider_binomial_two_step() -> (TreeFile, Vec<String>) {
    (binomial_two_step(), labels(&["above", "above", "above", "below"]))
}

/// Single path of one step with `Z = (1, 1/2)` and constant `S`.
pub fn singleton_supermartingale() -> TreeFile {
    let t = EventTree::uniform(1, 1, 1).expect("valid shape");
    let p = ProbMeasure::uniform_branching(&t);
    TreeFile::new(t.clone(), p)
        .with_process("S", scalars(&t, &[int(1), int(1)]))
        .with_process("Z", scalars(&t, &[int(1), rat(1, 2)]))
}

/// Single path of two steps with `S = (1, 2, 4)` and `Z = (1, 1/2, 1/4)`:
/// the price doubles while the density halves, so under the dominating
/// measure `S` is a martingale killed at the death time.
pub fn exponential_death() -> TreeFile {
    let t = EventTree::uniform(2, 1, 1).expect("valid shape");
    let p = ProbMeasure::uniform_branching(&t);
    TreeFile::new(t.clone(), p)
        .with_process("S", scalars(&t, &[int(1), int(2), int(4)]))
        .with_process("Z", scalars(&t, &[int(1), rat(1, 2), rat(1, 4)]))
}

/// Two fair coins with `L` the first coin; `S` is the two-step binomial price.
pub fn jacod_coins() -> (TreeFile, Vec<String>) {
    (binomial_two_step(), labels(&["H", "H", "T", "T"]))
}

/// A fixture as named files.
#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: &'static str,
    pub summary: &'static str,
    pub files: Vec<(String, String)>,
}

fn json(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn tree_fixture(name: &'static str, summary: &'static str, f: TreeFile, labels: Option<Vec<String>>) -> Fixture {
    let mut files = vec![("tree.json".to_string(), f.to_json_string())];
    if let Some(l) = labels {
        files.push(("labels.json".to_string(), json(&label_map_value(&f.tree, &l))));
    }
    Fixture { name, summary, files }
}

pub fn fixture(name: &str) -> Result<Fixture> {
    let fx = match name {
        "binomial" => tree_fixture(
            "binomial",
            "One step, S: 1 -> (2, 1/2), P = (1/2, 1/2). NA and NA1 hold; the NA1 optimum is 3/2.",
            binomial(),
            None,
        ),
        "binomial-2step" => tree_fixture(
            "binomial-2step",
            "Two independent binomial steps. The NA1 optimum is 9/4.",
            binomial_two_step(),
            None,
        ),
        "deterministic-drift" => tree_fixture(
            "deterministic-drift",
            "Single path S: 1 -> 2. NA1 fails.",
            deterministic_drift(),
            None,
        ),
        "insider-binomial" => {
            let (f, l) = insider_binomial();
            tree_fixture(
                "insider-binomial",
                "Complete one-step market; the insider knows the terminal state.",
                f,
                Some(l),
            )
        }
        "insider-binomial-2step" => {
            let (f, l) = insider_binomial_two_step();
            tree_fixture(
                "insider-binomial-2step",
                "Complete two-step market; the insider knows whether S_2 >= 1.",
                f,
                Some(l),
            )
        }
        "singleton-supermartingale" => tree_fixture(
            "singleton-supermartingale",
            "One path, Z = (1, 1/2). No measure on the path alone has density Z; the enlarged space carries death mass 1/2 at time 1.",
            singleton_supermartingale(),
            None,
        ),
        "exponential-death" => tree_fixture(
            "exponential-death",
            "One path, S = (1, 2, 4), Z = (1, 1/2, 1/4). S stopped before death is not a martingale under the dominating measure.",
            exponential_death(),
            None,
        ),
        "jacod-coins" => {
            let (f, l) = jacod_coins();
            tree_fixture(
                "jacod-coins",
                "Two fair coins, L = first coin. The universal density is 1/2 on realized-label atoms at time 1.",
                f,
                Some(l),
            )
        }
        "levy-counterexample" => Fixture {
            name: "levy-counterexample",
            summary: "L = N1 - N2 + bt with death rate a = 2 and drift b = 1. L stopped at death is biased; the corrected process is not.",
            files: vec![("params.json".into(), json(&LevyScenario::default()))],
        },
        "diffusion" => Fixture {
            name: "diffusion",
            summary: "S = 1 + 0.2 t + B_t on [0, 1]; deflator exp(-0.2 B - 0.02 t).",
            files: vec![("params.json".into(), json(&DiffusionScenario::default()))],
        },
        "brownian-insider" => Fixture {
            name: "brownian-insider",
            summary: "Brownian motion observed up to t = 1/2 by an insider who knows W_1.",
            files: vec![("params.json".into(), json(&InsiderScenario::default()))],
        },
        other => {
            return Err(Error::Scenario(format!(
                "unknown scenario `{other}`; available: {}",
                NAMES.join(", ")
            )))
        }
    };
    Ok(fx)
}

/// Writes the fixture files plus a README into `dir`.
pub fn write_fixture(name: &str, dir: &Path) -> Result<Vec<PathBuf>> {
    let fx = fixture(name)?;
    std::fs::create_dir_all(dir)?;
    let mut readme = format!("# {}\n\n{}\n\nFiles:\n", fx.name, fx.summary);
    let mut written = Vec::new();
    for (file, body) in &fx.files {
        readme.push_str(&format!("- {file}\n"));
        let path = dir.join(file);
        write_atomic(&path, body)?;
        written.push(path);
    }
    let path = dir.join("README.md");
    write_atomic(&path, &readme)?;
    written.push(path);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_fixture_builds_and_parses() {
        for name in NAMES {
            let fx = fixture(name).unwrap();
            for (file, body) in &fx.files {
                if file == "tree.json" {
                    let f = TreeFile::parse(body).unwrap();
                    assert_eq!(&f.to_json_string(), body);
                }
            }
        }
        assert!(matches!(fixture("nope"), Err(Error::Scenario(m)) if m.contains("jacod-coins")));
    }

    #[test]
    fn levy_parameters() {
        let fx = fixture("levy-counterexample").unwrap();
        let sc: LevyScenario = serde_json::from_str(&fx.files[0].1).unwrap();
        assert_eq!((sc.a, sc.b), (2.0, 1.0));
    }
}
