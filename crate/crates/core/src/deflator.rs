//! Supermartingale densities by backward induction over one-period
//! sup-measures, and an exact certificate for the deflation property.

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arbitrage::WealthProblem;
use crate::error::{Error, Result};
use crate::filtered_space::{doob_decomposition, AdaptedProcess, Doob, EventTree, ProbMeasure, Strategy};
use crate::lp::{LinearProgram, LpOutcome, Relation};
use crate::rational::{self, Rational};

/// Value of the one-step problem at a node together with its maximizer.
#[derive(Clone, Debug)]
pub struct OneStep {
    pub value: Rational,
    pub maximizer: Vec<Rational>,
}

/// `sup_h E[Z_next · (1 + h·ΔS) | v]` over `h` with `1 + h·ΔS ≥ 0` on every
/// child. An unbounded problem yields `Na1Fails` with the improving ray.
pub fn one_step_sup(
    problem: &WealthProblem,
    masses: &[Rational],
    v: usize,
    z_next: impl Fn(usize) -> Rational,
) -> Result<OneStep> {
    let tree = problem.tree;
    let d = problem.dim();
    let mut lp = LinearProgram::new(d);
    let mut objective = vec![Rational::zero(); d];
    let mut base = Rational::zero();
    for c in tree.children(v) {
        let w = &masses[c] * z_next(c) / &masses[v];
        let ds = problem.s.increment(tree, c);
        for (i, x) in ds.iter().enumerate() {
            objective[i] += &w * x;
        }
        base += &w;
        let row: Vec<(usize, Rational)> = ds.into_iter().enumerate().collect();
        lp.add_constraint(row, Relation::Ge, -Rational::one());
    }
    for (i, c) in objective.into_iter().enumerate() {
        lp.set_free(i);
        lp.set_objective(i, c);
    }
    match lp.maximize() {
        LpOutcome::Optimal { x, value } => Ok(OneStep {
            value: base + value,
            maximizer: x,
        }),
        LpOutcome::Unbounded { ray, .. } => Err(Error::Na1Fails { node: v, ray }),
        LpOutcome::Infeasible { .. } => Err(Error::Internal("h = 0 is always feasible".into())),
    }
}

/// One-period density on the atoms of `F_k` with unit continuation value.
pub fn one_period_density(problem: &WealthProblem, k: usize) -> Result<Vec<(usize, OneStep)>> {
    if k >= problem.tree.horizon() {
        return Err(Error::Shape(format!("no step leaves time {k}")));
    }
    let masses = problem.p.node_masses(problem.tree);
    problem
        .tree
        .layer(k)
        .map(|v| Ok((v, one_step_sup(problem, &masses, v, |_| Rational::one())?)))
        .collect()
}

#[derive(Clone, Debug)]
pub struct Deflator {
    pub z: AdaptedProcess,
    pub doob: Doob,
    /// One-step maximizers chosen during construction; not canonical.
    pub maximizers: Strategy,
}

impl Deflator {
    /// Wraps a user-supplied positive process.
    pub fn from_process(tree: &EventTree, p: &ProbMeasure, z: AdaptedProcess) -> Result<Self> {
        if let Some(v) = (0..tree.num_nodes()).find(|&v| !z.at(v).is_positive()) {
            return Err(Error::NonPositiveDensity {
                node: v,
                value: rational::format(z.at(v)),
            });
        }
        let doob = doob_decomposition(tree, p, &z)?;
        Ok(Deflator {
            z,
            doob,
            maximizers: Strategy::zero(tree, 1),
        })
    }

    /// `Z / E[Z_0]`, so that `E[Z_0] = 1` (`F_0` is trivial).
    pub fn normalized(&self, tree: &EventTree, p: &ProbMeasure) -> Result<Self> {
        let c = Rational::one() / self.z.at(tree.root());
        let z = self.z.scaled(&c);
        let doob = doob_decomposition(tree, p, &z)?;
        Ok(Deflator {
            z,
            doob,
            maximizers: self.maximizers.clone(),
        })
    }
}

/// Backward induction from `Z_n = 1`. `Z_0` equals the (NA1) optimum.
pub fn construct_deflator(problem: &WealthProblem) -> Result<Deflator> {
    let tree = problem.tree;
    let masses = problem.p.node_masses(tree);
    let mut z = vec![Rational::zero(); tree.num_nodes()];
    for l in tree.leaves() {
        z[l] = Rational::one();
    }
    let d = problem.dim();
    let mut h = vec![Rational::zero(); tree.internal_nodes().len() * d];
    for v in tree.internal_nodes().rev() {
        let step = one_step_sup(problem, &masses, v, |c| z[c].clone())?;
        z[v] = step.value;
        h[v * d..(v + 1) * d].clone_from_slice(&step.maximizer);
    }
    let z = AdaptedProcess::from_scalars(tree, z)?;
    let doob = doob_decomposition(tree, problem.p, &z)?;
    Ok(Deflator {
        z,
        doob,
        maximizers: Strategy::new(tree, d, h)?,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    /// `Z(v) ≤ 0`.
    NonPositive,
    /// One-step supremum exceeds `Z(v)` at unit wealth.
    Supremum,
    /// One-step problem is unbounded, so zero wealth can be deflated upward.
    Unbounded,
}

#[derive(Clone, Debug)]
pub struct CertificateViolation {
    pub node: usize,
    pub kind: ViolationKind,
    /// `Z(v) − sup`, negative on violation; absent when unbounded.
    pub slack: Option<Rational>,
    pub strategy: Vec<Rational>,
}

#[derive(Clone, Debug)]
pub struct SampleViolation {
    pub trial: usize,
    pub node: usize,
    pub slack: Rational,
    pub strategy: Strategy,
}

#[derive(Clone, Debug)]
pub struct DeflationReport {
    pub certificate_passed: bool,
    pub certificate_violations: Vec<CertificateViolation>,
    pub trials: usize,
    pub seed: u64,
    /// Smallest `Z_k W_k − E[Z_{k+1} W_{k+1} | F_k]` seen over sampled strategies.
    pub worst_sampled_slack: Option<Rational>,
    pub sample_violations: Vec<SampleViolation>,
    /// Sampled `max_k E[Z_k W_k] ≤ Z_0` held for every trial.
    pub bound_held: bool,
}

impl DeflationReport {
    pub fn passed(&self) -> bool {
        self.certificate_passed && self.sample_violations.is_empty() && self.bound_held
    }
}

pub fn verify_deflation(problem: &WealthProblem, z: &AdaptedProcess, trials: usize, seed: u64) -> Result<DeflationReport> {
    let tree = problem.tree;
    if z.dim() != 1 || z.num_nodes() != tree.num_nodes() {
        return Err(Error::Shape("deflator must be a scalar process on the tree".into()));
    }
    let masses = problem.p.node_masses(tree);
    let d = problem.dim();
    let mut cert = Vec::new();
    for v in 0..tree.num_nodes() {
        if !z.at(v).is_positive() {
            cert.push(CertificateViolation {
                node: v,
                kind: ViolationKind::NonPositive,
                slack: Some(z.at(v).clone()),
                strategy: vec![Rational::zero(); d],
            });
        }
    }
    for v in tree.internal_nodes() {
        match one_step_sup(problem, &masses, v, |c| z.at(c).clone()) {
            Ok(step) => {
                let slack = z.at(v) - &step.value;
                if slack.is_negative() {
                    cert.push(CertificateViolation {
                        node: v,
                        kind: ViolationKind::Supremum,
                        slack: Some(slack),
                        strategy: step.maximizer,
                    });
                }
            }
            Err(Error::Na1Fails { ray, .. }) => cert.push(CertificateViolation {
                node: v,
                kind: ViolationKind::Unbounded,
                slack: None,
                strategy: ray,
            }),
            Err(e) => return Err(e),
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: Option<Rational> = None;
    let mut sample_violations = Vec::new();
    let mut bound_held = true;
    for trial in 0..trials {
        let (h, w) = random_admissible(problem, &mut rng);
        for v in tree.internal_nodes() {
            let e: Rational = tree.children(v).map(|c| &masses[c] * z.at(c) * &w[c]).sum::<Rational>() / &masses[v];
            let slack = z.at(v) * &w[v] - e;
            if slack.is_negative() {
                sample_violations.push(SampleViolation {
                    trial,
                    node: v,
                    slack: slack.clone(),
                    strategy: h.clone(),
                });
            }
            if worst.as_ref().is_none_or(|cur| slack < *cur) {
                worst = Some(slack);
            }
        }
        for k in 0..=tree.horizon() {
            let e: Rational = tree.layer(k).map(|v| &masses[v] * z.at(v) * &w[v]).sum();
            if e > *z.at(tree.root()) {
                bound_held = false;
            }
        }
    }
    Ok(DeflationReport {
        certificate_passed: cert.is_empty(),
        certificate_violations: cert,
        trials,
        seed,
        worst_sampled_slack: worst,
        sample_violations,
        bound_held,
    })
}

/// A random 1-admissible strategy and its wealth `1 + (H·S)` at every node.
pub fn random_admissible(problem: &WealthProblem, rng: &mut impl Rng) -> (Strategy, Vec<Rational>) {
    let tree = problem.tree;
    let d = problem.dim();
    let mut wealth = vec![Rational::zero(); tree.num_nodes()];
    wealth[0] = Rational::one();
    let mut h = Strategy::zero(tree, d);
    for v in tree.internal_nodes() {
        let u: Vec<Rational> = (0..d).map(|_| rational::int(rng.random_range(-4..=4))).collect();
        let moves: Vec<Rational> = tree
            .children(v)
            .map(|c| rational::dot(&u, &problem.s.increment(tree, c)))
            .collect();
        // largest t with w + t·(u·ΔS_c) ≥ 0 on every child
        let t_max = moves
            .iter()
            .filter(|m| m.is_negative())
            .map(|m| &wealth[v] / -m)
            .min()
            .unwrap_or_else(|| rational::int(rng.random_range(0..=3)));
        let t = t_max * rational::rat(rng.random_range(0..=8), 8);
        let hv: Vec<Rational> = u.iter().map(|x| x * &t).collect();
        for c in tree.children(v) {
            wealth[c] = &wealth[v] + rational::dot(&hv, &problem.s.increment(tree, c));
        }
        h.at_mut(v).clone_from_slice(&hv);
    }
    (h, wealth)
}
