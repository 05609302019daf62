//! Exact (NA) and (NA1) verdicts on an event tree.
//!
//! Holdings at every non-leaf node are LP variables; the gain `(H·S)(v)` is
//! a linear form in them. On a finite space with strictly positive `P`,
//! boundedness in probability of the 1-admissible terminal wealths is
//! equivalent to a finite supremum of their expectations, so (NA1) is the
//! boundedness of a single LP.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::filtered_space::{stochastic_integral, AdaptedProcess, EventTree, ProbMeasure, Strategy};
use crate::lp::{LinearProgram, LpOutcome, Relation};
use crate::rational::{Extended, Rational};

/// A market on a tree: `P` strictly positive, `S` of dimension `asset_dim`.
#[derive(Clone, Copy, Debug)]
pub struct WealthProblem<'a> {
    pub tree: &'a EventTree,
    pub p: &'a ProbMeasure,
    pub s: &'a AdaptedProcess,
}

impl<'a> WealthProblem<'a> {
    pub fn new(tree: &'a EventTree, p: &'a ProbMeasure, s: &'a AdaptedProcess) -> Result<Self> {
        p.require_strictly_positive(tree)?;
        if s.num_nodes() != tree.num_nodes() {
            return Err(Error::Shape("price process does not match the tree".into()));
        }
        if s.dim() != tree.asset_dim() {
            return Err(Error::Shape(format!(
                "price has dimension {} but the tree declares {} assets",
                s.dim(),
                tree.asset_dim()
            )));
        }
        Ok(WealthProblem { tree, p, s })
    }

    pub fn dim(&self) -> usize {
        self.s.dim()
    }

    /// Number of holding variables (one per asset per non-leaf node).
    pub fn num_holdings(&self) -> usize {
        self.tree.internal_nodes().len() * self.dim()
    }

    /// Sparse linear form of `(H·S)(v)` over the holding variables.
    pub fn gain_forms(&self) -> Vec<Vec<(usize, Rational)>> {
        let d = self.dim();
        let mut forms: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); self.tree.num_nodes()];
        for v in 1..self.tree.num_nodes() {
            let p = self.tree.parent(v).expect("non-root");
            let mut f = forms[p].clone();
            for (i, ds) in self.s.increment(self.tree, v).into_iter().enumerate() {
                if !ds.is_zero() {
                    f.push((p * d + i, ds));
                }
            }
            forms[v] = f;
        }
        forms
    }

    pub fn strategy_from(&self, x: &[Rational]) -> Strategy {
        Strategy::new(self.tree, self.dim(), x[..self.num_holdings()].to_vec()).expect("holding vector has the right length")
    }

    /// Terminal wealth `1 + (H·S)_n` per leaf index.
    pub fn terminal_wealth(&self, h: &Strategy) -> Vec<Rational> {
        let g = stochastic_integral(self.tree, self.s, h).expect("shapes checked at construction");
        self.tree.leaves().map(|l| Rational::one() + g.at(l)).collect()
    }

    /// True when `1 + (H·S) ≥ 0` at every node.
    pub fn is_admissible(&self, h: &Strategy) -> bool {
        let g = stochastic_integral(self.tree, self.s, h).expect("shapes checked at construction");
        g.values().iter().all(|x| *x >= -Rational::one())
    }

    pub fn expectation(&self, leaf_values: &[Rational]) -> Rational {
        crate::rational::dot(self.p.leaf_masses(), leaf_values)
    }
}

#[derive(Clone, Debug)]
pub struct NaReport {
    pub holds: bool,
    /// Optimum of `Σ_leaves (H·S)_n` under the box `|H| ≤ 1`.
    pub optimum: Rational,
    /// Arbitrage strategy; `1 + (H·S)` is 1-admissible and ends `≥ 1`.
    pub witness: Option<Strategy>,
    pub witness_terminal: Option<Vec<Rational>>,
}

#[derive(Clone, Debug)]
pub struct Na1Report {
    pub holds: bool,
    /// `sup E[X]` over 1-admissible terminal wealths.
    pub optimal_value: Extended,
    /// Maximizer when the supremum is finite.
    pub maximizer: Option<Strategy>,
    /// Ray along which admissibility is kept and `E[X]` grows without bound.
    pub ray: Option<Strategy>,
}

/// Combined verdict; either half may be absent when only one check ran.
#[derive(Clone, Debug, Default)]
pub struct ArbitrageReport {
    pub na: Option<NaReport>,
    pub na1: Option<Na1Report>,
}

impl ArbitrageReport {
    pub fn na_holds(&self) -> Option<bool> {
        self.na.as_ref().map(|r| r.holds)
    }

    pub fn na1_holds(&self) -> Option<bool> {
        self.na1.as_ref().map(|r| r.holds)
    }

    /// (NFLVR) is the conjunction of both.
    pub fn nflvr(&self) -> Option<bool> {
        Some(self.na_holds()? && self.na1_holds()?)
    }

    pub fn all_hold(&self) -> bool {
        self.na_holds().unwrap_or(true) && self.na1_holds().unwrap_or(true)
    }
}

pub fn check_na(problem: &WealthProblem) -> Result<NaReport> {
    let forms = problem.gain_forms();
    let nv = problem.num_holdings();
    let mut lp = LinearProgram::new(nv);
    for j in 0..nv {
        lp.set_free(j);
        lp.add_constraint(vec![(j, Rational::one())], Relation::Le, Rational::one());
        lp.add_constraint(vec![(j, Rational::one())], Relation::Ge, -Rational::one());
    }
    let mut objective = vec![Rational::zero(); nv];
    for l in problem.tree.leaves() {
        for (j, a) in &forms[l] {
            objective[*j] += a;
        }
    }
    for (j, c) in objective.into_iter().enumerate() {
        lp.set_objective(j, c);
    }
    for f in forms.iter().skip(1) {
        if !f.is_empty() {
            lp.add_constraint(f.clone(), Relation::Ge, Rational::zero());
        }
    }
    match lp.maximize() {
        LpOutcome::Optimal { x, value } => {
            let holds = !value.is_positive();
            let (witness, witness_terminal) = if holds {
                (None, None)
            } else {
                let h = problem.strategy_from(&x);
                let t = problem.terminal_wealth(&h);
                (Some(h), Some(t))
            };
            Ok(NaReport {
                holds,
                optimum: value,
                witness,
                witness_terminal,
            })
        }
        other => Err(Error::Internal(format!("box-constrained arbitrage LP returned {other:?}"))),
    }
}

pub fn check_na1(problem: &WealthProblem) -> Result<Na1Report> {
    let forms = problem.gain_forms();
    let nv = problem.num_holdings();
    let mut lp = LinearProgram::new(nv);
    let mut objective = vec![Rational::zero(); nv];
    for (i, l) in problem.tree.leaves().enumerate() {
        let pl = problem.p.leaf_mass(i);
        for (j, a) in &forms[l] {
            objective[*j] += pl * a;
        }
    }
    for j in 0..nv {
        lp.set_free(j);
    }
    for (j, c) in objective.into_iter().enumerate() {
        lp.set_objective(j, c);
    }
    for f in forms.iter().skip(1) {
        if !f.is_empty() {
            lp.add_constraint(f.clone(), Relation::Ge, -Rational::one());
        }
    }
    match lp.maximize() {
        LpOutcome::Optimal { x, value } => Ok(Na1Report {
            holds: true,
            optimal_value: Extended::Finite(Rational::one() + value),
            maximizer: Some(problem.strategy_from(&x)),
            ray: None,
        }),
        LpOutcome::Unbounded { ray, .. } => {
            debug_assert!(lp.is_improving_ray(&ray));
            Ok(Na1Report {
                holds: false,
                optimal_value: Extended::Infinite,
                maximizer: None,
                ray: Some(problem.strategy_from(&ray)),
            })
        }
        LpOutcome::Infeasible { .. } => Err(Error::Internal("H = 0 is always feasible".into())),
    }
}

pub fn check_both(problem: &WealthProblem) -> Result<ArbitrageReport> {
    Ok(ArbitrageReport {
        na: Some(check_na(problem)?),
        na1: Some(check_na1(problem)?),
    })
}
