//! Initial enlargement `G_t = F_t ∨ σ(L)` of a tree filtration by a finite
//! label `L`.
//!
//! The enlarged filtration is realized as its own event tree (the G-tree):
//! a virtual root at time 0 branches into the labels, and below that the
//! node `(a, ℓ)` at time `k + 1` is the atom `a ∩ {L = ℓ}` of `G_k`. The
//! first step carries no price move. Leaves coincide with the base leaves.

use std::collections::{BTreeMap, VecDeque};

use num_traits::{One, Signed, Zero};

use crate::arbitrage::{check_na, check_na1, Na1Report, WealthProblem};
use crate::error::{Error, Result};
use crate::filtered_space::{AdaptedProcess, EventTree, ProbMeasure, Strategy};
use crate::lp::{solve_exact, LinearProgram, LinearSolution, LpOutcome, Relation};
use crate::rational::{self, to_f64, Rational};

/// A label per leaf of the base tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnlargementSpec {
    /// Sorted distinct labels.
    pub label_set: Vec<String>,
    /// Index into `label_set` per leaf index.
    pub label_of_leaf: Vec<usize>,
}

impl EnlargementSpec {
    pub fn new(tree: &EventTree, labels: &[String]) -> Result<Self> {
        if labels.len() != tree.num_leaves() {
            return Err(Error::Shape(format!(
                "{} labels for {} leaves",
                labels.len(),
                tree.num_leaves()
            )));
        }
        let mut label_set: Vec<String> = labels.to_vec();
        label_set.sort();
        label_set.dedup();
        let label_of_leaf = labels
            .iter()
            .map(|l| label_set.binary_search(l).expect("label is in the set"))
            .collect();
        Ok(EnlargementSpec {
            label_set,
            label_of_leaf,
        })
    }

    pub fn num_labels(&self) -> usize {
        self.label_set.len()
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.label_set.binary_search_by(|l| l.as_str().cmp(label)).ok()
    }

    /// `P(a ∩ {L = ℓ})` for every base node `a` and label `ℓ`.
    pub fn joint_masses(&self, tree: &EventTree, p: &ProbMeasure) -> Vec<Vec<Rational>> {
        let nl = self.num_labels();
        let mut out = vec![vec![Rational::zero(); nl]; tree.num_nodes()];
        for (i, l) in tree.leaves().enumerate() {
            out[l][self.label_of_leaf[i]] = p.leaf_mass(i).clone();
        }
        for v in tree.internal_nodes().rev() {
            for c in tree.children(v) {
                for j in 0..nl {
                    let m = out[c][j].clone();
                    out[v][j] += m;
                }
            }
        }
        out
    }

    /// Whether some leaf below each node carries each label.
    fn presence(&self, tree: &EventTree) -> Vec<Vec<bool>> {
        let nl = self.num_labels();
        let mut out = vec![vec![false; nl]; tree.num_nodes()];
        for (i, l) in tree.leaves().enumerate() {
            out[l][self.label_of_leaf[i]] = true;
        }
        for v in tree.internal_nodes().rev() {
            for c in tree.children(v) {
                for j in 0..nl {
                    out[v][j] |= out[c][j];
                }
            }
        }
        out
    }

    /// Partition of the leaves generating `G_k`, as a cell id per leaf.
    pub fn g_partitions(&self, tree: &EventTree) -> Vec<Vec<usize>> {
        let nl = self.num_labels();
        (0..=tree.horizon())
            .map(|k| {
                tree.leaves()
                    .enumerate()
                    .map(|(i, l)| tree.ancestor_at(l, k) * nl + self.label_of_leaf[i])
                    .collect()
            })
            .collect()
    }
}

/// The enlarged filtration as an event tree.
#[derive(Clone, Debug)]
pub struct GTree {
    pub tree: EventTree,
    pub p: ProbMeasure,
    /// Base node and label of each G-node; `None` for the virtual root.
    pub origin: Vec<Option<(usize, usize)>>,
    pub index: BTreeMap<(usize, usize), usize>,
}

impl GTree {
    pub fn build(tree: &EventTree, p: &ProbMeasure, spec: &EnlargementSpec) -> Result<Self> {
        let presence = spec.presence(tree);
        let mut parents = vec![None];
        let mut origin = vec![None];
        let mut queue = VecDeque::new();
        for (j, present) in presence[tree.root()].iter().enumerate() {
            if *present {
                queue.push_back((0usize, tree.root(), j));
            }
        }
        while let Some((gp, a, j)) = queue.pop_front() {
            let id = parents.len();
            parents.push(Some(gp));
            origin.push(Some((a, j)));
            for c in tree.children(a) {
                if presence[c][j] {
                    queue.push_back((id, c, j));
                }
            }
        }
        let gtree = EventTree::from_parents(tree.horizon() + 1, tree.asset_dim(), &parents)?;
        let index: BTreeMap<(usize, usize), usize> = origin
            .iter()
            .enumerate()
            .filter_map(|(g, o)| o.map(|key| (key, g)))
            .collect();
        let mass = gtree
            .leaves()
            .map(|g| {
                let (leaf, _) = origin[g].expect("leaves are labeled");
                p.leaf_mass(tree.leaf_index(leaf)).clone()
            })
            .collect();
        let gp = ProbMeasure::new(&gtree, mass)?;
        Ok(GTree {
            tree: gtree,
            p: gp,
            origin,
            index,
        })
    }

    pub fn node(&self, base: usize, label: usize) -> Option<usize> {
        self.index.get(&(base, label)).copied()
    }

    /// Base node underlying a G-node (the base root for the virtual root).
    pub fn base(&self, g: usize) -> usize {
        self.origin[g].map_or(0, |(a, _)| a)
    }

    /// Copies a base process onto the G-tree.
    pub fn lift(&self, x: &AdaptedProcess) -> AdaptedProcess {
        let d = x.dim();
        let values = (0..self.tree.num_nodes())
            .flat_map(|g| x.value(self.base(g)).to_vec())
            .collect();
        AdaptedProcess::new(&self.tree, d, values).expect("one value per G-node")
    }
}

/// Regular conditional law of `L` given `F_t`, per base node.
#[derive(Clone, Debug)]
pub struct ConditionalKernel {
    /// `P_t(a, ℓ)` indexed by base node then label.
    pub pt: Vec<Vec<Rational>>,
    pub pl: Vec<Rational>,
}

impl ConditionalKernel {
    pub fn new(tree: &EventTree, p: &ProbMeasure, spec: &EnlargementSpec) -> Result<Self> {
        p.require_strictly_positive(tree)?;
        let joint = spec.joint_masses(tree, p);
        let masses = p.node_masses(tree);
        let pt: Vec<Vec<Rational>> = joint
            .iter()
            .zip(&masses)
            .map(|(row, m)| row.iter().map(|x| x / m).collect())
            .collect();
        let pl = pt[tree.root()].clone();
        Ok(ConditionalKernel { pt, pl })
    }

    /// `Y_t(a, ℓ) = P_t(a, ℓ) / P_L(ℓ)`, with `0/0 = 0`.
    pub fn density(&self, a: usize, label: usize) -> Rational {
        if self.pl[label].is_zero() {
            Rational::zero()
        } else {
            &self.pt[a][label] / &self.pl[label]
        }
    }
}

#[derive(Clone, Debug)]
pub struct JacodReport {
    /// `P_t(a, ·) ≪ P_L` for every atom.
    pub holds: bool,
    /// `P_L ≪ P_t(a, ·)` for every atom.
    pub reverse_holds: bool,
    pub equivalent: bool,
    /// `(node, label)` pairs violating the forward condition.
    pub failures: Vec<(usize, usize)>,
    pub kernel: ConditionalKernel,
}

impl JacodReport {
    /// `Y_t(a, ℓ)`.
    pub fn density(&self, a: usize, label: usize) -> Rational {
        self.kernel.density(a, label)
    }
}

pub fn jacod_check(tree: &EventTree, p: &ProbMeasure, spec: &EnlargementSpec) -> Result<JacodReport> {
    let kernel = ConditionalKernel::new(tree, p, spec)?;
    let mut failures = Vec::new();
    let mut reverse_holds = true;
    for a in 0..tree.num_nodes() {
        for j in 0..spec.num_labels() {
            let pt = &kernel.pt[a][j];
            let pl = &kernel.pl[j];
            if pt.is_positive() && !pl.is_positive() {
                failures.push((a, j));
            }
            if pl.is_positive() && !pt.is_positive() {
                reverse_holds = false;
            }
        }
    }
    let holds = failures.is_empty();
    Ok(JacodReport {
        holds,
        reverse_holds,
        equivalent: holds && reverse_holds,
        failures,
        kernel,
    })
}

/// `Z(a, ℓ) = 1 / Y(a, ℓ)` on the G-tree, `1` at the virtual root.
pub fn universal_density(tree: &EventTree, p: &ProbMeasure, spec: &EnlargementSpec) -> Result<(GTree, AdaptedProcess)> {
    let jacod = jacod_check(tree, p, spec)?;
    if !jacod.holds {
        return Err(Error::Precondition("Jacod's condition fails".into()));
    }
    let gt = GTree::build(tree, p, spec)?;
    let mut z = Vec::with_capacity(gt.tree.num_nodes());
    for g in 0..gt.tree.num_nodes() {
        match gt.origin[g] {
            None => z.push(Rational::one()),
            Some((a, j)) => {
                let y = jacod.density(a, j);
                if !y.is_positive() {
                    return Err(Error::NonPositiveDensity {
                        node: g,
                        value: rational::format(&y),
                    });
                }
                z.push(Rational::one() / y);
            }
        }
    }
    let z = AdaptedProcess::from_scalars(&gt.tree, z)?;
    Ok((gt, z))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupermartingaleViolation {
    pub node: usize,
    /// `E[X_{k+1} | node]`.
    pub conditional: Rational,
    pub value: Rational,
}

/// Exact per-atom supermartingale check of a scalar process on a tree.
pub fn supermartingale_violations(tree: &EventTree, p: &ProbMeasure, x: &AdaptedProcess) -> Vec<SupermartingaleViolation> {
    let masses = p.node_masses(tree);
    tree.internal_nodes()
        .filter(|&v| masses[v].is_positive())
        .filter_map(|v| {
            let e: Rational = tree.children(v).map(|c| &masses[c] * x.at(c)).sum::<Rational>() / &masses[v];
            (e > *x.at(v)).then(|| SupermartingaleViolation {
                node: v,
                conditional: e,
                value: x.at(v).clone(),
            })
        })
        .collect()
}

/// Violations of the G-supermartingale property of `Z·M` for a base process `M`.
pub fn check_deflated_supermartingale(gt: &GTree, z: &AdaptedProcess, m: &AdaptedProcess) -> Vec<SupermartingaleViolation> {
    let lifted = gt.lift(m);
    let zm = AdaptedProcess::from_fn(&gt.tree, |g| z.at(g) * lifted.at(g));
    supermartingale_violations(&gt.tree, &gt.p, &zm)
}

/// `P(leaf | F_t)`, the martingale closing a leaf indicator.
pub fn indicator_martingale(tree: &EventTree, p: &ProbMeasure, leaf_index: usize) -> AdaptedProcess {
    let masses = p.node_masses(tree);
    let leaf = tree.leaf_node(leaf_index);
    AdaptedProcess::from_fn(tree, |v| {
        if tree.is_ancestor(v, leaf) && masses[v].is_positive() {
            p.leaf_mass(leaf_index) / &masses[v]
        } else {
            Rational::zero()
        }
    })
}

/// Snell envelope `M_k = max(R_k, E[M_{k+1} | F_k])`, `M_n = R_n`, of a
/// nonnegative reward; a nonnegative supermartingale.
pub fn snell_envelope(tree: &EventTree, p: &ProbMeasure, reward: &[Rational]) -> AdaptedProcess {
    let masses = p.node_masses(tree);
    let mut m = reward.to_vec();
    for v in tree.internal_nodes().rev() {
        let e: Rational = tree.children(v).map(|c| &masses[c] * &m[c]).sum::<Rational>() / &masses[v];
        if e > m[v] {
            m[v] = e;
        }
    }
    AdaptedProcess::from_scalars(tree, m).expect("one value per node")
}

/// (NA1) for `S` on the G-tree with G-predictable strategies.
pub fn na1_under_g(tree: &EventTree, p: &ProbMeasure, s: &AdaptedProcess, spec: &EnlargementSpec) -> Result<Na1Report> {
    let gt = GTree::build(tree, p, spec)?;
    let gs = gt.lift(s);
    check_na1(&WealthProblem::new(&gt.tree, &gt.p, &gs)?)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralizedJacodFailure {
    pub t: usize,
    pub s: usize,
    pub atom: usize,
    pub descendant: usize,
    pub cell: usize,
}

#[derive(Clone, Debug)]
pub struct GeneralizedJacodReport {
    /// `P(· | F_{t+s})|_{G_t} ≪ P(· | F_t)|_{G_t}` for all `t, s`.
    pub holds: bool,
    pub failures: Vec<GeneralizedJacodFailure>,
    /// The reverse inclusion `P(· | F_t)|_{G_t} ≪ P(· | F_{t+s})|_{G_t}`.
    pub reverse_holds: bool,
    pub reverse_failures: Vec<GeneralizedJacodFailure>,
}

/// `g_layers[k][i]` is the `G_k` cell of leaf `i`; cells must refine `F_k`
/// and be nested in `k`.
pub fn generalized_jacod_check(tree: &EventTree, p: &ProbMeasure, g_layers: &[Vec<usize>]) -> Result<GeneralizedJacodReport> {
    let n = tree.horizon();
    if g_layers.len() != n + 1 || g_layers.iter().any(|l| l.len() != tree.num_leaves()) {
        return Err(Error::Shape("need one leaf partition per time 0..=n".into()));
    }
    let leaves: Vec<usize> = tree.leaves().collect();
    for k in 0..=n {
        let mut atom_of_cell: BTreeMap<usize, usize> = BTreeMap::new();
        for (i, &cell) in g_layers[k].iter().enumerate() {
            let a = tree.ancestor_at(leaves[i], k);
            if *atom_of_cell.entry(cell).or_insert(a) != a {
                return Err(Error::Precondition(format!("G_{k} cell {cell} straddles two atoms of F_{k}")));
            }
        }
        if k > 0 {
            let mut parent_cell: BTreeMap<usize, usize> = BTreeMap::new();
            for i in 0..leaves.len() {
                let pc = g_layers[k - 1][i];
                if *parent_cell.entry(g_layers[k][i]).or_insert(pc) != pc {
                    return Err(Error::Precondition(format!("G_{k} does not refine G_{}", k - 1)));
                }
            }
        }
    }
    let mut failures = Vec::new();
    let mut reverse_failures = Vec::new();
    for t in 0..=n {
        let mut cells: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, &c) in g_layers[t].iter().enumerate() {
            cells.entry(c).or_default().push(i);
        }
        for s in 1..=n - t {
            for a in tree.layer(t) {
                for b in tree.descendants_at(a, t + s) {
                    let span = tree.leaf_span(b);
                    let outer = tree.leaf_span(a);
                    for (&cell, members) in &cells {
                        let in_a: Rational = members
                            .iter()
                            .filter(|i| outer.contains(i))
                            .map(|&i| p.leaf_mass(i))
                            .sum();
                        let in_b: Rational = members
                            .iter()
                            .filter(|i| span.contains(i))
                            .map(|&i| p.leaf_mass(i))
                            .sum();
                        let f = GeneralizedJacodFailure {
                            t,
                            s,
                            atom: a,
                            descendant: b,
                            cell,
                        };
                        if in_b.is_positive() && !in_a.is_positive() {
                            failures.push(f.clone());
                        }
                        if in_a.is_positive() && !in_b.is_positive() && p.node_mass(tree, b).is_positive() {
                            reverse_failures.push(f);
                        }
                    }
                }
            }
        }
    }
    Ok(GeneralizedJacodReport {
        holds: failures.is_empty(),
        failures,
        reverse_holds: reverse_failures.is_empty(),
        reverse_failures,
    })
}

/// Unique martingale measure of a complete market, as transition
/// probabilities per child node (root entry unused).
pub fn unique_martingale_measure(tree: &EventTree, s: &AdaptedProcess) -> Result<Vec<Rational>> {
    let d = s.dim();
    let mut q = vec![Rational::zero(); tree.num_nodes()];
    for v in tree.internal_nodes() {
        let ch: Vec<usize> = tree.children(v).collect();
        let mut a = vec![vec![Rational::one(); ch.len()]];
        let mut b = vec![Rational::one()];
        let incs: Vec<Vec<Rational>> = ch.iter().map(|&c| s.increment(tree, c)).collect();
        for i in 0..d {
            a.push(incs.iter().map(|x| x[i].clone()).collect());
            b.push(Rational::zero());
        }
        match solve_exact(a, b) {
            LinearSolution::Consistent { x, unique: true } => {
                if let Some(pos) = x.iter().position(|qi| !qi.is_positive()) {
                    return Err(Error::Precondition(format!(
                        "no equivalent martingale measure at node {v} (child {} gets {})",
                        ch[pos],
                        rational::format(&x[pos])
                    )));
                }
                for (c, qi) in ch.iter().zip(x) {
                    q[*c] = qi;
                }
            }
            LinearSolution::Consistent { unique: false, .. } => {
                return Err(Error::Incomplete(format!("martingale measure is not unique at node {v}")))
            }
            LinearSolution::Inconsistent => {
                return Err(Error::Precondition(format!("no martingale measure at node {v}")))
            }
        }
    }
    Ok(q)
}

/// Replicating strategy and cost of a terminal payoff in a complete market.
pub fn replicate(tree: &EventTree, s: &AdaptedProcess, q: &[Rational], payoff: &[Rational]) -> Result<(Rational, Strategy)> {
    let d = s.dim();
    let mut value = vec![Rational::zero(); tree.num_nodes()];
    for (i, l) in tree.leaves().enumerate() {
        value[l] = payoff[i].clone();
    }
    let mut h = Strategy::zero(tree, d);
    for v in tree.internal_nodes().rev() {
        value[v] = tree.children(v).map(|c| &q[c] * &value[c]).sum();
        let ch: Vec<usize> = tree.children(v).collect();
        let a: Vec<Vec<Rational>> = ch.iter().map(|&c| s.increment(tree, c)).collect();
        let b: Vec<Rational> = ch.iter().map(|&c| &value[c] - &value[v]).collect();
        match solve_exact(a, b) {
            LinearSolution::Consistent { x, .. } => h.at_mut(v).clone_from_slice(&x),
            LinearSolution::Inconsistent => {
                return Err(Error::Incomplete(format!("payoff is not attainable at node {v}")))
            }
        }
    }
    Ok((value[tree.root()].clone(), h))
}

#[derive(Clone, Debug)]
pub enum EmmVerdict {
    /// No martingale measure at all on the G-tree, with a verified Farkas
    /// certificate.
    Infeasible { farkas: Vec<Rational>, verified: bool },
    /// Martingale measures exist but every one has a null leaf.
    NotEquivalent { best_min_mass: Rational },
    Equivalent { best_min_mass: Rational },
}

#[derive(Clone, Debug)]
pub struct InsiderReport {
    pub prob_a: Rational,
    pub replication_cost: Rational,
    pub hedge: Strategy,
    pub replication_verified: bool,
    /// G-strategy `−1_{A^c} H` on the G-tree.
    pub g_strategy: Strategy,
    pub g_terminal_wealth: Vec<Rational>,
    pub arbitrage_verified: bool,
    pub na_under_g: bool,
    pub emm: EmmVerdict,
    pub no_equivalent_martingale_measure: bool,
    /// Strict (NA1) on the G-tree over all G-admissible strategies.
    pub na1_under_g: bool,
    pub na1_under_g_ray: Option<Strategy>,
    /// Product deflator certificate for label-dependent strategies that are
    /// admissible on every base path.
    pub robust_na1: RobustCertificate,
}

/// Complete-market insider demonstration for `A = {L ∈ a_labels}`.
pub fn insider_example(
    tree: &EventTree,
    p: &ProbMeasure,
    s: &AdaptedProcess,
    spec: &EnlargementSpec,
    a_labels: &[usize],
) -> Result<InsiderReport> {
    if spec.num_labels() < 2 {
        return Err(Error::Precondition("L is almost surely constant".into()));
    }
    let wp = WealthProblem::new(tree, p, s)?;
    let in_a: Vec<bool> = spec.label_of_leaf.iter().map(|j| a_labels.contains(j)).collect();
    let prob_a: Rational = (0..tree.num_leaves()).filter(|&i| in_a[i]).map(|i| p.leaf_mass(i)).sum();
    if !prob_a.is_positive() || prob_a >= Rational::one() {
        return Err(Error::Precondition(format!("P(A) = {} is not in (0, 1)", rational::format(&prob_a))));
    }
    let q = unique_martingale_measure(tree, s)?;
    let payoff: Vec<Rational> = in_a.iter().map(|&x| if x { Rational::one() } else { Rational::zero() }).collect();
    let (cost, hedge) = replicate(tree, s, &q, &payoff)?;
    let hedged = wp.terminal_wealth(&hedge);
    let replication_verified = hedged
        .iter()
        .zip(&payoff)
        .all(|(w, x)| w - Rational::one() + &cost == *x);

    let gt = GTree::build(tree, p, spec)?;
    let gs = gt.lift(s);
    let gwp = WealthProblem::new(&gt.tree, &gt.p, &gs)?;
    let d = s.dim();
    let g_strategy = Strategy::from_fn(&gt.tree, d, |g| match gt.origin[g] {
        Some((a, j)) if !a_labels.contains(&j) => hedge.at(a).iter().map(|x| -x).collect(),
        _ => vec![Rational::zero(); d],
    });
    let g_terminal_wealth = gwp.terminal_wealth(&g_strategy);
    let arbitrage_verified = gwp.is_admissible(&g_strategy)
        && g_terminal_wealth.iter().all(|x| *x >= Rational::one())
        && g_terminal_wealth.iter().any(|x| *x > Rational::one());
    let na_under_g = check_na(&gwp)?.holds;

    let emm = emm_lp(&gt, &gs);
    let no_equivalent_martingale_measure = !matches!(emm, EmmVerdict::Equivalent { .. });
    let na1 = check_na1(&gwp)?;
    let base_deflator = crate::deflator::construct_deflator(&wp)?;
    let robust_na1 = robust_na1_certificate(tree, p, s, spec, &base_deflator.z)?;
    Ok(InsiderReport {
        prob_a,
        replication_cost: cost,
        hedge,
        replication_verified,
        g_strategy,
        g_terminal_wealth,
        arbitrage_verified,
        na_under_g,
        emm,
        no_equivalent_martingale_measure,
        na1_under_g: na1.holds,
        na1_under_g_ray: na1.ray,
        robust_na1,
    })
}

/// Maximizes the smallest leaf mass over martingale measures on the G-tree.
fn emm_lp(gt: &GTree, gs: &AdaptedProcess) -> EmmVerdict {
    let t = &gt.tree;
    let nl = t.num_leaves();
    let tvar = nl;
    let mut lp = LinearProgram::new(nl + 1);
    lp.set_free(tvar);
    lp.set_objective(tvar, Rational::one());
    lp.add_constraint((0..nl).map(|i| (i, Rational::one())).collect(), Relation::Eq, Rational::one());
    for i in 0..nl {
        lp.add_constraint(vec![(i, Rational::one()), (tvar, -Rational::one())], Relation::Ge, Rational::zero());
    }
    for v in t.internal_nodes() {
        for j in 0..gs.dim() {
            let mut row = Vec::new();
            for c in t.children(v) {
                let ds = &gs.increment(t, c)[j];
                if ds.is_zero() {
                    continue;
                }
                row.extend(t.leaf_span(c).map(|i| (i, ds.clone())));
            }
            if !row.is_empty() {
                lp.add_constraint(row, Relation::Eq, Rational::zero());
            }
        }
    }
    match lp.maximize() {
        LpOutcome::Infeasible { farkas } => {
            let verified = lp.verify_farkas(&farkas);
            EmmVerdict::Infeasible { farkas, verified }
        }
        LpOutcome::Optimal { value, .. } if value.is_positive() => EmmVerdict::Equivalent { best_min_mass: value },
        LpOutcome::Optimal { value, .. } => EmmVerdict::NotEquivalent { best_min_mass: value },
        LpOutcome::Unbounded { .. } => unreachable!("leaf masses are bounded by 1"),
    }
}

#[derive(Clone, Debug)]
pub struct RobustCertificate {
    pub passed: bool,
    /// G-nodes where the product deflator fails, with `Z − sup` (absent when
    /// unbounded).
    pub violations: Vec<(usize, Option<Rational>)>,
    pub deflator: AdaptedProcess,
}

/// Certifies that `Z^G = Z_univ · Z_F` deflates every label-dependent
/// strategy that is admissible on all base continuations: one LP per
/// G-node, maximizing over base-admissible holdings.
pub fn robust_na1_certificate(
    tree: &EventTree,
    p: &ProbMeasure,
    s: &AdaptedProcess,
    spec: &EnlargementSpec,
    z_f: &AdaptedProcess,
) -> Result<RobustCertificate> {
    let (gt, z_u) = universal_density(tree, p, spec)?;
    let zg = AdaptedProcess::from_fn(&gt.tree, |g| z_u.at(g) * z_f.at(gt.base(g)));
    let gs = gt.lift(s);
    let gmass = gt.p.node_masses(&gt.tree);
    let d = s.dim();
    let mut violations = Vec::new();
    for g in gt.tree.internal_nodes() {
        let a = gt.base(g);
        let mut lp = LinearProgram::new(d);
        let mut obj = vec![Rational::zero(); d];
        let mut base = Rational::zero();
        for c in gt.tree.children(g) {
            let w = &gmass[c] * zg.at(c) / &gmass[g];
            for (i, x) in gs.increment(&gt.tree, c).iter().enumerate() {
                obj[i] += &w * x;
            }
            base += w;
        }
        if gt.origin[g].is_some() {
            for c in tree.children(a) {
                let row: Vec<(usize, Rational)> = s.increment(tree, c).into_iter().enumerate().collect();
                lp.add_constraint(row, Relation::Ge, -Rational::one());
            }
        }
        for (i, c) in obj.into_iter().enumerate() {
            lp.set_free(i);
            lp.set_objective(i, c);
        }
        match lp.maximize() {
            LpOutcome::Optimal { value, .. } => {
                let slack = zg.at(g) - (base + value);
                if slack.is_negative() {
                    violations.push((g, Some(slack)));
                }
            }
            LpOutcome::Unbounded { .. } => violations.push((g, None)),
            LpOutcome::Infeasible { .. } => return Err(Error::Internal("h = 0 is always feasible".into())),
        }
    }
    Ok(RobustCertificate {
        passed: violations.is_empty(),
        violations,
        deflator: zg,
    })
}

#[derive(Clone, Debug)]
pub struct LogUtility {
    pub u_f: f64,
    pub u_g: f64,
    pub mutual_information: f64,
    /// `u_G − u_F − I`.
    pub gap: f64,
    pub tolerance: f64,
    pub holds: bool,
    /// Martingale-measure leaf masses used for both problems.
    pub q_star: Vec<Rational>,
}

/// Log-optimal growth with and without knowledge of `L` in a complete
/// market. The insider optimizes separately on each `{L = ℓ}` over
/// strategies admissible on every base path, which in a complete market
/// gives `u_G = Σ_ℓ P(ℓ) KL(P(·|ℓ) ‖ Q*)`.
pub fn log_utility_identity(tree: &EventTree, p: &ProbMeasure, s: &AdaptedProcess, spec: &EnlargementSpec) -> Result<LogUtility> {
    p.require_strictly_positive(tree)?;
    let q = unique_martingale_measure(tree, s)?;
    let qm = ProbMeasure::from_transitions(tree, &q)?;
    let pl = spec.joint_masses(tree, p)[tree.root()].clone();
    let ln = |r: &Rational| to_f64(r).ln();
    let mut u_f = 0.0;
    let mut u_g = 0.0;
    let mut info = 0.0;
    for i in 0..tree.num_leaves() {
        let pw = p.leaf_mass(i);
        let qw = qm.leaf_mass(i);
        let l = spec.label_of_leaf[i];
        let cond = pw / &pl[l];
        u_f += to_f64(pw) * ln(&(pw / qw));
        u_g += to_f64(pw) * ln(&(&cond / qw));
        info += to_f64(pw) * ln(&(&cond / pw));
    }
    let tolerance = 1e-9;
    let gap = u_g - u_f - info;
    Ok(LogUtility {
        u_f,
        u_g,
        mutual_information: info,
        gap,
        tolerance,
        holds: gap.abs() <= tolerance && info >= -tolerance,
        q_star: qm.leaf_masses().to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn two_coins() -> (EventTree, ProbMeasure) {
        let t = EventTree::uniform(2, 2, 1).unwrap();
        let p = ProbMeasure::uniform_branching(&t);
        (t, p)
    }

    fn labels(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn independent_label_has_unit_density() {
        let (t, p) = two_coins();
        let spec = EnlargementSpec::new(&t, &labels(&["H", "T", "H", "T"])).unwrap();
        let r = jacod_check(&t, &p, &spec).unwrap();
        assert!(r.holds);
        for a in t.layer(1) {
            for j in 0..2 {
                assert_eq!(r.density(a, j), int(1));
            }
        }
        let (_, z) = universal_density(&t, &p, &spec).unwrap();
        assert!(z.values()[..z.num_nodes() - 4].iter().all(|x| x.is_one()));
    }

    #[test]
    fn first_coin_label() {
        let (t, p) = two_coins();
        let spec = EnlargementSpec::new(&t, &labels(&["H", "H", "T", "T"])).unwrap();
        let r = jacod_check(&t, &p, &spec).unwrap();
        assert!(r.holds && !r.reverse_holds);
        assert_eq!(r.density(1, 0), int(2));
        assert_eq!(r.density(1, 1), int(0));
        assert_eq!(r.density(0, 0), int(1));

        let (gt, z) = universal_density(&t, &p, &spec).unwrap();
        let g = gt.node(1, 0).unwrap();
        assert_eq!(z.at(g), &rat(1, 2));
        let mean = supermartingale_violations(&gt.tree, &gt.p, &z);
        assert!(mean.is_empty());
        for i in 0..4 {
            let m = indicator_martingale(&t, &p, i);
            assert!(check_deflated_supermartingale(&gt, &z, &m).is_empty());
        }
    }

    #[test]
    fn generalized_condition_and_its_reverse() {
        let (t, p) = two_coins();
        let spec = EnlargementSpec::new(&t, &labels(&["a", "b", "b", "c"])).unwrap();
        let r = generalized_jacod_check(&t, &p, &spec.g_partitions(&t)).unwrap();
        assert!(r.holds);

        let three = EventTree::from_child_counts(1, 1, &[3]).unwrap();
        let p3 = ProbMeasure::uniform_branching(&three);
        // G_0 reveals whether the outcome is the first leaf
        let g = vec![vec![0, 1, 1], vec![0, 1, 2]];
        let r = generalized_jacod_check(&three, &p3, &g).unwrap();
        assert!(r.holds);
        assert!(!r.reverse_holds);
        assert_eq!(r.reverse_failures[0].t, 0);

        let bad = vec![vec![0, 0, 0], vec![0, 0, 1]];
        assert!(generalized_jacod_check(&three, &p3, &bad).is_err());
    }

    #[test]
    fn one_step_insider() {
        let t = EventTree::uniform(1, 2, 1).unwrap();
        let p = ProbMeasure::uniform_branching(&t);
        let s = AdaptedProcess::from_scalars(&t, vec![int(1), int(2), rat(1, 2)]).unwrap();
        let spec = EnlargementSpec::new(&t, &labels(&["up", "down"])).unwrap();
        let up = spec.label_index("up").unwrap();
        let r = insider_example(&t, &p, &s, &spec, &[up]).unwrap();
        assert_eq!(r.replication_cost, rat(1, 3));
        assert_eq!(r.hedge.at(0), &[rat(2, 3)]);
        assert!(r.replication_verified && r.arbitrage_verified && !r.na_under_g);
        assert!(matches!(r.emm, EmmVerdict::Infeasible { verified: true, .. }));
        assert!(r.robust_na1.passed);

        let flat = EnlargementSpec::new(&t, &labels(&["x", "x"])).unwrap();
        assert!(matches!(insider_example(&t, &p, &s, &flat, &[0]), Err(Error::Precondition(_))));
    }

    #[test]
    fn log_utility_closed_form() {
        let t = EventTree::uniform(1, 2, 1).unwrap();
        let p = ProbMeasure::uniform_branching(&t);
        let s = AdaptedProcess::from_scalars(&t, vec![int(1), int(2), rat(1, 2)]).unwrap();
        let spec = EnlargementSpec::new(&t, &labels(&["u", "d"])).unwrap();
        let r = log_utility_identity(&t, &p, &s, &spec).unwrap();
        assert!((r.u_f - 0.5 * (9.0f64 / 8.0).ln()).abs() < 1e-12);
        assert!((r.mutual_information - 2f64.ln()).abs() < 1e-12);
        assert!((r.u_g - 0.5 * 4.5f64.ln()).abs() < 1e-12);
        assert!(r.holds);

        let indep = EnlargementSpec::new(&t, &labels(&["x", "x"])).unwrap();
        let r = log_utility_identity(&t, &p, &s, &indep).unwrap();
        assert!(r.mutual_information.abs() < 1e-15 && (r.u_g - r.u_f).abs() < 1e-15);
    }

    #[test]
    fn incomplete_market_is_rejected() {
        let t = EventTree::uniform(1, 3, 1).unwrap();
        let s = AdaptedProcess::from_scalars(&t, vec![int(1), int(2), int(1), rat(1, 2)]).unwrap();
        assert!(matches!(unique_martingale_measure(&t, &s), Err(Error::Incomplete(_))));
    }
}
