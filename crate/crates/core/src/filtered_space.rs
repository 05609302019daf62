//! Finite filtered probability spaces as event trees.
//!
//! Node ids are dense and assigned in breadth-first order. Two facts follow
//! and are used throughout the crate:
//!
//! * the children of a node are a contiguous id range;
//! * the descendants of a node at any later time are a contiguous id range,
//!   in particular the leaves below a node form a contiguous span.
//!
//! Leaves are exactly the time-`n` nodes and are also indexed by their
//! position in the last layer ("leaf index").

use std::ops::Range;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EventTree {
    horizon: usize,
    asset_dim: usize,
    parent: Vec<Option<usize>>,
    time: Vec<usize>,
    children: Vec<Range<usize>>,
    layer_start: Vec<usize>,
}

impl EventTree {
    /// Builds a tree from the parent of every node, given in id order.
    pub fn from_parents(horizon: usize, asset_dim: usize, parents: &[Option<usize>]) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::InvalidTree("horizon must be at least 1".into()));
        }
        if asset_dim == 0 {
            return Err(Error::InvalidTree("asset_dim must be at least 1".into()));
        }
        if parents.first() != Some(&None) {
            return Err(Error::InvalidTree("node 0 must be the unique root".into()));
        }
        let n = parents.len();
        let mut time = vec![0usize; n];
        let mut children = vec![0..0; n];
        let mut last_parent = 0usize;
        for (id, p) in parents.iter().enumerate().skip(1) {
            let Some(p) = *p else {
                return Err(Error::InvalidTree(format!("node {id} has no parent; only node 0 may be a root")));
            };
            if p >= id {
                return Err(Error::InvalidTree(format!("node {id} has parent {p}; ids must be breadth-first")));
            }
            if p < last_parent {
                return Err(Error::InvalidTree(format!(
                    "node {id} breaks breadth-first order (parent {p} after {last_parent})"
                )));
            }
            last_parent = p;
            time[id] = time[p] + 1;
            if time[id] > horizon {
                return Err(Error::InvalidTree(format!("node {id} lies beyond the horizon {horizon}")));
            }
            if children[p].is_empty() {
                children[p] = id..id + 1;
            } else if children[p].end == id {
                children[p].end = id + 1;
            } else {
                return Err(Error::InvalidTree(format!("children of node {p} are not contiguous")));
            }
        }
        for id in 0..n {
            let leaf = children[id].is_empty();
            if leaf != (time[id] == horizon) {
                return Err(Error::InvalidTree(if leaf {
                    format!("node {id} at time {} < horizon has no children", time[id])
                } else {
                    format!("node {id} at the horizon has children")
                }));
            }
        }
        let mut layer_start = Vec::with_capacity(horizon + 2);
        for k in 0..=horizon {
            let start = time.iter().position(|&t| t == k).expect("every layer is populated");
            layer_start.push(start);
        }
        layer_start.push(n);
        Ok(EventTree {
            horizon,
            asset_dim,
            parent: parents.to_vec(),
            time,
            children,
            layer_start,
        })
    }

    /// Builds a tree from the number of children of each non-leaf node,
    /// listed in breadth-first order.
    pub fn from_child_counts(horizon: usize, asset_dim: usize, counts: &[usize]) -> Result<Self> {
        let mut parents = vec![None];
        let mut next = 0usize;
        let mut frontier = 1usize;
        let mut k = 0;
        let mut idx = 0;
        while k < horizon {
            let mut new_frontier = 0;
            for _ in 0..frontier {
                let c = *counts
                    .get(idx)
                    .ok_or_else(|| Error::InvalidTree("not enough child counts".into()))?;
                if c == 0 {
                    return Err(Error::InvalidTree(format!("node {next} must have at least one child")));
                }
                parents.extend(std::iter::repeat_n(Some(next), c));
                new_frontier += c;
                next += 1;
                idx += 1;
            }
            frontier = new_frontier;
            k += 1;
        }
        if idx != counts.len() {
            return Err(Error::InvalidTree("too many child counts".into()));
        }
        Self::from_parents(horizon, asset_dim, &parents)
    }

    /// Every non-leaf node has `branching` children.
    pub fn uniform(horizon: usize, branching: usize, asset_dim: usize) -> Result<Self> {
        let internal: usize = (0..horizon).map(|k| branching.pow(k as u32)).sum();
        Self::from_child_counts(horizon, asset_dim, &vec![branching; internal])
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn asset_dim(&self) -> usize {
        self.asset_dim
    }

    pub fn num_nodes(&self) -> usize {
        self.parent.len()
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn time(&self, v: usize) -> usize {
        self.time[v]
    }

    pub fn children(&self, v: usize) -> Range<usize> {
        self.children[v].clone()
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        self.time[v] == self.horizon
    }

    /// Nodes at time `k`, i.e. the atoms of `F_k`.
    pub fn layer(&self, k: usize) -> Range<usize> {
        self.layer_start[k]..self.layer_start[k + 1]
    }

    pub fn leaves(&self) -> Range<usize> {
        self.layer(self.horizon)
    }

    pub fn num_leaves(&self) -> usize {
        self.leaves().len()
    }

    /// Non-leaf nodes; strategies live here.
    pub fn internal_nodes(&self) -> Range<usize> {
        0..self.layer_start[self.horizon]
    }

    pub fn leaf_index(&self, leaf: usize) -> usize {
        debug_assert!(self.is_leaf(leaf));
        leaf - self.layer_start[self.horizon]
    }

    pub fn leaf_node(&self, index: usize) -> usize {
        self.layer_start[self.horizon] + index
    }

    /// Descendants of `v` at time `k ≥ time(v)`.
    pub fn descendants_at(&self, v: usize, k: usize) -> Range<usize> {
        assert!(k >= self.time[v] && k <= self.horizon);
        let mut r = v..v + 1;
        for _ in self.time[v]..k {
            let lo = self.children[r.start].start;
            let hi = self.children[r.end - 1].end;
            r = lo..hi;
        }
        r
    }

    /// Leaf indices below `v`.
    pub fn leaf_span(&self, v: usize) -> Range<usize> {
        let r = self.descendants_at(v, self.horizon);
        self.leaf_index(r.start)..self.leaf_index(r.end - 1) + 1
    }

    /// The ancestor of `v` at time `k ≤ time(v)`.
    pub fn ancestor_at(&self, mut v: usize, k: usize) -> usize {
        assert!(k <= self.time[v]);
        while self.time[v] > k {
            v = self.parent[v].expect("non-root node has a parent");
        }
        v
    }

    pub fn is_ancestor(&self, a: usize, v: usize) -> bool {
        self.time[a] <= self.time[v] && self.ancestor_at(v, self.time[a]) == a
    }

    /// Path from the root to `v`, inclusive.
    pub fn path(&self, v: usize) -> Vec<usize> {
        let mut p = vec![v];
        let mut cur = v;
        while let Some(q) = self.parent[cur] {
            p.push(q);
            cur = q;
        }
        p.reverse();
        p
    }

    pub fn parents(&self) -> &[Option<usize>] {
        &self.parent
    }
}

/// A probability measure given by its leaf masses (indexed by leaf index).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbMeasure {
    mass: Vec<Rational>,
}

impl ProbMeasure {
    pub fn new(tree: &EventTree, mass: Vec<Rational>) -> Result<Self> {
        if mass.len() != tree.num_leaves() {
            return Err(Error::InvalidMeasure(format!(
                "{} leaf masses for {} leaves",
                mass.len(),
                tree.num_leaves()
            )));
        }
        if let Some(i) = mass.iter().position(|m| m.is_negative()) {
            return Err(Error::InvalidMeasure(format!("leaf {} has negative mass", tree.leaf_node(i))));
        }
        let total: Rational = mass.iter().sum();
        if !total.is_one() {
            return Err(Error::InvalidMeasure(format!(
                "masses sum to {}, not 1",
                crate::rational::format(&total)
            )));
        }
        Ok(ProbMeasure { mass })
    }

    /// Each child receives an equal share of its parent's mass.
    pub fn uniform_branching(tree: &EventTree) -> Self {
        let mut node = vec![Rational::zero(); tree.num_nodes()];
        node[0] = Rational::one();
        for v in tree.internal_nodes() {
            let ch = tree.children(v);
            let share = &node[v] / Rational::from_integer(ch.len().into());
            for c in ch {
                node[c] = share.clone();
            }
        }
        ProbMeasure {
            mass: tree.leaves().map(|l| node[l].clone()).collect(),
        }
    }

    /// Leaf masses from conditional transition probabilities on every edge
    /// (indexed by child node id; the root entry is ignored).
    pub fn from_transitions(tree: &EventTree, edge: &[Rational]) -> Result<Self> {
        let mut node = vec![Rational::zero(); tree.num_nodes()];
        node[0] = Rational::one();
        for v in 1..tree.num_nodes() {
            let p = tree.parent(v).expect("non-root");
            node[v] = &node[p] * &edge[v];
        }
        Self::new(tree, tree.leaves().map(|l| node[l].clone()).collect())
    }

    pub fn leaf_masses(&self) -> &[Rational] {
        &self.mass
    }

    pub fn leaf_mass(&self, leaf_index: usize) -> &Rational {
        &self.mass[leaf_index]
    }

    /// Mass of the atom represented by node `v`.
    pub fn node_mass(&self, tree: &EventTree, v: usize) -> Rational {
        self.mass[tree.leaf_span(v)].iter().sum()
    }

    /// Masses of every node, computed in one upward pass.
    pub fn node_masses(&self, tree: &EventTree) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); tree.num_nodes()];
        for (i, l) in tree.leaves().enumerate() {
            out[l] = self.mass[i].clone();
        }
        for v in tree.internal_nodes().rev() {
            out[v] = tree.children(v).map(|c| &out[c]).sum();
        }
        out
    }

    pub fn strictly_positive(&self) -> bool {
        self.mass.iter().all(|m| m.is_positive())
    }

    pub(crate) fn require_strictly_positive(&self, tree: &EventTree) -> Result<()> {
        match self.mass.iter().position(|m| !m.is_positive()) {
            Some(i) => Err(Error::NotStrictlyPositive { node: tree.leaf_node(i) }),
            None => Ok(()),
        }
    }
}

/// One `dim`-vector per node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdaptedProcess {
    dim: usize,
    values: Vec<Rational>,
}

impl AdaptedProcess {
    pub fn new(tree: &EventTree, dim: usize, values: Vec<Rational>) -> Result<Self> {
        if dim == 0 || values.len() != tree.num_nodes() * dim {
            return Err(Error::Shape(format!(
                "process needs {} values of dimension {dim}, got {}",
                tree.num_nodes(),
                values.len()
            )));
        }
        Ok(AdaptedProcess { dim, values })
    }

    pub fn from_scalars(tree: &EventTree, values: Vec<Rational>) -> Result<Self> {
        Self::new(tree, 1, values)
    }

    pub fn from_fn(tree: &EventTree, mut f: impl FnMut(usize) -> Rational) -> Self {
        AdaptedProcess {
            dim: 1,
            values: (0..tree.num_nodes()).map(&mut f).collect(),
        }
    }

    pub fn constant(tree: &EventTree, c: Rational) -> Self {
        AdaptedProcess {
            dim: 1,
            values: vec![c; tree.num_nodes()],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_nodes(&self) -> usize {
        self.values.len() / self.dim
    }

    pub fn value(&self, v: usize) -> &[Rational] {
        &self.values[v * self.dim..(v + 1) * self.dim]
    }

    /// Scalar value; only meaningful for `dim == 1`.
    pub fn at(&self, v: usize) -> &Rational {
        debug_assert_eq!(self.dim, 1);
        &self.values[v]
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    /// Increment `X(v) − X(parent(v))`.
    pub fn increment(&self, tree: &EventTree, v: usize) -> Vec<Rational> {
        let p = tree.parent(v).expect("increment of the root");
        self.value(v).iter().zip(self.value(p)).map(|(a, b)| a - b).collect()
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        AdaptedProcess {
            dim: self.dim,
            values: self.values.iter().map(|x| x * c).collect(),
        }
    }
}

/// Predictable process: one `dim`-vector per non-leaf node, the holding over
/// the step leaving that node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Strategy {
    dim: usize,
    values: Vec<Rational>,
}

impl Strategy {
    pub fn new(tree: &EventTree, dim: usize, values: Vec<Rational>) -> Result<Self> {
        let internal = tree.internal_nodes().len();
        if dim == 0 || values.len() != internal * dim {
            return Err(Error::Shape(format!(
                "strategy needs {internal} values of dimension {dim}, got {}",
                values.len()
            )));
        }
        Ok(Strategy { dim, values })
    }

    pub fn zero(tree: &EventTree, dim: usize) -> Self {
        Strategy {
            dim,
            values: vec![Rational::zero(); tree.internal_nodes().len() * dim],
        }
    }

    pub fn from_fn(tree: &EventTree, dim: usize, mut f: impl FnMut(usize) -> Vec<Rational>) -> Self {
        let mut values = Vec::with_capacity(tree.internal_nodes().len() * dim);
        for v in tree.internal_nodes() {
            let h = f(v);
            assert_eq!(h.len(), dim);
            values.extend(h);
        }
        Strategy { dim, values }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Holding chosen at non-leaf node `v`.
    pub fn at(&self, v: usize) -> &[Rational] {
        &self.values[v * self.dim..(v + 1) * self.dim]
    }

    pub fn at_mut(&mut self, v: usize) -> &mut [Rational] {
        &mut self.values[v * self.dim..(v + 1) * self.dim]
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        Strategy {
            dim: self.dim,
            values: self.values.iter().map(|x| x * c).collect(),
        }
    }
}

/// A stopping time given by an antichain of stop nodes; leaves not below any
/// stop node are assigned `∞`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StoppingTime {
    stop_at: Vec<usize>,
}

impl StoppingTime {
    pub fn new(tree: &EventTree, mut stop_at: Vec<usize>) -> Result<Self> {
        stop_at.sort_unstable();
        stop_at.dedup();
        if let Some(&v) = stop_at.iter().find(|&&v| v >= tree.num_nodes()) {
            return Err(Error::InvalidTree(format!("stop node {v} does not exist")));
        }
        for (i, &a) in stop_at.iter().enumerate() {
            for &b in &stop_at[i + 1..] {
                if tree.is_ancestor(a, b) {
                    return Err(Error::InvalidTree(format!("stop nodes {a} and {b} are nested")));
                }
            }
        }
        Ok(StoppingTime { stop_at })
    }

    /// Never stops.
    pub fn infinite() -> Self {
        StoppingTime { stop_at: Vec::new() }
    }

    /// Stops at every node of layer `k`.
    pub fn deterministic(tree: &EventTree, k: usize) -> Self {
        StoppingTime {
            stop_at: tree.layer(k).collect(),
        }
    }

    /// First node `v` with `time(v) ≥ from` at which `hit(v)` holds.
    pub fn hitting(tree: &EventTree, from: usize, hit: impl Fn(usize) -> bool) -> Self {
        let mut stop_at = Vec::new();
        let mut stack = vec![0usize];
        while let Some(v) = stack.pop() {
            if tree.time(v) >= from && hit(v) {
                stop_at.push(v);
            } else {
                stack.extend(tree.children(v));
            }
        }
        stop_at.sort_unstable();
        StoppingTime { stop_at }
    }

    pub fn stop_nodes(&self) -> &[usize] {
        &self.stop_at
    }

    /// Stop node above the given leaf node, if any.
    pub fn leaf_time(&self, tree: &EventTree, leaf: usize) -> Option<usize> {
        self.stop_at.iter().copied().find(|&s| tree.is_ancestor(s, leaf))
    }
}

/// Conditional expectation of the time-`k` values of `x` given `F_j`, one
/// value per node of layer `j` (in layer order).
pub fn conditional_expectation(
    tree: &EventTree,
    p: &ProbMeasure,
    x: &AdaptedProcess,
    k: usize,
    j: usize,
) -> Result<Vec<Rational>> {
    if x.dim() != 1 {
        return Err(Error::Shape("conditional expectation expects a scalar process".into()));
    }
    if j > k || k > tree.horizon() {
        return Err(Error::Shape(format!("need j ≤ k ≤ n, got j = {j}, k = {k}")));
    }
    let masses = p.node_masses(tree);
    tree.layer(j)
        .map(|u| {
            let below = tree.descendants_at(u, k);
            if masses[u].is_zero() {
                if below.clone().any(|v| !x.at(v).is_zero()) {
                    return Err(Error::NullAtom { node: u });
                }
                return Ok(Rational::zero());
            }
            let num: Rational = below.map(|v| &masses[v] * x.at(v)).sum();
            Ok(num / &masses[u])
        })
        .collect()
}

/// `E[f(child) | node]` for a one-step transition from `v`.
pub(crate) fn one_step_mean(masses: &[Rational], tree: &EventTree, v: usize, f: impl Fn(usize) -> Rational) -> Rational {
    let num: Rational = tree.children(v).map(|c| &masses[c] * f(c)).sum();
    num / &masses[v]
}

/// Discrete stochastic integral `(H·S)`, zero at the root.
pub fn stochastic_integral(tree: &EventTree, s: &AdaptedProcess, h: &Strategy) -> Result<AdaptedProcess> {
    if s.dim() != h.dim() {
        return Err(Error::Shape(format!(
            "price has dimension {} but strategy has dimension {}",
            s.dim(),
            h.dim()
        )));
    }
    if s.num_nodes() != tree.num_nodes() {
        return Err(Error::Shape("price process does not match the tree".into()));
    }
    let mut g = vec![Rational::zero(); tree.num_nodes()];
    for v in 1..tree.num_nodes() {
        let p = tree.parent(v).expect("non-root");
        let gain: Rational = h
            .at(p)
            .iter()
            .zip(s.value(v).iter().zip(s.value(p)))
            .map(|(hi, (a, b))| hi * (a - b))
            .sum();
        g[v] = &g[p] + gain;
    }
    Ok(AdaptedProcess { dim: 1, values: g })
}

/// Discrete Doob decomposition `Z = Z_0 + M − A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Doob {
    /// `M`, zero at the root.
    pub martingale: AdaptedProcess,
    /// `ΔA_{k+1}` stored at the time-`k` node.
    pub increments: Strategy,
    /// Cumulative `A`, zero at the root.
    pub compensator: AdaptedProcess,
}

impl Doob {
    pub fn is_supermartingale(&self) -> bool {
        self.increments.values().iter().all(|a| !a.is_negative())
    }
}

pub fn doob_decomposition(tree: &EventTree, p: &ProbMeasure, z: &AdaptedProcess) -> Result<Doob> {
    p.require_strictly_positive(tree)?;
    if z.dim() != 1 || z.num_nodes() != tree.num_nodes() {
        return Err(Error::Shape("Doob decomposition expects a scalar process on the tree".into()));
    }
    let masses = p.node_masses(tree);
    let inc: Vec<Rational> = tree
        .internal_nodes()
        .map(|v| z.at(v) - one_step_mean(&masses, tree, v, |c| z.at(c).clone()))
        .collect();
    let mut a = vec![Rational::zero(); tree.num_nodes()];
    let mut m = vec![Rational::zero(); tree.num_nodes()];
    for v in 1..tree.num_nodes() {
        let par = tree.parent(v).expect("non-root");
        a[v] = &a[par] + &inc[par];
        m[v] = z.at(v) - z.at(0) + &a[v];
    }
    let doob = Doob {
        martingale: AdaptedProcess { dim: 1, values: m },
        increments: Strategy { dim: 1, values: inc },
        compensator: AdaptedProcess { dim: 1, values: a },
    };
    debug_assert!(tree
        .internal_nodes()
        .all(|v| one_step_mean(&masses, tree, v, |c| doob.martingale.at(c).clone()) == *doob.martingale.at(v)));
    Ok(doob)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn one_step() -> (EventTree, ProbMeasure) {
        let t = EventTree::uniform(1, 2, 1).unwrap();
        let p = ProbMeasure::uniform_branching(&t);
        (t, p)
    }

    #[test]
    fn rejects_malformed_trees() {
        assert!(EventTree::from_parents(1, 1, &[None, Some(0), None]).is_err());
        assert!(EventTree::from_parents(2, 1, &[None, Some(0), Some(0)]).is_err());
        assert!(EventTree::from_parents(1, 1, &[None, Some(0), Some(1)]).is_err());
        assert!(EventTree::from_parents(2, 1, &[None, Some(0), Some(0), Some(2), Some(1)]).is_err());
        assert!(EventTree::from_parents(0, 1, &[None]).is_err());
    }

    #[test]
    fn spans_are_contiguous() {
        let t = EventTree::from_child_counts(2, 1, &[3, 1, 2, 2]).unwrap();
        assert_eq!(t.num_leaves(), 5);
        assert_eq!(t.leaf_span(1), 0..1);
        assert_eq!(t.leaf_span(2), 1..3);
        assert_eq!(t.leaf_span(3), 3..5);
        assert_eq!(t.descendants_at(0, 1), 1..4);
        assert_eq!(t.ancestor_at(t.leaf_node(4), 1), 3);
    }

    #[test]
    fn conditional_expectation_by_hand() {
        let (t, p) = one_step();
        let x = AdaptedProcess::from_scalars(&t, vec![int(0), int(2), rat(1, 2)]).unwrap();
        assert_eq!(conditional_expectation(&t, &p, &x, 1, 0).unwrap(), vec![rat(5, 4)]);
        let ind = AdaptedProcess::from_scalars(&t, vec![int(0), int(1), int(0)]).unwrap();
        assert_eq!(conditional_expectation(&t, &p, &ind, 1, 0).unwrap(), vec![rat(1, 2)]);
    }

    #[test]
    fn null_atom_is_reported() {
        let t = EventTree::from_child_counts(2, 1, &[2, 1, 1]).unwrap();
        let p = ProbMeasure::new(&t, vec![int(1), int(0)]).unwrap();
        let x = AdaptedProcess::from_fn(&t, |v| int(v as i64));
        assert!(matches!(
            conditional_expectation(&t, &p, &x, 2, 1),
            Err(Error::NullAtom { node: 2 })
        ));
    }

    #[test]
    fn integral_of_unit_holding() {
        let (t, _) = one_step();
        let s = AdaptedProcess::from_scalars(&t, vec![int(1), int(2), rat(1, 2)]).unwrap();
        let h = Strategy::new(&t, 1, vec![int(1)]).unwrap();
        let g = stochastic_integral(&t, &s, &h).unwrap();
        assert_eq!(g.values(), &[int(0), int(1), rat(-1, 2)]);
    }

    #[test]
    fn doob_examples() {
        let (t, p) = one_step();
        let z = AdaptedProcess::from_scalars(&t, vec![int(1), rat(3, 2), rat(1, 4)]).unwrap();
        let d = doob_decomposition(&t, &p, &z).unwrap();
        assert_eq!(d.increments.at(0), &[rat(1, 8)]);

        let single = EventTree::from_child_counts(1, 1, &[1]).unwrap();
        let p1 = ProbMeasure::uniform_branching(&single);
        let z = AdaptedProcess::from_scalars(&single, vec![int(1), rat(1, 2)]).unwrap();
        let d = doob_decomposition(&single, &p1, &z).unwrap();
        assert_eq!(d.increments.at(0), &[rat(1, 2)]);
        assert_eq!(d.martingale.at(1), &int(0));
    }

    #[test]
    fn hitting_time_is_an_antichain() {
        let t = EventTree::uniform(3, 2, 1).unwrap();
        let tau = StoppingTime::hitting(&t, 1, |v| v % 3 == 0);
        assert!(StoppingTime::new(&t, tau.stop_nodes().to_vec()).is_ok());
        assert!(StoppingTime::new(&t, vec![1, 3]).is_err());
    }
}
