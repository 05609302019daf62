//! Seeded generators of small random markets, used by property tests and
//! the examples.

use num_traits::Zero;
use rand::Rng;

use crate::filtered_space::{AdaptedProcess, EventTree, ProbMeasure, StoppingTime};
use crate::rational::{int, rat, Rational};

#[derive(Clone, Copy, Debug)]
pub struct MarketShape {
    pub max_steps: usize,
    pub max_branching: usize,
    pub asset_dim: usize,
    /// Prices are drawn from `[-price_bound, price_bound]`.
    pub price_bound: i64,
    /// Chance (in eighths) that a single child repeats its parent's price.
    pub flat_eighths: u32,
    /// Chance (in eighths) that the children of a branching node are redrawn
    /// until their prices straddle the parent's.
    pub straddle_eighths: u32,
}

impl Default for MarketShape {
    fn default() -> Self {
        MarketShape {
            max_steps: 4,
            max_branching: 3,
            asset_dim: 1,
            price_bound: 4,
            flat_eighths: 6,
            straddle_eighths: 7,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RandomMarket {
    pub tree: EventTree,
    pub p: ProbMeasure,
    pub s: AdaptedProcess,
}

pub fn random_tree(rng: &mut impl Rng, shape: &MarketShape) -> EventTree {
    let horizon = rng.random_range(1..=shape.max_steps);
    let mut counts = Vec::new();
    let mut frontier = 1usize;
    for _ in 0..horizon {
        let mut next = 0;
        for _ in 0..frontier {
            let c = rng.random_range(1..=shape.max_branching);
            counts.push(c);
            next += c;
        }
        frontier = next;
    }
    EventTree::from_child_counts(horizon, shape.asset_dim, &counts).expect("generated counts are valid")
}

/// Strictly positive measure from random integer edge weights in `1..=4`.
pub fn random_measure(rng: &mut impl Rng, tree: &EventTree) -> ProbMeasure {
    let mut edge = vec![Rational::zero(); tree.num_nodes()];
    for v in tree.internal_nodes() {
        let ch = tree.children(v);
        let w: Vec<i64> = ch.clone().map(|_| rng.random_range(1..=4)).collect();
        let total: i64 = w.iter().sum();
        for (c, wi) in ch.zip(w) {
            edge[c] = rat(wi, total);
        }
    }
    ProbMeasure::from_transitions(tree, &edge).expect("edge weights are normalized")
}

/// A rational in `[-bound, bound]` with denominator in `1..=4`.
pub fn random_rational(rng: &mut impl Rng, bound: i64) -> Rational {
    let q = rng.random_range(1..=4);
    rat(rng.random_range(-bound * q..=bound * q), q)
}

pub fn random_price(rng: &mut impl Rng, tree: &EventTree, shape: &MarketShape) -> AdaptedProcess {
    let d = shape.asset_dim;
    let mut values = vec![Rational::zero(); tree.num_nodes() * d];
    for x in values.iter_mut().take(d) {
        *x = random_rational(rng, shape.price_bound);
    }
    for v in tree.internal_nodes() {
        let ch = tree.children(v);
        let parent = values[v * d..(v + 1) * d].to_vec();
        if ch.len() == 1 {
            let flat = rng.random_range(0..8) < shape.flat_eighths;
            for i in 0..d {
                values[ch.start * d + i] = if flat {
                    parent[i].clone()
                } else {
                    random_rational(rng, shape.price_bound)
                };
            }
            continue;
        }
        let straddle = rng.random_range(0..8) < shape.straddle_eighths;
        for _attempt in 0..20 {
            for c in ch.clone() {
                for i in 0..d {
                    values[c * d + i] = random_rational(rng, shape.price_bound);
                }
            }
            let ok = (0..d).all(|i| {
                let above = ch.clone().any(|c| values[c * d + i] > parent[i]);
                let below = ch.clone().any(|c| values[c * d + i] < parent[i]);
                above && below
            });
            if !straddle || ok {
                break;
            }
        }
    }
    AdaptedProcess::new(tree, d, values).expect("sized to the tree")
}

pub fn random_market(rng: &mut impl Rng, shape: &MarketShape) -> RandomMarket {
    let tree = random_tree(rng, shape);
    let p = random_measure(rng, &tree);
    let s = random_price(rng, &tree, shape);
    RandomMarket { tree, p, s }
}

/// Random labels from `{"l0", .., "l{k-1}"}`, one per leaf.
pub fn random_labels(rng: &mut impl Rng, tree: &EventTree, k: usize) -> Vec<String> {
    tree.leaves().map(|_| format!("l{}", rng.random_range(0..k))).collect()
}

/// Random nonnegative integer-valued terminal payoff.
pub fn random_payoff(rng: &mut impl Rng, tree: &EventTree) -> Vec<Rational> {
    tree.leaves().map(|_| int(rng.random_range(0..=6))).collect()
}

/// Hitting time of a random node set, counted from a random start time.
pub fn random_hitting_time(rng: &mut impl Rng, tree: &EventTree) -> StoppingTime {
    let from = rng.random_range(0..=tree.horizon());
    let hit: Vec<bool> = (0..tree.num_nodes()).map(|_| rng.random_bool(0.5)).collect();
    StoppingTime::hitting(tree, from, |v| hit[v])
}
