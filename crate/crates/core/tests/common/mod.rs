//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use deflator_lab::filtered_space::{AdaptedProcess, EventTree, ProbMeasure};
use deflator_lab::rational::{to_f64, Rational};
use num_traits::{One, Signed, Zero};

/// `sup E[1 + (H·S)_n]` over 1-admissible strategies for a scalar price, by
/// backward induction over the admissible interval of each one-step
/// fraction. The objective is linear in the fraction, so an endpoint is
/// optimal. `None` when some node has a nonzero one-signed move.
pub fn na1_value_oracle(tree: &EventTree, p: &ProbMeasure, s: &AdaptedProcess) -> Option<Rational> {
    assert_eq!(s.dim(), 1);
    let mass = p.node_masses(tree);
    let mut v = vec![Rational::one(); tree.num_nodes()];
    for n in tree.internal_nodes().rev() {
        let moves: Vec<(usize, Rational)> = tree.children(n).map(|c| (c, s.at(c) - s.at(n))).collect();
        let up = moves.iter().any(|(_, d)| d.is_positive());
        let down = moves.iter().any(|(_, d)| d.is_negative());
        let value = |pi: &Rational| -> Rational {
            moves
                .iter()
                .map(|(c, d)| &mass[*c] / &mass[n] * &v[*c] * (Rational::one() + pi * d))
                .sum()
        };
        v[n] = match (up, down) {
            (false, false) => value(&Rational::zero()),
            (true, true) => {
                let lo = moves
                    .iter()
                    .filter(|(_, d)| d.is_positive())
                    .map(|(_, d)| -Rational::one() / d)
                    .max()
                    .unwrap();
                let hi = moves
                    .iter()
                    .filter(|(_, d)| d.is_negative())
                    .map(|(_, d)| -Rational::one() / d)
                    .min()
                    .unwrap();
                value(&lo).max(value(&hi))
            }
            _ => return None,
        };
    }
    Some(v[tree.root()].clone())
}

/// Maximizes a concave function on `[lo, hi]` by golden-section search,
/// also trying both endpoints.
pub fn golden_max(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    for _ in 0..200 {
        let x1 = b - r * (b - a);
        let x2 = a + r * (b - a);
        if f(x1) < f(x2) {
            a = x1;
        } else {
            b = x2;
        }
    }
    [f(lo), f(hi), f((a + b) / 2.0)]
        .into_iter()
        .filter(|x| !x.is_nan())
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `sup E[log X]` for an investor who knows the leaf lies in `allowed`,
/// trading fractions that keep wealth nonnegative on every base
/// continuation. Log utility is homothetic, so the value is
/// `log w + K(node)` and `K` is found by backward induction.
pub fn log_growth_oracle(tree: &EventTree, p: &ProbMeasure, s: &AdaptedProcess, allowed: &[bool]) -> f64 {
    assert_eq!(s.dim(), 1);
    let mut mass = vec![0.0; tree.num_nodes()];
    for (i, l) in tree.leaves().enumerate() {
        if allowed[i] {
            mass[l] = to_f64(p.leaf_mass(i));
        }
    }
    for n in tree.internal_nodes().rev() {
        mass[n] = tree.children(n).map(|c| mass[c]).sum();
    }
    let mut k = vec![0.0; tree.num_nodes()];
    for n in tree.internal_nodes().rev() {
        if mass[n] == 0.0 {
            continue;
        }
        let moves: Vec<(usize, f64)> = tree.children(n).map(|c| (c, to_f64(&(s.at(c) - s.at(n))))).collect();
        let lo = moves.iter().filter(|m| m.1 > 0.0).map(|m| -1.0 / m.1).fold(f64::NEG_INFINITY, f64::max);
        let hi = moves.iter().filter(|m| m.1 < 0.0).map(|m| -1.0 / m.1).fold(f64::INFINITY, f64::min);
        let obj = |pi: f64| -> f64 {
            moves
                .iter()
                .filter(|m| mass[m.0] > 0.0)
                .map(|&(c, d)| mass[c] / mass[n] * ((1.0 + pi * d).ln() + k[c]))
                .sum()
        };
        assert!(lo.is_finite() || hi.is_finite() || moves.iter().all(|m| m.1 == 0.0));
        k[n] = if lo.is_finite() && hi.is_finite() { golden_max(obj, lo, hi) } else { obj(0.0) };
    }
    k[tree.root()]
}
