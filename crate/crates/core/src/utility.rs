//! de la Vallée-Poussin utilities from a tail bound, and the supremum of
//! expected utility over 1-admissible terminal wealths.
//!
//! The builder works with dyadic enclosures: every quantity is carried as a
//! pair of `u128` numerators over `2^64`, rounded down and up respectively,
//! so each emitted bound is a certificate rather than an approximation.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arbitrage::WealthProblem;
use crate::error::{Error, Result};
use crate::lp::{LinearProgram, LpOutcome, Relation};
use crate::rational::{Extended, Rational};

const FRAC_BITS: u32 = 64;
const ONE: u128 = 1u128 << FRAC_BITS;

/// A nonincreasing tail `F(k)`, `k ≥ 0`, with values in `[0, 1]` and limit 0.
#[derive(Clone)]
pub enum Tail {
    /// `F(k) = ratio^k`.
    Geometric { ratio: Rational },
    /// Listed values, zero beyond the end.
    Table(Vec<Rational>),
    /// Arbitrary exact function.
    Fn(Arc<dyn Fn(u64) -> Rational + Send + Sync>),
}

impl fmt::Debug for Tail {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tail::Geometric { ratio } => write!(f, "Geometric({ratio})"),
            Tail::Table(t) => write!(f, "Table(len {})", t.len()),
            Tail::Fn(_) => write!(f, "Fn(..)"),
        }
    }
}

impl Tail {
    pub fn geometric(ratio: Rational) -> Self {
        Tail::Geometric { ratio }
    }

    pub fn value(&self, k: u64) -> Rational {
        match self {
            Tail::Geometric { ratio } => num_traits::pow(ratio.clone(), k as usize),
            Tail::Table(t) => t.get(k as usize).cloned().unwrap_or_else(Rational::zero),
            Tail::Fn(f) => f(k),
        }
    }
}

/// Streams dyadic enclosures `[lo, hi]` of `F(0), F(1), …`.
struct TailStream<'a> {
    tail: &'a Tail,
    k: u64,
    lo: u128,
    hi: u128,
    prev_exact: Option<Rational>,
    ratio: Option<(u128, u128)>,
}

impl<'a> TailStream<'a> {
    fn new(tail: &'a Tail) -> Result<Self> {
        let ratio = match tail {
            Tail::Geometric { ratio } => {
                if ratio.is_negative() || *ratio >= Rational::one() {
                    return Err(Error::Tail(format!("geometric ratio {ratio} must lie in [0, 1)")));
                }
                let num = ratio.numer().to_u64().ok_or_else(|| Error::Tail("ratio numerator too large".into()))?;
                let den = ratio.denom().to_u64().ok_or_else(|| Error::Tail("ratio denominator too large".into()))?;
                Some((num as u128, den as u128))
            }
            _ => None,
        };
        Ok(TailStream {
            tail,
            k: 0,
            lo: ONE,
            hi: ONE,
            prev_exact: None,
            ratio,
        })
    }

    fn next(&mut self) -> Result<(u128, u128)> {
        let out = match self.ratio {
            Some((num, den)) => {
                if self.k > 0 {
                    self.lo = self.lo * num / den;
                    self.hi = (self.hi * num).div_ceil(den);
                }
                (self.lo, self.hi)
            }
            None => {
                let x = self.tail.value(self.k);
                if x.is_negative() || x > Rational::one() {
                    return Err(Error::Tail(format!("F({}) = {x} lies outside [0, 1]", self.k)));
                }
                if let Some(prev) = &self.prev_exact {
                    if x > *prev {
                        return Err(Error::Tail(format!("tail increases at k = {}", self.k)));
                    }
                }
                let enc = dyadic_enclosure(&x);
                self.prev_exact = Some(x);
                enc
            }
        };
        self.k += 1;
        Ok(out)
    }
}

/// `(floor(x·2^64), ceil(x·2^64))` for `x ∈ [0, 1]`.
fn dyadic_enclosure(x: &Rational) -> (u128, u128) {
    let scaled = x * Rational::from_integer(BigInt::from(ONE));
    let lo = scaled.floor().to_integer().to_u128().expect("x ≤ 1");
    let hi = scaled.ceil().to_integer().to_u128().expect("x ≤ 1");
    (lo, hi)
}

fn dyadic_to_rational(x: &BigInt, frac_bits: u32) -> Rational {
    Rational::new(x.clone(), BigInt::one() << frac_bits)
}

#[derive(Clone, Debug)]
pub struct UtilityConfig {
    /// Number of slopes `g_1..g_K` to emit.
    pub k: usize,
    /// Truncation point of the series defining `g_k`.
    pub n_sum: usize,
    /// Search limit for each cut level, as a multiple of `n_sum`.
    pub probe_factor: usize,
    /// Terms in the certified lower bound for `π²/6`.
    pub zeta_terms: usize,
}

impl Default for UtilityConfig {
    fn default() -> Self {
        UtilityConfig {
            k: 10_000,
            n_sum: 1_000_000,
            probe_factor: 64,
            zeta_terms: 2_000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct UtilityReport {
    pub config: UtilityConfig,
    /// `K_1..K_{n_sum}`.
    pub cut_levels: Vec<u64>,
    /// `n_1..n_K`.
    pub first_index: Vec<u64>,
    /// Dyadic numerators (over `2^64`) enclosing `g_1..g_K`.
    pub g_lo: Vec<u128>,
    pub g_hi: Vec<u128>,
    /// Enclosure numerators (over `2^64`) of `F(0..K)`.
    pub tail_lo: Vec<u128>,
    pub tail_hi: Vec<u128>,
    /// Numerator (over `2^64`) bounding the discarded part of every `g_k`.
    pub truncation_bound: u128,
    /// Lower enclosure of `Σ_{k≤K} g_k`.
    pub sum_g_lo: Rational,
    /// `m = #{n : K_n ≤ K}`; then `Σ_{k≤K} g_k ≥ H(m)`.
    pub harmonic_count: u64,
    pub divergence_certified: bool,
    /// Upper enclosure of `Σ_{k≤K} g_k F(k−1)`.
    pub weighted_sum_hi: Rational,
    /// Certified lower bound for `π²/6`.
    pub zeta2_lower: Rational,
    pub weighted_bound_certified: bool,
}

impl UtilityReport {
    /// `[g_k]` for `k ≥ 1` as exact dyadic rationals.
    pub fn g_interval(&self, k: usize) -> (Rational, Rational) {
        (
            dyadic_to_rational(&BigInt::from(self.g_lo[k - 1]), FRAC_BITS),
            dyadic_to_rational(&BigInt::from(self.g_hi[k - 1]), FRAC_BITS),
        )
    }

    pub fn g_midpoints(&self) -> Vec<f64> {
        self.g_lo
            .iter()
            .zip(&self.g_hi)
            .map(|(a, b)| (*a as f64 + *b as f64) / 2.0 / ONE as f64)
            .collect()
    }

    /// `U(j)` at integers `0..=K` from the lower slopes.
    pub fn samples_lo(&self) -> Vec<f64> {
        let mut acc = 0u128;
        let mut out = vec![0.0];
        for g in &self.g_lo {
            acc += g;
            out.push(acc as f64 / ONE as f64);
        }
        out
    }

    /// Concave utility with the certified lower slopes, flat after `K`.
    pub fn lower_utility(&self, slopes: usize) -> PiecewiseLinearConcave {
        let g: Vec<Rational> = self.g_lo[..slopes.min(self.g_lo.len())]
            .iter()
            .map(|g| dyadic_to_rational(&BigInt::from(*g), FRAC_BITS))
            .collect();
        PiecewiseLinearConcave::from_slopes(&g)
    }
}

/// `Σ_{n≤N} 1/n² + 1/(N+1)`, which lies below `π²/6`.
pub fn zeta2_lower_bound(terms: usize) -> Rational {
    let mut s = Rational::zero();
    for n in 1..=terms as i64 {
        s += Rational::new(BigInt::one(), BigInt::from(n * n));
    }
    s + Rational::new(BigInt::one(), BigInt::from(terms as i64 + 1))
}

/// `H(m) = Σ_{n≤m} 1/n`.
pub fn harmonic(m: u64) -> Rational {
    let mut s = Rational::zero();
    for n in 1..=m as i64 {
        s += Rational::new(BigInt::one(), BigInt::from(n));
    }
    s
}

pub fn build_utility(tail: &Tail, config: &UtilityConfig) -> Result<UtilityReport> {
    let kk = config.k;
    let n_sum = config.n_sum;
    if kk == 0 || n_sum < kk {
        return Err(Error::Tail(format!("need 1 ≤ K ≤ N_sum, got K = {kk}, N_sum = {n_sum}")));
    }
    let limit = (n_sum as u64).saturating_mul(config.probe_factor as u64);

    // cut levels: smallest K ≥ max(n, K_{n−1}) with n·Σ_{k<K} F_hi(k) ≤ K·2^64
    let mut stream = TailStream::new(tail)?;
    let mut tail_lo = Vec::with_capacity(kk + 1);
    let mut tail_hi = Vec::with_capacity(kk + 1);
    let mut summed = 0u64;
    let mut prefix_lo = 0u128;
    let mut prefix_hi = 0u128;
    let exact_prefix: Vec<Rational> = match tail {
        Tail::Table(t) => std::iter::once(Rational::zero())
            .chain(t.iter().scan(Rational::zero(), |acc, x| {
                *acc += x;
                Some(acc.clone())
            }))
            .collect(),
        _ => Vec::new(),
    };
    let mut cut_levels = Vec::with_capacity(n_sum);
    let mut kcur = 0u64;
    for n in 1..=n_sum as u64 {
        kcur = kcur.max(n);
        loop {
            while summed < kcur {
                let (lo, hi) = stream.next()?;
                if tail_lo.len() <= kk {
                    tail_lo.push(lo);
                    tail_hi.push(hi);
                }
                prefix_lo += lo;
                prefix_hi += hi;
                summed += 1;
            }
            if cesaro_holds(tail, &exact_prefix, n, kcur, prefix_lo, prefix_hi) {
                break;
            }
            kcur += 1;
            if kcur > limit {
                return Err(Error::CesaroBound(format!(
                    "no cut level up to {limit} satisfies the Cesàro bound for n = {n}"
                )));
            }
        }
        cut_levels.push(kcur);
    }
    while tail_lo.len() <= kk {
        let (lo, hi) = stream.next()?;
        tail_lo.push(lo);
        tail_hi.push(hi);
    }

    // n_k: smallest n with K_n ≥ k
    let mut first_index = Vec::with_capacity(kk);
    let mut n = 0usize;
    for k in 1..=kk as u64 {
        while cut_levels[n] < k {
            n += 1;
        }
        first_index.push(n as u64 + 1);
    }

    // suffix sums of 1/(n K_n), kept for n ≤ K
    let truncation_bound = ONE.div_ceil(n_sum as u128);
    let mut suf_lo = vec![0u128; kk + 2];
    let mut suf_hi = vec![0u128; kk + 2];
    let (mut acc_lo, mut acc_hi) = (0u128, truncation_bound);
    for n in (1..=n_sum).rev() {
        let den = n as u128 * cut_levels[n - 1] as u128;
        acc_lo += ONE / den;
        acc_hi += ONE.div_ceil(den);
        if n <= kk + 1 {
            suf_lo[n] = acc_lo;
            suf_hi[n] = acc_hi;
        }
    }
    let g_lo: Vec<u128> = first_index.iter().map(|&n| suf_lo[n as usize]).collect();
    let g_hi: Vec<u128> = first_index.iter().map(|&n| suf_hi[n as usize]).collect();

    let sum_lo: BigInt = g_lo.iter().map(|g| BigInt::from(*g)).sum();
    let sum_g_lo = dyadic_to_rational(&sum_lo, FRAC_BITS);
    let harmonic_count = cut_levels.iter().take_while(|&&c| c <= kk as u64).count() as u64;
    let divergence_certified = sum_g_lo >= harmonic(harmonic_count);

    let weighted: BigInt = (0..kk)
        .map(|k| BigInt::from(g_hi[k]) * BigInt::from(tail_hi[k]))
        .sum();
    let weighted_sum_hi = dyadic_to_rational(&weighted, 2 * FRAC_BITS);
    let zeta2_lower = zeta2_lower_bound(config.zeta_terms);
    let weighted_bound_certified = weighted_sum_hi <= zeta2_lower;

    Ok(UtilityReport {
        config: config.clone(),
        cut_levels,
        first_index,
        g_lo,
        g_hi,
        tail_lo,
        tail_hi,
        truncation_bound,
        sum_g_lo,
        harmonic_count,
        divergence_certified,
        weighted_sum_hi,
        zeta2_lower,
        weighted_bound_certified,
    })
}

/// Decides `n · Σ_{k<K} F(k) ≤ K`. The enclosure settles most cases; the
/// rest are decided exactly for geometric and tabulated tails and
/// conservatively (as failing) for arbitrary functions.
fn cesaro_holds(tail: &Tail, exact_prefix: &[Rational], n: u64, k: u64, lo: u128, hi: u128) -> bool {
    let target = (k as u128) << FRAC_BITS;
    if (n as u128) * hi <= target {
        return true;
    }
    if (n as u128) * lo > target {
        return false;
    }
    let n_r = Rational::from_integer(BigInt::from(n));
    let k_r = Rational::from_integer(BigInt::from(k));
    match tail {
        Tail::Geometric { ratio } => {
            // Σ_{j<K} r^j = (1 − r^K)/(1 − r); holds iff n − K(1 − r) ≤ n·r^K
            let c = &n_r - &k_r * (Rational::one() - ratio);
            !c.is_positive() || num_traits::pow(ratio.clone(), k as usize) * n_r >= c
        }
        Tail::Table(_) => {
            let idx = (k as usize).min(exact_prefix.len() - 1);
            &exact_prefix[idx] * n_r <= k_r
        }
        Tail::Fn(_) => false,
    }
}

/// `U(x) = min_i (a_i x + b_i)` on `x ≥ 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiecewiseLinearConcave {
    pieces: Vec<(Rational, Rational)>,
}

impl PiecewiseLinearConcave {
    pub fn new(pieces: Vec<(Rational, Rational)>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::Tail("a utility needs at least one affine piece".into()));
        }
        Ok(PiecewiseLinearConcave { pieces })
    }

    pub fn identity() -> Self {
        PiecewiseLinearConcave {
            pieces: vec![(Rational::one(), Rational::zero())],
        }
    }

    /// `min(x, cap)`.
    pub fn capped(cap: Rational) -> Self {
        PiecewiseLinearConcave {
            pieces: vec![(Rational::one(), Rational::zero()), (Rational::zero(), cap)],
        }
    }

    /// `U(x) = ∫₀ˣ g` with `g = g_k` on `[k−1, k)`, flat after the last
    /// slope. Slopes must be nonincreasing and nonnegative.
    pub fn from_slopes(g: &[Rational]) -> Self {
        let mut pieces = Vec::with_capacity(g.len() + 1);
        let mut level = Rational::zero();
        for (k, gk) in g.iter().enumerate() {
            let x0 = Rational::from_integer(BigInt::from(k));
            pieces.push((gk.clone(), &level - gk * &x0));
            level += gk;
        }
        pieces.push((Rational::zero(), level));
        PiecewiseLinearConcave { pieces }
    }

    pub fn pieces(&self) -> &[(Rational, Rational)] {
        &self.pieces
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.pieces
            .iter()
            .map(|(a, b)| a * x + b)
            .min()
            .expect("at least one piece")
    }
}

/// `sup E[U(X)]` over 1-admissible terminal wealths, `+∞` when unbounded.
pub fn finite_utility_check(problem: &WealthProblem, u: &PiecewiseLinearConcave) -> Result<Extended> {
    let forms = problem.gain_forms();
    let nh = problem.num_holdings();
    let leaves = problem.tree.leaves();
    let nv = nh + leaves.len();
    let mut lp = LinearProgram::new(nv);
    for j in 0..nv {
        lp.set_free(j);
    }
    for (i, l) in leaves.enumerate() {
        let uj = nh + i;
        lp.set_objective(uj, problem.p.leaf_mass(i).clone());
        for (a, b) in u.pieces() {
            // u ≤ a·(1 + G) + b
            let mut row = vec![(uj, Rational::one())];
            row.extend(forms[l].iter().map(|(j, c)| (*j, -(a * c))));
            lp.add_constraint(row, Relation::Le, a + b);
        }
    }
    for f in forms.iter().skip(1) {
        if !f.is_empty() {
            lp.add_constraint(f.clone(), Relation::Ge, -Rational::one());
        }
    }
    match lp.maximize() {
        LpOutcome::Optimal { value, .. } => Ok(Extended::Finite(value)),
        LpOutcome::Unbounded { .. } => Ok(Extended::Infinite),
        LpOutcome::Infeasible { .. } => Err(Error::Internal("H = 0 with u = U(X) is always feasible".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filtered_space::{AdaptedProcess, EventTree, ProbMeasure};
    use crate::rational::{int, rat};

    fn small() -> UtilityConfig {
        UtilityConfig {
            k: 50,
            n_sum: 2_000,
            probe_factor: 64,
            zeta_terms: 200,
        }
    }

    #[test]
    fn geometric_cut_levels() {
        let r = build_utility(&Tail::geometric(rat(1, 2)), &small()).unwrap();
        assert_eq!(r.cut_levels[0], 1);
        for n in 2..=200 {
            assert_eq!(r.cut_levels[n - 1], 2 * n as u64, "n = {n}");
        }
        assert!(r.divergence_certified && r.weighted_bound_certified);
        assert!(r.g_lo.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn vanishing_tail() {
        let r = build_utility(&Tail::Table(vec![int(1)]), &small()).unwrap();
        for n in 1..=100 {
            assert_eq!(r.cut_levels[n - 1], n as u64);
        }
        assert_eq!(&r.first_index[..5], &[1, 2, 3, 4, 5]);
    }

    #[test]
    fn stuck_tail_cannot_be_certified() {
        let cfg = UtilityConfig { probe_factor: 2, ..small() };
        let e = build_utility(&Tail::Fn(Arc::new(|_| rat(1, 2))), &cfg).unwrap_err();
        assert!(matches!(e, Error::CesaroBound(_)));
        let e = build_utility(&Tail::Table(vec![rat(1, 2), int(1)]), &cfg).unwrap_err();
        assert!(matches!(e, Error::Tail(_)));
    }

    #[test]
    fn utility_shapes() {
        let u = PiecewiseLinearConcave::from_slopes(&[int(2), int(1)]);
        assert_eq!(u.eval(&int(0)), int(0));
        assert_eq!(u.eval(&rat(1, 2)), int(1));
        assert_eq!(u.eval(&rat(3, 2)), rat(5, 2));
        assert_eq!(u.eval(&int(7)), int(3));
    }

    #[test]
    fn expected_utility_examples() {
        let t = EventTree::uniform(1, 2, 1).unwrap();
        let p = ProbMeasure::uniform_branching(&t);
        let s = AdaptedProcess::from_scalars(&t, vec![int(1), int(2), rat(1, 2)]).unwrap();
        let wp = WealthProblem::new(&t, &p, &s).unwrap();
        assert_eq!(
            finite_utility_check(&wp, &PiecewiseLinearConcave::identity()).unwrap(),
            Extended::Finite(rat(3, 2))
        );
        let capped = finite_utility_check(&wp, &PiecewiseLinearConcave::capped(int(1))).unwrap();
        assert!(capped.finite().unwrap() <= &int(1));

        let flat = AdaptedProcess::constant(&t, int(3));
        let wp = WealthProblem::new(&t, &p, &flat).unwrap();
        let u = PiecewiseLinearConcave::from_slopes(&[rat(3, 4), rat(1, 4)]);
        assert_eq!(finite_utility_check(&wp, &u).unwrap(), Extended::Finite(rat(3, 4)));
    }

    #[test]
    fn linear_utility_is_unbounded_without_na1() {
        let t = EventTree::from_child_counts(1, 1, &[1]).unwrap();
        let p = ProbMeasure::uniform_branching(&t);
        let s = AdaptedProcess::from_scalars(&t, vec![int(1), int(2)]).unwrap();
        let wp = WealthProblem::new(&t, &p, &s).unwrap();
        assert_eq!(
            finite_utility_check(&wp, &PiecewiseLinearConcave::identity()).unwrap(),
            Extended::Infinite
        );
    }
}
