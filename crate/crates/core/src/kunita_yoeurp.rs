//! The dominating measure on `Ω × {1..n, ∞}` built from a supermartingale
//! density, and exact checks of the Kunita-Yoeurp relations.
//!
//! With the discrete Doob decomposition `Z = Z_0 + M − A`,
//! `Q(ω, k) = P(ω)·ΔA_k(ω)` and `Q(ω, ∞) = P(ω)·Z_n(ω)`. Telescoping gives
//! `Q(a × {ζ > t}) = P(a)·Z_t(a)` for every atom `a` of `F_t`.

use num_traits::{One, Signed, Zero};

use crate::arbitrage::WealthProblem;
use crate::deflator::{verify_deflation, DeflationReport};
use crate::error::{Error, Result};
use crate::filtered_space::{doob_decomposition, AdaptedProcess, EventTree, ProbMeasure, StoppingTime, Strategy};
use crate::rational::{self, Rational};

/// Death index of a point of the enlarged space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Death {
    At(usize),
    Never,
}

impl Death {
    /// `ζ > t`.
    pub fn after(self, t: usize) -> bool {
        match self {
            Death::At(k) => k > t,
            Death::Never => true,
        }
    }
}

/// An atom of `F̄_t`: an atom of `F_t` either still alive or dead at `j ≤ t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnlargedAtom {
    pub node: usize,
    pub dead_at: Option<usize>,
}

/// `Ω × {1..n, ∞}` over a base tree.
#[derive(Clone, Debug)]
pub struct EnlargedSpace {
    pub horizon: usize,
    pub num_leaves: usize,
}

impl EnlargedSpace {
    pub fn new(tree: &EventTree) -> Self {
        EnlargedSpace {
            horizon: tree.horizon(),
            num_leaves: tree.num_leaves(),
        }
    }

    pub fn deaths(&self) -> impl Iterator<Item = Death> + '_ {
        (1..=self.horizon).map(Death::At).chain(std::iter::once(Death::Never))
    }

    pub fn slot(&self, leaf_index: usize, death: Death) -> usize {
        let s = match death {
            Death::At(k) => {
                debug_assert!((1..=self.horizon).contains(&k));
                k - 1
            }
            Death::Never => self.horizon,
        };
        leaf_index * (self.horizon + 1) + s
    }

    pub fn num_points(&self) -> usize {
        self.num_leaves * (self.horizon + 1)
    }

    /// Atoms of `F̄_t`.
    pub fn atoms(&self, tree: &EventTree, t: usize) -> Vec<EnlargedAtom> {
        let mut out = Vec::new();
        for node in tree.layer(t) {
            out.push(EnlargedAtom { node, dead_at: None });
            for j in 1..=t {
                out.push(EnlargedAtom { node, dead_at: Some(j) });
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct DominatingMeasure {
    pub space: EnlargedSpace,
    /// Point masses indexed by [`EnlargedSpace::slot`].
    pub q: Vec<Rational>,
    pub p: ProbMeasure,
    /// The generating density, normalized to `E[Z_0] = 1`.
    pub z: AdaptedProcess,
    pub increments: Strategy,
}

impl DominatingMeasure {
    pub fn mass(&self, leaf_index: usize, death: Death) -> &Rational {
        &self.q[self.space.slot(leaf_index, death)]
    }

    pub fn mass_mut(&mut self, leaf_index: usize, death: Death) -> &mut Rational {
        let s = self.space.slot(leaf_index, death);
        &mut self.q[s]
    }

    pub fn total(&self) -> Rational {
        self.q.iter().sum()
    }

    /// `Q(atom)` for an atom of `F̄_t`.
    pub fn q_mass(&self, tree: &EventTree, t: usize, atom: EnlargedAtom) -> Rational {
        tree.leaf_span(atom.node)
            .map(|i| match atom.dead_at {
                Some(j) => self.mass(i, Death::At(j)).clone(),
                None => self.space.deaths().filter(|d| d.after(t)).map(|d| self.mass(i, d)).sum(),
            })
            .sum()
    }

    /// `P̄(atom)`, where `P̄ = P ⊗ δ_∞`.
    pub fn pbar_mass(&self, tree: &EventTree, atom: EnlargedAtom) -> Rational {
        match atom.dead_at {
            Some(_) => Rational::zero(),
            None => self.p.node_mass(tree, atom.node),
        }
    }

    /// `γ_t = dP̄/dQ` on an atom of `F̄_t`; undefined where `Q` vanishes.
    pub fn gamma(&self, tree: &EventTree, t: usize, atom: EnlargedAtom) -> Option<Rational> {
        let q = self.q_mass(tree, t, atom);
        if q.is_zero() {
            None
        } else {
            Some(self.pbar_mass(tree, atom) / q)
        }
    }

    /// `Q(T ≤ t)`.
    pub fn death_probability(&self, t: usize) -> Rational {
        (0..self.space.num_leaves)
            .flat_map(|i| (1..=t).map(move |k| (i, k)))
            .map(|(i, k)| self.mass(i, Death::At(k)))
            .sum()
    }

    /// Stand-in for foretellability of `T`: the density has no compensator.
    pub fn compensator_vanishes(&self) -> bool {
        self.increments.values().iter().all(Zero::is_zero)
    }
}

pub fn build_dominating_measure(tree: &EventTree, p: &ProbMeasure, z: &AdaptedProcess) -> Result<DominatingMeasure> {
    if !z.at(tree.root()).is_one() {
        return Err(Error::NotNormalized {
            found: rational::format(z.at(tree.root())),
        });
    }
    if let Some(v) = (0..tree.num_nodes()).find(|&v| z.at(v).is_negative()) {
        return Err(Error::NonPositiveDensity {
            node: v,
            value: rational::format(z.at(v)),
        });
    }
    let doob = doob_decomposition(tree, p, z)?;
    if let Some(v) = tree.internal_nodes().find(|&v| doob.increments.at(v)[0].is_negative()) {
        return Err(Error::NotSupermartingale {
            node: v,
            increment: rational::format(&doob.increments.at(v)[0]),
        });
    }
    let space = EnlargedSpace::new(tree);
    let n = tree.horizon();
    let mut q = vec![Rational::zero(); space.num_points()];
    for (i, leaf) in tree.leaves().enumerate() {
        let pw = p.leaf_mass(i);
        for k in 1..=n {
            let a = tree.ancestor_at(leaf, k - 1);
            q[space.slot(i, Death::At(k))] = pw * &doob.increments.at(a)[0];
        }
        q[space.slot(i, Death::Never)] = pw * z.at(leaf);
    }
    let dm = DominatingMeasure {
        space,
        q,
        p: p.clone(),
        z: z.clone(),
        increments: doob.increments,
    };
    if !dm.total().is_one() {
        return Err(Error::Internal(format!(
            "dominating measure has total mass {}",
            rational::format(&dm.total())
        )));
    }
    Ok(dm)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KyFailure {
    /// 1, 2 or 3 for the defining properties; 4 for the stopping-time form.
    pub property: u8,
    pub t: usize,
    pub atom: usize,
    pub lhs: Rational,
    pub rhs: Rational,
}

#[derive(Clone, Debug)]
pub struct KyReport {
    pub total_mass_one: bool,
    pub property1: bool,
    pub property2: bool,
    pub property3: bool,
    pub stopping_identity: bool,
    pub stopping_times_checked: usize,
    pub failures: Vec<KyFailure>,
}

impl KyReport {
    pub fn passed(&self) -> bool {
        self.total_mass_one && self.property1 && self.property2 && self.property3 && self.stopping_identity
    }
}

pub fn verify_ky(tree: &EventTree, dm: &DominatingMeasure, stopping_times: &[StoppingTime]) -> KyReport {
    let mut failures = Vec::new();
    let total_mass_one = dm.total().is_one();

    // (1) P̄(T = ∞) = 1
    let pbar_inf: Rational = dm.p.leaf_masses().iter().sum();
    let property1 = pbar_inf.is_one();
    if !property1 {
        failures.push(KyFailure {
            property: 1,
            t: tree.horizon(),
            atom: tree.root(),
            lhs: pbar_inf,
            rhs: Rational::one(),
        });
    }

    // (2) Ω × {ζ ≤ t} carries Q(· ∩ {T ≤ t}) and no P̄-mass
    let mut property2 = true;
    for t in 1..=tree.horizon() {
        for atom in dm.space.atoms(tree, t) {
            if atom.dead_at.is_some() {
                let pb = dm.pbar_mass(tree, atom);
                if !pb.is_zero() {
                    property2 = false;
                    failures.push(KyFailure {
                        property: 2,
                        t,
                        atom: atom.node,
                        lhs: pb,
                        rhs: Rational::zero(),
                    });
                }
            }
        }
        let dead_q: Rational = (0..dm.space.num_leaves)
            .flat_map(|i| (1..=t).map(move |k| (i, k)))
            .map(|(i, k)| dm.mass(i, Death::At(k)))
            .sum();
        if dead_q != dm.death_probability(t) {
            property2 = false;
        }
    }

    // (3) Q(a × {ζ > t}) = P(a) Z_t(a)
    let masses = dm.p.node_masses(tree);
    let mut property3 = true;
    for t in 0..=tree.horizon() {
        for a in tree.layer(t) {
            let lhs = dm.q_mass(tree, t, EnlargedAtom { node: a, dead_at: None });
            let rhs = &masses[a] * dm.z.at(a);
            if lhs != rhs {
                property3 = false;
                failures.push(KyFailure {
                    property: 3,
                    t,
                    atom: a,
                    lhs,
                    rhs,
                });
            }
        }
    }

    // Q(A ∩ {T > τ}) = E_P[1_{A ∩ {τ < ∞}} Z_τ] on every atom of F_τ
    let mut stopping_identity = true;
    for tau in stopping_times {
        for &s in tau.stop_nodes() {
            let t = tree.time(s);
            let lhs = dm.q_mass(tree, t, EnlargedAtom { node: s, dead_at: None });
            let rhs = &masses[s] * dm.z.at(s);
            if lhs != rhs {
                stopping_identity = false;
                failures.push(KyFailure {
                    property: 4,
                    t,
                    atom: s,
                    lhs,
                    rhs,
                });
            }
        }
    }

    KyReport {
        total_mass_one,
        property1,
        property2,
        property3,
        stopping_identity,
        stopping_times_checked: stopping_times.len(),
        failures,
    }
}

#[derive(Clone, Debug)]
pub struct DominationReport {
    /// `Z_n > 0` on every leaf; required for domination.
    pub applicable: bool,
    pub holds: bool,
    /// Points with `Q = 0` but `P̄ > 0`.
    pub offending: Vec<(usize, Death)>,
}

/// Exhaustive check over the atoms of `F̄_n` that `Q`-null implies `P̄`-null.
pub fn check_domination(tree: &EventTree, dm: &DominatingMeasure) -> DominationReport {
    let applicable = tree.leaves().all(|l| dm.z.at(l).is_positive());
    let mut offending = Vec::new();
    for i in 0..dm.space.num_leaves {
        for d in dm.space.deaths() {
            let pbar = if d == Death::Never {
                dm.p.leaf_mass(i).clone()
            } else {
                Rational::zero()
            };
            if dm.mass(i, d).is_zero() && pbar.is_positive() {
                offending.push((i, d));
            }
        }
    }
    DominationReport {
        applicable,
        holds: offending.is_empty(),
        offending,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct YoeurpValues {
    pub q_side: Rational,
    pub p_side: Rational,
}

/// `E_Q[Y_{T∧n}] = E_P[Y_n Z_n + Σ_k Y_k ΔA_k]` for predictable `Y`.
pub fn yoeurp_expectation(tree: &EventTree, dm: &DominatingMeasure, y: &Strategy) -> Result<YoeurpValues> {
    if y.dim() != 1 {
        return Err(Error::Shape("Yoeurp's formula expects a scalar integrand".into()));
    }
    let n = tree.horizon();
    let step = |leaf: usize, k: usize| &y.at(tree.ancestor_at(leaf, k - 1))[0];
    evaluate(tree, dm, |leaf, k| step(leaf, k).clone(), |leaf| step(leaf, n).clone())
}

/// Left-limit form: `E_Q[Y^{T−}_n] = E_P[Y_n Z_n + Σ_k Y_{k−1} ΔA_k]` for
/// adapted `Y`.
pub fn yoeurp_expectation_adapted(tree: &EventTree, dm: &DominatingMeasure, y: &AdaptedProcess) -> Result<YoeurpValues> {
    if y.dim() != 1 {
        return Err(Error::Shape("Yoeurp's formula expects a scalar process".into()));
    }
    evaluate(
        tree,
        dm,
        |leaf, k| y.at(tree.ancestor_at(leaf, k - 1)).clone(),
        |leaf| y.at(leaf).clone(),
    )
}

/// `at_death(leaf, k)` is the integrand charged by `ΔA_k`; `alive(leaf)` the
/// terminal value charged by `Z_n`.
fn evaluate(
    tree: &EventTree,
    dm: &DominatingMeasure,
    at_death: impl Fn(usize, usize) -> Rational,
    alive: impl Fn(usize) -> Rational,
) -> Result<YoeurpValues> {
    let n = tree.horizon();
    let mut q_side = Rational::zero();
    for (i, leaf) in tree.leaves().enumerate() {
        for k in 1..=n {
            let m = dm.mass(i, Death::At(k));
            if !m.is_zero() {
                q_side += m * at_death(leaf, k);
            }
        }
        q_side += dm.mass(i, Death::Never) * alive(leaf);
    }
    // the P side recomputes the compensator rather than reading it from Q
    let doob = doob_decomposition(tree, &dm.p, &dm.z)?;
    let mut p_side = Rational::zero();
    for (i, leaf) in tree.leaves().enumerate() {
        let mut path = alive(leaf) * dm.z.at(leaf);
        for k in 1..=n {
            let da = &doob.increments.at(tree.ancestor_at(leaf, k - 1))[0];
            if !da.is_zero() {
                path += at_death(leaf, k) * da;
            }
        }
        p_side += dm.p.leaf_mass(i) * path;
    }
    if q_side != p_side {
        return Err(Error::Internal(format!(
            "Yoeurp sides differ: Q-side {}, P-side {}",
            rational::format(&q_side),
            rational::format(&p_side)
        )));
    }
    Ok(YoeurpValues { q_side, p_side })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DriftViolation {
    /// The step runs from time `step` to `step + 1`.
    pub step: usize,
    pub node: usize,
    pub drift: Vec<Rational>,
}

#[derive(Clone, Debug)]
pub struct StoppedPriceReport {
    pub martingale: bool,
    pub atoms_checked: usize,
    pub violations: Vec<DriftViolation>,
    /// Whether `Z̃_k = 1{k < T}/γ_k` is a supermartingale density for `S`.
    pub converse_density: bool,
    pub converse: Option<DeflationReport>,
}

/// Tests whether `S^{T−}` is a `Q`-martingale, atom by atom.
pub fn check_stopped_price(tree: &EventTree, dm: &DominatingMeasure, s: &AdaptedProcess) -> Result<StoppedPriceReport> {
    if s.num_nodes() != tree.num_nodes() {
        return Err(Error::Shape("price process does not match the tree".into()));
    }
    let d = s.dim();
    let mut violations = Vec::new();
    let mut atoms_checked = 0;
    for k in 0..tree.horizon() {
        for u in tree.layer(k) {
            // dead atoms are frozen, so only the alive atom can drift
            atoms_checked += 1 + k;
            let qu = dm.q_mass(tree, k, EnlargedAtom { node: u, dead_at: None });
            if qu.is_zero() {
                continue;
            }
            let mut drift = vec![Rational::zero(); d];
            for c in tree.children(u) {
                let qc = dm.q_mass(tree, k + 1, EnlargedAtom { node: c, dead_at: None });
                if qc.is_zero() {
                    continue;
                }
                for (i, x) in s.increment(tree, c).into_iter().enumerate() {
                    drift[i] += &qc * x;
                }
            }
            for x in drift.iter_mut() {
                *x /= &qu;
            }
            if drift.iter().any(|x| !x.is_zero()) {
                violations.push(DriftViolation { step: k, node: u, drift });
            }
        }
    }

    // on P̄-almost every point T = ∞, so Z̃ is Q(alive)/P per atom
    let masses = dm.p.node_masses(tree);
    let z_tilde = AdaptedProcess::from_fn(tree, |v| {
        let t = tree.time(v);
        dm.q_mass(tree, t, EnlargedAtom { node: v, dead_at: None }) / &masses[v]
    });
    let converse = if d == tree.asset_dim() {
        let wp = WealthProblem::new(tree, &dm.p, s)?;
        Some(verify_deflation(&wp, &z_tilde, 0, 0)?)
    } else {
        None
    };
    Ok(StoppedPriceReport {
        martingale: violations.is_empty(),
        atoms_checked,
        violations,
        converse_density: converse.as_ref().is_some_and(|r| r.certificate_passed),
        converse,
    })
}
