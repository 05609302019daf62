//! Dense two-phase simplex over exact rationals with Bland's rule.
//!
//! Problems here are desk-scale (a few hundred rows at most), so a dense
//! tableau is adequate. Outcomes carry certificates: the optimal point, an
//! improving ray when unbounded, or Farkas multipliers when infeasible.

use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: Vec<(usize, Rational)>,
    pub relation: Relation,
    pub rhs: Rational,
}

/// `maximize c·x` subject to linear constraints; variables are nonnegative
/// unless marked free.
#[derive(Clone, Debug)]
pub struct LinearProgram {
    objective: Vec<Rational>,
    free: Vec<bool>,
    constraints: Vec<Constraint>,
}

#[derive(Clone, Debug)]
pub enum LpOutcome {
    Optimal {
        x: Vec<Rational>,
        value: Rational,
    },
    /// `x` is feasible, `ray` keeps every constraint satisfied along
    /// `x + t·ray` for `t ≥ 0` and strictly improves the objective.
    Unbounded {
        x: Vec<Rational>,
        ray: Vec<Rational>,
    },
    /// Multipliers `y` (one per constraint, `≥ 0` on `≤` rows, `≤ 0` on `≥`
    /// rows) with `yᵀA ≥ 0` on nonnegative columns, `= 0` on free columns,
    /// and `yᵀb < 0`.
    Infeasible { farkas: Vec<Rational> },
}

impl LpOutcome {
    pub fn value(&self) -> Option<&Rational> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            objective: vec![Rational::zero(); num_vars],
            free: vec![false; num_vars],
            constraints: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn set_objective(&mut self, var: usize, coeff: Rational) {
        self.objective[var] = coeff;
    }

    pub fn set_free(&mut self, var: usize) {
        self.free[var] = true;
    }

    pub fn is_free(&self, var: usize) -> bool {
        self.free[var]
    }

    pub fn add_constraint(&mut self, coeffs: Vec<(usize, Rational)>, relation: Relation, rhs: Rational) {
        debug_assert!(coeffs.iter().all(|(j, _)| *j < self.num_vars()));
        self.constraints.push(Constraint {
            coeffs: coeffs.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
            relation,
            rhs,
        });
    }

    pub fn objective_at(&self, x: &[Rational]) -> Rational {
        crate::rational::dot(&self.objective, x)
    }

    /// True when `x` satisfies every constraint and sign restriction.
    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        if x.len() != self.num_vars() {
            return false;
        }
        if x.iter().zip(&self.free).any(|(v, f)| !f && v.is_negative()) {
            return false;
        }
        self.constraints.iter().all(|c| {
            let lhs = c.coeffs.iter().fold(Rational::zero(), |acc, (j, a)| acc + a * &x[*j]);
            match c.relation {
                Relation::Le => lhs <= c.rhs,
                Relation::Ge => lhs >= c.rhs,
                Relation::Eq => lhs == c.rhs,
            }
        })
    }

    /// Checks a recession direction: every constraint row stays satisfied
    /// along the ray and the objective strictly increases.
    pub fn is_improving_ray(&self, ray: &[Rational]) -> bool {
        if ray.len() != self.num_vars() {
            return false;
        }
        if ray.iter().zip(&self.free).any(|(v, f)| !f && v.is_negative()) {
            return false;
        }
        let rows_ok = self.constraints.iter().all(|c| {
            let lhs = c.coeffs.iter().fold(Rational::zero(), |acc, (j, a)| acc + a * &ray[*j]);
            match c.relation {
                Relation::Le => !lhs.is_positive(),
                Relation::Ge => !lhs.is_negative(),
                Relation::Eq => lhs.is_zero(),
            }
        });
        rows_ok && self.objective_at(ray).is_positive()
    }

    /// Independent check of an infeasibility certificate.
    pub fn verify_farkas(&self, y: &[Rational]) -> bool {
        if y.len() != self.constraints.len() {
            return false;
        }
        let signs_ok = self.constraints.iter().zip(y).all(|(c, yi)| match c.relation {
            Relation::Le => !yi.is_negative(),
            Relation::Ge => !yi.is_positive(),
            Relation::Eq => true,
        });
        if !signs_ok {
            return false;
        }
        let mut col = vec![Rational::zero(); self.num_vars()];
        let mut yb = Rational::zero();
        for (c, yi) in self.constraints.iter().zip(y) {
            if yi.is_zero() {
                continue;
            }
            for (j, a) in &c.coeffs {
                col[*j] += yi * a;
            }
            yb += yi * &c.rhs;
        }
        let cols_ok = col
            .iter()
            .zip(&self.free)
            .all(|(v, f)| if *f { v.is_zero() } else { !v.is_negative() });
        cols_ok && yb.is_negative()
    }

    pub fn maximize(&self) -> LpOutcome {
        Tableau::build(self).solve(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum ColumnKind {
    Plus(usize),
    Minus(usize),
    Slack,
    Artificial,
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    /// Reduced costs followed by the current objective value (negated
    /// convention: `obj[n] = -value`).
    obj: Vec<Rational>,
    basis: Vec<usize>,
    kinds: Vec<ColumnKind>,
    /// Column that formed the initial identity for each row, with its
    /// phase-one cost.
    initial: Vec<usize>,
    /// Whether each original row was negated during normalization.
    row_sign: Vec<bool>,
    /// Original row index of each tableau row (rows may be dropped).
    origin: Vec<usize>,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Tableau {
        let mut kinds = Vec::new();
        let mut var_col = Vec::with_capacity(lp.num_vars());
        for j in 0..lp.num_vars() {
            var_col.push(kinds.len());
            kinds.push(ColumnKind::Plus(j));
            if lp.free[j] {
                kinds.push(ColumnKind::Minus(j));
            }
        }
        let structural = kinds.len();
        let m = lp.constraints.len();

        // normalized relations after making rhs >= 0
        let mut rels = Vec::with_capacity(m);
        let mut row_sign = Vec::with_capacity(m);
        for c in &lp.constraints {
            // a `≥ 0` row flips to `≤ 0` so its slack can start in the basis
            let flip = c.rhs.is_negative() || (c.rhs.is_zero() && c.relation == Relation::Ge);
            row_sign.push(flip);
            rels.push(match (c.relation, flip) {
                (Relation::Le, false) | (Relation::Ge, true) => Relation::Le,
                (Relation::Ge, false) | (Relation::Le, true) => Relation::Ge,
                (Relation::Eq, _) => Relation::Eq,
            });
        }
        let mut slack_col = vec![None; m];
        for (i, r) in rels.iter().enumerate() {
            if *r != Relation::Eq {
                slack_col[i] = Some(kinds.len());
                kinds.push(ColumnKind::Slack);
            }
        }
        let mut art_col = vec![None; m];
        for (i, r) in rels.iter().enumerate() {
            if *r != Relation::Le {
                art_col[i] = Some(kinds.len());
                kinds.push(ColumnKind::Artificial);
            }
        }
        let n = kinds.len();
        let mut rows = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let mut initial = Vec::with_capacity(m);
        for (i, c) in lp.constraints.iter().enumerate() {
            let sign = if row_sign[i] { -Rational::one() } else { Rational::one() };
            let mut row = vec![Rational::zero(); n + 1];
            for (j, a) in &c.coeffs {
                let a = a * &sign;
                row[var_col[*j]] += &a;
                if lp.free[*j] {
                    row[var_col[*j] + 1] -= &a;
                }
            }
            if let Some(s) = slack_col[i] {
                row[s] = if rels[i] == Relation::Le { Rational::one() } else { -Rational::one() };
            }
            if let Some(a) = art_col[i] {
                row[a] = Rational::one();
                basis.push(a);
                initial.push(a);
            } else {
                let s = slack_col[i].expect("le row has a slack");
                basis.push(s);
                initial.push(s);
            }
            row[n] = &c.rhs * &sign;
            rows.push(row);
        }
        debug_assert!(structural <= n);
        Tableau {
            rows,
            obj: vec![Rational::zero(); n + 1],
            basis,
            kinds,
            initial,
            row_sign,
            origin: (0..m).collect(),
        }
    }

    fn ncols(&self) -> usize {
        self.kinds.len()
    }

    /// Loads reduced costs `c_j - c_B B⁻¹ A_j` for a cost vector over columns.
    fn load_objective(&mut self, costs: &[Rational]) {
        let n = self.ncols();
        let mut obj: Vec<Rational> = costs.to_vec();
        obj.push(Rational::zero());
        for (i, row) in self.rows.iter().enumerate() {
            let cb = &costs[self.basis[i]];
            if cb.is_zero() {
                continue;
            }
            for j in 0..=n {
                if !row[j].is_zero() {
                    obj[j] -= cb * &row[j];
                }
            }
        }
        self.obj = obj;
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let n = self.ncols();
        let inv = Rational::one() / &self.rows[r][c];
        {
            let row = &mut self.rows[r];
            for v in row.iter_mut() {
                if !v.is_zero() {
                    *v *= &inv;
                }
            }
        }
        let pivot_row = self.rows[r].clone();
        let nz: Vec<usize> = (0..=n).filter(|&j| !pivot_row[j].is_zero()).collect();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for &j in &nz {
                let d = &f * &pivot_row[j];
                row[j] -= d;
            }
        }
        if !self.obj[c].is_zero() {
            let f = self.obj[c].clone();
            for &j in &nz {
                let d = &f * &pivot_row[j];
                self.obj[j] -= d;
            }
        }
        self.basis[r] = c;
    }

    /// Runs simplex iterations. Returns the unbounded entering column, if any.
    fn iterate(&mut self, allow_artificial: bool) -> Option<usize> {
        let n = self.ncols();
        loop {
            // Bland: lowest-index improving column
            let c = (0..n).find(|&j| {
                (allow_artificial || self.kinds[j] != ColumnKind::Artificial) && self.obj[j].is_positive()
            })?;
            let mut best: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[c].is_positive() {
                    continue;
                }
                let ratio = &row[n] / &row[c];
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                None => return Some(c),
                Some((r, _)) => self.pivot(r, c),
            }
        }
    }

    fn column_values(&self) -> Vec<Rational> {
        let n = self.ncols();
        let mut vals = vec![Rational::zero(); n];
        for (i, &b) in self.basis.iter().enumerate() {
            vals[b] = self.rows[i][n].clone();
        }
        vals
    }

    fn to_original(&self, cols: &[Rational], num_vars: usize) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); num_vars];
        for (j, kind) in self.kinds.iter().enumerate() {
            match kind {
                ColumnKind::Plus(v) => x[*v] += &cols[j],
                ColumnKind::Minus(v) => x[*v] -= &cols[j],
                _ => {}
            }
        }
        x
    }

    fn solve(mut self, lp: &LinearProgram) -> LpOutcome {
        let n = self.ncols();
        let has_artificial = self.kinds.contains(&ColumnKind::Artificial);
        if has_artificial {
            let costs: Vec<Rational> = self
                .kinds
                .iter()
                .map(|k| if *k == ColumnKind::Artificial { -Rational::one() } else { Rational::zero() })
                .collect();
            self.load_objective(&costs);
            let unbounded = self.iterate(false);
            debug_assert!(unbounded.is_none(), "phase one is bounded");
            // obj[n] holds -value
            let value = -self.obj[n].clone();
            if value.is_negative() {
                // multipliers pi_i = c_e - r_e for the initial identity column
                let m0 = lp.constraints.len();
                let mut farkas = vec![Rational::zero(); m0];
                for (i, &col) in self.initial.iter().enumerate() {
                    let pi = &costs[col] - &self.obj[col];
                    let orig = self.origin[i];
                    farkas[orig] = if self.row_sign[orig] { -pi } else { pi };
                }
                return LpOutcome::Infeasible { farkas };
            }
            self.drive_out_artificials();
        }

        let mut costs = vec![Rational::zero(); n];
        for (j, kind) in self.kinds.iter().enumerate() {
            match kind {
                ColumnKind::Plus(v) => costs[j] = lp.objective[*v].clone(),
                ColumnKind::Minus(v) => costs[j] = -lp.objective[*v].clone(),
                _ => {}
            }
        }
        self.load_objective(&costs);
        let unbounded = self.iterate(false);
        let cols = self.column_values();
        let x = self.to_original(&cols, lp.num_vars());
        match unbounded {
            None => {
                let value = lp.objective_at(&x);
                LpOutcome::Optimal { x, value }
            }
            Some(c) => {
                let mut dir = vec![Rational::zero(); n];
                dir[c] = Rational::one();
                for (i, &b) in self.basis.iter().enumerate() {
                    dir[b] = -self.rows[i][c].clone();
                }
                let ray = self.to_original(&dir, lp.num_vars());
                LpOutcome::Unbounded { x, ray }
            }
        }
    }

    fn drive_out_artificials(&mut self) {
        let n = self.ncols();
        let mut i = 0;
        while i < self.rows.len() {
            if self.kinds[self.basis[i]] != ColumnKind::Artificial {
                i += 1;
                continue;
            }
            let col = (0..n).find(|&j| self.kinds[j] != ColumnKind::Artificial && !self.rows[i][j].is_zero());
            match col {
                Some(c) => {
                    self.pivot(i, c);
                    i += 1;
                }
                None => {
                    // redundant row
                    self.rows.remove(i);
                    self.basis.remove(i);
                    self.initial.remove(i);
                    self.origin.remove(i);
                }
            }
        }
    }
}

/// Result of an exact dense linear solve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LinearSolution {
    /// A particular solution (free variables set to zero) and whether it is
    /// the only one.
    Consistent { x: Vec<Rational>, unique: bool },
    Inconsistent,
}

/// Solves `A x = b` by Gauss-Jordan elimination over the rationals.
pub fn solve_exact(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> LinearSolution {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        b.swap(r, p);
        let inv = Rational::one() / &a[r][c];
        for v in a[r].iter_mut() {
            *v *= &inv;
        }
        b[r] *= &inv;
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..cols {
                    let d = &f * &a[r][j];
                    a[i][j] -= d;
                }
                let d = &f * &b[r];
                b[i] -= d;
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    if b[r..].iter().any(|v| !v.is_zero()) {
        return LinearSolution::Inconsistent;
    }
    let mut x = vec![Rational::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = b[i].clone();
    }
    LinearSolution::Consistent {
        x,
        unique: pivots.len() == cols,
    }
}
