//! Small exact linear programs: two-phase dense simplex with Bland's rule.

use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

/// `Σ coeffs[k].1 * x[coeffs[k].0]  rel  rhs`.
#[derive(Clone, Debug)]
pub struct Constraint<S> {
    pub coeffs: Vec<(usize, S)>,
    pub rel: Relation,
    pub rhs: S,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome<S> {
    Optimal { value: S, x: Vec<S> },
    Infeasible,
    Unbounded,
}

impl<S> LpOutcome<S> {
    pub fn optimal(self) -> Option<(S, Vec<S>)> {
        match self {
            LpOutcome::Optimal { value, x } => Some((value, x)),
            _ => None,
        }
    }
}

struct Tableau<S> {
    /// `rows[r]` has `cols + 1` entries; the last is the right-hand side.
    rows: Vec<Vec<S>>,
    basis: Vec<usize>,
    cols: usize,
}

impl<S: Scalar> Tableau<S> {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for x in self.rows[r].iter_mut() {
            *x = x.clone() / p.clone();
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x = x.clone() - f.clone() * y.clone();
                }
            }
        }
        self.basis[r] = c;
    }

    /// Reduced costs of `cost` (length `cols`) for the current basis.
    fn reduced(&self, cost: &[S]) -> Vec<S> {
        let mut red = cost.to_vec();
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = cost[b].clone();
            if cb.is_zero() {
                continue;
            }
            for (j, x) in self.rows[r][..self.cols].iter().enumerate() {
                if !x.is_zero() {
                    red[j] = red[j].clone() - cb.clone() * x.clone();
                }
            }
        }
        red
    }

    /// Minimises `cost · x` over columns allowed by `allowed`. Returns false
    /// when unbounded.
    fn minimise(&mut self, cost: &[S], allowed: &dyn Fn(usize) -> bool) -> bool {
        loop {
            let red = self.reduced(cost);
            let Some(c) = (0..self.cols).find(|&j| allowed(j) && red[j].is_negative()) else {
                return true;
            };
            let mut best: Option<(usize, S)> = None;
            for r in 0..self.rows.len() {
                let a = &self.rows[r][c];
                if a.is_positive() {
                    let ratio = self.rows[r][self.cols].clone() / a.clone();
                    let better = match &best {
                        None => true,
                        Some((br, bv)) => ratio < *bv || (ratio == *bv && self.basis[r] < self.basis[*br]),
                    };
                    if better {
                        best = Some((r, ratio));
                    }
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, c),
                None => return false,
            }
        }
    }
}

/// Minimises `cost · x` subject to `constraints` and `x ≥ 0`.
pub fn minimize<S: Scalar>(num_vars: usize, cost: &[S], constraints: &[Constraint<S>]) -> LpOutcome<S> {
    assert_eq!(cost.len(), num_vars);
    let m = constraints.len();
    let slacks = constraints.iter().filter(|c| c.rel != Relation::Eq).count();
    let art0 = num_vars + slacks;
    let cols = art0 + m;
    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut next_slack = num_vars;
    for (i, con) in constraints.iter().enumerate() {
        let mut row = vec![S::zero(); cols + 1];
        for (j, a) in &con.coeffs {
            row[*j] = row[*j].clone() + a.clone();
        }
        match con.rel {
            Relation::Le => {
                row[next_slack] = S::one();
                next_slack += 1;
            }
            Relation::Ge => {
                row[next_slack] = -S::one();
                next_slack += 1;
            }
            Relation::Eq => {}
        }
        row[cols] = con.rhs.clone();
        if row[cols].is_negative() {
            for x in row.iter_mut() {
                *x = -x.clone();
            }
        }
        row[art0 + i] = S::one();
        rows.push(row);
        basis.push(art0 + i);
    }
    let mut t = Tableau { rows, basis, cols };

    let mut phase1 = vec![S::zero(); cols];
    for c in phase1.iter_mut().skip(art0) {
        *c = S::one();
    }
    t.minimise(&phase1, &|_| true);
    let infeasible = t
        .basis
        .iter()
        .enumerate()
        .any(|(r, &b)| b >= art0 && !t.rows[r][cols].is_zero());
    if infeasible {
        return LpOutcome::Infeasible;
    }
    // drive zero-level artificials out of the basis, dropping redundant rows
    let mut r = 0;
    while r < t.rows.len() {
        if t.basis[r] >= art0 {
            match (0..art0).find(|&j| !t.rows[r][j].is_zero()) {
                Some(c) => {
                    t.pivot(r, c);
                    r += 1;
                }
                None => {
                    t.rows.remove(r);
                    t.basis.remove(r);
                }
            }
        } else {
            r += 1;
        }
    }

    let mut phase2 = vec![S::zero(); cols];
    phase2[..num_vars].clone_from_slice(cost);
    if !t.minimise(&phase2, &|j| j < art0) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![S::zero(); num_vars];
    for (r, &b) in t.basis.iter().enumerate() {
        if b < num_vars {
            x[b] = t.rows[r][cols].clone();
        }
    }
    let value = x.iter().zip(cost).fold(S::zero(), |acc, (a, c)| acc + a.clone() * c.clone());
    LpOutcome::Optimal { value, x }
}

/// Maximises `gain · x`; the reported value is the maximum.
pub fn maximize<S: Scalar>(num_vars: usize, gain: &[S], constraints: &[Constraint<S>]) -> LpOutcome<S> {
    let neg: Vec<S> = gain.iter().map(|g| -g.clone()).collect();
    match minimize(num_vars, &neg, constraints) {
        LpOutcome::Optimal { value, x } => LpOutcome::Optimal { value: -value, x },
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational64 as Q;

    fn q(n: i64) -> Q {
        Q::from_integer(n)
    }

    #[test]
    fn textbook_maximum() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> 36 at (2, 6)
        let cons = vec![
            Constraint { coeffs: vec![(0, q(1))], rel: Relation::Le, rhs: q(4) },
            Constraint { coeffs: vec![(1, q(2))], rel: Relation::Le, rhs: q(12) },
            Constraint { coeffs: vec![(0, q(3)), (1, q(2))], rel: Relation::Le, rhs: q(18) },
        ];
        let (v, x) = maximize(2, &[q(3), q(5)], &cons).optimal().unwrap();
        assert_eq!(v, q(36));
        assert_eq!(x, vec![q(2), q(6)]);
    }

    #[test]
    fn equality_and_ge_constraints() {
        // min x + y, x + y = 1, x >= 1/3
        let cons = vec![
            Constraint { coeffs: vec![(0, q(1)), (1, q(1))], rel: Relation::Eq, rhs: q(1) },
            Constraint { coeffs: vec![(0, q(1))], rel: Relation::Ge, rhs: Q::new(1, 3) },
        ];
        let (v, x) = minimize(2, &[q(1), q(2)], &cons).optimal().unwrap();
        assert_eq!(v, q(1));
        assert_eq!(x, vec![q(1), q(0)]);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let cons = vec![
            Constraint { coeffs: vec![(0, q(1))], rel: Relation::Le, rhs: q(1) },
            Constraint { coeffs: vec![(0, q(1))], rel: Relation::Ge, rhs: q(2) },
        ];
        assert_eq!(minimize(1, &[q(1)], &cons), LpOutcome::Infeasible);
        assert_eq!(maximize::<Q>(1, &[q(1)], &[]), LpOutcome::Unbounded);
    }

    #[test]
    fn redundant_equalities() {
        let cons = vec![
            Constraint { coeffs: vec![(0, q(1)), (1, q(1))], rel: Relation::Eq, rhs: q(2) },
            Constraint { coeffs: vec![(0, q(2)), (1, q(2))], rel: Relation::Eq, rhs: q(4) },
        ];
        let (v, _) = minimize(2, &[q(1), q(-1)], &cons).optimal().unwrap();
        assert_eq!(v, q(-2));
    }

    #[test]
    fn triangle_fractional_matching() {
        let cons: Vec<Constraint<Q>> = [[0, 2], [0, 1], [1, 2]]
            .iter()
            .map(|es| Constraint { coeffs: es.iter().map(|e| (*e, q(1))).collect(), rel: Relation::Le, rhs: q(1) })
            .collect();
        let (v, _) = maximize(3, &[q(1), q(1), q(1)], &cons).optimal().unwrap();
        assert_eq!(v, Q::new(3, 2));
    }
}
