//! Balanced transportation problems with exact costs.

use thiserror::Error;

use crate::lp::{minimize, Constraint, Relation};
use crate::scalar::{sum, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransportError {
    #[error("total supply differs from total demand")]
    Imbalance,
    #[error("negative supply or demand")]
    Negative,
    #[error("cost matrix shape does not match supply and demand")]
    Shape,
}

/// Optimal plan: `plan[i][j]` units shipped from supply `i` to demand `j`.
#[derive(Clone, Debug, PartialEq)]
pub struct Transport<S> {
    pub cost: S,
    pub plan: Vec<Vec<S>>,
}

fn equalities<S: Scalar>(supply: &[S], demand: &[S], cols: usize) -> Vec<Constraint<S>> {
    let mut cons = Vec::new();
    for (i, s) in supply.iter().enumerate() {
        let coeffs = (0..cols).map(|j| (i * cols + j, S::one())).collect();
        cons.push(Constraint { coeffs, rel: Relation::Eq, rhs: s.clone() });
    }
    for (j, d) in demand.iter().enumerate() {
        let coeffs = (0..supply.len()).map(|i| (i * cols + j, S::one())).collect();
        cons.push(Constraint { coeffs, rel: Relation::Eq, rhs: d.clone() });
    }
    cons
}

/// Minimum-cost plan. Among optimal plans the one that is lexicographically
/// smallest in row-major order is returned.
pub fn min_cost_transport<S: Scalar>(
    supply: &[S],
    demand: &[S],
    cost: &[Vec<S>],
) -> Result<Transport<S>, TransportError> {
    if cost.len() != supply.len() || cost.iter().any(|r| r.len() != demand.len()) {
        return Err(TransportError::Shape);
    }
    if supply.iter().chain(demand).any(|x| x.is_negative()) {
        return Err(TransportError::Negative);
    }
    if sum(supply.iter()) != sum(demand.iter()) {
        return Err(TransportError::Imbalance);
    }
    let (rows, cols) = (supply.len(), demand.len());
    let mut plan = vec![vec![S::zero(); cols]; rows];
    if rows == 0 || cols == 0 {
        return Ok(Transport { cost: S::zero(), plan });
    }
    let nv = rows * cols;
    let flat: Vec<S> = cost.iter().flatten().cloned().collect();
    let mut cons = equalities(supply, demand, cols);
    let (best, _) = minimize(nv, &flat, &cons).optimal().expect("balanced transport is feasible");
    cons.push(Constraint {
        coeffs: flat.iter().cloned().enumerate().filter(|(_, c)| !c.is_zero()).collect(),
        rel: Relation::Eq,
        rhs: best.clone(),
    });
    for k in 0..nv {
        let (i, j) = (k / cols, k % cols);
        let x = if supply[i].is_zero() || demand[j].is_zero() {
            S::zero()
        } else {
            let mut unit = vec![S::zero(); nv];
            unit[k] = S::one();
            minimize(nv, &unit, &cons).optimal().expect("optimal face is nonempty").0
        };
        cons.push(Constraint { coeffs: vec![(k, S::one())], rel: Relation::Eq, rhs: x.clone() });
        plan[i][j] = x;
    }
    Ok(Transport { cost: best, plan })
}

/// Minimum of `Σ plan · vote` when items are totally ordered and the vote
/// of pairing `x` with `y` is `+1` if `x` ranks above `y`, `-1` if below.
/// `items` lists `(supply, demand)` best first; no item has both.
///
/// The adversary ships as much as possible to strictly better demands; the
/// supports are nested, so a single best-to-worst sweep is optimal.
pub(crate) fn ranked_vote_minimum<S: Scalar>(items: &[(S, S)]) -> S {
    let mut pool = S::zero();
    let mut total = S::zero();
    let mut upward = S::zero();
    for (s, d) in items {
        if s.is_positive() {
            total = total + s.clone();
            let take = s.clone().min_of(pool.clone());
            upward = upward + take.clone();
            pool = pool - take;
        }
        if d.is_positive() {
            pool = pool + d.clone();
        }
    }
    total - upward.clone() - upward
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational64 as Q;

    fn q(n: i64) -> Q {
        Q::from_integer(n)
    }

    #[test]
    fn single_cell() {
        let t = min_cost_transport(&[q(1)], &[q(1)], &[vec![q(-1)]]).unwrap();
        assert_eq!(t.cost, q(-1));
        assert_eq!(t.plan, vec![vec![q(1)]]);
    }

    #[test]
    fn split_plan() {
        // supplies a: 1/2, ∅: 1/2; demand b: 1
        let h = Q::new(1, 2);
        let t = min_cost_transport(&[h, h], &[q(1)], &[vec![q(1)], vec![q(-1)]]).unwrap();
        assert_eq!(t.cost, q(0));
        assert_eq!(t.plan, vec![vec![h], vec![h]]);
    }

    #[test]
    fn empty() {
        let t = min_cost_transport::<Q>(&[], &[], &[]).unwrap();
        assert_eq!(t.cost, q(0));
        assert!(t.plan.is_empty());
    }

    #[test]
    fn imbalance_rejected() {
        assert_eq!(min_cost_transport(&[q(1)], &[q(2)], &[vec![q(0)]]), Err(TransportError::Imbalance));
    }

    #[test]
    fn lexicographic_tie_break() {
        // all costs equal: lexicographically smallest plan pushes mass late
        let t = min_cost_transport(&[q(1), q(1)], &[q(1), q(1)], &[vec![q(0), q(0)], vec![q(0), q(0)]]).unwrap();
        assert_eq!(t.plan, vec![vec![q(0), q(1)], vec![q(1), q(0)]]);
    }

    #[test]
    fn ranked_sweep() {
        let h = Q::new(1, 2);
        // better demand then worse supply: all mass goes upward
        assert_eq!(ranked_vote_minimum(&[(q(0), h), (h, q(0))]), -h);
        // supply above demand: forced downward
        assert_eq!(ranked_vote_minimum(&[(h, q(0)), (q(0), h)]), h);
    }
}
