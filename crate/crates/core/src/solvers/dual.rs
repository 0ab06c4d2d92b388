//! Optimal duals of the fractional maximum-weight matching LP
//!
//! ```text
//! max Σ ω_e x_e   s.t.  Σ_{e ∈ E(v)} x_e ≤ 1,  x ≥ 0
//! min Σ y_v       s.t.  y_u + y_v ≥ ω_e,       y ≥ 0
//! ```
//!
//! computed from a maximum-weight assignment on the double cover.

use std::collections::BTreeSet;

use crate::cover::DoubleCover;
use crate::instance::{EdgeId, Instance, VertexId};
use crate::matching::HalfMatching;
use crate::scalar::{sum, Scalar};
use crate::Rational;

/// Optimal dual `y` with its tight edges, positive-dual (critical) vertices
/// and a maximum-weight half-matching satisfying complementary slackness.
#[derive(Clone, Debug, PartialEq)]
pub struct DualSolution<S = Rational> {
    pub y: Vec<S>,
    pub objective: S,
    pub tight_edges: Vec<EdgeId>,
    pub critical: BTreeSet<VertexId>,
    pub witness: HalfMatching<S>,
}

impl<S: Scalar> DualSolution<S> {
    /// Checks dual feasibility, `objective = Σ y = ω(witness)`, and that the
    /// witness lives on tight edges and saturates every positive-dual vertex.
    pub fn check(&self, inst: &Instance<S>) -> Result<(), String> {
        if self.y.len() != inst.num_vertices() {
            return Err("dual has the wrong length".into());
        }
        if let Some(v) = inst.vertices().find(|v| self.y[v.0].is_negative()) {
            return Err(format!("negative dual at `{}`", inst.vertex_name(v)));
        }
        for e in inst.edge_ids() {
            let [a, b] = inst.edge(e).ends;
            let slack = self.y[a.0].clone() + self.y[b.0].clone() - weight(inst, e);
            if slack.is_negative() {
                return Err(format!("edge `{}` violates its dual constraint", inst.edge_name(e)));
            }
            let tight = slack.is_zero();
            if tight != self.tight_edges.contains(&e) {
                return Err(format!("tight set is wrong at edge `{}`", inst.edge_name(e)));
            }
            if !tight && self.witness.value(e).is_positive() {
                return Err(format!("witness uses slack edge `{}`", inst.edge_name(e)));
            }
        }
        if sum(self.y.iter()) != self.objective {
            return Err("objective differs from the dual sum".into());
        }
        if weighted_size(inst, &self.witness) != self.objective {
            return Err("witness weight differs from the objective".into());
        }
        for v in inst.vertices() {
            let positive = self.y[v.0].is_positive();
            if positive != self.critical.contains(&v) {
                return Err(format!("critical set is wrong at `{}`", inst.vertex_name(v)));
            }
            if positive && !self.witness.is_saturated(inst, v) {
                return Err(format!("witness leaves `{}` unsaturated", inst.vertex_name(v)));
            }
        }
        Ok(())
    }
}

/// `ω(e)`, with missing weights read as 0.
pub(crate) fn weight<S: Scalar>(inst: &Instance<S>, e: EdgeId) -> S {
    inst.weight(e).cloned().unwrap_or_else(S::zero)
}

/// `Σ ω(e) M(e)` with missing weights read as 0.
pub fn weighted_size<S: Scalar>(inst: &Instance<S>, m: &HalfMatching<S>) -> S {
    inst.edge_ids().fold(S::zero(), |acc, e| acc + weight(inst, e) * m.value(e).clone())
}

/// Maximum-weight assignment on a square matrix. Returns `(row → column,
/// row potentials, column potentials)` with `u_i + v_j ≥ w_ij` everywhere
/// and equality on the assignment.
pub(crate) fn hungarian<S: Scalar>(w: &[Vec<S>]) -> (Vec<usize>, Vec<S>, Vec<S>) {
    let n = w.len();
    // minimisation on cost -w, 1-indexed with a virtual column 0
    let mut u = vec![S::zero(); n + 1];
    let mut v = vec![S::zero(); n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv: Vec<Option<S>> = vec![None; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta: Option<S> = None;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = -w[i0 - 1][j - 1].clone() - u[i0].clone() - v[j].clone();
                if minv[j].as_ref().is_none_or(|m| cur < *m) {
                    minv[j] = Some(cur);
                    way[j] = j0;
                }
                let mj = minv[j].as_ref().unwrap();
                if delta.as_ref().is_none_or(|d| *mj < *d) {
                    delta = Some(mj.clone());
                    j1 = j;
                }
            }
            let delta = delta.expect("a free column remains");
            for j in 0..=n {
                if used[j] {
                    u[p[j]] = u[p[j]].clone() + delta.clone();
                    v[j] = v[j].clone() - delta.clone();
                } else if let Some(m) = minv[j].as_mut() {
                    *m = m.clone() - delta.clone();
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assign = vec![0usize; n];
    for j in 1..=n {
        assign[p[j] - 1] = j - 1;
    }
    let rows = u[1..].iter().map(|x| -x.clone()).collect();
    let cols = v[1..].iter().map(|x| -x.clone()).collect();
    (assign, rows, cols)
}

/// Best parallel edge between `a` and `b` by `score`, lowest id on ties.
fn best_edge<S: Scalar>(inst: &Instance<S>, a: VertexId, b: VertexId, score: &dyn Fn(EdgeId) -> S) -> Option<(EdgeId, S)> {
    let mut best: Option<(EdgeId, S)> = None;
    for &e in inst.incident(a) {
        if inst.other(e, a) != b {
            continue;
        }
        let s = score(e);
        if best.as_ref().is_none_or(|(_, bs)| s > *bs) {
            best = Some((e, s));
        }
    }
    best
}

/// Maximum assignment on the double cover under an edge score (≥ 0).
/// Returns the chosen cover edges (pairs of positive score) and potentials.
pub(crate) fn cover_assignment<S: Scalar>(
    inst: &Instance<S>,
    score: &dyn Fn(EdgeId) -> S,
) -> (Vec<EdgeId>, Vec<S>, Vec<S>) {
    let n = inst.num_vertices();
    let mut w = vec![vec![S::zero(); n]; n];
    let mut pick = vec![vec![None; n]; n];
    for a in inst.vertices() {
        for b in inst.vertices() {
            if let Some((e, s)) = best_edge(inst, a, b, score) {
                if s.is_positive() {
                    w[a.0][b.0] = s;
                    pick[a.0][b.0] = Some(e);
                }
            }
        }
    }
    let (assign, u, v) = hungarian(&w);
    let dc = DoubleCover::new(inst);
    let mut chosen = Vec::new();
    for (a, &b) in assign.iter().enumerate() {
        if let Some(e) = pick[a][b] {
            chosen.push(dc.oriented(inst, e, VertexId(a)));
        }
    }
    chosen.sort();
    (chosen, u, v)
}

/// Optimal dual of the fractional maximum-weight matching LP. Missing
/// weights count as 0.
pub fn max_weight_dual<S: Scalar>(inst: &Instance<S>) -> DualSolution<S> {
    let score = |e: EdgeId| weight(inst, e).positive_part();
    let (chosen, u, v) = cover_assignment(inst, &score);
    // y_v >= 0 since u_v + v_v >= w_vv = 0
    let half = S::half();
    let y: Vec<S> = (0..inst.num_vertices()).map(|i| (u[i].clone() + v[i].clone()) * half.clone()).collect();
    let witness = DoubleCover::new(inst).project(inst, &chosen);
    let tight_edges = inst
        .edge_ids()
        .filter(|e| {
            let [a, b] = inst.edge(*e).ends;
            y[a.0].clone() + y[b.0].clone() == weight(inst, *e)
        })
        .collect();
    let critical = inst.vertices().filter(|v| y[v.0].is_positive()).collect();
    let objective = sum(y.iter());
    DualSolution { y, objective, tight_edges, critical, witness }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{fixtures, RawInstance};
    use crate::Rational64 as Q;

    fn weighted(mut raw: RawInstance<Q>, w: &[(&str, i64)]) -> Instance<Q> {
        for (e, x) in w {
            raw = raw.weight(e, Q::from_integer(*x));
        }
        raw.validate().unwrap()
    }

    #[test]
    fn single_edge_weight_four() {
        let inst = weighted(fixtures::single_edge::<Q>().to_raw(), &[("e", 4)]);
        let d = max_weight_dual(&inst);
        d.check(&inst).unwrap();
        assert_eq!(d.objective, Q::from_integer(4));
        assert_eq!(d.y, vec![Q::from_integer(2), Q::from_integer(2)]);
        assert_eq!(d.critical.len(), 2);
    }

    #[test]
    fn unit_triangle() {
        let inst = weighted(fixtures::fix_b::<Q>().to_raw(), &[("v1v2", 1), ("v2v3", 1), ("v1v3", 1)]);
        let d = max_weight_dual(&inst);
        d.check(&inst).unwrap();
        assert_eq!(d.objective, Q::new(3, 2));
        assert!(d.y.iter().all(|y| *y == Q::new(1, 2)));
        assert_eq!(d.tight_edges.len(), 3);
        assert_eq!(d.critical.len(), 3);
    }

    #[test]
    fn zero_weight() {
        let inst = weighted(fixtures::single_edge::<Q>().to_raw(), &[("e", 0)]);
        let d = max_weight_dual(&inst);
        d.check(&inst).unwrap();
        assert!(d.y.iter().all(|y| *y == Q::from_integer(0)));
        assert!(d.critical.is_empty());
    }

    #[test]
    fn parallel_edges_leave_light_one_slack() {
        let inst = RawInstance::<Q>::new()
            .vertices(["a", "b"])
            .edge("heavy", "a", "b")
            .edge("light", "a", "b")
            .strict("a", &["heavy", "light"])
            .strict("b", &["light", "heavy"])
            .weight("heavy", Q::from_integer(2))
            .weight("light", Q::from_integer(1))
            .validate()
            .unwrap();
        let d = max_weight_dual(&inst);
        d.check(&inst).unwrap();
        assert_eq!(d.tight_edges, vec![inst.edge_id("heavy").unwrap()]);
    }
}
