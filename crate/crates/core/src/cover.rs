//! The bipartite double cover `G'' = (V, V', E'')`.
//!
//! Every edge `e = (u, v)` becomes the two cover edges `(u, v')` and
//! `(u', v)`. A half-matching of size `s` corresponds to a cover matching
//! with `2s` edges, and halving the multiplicities of a cover matching
//! gives back a half-matching.

use std::collections::HashSet;

use crate::instance::{Edge, EdgeId, Instance, VertexId};
use crate::matching::HalfMatching;
use crate::scalar::Scalar;

/// Left copies are vertices `0..n`, right copies `n..2n`. Cover edge `2k`
/// is `(ends[0], ends[1]')` of original edge `k`, cover edge `2k + 1` is
/// `(ends[0]', ends[1])`. Both sides keep the original valuations and weight.
#[derive(Clone, Debug)]
pub struct DoubleCover<S> {
    cover: Instance<S>,
    n: usize,
}

impl<S: Scalar> DoubleCover<S> {
    pub fn new(inst: &Instance<S>) -> Self {
        let n = inst.num_vertices();
        let mut names: Vec<String> = inst.vertex_names().to_vec();
        let mut taken: HashSet<String> = names.iter().cloned().collect();
        for v in inst.vertex_names() {
            let mut primed = format!("{v}'");
            while taken.contains(&primed) {
                primed.push('\'');
            }
            taken.insert(primed.clone());
            names.push(primed);
        }
        let mut edges = Vec::with_capacity(2 * inst.num_edges());
        for e in inst.edges() {
            let [a, b] = e.ends;
            for (k, ends) in [[a, VertexId(b.0 + n)], [VertexId(a.0 + n), b]].into_iter().enumerate() {
                edges.push(Edge {
                    name: format!("{}/{}", e.name, k),
                    ends,
                    pref: e.pref.clone(),
                    weight: e.weight.clone(),
                    thresholds: [None, None],
                });
            }
        }
        let mut empty: Vec<S> = inst.vertices().map(|v| inst.empty_value(v).clone()).collect();
        empty.extend_from_within(..);
        DoubleCover { cover: Instance::from_parts(names, edges, empty, None), n }
    }

    /// The bipartite cover instance.
    pub fn instance(&self) -> &Instance<S> {
        &self.cover
    }

    pub fn left(&self, v: VertexId) -> VertexId {
        v
    }

    pub fn right(&self, v: VertexId) -> VertexId {
        VertexId(v.0 + self.n)
    }

    /// Original vertex of a cover vertex and whether it is a right copy.
    pub fn origin_vertex(&self, x: VertexId) -> (VertexId, bool) {
        if x.0 >= self.n {
            (VertexId(x.0 - self.n), true)
        } else {
            (x, false)
        }
    }

    pub fn cover_edges(&self, e: EdgeId) -> [EdgeId; 2] {
        [EdgeId(2 * e.0), EdgeId(2 * e.0 + 1)]
    }

    pub fn origin(&self, c: EdgeId) -> EdgeId {
        EdgeId(c.0 / 2)
    }

    /// The cover edge of `e` leaving the left copy of `from`.
    pub fn oriented(&self, inst: &Instance<S>, e: EdgeId, from: VertexId) -> EdgeId {
        if inst.edge(e).ends[0] == from {
            EdgeId(2 * e.0)
        } else {
            EdgeId(2 * e.0 + 1)
        }
    }

    /// Cover matching of a half-matching: value-1 edges contribute both
    /// cover edges; a 1/2-cycle or 1/2-path `v_1, v_2, ...` contributes
    /// `(v_i, v_{i+1}')` for each of its edges.
    pub fn lift(&self, inst: &Instance<S>, m: &HalfMatching<S>) -> Vec<EdgeId> {
        let d = m.decompose(inst);
        let mut out = Vec::new();
        for e in d.full {
            out.extend(self.cover_edges(e));
        }
        for comp in d.cycles.iter().chain(d.paths.iter()) {
            for (k, e) in comp.edges.iter().enumerate() {
                out.push(self.oriented(inst, *e, comp.vertices[k]));
            }
        }
        out.sort();
        out
    }

    /// Half-matching with `M(e)` = (number of cover edges of `e` in `matching`) / 2.
    ///
    /// Panics if `matching` is not a matching of the cover.
    pub fn project(&self, inst: &Instance<S>, matching: &[EdgeId]) -> HalfMatching<S> {
        let mut used = vec![false; 2 * self.n];
        let mut values = vec![S::zero(); inst.num_edges()];
        for c in matching {
            for x in self.cover.edge(*c).ends {
                assert!(!used[x.0], "cover edges share vertex {}", self.cover.vertex_name(x));
                used[x.0] = true;
            }
            let e = self.origin(*c);
            values[e.0] = values[e.0].clone() + S::half();
        }
        HalfMatching::new(inst, values).expect("projection of a cover matching is a half-matching")
    }
}
