//! Fractional matchings, half-matchings and the derived per-vertex quantities.

use std::collections::BTreeSet;
use std::ops::Deref;

use thiserror::Error;

use crate::instance::{EdgeId, Instance, VertexId};
use crate::scalar::{sum, Scalar};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatchingError {
    #[error("matching has {got} values but the instance has {expected} edges")]
    WrongLength { expected: usize, got: usize },
    #[error("value of edge `{0}` is outside [0, 1]")]
    OutOfRange(String),
    #[error("vertex `{0}` is covered more than once")]
    Overloaded(String),
    #[error("value of edge `{0}` is not in {{0, 1/2, 1}}")]
    NotHalfIntegral(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
}

/// Edge values with every vertex covered at most once. Absent edges are 0.
#[derive(Clone, Debug, PartialEq)]
pub struct FractionalMatching<S = Rational> {
    values: Vec<S>,
}

impl<S: Scalar> FractionalMatching<S> {
    pub fn empty(inst: &Instance<S>) -> Self {
        FractionalMatching { values: vec![S::zero(); inst.num_edges()] }
    }

    pub fn new(inst: &Instance<S>, values: Vec<S>) -> Result<Self, MatchingError> {
        if values.len() != inst.num_edges() {
            return Err(MatchingError::WrongLength { expected: inst.num_edges(), got: values.len() });
        }
        for (i, x) in values.iter().enumerate() {
            if x.is_negative() || *x > S::one() {
                return Err(MatchingError::OutOfRange(inst.edge_name(EdgeId(i)).to_string()));
            }
        }
        let m = FractionalMatching { values };
        for v in inst.vertices() {
            if m.load(inst, v) > S::one() {
                return Err(MatchingError::Overloaded(inst.vertex_name(v).to_string()));
            }
        }
        Ok(m)
    }

    /// Builds a matching from `(edge id, value)` pairs; unlisted edges are 0.
    pub fn from_named(inst: &Instance<S>, pairs: &[(&str, S)]) -> Result<Self, MatchingError> {
        let mut values = vec![S::zero(); inst.num_edges()];
        for (name, x) in pairs {
            let e = inst.edge_id(name).ok_or_else(|| MatchingError::UnknownEdge(name.to_string()))?;
            values[e.0] = x.clone();
        }
        Self::new(inst, values)
    }

    pub fn value(&self, e: EdgeId) -> &S {
        &self.values[e.0]
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn into_values(self) -> Vec<S> {
        self.values
    }

    /// `Σ_{e ∈ E(v)} M(e)`.
    pub fn load(&self, inst: &Instance<S>, v: VertexId) -> S {
        sum(inst.incident(v).iter().map(|e| &self.values[e.0]))
    }

    pub fn is_saturated(&self, inst: &Instance<S>, v: VertexId) -> bool {
        self.load(inst, v) == S::one()
    }

    pub fn size(&self) -> S {
        sum(self.values.iter())
    }

    /// `Σ ω(e) M(e)`, treating missing weights as 0.
    pub fn weight(&self, inst: &Instance<S>) -> S {
        inst.edge_ids()
            .filter_map(|e| inst.weight(e).map(|w| w.clone() * self.values[e.0].clone()))
            .fold(S::zero(), |a, b| a + b)
    }

    pub fn support(&self) -> Vec<EdgeId> {
        (0..self.values.len()).filter(|&i| self.values[i].is_positive()).map(EdgeId).collect()
    }

    /// Edges with positive value at `v` (`E_M(v)`).
    pub fn support_at(&self, inst: &Instance<S>, v: VertexId) -> Vec<EdgeId> {
        inst.incident(v).iter().copied().filter(|e| self.values[e.0].is_positive()).collect()
    }

    pub fn is_half_integral(&self) -> bool {
        self.values.iter().all(|x| x.is_zero() || *x == S::half() || *x == S::one())
    }

    pub fn is_integral(&self) -> bool {
        self.values.iter().all(|x| x.is_zero() || *x == S::one())
    }

    pub fn saturates_all(&self, inst: &Instance<S>, set: &BTreeSet<VertexId>) -> bool {
        set.iter().all(|v| self.is_saturated(inst, *v))
    }
}

/// Fractional matching with values in `{0, 1/2, 1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct HalfMatching<S = Rational>(FractionalMatching<S>);

impl<S: Scalar> HalfMatching<S> {
    pub fn empty(inst: &Instance<S>) -> Self {
        HalfMatching(FractionalMatching::empty(inst))
    }

    pub fn new(inst: &Instance<S>, values: Vec<S>) -> Result<Self, MatchingError> {
        Self::try_from_fractional(inst, FractionalMatching::new(inst, values)?)
    }

    pub fn from_named(inst: &Instance<S>, pairs: &[(&str, S)]) -> Result<Self, MatchingError> {
        Self::try_from_fractional(inst, FractionalMatching::from_named(inst, pairs)?)
    }

    pub fn try_from_fractional(inst: &Instance<S>, m: FractionalMatching<S>) -> Result<Self, MatchingError> {
        for e in inst.edge_ids() {
            let x = m.value(e);
            if !(x.is_zero() || *x == S::half() || *x == S::one()) {
                return Err(MatchingError::NotHalfIntegral(inst.edge_name(e).to_string()));
            }
        }
        Ok(HalfMatching(m))
    }

    pub fn as_fractional(&self) -> &FractionalMatching<S> {
        &self.0
    }

    pub fn into_fractional(self) -> FractionalMatching<S> {
        self.0
    }

    /// Splits the support into value-1 edges and the paths and cycles formed
    /// by value-1/2 edges. Components start at their smallest vertex.
    pub fn decompose(&self, inst: &Instance<S>) -> SupportDecomposition {
        let half = S::half();
        let n = inst.num_vertices();
        let mut half_edges: Vec<Vec<EdgeId>> = vec![Vec::new(); n];
        let mut full = Vec::new();
        for e in inst.edge_ids() {
            let x = self.value(e);
            if *x == S::one() {
                full.push(e);
            } else if *x == half {
                let [a, b] = inst.edge(e).ends;
                half_edges[a.0].push(e);
                half_edges[b.0].push(e);
            }
        }
        let mut visited = vec![false; n];
        let walk = |start: VertexId, first: EdgeId, visited: &mut Vec<bool>| -> HalfComponent {
            let mut vertices = vec![start];
            let mut edges = vec![first];
            visited[start.0] = true;
            let mut at = inst.other(first, start);
            let mut came = first;
            loop {
                if at == start {
                    return HalfComponent { vertices, edges, closed: true };
                }
                visited[at.0] = true;
                vertices.push(at);
                match half_edges[at.0].iter().find(|&&f| f != came) {
                    Some(&next) => {
                        edges.push(next);
                        came = next;
                        at = inst.other(next, at);
                    }
                    None => return HalfComponent { vertices, edges, closed: false },
                }
            }
        };
        let mut paths = Vec::new();
        for v in 0..n {
            if !visited[v] && half_edges[v].len() == 1 {
                paths.push(walk(VertexId(v), half_edges[v][0], &mut visited));
            }
        }
        let mut cycles = Vec::new();
        for v in 0..n {
            if !visited[v] && half_edges[v].len() == 2 {
                let first = half_edges[v][0].min(half_edges[v][1]);
                cycles.push(walk(VertexId(v), first, &mut visited));
            }
        }
        SupportDecomposition { full, cycles, paths }
    }
}

impl<S> Deref for HalfMatching<S> {
    type Target = FractionalMatching<S>;

    fn deref(&self) -> &FractionalMatching<S> {
        &self.0
    }
}

/// A path or cycle of value-1/2 edges. `edges[k]` joins `vertices[k]` and
/// `vertices[k + 1]` (cyclically when `closed`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HalfComponent {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
    pub closed: bool,
}

impl HalfComponent {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn is_odd_cycle(&self) -> bool {
        self.closed && self.vertices.len() % 2 == 1
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SupportDecomposition {
    pub full: Vec<EdgeId>,
    pub cycles: Vec<HalfComponent>,
    pub paths: Vec<HalfComponent>,
}

/// `p_v(M)`: the worst positively valued incident edge if `v` is
/// saturated, otherwise `p_v(∅)`.
pub fn assigned_value<S: Scalar>(inst: &Instance<S>, v: VertexId, m: &FractionalMatching<S>) -> S {
    if !m.is_saturated(inst, v) {
        return inst.empty_value(v).clone();
    }
    m.support_at(inst, v)
        .into_iter()
        .map(|e| inst.pref(v, e).clone())
        .reduce(|a, b| a.min_of(b))
        .unwrap_or_else(|| inst.empty_value(v).clone())
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatchingStats<S = Rational> {
    pub size: S,
    pub saturated: Vec<VertexId>,
    pub unsaturated: Vec<VertexId>,
    pub integral: bool,
    /// Every vertex of the critical set is saturated (true for no set).
    pub critical_ok: bool,
}

pub fn matching_stats<S: Scalar>(
    inst: &Instance<S>,
    m: &FractionalMatching<S>,
    critical: Option<&BTreeSet<VertexId>>,
) -> MatchingStats<S> {
    let (saturated, unsaturated): (Vec<VertexId>, Vec<VertexId>) =
        inst.vertices().partition(|v| m.is_saturated(inst, *v));
    MatchingStats {
        size: m.size(),
        saturated,
        unsaturated,
        integral: m.is_integral(),
        critical_ok: critical.is_none_or(|c| m.saturates_all(inst, c)),
    }
}
