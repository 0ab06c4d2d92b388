//! Roommates instances: a multigraph whose vertices value their incident edges.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::scalar::Scalar;
use crate::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub usize);

impl VertexId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl EdgeId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

/// Improvement thresholds of one endpoint of an edge, `0 < gamma < delta`.
#[derive(Clone, Debug, PartialEq)]
pub struct Thresholds<S> {
    pub gamma: S,
    pub delta: S,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Edge<S> {
    pub name: String,
    pub ends: [VertexId; 2],
    /// `pref[k]` is the valuation of this edge by `ends[k]`.
    pub pref: [S; 2],
    pub weight: Option<S>,
    pub thresholds: [Option<Thresholds<S>>; 2],
}

impl<S> Edge<S> {
    /// Position of `v` among the endpoints.
    pub fn side(&self, v: VertexId) -> Option<usize> {
        if self.ends[0] == v {
            Some(0)
        } else if self.ends[1] == v {
            Some(1)
        } else {
            None
        }
    }

    pub fn other(&self, v: VertexId) -> VertexId {
        if self.ends[0] == v {
            self.ends[1]
        } else {
            self.ends[0]
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("duplicate edge `{0}`")]
    DuplicateEdge(String),
    #[error("edge `{edge}` references unknown vertex `{vertex}`")]
    UnknownVertex { edge: String, vertex: String },
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("edge `{0}` is a loop")]
    LoopEdge(String),
    #[error("vertex `{vertex}` is not an endpoint of edge `{edge}`")]
    NotIncident { vertex: String, edge: String },
    #[error("vertex `{vertex}` has no preference value for edge `{edge}`")]
    MissingPreference { vertex: String, edge: String },
    #[error("vertex `{vertex}` lists edge `{edge}` twice")]
    DuplicatePreference { vertex: String, edge: String },
    #[error("vertex `{vertex}` has a negative preference value for edge `{edge}`")]
    NegativePreference { vertex: String, edge: String },
    #[error("vertex `{vertex}`: value of being unmatched must be <= 0 and below every incident edge")]
    EmptyNotBelow { vertex: String },
    #[error("edge `{edge}` at `{vertex}`: gamma must be positive")]
    GammaNotPositive { edge: String, vertex: String },
    #[error("edge `{edge}` at `{vertex}`: gamma must be < delta")]
    GammaNotBelowDelta { edge: String, vertex: String },
    #[error("duplicate {what} for edge `{edge}`")]
    DuplicateAttribute { what: &'static str, edge: String },
    #[error("critical set references unknown vertex `{0}`")]
    UnknownCriticalVertex(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertexName(String),
}

/// Unvalidated instance description.
#[derive(Clone, Debug, Default)]
pub struct RawInstance<S> {
    pub vertices: Vec<String>,
    /// `(edge id, endpoint, endpoint)`.
    pub edges: Vec<(String, String, String)>,
    /// `(vertex, edge, value)`.
    pub prefs: Vec<(String, String, S)>,
    pub empty_values: Vec<(String, S)>,
    pub weights: Vec<(String, S)>,
    /// `(edge, endpoint, gamma, delta)`.
    pub thresholds: Vec<(String, String, S, S)>,
    pub critical: Option<Vec<String>>,
}

impl<S: Scalar> RawInstance<S> {
    pub fn new() -> Self {
        RawInstance {
            vertices: Vec::new(),
            edges: Vec::new(),
            prefs: Vec::new(),
            empty_values: Vec::new(),
            weights: Vec::new(),
            thresholds: Vec::new(),
            critical: None,
        }
    }

    pub fn vertices<I, T>(mut self, names: I) -> Self
    where
        I: IntoIterator<Item = T>,
        T: Into<String>,
    {
        self.vertices.extend(names.into_iter().map(Into::into));
        self
    }

    pub fn edge(mut self, id: &str, u: &str, v: &str) -> Self {
        self.edges.push((id.into(), u.into(), v.into()));
        self
    }

    pub fn pref(mut self, vertex: &str, edge: &str, value: S) -> Self {
        self.prefs.push((vertex.into(), edge.into(), value));
        self
    }

    /// Preference list of `vertex` as tie groups, best group first. The
    /// best of `k` groups gets value `k`, the worst gets `1`.
    pub fn ranking(mut self, vertex: &str, groups: &[&[&str]]) -> Self {
        let k = groups.len() as i64;
        for (g, group) in groups.iter().enumerate() {
            for edge in group.iter() {
                self.prefs
                    .push((vertex.into(), (*edge).into(), S::from_int(k - g as i64)));
            }
        }
        self
    }

    /// Strict preference list, best first.
    pub fn strict(self, vertex: &str, order: &[&str]) -> Self {
        let groups: Vec<[&str; 1]> = order.iter().map(|e| [*e]).collect();
        let refs: Vec<&[&str]> = groups.iter().map(|g| &g[..]).collect();
        self.ranking(vertex, &refs)
    }

    pub fn empty_value(mut self, vertex: &str, value: S) -> Self {
        self.empty_values.push((vertex.into(), value));
        self
    }

    pub fn weight(mut self, edge: &str, value: S) -> Self {
        self.weights.push((edge.into(), value));
        self
    }

    pub fn thresholds(mut self, edge: &str, vertex: &str, gamma: S, delta: S) -> Self {
        self.thresholds.push((edge.into(), vertex.into(), gamma, delta));
        self
    }

    pub fn critical<I, T>(mut self, names: I) -> Self
    where
        I: IntoIterator<Item = T>,
        T: Into<String>,
    {
        self.critical = Some(names.into_iter().map(Into::into).collect());
        self
    }

    pub fn validate(self) -> Result<Instance<S>, InstanceError> {
        validate_instance(self)
    }
}

/// Checks a raw description and produces the canonical instance: edges are
/// ordered by id and every incidence list follows that order.
pub fn validate_instance<S: Scalar>(raw: RawInstance<S>) -> Result<Instance<S>, InstanceError> {
    let mut vertex_index = HashMap::new();
    for (i, name) in raw.vertices.iter().enumerate() {
        if vertex_index.insert(name.clone(), VertexId(i)).is_some() {
            return Err(InstanceError::DuplicateVertex(name.clone()));
        }
    }

    let mut sorted = raw.edges.clone();
    sorted.sort_by(|a, b| a.0.cmp(&b.0));
    let mut edges: Vec<Edge<S>> = Vec::with_capacity(sorted.len());
    let mut edge_index = HashMap::new();
    for (name, u, v) in sorted {
        let lookup = |x: &String| {
            vertex_index
                .get(x)
                .copied()
                .ok_or_else(|| InstanceError::UnknownVertex { edge: name.clone(), vertex: x.clone() })
        };
        let (vu, vv) = (lookup(&u)?, lookup(&v)?);
        if vu == vv {
            return Err(InstanceError::LoopEdge(name));
        }
        if edge_index.insert(name.clone(), EdgeId(edges.len())).is_some() {
            return Err(InstanceError::DuplicateEdge(name));
        }
        edges.push(Edge {
            name,
            ends: [vu, vv],
            pref: [S::zero(), S::zero()],
            weight: None,
            thresholds: [None, None],
        });
    }

    let slot = |edges: &Vec<Edge<S>>, vertex: &str, edge: &str| -> Result<(usize, usize), InstanceError> {
        let e = *edge_index
            .get(edge)
            .ok_or_else(|| InstanceError::UnknownEdge(edge.to_string()))?;
        let v = *vertex_index.get(vertex).ok_or_else(|| InstanceError::NotIncident {
            vertex: vertex.to_string(),
            edge: edge.to_string(),
        })?;
        let side = edges[e.0].side(v).ok_or_else(|| InstanceError::NotIncident {
            vertex: vertex.to_string(),
            edge: edge.to_string(),
        })?;
        Ok((e.0, side))
    };

    let mut seen = vec![[false, false]; edges.len()];
    for (vertex, edge, value) in &raw.prefs {
        let (e, side) = slot(&edges, vertex, edge)?;
        if seen[e][side] {
            return Err(InstanceError::DuplicatePreference { vertex: vertex.clone(), edge: edge.clone() });
        }
        if value.is_negative() {
            return Err(InstanceError::NegativePreference { vertex: vertex.clone(), edge: edge.clone() });
        }
        seen[e][side] = true;
        edges[e].pref[side] = value.clone();
    }
    for (e, s) in seen.iter().enumerate() {
        for side in 0..2 {
            if !s[side] {
                return Err(InstanceError::MissingPreference {
                    vertex: raw.vertices[edges[e].ends[side].0].clone(),
                    edge: edges[e].name.clone(),
                });
            }
        }
    }

    let mut incidence = vec![Vec::new(); raw.vertices.len()];
    for (i, e) in edges.iter().enumerate() {
        incidence[e.ends[0].0].push(EdgeId(i));
        incidence[e.ends[1].0].push(EdgeId(i));
    }

    let mut empty_value = vec![S::zero(); raw.vertices.len()];
    for (vertex, value) in &raw.empty_values {
        let v = *vertex_index
            .get(vertex)
            .ok_or_else(|| InstanceError::UnknownVertexName(vertex.clone()))?;
        empty_value[v.0] = value.clone();
    }
    for (v, inc) in incidence.iter().enumerate() {
        let below = inc.iter().all(|e| {
            let edge = &edges[e.0];
            let side = edge.side(VertexId(v)).unwrap();
            edge.pref[side] > empty_value[v]
        });
        if empty_value[v].is_positive() || !below {
            return Err(InstanceError::EmptyNotBelow { vertex: raw.vertices[v].clone() });
        }
    }

    for (edge, w) in &raw.weights {
        let e = *edge_index.get(edge).ok_or_else(|| InstanceError::UnknownEdge(edge.clone()))?;
        if edges[e.0].weight.is_some() {
            return Err(InstanceError::DuplicateAttribute { what: "weight", edge: edge.clone() });
        }
        edges[e.0].weight = Some(w.clone());
    }

    for (edge, vertex, gamma, delta) in &raw.thresholds {
        let (e, side) = slot(&edges, vertex, edge)?;
        if !gamma.is_positive() {
            return Err(InstanceError::GammaNotPositive { edge: edge.clone(), vertex: vertex.clone() });
        }
        if gamma >= delta {
            return Err(InstanceError::GammaNotBelowDelta { edge: edge.clone(), vertex: vertex.clone() });
        }
        if edges[e].thresholds[side].is_some() {
            return Err(InstanceError::DuplicateAttribute { what: "thresholds", edge: edge.clone() });
        }
        edges[e].thresholds[side] = Some(Thresholds { gamma: gamma.clone(), delta: delta.clone() });
    }

    let critical = match &raw.critical {
        None => None,
        Some(names) => {
            let mut set = BTreeSet::new();
            for name in names {
                let v = vertex_index
                    .get(name)
                    .ok_or_else(|| InstanceError::UnknownCriticalVertex(name.clone()))?;
                set.insert(*v);
            }
            Some(set)
        }
    };

    Ok(Instance {
        vertex_names: raw.vertices,
        vertex_index,
        edges,
        edge_index,
        incidence,
        empty_value,
        critical,
    })
}

/// A validated roommates instance. Immutable once built.
#[derive(Clone, Debug)]
pub struct Instance<S = Rational> {
    vertex_names: Vec<String>,
    vertex_index: HashMap<String, VertexId>,
    edges: Vec<Edge<S>>,
    edge_index: HashMap<String, EdgeId>,
    incidence: Vec<Vec<EdgeId>>,
    empty_value: Vec<S>,
    critical: Option<BTreeSet<VertexId>>,
}

impl<S: Scalar> Instance<S> {
    /// Assembles an instance from trusted parts, keeping the given edge
    /// order. Used for instances built by this crate (covers, reductions).
    pub(crate) fn from_parts(
        vertex_names: Vec<String>,
        edges: Vec<Edge<S>>,
        empty_value: Vec<S>,
        critical: Option<BTreeSet<VertexId>>,
    ) -> Instance<S> {
        let vertex_index = vertex_names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), VertexId(i)))
            .collect();
        let edge_index = edges
            .iter()
            .enumerate()
            .map(|(i, e)| (e.name.clone(), EdgeId(i)))
            .collect();
        let mut incidence = vec![Vec::new(); vertex_names.len()];
        for (i, e) in edges.iter().enumerate() {
            debug_assert!(e.ends[0] != e.ends[1]);
            incidence[e.ends[0].0].push(EdgeId(i));
            incidence[e.ends[1].0].push(EdgeId(i));
        }
        Instance { vertex_names, vertex_index, edges, edge_index, incidence, empty_value, critical }
    }

    pub fn num_vertices(&self) -> usize {
        self.vertex_names.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.vertex_names.len()).map(VertexId)
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.edges.len()).map(EdgeId)
    }

    pub fn edge(&self, e: EdgeId) -> &Edge<S> {
        &self.edges[e.0]
    }

    pub fn edges(&self) -> &[Edge<S>] {
        &self.edges
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertex_names[v.0]
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.vertex_names
    }

    pub fn edge_name(&self, e: EdgeId) -> &str {
        &self.edges[e.0].name
    }

    pub fn vertex_id(&self, name: &str) -> Option<VertexId> {
        self.vertex_index.get(name).copied()
    }

    pub fn edge_id(&self, name: &str) -> Option<EdgeId> {
        self.edge_index.get(name).copied()
    }

    pub fn incident(&self, v: VertexId) -> &[EdgeId] {
        &self.incidence[v.0]
    }

    pub fn other(&self, e: EdgeId, v: VertexId) -> VertexId {
        self.edges[e.0].other(v)
    }

    pub fn is_incident(&self, v: VertexId, e: EdgeId) -> bool {
        e.0 < self.edges.len() && self.edges[e.0].side(v).is_some()
    }

    /// `p_v(e)`. Panics when `e` is not incident to `v`.
    pub fn pref(&self, v: VertexId, e: EdgeId) -> &S {
        let edge = &self.edges[e.0];
        let side = edge.side(v).expect("edge not incident to vertex");
        &edge.pref[side]
    }

    /// `p_v(∅)`.
    pub fn empty_value(&self, v: VertexId) -> &S {
        &self.empty_value[v.0]
    }

    pub fn weight(&self, e: EdgeId) -> Option<&S> {
        self.edges[e.0].weight.as_ref()
    }

    pub fn thresholds(&self, e: EdgeId, v: VertexId) -> Option<&Thresholds<S>> {
        let edge = &self.edges[e.0];
        edge.side(v).and_then(|s| edge.thresholds[s].as_ref())
    }

    /// True when every (edge, endpoint) slot carries thresholds.
    pub fn has_all_thresholds(&self) -> bool {
        self.edges.iter().all(|e| e.thresholds.iter().all(Option::is_some))
    }

    pub fn critical(&self) -> Option<&BTreeSet<VertexId>> {
        self.critical.as_ref()
    }

    /// Strictly prefers `e` to `f` (either may be `None` for being unmatched).
    pub fn prefers(&self, v: VertexId, e: Option<EdgeId>, f: Option<EdgeId>) -> bool {
        let value = |x: Option<EdgeId>| match x {
            Some(x) => self.pref(v, x).clone(),
            None => self.empty_value(v).clone(),
        };
        value(e) > value(f)
    }

    /// Incident edges best first; equal values keep edge-id order.
    pub fn ranked(&self, v: VertexId) -> Vec<EdgeId> {
        let mut order = self.incidence[v.0].clone();
        order.sort_by(|a, b| self.pref(v, *b).total_cmp(self.pref(v, *a)).then(a.cmp(b)));
        order
    }

    /// Incident edges grouped into tie classes, best class first.
    pub fn tie_classes(&self, v: VertexId) -> Vec<Vec<EdgeId>> {
        let mut classes: Vec<Vec<EdgeId>> = Vec::new();
        for e in self.ranked(v) {
            match classes.last_mut() {
                Some(last) if self.pref(v, last[0]) == self.pref(v, e) => last.push(e),
                _ => classes.push(vec![e]),
            }
        }
        classes
    }

    /// First vertex (and a tied pair of its edges) violating strictness.
    pub fn find_tie(&self, v: VertexId) -> Option<(EdgeId, EdgeId)> {
        let ranked = self.ranked(v);
        ranked
            .windows(2)
            .find(|w| self.pref(v, w[0]) == self.pref(v, w[1]))
            .map(|w| (w[0], w[1]))
    }

    pub fn is_strict(&self) -> bool {
        self.vertices().all(|v| self.find_tie(v).is_none())
    }

    /// Smallest positive difference between two valuations at the same
    /// vertex, including the gap down to `p_v(∅)`.
    pub fn min_positive_gap(&self) -> Option<S> {
        let mut best: Option<S> = None;
        for v in self.vertices() {
            let mut values: Vec<S> = self.incident(v).iter().map(|e| self.pref(v, *e).clone()).collect();
            values.push(self.empty_value(v).clone());
            values.sort_by(|a, b| a.total_cmp(b));
            for w in values.windows(2) {
                let gap = w[1].clone() - w[0].clone();
                if gap.is_positive() && best.as_ref().is_none_or(|b| gap < *b) {
                    best = Some(gap);
                }
            }
        }
        best
    }

    pub fn is_bipartite(&self) -> bool {
        let n = self.num_vertices();
        let mut color: Vec<Option<bool>> = vec![None; n];
        for start in 0..n {
            if color[start].is_some() {
                continue;
            }
            color[start] = Some(false);
            let mut stack = vec![start];
            while let Some(u) = stack.pop() {
                let cu = color[u].unwrap();
                for e in &self.incidence[u] {
                    let w = self.edges[e.0].other(VertexId(u)).0;
                    match color[w] {
                        None => {
                            color[w] = Some(!cu);
                            stack.push(w);
                        }
                        Some(cw) if cw == cu => return false,
                        _ => {}
                    }
                }
            }
        }
        true
    }

    /// Same instance with a different critical set.
    pub fn with_critical(&self, critical: Option<BTreeSet<VertexId>>) -> Instance<S> {
        let mut out = self.clone();
        out.critical = critical;
        out
    }

    /// Sub-instance on the same vertices keeping only `keep` (in id order).
    /// Returns the map from new edge ids to the original ones.
    pub fn restrict_edges(&self, keep: &[EdgeId]) -> (Instance<S>, Vec<EdgeId>) {
        let mut kept: Vec<EdgeId> = keep.to_vec();
        kept.sort();
        kept.dedup();
        let edges: Vec<Edge<S>> = kept.iter().map(|e| self.edges[e.0].clone()).collect();
        let inst = Instance::from_parts(
            self.vertex_names.clone(),
            edges,
            self.empty_value.clone(),
            self.critical.clone(),
        );
        (inst, kept)
    }

    /// Back to a raw description (used by serializers).
    pub fn to_raw(&self) -> RawInstance<S> {
        let mut raw = RawInstance::new().vertices(self.vertex_names.iter().cloned());
        for e in &self.edges {
            let (u, v) = (self.vertex_name(e.ends[0]), self.vertex_name(e.ends[1]));
            raw = raw.edge(&e.name, u, v);
            for side in 0..2 {
                let who = self.vertex_name(e.ends[side]).to_string();
                raw.prefs.push((who.clone(), e.name.clone(), e.pref[side].clone()));
                if let Some(t) = &e.thresholds[side] {
                    raw.thresholds.push((e.name.clone(), who, t.gamma.clone(), t.delta.clone()));
                }
            }
            if let Some(w) = &e.weight {
                raw.weights.push((e.name.clone(), w.clone()));
            }
        }
        for v in self.vertices() {
            if !self.empty_value(v).is_zero() {
                raw.empty_values.push((self.vertex_name(v).to_string(), self.empty_value(v).clone()));
            }
        }
        raw.critical = self
            .critical
            .as_ref()
            .map(|c| c.iter().map(|v| self.vertex_name(*v).to_string()).collect());
        raw
    }
}
