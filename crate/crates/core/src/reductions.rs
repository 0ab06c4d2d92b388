//! Edge-copy reductions to strict multigraphs and projection back.
//!
//! Each construction replaces every edge by parallel copies that its two
//! endpoints rank in (almost) opposite orders. The endpoint with the smaller
//! vertex index plays the role of `v_i`. Derived valuations are ranks: the
//! best of `k` derived edges at a vertex gets `k`, the worst gets `1`.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use thiserror::Error;

use crate::engine::StrictInstance;
use crate::instance::{Edge, EdgeId, Instance, VertexId};
use crate::matching::HalfMatching;
use crate::scalar::Scalar;
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("edge `{edge}` has no gamma/delta at `{vertex}`")]
    MissingThresholds { edge: String, vertex: String },
    #[error("vertex `{vertex}` ranks `{first}` and `{second}` equally")]
    Ties { vertex: String, first: String, second: String },
    #[error("projected value of edge `{0}` exceeds 1")]
    ProjectionOverflow(String),
    #[error("matching does not belong to the derived instance")]
    WrongInstance,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Construction {
    Gamma,
    Srti,
    Pri,
    Crit,
}

/// Role of a derived copy for one of its endpoints.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CopyKind {
    /// γ construction: `a(e)`, valued `p_v(e)`.
    Best,
    /// γ construction: `b(e)`, valued `p_v(e) - γ`.
    Second,
    /// γ construction: `c(e)`, valued `p_v(e) - δ`.
    Third,
    /// γ construction: `d(e)`, below every other kind.
    Last,
    /// Three-copy construction: the endpoint's own copy.
    Top,
    /// Three-copy construction: the shared copy `e^0`.
    Middle,
    /// Three-copy construction: the other endpoint's own copy.
    Bottom,
    Good,
    Bad,
    /// Critical construction; 0 is the middle copy, higher is better.
    Level(i64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct CopyMeta {
    pub origin: EdgeId,
    /// Kinds aligned with the derived edge's `ends`, which equal the origin's.
    pub kind: [CopyKind; 2],
}

/// Strict multigraph produced by a reduction, with per-copy metadata.
#[derive(Clone, Debug)]
pub struct DerivedInstance<S = Rational> {
    construction: Construction,
    strict: StrictInstance<S>,
    meta: Vec<CopyMeta>,
    copies: Vec<Vec<EdgeId>>,
    /// γ construction only: `p_v(a)`, `p_v(b)`, `p_v(c)` per copy and side.
    gamma_values: Option<Vec<[Option<S>; 2]>>,
    origin_edges: usize,
}

impl<S: Scalar> DerivedInstance<S> {
    pub fn construction(&self) -> Construction {
        self.construction
    }

    pub fn instance(&self) -> &StrictInstance<S> {
        &self.strict
    }

    pub fn meta(&self, d: EdgeId) -> &CopyMeta {
        &self.meta[d.0]
    }

    pub fn origin(&self, d: EdgeId) -> EdgeId {
        self.meta[d.0].origin
    }

    /// Kind of derived copy `d` for endpoint `v`.
    pub fn kind(&self, d: EdgeId, v: VertexId) -> CopyKind {
        let side = self.strict.edge(d).side(v).expect("vertex is an endpoint of the copy");
        self.meta[d.0].kind[side]
    }

    /// Level of copy `d` for `v` (critical construction only).
    pub fn level(&self, d: EdgeId, v: VertexId) -> Option<i64> {
        match self.kind(d, v) {
            CopyKind::Level(l) => Some(l),
            _ => None,
        }
    }

    /// Copies of origin edge `e`, in creation order.
    pub fn copies(&self, e: EdgeId) -> &[EdgeId] {
        &self.copies[e.0]
    }

    /// `B_j^v(e)`: the copy of `e` with level `j > 0` for `v`.
    pub fn best_copy(&self, e: EdgeId, v: VertexId, j: i64) -> Option<EdgeId> {
        self.copies[e.0].iter().copied().find(|d| self.level(*d, v) == Some(j))
    }

    /// `W_j^v(e)`: the copy of `e` with level `-j` for `v`.
    pub fn worst_copy(&self, e: EdgeId, v: VertexId, j: i64) -> Option<EdgeId> {
        self.copies[e.0].iter().copied().find(|d| self.level(*d, v) == Some(-j))
    }

    /// γ construction: the valuation `p_v(a)`, `p_v(b)` or `p_v(c)` used to
    /// order the copies (`None` for last copies and other constructions).
    pub fn gamma_value(&self, d: EdgeId, v: VertexId) -> Option<&S> {
        let side = self.strict.edge(d).side(v)?;
        self.gamma_values.as_ref()?[d.0][side].as_ref()
    }

    /// `M(e) = Σ_i M'(e_i)` over the copies of each origin edge.
    pub fn project(&self, origin: &Instance<S>, m: &HalfMatching<S>) -> Result<HalfMatching<S>, ReductionError> {
        if m.values().len() != self.strict.num_edges() || origin.num_edges() != self.origin_edges {
            return Err(ReductionError::WrongInstance);
        }
        let mut values = vec![S::zero(); self.origin_edges];
        for (d, x) in m.values().iter().enumerate() {
            let e = self.meta[d].origin.0;
            values[e] = values[e].clone() + x.clone();
        }
        for (e, x) in values.iter().enumerate() {
            if *x > S::one() {
                return Err(ReductionError::ProjectionOverflow(origin.edge_name(EdgeId(e)).to_string()));
            }
        }
        HalfMatching::new(origin, values).map_err(|_| ReductionError::WrongInstance)
    }

    /// Places each origin value on the copy chosen by `pick` (an index into
    /// [`Self::copies`]).
    pub fn lift(&self, m: &HalfMatching<S>, pick: impl Fn(EdgeId) -> usize) -> HalfMatching<S> {
        let mut values = vec![S::zero(); self.strict.num_edges()];
        for e in 0..self.origin_edges {
            let d = self.copies[e][pick(EdgeId(e))];
            values[d.0] = m.value(EdgeId(e)).clone();
        }
        HalfMatching::new(&self.strict, values).expect("one copy per origin edge keeps degrees")
    }
}

fn strictness<S: Scalar>(inst: &Instance<S>) -> Result<(), ReductionError> {
    for v in inst.vertices() {
        if let Some((a, b)) = inst.find_tie(v) {
            return Err(ReductionError::Ties {
                vertex: inst.vertex_name(v).to_string(),
                first: inst.edge_name(a).to_string(),
                second: inst.edge_name(b).to_string(),
            });
        }
    }
    Ok(())
}

/// Side of `e` held by the lower-indexed endpoint (`v_i`).
fn low_side<S>(edge: &Edge<S>) -> usize {
    if edge.ends[0] < edge.ends[1] {
        0
    } else {
        1
    }
}

struct Builder {
    copies: Vec<Vec<EdgeId>>,
    meta: Vec<CopyMeta>,
    names: Vec<String>,
}

impl Builder {
    fn new(origin_edges: usize) -> Builder {
        Builder { copies: vec![Vec::new(); origin_edges], meta: Vec::new(), names: Vec::new() }
    }

    fn add<S: Scalar>(&mut self, origin: &Instance<S>, e: EdgeId, tag: &str, kind: [CopyKind; 2]) -> EdgeId {
        let d = EdgeId(self.meta.len());
        self.names.push(format!("{}#{}", origin.edge(e).name, tag));
        self.meta.push(CopyMeta { origin: e, kind });
        self.copies[e.0].push(d);
        d
    }

    /// Turns per-vertex orders (best first) into rank valuations.
    fn finish<S: Scalar>(
        self,
        origin: &Instance<S>,
        construction: Construction,
        orders: Vec<Vec<EdgeId>>,
        gamma_values: Option<Vec<[Option<S>; 2]>>,
    ) -> DerivedInstance<S> {
        let mut prefs: Vec<[Option<S>; 2]> = vec![[None, None]; self.meta.len()];
        for (v, order) in orders.iter().enumerate() {
            let k = order.len() as i64;
            for (i, d) in order.iter().enumerate() {
                let side = origin.edge(self.meta[d.0].origin).side(VertexId(v)).expect("incident copy");
                debug_assert!(prefs[d.0][side].is_none());
                prefs[d.0][side] = Some(S::from_int(k - i as i64));
            }
        }
        let edges: Vec<Edge<S>> = self
            .meta
            .iter()
            .zip(self.names)
            .zip(prefs)
            .map(|((m, name), [p0, p1])| Edge {
                name,
                ends: origin.edge(m.origin).ends,
                pref: [p0.expect("ranked at both ends"), p1.expect("ranked at both ends")],
                weight: origin.weight(m.origin).cloned(),
                thresholds: [None, None],
            })
            .collect();
        let empty = vec![S::zero(); origin.num_vertices()];
        let inst = Instance::from_parts(origin.vertex_names().to_vec(), edges, empty, None);
        let strict = StrictInstance::new(inst).expect("derived orders are strict");
        DerivedInstance {
            construction,
            strict,
            meta: self.meta,
            copies: self.copies,
            gamma_values,
            origin_edges: origin.num_edges(),
        }
    }
}

/// Four copies per edge. At `v`, copies `a`, `b`, `c` are ordered by
/// `p_v(e)`, `p_v(e) - γ_e^v`, `p_v(e) - δ_e^v` (ties: `c` before `b` before
/// `a`, then edge order); all `d` copies follow by `p_v(e)`.
pub fn build_gamma_reduction<S: Scalar>(inst: &Instance<S>) -> Result<DerivedInstance<S>, ReductionError> {
    use CopyKind::*;
    let mut b = Builder::new(inst.num_edges());
    let mut gamma_values: Vec<[Option<S>; 2]> = Vec::new();
    for e in inst.edge_ids() {
        let edge = inst.edge(e);
        let mut thr = Vec::new();
        for side in 0..2 {
            let v = edge.ends[side];
            let t = inst.thresholds(e, v).ok_or_else(|| ReductionError::MissingThresholds {
                edge: edge.name.clone(),
                vertex: inst.vertex_name(v).to_string(),
            })?;
            thr.push(t);
        }
        let lo = low_side(edge);
        // e^1..e^4 seen from v_i; v_j sees them reversed
        let low_kinds = [Best, Second, Third, Last];
        let high_kinds = [Last, Third, Second, Best];
        for k in 0..4 {
            let mut kind = [low_kinds[k]; 2];
            kind[1 - lo] = high_kinds[k];
            b.add(inst, e, &(k + 1).to_string(), kind);
            let mut vals: [Option<S>; 2] = [None, None];
            for side in 0..2 {
                let p = edge.pref[side].clone();
                vals[side] = match kind[side] {
                    Best => Some(p),
                    Second => Some(p - thr[side].gamma.clone()),
                    Third => Some(p - thr[side].delta.clone()),
                    _ => None,
                };
            }
            gamma_values.push(vals);
        }
    }
    let tie_rank = |k: CopyKind| match k {
        Third => 0,
        Second => 1,
        _ => 2,
    };
    let mut orders = Vec::with_capacity(inst.num_vertices());
    for v in inst.vertices() {
        let mut upper: Vec<(EdgeId, S, CopyKind)> = Vec::new();
        let mut last: Vec<EdgeId> = Vec::new();
        for &e in inst.incident(v) {
            let side = inst.edge(e).side(v).unwrap();
            for &d in &b.copies[e.0] {
                let kind = b.meta[d.0].kind[side];
                match &gamma_values[d.0][side] {
                    Some(x) => upper.push((d, x.clone(), kind)),
                    None => last.push(d),
                }
            }
        }
        upper.sort_by(|x, y| {
            y.1.total_cmp(&x.1)
                .then(tie_rank(x.2).cmp(&tie_rank(y.2)))
                .then(b.meta[x.0 .0].origin.cmp(&b.meta[y.0 .0].origin))
        });
        last.sort_by(|x, y| {
            let (ex, ey) = (b.meta[x.0].origin, b.meta[y.0].origin);
            inst.pref(v, ey).total_cmp(inst.pref(v, ex)).then(ex.cmp(&ey))
        });
        orders.push(upper.into_iter().map(|u| u.0).chain(last).collect());
    }
    Ok(b.finish(inst, Construction::Gamma, orders, Some(gamma_values)))
}

/// Three copies per edge: `e^i` (top for `v_i`), `e^0` (middle), `e^j`
/// (top for `v_j`). Each tie class `[e_1..e_k]` becomes
/// `e_1^own .. e_k^own, e_1^0 .. e_k^0`; the other endpoints' copies come
/// last by `p_v`.
pub fn build_srti_reduction<S: Scalar>(inst: &Instance<S>) -> DerivedInstance<S> {
    use CopyKind::*;
    let mut b = Builder::new(inst.num_edges());
    for e in inst.edge_ids() {
        let lo = low_side(inst.edge(e));
        let mut ki = [Bottom; 2];
        ki[lo] = Top;
        let mut kj = [Top; 2];
        kj[lo] = Bottom;
        b.add(inst, e, "i", ki);
        b.add(inst, e, "0", [Middle, Middle]);
        b.add(inst, e, "j", kj);
    }
    let copy_of = |b: &Builder, e: EdgeId, side: usize, kind: CopyKind| -> EdgeId {
        *b.copies[e.0].iter().find(|d| b.meta[d.0].kind[side] == kind).expect("copy exists")
    };
    let mut orders = Vec::with_capacity(inst.num_vertices());
    for v in inst.vertices() {
        let mut order = Vec::new();
        for class in inst.tie_classes(v) {
            for &e in &class {
                order.push(copy_of(&b, e, inst.edge(e).side(v).unwrap(), Top));
            }
            for &e in &class {
                order.push(copy_of(&b, e, inst.edge(e).side(v).unwrap(), Middle));
            }
        }
        for e in inst.ranked(v) {
            order.push(copy_of(&b, e, inst.edge(e).side(v).unwrap(), Bottom));
        }
        orders.push(order);
    }
    b.finish(inst, Construction::Srti, orders, None)
}

/// Two copies per edge: `e_a` good for `v_i`, `e_b` good for `v_j`. Every
/// vertex ranks its good copies in original order, then its bad copies.
pub fn build_pri_reduction<S: Scalar>(inst: &Instance<S>) -> Result<DerivedInstance<S>, ReductionError> {
    use CopyKind::*;
    strictness(inst)?;
    let mut b = Builder::new(inst.num_edges());
    for e in inst.edge_ids() {
        let lo = low_side(inst.edge(e));
        let mut ka = [Bad; 2];
        ka[lo] = Good;
        let mut kb = [Good; 2];
        kb[lo] = Bad;
        b.add(inst, e, "a", ka);
        b.add(inst, e, "b", kb);
    }
    let mut orders = Vec::with_capacity(inst.num_vertices());
    for v in inst.vertices() {
        let ranked = inst.ranked(v);
        let mut order = Vec::new();
        for want in [Good, Bad] {
            for &e in &ranked {
                let side = inst.edge(e).side(v).unwrap();
                order.extend(b.copies[e.0].iter().filter(|d| b.meta[d.0].kind[side] == want));
            }
        }
        orders.push(order);
    }
    Ok(b.finish(inst, Construction::Pri, orders, None))
}

/// Middle copy of every edge (level 0) plus, for each critical endpoint,
/// `s = |C|` copies with levels `-1..-s` at that endpoint and `1..s` at the
/// other. Vertices rank copies by level (highest first), then by the
/// original order.
pub fn build_crit_reduction<S: Scalar>(
    inst: &Instance<S>,
    critical: &BTreeSet<VertexId>,
) -> Result<DerivedInstance<S>, ReductionError> {
    strictness(inst)?;
    let s = critical.len() as i64;
    let mut b = Builder::new(inst.num_edges());
    for e in inst.edge_ids() {
        let edge = inst.edge(e);
        b.add(inst, e, "0", [CopyKind::Level(0); 2]);
        let lo = low_side(edge);
        // copies worst for v_i are tagged e^k, those worst for v_j are e^-k
        for (crit_side, sign) in [(lo, 1i64), (1 - lo, -1i64)] {
            if !critical.contains(&edge.ends[crit_side]) {
                continue;
            }
            for k in 1..=s {
                let mut kind = [CopyKind::Level(k); 2];
                kind[crit_side] = CopyKind::Level(-k);
                b.add(inst, e, &(sign * k).to_string(), kind);
            }
        }
    }
    let mut orders = Vec::with_capacity(inst.num_vertices());
    for v in inst.vertices() {
        let rank: Vec<(EdgeId, usize)> = inst.ranked(v).into_iter().enumerate().map(|(i, e)| (e, i)).collect();
        let pos = |e: EdgeId| rank.iter().find(|(f, _)| *f == e).map(|(_, i)| *i).unwrap();
        let mut items: Vec<(i64, usize, EdgeId)> = Vec::new();
        for &e in inst.incident(v) {
            let side = inst.edge(e).side(v).unwrap();
            for &d in &b.copies[e.0] {
                let CopyKind::Level(l) = b.meta[d.0].kind[side] else { unreachable!() };
                items.push((l, pos(e), d));
            }
        }
        items.sort_by(|x, y| match y.0.cmp(&x.0) {
            Ordering::Equal => x.1.cmp(&y.1),
            o => o,
        });
        orders.push(items.into_iter().map(|i| i.2).collect());
    }
    Ok(b.finish(inst, Construction::Crit, orders, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::RawInstance;
    use crate::Rational64 as Q;

    /// Names of the derived edges at `v`, best first.
    fn order(d: &DerivedInstance<Q>, v: &str) -> Vec<String> {
        let inst = d.instance();
        let v = inst.vertex_id(v).unwrap();
        inst.ranked(v).into_iter().map(|e| inst.edge_name(e).to_string()).collect()
    }

    #[test]
    fn srti_single_edge() {
        let inst = fixtures::single_edge::<Q>();
        let d = build_srti_reduction(&inst);
        assert_eq!(order(&d, "a"), ["e#i", "e#0", "e#j"]);
        assert_eq!(order(&d, "b"), ["e#j", "e#0", "e#i"]);
    }

    #[test]
    fn srti_expansion_with_tie_class() {
        // v ranks e > [f, g] > h
        let inst = RawInstance::<Q>::new()
            .vertices(["v", "w1", "w2", "w3", "w4"])
            .edge("e", "v", "w1")
            .edge("f", "v", "w2")
            .edge("g", "v", "w3")
            .edge("h", "v", "w4")
            .ranking("v", &[&["e"], &["f", "g"], &["h"]])
            .strict("w1", &["e"])
            .strict("w2", &["f"])
            .strict("w3", &["g"])
            .strict("w4", &["h"])
            .validate()
            .unwrap();
        let d = build_srti_reduction(&inst);
        assert_eq!(
            order(&d, "v"),
            ["e#i", "e#0", "f#i", "g#i", "f#0", "g#0", "h#i", "h#0", "e#j", "f#j", "g#j", "h#j"]
        );
    }

    #[test]
    fn pri_good_then_bad() {
        let inst = fixtures::fix_b::<Q>();
        let d = build_pri_reduction(&inst).unwrap();
        assert_eq!(d.instance().num_edges(), 6);
        // v1 (lowest index) is v_i on both its edges
        assert_eq!(order(&d, "v1"), ["v1v2#a", "v1v3#a", "v1v2#b", "v1v3#b"]);
        // v2 is v_j on v1v2 and v_i on v2v3
        assert_eq!(order(&d, "v2"), ["v2v3#a", "v1v2#b", "v2v3#b", "v1v2#a"]);
        assert_eq!(order(&d, "v3"), ["v1v3#b", "v2v3#b", "v1v3#a", "v2v3#a"]);
    }

    #[test]
    fn pri_rejects_ties() {
        assert!(matches!(
            build_pri_reduction(&fixtures::tied_path4::<Q>()),
            Err(ReductionError::Ties { .. })
        ));
    }

    #[test]
    fn crit_without_critical_set_is_identity() {
        let inst = fixtures::fix_a::<Q>();
        let d = build_crit_reduction(&inst, &BTreeSet::new()).unwrap();
        assert_eq!(d.instance().num_edges(), inst.num_edges());
        for v in inst.vertices() {
            let ranked: Vec<EdgeId> = d.instance().ranked(v).into_iter().map(|x| d.origin(x)).collect();
            assert_eq!(ranked, inst.ranked(v));
        }
    }

    #[test]
    fn crit_single_edge_one_critical() {
        let inst = fixtures::single_edge::<Q>();
        let c: BTreeSet<_> = [inst.vertex_id("a").unwrap()].into();
        let d = build_crit_reduction(&inst, &c).unwrap();
        assert_eq!(order(&d, "a"), ["e#0", "e#1"]);
        assert_eq!(order(&d, "b"), ["e#1", "e#0"]);
    }

    #[test]
    fn crit_single_edge_both_critical() {
        let inst = fixtures::single_edge::<Q>();
        let c: BTreeSet<_> = inst.vertices().collect();
        let d = build_crit_reduction(&inst, &c).unwrap();
        assert_eq!(d.copies(EdgeId(0)).len(), 5);
        assert_eq!(order(&d, "a"), ["e#-2", "e#-1", "e#0", "e#1", "e#2"]);
        assert_eq!(order(&d, "b"), ["e#2", "e#1", "e#0", "e#-1", "e#-2"]);
        let a = inst.vertex_id("a").unwrap();
        let b2 = d.best_copy(EdgeId(0), a, 2).unwrap();
        assert_eq!(d.instance().edge_name(b2), "e#-2");
        let w2 = d.worst_copy(EdgeId(0), a, 2).unwrap();
        assert_eq!(d.instance().edge_name(w2), "e#2");
    }

    #[test]
    fn gamma_single_edge_order() {
        let inst = RawInstance::<Q>::new()
            .vertices(["a", "b"])
            .edge("e", "a", "b")
            .pref("a", "e", Q::from_integer(1))
            .pref("b", "e", Q::from_integer(1))
            .thresholds("e", "a", Q::new(1, 4), Q::new(1, 2))
            .thresholds("e", "b", Q::new(1, 4), Q::new(1, 2))
            .validate()
            .unwrap();
        let d = build_gamma_reduction(&inst).unwrap();
        assert_eq!(order(&d, "a"), ["e#1", "e#2", "e#3", "e#4"]);
        assert_eq!(order(&d, "b"), ["e#4", "e#3", "e#2", "e#1"]);
    }

    #[test]
    fn gamma_two_edge_order_with_tie() {
        let g = Q::new(1, 2);
        let dl = Q::new(3, 2);
        let inst = RawInstance::<Q>::new()
            .vertices(["v", "x", "y"])
            .edge("e", "v", "x")
            .edge("f", "v", "y")
            .pref("v", "e", Q::from_integer(2))
            .pref("v", "f", Q::from_integer(1))
            .pref("x", "e", Q::from_integer(1))
            .pref("y", "f", Q::from_integer(1))
            .thresholds("e", "v", g, dl)
            .thresholds("f", "v", g, dl)
            .thresholds("e", "x", g, dl)
            .thresholds("f", "y", g, dl)
            .validate()
            .unwrap();
        let d = build_gamma_reduction(&inst).unwrap();
        // a(e)=2, b(e)=3/2, a(f)=1, c(e)=1/2 (before b(f)=1/2), b(f), c(f)=-1/2, then d copies
        assert_eq!(order(&d, "v"), ["e#1", "e#2", "f#1", "e#3", "f#2", "f#3", "e#4", "f#4"]);
        let v = inst.vertex_id("v").unwrap();
        let cf = d.instance().edge_id("f#3").unwrap();
        assert_eq!(d.gamma_value(cf, v), Some(&Q::new(-1, 2)));
    }

    #[test]
    fn projection_sums_copies() {
        let inst = fixtures::single_edge::<Q>();
        let d = build_srti_reduction(&inst);
        let h = Q::new(1, 2);
        let m = HalfMatching::new(d.instance(), vec![h, h, Q::from_integer(0)]).unwrap();
        assert_eq!(d.project(&inst, &m).unwrap().values(), [Q::from_integer(1)]);
        let m = HalfMatching::new(d.instance(), vec![Q::from_integer(0), Q::from_integer(1), Q::from_integer(0)])
            .unwrap();
        assert_eq!(d.project(&inst, &m).unwrap().values(), [Q::from_integer(1)]);
    }
}
