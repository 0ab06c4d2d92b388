//! Head-to-head comparisons of fractional matchings.
//!
//! Every vertex `v` couples its side of `M` with its side of `N` through a
//! pairing `φ_v` on `(E(v) ∪ {∅})²` and votes `+1` for each unit of mass
//! where the `M` item is better, `-1` where it is worse. `Δ(M, N)` is the
//! least total vote over all pairings of a given class.

mod sensible;
mod transport;

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::engine::{enumerate_half_matchings, EngineError};
use crate::instance::{EdgeId, Instance, VertexId};
use crate::matching::FractionalMatching;
use crate::scalar::{sum, Scalar};
use crate::Rational;

pub use sensible::{delta_sensible, SENSIBLE_VAR_LIMIT};
pub use transport::{min_cost_transport, Transport, TransportError};

use transport::ranked_vote_minimum;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PopError {
    #[error("vertex `{vertex}` ties edges `{first}` and `{second}`")]
    Ties { vertex: String, first: String, second: String },
    #[error("edge `{edge}` is not incident to `{vertex}`")]
    NotIncident { vertex: String, edge: String },
    #[error("matching has {got} values but the instance has {expected} edges")]
    WrongInstance { expected: usize, got: usize },
    #[error("instance has {edges} edges, enumeration bound is {bound}")]
    BoundExceeded { edges: usize, bound: usize },
    #[error("sensible-pairing program needs {vars} variables, limit is {limit}")]
    TooLarge { vars: usize, limit: usize },
    #[error("matching leaves critical vertex `{0}` unsaturated")]
    NotCritical(String),
}

impl From<EngineError> for PopError {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::BoundExceeded { edges, bound } => PopError::BoundExceeded { edges, bound },
            other => unreachable!("enumeration only fails on the bound: {other}"),
        }
    }
}

/// `vote_v(x, y)`: `+1` if `v` strictly prefers `x`, `-1` if `y`, else 0.
/// `None` is being unmatched, which every edge beats.
pub fn vote<S: Scalar>(inst: &Instance<S>, v: VertexId, x: Option<EdgeId>, y: Option<EdgeId>) -> Result<i8, PopError> {
    for e in [x, y].into_iter().flatten() {
        if !inst.is_incident(v, e) {
            return Err(PopError::NotIncident {
                vertex: inst.vertex_name(v).to_string(),
                edge: inst.edge_name(e).to_string(),
            });
        }
    }
    Ok(if inst.prefers(v, x, y) {
        1
    } else if inst.prefers(v, y, x) {
        -1
    } else {
        0
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairingKind {
    Feasible,
    Sensible,
    Product,
}

/// One unit of `φ_v`: `mass` of `from` (an `M` item) coupled with `to`.
#[derive(Clone, Debug, PartialEq)]
pub struct PairEntry<S> {
    pub from: Option<EdgeId>,
    pub to: Option<EdgeId>,
    pub mass: S,
}

/// Pairings for all vertices; only positive entries are stored.
#[derive(Clone, Debug, PartialEq)]
pub struct Pairing<S = Rational> {
    pub kind: PairingKind,
    pub per_vertex: Vec<Vec<PairEntry<S>>>,
}

impl<S: Scalar> Pairing<S> {
    pub fn mass(&self, v: VertexId, from: Option<EdgeId>, to: Option<EdgeId>) -> S {
        sum(self.per_vertex[v.0].iter().filter(|p| p.from == from && p.to == to).map(|p| &p.mass))
    }

    fn row(&self, v: VertexId, from: Option<EdgeId>) -> S {
        sum(self.per_vertex[v.0].iter().filter(|p| p.from == from).map(|p| &p.mass))
    }

    fn col(&self, v: VertexId, to: Option<EdgeId>) -> S {
        sum(self.per_vertex[v.0].iter().filter(|p| p.to == to).map(|p| &p.mass))
    }

    /// `Σ φ_v · vote_v` per vertex.
    pub fn votes(&self, inst: &Instance<S>) -> Vec<S> {
        inst.vertices()
            .map(|v| {
                self.per_vertex[v.0].iter().fold(S::zero(), |acc, p| {
                    let s = vote(inst, v, p.from, p.to).expect("pairing entries are incident");
                    acc + S::from_int(s as i64) * p.mass.clone()
                })
            })
            .collect()
    }

    /// `Δ(M, N, φ)`.
    pub fn delta(&self, inst: &Instance<S>) -> S {
        sum(self.votes(inst).iter())
    }

    /// Checks the axioms of this pairing's kind against `M` and `N`.
    pub fn check(&self, inst: &Instance<S>, m: &FractionalMatching<S>, n: &FractionalMatching<S>) -> Result<(), String> {
        if self.per_vertex.len() != inst.num_vertices() {
            return Err("pairing has the wrong number of vertices".into());
        }
        for v in inst.vertices() {
            let name = inst.vertex_name(v);
            for p in &self.per_vertex[v.0] {
                if p.mass.is_negative() {
                    return Err(format!("negative mass at `{name}`"));
                }
                if [p.from, p.to].into_iter().flatten().any(|e| !inst.is_incident(v, e)) {
                    return Err(format!("pairing at `{name}` uses a non-incident edge"));
                }
            }
            match self.kind {
                PairingKind::Feasible => self.check_feasible(inst, v, m, n)?,
                PairingKind::Sensible => self.check_sensible(inst, v, m, n)?,
                PairingKind::Product => self.check_product(inst, v, m, n)?,
            }
        }
        Ok(())
    }

    fn check_feasible(
        &self,
        inst: &Instance<S>,
        v: VertexId,
        m: &FractionalMatching<S>,
        n: &FractionalMatching<S>,
    ) -> Result<(), String> {
        let name = inst.vertex_name(v);
        for &e in inst.incident(v) {
            let d = m.value(e).clone() - n.value(e).clone();
            if self.row(v, Some(e)) != d.positive_part() {
                return Err(format!("row of `{}` at `{name}` is not (M-N)^+", inst.edge_name(e)));
            }
            if self.col(v, Some(e)) != (-d).positive_part() {
                return Err(format!("column of `{}` at `{name}` is not (N-M)^+", inst.edge_name(e)));
            }
        }
        let d = m.load(inst, v) - n.load(inst, v);
        if self.col(v, None) != d.positive_part() {
            return Err(format!("empty column at `{name}` is wrong"));
        }
        if self.row(v, None) != (-d).positive_part() {
            return Err(format!("empty row at `{name}` is wrong"));
        }
        Ok(())
    }

    fn check_sensible(
        &self,
        inst: &Instance<S>,
        v: VertexId,
        m: &FractionalMatching<S>,
        n: &FractionalMatching<S>,
    ) -> Result<(), String> {
        let name = inst.vertex_name(v);
        for &e in inst.incident(v) {
            if self.row(v, Some(e)) != *m.value(e) {
                return Err(format!("row of `{}` at `{name}` is not M", inst.edge_name(e)));
            }
            if self.col(v, Some(e)) != *n.value(e) {
                return Err(format!("column of `{}` at `{name}` is not N", inst.edge_name(e)));
            }
            let u = inst.other(e, v);
            if self.mass(v, Some(e), Some(e)) != self.mass(u, Some(e), Some(e)) {
                return Err(format!("diagonal of `{}` differs between endpoints", inst.edge_name(e)));
            }
        }
        if self.row(v, None).is_positive() && m.is_saturated(inst, v) {
            return Err(format!("`{name}` pairs being unmatched in M but is M-saturated"));
        }
        if self.col(v, None).is_positive() && n.is_saturated(inst, v) {
            return Err(format!("`{name}` pairs being unmatched in N but is N-saturated"));
        }
        Ok(())
    }

    fn check_product(
        &self,
        inst: &Instance<S>,
        v: VertexId,
        m: &FractionalMatching<S>,
        n: &FractionalMatching<S>,
    ) -> Result<(), String> {
        let expected = product_entries(inst, v, m, n);
        let mut got = self.per_vertex[v.0].clone();
        got.retain(|p| !p.mass.is_zero());
        if got != expected {
            return Err(format!("pairing at `{}` is not the product pairing", inst.vertex_name(v)));
        }
        Ok(())
    }

    /// Adds the diagonal `min(M(e), N(e))` to a feasible pairing, which
    /// makes it sensible.
    pub fn to_sensible(&self, inst: &Instance<S>, m: &FractionalMatching<S>, n: &FractionalMatching<S>) -> Pairing<S> {
        assert_eq!(self.kind, PairingKind::Feasible);
        let mut per_vertex = self.per_vertex.clone();
        for v in inst.vertices() {
            for &e in inst.incident(v) {
                let t = m.value(e).clone().min_of(n.value(e).clone());
                if t.is_positive() {
                    per_vertex[v.0].push(PairEntry { from: Some(e), to: Some(e), mass: t });
                }
            }
            sort_entries(&mut per_vertex[v.0]);
        }
        Pairing { kind: PairingKind::Sensible, per_vertex }
    }
}

fn item_key(x: Option<EdgeId>) -> usize {
    x.map_or(usize::MAX, |e| e.0)
}

/// Canonical entry order: by `from` then `to`, edge ids ascending, `∅` last.
fn sort_entries<S>(entries: &mut [PairEntry<S>]) {
    entries.sort_by_key(|p| (item_key(p.from), item_key(p.to)));
}

fn product_entries<S: Scalar>(
    inst: &Instance<S>,
    v: VertexId,
    m: &FractionalMatching<S>,
    n: &FractionalMatching<S>,
) -> Vec<PairEntry<S>> {
    let mut rows: Vec<(Option<EdgeId>, S)> = inst.incident(v).iter().map(|&e| (Some(e), m.value(e).clone())).collect();
    rows.push((None, S::one() - m.load(inst, v)));
    let mut cols: Vec<(Option<EdgeId>, S)> = inst.incident(v).iter().map(|&e| (Some(e), n.value(e).clone())).collect();
    cols.push((None, S::one() - n.load(inst, v)));
    let mut out = Vec::new();
    for (x, a) in &rows {
        for (y, b) in &cols {
            if x.is_none() && y.is_none() {
                continue;
            }
            let mass = a.clone() * b.clone();
            if mass.is_positive() {
                out.push(PairEntry { from: *x, to: *y, mass });
            }
        }
    }
    sort_entries(&mut out);
    out
}

/// Minimum value, a pairing attaining it and the votes per vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct DeltaResult<S = Rational> {
    pub value: S,
    pub witness: Pairing<S>,
    pub votes: Vec<S>,
}

pub(crate) fn check_inputs<S: Scalar>(
    inst: &Instance<S>,
    ms: &[&FractionalMatching<S>],
) -> Result<(), PopError> {
    for m in ms {
        if m.values().len() != inst.num_edges() {
            return Err(PopError::WrongInstance { expected: inst.num_edges(), got: m.values().len() });
        }
    }
    if let Some(v) = inst.vertices().find(|v| inst.find_tie(*v).is_some()) {
        let (a, b) = inst.find_tie(v).unwrap();
        return Err(PopError::Ties {
            vertex: inst.vertex_name(v).to_string(),
            first: inst.edge_name(a).to_string(),
            second: inst.edge_name(b).to_string(),
        });
    }
    Ok(())
}

/// Supplies and demands of the feasible pairing at `v`, edges in id order
/// followed by `∅`.
fn feasible_margins<S: Scalar>(
    inst: &Instance<S>,
    v: VertexId,
    m: &FractionalMatching<S>,
    n: &FractionalMatching<S>,
) -> Vec<(Option<EdgeId>, S, S)> {
    let mut items: Vec<(Option<EdgeId>, S, S)> = inst
        .incident(v)
        .iter()
        .map(|&e| {
            let d = m.value(e).clone() - n.value(e).clone();
            (Some(e), d.positive_part(), (-d).positive_part())
        })
        .collect();
    items.sort_by_key(|(e, _, _)| item_key(*e));
    let d = m.load(inst, v) - n.load(inst, v);
    items.push((None, (-d.clone()).positive_part(), d.positive_part()));
    items
}

/// `Δ(M, N)` over feasible pairings without building a witness.
pub fn delta_feasible_value<S: Scalar>(
    inst: &Instance<S>,
    m: &FractionalMatching<S>,
    n: &FractionalMatching<S>,
) -> Result<S, PopError> {
    check_inputs(inst, &[m, n])?;
    Ok(feasible_value(inst, m, n))
}

fn feasible_value<S: Scalar>(inst: &Instance<S>, m: &FractionalMatching<S>, n: &FractionalMatching<S>) -> S {
    inst.vertices().fold(S::zero(), |acc, v| acc + vertex_minimum(inst, v, m, n))
}

fn vertex_minimum<S: Scalar>(inst: &Instance<S>, v: VertexId, m: &FractionalMatching<S>, n: &FractionalMatching<S>) -> S {
    let margins = feasible_margins(inst, v, m, n);
    let mut ranked: Vec<(S, S)> = Vec::with_capacity(margins.len());
    for e in inst.ranked(v) {
        let (_, s, d) = margins.iter().find(|(x, _, _)| *x == Some(e)).unwrap();
        ranked.push((s.clone(), d.clone()));
    }
    let (_, s, d) = margins.last().unwrap();
    ranked.push((s.clone(), d.clone()));
    ranked_vote_minimum(&ranked)
}

/// `Δ(M, N)`: the minimum decomposes into one transportation problem per
/// vertex. The witness is the lexicographically smallest optimal plan at
/// each vertex.
pub fn delta_feasible<S: Scalar>(
    inst: &Instance<S>,
    m: &FractionalMatching<S>,
    n: &FractionalMatching<S>,
) -> Result<DeltaResult<S>, PopError> {
    check_inputs(inst, &[m, n])?;
    let mut per_vertex = Vec::with_capacity(inst.num_vertices());
    let mut votes = Vec::with_capacity(inst.num_vertices());
    for v in inst.vertices() {
        let margins = feasible_margins(inst, v, m, n);
        let rows: Vec<_> = margins.iter().filter(|(_, s, _)| s.is_positive()).collect();
        let cols: Vec<_> = margins.iter().filter(|(_, _, d)| d.is_positive()).collect();
        let supply: Vec<S> = rows.iter().map(|r| r.1.clone()).collect();
        let demand: Vec<S> = cols.iter().map(|c| c.2.clone()).collect();
        let mut cost = Vec::with_capacity(rows.len());
        for r in &rows {
            let mut line = Vec::with_capacity(cols.len());
            for c in &cols {
                line.push(S::from_int(vote(inst, v, r.0, c.0)? as i64));
            }
            cost.push(line);
        }
        let t = min_cost_transport(&supply, &demand, &cost).expect("feasible margins balance");
        let mut entries = Vec::new();
        for (i, r) in rows.iter().enumerate() {
            for (j, c) in cols.iter().enumerate() {
                if t.plan[i][j].is_positive() {
                    entries.push(PairEntry { from: r.0, to: c.0, mass: t.plan[i][j].clone() });
                }
            }
        }
        debug_assert!(t.cost == vertex_minimum(inst, v, m, n));
        votes.push(t.cost);
        per_vertex.push(entries);
    }
    Ok(DeltaResult { value: sum(votes.iter()), witness: Pairing { kind: PairingKind::Feasible, per_vertex }, votes })
}

/// `Δ` under the product pairing `φ_v(e, f) = M(e) N(f)`.
pub fn delta_product<S: Scalar>(
    inst: &Instance<S>,
    m: &FractionalMatching<S>,
    n: &FractionalMatching<S>,
) -> Result<DeltaResult<S>, PopError> {
    check_inputs(inst, &[m, n])?;
    Ok(product_delta(inst, m, n))
}

fn product_delta<S: Scalar>(inst: &Instance<S>, m: &FractionalMatching<S>, n: &FractionalMatching<S>) -> DeltaResult<S> {
    let per_vertex = inst.vertices().map(|v| product_entries(inst, v, m, n)).collect();
    let witness = Pairing { kind: PairingKind::Product, per_vertex };
    let votes = witness.votes(inst);
    DeltaResult { value: sum(votes.iter()), witness, votes }
}

/// Which alternatives a verdict covers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scope {
    /// Every half-matching `N` (optionally restricted by a filter).
    HalfIntegral,
    /// Every half-matching plus `samples` seeded random fractional matchings.
    Sampled { samples: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Counterexample<S = Rational> {
    pub n: FractionalMatching<S>,
    pub delta: DeltaResult<S>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verdict<S = Rational> {
    pub popular: bool,
    pub scope: Scope,
    /// Number of alternatives compared.
    pub checked: usize,
    /// The alternative with the least `Δ` (first in enumeration order), if
    /// that `Δ` is negative.
    pub counterexample: Option<Counterexample<S>>,
}

#[derive(Clone, Copy)]
enum Rule {
    Feasible,
    Product,
}

fn judge<S: Scalar>(
    inst: &Instance<S>,
    m: &FractionalMatching<S>,
    candidates: impl Iterator<Item = FractionalMatching<S>>,
    rule: Rule,
    scope: Scope,
) -> Result<Verdict<S>, PopError> {
    check_inputs(inst, &[m])?;
    let mut worst: Option<(S, FractionalMatching<S>)> = None;
    let mut checked = 0;
    for n in candidates {
        checked += 1;
        let value = match rule {
            Rule::Feasible => feasible_value(inst, m, &n),
            Rule::Product => product_delta(inst, m, &n).value,
        };
        if value.is_negative() && worst.as_ref().is_none_or(|(w, _)| value < *w) {
            worst = Some((value, n));
        }
    }
    let counterexample = match worst {
        None => None,
        Some((_, n)) => {
            let delta = match rule {
                Rule::Feasible => delta_feasible(inst, m, &n)?,
                Rule::Product => delta_product(inst, m, &n)?,
            };
            Some(Counterexample { n, delta })
        }
    };
    Ok(Verdict { popular: counterexample.is_none(), scope, checked, counterexample })
}

fn half_matchings<S: Scalar>(
    inst: &Instance<S>,
    bound: usize,
) -> Result<impl Iterator<Item = FractionalMatching<S>> + '_, PopError> {
    Ok(enumerate_half_matchings(inst, bound)?.map(|h| h.into_fractional()))
}

/// `Δ(M, N) ≥ 0` for every half-matching `N`.
pub fn is_popular<S: Scalar>(inst: &Instance<S>, m: &FractionalMatching<S>, bound: usize) -> Result<Verdict<S>, PopError> {
    judge(inst, m, half_matchings(inst, bound)?, Rule::Feasible, Scope::HalfIntegral)
}

/// As [`is_popular`], comparing only with half-matchings accepted by `keep`.
pub fn is_popular_among<S: Scalar>(
    inst: &Instance<S>,
    m: &FractionalMatching<S>,
    bound: usize,
    keep: impl Fn(&FractionalMatching<S>) -> bool,
) -> Result<Verdict<S>, PopError> {
    judge(inst, m, half_matchings(inst, bound)?.filter(|n| keep(n)), Rule::Feasible, Scope::HalfIntegral)
}

/// As [`is_popular`], followed by `samples` random fractional `N` drawn
/// from a ChaCha8 stream seeded with `seed`.
pub fn is_popular_sampled<S: Scalar>(
    inst: &Instance<S>,
    m: &FractionalMatching<S>,
    bound: usize,
    samples: usize,
    seed: u64,
) -> Result<Verdict<S>, PopError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let random: Vec<_> = (0..samples).map(|_| random_fractional(inst, &mut rng)).collect();
    let candidates = half_matchings(inst, bound)?.chain(random);
    judge(inst, m, candidates, Rule::Feasible, Scope::Sampled { samples, seed })
}

/// Random fractional matching with values in multiples of 1/6: edges are
/// visited in random order and take a random share of the remaining room.
pub fn random_fractional<S: Scalar, R: Rng>(inst: &Instance<S>, rng: &mut R) -> FractionalMatching<S> {
    const DEN: i64 = 6;
    let mut room = vec![DEN; inst.num_vertices()];
    let mut values = vec![S::zero(); inst.num_edges()];
    let mut order: Vec<EdgeId> = inst.edge_ids().collect();
    order.shuffle(rng);
    for e in order {
        let [a, b] = inst.edge(e).ends;
        let cap = room[a.0].min(room[b.0]);
        let k = rng.gen_range(0..=cap);
        room[a.0] -= k;
        room[b.0] -= k;
        values[e.0] = S::from_ratio(k, DEN);
    }
    FractionalMatching::new(inst, values).expect("room keeps loads at most 1")
}

/// Popular mixed-matching test: the product pairing gives `Δ ≥ 0` against
/// every half-matching.
pub fn is_popular_mixed<S: Scalar>(
    inst: &Instance<S>,
    m: &FractionalMatching<S>,
    bound: usize,
) -> Result<Verdict<S>, PopError> {
    judge(inst, m, half_matchings(inst, bound)?, Rule::Product, Scope::HalfIntegral)
}

/// Popularity among half-matchings saturating `critical`. `M` itself must
/// saturate it.
pub fn is_popular_critical<S: Scalar>(
    inst: &Instance<S>,
    m: &FractionalMatching<S>,
    critical: &BTreeSet<VertexId>,
    bound: usize,
) -> Result<Verdict<S>, PopError> {
    check_inputs(inst, &[m])?;
    if let Some(v) = critical.iter().find(|v| !m.is_saturated(inst, **v)) {
        return Err(PopError::NotCritical(inst.vertex_name(*v).to_string()));
    }
    is_popular_among(inst, m, bound, |n| n.saturates_all(inst, critical))
}

#[cfg(test)]
mod tests;
