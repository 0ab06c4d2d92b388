//! Stable half-matchings (stable partitions) of strict multigraphs, and the
//! brute-force oracles used to certify them.

mod oracle;
mod table;

use std::ops::Deref;

use thiserror::Error;

use crate::instance::{EdgeId, Instance, VertexId};
use crate::matching::{HalfComponent, HalfMatching};
use crate::scalar::Scalar;
use crate::stability::StabilityError;
use crate::Rational;

pub use oracle::{
    brute_force_max_stable, count_half_matchings, enumerate_half_matchings, HalfMatchings,
    DEFAULT_BOUND,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("vertex `{vertex}` ranks `{first}` and `{second}` equally")]
    Ties { vertex: String, first: String, second: String },
    #[error("instance has {edges} edges, above the enumeration bound {bound}")]
    BoundExceeded { edges: usize, bound: usize },
    #[error("no rotation can be eliminated from the reduced table")]
    Stuck,
    #[error(transparent)]
    Stability(#[from] StabilityError),
}

/// An instance whose valuations are injective at every vertex.
#[derive(Clone, Debug)]
pub struct StrictInstance<S = Rational>(Instance<S>);

impl<S: Scalar> StrictInstance<S> {
    pub fn new(inst: Instance<S>) -> Result<Self, EngineError> {
        for v in inst.vertices() {
            if let Some((a, b)) = inst.find_tie(v) {
                return Err(EngineError::Ties {
                    vertex: inst.vertex_name(v).to_string(),
                    first: inst.edge_name(a).to_string(),
                    second: inst.edge_name(b).to_string(),
                });
            }
        }
        Ok(StrictInstance(inst))
    }

    pub fn into_inner(self) -> Instance<S> {
        self.0
    }
}

impl<S> Deref for StrictInstance<S> {
    type Target = Instance<S>;

    fn deref(&self) -> &Instance<S> {
        &self.0
    }
}

/// A stable half-matching with its support split into value-1 edges, odd
/// cycles of 1/2-edges and any remaining (even) 1/2-components.
#[derive(Clone, Debug, PartialEq)]
pub struct StablePartitionCert<S = Rational> {
    pub matching: HalfMatching<S>,
    pub full: Vec<EdgeId>,
    pub odd_cycles: Vec<HalfComponent>,
    pub even_components: Vec<HalfComponent>,
}

impl<S: Scalar> StablePartitionCert<S> {
    /// Vertices covered by each part, for disjointness checks.
    pub fn covered(&self, inst: &Instance<S>) -> Vec<VertexId> {
        let mut out: Vec<VertexId> = self.full.iter().flat_map(|e| inst.edge(*e).ends).collect();
        for c in self.odd_cycles.iter().chain(&self.even_components) {
            out.extend(&c.vertices);
        }
        out
    }
}

/// Stable half-matching of a strict instance. Deterministic: proposals and
/// rotations are processed in vertex order.
pub fn stable_half_matching<S: Scalar>(inst: &StrictInstance<S>) -> Result<StablePartitionCert<S>, EngineError> {
    let ends: Vec<[usize; 2]> = inst.edges().iter().map(|e| [e.ends[0].0, e.ends[1].0]).collect();
    let lists: Vec<Vec<usize>> = inst.vertices().map(|v| inst.ranked(v).into_iter().map(|e| e.0).collect()).collect();
    let units = table::solve(inst.num_vertices(), ends, lists)?;
    let half = S::half();
    let values: Vec<S> = units
        .iter()
        .map(|u| match u {
            0 => S::zero(),
            1 => half.clone(),
            _ => S::one(),
        })
        .collect();
    let matching = HalfMatching::new(inst, values).expect("engine output is a half-matching");
    let d = matching.decompose(inst);
    assert!(d.paths.is_empty(), "engine produced a path of 1/2-edges");
    let (odd_cycles, even_components) = d.cycles.into_iter().partition(|c| c.is_odd_cycle());
    Ok(StablePartitionCert { matching, full: d.full, odd_cycles, even_components })
}
