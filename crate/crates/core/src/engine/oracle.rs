//! Exhaustive enumeration of half-matchings.

use crate::instance::Instance;
use crate::matching::HalfMatching;
use crate::scalar::Scalar;
use crate::stability::{is_stable, BlockingMode};

use super::EngineError;

/// Default limit on the number of edges for enumeration.
pub const DEFAULT_BOUND: usize = 12;

/// Every half-matching of an instance, as half-units per edge (0, 1, 2),
/// in lexicographic order with the first edge most significant.
#[derive(Clone, Debug)]
pub struct HalfMatchings {
    ends: Vec<[usize; 2]>,
    units: Vec<u8>,
    load: Vec<u8>,
    started: bool,
}

impl HalfMatchings {
    pub fn new<S: Scalar>(inst: &Instance<S>) -> Self {
        HalfMatchings {
            ends: inst.edges().iter().map(|e| [e.ends[0].0, e.ends[1].0]).collect(),
            units: vec![0; inst.num_edges()],
            load: vec![0; inst.num_vertices()],
            started: false,
        }
    }
}

impl Iterator for HalfMatchings {
    type Item = Vec<u8>;

    fn next(&mut self) -> Option<Vec<u8>> {
        if !self.started {
            self.started = true;
            return Some(self.units.clone());
        }
        for k in (0..self.units.len()).rev() {
            let [a, b] = self.ends[k];
            if self.units[k] < 2 && self.load[a] < 2 && self.load[b] < 2 {
                self.units[k] += 1;
                self.load[a] += 1;
                self.load[b] += 1;
                return Some(self.units.clone());
            }
            self.load[a] -= self.units[k];
            self.load[b] -= self.units[k];
            self.units[k] = 0;
        }
        self.units.clear();
        self.ends.clear();
        None
    }
}

fn to_matching<S: Scalar>(inst: &Instance<S>, units: &[u8]) -> HalfMatching<S> {
    let half = S::half();
    let values = units
        .iter()
        .map(|u| match u {
            0 => S::zero(),
            1 => half.clone(),
            _ => S::one(),
        })
        .collect();
    HalfMatching::new(inst, values).expect("enumerated values respect degree bounds")
}

fn check_bound<S: Scalar>(inst: &Instance<S>, bound: usize) -> Result<(), EngineError> {
    if inst.num_edges() > bound {
        return Err(EngineError::BoundExceeded { edges: inst.num_edges(), bound });
    }
    Ok(())
}

/// All half-matchings of `inst` in canonical order. Fails when the
/// instance has more than `bound` edges.
pub fn enumerate_half_matchings<S: Scalar>(
    inst: &Instance<S>,
    bound: usize,
) -> Result<impl Iterator<Item = HalfMatching<S>> + '_, EngineError> {
    check_bound(inst, bound)?;
    Ok(HalfMatchings::new(inst).map(move |u| to_matching(inst, &u)))
}

pub fn count_half_matchings<S: Scalar>(inst: &Instance<S>, bound: usize) -> Result<usize, EngineError> {
    check_bound(inst, bound)?;
    Ok(HalfMatchings::new(inst).count())
}

/// Largest stable half-matching by exhaustive search; the first maximum in
/// canonical order is returned as witness.
pub fn brute_force_max_stable<S: Scalar>(
    inst: &Instance<S>,
    mode: BlockingMode,
    bound: usize,
) -> Result<(S, HalfMatching<S>), EngineError> {
    check_bound(inst, bound)?;
    let mut best: Option<(u32, Vec<u8>)> = None;
    for units in HalfMatchings::new(inst) {
        let size: u32 = units.iter().map(|u| *u as u32).sum();
        if best.as_ref().is_some_and(|(b, _)| size <= *b) {
            continue;
        }
        if is_stable(inst, &to_matching(inst, &units), mode)? {
            best = Some((size, units));
        }
    }
    let (_, units) = best.expect("a stable half-matching always exists");
    let m = to_matching(inst, &units);
    Ok((m.size(), m))
}
