//! Blocking edges under weak and γ-stability.

use thiserror::Error;

use crate::instance::{EdgeId, Instance};
use crate::matching::{assigned_value, FractionalMatching};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BlockingMode {
    /// `M(e) < 1` and both endpoints strictly prefer `e` to their assigned value.
    Weak,
    /// Improvement of at least `γ` at one endpoint and `δ` at the other.
    Gamma,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StabilityError {
    #[error("edge `{edge}` has no gamma/delta at `{vertex}`")]
    MissingThresholds { edge: String, vertex: String },
}

/// Whether `e` blocks `m` under `mode`.
pub fn blocks<S: Scalar>(
    inst: &Instance<S>,
    m: &FractionalMatching<S>,
    e: EdgeId,
    mode: BlockingMode,
) -> Result<bool, StabilityError> {
    let [u, v] = inst.edge(e).ends;
    let gain_u = inst.pref(u, e).clone() - assigned_value(inst, u, m);
    let gain_v = inst.pref(v, e).clone() - assigned_value(inst, v, m);
    match mode {
        BlockingMode::Weak => {
            Ok(*m.value(e) < S::one() && gain_u.is_positive() && gain_v.is_positive())
        }
        BlockingMode::Gamma => {
            let missing = |x| StabilityError::MissingThresholds {
                edge: inst.edge_name(e).to_string(),
                vertex: inst.vertex_name(x).to_string(),
            };
            let tu = inst.thresholds(e, u).ok_or_else(|| missing(u))?;
            let tv = inst.thresholds(e, v).ok_or_else(|| missing(v))?;
            let first = gain_u.clone() >= tu.gamma && gain_v.clone() >= tv.delta;
            let second = gain_u >= tu.delta && gain_v >= tv.gamma;
            Ok(first || second)
        }
    }
}

/// All edges blocking `m`, in edge order. Empty iff `m` is stable in `mode`.
pub fn blocking_edges<S: Scalar>(
    inst: &Instance<S>,
    m: &FractionalMatching<S>,
    mode: BlockingMode,
) -> Result<Vec<EdgeId>, StabilityError> {
    let mut out = Vec::new();
    for e in inst.edge_ids() {
        if blocks(inst, m, e, mode)? {
            out.push(e);
        }
    }
    Ok(out)
}

pub fn is_stable<S: Scalar>(
    inst: &Instance<S>,
    m: &FractionalMatching<S>,
    mode: BlockingMode,
) -> Result<bool, StabilityError> {
    for e in inst.edge_ids() {
        if blocks(inst, m, e, mode)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::Rational64 as Q;

    #[test]
    fn empty_matching_blocked_by_single_edge() {
        let inst = fixtures::single_edge::<Q>();
        let m = FractionalMatching::empty(&inst);
        assert_eq!(blocking_edges(&inst, &m, BlockingMode::Weak).unwrap(), vec![EdgeId(0)]);
    }

    #[test]
    fn saturated_edge_does_not_block() {
        let inst = fixtures::single_edge::<Q>();
        let m = FractionalMatching::from_named(&inst, &[("e", Q::from_integer(1))]).unwrap();
        assert!(blocking_edges(&inst, &m, BlockingMode::Weak).unwrap().is_empty());
    }

    #[test]
    fn triangle_single_edge_is_blocked() {
        let inst = fixtures::fix_b::<Q>();
        let m = FractionalMatching::from_named(&inst, &[("v1v2", Q::from_integer(1))]).unwrap();
        let b = blocking_edges(&inst, &m, BlockingMode::Weak).unwrap();
        assert_eq!(b, vec![inst.edge_id("v2v3").unwrap()]);
    }

    #[test]
    fn triangle_all_halves_is_stable() {
        let inst = fixtures::fix_b::<Q>();
        let h = Q::new(1, 2);
        let m = FractionalMatching::from_named(&inst, &[("v1v2", h), ("v2v3", h), ("v1v3", h)])
            .unwrap();
        assert!(is_stable(&inst, &m, BlockingMode::Weak).unwrap());
    }

    #[test]
    fn gamma_mode_needs_thresholds() {
        let inst = fixtures::single_edge::<Q>();
        let m = FractionalMatching::empty(&inst);
        assert!(matches!(
            blocking_edges(&inst, &m, BlockingMode::Gamma),
            Err(StabilityError::MissingThresholds { .. })
        ));
    }

    #[test]
    fn gamma_mode_requires_large_enough_gain() {
        let raw = crate::RawInstance::<Q>::new()
            .vertices(["a", "b"])
            .edge("e", "a", "b")
            .pref("a", "e", Q::from_integer(1))
            .pref("b", "e", Q::from_integer(1))
            .thresholds("e", "a", Q::new(1, 2), Q::from_integer(2))
            .thresholds("e", "b", Q::new(1, 2), Q::from_integer(2));
        let inst = raw.validate().unwrap();
        let m = FractionalMatching::empty(&inst);
        // gain is 1 at both ends; neither reaches delta = 2
        assert!(blocking_edges(&inst, &m, BlockingMode::Gamma).unwrap().is_empty());
        assert_eq!(blocking_edges(&inst, &m, BlockingMode::Weak).unwrap().len(), 1);
    }
}
