//! End-to-end pipelines: reduce, find a stable half-matching of the derived
//! instance, re-check it, project.

mod dual;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::engine::{stable_half_matching, EngineError, StrictInstance};
use crate::instance::{EdgeId, Instance, VertexId};
use crate::matching::HalfMatching;
use crate::reductions::{
    build_crit_reduction, build_gamma_reduction, build_pri_reduction, build_srti_reduction, DerivedInstance,
    ReductionError,
};
use crate::scalar::Scalar;
use crate::stability::{is_stable, BlockingMode};

pub use dual::{max_weight_dual, weighted_size, DualSolution};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Reduction(#[from] ReductionError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("no fractional matching saturates the critical set")]
    CriticalInfeasible,
    #[error("internal check failed: {0}")]
    Internal(String),
}

fn run_pipeline<S: Scalar>(inst: &Instance<S>, derived: &DerivedInstance<S>) -> Result<HalfMatching<S>, SolveError> {
    let cert = stable_half_matching(derived.instance())?;
    if !is_stable(derived.instance(), &cert.matching, BlockingMode::Weak).expect("weak mode needs no thresholds") {
        return Err(SolveError::Internal("derived half-matching has a blocking edge".into()));
    }
    Ok(derived.project(inst, &cert.matching)?)
}

/// Weakly stable half-matching within 3/2 of the largest one (three-copy
/// reduction). Ties are allowed.
pub fn solve_max_srti<S: Scalar>(inst: &Instance<S>) -> Result<HalfMatching<S>, SolveError> {
    run_pipeline(inst, &build_srti_reduction(inst))
}

/// γ-stable half-matching within 3/2 of the largest one (four-copy
/// reduction). Needs thresholds on every (edge, endpoint).
pub fn solve_max_gamma<S: Scalar>(inst: &Instance<S>) -> Result<HalfMatching<S>, SolveError> {
    run_pipeline(inst, &build_gamma_reduction(inst)?)
}

/// Largest popular half-matching of a strict instance (two-copy reduction).
pub fn solve_max_pri<S: Scalar>(inst: &Instance<S>) -> Result<HalfMatching<S>, SolveError> {
    run_pipeline(inst, &build_pri_reduction(inst)?)
}

/// Whether some fractional matching saturates `critical`: a maximum
/// assignment on the double cover must cover both copies of every critical
/// vertex.
pub fn critical_feasible<S: Scalar>(inst: &Instance<S>, critical: &BTreeSet<VertexId>) -> bool {
    let score = |e: EdgeId| {
        let [a, b] = inst.edge(e).ends;
        S::from_int(critical.contains(&a) as i64 + critical.contains(&b) as i64)
    };
    let (chosen, _, _) = dual::cover_assignment(inst, &score);
    let total: i64 = chosen
        .iter()
        .map(|c| {
            let [a, b] = inst.edge(EdgeId(c.0 / 2)).ends;
            critical.contains(&a) as i64 + critical.contains(&b) as i64
        })
        .sum();
    total == 2 * critical.len() as i64
}

/// Popular half-matching among those saturating `critical` (level-copy
/// reduction). Fails before running the pipeline if `critical` cannot be
/// saturated.
pub fn solve_pop_crit<S: Scalar>(inst: &Instance<S>, critical: &BTreeSet<VertexId>) -> Result<HalfMatching<S>, SolveError> {
    StrictInstance::new(inst.clone())?;
    if !critical_feasible(inst, critical) {
        return Err(SolveError::CriticalInfeasible);
    }
    let m = run_pipeline(inst, &build_crit_reduction(inst, critical)?)?;
    if let Some(v) = critical.iter().find(|v| !m.is_saturated(inst, **v)) {
        return Err(SolveError::Internal(format!("critical vertex `{}` left unsaturated", inst.vertex_name(*v))));
    }
    Ok(m)
}

/// Popular half-matching among maximum-weight fractional matchings: restrict
/// to tight edges of an optimal dual and saturate its positive vertices.
/// Missing weights count as 0.
pub fn solve_pop_maxw<S: Scalar>(inst: &Instance<S>) -> Result<HalfMatching<S>, SolveError> {
    StrictInstance::new(inst.clone())?;
    let dual = max_weight_dual(inst);
    let (tight, back) = inst.restrict_edges(&dual.tight_edges);
    let m = solve_pop_crit(&tight, &dual.critical)?;
    let mut values = vec![S::zero(); inst.num_edges()];
    for (i, e) in back.iter().enumerate() {
        values[e.0] = m.value(EdgeId(i)).clone();
    }
    let m = HalfMatching::new(inst, values).expect("restriction preserves degrees");
    if weighted_size(inst, &m) != dual.objective {
        return Err(SolveError::Internal("output weight differs from the LP optimum".into()));
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{fixtures, RawInstance};
    use crate::Rational64 as Q;

    fn q(n: i64) -> Q {
        Q::from_integer(n)
    }

    #[test]
    fn srti_examples() {
        let inst = fixtures::single_edge::<Q>();
        assert_eq!(solve_max_srti(&inst).unwrap().values(), [q(1)]);

        let inst = fixtures::tied_path4::<Q>();
        let m = solve_max_srti(&inst).unwrap();
        assert_eq!(m.size(), q(2));
        assert_eq!(*m.value(inst.edge_id("ab").unwrap()), q(1));
        assert_eq!(*m.value(inst.edge_id("cd").unwrap()), q(1));

        let inst = fixtures::fix_b::<Q>();
        let m = solve_max_srti(&inst).unwrap();
        assert!(m.values().iter().all(|x| *x == Q::new(1, 2)));
    }

    #[test]
    fn gamma_single_edge() {
        let inst = RawInstance::<Q>::new()
            .vertices(["a", "b"])
            .edge("e", "a", "b")
            .pref("a", "e", q(1))
            .pref("b", "e", q(1))
            .thresholds("e", "a", Q::new(1, 4), Q::new(1, 2))
            .thresholds("e", "b", Q::new(1, 4), Q::new(1, 2))
            .validate()
            .unwrap();
        assert_eq!(solve_max_gamma(&inst).unwrap().values(), [q(1)]);
        assert!(matches!(
            solve_max_gamma(&fixtures::single_edge::<Q>()),
            Err(SolveError::Reduction(ReductionError::MissingThresholds { .. }))
        ));
    }

    #[test]
    fn pri_examples() {
        assert_eq!(solve_max_pri(&fixtures::single_edge::<Q>()).unwrap().values(), [q(1)]);
        let inst = fixtures::path3::<Q>();
        let m = solve_max_pri(&inst).unwrap();
        assert_eq!(*m.value(inst.edge_id("ab").unwrap()), q(1));
        assert_eq!(m.size(), q(1));
        let m = solve_max_pri(&fixtures::fix_a::<Q>()).unwrap();
        assert_eq!(m.size(), q(2));
    }

    #[test]
    fn pop_crit_examples() {
        let inst = fixtures::single_edge::<Q>();
        assert_eq!(solve_pop_crit(&inst, &BTreeSet::new()).unwrap().values(), [q(1)]);

        let inst = fixtures::path3::<Q>();
        let c: BTreeSet<_> = [inst.vertex_id("c").unwrap()].into();
        let m = solve_pop_crit(&inst, &c).unwrap();
        assert!(m.is_saturated(&inst, inst.vertex_id("c").unwrap()));
        assert_eq!(*m.value(inst.edge_id("bc").unwrap()), q(1));

        let star = RawInstance::<Q>::new()
            .vertices(["m", "x", "y"])
            .edge("mx", "m", "x")
            .edge("my", "m", "y")
            .strict("m", &["mx", "my"])
            .strict("x", &["mx"])
            .strict("y", &["my"])
            .validate()
            .unwrap();
        let c: BTreeSet<_> = [star.vertex_id("x").unwrap(), star.vertex_id("y").unwrap()].into();
        assert_eq!(solve_pop_crit(&star, &c), Err(SolveError::CriticalInfeasible));
    }

    #[test]
    fn pop_maxw_examples() {
        let inst = fixtures::single_edge::<Q>().to_raw().weight("e", q(1)).validate().unwrap();
        let m = solve_pop_maxw(&inst).unwrap();
        assert_eq!(m.values(), [q(1)]);

        let inst = RawInstance::<Q>::new()
            .vertices(["a", "b"])
            .edge("heavy", "a", "b")
            .edge("light", "a", "b")
            .strict("a", &["light", "heavy"])
            .strict("b", &["light", "heavy"])
            .weight("heavy", q(2))
            .weight("light", q(1))
            .validate()
            .unwrap();
        let m = solve_pop_maxw(&inst).unwrap();
        assert_eq!(*m.value(inst.edge_id("heavy").unwrap()), q(1));
        assert_eq!(weighted_size(&inst, &m), q(2));

        let raw = fixtures::fix_b::<Q>().to_raw().weight("v1v2", q(1)).weight("v2v3", q(1)).weight("v1v3", q(1));
        let inst = raw.validate().unwrap();
        let m = solve_pop_maxw(&inst).unwrap();
        assert!(m.values().iter().all(|x| *x == Q::new(1, 2)));
        assert_eq!(weighted_size(&inst, &m), Q::new(3, 2));
    }
}
