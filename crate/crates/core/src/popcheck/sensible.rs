//! Exact minimum of `Δ` over sensible pairings.
//!
//! The shared diagonal `φ_u(e, e) = φ_v(e, e)` couples the two endpoints of
//! every edge, so the minimum is one linear program over all vertices.

use crate::instance::{EdgeId, Instance};
use crate::lp::{minimize, Constraint, Relation};
use crate::matching::FractionalMatching;
use crate::scalar::{sum, Scalar};

use super::{check_inputs, sort_entries, vote, DeltaResult, PairEntry, Pairing, PairingKind, PopError};

/// Largest program [`delta_sensible`] will build.
pub const SENSIBLE_VAR_LIMIT: usize = 4000;

/// Minimum of `Δ(M, N, φ)` over sensible pairings `φ`.
///
/// Variables are `φ_v(x, y)` for `x ≠ y` plus one diagonal `t_e` per edge.
/// Rows with `M(e) = 0` and columns with `N(e) = 0` are dropped, as are the
/// `∅` row at an `M`-saturated vertex and the `∅` column at an
/// `N`-saturated one. `φ_v(∅, ∅)` has vote 0 and is omitted.
pub fn delta_sensible<S: Scalar>(
    inst: &Instance<S>,
    m: &FractionalMatching<S>,
    n: &FractionalMatching<S>,
) -> Result<DeltaResult<S>, PopError> {
    check_inputs(inst, &[m, n])?;
    let mut diag: Vec<Option<usize>> = vec![None; inst.num_edges()];
    let mut vars: Vec<(usize, Option<EdgeId>, Option<EdgeId>)> = Vec::new();
    let mut cost = Vec::new();
    for e in inst.edge_ids() {
        if m.value(e).is_positive() && n.value(e).is_positive() {
            diag[e.0] = Some(vars.len());
            vars.push((usize::MAX, Some(e), Some(e)));
            cost.push(S::zero());
        }
    }
    for v in inst.vertices() {
        let mut rows: Vec<Option<EdgeId>> = inst.incident(v).iter().filter(|e| m.value(**e).is_positive()).map(|e| Some(*e)).collect();
        if !m.is_saturated(inst, v) {
            rows.push(None);
        }
        let mut cols: Vec<Option<EdgeId>> = inst.incident(v).iter().filter(|e| n.value(**e).is_positive()).map(|e| Some(*e)).collect();
        if !n.is_saturated(inst, v) {
            cols.push(None);
        }
        for &x in &rows {
            for &y in &cols {
                if x == y {
                    continue;
                }
                vars.push((v.0, x, y));
                cost.push(S::from_int(vote(inst, v, x, y)? as i64));
            }
        }
        if vars.len() > SENSIBLE_VAR_LIMIT {
            return Err(PopError::TooLarge { vars: vars.len(), limit: SENSIBLE_VAR_LIMIT });
        }
    }

    let mut cons = Vec::new();
    for v in inst.vertices() {
        for &e in inst.incident(v) {
            for (is_row, total) in [(true, m.value(e)), (false, n.value(e))] {
                if !total.is_positive() {
                    continue;
                }
                let mut coeffs: Vec<(usize, S)> = vars
                    .iter()
                    .enumerate()
                    .filter(|(_, (w, x, y))| *w == v.0 && if is_row { *x == Some(e) } else { *y == Some(e) })
                    .map(|(k, _)| (k, S::one()))
                    .collect();
                if let Some(k) = diag[e.0] {
                    coeffs.push((k, S::one()));
                }
                cons.push(Constraint { coeffs, rel: Relation::Eq, rhs: total.clone() });
            }
        }
    }

    let (value, x) = minimize(vars.len(), &cost, &cons)
        .optimal()
        .expect("the product pairing is sensible, and votes are bounded");
    let mut per_vertex: Vec<Vec<PairEntry<S>>> = vec![Vec::new(); inst.num_vertices()];
    for (k, (w, from, to)) in vars.iter().enumerate() {
        if !x[k].is_positive() {
            continue;
        }
        if *w == usize::MAX {
            let e = from.unwrap();
            for end in inst.edge(e).ends {
                per_vertex[end.0].push(PairEntry { from: *from, to: *to, mass: x[k].clone() });
            }
        } else {
            per_vertex[*w].push(PairEntry { from: *from, to: *to, mass: x[k].clone() });
        }
    }
    for entries in per_vertex.iter_mut() {
        sort_entries(entries);
    }
    let witness = Pairing { kind: PairingKind::Sensible, per_vertex };
    let votes = witness.votes(inst);
    debug_assert!(sum(votes.iter()) == value);
    Ok(DeltaResult { value, witness, votes })
}
