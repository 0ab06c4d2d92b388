use super::*;
use crate::engine::DEFAULT_BOUND;
use crate::matching::HalfMatching;
use crate::{fixtures, RawInstance};
use crate::Rational64 as Q;

fn q(n: i64) -> Q {
    Q::from_integer(n)
}

fn fix_a_pair() -> (Instance<Q>, FractionalMatching<Q>, FractionalMatching<Q>) {
    let inst = fixtures::fix_a::<Q>();
    let h = Q::new(1, 2);
    let m = FractionalMatching::from_named(&inst, &[("u1w1", h), ("u1w2", h), ("u2w1", h), ("u2w2", h)]).unwrap();
    let n = FractionalMatching::from_named(&inst, &[("u1w1", q(1)), ("u2w2", h), ("u3w2", h)]).unwrap();
    (inst, m, n)
}

fn id(inst: &Instance<Q>, name: &str) -> VertexId {
    inst.vertex_id(name).unwrap()
}

fn eid(inst: &Instance<Q>, name: &str) -> EdgeId {
    inst.edge_id(name).unwrap()
}

#[test]
fn votes() {
    let inst = fixtures::fix_a::<Q>();
    let w2 = id(&inst, "w2");
    let (a, b) = (eid(&inst, "u2w2"), eid(&inst, "u3w2"));
    assert_eq!(vote(&inst, w2, Some(a), Some(a)).unwrap(), 0);
    assert_eq!(vote(&inst, w2, Some(a), None).unwrap(), 1);
    assert_eq!(vote(&inst, w2, None, Some(a)).unwrap(), -1);
    assert_eq!(vote(&inst, w2, Some(a), Some(b)).unwrap(), 1);
    assert_eq!(vote(&inst, w2, Some(b), Some(a)).unwrap(), -1);
    assert!(matches!(
        vote(&inst, w2, Some(eid(&inst, "u1w1")), None),
        Err(PopError::NotIncident { .. })
    ));
}

#[test]
fn fix_a_feasible_delta() {
    let (inst, m, n) = fix_a_pair();
    let d = delta_feasible(&inst, &m, &n).unwrap();
    let h = Q::new(1, 2);
    assert_eq!(d.value, -h);
    assert_eq!(d.votes, vec![-h, h, -h, -h, h]);
    d.witness.check(&inst, &m, &n).unwrap();
    assert_eq!(d.witness.delta(&inst), d.value);
    assert_eq!(delta_feasible_value(&inst, &m, &n).unwrap(), -h);
}

#[test]
fn fix_a_sensible_and_product() {
    let (inst, m, n) = fix_a_pair();
    let s = delta_sensible(&inst, &m, &n).unwrap();
    s.witness.check(&inst, &m, &n).unwrap();
    assert!(s.value <= Q::new(-1, 2));
    let lifted = delta_feasible(&inst, &m, &n).unwrap().witness.to_sensible(&inst, &m, &n);
    lifted.check(&inst, &m, &n).unwrap();
    assert_eq!(lifted.delta(&inst), Q::new(-1, 2));

    let p = delta_product(&inst, &m, &n).unwrap();
    p.witness.check(&inst, &m, &n).unwrap();
    // the product pairing is sensible as well
    let as_sensible = Pairing { kind: PairingKind::Sensible, per_vertex: p.witness.per_vertex.clone() };
    as_sensible.check(&inst, &m, &n).unwrap();
    assert!(s.value <= p.value);
}

#[test]
fn trivial_deltas() {
    let inst = fixtures::single_edge::<Q>();
    let full = FractionalMatching::from_named(&inst, &[("e", q(1))]).unwrap();
    let empty = FractionalMatching::empty(&inst);
    assert_eq!(delta_feasible(&inst, &full, &full).unwrap().value, q(0));
    assert_eq!(delta_feasible(&inst, &full, &empty).unwrap().value, q(2));
    assert_eq!(delta_feasible(&inst, &empty, &full).unwrap().value, q(-2));
    assert_eq!(delta_sensible(&inst, &full, &full).unwrap().value, q(0));
}

#[test]
fn popularity_examples() {
    let inst = fixtures::single_edge::<Q>();
    let full = FractionalMatching::from_named(&inst, &[("e", q(1))]).unwrap();
    let empty = FractionalMatching::empty(&inst);
    assert!(is_popular(&inst, &full, DEFAULT_BOUND).unwrap().popular);
    let v = is_popular(&inst, &empty, DEFAULT_BOUND).unwrap();
    assert!(!v.popular);
    let c = v.counterexample.unwrap();
    assert_eq!(c.delta.value, q(-2));
    assert_eq!(c.n.values(), [q(1)]);
    assert!(is_popular_mixed(&inst, &full, DEFAULT_BOUND).unwrap().popular);
    assert!(!is_popular_mixed(&inst, &empty, DEFAULT_BOUND).unwrap().popular);
}

#[test]
fn fix_a_verdicts() {
    let (inst, m, n) = fix_a_pair();
    assert!(is_popular_mixed(&inst, &m, DEFAULT_BOUND).unwrap().popular);
    let v = is_popular(&inst, &m, DEFAULT_BOUND).unwrap();
    assert!(!v.popular);
    let c = v.counterexample.unwrap();
    assert_eq!(c.delta.value, Q::new(-1, 2));
    // the hand-picked N attains the minimum
    assert_eq!(delta_feasible_value(&inst, &m, &n).unwrap(), c.delta.value);
}

#[test]
fn critical_verdicts() {
    let inst = fixtures::path3::<Q>();
    let c: BTreeSet<_> = [id(&inst, "c")].into();
    let m = FractionalMatching::from_named(&inst, &[("bc", q(1))]).unwrap();
    let v = is_popular_critical(&inst, &m, &c, DEFAULT_BOUND).unwrap();
    assert!(v.popular);
    assert_eq!(v.checked, 1);
    let other = FractionalMatching::from_named(&inst, &[("ab", q(1))]).unwrap();
    assert_eq!(is_popular_critical(&inst, &other, &c, DEFAULT_BOUND), Err(PopError::NotCritical("c".into())));

    let plain = is_popular(&inst, &m, DEFAULT_BOUND).unwrap();
    let none = is_popular_critical(&inst, &m, &BTreeSet::new(), DEFAULT_BOUND).unwrap();
    assert_eq!(plain, none);
}

#[test]
fn ties_and_bounds_rejected() {
    let inst = fixtures::tied_path4::<Q>();
    let m = FractionalMatching::empty(&inst);
    assert!(matches!(is_popular(&inst, &m, DEFAULT_BOUND), Err(PopError::Ties { .. })));
    let inst = fixtures::fix_a::<Q>();
    let m = FractionalMatching::empty(&inst);
    assert_eq!(is_popular(&inst, &m, 3), Err(PopError::BoundExceeded { edges: 5, bound: 3 }));
}

#[test]
fn sampled_scope_extends_half_integral() {
    let inst = fixtures::fix_b::<Q>();
    let m = HalfMatching::from_named(&inst, &[("v1v2", Q::new(1, 2)), ("v2v3", Q::new(1, 2)), ("v1v3", Q::new(1, 2))])
        .unwrap();
    let half = is_popular(&inst, &m, DEFAULT_BOUND).unwrap();
    let sampled = is_popular_sampled(&inst, &m, DEFAULT_BOUND, 50, 7).unwrap();
    assert_eq!(sampled.checked, half.checked + 50);
    assert_eq!(sampled.scope, Scope::Sampled { samples: 50, seed: 7 });
    assert_eq!(sampled, is_popular_sampled(&inst, &m, DEFAULT_BOUND, 50, 7).unwrap());
}

#[test]
fn parallel_edges_vote_separately() {
    let inst = RawInstance::<Q>::new()
        .vertices(["a", "b"])
        .edge("x", "a", "b")
        .edge("y", "a", "b")
        .strict("a", &["x", "y"])
        .strict("b", &["y", "x"])
        .validate()
        .unwrap();
    let mx = FractionalMatching::from_named(&inst, &[("x", q(1))]).unwrap();
    let my = FractionalMatching::from_named(&inst, &[("y", q(1))]).unwrap();
    let d = delta_feasible(&inst, &mx, &my).unwrap();
    assert_eq!(d.votes, vec![q(1), q(-1)]);
    assert_eq!(d.value, q(0));
}
