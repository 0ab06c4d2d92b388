mod common;

use std::cmp::Ordering;

use common::{random_instance, Shape};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use roommates_core::lp::{minimize, Constraint, Relation};
use roommates_core::stability::{is_stable, BlockingMode};
use roommates_core::{
    delta_feasible, delta_feasible_value, delta_sensible, enumerate_half_matchings, is_popular, min_cost_transport,
    vote, EdgeId, FractionalMatching, Instance, PairingKind, Rational64 as Q, VertexId,
};

fn q(n: i64) -> Q {
    Q::from_integer(n)
}

/// Vote from raw valuations.
fn naive_vote(inst: &Instance<Q>, v: VertexId, x: Option<EdgeId>, y: Option<EdgeId>) -> i64 {
    let val = |z: Option<EdgeId>| z.map_or(*inst.empty_value(v), |e| *inst.pref(v, e));
    match val(x).cmp(&val(y)) {
        Ordering::Greater => 1,
        Ordering::Less => -1,
        Ordering::Equal => 0,
    }
}

/// Feasible-pairing minimum as one program over every `φ_v(x, y)`,
/// diagonals and `(∅, ∅)` included.
fn monolithic_delta(inst: &Instance<Q>, m: &FractionalMatching<Q>, n: &FractionalMatching<Q>) -> Q {
    let mut vars = Vec::new();
    let mut cost = Vec::new();
    for v in inst.vertices() {
        let items: Vec<Option<EdgeId>> = inst.incident(v).iter().map(|e| Some(*e)).chain([None]).collect();
        for &x in &items {
            for &y in &items {
                vars.push((v, x, y));
                cost.push(q(naive_vote(inst, v, x, y)));
            }
        }
    }
    let mut cons = Vec::new();
    let load = |f: &FractionalMatching<Q>, v: VertexId| inst.incident(v).iter().map(|e| *f.value(*e)).sum::<Q>();
    let pos = |x: Q| if x > q(0) { x } else { q(0) };
    for v in inst.vertices() {
        let items: Vec<Option<EdgeId>> = inst.incident(v).iter().map(|e| Some(*e)).chain([None]).collect();
        for &z in &items {
            let (row_total, col_total) = match z {
                Some(e) => (pos(*m.value(e) - *n.value(e)), pos(*n.value(e) - *m.value(e))),
                None => (pos(load(n, v) - load(m, v)), pos(load(m, v) - load(n, v))),
            };
            let row = vars.iter().enumerate().filter(|(_, (w, x, _))| *w == v && *x == z).map(|(k, _)| (k, q(1)));
            cons.push(Constraint { coeffs: row.collect(), rel: Relation::Eq, rhs: row_total });
            let col = vars.iter().enumerate().filter(|(_, (w, _, y))| *w == v && *y == z).map(|(k, _)| (k, q(1)));
            cons.push(Constraint { coeffs: col.collect(), rel: Relation::Eq, rhs: col_total });
        }
    }
    minimize(vars.len(), &cost, &cons).optimal().expect("feasible pairings exist").0
}

fn small_strict(seed: u64, max_edges: usize) -> Instance<Q> {
    random_instance(seed, &Shape::strict(2 + seed as usize % 4, max_edges))
}

#[test]
fn vote_is_antisymmetric_and_matches_valuations() {
    for seed in 0..200 {
        let inst = small_strict(seed, 8);
        for v in inst.vertices() {
            let items: Vec<Option<EdgeId>> = inst.incident(v).iter().map(|e| Some(*e)).chain([None]).collect();
            for &x in &items {
                for &y in &items {
                    let a = vote(&inst, v, x, y).unwrap();
                    assert_eq!(a, -vote(&inst, v, y, x).unwrap());
                    assert_eq!(a as i64, naive_vote(&inst, v, x, y));
                }
            }
        }
    }
}

#[test]
fn feasible_delta_matches_monolithic_program() {
    let mut pairs = 0;
    for seed in 0..60 {
        let inst = small_strict(seed, 5);
        let all: Vec<_> = enumerate_half_matchings(&inst, 5).unwrap().map(|h| h.into_fractional()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..20 {
            let m = &all[rng.gen_range(0..all.len())];
            let n = &all[rng.gen_range(0..all.len())];
            let d = delta_feasible(&inst, m, n).unwrap();
            assert_eq!(d.value, monolithic_delta(&inst, m, n), "seed {seed}");
            assert_eq!(d.value, delta_feasible_value(&inst, m, n).unwrap());
            assert_eq!(d.witness.kind, PairingKind::Feasible);
            d.witness.check(&inst, m, n).unwrap();
            assert_eq!(d.witness.delta(&inst), d.value);
            assert_eq!(d.votes.iter().sum::<Q>(), d.value);
            pairs += 1;
        }
    }
    assert!(pairs >= 1000);
}

#[test]
fn feasible_delta_on_random_fractional_pairs() {
    for seed in 0..200 {
        let inst = small_strict(seed, 6);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = roommates_core::popcheck::random_fractional(&inst, &mut rng);
        let n = roommates_core::popcheck::random_fractional(&inst, &mut rng);
        let d = delta_feasible(&inst, &m, &n).unwrap();
        assert_eq!(d.value, monolithic_delta(&inst, &m, &n), "seed {seed}");
        // swapping roles transposes pairings and negates votes, so the
        // swapped minimum is minus a maximum
        let r = delta_feasible(&inst, &n, &m).unwrap();
        assert!(r.value <= -d.value, "seed {seed}");
    }
}

#[test]
fn integral_comparisons_are_antisymmetric() {
    for seed in 0..100 {
        let inst = small_strict(seed, 6);
        let integral: Vec<_> =
            enumerate_half_matchings(&inst, 6).unwrap().filter(|m| m.is_integral()).map(|h| h.into_fractional()).collect();
        for m in &integral {
            for n in &integral {
                let a = delta_feasible(&inst, m, n).unwrap();
                let b = delta_feasible(&inst, n, m).unwrap();
                let neg: Vec<Q> = b.votes.iter().map(|x| -x).collect();
                assert_eq!(a.votes, neg, "seed {seed}");
            }
        }
    }
}

#[test]
fn sensible_minimum_is_at_most_feasible_minimum() {
    let mut pairs = 0;
    for seed in 0..40 {
        let inst = small_strict(seed, 4);
        let all: Vec<_> = enumerate_half_matchings(&inst, 4).unwrap().map(|h| h.into_fractional()).collect();
        for m in &all {
            for n in &all {
                let s = delta_sensible(&inst, m, n).unwrap();
                let f = delta_feasible_value(&inst, m, n).unwrap();
                assert!(s.value <= f, "seed {seed}");
                s.witness.check(&inst, m, n).unwrap();
                assert_eq!(s.witness.delta(&inst), s.value);
                pairs += 1;
            }
            assert!(delta_sensible(&inst, m, m).unwrap().value <= q(0));
        }
    }
    assert!(pairs >= 1000);
}

/// Vertices of the transportation polytope: plans whose support is a
/// forest, obtained by peeling leaves.
fn basic_plans(supply: &[Q], demand: &[Q]) -> Vec<Vec<Vec<Q>>> {
    let (r, c) = (supply.len(), demand.len());
    let cells = r * c;
    let mut out = Vec::new();
    for mask in 0u32..(1 << cells) {
        let k = mask.count_ones() as usize;
        if k + 1 > r + c {
            continue;
        }
        // acyclic support
        let mut parent: Vec<usize> = (0..r + c).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            if p[x] != x {
                let root = find(p, p[x]);
                p[x] = root;
            }
            p[x]
        }
        let mut forest = true;
        for cell in 0..cells {
            if mask >> cell & 1 == 1 {
                let (a, b) = (find(&mut parent, cell / c), find(&mut parent, r + cell % c));
                if a == b {
                    forest = false;
                    break;
                }
                parent[a] = b;
            }
        }
        if !forest {
            continue;
        }
        let mut plan = vec![vec![q(0); c]; r];
        let mut open: Vec<usize> = (0..cells).filter(|cell| mask >> cell & 1 == 1).collect();
        let mut rows = supply.to_vec();
        let mut cols = demand.to_vec();
        while !open.is_empty() {
            let leaf = open.iter().position(|&cell| {
                open.iter().filter(|&&o| o / c == cell / c).count() == 1 || open.iter().filter(|&&o| o % c == cell % c).count() == 1
            });
            let Some(at) = leaf else { break };
            let cell = open.remove(at);
            let (i, j) = (cell / c, cell % c);
            let x = if open.iter().all(|&o| o / c != i) { rows[i] } else { cols[j] };
            plan[i][j] = x;
            rows[i] -= x;
            cols[j] -= x;
        }
        let ok = open.is_empty()
            && rows.iter().chain(&cols).all(|x| *x == q(0))
            && plan.iter().flatten().all(|x| *x >= q(0));
        if ok && !out.contains(&plan) {
            out.push(plan);
        }
    }
    out
}

#[test]
fn transport_matches_exhaustive_vertex_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    for rows in 1..=4 {
        for cols in 1..=4 {
            for _ in 0..12 {
                let den = rng.gen_range(1..=4);
                let mut supply: Vec<Q> = (0..rows).map(|_| Q::new(rng.gen_range(0..=4), den)).collect();
                let mut demand: Vec<Q> = (0..cols).map(|_| Q::new(rng.gen_range(0..=4), den)).collect();
                let (s, d): (Q, Q) = (supply.iter().sum(), demand.iter().sum());
                if s < d {
                    supply[0] += d - s;
                } else {
                    demand[0] += s - d;
                }
                let cost: Vec<Vec<Q>> = (0..rows).map(|_| (0..cols).map(|_| q(rng.gen_range(-1..=1))).collect()).collect();
                let t = min_cost_transport(&supply, &demand, &cost).unwrap();
                let value = |p: &Vec<Vec<Q>>| -> Q {
                    p.iter().flatten().zip(cost.iter().flatten()).map(|(x, c)| x * c).sum()
                };
                let vertices = basic_plans(&supply, &demand);
                let best = vertices.iter().map(&value).min().unwrap();
                assert_eq!(t.cost, best);
                assert_eq!(value(&t.plan), best);
                let lex = vertices.iter().filter(|p| value(p) == best).min_by(|a, b| {
                    let (a, b): (Vec<Q>, Vec<Q>) = (a.iter().flatten().cloned().collect(), b.iter().flatten().cloned().collect());
                    a.cmp(&b)
                });
                assert_eq!(Some(&t.plan), lex);
                checked += 1;
            }
        }
    }
    assert_eq!(checked, 16 * 12);
}

#[test]
fn stable_matchings_are_popular_on_bipartite_instances() {
    let mut checked = 0;
    for seed in 0..150 {
        let shape = Shape { bipartite: true, ..Shape::strict(2 + seed as usize % 6, 8) };
        let inst = random_instance(seed, &shape);
        let stable: Vec<_> = enumerate_half_matchings(&inst, 8)
            .unwrap()
            .filter(|m| m.is_integral() && is_stable(&inst, m, BlockingMode::Weak).unwrap())
            .collect();
        assert!(!stable.is_empty(), "seed {seed}");
        for m in stable {
            let v = is_popular(&inst, &m, 8).unwrap();
            assert!(v.popular, "seed {seed}");
            checked += 1;
        }
    }
    assert!(checked >= 150);
}
