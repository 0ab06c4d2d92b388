#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use roommates_core::{Instance, RawInstance, Rational64 as Q};

pub struct Shape {
    pub n: usize,
    pub density: f64,
    pub parallel_prob: f64,
    pub tie_prob: f64,
    pub max_edges: usize,
    pub bipartite: bool,
}

impl Shape {
    pub fn strict(n: usize, max_edges: usize) -> Shape {
        Shape { n, density: 0.5, parallel_prob: 0.2, tie_prob: 0.0, max_edges, bipartite: false }
    }
}

/// Random instance with integer valuations; ties appear with `tie_prob`.
pub fn random_instance(seed: u64, shape: &Shape) -> Instance<Q> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names: Vec<String> = (0..shape.n).map(|i| format!("v{i}")).collect();
    let mut raw = RawInstance::<Q>::new().vertices(names.clone());
    let mut edges: Vec<(String, usize, usize)> = Vec::new();
    'outer: for i in 0..shape.n {
        for j in i + 1..shape.n {
            if shape.bipartite && (i % 2 == j % 2) {
                continue;
            }
            if rng.gen_bool(shape.density) {
                let mut copies = 1;
                while copies < 4 && rng.gen_bool(shape.parallel_prob) {
                    copies += 1;
                }
                for _ in 0..copies {
                    if edges.len() >= shape.max_edges {
                        break 'outer;
                    }
                    edges.push((format!("e{:03}", edges.len()), i, j));
                }
            }
        }
    }
    for (id, i, j) in &edges {
        raw = raw.edge(id, &names[*i], &names[*j]);
    }
    for v in 0..shape.n {
        let mut inc: Vec<&String> = edges.iter().filter(|(_, i, j)| *i == v || *j == v).map(|(id, _, _)| id).collect();
        inc.shuffle(&mut rng);
        let mut value = inc.len() as i64 + 1;
        for (k, e) in inc.iter().enumerate() {
            if k > 0 && !rng.gen_bool(shape.tie_prob) {
                value -= 1;
            }
            raw = raw.pref(&names[v], e, Q::from_integer(value));
        }
    }
    raw.validate().expect("generated instance is valid")
}

/// Adds thresholds `γ < δ` with denominators up to 4 at every slot.
pub fn with_thresholds(inst: &Instance<Q>, seed: u64) -> Instance<Q> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9);
    let mut raw = inst.to_raw();
    for e in inst.edge_ids() {
        for v in inst.edge(e).ends {
            let den = rng.gen_range(1..=4);
            let g = rng.gen_range(1..=3 * den);
            let d = g + rng.gen_range(1..=2 * den);
            raw = raw.thresholds(inst.edge_name(e), inst.vertex_name(v), Q::new(g, den), Q::new(d, den));
        }
    }
    raw.validate().expect("thresholds are valid")
}

/// Adds integer weights in `0..=max`.
pub fn with_weights(inst: &Instance<Q>, seed: u64, max: i64) -> Instance<Q> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x51ed_270b);
    let mut raw = inst.to_raw();
    for e in inst.edge_ids() {
        raw = raw.weight(inst.edge_name(e), Q::from_integer(rng.gen_range(0..=max)));
    }
    raw.validate().expect("weights are valid")
}
