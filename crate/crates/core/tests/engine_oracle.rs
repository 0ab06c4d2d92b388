mod common;

use common::{random_instance, Shape};
use roommates_core::stability::{is_stable, BlockingMode};
use roommates_core::{enumerate_half_matchings, stable_half_matching, StrictInstance};

#[test]
fn engine_output_is_stable_on_random_multigraphs() {
    for seed in 0..3000 {
        let n = 2 + (seed as usize % 11);
        let inst = random_instance(seed, &Shape::strict(n, 40));
        let strict = StrictInstance::new(inst.clone()).unwrap();
        let cert = stable_half_matching(&strict).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
        assert!(is_stable(&inst, &cert.matching, BlockingMode::Weak).unwrap(), "seed {seed}");
        assert!(cert.even_components.is_empty(), "seed {seed}");
    }
}

#[test]
fn engine_output_is_in_brute_force_stable_set() {
    for seed in 0..1500 {
        let n = 2 + (seed as usize % 6);
        let inst = random_instance(seed, &Shape::strict(n, 8));
        let strict = StrictInstance::new(inst.clone()).unwrap();
        let cert = stable_half_matching(&strict).unwrap();
        let found = enumerate_half_matchings(&inst, 8)
            .unwrap()
            .filter(|m| is_stable(&inst, m, BlockingMode::Weak).unwrap())
            .any(|m| m == cert.matching);
        assert!(found, "seed {seed}");
    }
}

#[test]
fn engine_output_is_integral_on_bipartite_inputs() {
    for seed in 0..1000 {
        let shape = Shape { bipartite: true, ..Shape::strict(2 + seed as usize % 11, 40) };
        let inst = random_instance(seed, &shape);
        let cert = stable_half_matching(&StrictInstance::new(inst).unwrap()).unwrap();
        assert!(cert.matching.is_integral(), "seed {seed}");
    }
}
