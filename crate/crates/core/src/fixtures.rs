//! Small named instances used throughout the tests and the CLI examples.

use crate::instance::{Instance, RawInstance};
use crate::scalar::Scalar;

/// Bipartite market with agents `u1,u2,u3` and `w1,w2`: `u1,u2` rank
/// `w1 > w2`, `u3` accepts only `w2`, `w1` ranks `u1 > u2` and `w2` ranks
/// `u1 > u2 > u3`. Edge ids are the concatenated endpoint names.
pub fn fix_a<S: Scalar>() -> Instance<S> {
    RawInstance::new()
        .vertices(["u1", "u2", "u3", "w1", "w2"])
        .edge("u1w1", "u1", "w1")
        .edge("u1w2", "u1", "w2")
        .edge("u2w1", "u2", "w1")
        .edge("u2w2", "u2", "w2")
        .edge("u3w2", "u3", "w2")
        .strict("u1", &["u1w1", "u1w2"])
        .strict("u2", &["u2w1", "u2w2"])
        .strict("u3", &["u3w2"])
        .strict("w1", &["u1w1", "u2w1"])
        .strict("w2", &["u1w2", "u2w2", "u3w2"])
        .validate()
        .expect("fixture is valid")
}

/// Triangle where every agent prefers its successor: `v1 -> v2 -> v3 -> v1`.
pub fn fix_b<S: Scalar>() -> Instance<S> {
    RawInstance::new()
        .vertices(["v1", "v2", "v3"])
        .edge("v1v2", "v1", "v2")
        .edge("v2v3", "v2", "v3")
        .edge("v1v3", "v1", "v3")
        .strict("v1", &["v1v2", "v1v3"])
        .strict("v2", &["v2v3", "v1v2"])
        .strict("v3", &["v1v3", "v2v3"])
        .validate()
        .expect("fixture is valid")
}

/// Path `a - b - c` where `b` prefers `a`.
pub fn path3<S: Scalar>() -> Instance<S> {
    RawInstance::new()
        .vertices(["a", "b", "c"])
        .edge("ab", "a", "b")
        .edge("bc", "b", "c")
        .strict("a", &["ab"])
        .strict("b", &["ab", "bc"])
        .strict("c", &["bc"])
        .validate()
        .expect("fixture is valid")
}

/// Path `a - b - c - d` where `b` and `c` are indifferent between their
/// two neighbours.
pub fn tied_path4<S: Scalar>() -> Instance<S> {
    RawInstance::new()
        .vertices(["a", "b", "c", "d"])
        .edge("ab", "a", "b")
        .edge("bc", "b", "c")
        .edge("cd", "c", "d")
        .ranking("a", &[&["ab"]])
        .ranking("b", &[&["ab", "bc"]])
        .ranking("c", &[&["bc", "cd"]])
        .ranking("d", &[&["cd"]])
        .validate()
        .expect("fixture is valid")
}

/// One edge `e` between `a` and `b`.
pub fn single_edge<S: Scalar>() -> Instance<S> {
    RawInstance::new()
        .vertices(["a", "b"])
        .edge("e", "a", "b")
        .strict("a", &["e"])
        .strict("b", &["e"])
        .validate()
        .expect("fixture is valid")
}
