//! Seeded random markets.
//!
//! The algorithm is fixed so that a seed names the same instance everywhere.
//! All randomness comes from one `ChaCha8Rng::seed_from_u64(seed)` stream,
//! consumed in this order:
//!
//! 1. Vertices are `v1 .. vn`. With `bipartite`, `v1 .. v⌈n/2⌉` form one side.
//! 2. For every allowed pair `i < j` in lexicographic order: one draw
//!    `coin(density)`. On success an edge is added, then further parallel
//!    copies are added while `coin(parallel_prob)` succeeds, up to
//!    [`MAX_MULTIPLICITY`] copies. Generation stops as soon as
//!    `max_edges` edges exist, and then makes no further draws in this step.
//!    Edge `k` (0-based, creation order) is named `e` followed by `k` in
//!    four-digit zero padding, so id order is creation order.
//! 3. For every vertex in order, its incident edges (id order) are shuffled
//!    by Fisher-Yates: for `i` from `len-1` down to `1`, swap `i` with
//!    `uniform(0..=i)`. The shuffled list is cut into tie groups: each edge
//!    after the first joins the previous group iff `coin(tie_prob)`. Groups
//!    take the default values `k, k-1, .., 1`.
//! 4. With a weight range `[lo, hi]`, every edge in id order gets
//!    `lo + uniform(0..=hi-lo)`.
//! 5. With a gamma preset, every edge in id order and each of its two
//!    endpoints in order gets thresholds from the minimum positive
//!    preference gap `g` (which is 1 for default values):
//!    * `min-like`: `γ = c·g/2` with `c = 1 + uniform(0..=3)`, `δ = γ + g/4`;
//!    * `max-like`: `γ = g/4`, `δ = c·g/2` with `c = 1 + uniform(0..=3)`;
//!    * `generic`: `γ = a·g/4`, `δ = γ + b·g/4` with `a, b = 1 + uniform(0..=7)`
//!      drawn in that order.
//!
//! `coin(p/q)` draws `uniform(0..q)` and succeeds iff the result is `< p`.
//! `uniform(0..k)` is `Rng::gen_range` on `u64`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use roommates_core::{Instance, InstanceError, RawInstance, Rational, Scalar};
use thiserror::Error;

/// Most parallel copies of one vertex pair.
pub const MAX_MULTIPLICITY: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("probability `{0}` must be p/q with 0 <= p <= q and q > 0")]
    Probability(String),
    #[error("unknown gamma preset `{0}` (expected none, min-like, max-like or generic)")]
    Preset(String),
    #[error("weight range {lo}..={hi} is empty")]
    WeightRange { lo: i64, hi: i64 },
    #[error("at least one vertex is required")]
    NoVertices,
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

/// Exact probability `num/den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Probability {
    num: u64,
    den: u64,
}

impl Probability {
    pub const ZERO: Probability = Probability { num: 0, den: 1 };
    pub const ONE: Probability = Probability { num: 1, den: 1 };

    pub fn new(num: u64, den: u64) -> Result<Self, GenError> {
        if den == 0 || num > den {
            return Err(GenError::Probability(format!("{num}/{den}")));
        }
        Ok(Probability { num, den })
    }

    fn coin(self, rng: &mut ChaCha8Rng) -> bool {
        rng.gen_range(0..self.den) < self.num
    }
}

impl FromStr for Probability {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Self, GenError> {
        let bad = || GenError::Probability(s.to_string());
        let (num, den) = match s.split_once('/') {
            Some((p, q)) => (p.parse().map_err(|_| bad())?, q.parse().map_err(|_| bad())?),
            None => (s.parse().map_err(|_| bad())?, 1),
        };
        Probability::new(num, den).map_err(|_| bad())
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GammaPreset {
    None,
    MinLike,
    MaxLike,
    Generic,
}

impl FromStr for GammaPreset {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Self, GenError> {
        match s {
            "none" => Ok(GammaPreset::None),
            "min-like" => Ok(GammaPreset::MinLike),
            "max-like" => Ok(GammaPreset::MaxLike),
            "generic" => Ok(GammaPreset::Generic),
            _ => Err(GenError::Preset(s.to_string())),
        }
    }
}

impl fmt::Display for GammaPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GammaPreset::None => "none",
            GammaPreset::MinLike => "min-like",
            GammaPreset::MaxLike => "max-like",
            GammaPreset::Generic => "generic",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenParams {
    pub n: usize,
    pub density: Probability,
    pub parallel_prob: Probability,
    pub tie_prob: Probability,
    pub weights: Option<(i64, i64)>,
    pub gamma: GammaPreset,
    pub max_edges: Option<usize>,
    pub bipartite: bool,
}

impl GenParams {
    /// Strict simple graph on `n` vertices with edge density 1/2.
    pub fn new(n: usize) -> Self {
        GenParams {
            n,
            density: Probability { num: 1, den: 2 },
            parallel_prob: Probability::ZERO,
            tie_prob: Probability::ZERO,
            weights: None,
            gamma: GammaPreset::None,
            max_edges: None,
            bipartite: false,
        }
    }
}

fn uniform(rng: &mut ChaCha8Rng, hi_inclusive: u64) -> u64 {
    rng.gen_range(0..=hi_inclusive)
}

pub fn generate_random(seed: u64, params: &GenParams) -> Result<Instance, GenError> {
    if params.n == 0 {
        return Err(GenError::NoVertices);
    }
    if let Some((lo, hi)) = params.weights {
        if lo > hi {
            return Err(GenError::WeightRange { lo, hi });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names: Vec<String> = (1..=params.n).map(|i| format!("v{i}")).collect();
    let side = |i: usize| i < params.n.div_ceil(2);

    let mut edges: Vec<(String, usize, usize)> = Vec::new();
    let cap = params.max_edges.unwrap_or(usize::MAX);
    'pairs: for i in 0..params.n {
        for j in i + 1..params.n {
            if params.bipartite && side(i) == side(j) {
                continue;
            }
            if edges.len() >= cap {
                break 'pairs;
            }
            if !params.density.coin(&mut rng) {
                continue;
            }
            let mut copies = 0;
            loop {
                edges.push((format!("e{:04}", edges.len()), i, j));
                copies += 1;
                if copies == MAX_MULTIPLICITY || edges.len() >= cap || !params.parallel_prob.coin(&mut rng) {
                    break;
                }
            }
        }
    }

    let mut raw = RawInstance::<Rational>::new().vertices(names.iter().cloned());
    for (id, i, j) in &edges {
        raw = raw.edge(id, &names[*i], &names[*j]);
    }
    for v in 0..params.n {
        let mut incident: Vec<&str> =
            edges.iter().filter(|(_, i, j)| *i == v || *j == v).map(|(id, _, _)| id.as_str()).collect();
        for i in (1..incident.len()).rev() {
            let k = uniform(&mut rng, i as u64) as usize;
            incident.swap(i, k);
        }
        let mut groups: Vec<Vec<&str>> = Vec::new();
        for (k, e) in incident.into_iter().enumerate() {
            if k > 0 && params.tie_prob.coin(&mut rng) {
                groups.last_mut().expect("k > 0").push(e);
            } else {
                groups.push(vec![e]);
            }
        }
        let refs: Vec<&[&str]> = groups.iter().map(Vec::as_slice).collect();
        raw = raw.ranking(&names[v], &refs);
    }
    if let Some((lo, hi)) = params.weights {
        for (id, _, _) in &edges {
            let w = lo + uniform(&mut rng, (hi - lo) as u64) as i64;
            raw = raw.weight(id, Rational::from_int(w));
        }
    }
    let inst = raw.validate()?;
    apply_gamma_preset(&inst, params.gamma, &mut rng)
}

/// Replaces all thresholds of `inst` by ones drawn from `preset` (step 5
/// above). `GammaPreset::None` returns the instance unchanged.
pub fn apply_gamma_preset(inst: &Instance, preset: GammaPreset, rng: &mut ChaCha8Rng) -> Result<Instance, GenError> {
    if preset == GammaPreset::None {
        return Ok(inst.clone());
    }
    let g = inst.min_positive_gap().unwrap_or_else(|| Rational::from_int(1));
    let frac = |num: i64, den: i64| g.clone() * Rational::from_ratio(num, den);
    let mut raw = inst.to_raw();
    raw.thresholds.clear();
    for e in inst.edge_ids() {
        for v in inst.edge(e).ends {
            let (gamma, delta) = match preset {
                GammaPreset::MinLike => {
                    let c = 1 + uniform(rng, 3) as i64;
                    (frac(c, 2), frac(c, 2) + frac(1, 4))
                }
                GammaPreset::MaxLike => {
                    let c = 1 + uniform(rng, 3) as i64;
                    (frac(1, 4), frac(c, 2))
                }
                GammaPreset::Generic => {
                    let a = 1 + uniform(rng, 7) as i64;
                    let b = 1 + uniform(rng, 7) as i64;
                    (frac(a, 4), frac(a + b, 4))
                }
                GammaPreset::None => unreachable!(),
            };
            raw = raw.thresholds(inst.edge_name(e), inst.vertex_name(v), gamma, delta);
        }
    }
    Ok(raw.validate()?)
}
