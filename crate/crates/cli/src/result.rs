//! Result files: a solver's matching plus everything needed to re-check it.
//!
//! Rationals are strings (`"0"`, `"1/2"`, `"-3/4"`); maps are ordered, so a
//! result serializes to the same bytes every time.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use roommates_core::{
    blocking_edges, is_popular, is_popular_among, is_popular_critical, is_popular_sampled, max_weight_dual,
    BlockingMode, FractionalMatching, Instance, Rational, Scalar, Scope, Verdict, VertexId,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::format::parse_rational;

/// Random fractional alternatives added by `--scope sampled`.
pub const SAMPLES: usize = 200;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResultError {
    #[error("malformed result file: {0}")]
    Json(String),
    #[error("unknown solver `{0}`")]
    Solver(String),
    #[error("malformed rational `{value}` for `{key}`")]
    Rational { key: String, value: String },
    #[error("unknown edge `{0}` in matching")]
    UnknownEdge(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Solver {
    #[serde(rename = "max-srti")]
    MaxSrti,
    #[serde(rename = "gamma")]
    Gamma,
    #[serde(rename = "max-pri")]
    MaxPri,
    #[serde(rename = "pop-crit")]
    PopCrit,
    #[serde(rename = "pop-maxw")]
    PopMaxw,
}

impl Solver {
    pub const ALL: [Solver; 5] = [Solver::MaxSrti, Solver::Gamma, Solver::MaxPri, Solver::PopCrit, Solver::PopMaxw];

    pub fn tag(self) -> &'static str {
        match self {
            Solver::MaxSrti => "max-srti",
            Solver::Gamma => "gamma",
            Solver::MaxPri => "max-pri",
            Solver::PopCrit => "pop-crit",
            Solver::PopMaxw => "pop-maxw",
        }
    }
}

impl fmt::Display for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Solver {
    type Err = ResultError;

    fn from_str(s: &str) -> Result<Self, ResultError> {
        Solver::ALL.into_iter().find(|x| x.tag() == s).ok_or_else(|| ResultError::Solver(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScopeArg {
    Half,
    Sampled,
}

/// Inputs that change the effective instance or the checks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Params {
    pub oracle_bound: usize,
    pub scope: ScopeArg,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub critical: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<BTreeMap<String, String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stats {
    pub size: String,
    pub saturated: Vec<String>,
    pub unsaturated: Vec<String>,
    pub integral: bool,
    pub half_integral: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockingCheck {
    pub mode: String,
    pub edges: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriticalCheck {
    pub set: Vec<String>,
    pub unsaturated: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightCheck {
    pub weight: String,
    pub optimum: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounterexampleRecord {
    pub matching: BTreeMap<String, String>,
    pub delta: String,
    pub votes: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PopularityCheck {
    pub scope: String,
    pub checked: usize,
    pub popular: bool,
    pub counterexample: Option<CounterexampleRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verification {
    /// `None` for a well-formed matching, otherwise why it is not one.
    pub invalid: Option<String>,
    pub blocking: Option<BlockingCheck>,
    pub critical: Option<CriticalCheck>,
    pub weight: Option<WeightCheck>,
    /// Skipped (`null`) when the instance has more edges than the oracle bound.
    pub popularity: Option<PopularityCheck>,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultFile {
    pub solver: Solver,
    pub instance: String,
    pub seed: Option<u64>,
    pub params: Params,
    pub matching: BTreeMap<String, String>,
    pub stats: Stats,
    pub verification: Verification,
}

impl ResultFile {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("result files serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, ResultError> {
        serde_json::from_str(text).map_err(|e| ResultError::Json(e.to_string()))
    }
}

pub fn matching_map(inst: &Instance, m: &FractionalMatching<Rational>) -> BTreeMap<String, String> {
    inst.edge_ids().map(|e| (inst.edge_name(e).to_string(), m.value(e).to_string())).collect()
}

/// Edge values from a result map. Edges not listed are 0. The values are
/// not checked against the matching constraints here.
pub fn parse_values(inst: &Instance, map: &BTreeMap<String, String>) -> Result<Vec<Rational>, ResultError> {
    let mut values = vec![Rational::from_int(0); inst.num_edges()];
    for (key, value) in map {
        let e = inst.edge_id(key).ok_or_else(|| ResultError::UnknownEdge(key.clone()))?;
        values[e.0] = parse_rational(value)
            .ok_or_else(|| ResultError::Rational { key: key.clone(), value: value.clone() })?;
    }
    Ok(values)
}

pub fn vertex_set(inst: &Instance, names: &[String]) -> Result<BTreeSet<VertexId>, ResultError> {
    names.iter().map(|v| inst.vertex_id(v).ok_or_else(|| ResultError::UnknownVertex(v.clone()))).collect()
}

fn names(inst: &Instance, vs: impl IntoIterator<Item = VertexId>) -> Vec<String> {
    vs.into_iter().map(|v| inst.vertex_name(v).to_string()).collect()
}

pub fn stats(inst: &Instance, values: &[Rational]) -> Stats {
    let load = |v: VertexId| inst.incident(v).iter().fold(Rational::from_int(0), |acc, e| acc + values[e.0].clone());
    let one = Rational::from_int(1);
    let half = Rational::half();
    let (sat, unsat): (Vec<VertexId>, Vec<VertexId>) = inst.vertices().partition(|v| load(*v) >= one);
    Stats {
        size: values.iter().fold(Rational::from_int(0), |acc, x| acc + x.clone()).to_string(),
        saturated: names(inst, sat),
        unsaturated: names(inst, unsat),
        integral: values.iter().all(|x| x.is_integer()),
        half_integral: values.iter().all(|x| *x == Rational::from_int(0) || *x == half || *x == one),
    }
}

fn popularity_record(inst: &Instance, verdict: &Verdict<Rational>) -> PopularityCheck {
    let scope = match verdict.scope {
        Scope::HalfIntegral => "half-integral".to_string(),
        Scope::Sampled { samples, seed } => format!("half-integral+{samples}-sampled(seed {seed})"),
    };
    let counterexample = verdict.counterexample.as_ref().map(|c| CounterexampleRecord {
        matching: inst
            .edge_ids()
            .filter(|e| *c.n.value(*e) != Rational::from_int(0))
            .map(|e| (inst.edge_name(e).to_string(), c.n.value(e).to_string()))
            .collect(),
        delta: c.delta.value.to_string(),
        votes: inst.vertices().map(|v| (inst.vertex_name(v).to_string(), c.delta.votes[v.0].to_string())).collect(),
    });
    PopularityCheck { scope, checked: verdict.checked, popular: verdict.popular, counterexample }
}

fn fractional_weight(inst: &Instance, m: &FractionalMatching<Rational>) -> Rational {
    inst.edge_ids().fold(Rational::from_int(0), |acc, e| {
        acc + inst.weight(e).cloned().unwrap_or_else(|| Rational::from_int(0)) * m.value(e).clone()
    })
}

/// Re-checks `values` on the effective instance `inst` as output of
/// `solver`. `critical` is the set used by `pop-crit`.
pub fn verify_values(
    inst: &Instance,
    solver: Solver,
    values: Vec<Rational>,
    params: &Params,
    critical: Option<&BTreeSet<VertexId>>,
    seed: u64,
) -> Verification {
    let m = match FractionalMatching::new(inst, values) {
        Ok(m) => m,
        Err(e) => {
            return Verification {
                invalid: Some(e.to_string()),
                blocking: None,
                critical: None,
                weight: None,
                popularity: None,
                ok: false,
            }
        }
    };
    let mut ok = true;
    let mut invalid = None;
    if solver != Solver::Gamma && !m.is_half_integral() {
        invalid = Some("matching is not half-integral".to_string());
        ok = false;
    }

    let blocking = match solver {
        Solver::MaxSrti | Solver::Gamma => {
            let mode = if solver == Solver::Gamma { BlockingMode::Gamma } else { BlockingMode::Weak };
            let edges = match blocking_edges(inst, &m, mode) {
                Ok(edges) => edges.into_iter().map(|e| inst.edge_name(e).to_string()).collect(),
                Err(e) => {
                    invalid = Some(e.to_string());
                    Vec::new()
                }
            };
            ok &= edges.is_empty() && invalid.is_none();
            Some(BlockingCheck { mode: if solver == Solver::Gamma { "gamma" } else { "weak" }.into(), edges })
        }
        _ => None,
    };

    let critical_check = match (solver, critical) {
        (Solver::PopCrit, Some(c)) => {
            let unsaturated: Vec<String> = names(inst, c.iter().copied().filter(|v| !m.is_saturated(inst, *v)));
            ok &= unsaturated.is_empty();
            Some(CriticalCheck { set: names(inst, c.iter().copied()), unsaturated })
        }
        _ => None,
    };

    let weight = match solver {
        Solver::PopMaxw => {
            let dual = max_weight_dual(inst);
            let w = fractional_weight(inst, &m);
            ok &= w == dual.objective && dual.check(inst).is_ok();
            Some(WeightCheck { weight: w.to_string(), optimum: dual.objective.to_string() })
        }
        _ => None,
    };

    let popularity = if inst.num_edges() > params.oracle_bound || !inst.is_strict() {
        None
    } else {
        let bound = params.oracle_bound;
        let verdict = match solver {
            Solver::MaxSrti | Solver::Gamma => None,
            Solver::MaxPri => Some(match params.scope {
                ScopeArg::Half => is_popular(inst, &m, bound),
                ScopeArg::Sampled => is_popular_sampled(inst, &m, bound, SAMPLES, seed),
            }),
            Solver::PopCrit => {
                let empty = BTreeSet::new();
                Some(is_popular_critical(inst, &m, critical.unwrap_or(&empty), bound))
            }
            Solver::PopMaxw => {
                let optimum = max_weight_dual(inst).objective;
                Some(is_popular_among(inst, &m, bound, |n| fractional_weight(inst, n) == optimum))
            }
        };
        match verdict {
            None => None,
            Some(Ok(v)) => {
                ok &= v.popular;
                Some(popularity_record(inst, &v))
            }
            Some(Err(e)) => {
                ok = false;
                invalid.get_or_insert(e.to_string());
                None
            }
        }
    };

    Verification { invalid, blocking, critical: critical_check, weight, popularity, ok }
}
