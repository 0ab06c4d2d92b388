//! Line-oriented instance files.
//!
//! ```text
//! # comment
//! vertices a b c
//! edge ab a b
//! edge bc b c weight 3/2
//! pref a ab
//! pref b ab bc          # one token per tie group, best first
//! pref c bc,xy          # comma-separated edges share a group
//! pref d x=5/2 y=1      # optional explicit valuation per group
//! empty d -1            # value of being unmatched, default 0
//! gamma ab a 1/4 1/2    # gamma and delta of edge ab at a
//! critical c
//! ```
//!
//! Without explicit values a vertex with `k` groups values them `k, k-1, .., 1`.
//! Rationals are written `p/q` or as integers.

use std::collections::{BTreeSet, HashMap};
use std::str::FromStr;

use roommates_core::{Instance, InstanceError, RawInstance, Rational, Scalar};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error(transparent)]
    Invalid(#[from] InstanceError),
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax { line, message: message.into() }
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    if s.is_empty() || s.ends_with('/') || s.contains("/-") || s.contains("/+") {
        return None;
    }
    Rational::from_str(s).ok()
}

fn rational_at(line: usize, s: &str) -> Result<Rational, ParseError> {
    parse_rational(s).ok_or_else(|| syntax(line, format!("malformed rational `{s}`")))
}

fn valid_id(s: &str) -> bool {
    !s.is_empty() && !s.contains([',', '=', '#'])
}

struct Group {
    edges: Vec<String>,
    value: Option<Rational>,
}

/// Parses an instance document. References to unknown vertices or edges
/// are reported with their line number.
pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut vertices: Vec<String> = Vec::new();
    let mut edges: Vec<(usize, String, String, String, Option<Rational>)> = Vec::new();
    let mut prefs: Vec<(usize, String, Vec<Group>)> = Vec::new();
    let mut empties: Vec<(usize, String, Rational)> = Vec::new();
    let mut gammas: Vec<(usize, String, String, Rational, Rational)> = Vec::new();
    let mut critical: Option<(usize, Vec<String>)> = None;

    for (i, raw_line) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw_line.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let Some((&head, rest)) = tokens.split_first() else { continue };
        match head {
            "vertices" => {
                for t in rest {
                    if !valid_id(t) {
                        return Err(syntax(line, format!("invalid vertex id `{t}`")));
                    }
                    vertices.push(t.to_string());
                }
            }
            "edge" => {
                let weight = match rest {
                    [_, _, _] => None,
                    [_, _, _, "weight", w] => Some(rational_at(line, w)?),
                    _ => return Err(syntax(line, "expected `edge <id> <u> <v> [weight <p/q>]`")),
                };
                if !valid_id(rest[0]) {
                    return Err(syntax(line, format!("invalid edge id `{}`", rest[0])));
                }
                edges.push((line, rest[0].to_string(), rest[1].to_string(), rest[2].to_string(), weight));
            }
            "pref" => {
                let Some((v, groups)) = rest.split_first() else {
                    return Err(syntax(line, "expected `pref <vertex> <group>...`"));
                };
                let mut parsed = Vec::new();
                for g in groups {
                    let (names, value) = match g.split_once('=') {
                        Some((n, x)) => (n, Some(rational_at(line, x)?)),
                        None => (*g, None),
                    };
                    let edges: Vec<String> = names.split(',').map(str::to_string).collect();
                    if edges.iter().any(|e| e.is_empty()) {
                        return Err(syntax(line, format!("empty edge id in group `{g}`")));
                    }
                    parsed.push(Group { edges, value });
                }
                let explicit = parsed.iter().filter(|g| g.value.is_some()).count();
                if explicit != 0 && explicit != parsed.len() {
                    return Err(syntax(line, "either every group or no group carries a value"));
                }
                prefs.push((line, v.to_string(), parsed));
            }
            "empty" => match rest {
                [v, x] => empties.push((line, v.to_string(), rational_at(line, x)?)),
                _ => return Err(syntax(line, "expected `empty <vertex> <p/q>`")),
            },
            "gamma" => match rest {
                [e, v, g, d] => {
                    gammas.push((line, e.to_string(), v.to_string(), rational_at(line, g)?, rational_at(line, d)?))
                }
                _ => return Err(syntax(line, "expected `gamma <edge> <vertex> <gamma> <delta>`")),
            },
            "critical" => {
                if critical.is_some() {
                    return Err(syntax(line, "duplicate `critical` line"));
                }
                critical = Some((line, rest.iter().map(|s| s.to_string()).collect()));
            }
            other => return Err(syntax(line, format!("unknown directive `{other}`"))),
        }
    }

    let vertex_set: BTreeSet<&str> = vertices.iter().map(String::as_str).collect();
    let mut edge_ends: HashMap<&str, (&str, &str)> = HashMap::new();
    for (line, id, u, v, _) in &edges {
        for x in [u, v] {
            if !vertex_set.contains(x.as_str()) {
                return Err(syntax(*line, format!("edge `{id}` references unknown vertex `{x}`")));
            }
        }
        edge_ends.insert(id, (u, v));
    }
    let check_vertex = |line: usize, v: &str| {
        if vertex_set.contains(v) {
            Ok(())
        } else {
            Err(syntax(line, format!("unknown vertex `{v}`")))
        }
    };
    let check_edge = |line: usize, e: &str, v: &str| match edge_ends.get(e) {
        None => Err(syntax(line, format!("unknown edge `{e}`"))),
        Some((a, b)) if *a != v && *b != v => Err(syntax(line, format!("edge `{e}` is not incident to `{v}`"))),
        Some(_) => Ok(()),
    };

    let mut raw = RawInstance::<Rational>::new().vertices(vertices.iter().cloned());
    for (_, id, u, v, w) in &edges {
        raw = raw.edge(id, u, v);
        if let Some(w) = w {
            raw = raw.weight(id, w.clone());
        }
    }
    for (line, v, groups) in &prefs {
        check_vertex(*line, v)?;
        let k = groups.len() as i64;
        for (i, g) in groups.iter().enumerate() {
            let value = g.value.clone().unwrap_or_else(|| Rational::from_int(k - i as i64));
            for e in &g.edges {
                check_edge(*line, e, v)?;
                raw = raw.pref(v, e, value.clone());
            }
        }
    }
    for (line, v, x) in &empties {
        check_vertex(*line, v)?;
        raw = raw.empty_value(v, x.clone());
    }
    for (line, e, v, g, d) in &gammas {
        check_vertex(*line, v)?;
        check_edge(*line, e, v)?;
        raw = raw.thresholds(e, v, g.clone(), d.clone());
    }
    if let Some((line, names)) = &critical {
        for v in names {
            check_vertex(*line, v)?;
        }
        raw = raw.critical(names.iter().cloned());
    }
    Ok(raw.validate()?)
}

/// Canonical document for `inst`: edges in id order, groups best first
/// with edge ids ascending inside a group, values only when they differ
/// from the default ranks.
pub fn serialize_instance(inst: &Instance) -> String {
    let mut out = String::new();
    out.push_str("vertices");
    for v in inst.vertex_names() {
        out.push(' ');
        out.push_str(v);
    }
    out.push('\n');
    for e in inst.edge_ids() {
        let edge = inst.edge(e);
        out.push_str(&format!(
            "edge {} {} {}",
            edge.name,
            inst.vertex_name(edge.ends[0]),
            inst.vertex_name(edge.ends[1])
        ));
        if let Some(w) = &edge.weight {
            out.push_str(&format!(" weight {w}"));
        }
        out.push('\n');
    }
    for v in inst.vertices() {
        let classes = inst.tie_classes(v);
        if classes.is_empty() {
            continue;
        }
        let k = classes.len() as i64;
        let default = classes
            .iter()
            .enumerate()
            .all(|(i, c)| *inst.pref(v, c[0]) == Rational::from_int(k - i as i64));
        out.push_str(&format!("pref {}", inst.vertex_name(v)));
        for c in &classes {
            let mut names: Vec<&str> = c.iter().map(|e| inst.edge_name(*e)).collect();
            names.sort();
            out.push(' ');
            out.push_str(&names.join(","));
            if !default {
                out.push_str(&format!("={}", inst.pref(v, c[0])));
            }
        }
        out.push('\n');
    }
    for v in inst.vertices() {
        if *inst.empty_value(v) != Rational::from_int(0) {
            out.push_str(&format!("empty {} {}\n", inst.vertex_name(v), inst.empty_value(v)));
        }
    }
    for e in inst.edge_ids() {
        for v in inst.edge(e).ends {
            if let Some(t) = inst.thresholds(e, v) {
                out.push_str(&format!("gamma {} {} {} {}\n", inst.edge_name(e), inst.vertex_name(v), t.gamma, t.delta));
            }
        }
    }
    if let Some(c) = inst.critical() {
        out.push_str("critical");
        for v in c {
            out.push(' ');
            out.push_str(inst.vertex_name(*v));
        }
        out.push('\n');
    }
    out
}

/// `sha256:<hex>` of the canonical document.
pub fn instance_digest(inst: &Instance) -> String {
    let hash = Sha256::digest(serialize_instance(inst).as_bytes());
    format!("sha256:{hash:x}")
}
