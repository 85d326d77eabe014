//! DIMACS min-cost flow text format.
//!
//! Lower bounds are removed on parse: an arc with bounds `[low, cap]` becomes
//! `[0, cap - low]`, its tail loses `low` supply and its head gains it, and
//! `low * cost` goes into a constant offset.

use crate::error::McfError;
use crate::network::Network;
use std::collections::HashMap;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DimacsError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: node id {id} is outside 1..={n}")]
    IdOutOfRange { line: usize, id: i64, n: usize },
    #[error("line {line}: capacity {cap} is below the lower bound {low}")]
    CapBelowLow { line: usize, low: i64, cap: i64 },
    #[error("no 'p min' line")]
    MissingProblemLine,
    #[error(transparent)]
    Network(#[from] McfError),
}

/// A parsed instance with lower bounds already eliminated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimacsProblem {
    pub network: Network,
    /// Original lower bound of each arc.
    pub lower_bounds: Vec<i64>,
    /// `sum(low * cost)`, to be added to objectives of the reduced network.
    pub offset: i64,
}

impl DimacsProblem {
    /// Maps a flow on the reduced network back to the original bounds.
    pub fn original_flow(&self, flow: &[i64]) -> Vec<i64> {
        flow.iter().zip(&self.lower_bounds).map(|(x, l)| x + l).collect()
    }

    pub fn original_objective(&self, objective: i64) -> i64 {
        objective + self.offset
    }

    /// Inverse of [`original_flow`](Self::original_flow).
    pub fn reduced_flow(&self, flow: &[i64]) -> Vec<i64> {
        flow.iter().zip(&self.lower_bounds).map(|(x, l)| x - l).collect()
    }
}

fn syntax(line: usize, message: impl Into<String>) -> DimacsError {
    DimacsError::Syntax { line, message: message.into() }
}

fn field<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T, DimacsError> {
    let tok = tok.ok_or_else(|| syntax(line, format!("missing {what}")))?;
    tok.parse().map_err(|_| syntax(line, format!("bad {what} '{tok}'")))
}

fn node_id(tok: Option<&str>, line: usize, n: usize) -> Result<usize, DimacsError> {
    let id: i64 = field(tok, line, "node id")?;
    if id < 1 || id as u64 > n as u64 {
        return Err(DimacsError::IdOutOfRange { line, id, n });
    }
    Ok(id as usize - 1)
}

fn no_trailing<'a>(mut toks: impl Iterator<Item = &'a str>, line: usize) -> Result<(), DimacsError> {
    match toks.next() {
        Some(t) => Err(syntax(line, format!("unexpected '{t}'"))),
        None => Ok(()),
    }
}

pub fn parse_dimacs(text: &str) -> Result<DimacsProblem, DimacsError> {
    let overflow = || DimacsError::Network(McfError::OverflowRisk("lower bound transform"));
    let mut header: Option<(usize, usize)> = None;
    let mut supplies: Vec<i64> = Vec::new();
    let mut arcs = Vec::new();
    let mut caps = Vec::new();
    let mut costs = Vec::new();
    let mut lows = Vec::new();
    let mut offset = 0i64;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let mut toks = raw.split_whitespace();
        let Some(kind) = toks.next() else { continue };
        match kind {
            "c" => continue,
            "p" => {
                if header.is_some() {
                    return Err(syntax(line, "second problem line"));
                }
                let problem: String = field(toks.next(), line, "problem type")?;
                if problem != "min" {
                    return Err(syntax(line, format!("expected 'p min', got 'p {problem}'")));
                }
                let n: usize = field(toks.next(), line, "node count")?;
                let m: usize = field(toks.next(), line, "arc count")?;
                no_trailing(toks, line)?;
                header = Some((n, m));
                supplies = vec![0; n];
                arcs.reserve(m);
            }
            "n" => {
                let (n, _) = header.ok_or(DimacsError::MissingProblemLine)?;
                let v = node_id(toks.next(), line, n)?;
                let b: i64 = field(toks.next(), line, "supply")?;
                no_trailing(toks, line)?;
                supplies[v] = supplies[v].checked_add(b).ok_or_else(overflow)?;
            }
            "a" => {
                let (n, _) = header.ok_or(DimacsError::MissingProblemLine)?;
                let s = node_id(toks.next(), line, n)?;
                let t = node_id(toks.next(), line, n)?;
                let low: i64 = field(toks.next(), line, "lower bound")?;
                let cap: i64 = field(toks.next(), line, "capacity")?;
                let cost: i64 = field(toks.next(), line, "cost")?;
                no_trailing(toks, line)?;
                if low < 0 {
                    return Err(syntax(line, format!("negative lower bound {low}")));
                }
                if cap < low {
                    return Err(DimacsError::CapBelowLow { line, low, cap });
                }
                if low > 0 {
                    supplies[s] = supplies[s].checked_sub(low).ok_or_else(overflow)?;
                    supplies[t] = supplies[t].checked_add(low).ok_or_else(overflow)?;
                    let term = low.checked_mul(cost).ok_or_else(overflow)?;
                    offset = offset.checked_add(term).ok_or_else(overflow)?;
                }
                arcs.push((s, t));
                caps.push(cap - low);
                costs.push(cost);
                lows.push(low);
            }
            other => return Err(syntax(line, format!("unknown line type '{other}'"))),
        }
    }
    let (n, m) = header.ok_or(DimacsError::MissingProblemLine)?;
    if arcs.len() != m {
        return Err(syntax(text.lines().count(), format!("problem line declares {m} arcs, found {}", arcs.len())));
    }
    let network = Network::new(n, &arcs, &caps, &costs, &supplies)?;
    Ok(DimacsProblem { network, lower_bounds: lows, offset })
}

/// Canonical text: problem line, nonzero supplies, then every arc with a
/// zero lower bound, all ids 1-based.
pub fn write_dimacs(network: &Network) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "p min {} {}", network.node_count(), network.arc_count());
    for (v, &b) in network.supplies().iter().enumerate() {
        if b != 0 {
            let _ = writeln!(out, "n {} {}", v + 1, b);
        }
    }
    for a in 0..network.arc_count() {
        let _ = writeln!(
            out,
            "a {} {} 0 {} {}",
            network.tail(a) + 1,
            network.head(a) + 1,
            network.capacity(a),
            network.cost(a)
        );
    }
    out
}

/// `s <objective>` then one `f <src> <dst> <flow>` line per arc with nonzero
/// flow. Parallel arcs get a line each, zero or not, so the reader can match
/// lines to arcs by position.
pub fn write_solution(network: &Network, objective: i64, flow: &[i64]) -> String {
    let parallel = parallel_groups(network);
    let mut out = String::new();
    let _ = writeln!(out, "s {objective}");
    for (a, &x) in flow.iter().enumerate() {
        let key = (network.tail(a), network.head(a));
        if x != 0 || parallel[&key].len() > 1 {
            let _ = writeln!(out, "f {} {} {}", key.0 + 1, key.1 + 1, x);
        }
    }
    out
}

fn parallel_groups(network: &Network) -> HashMap<(usize, usize), Vec<usize>> {
    let mut groups: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (a, key) in network.arcs().enumerate() {
        groups.entry(key).or_default().push(a);
    }
    groups
}

/// A solution read back from text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionText {
    pub objective: i64,
    pub flow: Vec<i64>,
}

/// Reads `s`/`f` lines against `network`. The k-th `f` line for an endpoint
/// pair goes to the k-th arc with those endpoints; arcs without a line carry 0.
pub fn parse_solution(text: &str, network: &Network) -> Result<SolutionText, DimacsError> {
    let n = network.node_count();
    let groups = parallel_groups(network);
    let mut used: HashMap<(usize, usize), usize> = HashMap::new();
    let mut flow = vec![0i64; network.arc_count()];
    let mut objective = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let mut toks = raw.split_whitespace();
        let Some(kind) = toks.next() else { continue };
        match kind {
            "c" => continue,
            "s" => {
                objective = Some(field::<i64>(toks.next(), line, "objective")?);
                no_trailing(toks, line)?;
            }
            "f" => {
                let s = node_id(toks.next(), line, n)?;
                let t = node_id(toks.next(), line, n)?;
                let x: i64 = field(toks.next(), line, "flow")?;
                no_trailing(toks, line)?;
                let arcs = groups.get(&(s, t)).ok_or_else(|| syntax(line, format!("no arc {} -> {}", s + 1, t + 1)))?;
                let k = used.entry((s, t)).or_insert(0);
                let a = *arcs.get(*k).ok_or_else(|| syntax(line, format!("too many flow lines for {} -> {}", s + 1, t + 1)))?;
                *k += 1;
                flow[a] = x;
            }
            other => return Err(syntax(line, format!("unknown line type '{other}'"))),
        }
    }
    let objective = objective.ok_or_else(|| syntax(0, "missing 's' line"))?;
    Ok(SolutionText { objective, flow })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::fixtures::{t1, zero_supply};

    #[test]
    fn two_node_example() {
        let p = parse_dimacs("c tiny\np min 2 1\nn 1 1\nn 2 -1\na 1 2 0 1 5\n").unwrap();
        assert_eq!(p.network.node_count(), 2);
        assert_eq!(p.network.arc_count(), 1);
        assert_eq!(p.network.cost(0), 5);
        assert_eq!(p.offset, 0);
    }

    #[test]
    fn lower_bound_transform() {
        let p = parse_dimacs("p min 2 1\nn 1 4\nn 2 -4\na 1 2 2 5 7\n").unwrap();
        assert_eq!(p.network.capacity(0), 3);
        assert_eq!(p.network.supplies(), &[2, -2]);
        assert_eq!(p.offset, 14);
        assert_eq!(p.original_flow(&[2]), vec![4]);
        assert_eq!(p.original_objective(p.network.objective(&[2])), 28);
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_dimacs("p max 2 1\n"), Err(DimacsError::Syntax { line: 1, .. })));
        assert_eq!(parse_dimacs("c nothing\n"), Err(DimacsError::MissingProblemLine));
        assert_eq!(parse_dimacs("a 1 2 0 1 1\n"), Err(DimacsError::MissingProblemLine));
        assert_eq!(
            parse_dimacs("p min 2 1\na 1 3 0 1 1\n"),
            Err(DimacsError::IdOutOfRange { line: 2, id: 3, n: 2 })
        );
        assert_eq!(
            parse_dimacs("p min 2 1\na 1 2 4 3 1\n"),
            Err(DimacsError::CapBelowLow { line: 2, low: 4, cap: 3 })
        );
        assert!(matches!(parse_dimacs("p min 2 2\na 1 2 0 3 1\n"), Err(DimacsError::Syntax { .. })));
        assert!(matches!(parse_dimacs("p min 2 1\na 1 2 0 x 1\n"), Err(DimacsError::Syntax { line: 2, .. })));
        assert!(matches!(
            parse_dimacs("p min 2 1\nn 1 1\na 1 2 0 1 1\n"),
            Err(DimacsError::Network(McfError::UnbalancedSupply(_)))
        ));
    }

    #[test]
    fn round_trip_fixture() {
        let net = t1();
        assert_eq!(parse_dimacs(&write_dimacs(&net)).unwrap().network, net);
    }

    #[test]
    fn solution_text() {
        assert_eq!(write_solution(&zero_supply(), 0, &[0, 0, 0]), "s 0\n");
        let text = write_solution(&t1(), 12, &[2, 2, 2, 0, 4]);
        assert_eq!(text.lines().count(), 5);
        assert!(text.starts_with("s 12\n"));
        let back = parse_solution(&text, &t1()).unwrap();
        assert_eq!(back.flow, vec![2, 2, 2, 0, 4]);
        assert_eq!(back.objective, 12);
    }

    #[test]
    fn parallel_arcs_keep_their_flows() {
        let net = Network::new(2, &[(0, 1), (0, 1)], &[2, 2], &[1, 5], &[1, -1]).unwrap();
        let text = write_solution(&net, 1, &[1, 0]);
        assert_eq!(parse_solution(&text, &net).unwrap().flow, vec![1, 0]);
        let text = write_solution(&net, 5, &[0, 1]);
        assert_eq!(parse_solution(&text, &net).unwrap().flow, vec![0, 1]);
    }
}
