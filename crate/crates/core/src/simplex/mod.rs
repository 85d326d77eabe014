//! Primal network simplex on a strongly feasible spanning tree basis.

mod pivot;
mod tree;

pub use pivot::{default_block, default_head, default_list, default_minor};
pub use tree::{ArcState, PivotResult, SpanningTree};

use crate::error::{McfError, Result};
use crate::network::Network;
use crate::solver::{Deadline, NsParams, Solution, SolverReport};
use pivot::Pricer;
use std::collections::VecDeque;

/// What an observer sees after each pivot.
#[derive(Debug)]
pub struct PivotEvent<'a> {
    pub tree: &'a SpanningTree,
    pub entering: usize,
    /// Violation of the entering arc when it was chosen.
    pub violation: i64,
    /// Largest violation over all original arcs when the arc was chosen.
    pub max_violation: i64,
    /// Total cost, artificial arcs included, before the pivot.
    pub cost_before: i128,
    pub result: PivotResult,
    pub startup: bool,
}

pub fn init_artificial_basis(network: &Network) -> Result<SpanningTree> {
    SpanningTree::artificial(network)
}

/// Arcs met by a reverse breadth-first search from all demand nodes, each one
/// the first arc found into a newly reached node, at most `floor(sqrt(m))`.
pub fn startup_arcs(network: &Network) -> Vec<usize> {
    let n = network.node_count();
    let m = network.arc_count();
    let limit = default_block(m);
    let mut first_in = vec![0usize; n + 1];
    for &h in network.heads() {
        first_in[h + 1] += 1;
    }
    for v in 0..n {
        first_in[v + 1] += first_in[v];
    }
    let mut fill = first_in.clone();
    let mut in_arcs = vec![0usize; m];
    for (a, &h) in network.heads().iter().enumerate() {
        in_arcs[fill[h]] = a;
        fill[h] += 1;
    }
    let mut reached = vec![false; n];
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| network.supply(v) < 0).collect();
    for &v in &queue {
        reached[v] = true;
    }
    let mut out = Vec::new();
    while let Some(v) = queue.pop_front() {
        for &a in &in_arcs[first_in[v]..first_in[v + 1]] {
            let u = network.tail(a);
            if reached[u] {
                continue;
            }
            reached[u] = true;
            out.push(a);
            if out.len() == limit {
                return out;
            }
            queue.push_back(u);
        }
    }
    out
}

pub fn solve_ns(network: &Network, params: &NsParams, deadline: &Deadline) -> Result<Solution> {
    run(network, params, deadline, None)
}

/// Like [`solve_ns`], calling `observer` after every pivot. Each pivot also
/// pays for a full pricing scan to fill `max_violation`.
pub fn solve_ns_observed(
    network: &Network,
    params: &NsParams,
    deadline: &Deadline,
    observer: &mut dyn FnMut(&PivotEvent),
) -> Result<Solution> {
    run(network, params, deadline, Some(observer))
}

fn max_violation(tree: &SpanningTree) -> i64 {
    (0..tree.arc_count()).map(|e| tree.violation(e)).max().unwrap_or(0)
}

fn run(
    network: &Network,
    params: &NsParams,
    deadline: &Deadline,
    mut observer: Option<&mut dyn FnMut(&PivotEvent)>,
) -> Result<Solution> {
    let mut tree = SpanningTree::artificial(network)?;
    let mut pivots = 0u64;
    let mut degenerate = 0u64;
    let mut startup_pivots = 0u64;

    let mut step = |tree: &mut SpanningTree, arc: usize, startup: bool| -> Result<PivotResult> {
        let violation = tree.violation(arc);
        let (max_v, cost_before) = match observer {
            Some(_) => (max_violation(tree), tree.total_cost()),
            None => (0, 0),
        };
        let result = tree.pivot(arc)?;
        if let Some(obs) = observer.as_mut() {
            obs(&PivotEvent {
                tree,
                entering: arc,
                violation,
                max_violation: max_v,
                cost_before,
                result,
                startup,
            });
        }
        Ok(result)
    };

    if params.startup_heuristic {
        for arc in startup_arcs(network) {
            if tree.violation(arc) > 0 {
                let r = step(&mut tree, arc, true)?;
                startup_pivots += 1;
                pivots += 1;
                degenerate += u64::from(r.delta == 0);
            }
        }
    }
    let mut pricer = Pricer::new(params.rule, network.arc_count());
    while let Some(arc) = pricer.select(&tree) {
        if pivots.is_multiple_of(64) {
            deadline.check()?;
        }
        let r = step(&mut tree, arc, false)?;
        pivots += 1;
        degenerate += u64::from(r.delta == 0);
    }
    if tree.artificial_flow_positive() {
        return Err(McfError::Infeasible);
    }
    let flow = tree.original_flow();
    let report = SolverReport::optimal(network, &flow, pivots).with_counters(vec![
        ("pivots", pivots),
        ("degenerate_pivots", degenerate),
        ("startup_pivots", startup_pivots),
    ]);
    Ok(Solution { flow, report })
}
