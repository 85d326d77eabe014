//! Independent optimality checks for a flow.
//!
//! Three certificates are evaluated and must agree: no negative residual
//! cycle, potentials under which every residual arc has nonnegative reduced
//! cost, and complementary slackness on the original arcs.

use crate::bellman::{self, Relaxation, Search};
use crate::error::{McfError, Result};
use crate::minmean::{self, MeanValue, Method};
use crate::network::Network;
use crate::residual::ResidualStore;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// The flow vector has the wrong length.
    Length { expected: usize, found: usize },
    Capacity { arc: usize, flow: i64, capacity: i64 },
    Conservation { node: usize, excess: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Feasibility {
    pub feasible: bool,
    pub violations: Vec<Violation>,
}

/// Capacity bounds and conservation at every node.
pub fn check_feasible(network: &Network, flow: &[i64]) -> Feasibility {
    let m = network.arc_count();
    if flow.len() != m {
        return Feasibility {
            feasible: false,
            violations: vec![Violation::Length { expected: m, found: flow.len() }],
        };
    }
    let mut violations = Vec::new();
    for (a, &x) in flow.iter().enumerate() {
        let u = network.capacity(a);
        if x < 0 || x > u {
            violations.push(Violation::Capacity { arc: a, flow: x, capacity: u });
        }
    }
    for (v, e) in network.excesses(flow).into_iter().enumerate() {
        if e != 0 {
            violations.push(Violation::Conservation { node: v, excess: e });
        }
    }
    Feasibility { feasible: violations.is_empty(), violations }
}

/// One residual arc: the original arc and its direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResidualArc {
    pub arc: usize,
    pub forward: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidualCycle {
    /// Nodes in visiting order; the first node is not repeated at the end.
    pub nodes: Vec<usize>,
    pub arcs: Vec<ResidualArc>,
    pub cost: i64,
}

impl ResidualCycle {
    pub(crate) fn from_store(store: &ResidualStore, arcs: &[usize]) -> Self {
        ResidualCycle {
            nodes: arcs.iter().map(|&a| store.tail(a)).collect(),
            arcs: arcs
                .iter()
                .map(|&a| ResidualArc { arc: store.original_arc(a), forward: store.is_forward(a) })
                .collect(),
            cost: arcs.iter().map(|&a| store.cost(a)).sum(),
        }
    }
}

/// Negative cycle over positive-residual arcs, as residual arc ids.
pub fn find_negative_cycle(store: &ResidualStore) -> Option<Vec<usize>> {
    let mut relax = Relaxation::new(store.node_count());
    match bellman::search(store, &mut relax, |a| store.cost(a)) {
        Search::Converged => None,
        Search::Cycle(c) => Some(c),
    }
}

/// Shortest-path distances from an artificial source joined to every node by
/// zero-cost arcs. Used directly as potentials, every positive-residual arc
/// gets a nonnegative reduced cost.
pub fn optimal_potentials(store: &ResidualStore) -> Result<Vec<i64>> {
    let mut relax = Relaxation::new(store.node_count());
    match bellman::search(store, &mut relax, |a| store.cost(a)) {
        Search::Converged => Ok(relax.dist),
        Search::Cycle(_) => Err(McfError::NegativeCycle),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    NegativeCycle(ResidualCycle),
    Potentials(Vec<i64>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub feasible: bool,
    pub optimal: bool,
    pub violations: Vec<Violation>,
    /// Absent for infeasible flows.
    pub witness: Option<Witness>,
    /// Smallest ε for which the flow is ε-optimal; absent for infeasible flows.
    pub epsilon: Option<MeanValue>,
}

/// Residual arcs with positive capacity all have `reduced cost >= 0`.
fn residual_condition(store: &ResidualStore, pi: &[i64]) -> bool {
    (0..store.arc_count()).all(|a| store.residual(a) <= 0 || store.reduced_cost(a, pi) >= 0)
}

/// Complementary slackness on the original arcs.
fn slackness_condition(network: &Network, flow: &[i64], pi: &[i64]) -> bool {
    (0..network.arc_count()).all(|a| {
        let rc = network.reduced_cost(a, pi);
        let (x, u) = (flow[a], network.capacity(a));
        (rc <= 0 || x == 0) && (rc >= 0 || x == u) && (x == 0 || x == u || rc == 0)
    })
}

pub fn verify_optimality(network: &Network, flow: &[i64]) -> Result<VerifyReport> {
    let feas = check_feasible(network, flow);
    if !feas.feasible {
        return Ok(VerifyReport {
            feasible: false,
            optimal: false,
            violations: feas.violations,
            witness: None,
            epsilon: None,
        });
    }
    let store = ResidualStore::new(network, flow);
    let mut relax = Relaxation::new(store.node_count());
    let search = bellman::search(&store, &mut relax, |a| store.cost(a));
    // The labels are valid potentials only after convergence, but both
    // pointwise conditions must give the same answer for any vector.
    let pi = relax.dist;
    let by_residual = residual_condition(&store, &pi);
    let by_slackness = slackness_condition(network, flow, &pi);
    if by_residual != by_slackness {
        return Err(McfError::InternalInconsistency(format!(
            "residual reduced-cost test says {by_residual}, slackness test says {by_slackness}"
        )));
    }
    let no_cycle = matches!(search, Search::Converged);
    if no_cycle != by_residual {
        return Err(McfError::InternalInconsistency(format!(
            "cycle test says optimal={no_cycle}, potential test says optimal={by_residual}"
        )));
    }
    let (witness, epsilon) = match search {
        Search::Converged => (Witness::Potentials(pi), MeanValue::zero()),
        Search::Cycle(c) => {
            let (mmc, _) = minmean::residual_min_mean(&store, Method::Combined);
            let eps = mmc.map_or(MeanValue::zero(), |c| c.mean.negated());
            (Witness::NegativeCycle(ResidualCycle::from_store(&store, &c)), eps)
        }
    };
    Ok(VerifyReport {
        feasible: true,
        optimal: no_cycle,
        violations: Vec::new(),
        witness: Some(witness),
        epsilon: Some(epsilon),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpsilonReport {
    /// Zero for optimal flows, otherwise minus the minimum cycle mean.
    pub epsilon: MeanValue,
    /// Potentials multiplied by `epsilon.length`, so that every residual arc
    /// satisfies `c·length + π_i − π_j >= −total_cost`.
    pub potentials: Vec<i64>,
}

/// Smallest ε for which `flow` is ε-optimal, with certifying potentials.
pub fn epsilon_of_flow(network: &Network, flow: &[i64]) -> Result<EpsilonReport> {
    if !check_feasible(network, flow).feasible {
        return Err(McfError::InfeasibleFlow);
    }
    let store = ResidualStore::new(network, flow);
    let (mmc, _) = minmean::residual_min_mean(&store, Method::Combined);
    let epsilon = match mmc {
        Some(c) if c.mean.is_negative() => c.mean.negated().reduced(),
        _ => MeanValue::zero(),
    };
    let (num, den) = (epsilon.total_cost, epsilon.length as i64);
    let mut relax = Relaxation::new(store.node_count());
    match bellman::search(&store, &mut relax, |a| store.cost(a) * den + num) {
        Search::Converged => Ok(EpsilonReport { epsilon, potentials: relax.dist }),
        Search::Cycle(_) => Err(McfError::InternalInconsistency(
            "shifted costs still contain a negative cycle".into(),
        )),
    }
}

/// Whether every positive-residual arc of `flow` has
/// `c·cost_scale + π_i − π_j >= −epsilon`.
pub fn is_epsilon_optimal(network: &Network, flow: &[i64], potentials: &[i64], cost_scale: i64, epsilon: i64) -> bool {
    (0..network.arc_count()).all(|a| {
        let rc = network.cost(a) * cost_scale + potentials[network.tail(a)] - potentials[network.head(a)];
        let forward_ok = flow[a] >= network.capacity(a) || rc >= -epsilon;
        let backward_ok = flow[a] <= 0 || -rc >= -epsilon;
        forward_ok && backward_ok
    })
}
