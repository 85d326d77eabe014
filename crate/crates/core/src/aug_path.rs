//! Successive shortest paths and capacity scaling.
//!
//! Both keep an optimal pseudoflow with potentials and repeatedly augment
//! from an excess node to the nearest deficit node. Dijkstra runs on reduced
//! costs and stops as soon as it permanently labels a deficit node; only the
//! labeled nodes get their potentials moved.

use crate::error::{McfError, Result};
use crate::heap::IndexedHeap;
use crate::network::Network;
use crate::residual::ResidualStore;
use crate::solver::{CasParams, Deadline, Solution, SolverReport};

const NO_ARC: usize = usize::MAX;

/// Reusable Dijkstra state. Only nodes touched by the last search are reset.
#[derive(Debug)]
pub struct DijkstraWorkspace {
    dist: Vec<i64>,
    labeled: Vec<bool>,
    pred: Vec<usize>,
    heap: IndexedHeap,
    touched: Vec<usize>,
    scanned: Vec<usize>,
}

impl DijkstraWorkspace {
    pub fn new(n: usize) -> Self {
        DijkstraWorkspace {
            dist: vec![i64::MAX; n],
            labeled: vec![false; n],
            pred: vec![NO_ARC; n],
            heap: IndexedHeap::new(n),
            touched: Vec::new(),
            scanned: Vec::new(),
        }
    }

    fn reset(&mut self) {
        for &v in &self.touched {
            self.dist[v] = i64::MAX;
            self.labeled[v] = false;
            self.pred[v] = NO_ARC;
        }
        self.touched.clear();
        self.scanned.clear();
        self.heap.clear();
    }

    /// Shortest reduced-cost paths from `source` over arcs with residual at
    /// least `delta`, stopping at the first labeled node with excess at most
    /// `-delta`. Potentials of labeled nodes are shifted so reduced costs stay
    /// nonnegative; the target is returned if one was found.
    fn search(
        &mut self,
        store: &ResidualStore,
        pi: &mut [i64],
        excess: &[i64],
        source: usize,
        delta: i64,
    ) -> Option<usize> {
        self.reset();
        self.dist[source] = 0;
        self.touched.push(source);
        self.heap.push_or_decrease(source, 0);
        let mut target = None;
        while let Some((u, du)) = self.heap.pop() {
            self.labeled[u] = true;
            self.scanned.push(u);
            if excess[u] <= -delta {
                target = Some(u);
                break;
            }
            for a in store.out_arcs(u) {
                if store.residual(a) < delta {
                    continue;
                }
                let v = store.head(a);
                if self.labeled[v] {
                    continue;
                }
                let rc = store.reduced_cost(a, pi);
                debug_assert!(rc >= 0, "negative reduced cost {rc} on arc {a}");
                let dv = du + rc;
                if dv < self.dist[v] {
                    if self.dist[v] == i64::MAX {
                        self.touched.push(v);
                    }
                    self.dist[v] = dv;
                    self.pred[v] = a;
                    self.heap.push_or_decrease(v, dv);
                }
            }
        }
        let w = target?;
        let dw = self.dist[w];
        for &v in &self.scanned {
            pi[v] += self.dist[v] - dw;
        }
        Some(w)
    }

    /// Arcs of the path found by the last search, from source to `target`.
    fn path(&self, store: &ResidualStore, target: usize) -> Vec<usize> {
        let mut arcs = Vec::new();
        let mut v = target;
        while self.pred[v] != NO_ARC {
            let a = self.pred[v];
            arcs.push(a);
            v = store.tail(a);
        }
        arcs.reverse();
        arcs
    }
}

fn reject_negative_costs(network: &Network) -> Result<()> {
    match (0..network.arc_count()).find(|&a| network.cost(a) < 0) {
        Some(a) => Err(McfError::NegativeCost(a)),
        None => Ok(()),
    }
}

/// Sends the largest amount allowed by the endpoints and the path bottleneck.
fn augment(store: &mut ResidualStore, excess: &mut [i64], path: &[usize], source: usize, target: usize) -> i64 {
    let bottleneck = path.iter().map(|&a| store.residual(a)).min().unwrap_or(0);
    let amount = excess[source].min(-excess[target]).min(bottleneck);
    for &a in path {
        store.push(a, amount);
    }
    excess[source] -= amount;
    excess[target] += amount;
    amount
}

pub fn solve_ssp(network: &Network, deadline: &Deadline) -> Result<Solution> {
    reject_negative_costs(network)?;
    let n = network.node_count();
    let mut store = ResidualStore::new(network, &vec![0; network.arc_count()]);
    let mut excess = network.supplies().to_vec();
    let mut pi = vec![0i64; n];
    let mut ws = DijkstraWorkspace::new(n);
    let mut augmentations = 0u64;
    // Excess values never grow, so a forward cursor finds the lowest excess node.
    let mut next = 0usize;
    loop {
        while next < n && excess[next] <= 0 {
            next += 1;
        }
        if next == n {
            break;
        }
        deadline.check()?;
        let s = next;
        let w = ws.search(&store, &mut pi, &excess, s, 1).ok_or(McfError::Infeasible)?;
        let path = ws.path(&store, w);
        augment(&mut store, &mut excess, &path, s, w);
        augmentations += 1;
    }
    let flow = store.flows();
    let report = SolverReport::optimal(network, &flow, augmentations).with_counters(vec![("augmentations", augmentations)]);
    Ok(Solution { flow, report })
}

/// `alpha^floor(log_alpha(u))`, or 1 when `u < alpha`.
pub fn initial_delta(max_capacity: i64, alpha: i64) -> i64 {
    let mut delta = 1i64;
    while delta.checked_mul(alpha).is_some_and(|d| d <= max_capacity) {
        delta *= alpha;
    }
    delta
}

/// The scale values visited by capacity scaling, largest first.
pub fn delta_schedule(max_capacity: i64, alpha: i64) -> Vec<i64> {
    let mut out = Vec::new();
    let mut d = initial_delta(max_capacity, alpha);
    loop {
        out.push(d);
        if d == 1 {
            break;
        }
        d /= alpha;
    }
    out
}

pub fn solve_cas(network: &Network, params: &CasParams, deadline: &Deadline) -> Result<Solution> {
    if params.alpha < 2 {
        return Err(McfError::InvalidParameter(format!("capacity scaling factor must be at least 2, got {}", params.alpha)));
    }
    reject_negative_costs(network)?;
    if !params.extend_graph {
        return cas_core(network, params.alpha, deadline);
    }
    let extended = extend(network)?;
    let mut sol = cas_core(&extended, params.alpha, deadline)?;
    let m = network.arc_count();
    if sol.flow[m..].iter().any(|&x| x > 0) {
        return Err(McfError::Infeasible);
    }
    sol.flow.truncate(m);
    sol.report.objective = Some(network.objective(&sol.flow));
    Ok(sol)
}

/// Adds a hub node linked both ways to every node with capacity `nU` and cost `nC`.
fn extend(network: &Network) -> Result<Network> {
    let n = network.node_count();
    let mags = network.magnitudes();
    let big_u = (n as i64).checked_mul(mags.max_capacity.max(1)).ok_or(McfError::OverflowRisk("extended capacity"))?;
    let big_c = (n as i64).checked_mul(mags.max_cost.max(1)).ok_or(McfError::OverflowRisk("extended cost"))?;
    let mut arcs: Vec<(usize, usize)> = network.arcs().collect();
    let mut caps = network.capacities().to_vec();
    let mut costs = network.costs().to_vec();
    for v in 0..n {
        arcs.push((v, n));
        arcs.push((n, v));
        caps.extend([big_u, big_u]);
        costs.extend([big_c, big_c]);
    }
    let mut supplies = network.supplies().to_vec();
    supplies.push(0);
    Network::new(n + 1, &arcs, &caps, &costs, &supplies)
}

fn cas_core(network: &Network, alpha: i64, deadline: &Deadline) -> Result<Solution> {
    let n = network.node_count();
    let mut store = ResidualStore::new(network, &vec![0; network.arc_count()]);
    let mut excess = network.supplies().to_vec();
    let mut pi = vec![0i64; n];
    let mut ws = DijkstraWorkspace::new(n);
    let mut augmentations = 0u64;
    let mut saturations = 0u64;
    let mut phases = 0u64;
    for delta in delta_schedule(network.magnitudes().max_capacity, alpha) {
        phases += 1;
        // Arcs that just entered the delta-residual network may violate the
        // reduced-cost condition; saturate them.
        for a in 0..store.arc_count() {
            let r = store.residual(a);
            if r >= delta && store.reduced_cost(a, &pi) < 0 {
                store.push(a, r);
                excess[store.tail(a)] -= r;
                excess[store.head(a)] += r;
                saturations += 1;
            }
        }
        for s in 0..n {
            while excess[s] >= delta {
                deadline.check()?;
                let Some(w) = ws.search(&store, &mut pi, &excess, s, delta) else {
                    break;
                };
                let path = ws.path(&store, w);
                let sent = augment(&mut store, &mut excess, &path, s, w);
                debug_assert!(sent >= delta);
                augmentations += 1;
            }
        }
    }
    if excess.iter().any(|&e| e != 0) {
        return Err(McfError::Infeasible);
    }
    let flow = store.flows();
    let report = SolverReport::optimal(network, &flow, augmentations).with_counters(vec![
        ("augmentations", augmentations),
        ("saturations", saturations),
        ("phases", phases),
    ]);
    Ok(Solution { flow, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::fixtures::{t1, t1_infeasible, zero_supply};
    use crate::network::NetworkBuilder;

    #[test]
    fn ssp_t1() {
        let s = solve_ssp(&t1(), &Deadline::none()).unwrap();
        assert_eq!(s.report.objective, Some(12));
        assert!(s.report.iterations <= 4);
    }

    #[test]
    fn ssp_unit_path() {
        let mut b = NetworkBuilder::new(6).supply(0, 1).supply(5, -1);
        for v in 0..5 {
            b.push_arc(v, v + 1, 1, 1);
        }
        let s = solve_ssp(&b.build().unwrap(), &Deadline::none()).unwrap();
        assert_eq!(s.report.iterations, 1);
        assert_eq!(s.report.objective, Some(5));
    }

    #[test]
    fn zero_supply_no_augmentation() {
        let s = solve_ssp(&zero_supply(), &Deadline::none()).unwrap();
        assert_eq!(s.report.iterations, 0);
        let s = solve_cas(&zero_supply(), &CasParams::default(), &Deadline::none()).unwrap();
        assert_eq!(s.report.iterations, 0);
    }

    #[test]
    fn negative_costs_rejected() {
        let net = NetworkBuilder::new(2).supply(0, 1).supply(1, -1).arc(0, 1, 1, -2).build().unwrap();
        assert_eq!(solve_ssp(&net, &Deadline::none()).unwrap_err(), McfError::NegativeCost(0));
        assert_eq!(
            solve_cas(&net, &CasParams::default(), &Deadline::none()).unwrap_err(),
            McfError::NegativeCost(0)
        );
    }

    #[test]
    fn delta_examples() {
        assert_eq!(initial_delta(4, 4), 4);
        assert_eq!(delta_schedule(1000, 4), vec![256, 64, 16, 4, 1]);
        assert_eq!(delta_schedule(1, 4), vec![1]);
        assert_eq!(delta_schedule(0, 4), vec![1]);
    }

    #[test]
    fn cas_t1_both_modes() {
        for extend_graph in [false, true] {
            let p = CasParams { alpha: 4, extend_graph };
            let s = solve_cas(&t1(), &p, &Deadline::none()).unwrap();
            assert_eq!(s.report.objective, Some(12));
        }
    }

    #[test]
    fn infeasible_detected() {
        assert_eq!(solve_ssp(&t1_infeasible(), &Deadline::none()).unwrap_err(), McfError::Infeasible);
        for extend_graph in [false, true] {
            let p = CasParams { alpha: 4, extend_graph };
            assert_eq!(solve_cas(&t1_infeasible(), &p, &Deadline::none()).unwrap_err(), McfError::Infeasible);
        }
    }
}
