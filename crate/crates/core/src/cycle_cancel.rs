//! Primal cycle-canceling solvers.
//!
//! All three start from a feasible flow found by max-flow and cancel
//! negative residual cycles until none is left:
//! - SCC finds cycles with Bellman–Ford, pausing to harvest predecessor cycles.
//! - MMCC always cancels a minimum-mean cycle.
//! - CAT alternates canceling admissible cycles with potential tightening.

use crate::bellman::{Checkpoints, Relaxation, Search};
use crate::error::{McfError, Result};
use crate::maxflow;
use crate::minmean::{self, Method};
use crate::network::{FlowState, Network};
use crate::residual::ResidualStore;
use crate::solver::{Deadline, Solution, SolverReport};

/// Any flow meeting supplies, demands and capacities.
pub fn initial_feasible_flow(network: &Network) -> Result<FlowState> {
    let flow = maxflow::feasible_flow(network, &Deadline::none())?;
    Ok(FlowState::from_flow(network, flow))
}

/// Saturates `cycle` by its bottleneck and returns the amount sent.
fn cancel(store: &mut ResidualStore, cycle: &[usize]) -> i64 {
    let delta = cycle.iter().map(|&a| store.residual(a)).min().unwrap_or(0);
    for &a in cycle {
        store.push(a, delta);
    }
    delta
}

fn cycle_cost(store: &ResidualStore, cycle: &[usize]) -> i64 {
    cycle.iter().map(|&a| store.cost(a)).sum()
}

pub fn solve_scc(network: &Network, deadline: &Deadline) -> Result<Solution> {
    let flow = maxflow::feasible_flow(network, deadline)?;
    let mut store = ResidualStore::new(network, &flow);
    let n = network.node_count();
    let mut relax = Relaxation::new(n);
    let mut checkpoints = Checkpoints::new(n);
    let mut canceled = 0u64;
    let mut restarts = 0u64;
    loop {
        deadline.check()?;
        let cost = |a: usize| store.cost(a);
        if !relax.pass(&store, cost) {
            break;
        }
        if !checkpoints.hit(relax.passes) {
            continue;
        }
        let cycles = relax.pred_cycles(&store, true);
        let mut any = false;
        for c in cycles {
            if cycle_cost(&store, &c) < 0 {
                cancel(&mut store, &c);
                canceled += 1;
                any = true;
            }
        }
        if any {
            relax.restart();
            checkpoints.reset();
            restarts += 1;
        }
    }
    let flow = store.flows();
    let report = SolverReport::optimal(network, &flow, canceled).with_counters(vec![
        ("cancellations", canceled),
        ("bellman_ford_runs", restarts + 1),
        ("relaxations", relax.relaxations),
    ]);
    Ok(Solution { flow, report })
}

pub fn solve_mmcc(network: &Network, deadline: &Deadline) -> Result<Solution> {
    let flow = maxflow::feasible_flow(network, deadline)?;
    let mut store = ResidualStore::new(network, &flow);
    let mut canceled = 0u64;
    let mut fallbacks = 0u64;
    loop {
        deadline.check()?;
        let (found, stats) = minmean::residual_min_mean(&store, Method::Combined);
        if stats.limit_hit {
            fallbacks += 1;
        }
        match found {
            Some(c) if c.mean.is_negative() => {
                cancel(&mut store, &c.arcs);
                canceled += 1;
            }
            _ => break,
        }
    }
    let flow = store.flows();
    let report = SolverReport::optimal(network, &flow, canceled)
        .with_counters(vec![("cancellations", canceled), ("howard_fallbacks", fallbacks)]);
    Ok(Solution { flow, report })
}

/// State handed to the CAT observer after each strict tightening.
#[derive(Debug)]
pub struct CatCheckpoint<'a> {
    pub flow: &'a [i64],
    /// Potentials in scaled cost units.
    pub potentials: &'a [i64],
    /// Current ε in scaled cost units.
    pub epsilon: i64,
    /// Factor the original costs are multiplied by.
    pub cost_scale: i64,
}

pub fn solve_cat(network: &Network, deadline: &Deadline) -> Result<Solution> {
    solve_cat_observed(network, deadline, &mut |_| {})
}

/// Cancel-and-tighten. Costs are multiplied by `n²` so that ε stays an
/// integer; the run ends once ε drops below `n`, i.e. below `1/n` in
/// original units.
pub fn solve_cat_observed(
    network: &Network,
    deadline: &Deadline,
    observer: &mut dyn FnMut(&CatCheckpoint<'_>),
) -> Result<Solution> {
    let n = network.node_count();
    let c_max = network.magnitudes().max_cost;
    let scale = (n as i64).checked_mul(n as i64).ok_or(McfError::OverflowRisk("cancel-and-tighten cost scale"))?;
    // Strict tightening resets potentials to shortest-path distances, at most
    // n·(S·C + ε) in size, and the relaxed steps in between move them by at
    // most ε each, so |π| stays below 3n·S·C.
    if 8 * (n as i128 + 1) * (scale as i128) * (c_max.max(1) as i128) > (i64::MAX / 4) as i128 {
        return Err(McfError::OverflowRisk("cancel-and-tighten potentials"));
    }
    let flow = maxflow::feasible_flow(network, deadline)?;
    let mut store = ResidualStore::new(network, &flow);
    store.scale_costs(scale);

    let strict_every = (n as f64).sqrt().floor().max(1.0) as u64;
    let mut pi = vec![0i64; n];
    let mut eps = scale * c_max;
    let mut iterations = 0u64;
    let mut since_strict = 0u64;
    let mut canceled = 0u64;
    let mut strict = 0u64;
    let mut work = CatWork::new(n);
    while eps >= n as i64 {
        deadline.check()?;
        canceled += work.cancel_admissible_cycles(&mut store, &pi, deadline)?;
        iterations += 1;
        since_strict += 1;
        if since_strict >= strict_every {
            since_strict = 0;
            strict += 1;
            // Exact ε from the minimum cycle mean, in original costs.
            let (found, _) = minmean::residual_min_mean(&store, Method::Combined);
            let mean = match found {
                Some(c) if c.mean.is_negative() => c.mean,
                _ => break,
            };
            // mean is in scaled units here, since the store holds scaled costs.
            eps = mean.negated().ceil();
            let mut relax = Relaxation::new(n);
            match crate::bellman::search(&store, &mut relax, |a| store.cost(a) + eps) {
                Search::Converged => pi = relax.dist,
                Search::Cycle(_) => {
                    return Err(McfError::InternalInconsistency("tightened costs contain a negative cycle".into()))
                }
            }
            let flow = store.flows();
            observer(&CatCheckpoint { flow: &flow, potentials: &pi, epsilon: eps, cost_scale: scale });
        } else {
            eps = work.relaxed_tighten(&store, &mut pi, eps);
        }
    }
    let flow = store.flows();
    let report = SolverReport::optimal(network, &flow, iterations).with_counters(vec![
        ("cancellations", canceled),
        ("strict_tightens", strict),
        ("iterations", iterations),
    ]);
    Ok(Solution { flow, report })
}

struct CatWork {
    color: Vec<u8>,
    cur: Vec<usize>,
    stack: Vec<usize>,
    via: Vec<usize>,
    indeg: Vec<usize>,
    longest: Vec<i64>,
    order: Vec<usize>,
}

impl CatWork {
    fn new(n: usize) -> Self {
        CatWork {
            color: vec![0; n],
            cur: vec![0; n],
            stack: Vec::new(),
            via: Vec::new(),
            indeg: vec![0; n],
            longest: vec![0; n],
            order: Vec::with_capacity(n),
        }
    }

    /// Depth-first search over admissible arcs, canceling every cycle it
    /// closes. Canceling only removes admissible arcs, so finished nodes stay
    /// finished and the network is acyclic when the search ends.
    fn cancel_admissible_cycles(&mut self, store: &mut ResidualStore, pi: &[i64], deadline: &Deadline) -> Result<u64> {
        let n = store.node_count();
        let admissible = |s: &ResidualStore, a: usize| s.residual(a) > 0 && s.reduced_cost(a, pi) < 0;
        self.color.fill(0);
        for v in 0..n {
            self.cur[v] = store.first_out(v);
        }
        let mut canceled = 0u64;
        for root in 0..n {
            if self.color[root] != 0 {
                continue;
            }
            self.color[root] = 1;
            self.stack.clear();
            self.via.clear();
            self.stack.push(root);
            while let Some(&u) = self.stack.last() {
                let end = store.out_arcs(u).end;
                while self.cur[u] < end && !admissible(store, self.cur[u]) {
                    self.cur[u] += 1;
                }
                if self.cur[u] == end {
                    self.color[u] = 2;
                    self.stack.pop();
                    if let Some(a) = self.via.pop() {
                        // The parent moves past the arc leading here.
                        let p = store.tail(a);
                        self.cur[p] += 1;
                    }
                    continue;
                }
                let a = self.cur[u];
                let v = store.head(a);
                match self.color[v] {
                    0 => {
                        self.color[v] = 1;
                        self.stack.push(v);
                        self.via.push(a);
                    }
                    1 => {
                        let start = self.stack.iter().rposition(|&x| x == v).unwrap();
                        let mut cycle: Vec<usize> = self.via[start..].to_vec();
                        cycle.push(a);
                        cancel(store, &cycle);
                        canceled += 1;
                        if canceled.is_multiple_of(1024) {
                            deadline.check()?;
                        }
                        // Unwind to the node that closed the cycle; nodes
                        // above it are searched again later.
                        for &x in &self.stack[start + 1..] {
                            self.color[x] = 0;
                        }
                        self.stack.truncate(start + 1);
                        self.via.truncate(start);
                    }
                    _ => self.cur[u] += 1,
                }
            }
        }
        Ok(canceled)
    }

    /// Lowers potentials along longest admissible paths so that ε shrinks by
    /// `floor(ε/n)`. Returns the new ε.
    fn relaxed_tighten(&mut self, store: &ResidualStore, pi: &mut [i64], eps: i64) -> i64 {
        let n = store.node_count();
        let step = eps / n as i64;
        self.indeg.fill(0);
        for a in 0..store.arc_count() {
            if store.residual(a) > 0 && store.reduced_cost(a, pi) < 0 {
                self.indeg[store.head(a)] += 1;
            }
        }
        self.order.clear();
        self.order.extend((0..n).filter(|&v| self.indeg[v] == 0));
        self.longest.fill(0);
        let mut i = 0;
        while i < self.order.len() {
            let u = self.order[i];
            i += 1;
            for a in store.out_arcs(u) {
                if store.residual(a) > 0 && store.reduced_cost(a, pi) < 0 {
                    let v = store.head(a);
                    self.longest[v] = self.longest[v].max(self.longest[u] + 1);
                    self.indeg[v] -= 1;
                    if self.indeg[v] == 0 {
                        self.order.push(v);
                    }
                }
            }
        }
        debug_assert_eq!(self.order.len(), n, "admissible network has a cycle after canceling");
        for (p, &l) in pi.iter_mut().zip(&self.longest) {
            *p -= l * step;
        }
        // Take the actual violation when it is smaller than the bound.
        let worst = (0..store.arc_count())
            .filter(|&a| store.residual(a) > 0)
            .map(|a| store.reduced_cost(a, pi))
            .min()
            .unwrap_or(0);
        (eps - step).min((-worst).max(0))
    }
}
