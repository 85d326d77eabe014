//! Cost scaling with push-relabel, augment-relabel and partial
//! augment-relabel refine steps.
//!
//! Costs are multiplied by `alpha * n` so every ε stays an integer. The run
//! starts from ε0 = `alpha^ceil(log_alpha(alpha * n * C))`, divides ε by alpha
//! each phase and stops after the phase with ε = 1, which in original cost
//! units is below `1/n`.

use std::collections::VecDeque;

use crate::bellman::{self, Relaxation, Search};
use crate::error::{McfError, Result};
use crate::heap::IndexedHeap;
use crate::maxflow;
use crate::network::{Network, ALPHA_MAX};
use crate::residual::ResidualStore;
use crate::solver::{CosParams, CosVariant, Deadline, Solution, SolverReport};

/// Counters for one refine phase.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PhaseStats {
    /// ε of this phase in scaled cost units.
    pub epsilon: i64,
    /// Price refinement found potentials and the refine was skipped.
    pub skipped: bool,
    pub saturations: u64,
    pub pushes: u64,
    pub relabels: u64,
    pub global_updates: u64,
    pub look_ahead_cuts: u64,
}

/// State passed to the observer at the end of every phase.
#[derive(Debug)]
pub struct PhaseView<'a> {
    pub epsilon: i64,
    /// Factor the original costs were multiplied by.
    pub cost_scale: i64,
    pub flow: &'a [i64],
    pub potentials: &'a [i64],
    pub stats: &'a PhaseStats,
}

/// Starting ε for `n` nodes and largest absolute cost `c` (0 counts as 1).
pub fn initial_epsilon(n: usize, c: i64, alpha: i64) -> Result<i64> {
    let target = alpha as i128 * n as i128 * c.max(1) as i128;
    let mut eps: i128 = 1;
    while eps < target {
        eps *= alpha as i128;
    }
    i64::try_from(eps).map_err(|_| McfError::OverflowRisk("initial epsilon"))
}

/// Number of refine phases, `ceil(log_alpha(alpha * n * C))`.
pub fn phase_count(n: usize, c: i64, alpha: i64) -> Result<usize> {
    let mut eps = initial_epsilon(n, c, alpha)?;
    let mut k = 0;
    while eps > 1 {
        eps /= alpha;
        k += 1;
    }
    Ok(k)
}

pub fn solve_cos(network: &Network, params: &CosParams, deadline: &Deadline) -> Result<Solution> {
    solve_cos_observed(network, params, deadline, &mut |_| {})
}

pub fn solve_cos_observed(
    network: &Network,
    params: &CosParams,
    deadline: &Deadline,
    observer: &mut dyn FnMut(&PhaseView<'_>),
) -> Result<Solution> {
    let alpha = params.alpha;
    if !(2..=ALPHA_MAX).contains(&alpha) {
        return Err(McfError::InvalidParameter(format!("cost scaling factor must be in [2, {ALPHA_MAX}], got {alpha}")));
    }
    if params.k == 0 {
        return Err(McfError::InvalidParameter("path length limit must be positive".into()));
    }
    let n = network.node_count();
    let c_max = network.magnitudes().max_cost;
    let eps0 = initial_epsilon(n, c_max, alpha)?;
    if 8 * (n as i128 + 1) * alpha as i128 * eps0 as i128 > (i64::MAX / 4) as i128 {
        return Err(McfError::OverflowRisk("cost scaling potentials"));
    }
    if !params.heuristics.global_update {
        maxflow::feasible_flow(network, deadline)?;
    }
    let scale = alpha * n as i64;
    let mut state = CosState::new(network, params, scale);
    let mut eps = eps0;
    let mut phases = Vec::new();
    while eps > 1 {
        eps /= alpha;
        let stats = state.phase(eps, deadline)?;
        let flow = state.store.flows();
        observer(&PhaseView { epsilon: eps, cost_scale: scale, flow: &flow, potentials: &state.pi, stats: &stats });
        phases.push(stats);
    }
    let flow = state.store.flows();
    let sum = |f: fn(&PhaseStats) -> u64| phases.iter().map(f).sum::<u64>();
    let counters = vec![
        ("phases", phases.len() as u64),
        ("skipped_phases", sum(|p| u64::from(p.skipped))),
        ("pushes", sum(|p| p.pushes)),
        ("relabels", sum(|p| p.relabels)),
        ("global_updates", sum(|p| p.global_updates)),
        ("saturations", sum(|p| p.saturations)),
    ];
    let mut report = SolverReport::optimal(network, &flow, phases.len() as u64).with_counters(counters);
    report.phases = phases;
    Ok(Solution { flow, report })
}

/// Working state of the refine loop.
pub struct CosState {
    store: ResidualStore,
    excess: Vec<i64>,
    pi: Vec<i64>,
    eps: i64,
    variant: CosVariant,
    path_limit: usize,
    price_refinement: bool,
    global_update: bool,
    look_ahead: bool,
    cur: Vec<usize>,
    queue: VecDeque<usize>,
    in_queue: Vec<bool>,
    /// Nodes cut off by look-ahead, processed before the queue.
    front: Vec<usize>,
    hyper: Vec<bool>,
    relabels_since_update: u64,
    update_every: u64,
    path: Vec<usize>,
    on_path: Vec<bool>,
    labels: Vec<i64>,
    done: Vec<bool>,
    heap: IndexedHeap,
    stats: PhaseStats,
}

impl CosState {
    fn new(network: &Network, params: &CosParams, scale: i64) -> Self {
        let n = network.node_count();
        let mut store = ResidualStore::new(network, &vec![0; network.arc_count()]);
        store.scale_costs(scale);
        let path_limit = match params.variant {
            CosVariant::PushRelabel => 1,
            CosVariant::AugmentRelabel => n.max(1),
            CosVariant::PartialAugmentRelabel => params.k,
        };
        CosState {
            excess: network.supplies().to_vec(),
            pi: vec![0; n],
            eps: 0,
            variant: params.variant,
            path_limit,
            price_refinement: params.heuristics.price_refinement,
            global_update: params.heuristics.global_update,
            look_ahead: params.heuristics.push_look_ahead && params.variant == CosVariant::PushRelabel,
            cur: (0..n).map(|v| store.first_out(v)).collect(),
            queue: VecDeque::new(),
            in_queue: vec![false; n],
            front: Vec::new(),
            hyper: vec![false; n],
            relabels_since_update: 0,
            update_every: (n as u64 / 2).max(1),
            path: Vec::new(),
            on_path: vec![false; n],
            labels: vec![0; n],
            done: vec![false; n],
            heap: IndexedHeap::new(n),
            store,
            stats: PhaseStats::default(),
        }
    }

    fn node_count(&self) -> usize {
        self.pi.len()
    }

    fn reset_current_arcs(&mut self) {
        for v in 0..self.node_count() {
            self.cur[v] = self.store.first_out(v);
        }
    }

    #[inline]
    fn rc(&self, a: usize) -> i64 {
        self.store.reduced_cost(a, &self.pi)
    }

    #[inline]
    fn admissible(&self, a: usize) -> bool {
        self.store.residual(a) > 0 && self.rc(a) < 0
    }

    /// One refine phase at `eps`.
    fn phase(&mut self, eps: i64, deadline: &Deadline) -> Result<PhaseStats> {
        self.eps = eps;
        self.stats = PhaseStats { epsilon: eps, ..Default::default() };
        if self.price_refinement && self.excess.iter().all(|&e| e == 0) && self.price_refine() {
            self.stats.skipped = true;
            return Ok(std::mem::take(&mut self.stats));
        }
        // Make the pseudoflow 0-optimal by saturating every admissible arc.
        for a in 0..self.store.arc_count() {
            if self.admissible(a) {
                let r = self.store.residual(a);
                self.store.push(a, r);
                self.excess[self.store.tail(a)] -= r;
                self.excess[self.store.head(a)] += r;
                self.stats.saturations += 1;
            }
        }
        self.reset_current_arcs();
        self.queue.clear();
        self.front.clear();
        self.hyper.fill(false);
        for v in 0..self.node_count() {
            self.in_queue[v] = self.excess[v] > 0;
            if self.in_queue[v] {
                self.queue.push_back(v);
            }
        }
        let mut steps = 0u64;
        while let Some(u) = self.next_active() {
            steps += 1;
            if steps.is_multiple_of(256) {
                deadline.check()?;
            }
            if self.global_update && self.relabels_since_update >= self.update_every {
                self.relabels_since_update = 0;
                self.global_update()?;
                self.hyper.fill(false);
                continue;
            }
            if self.variant == CosVariant::PushRelabel {
                self.push_step(u)?;
            } else {
                self.path_step(u)?;
            }
        }
        debug_assert!(self.excess.iter().all(|&e| e == 0));
        Ok(std::mem::take(&mut self.stats))
    }

    /// Front-most node that still needs work; drops finished entries.
    fn next_active(&mut self) -> Option<usize> {
        while let Some(&t) = self.front.last() {
            if self.excess[t] > 0 || self.hyper[t] {
                return Some(t);
            }
            self.front.pop();
        }
        while let Some(&u) = self.queue.front() {
            if self.excess[u] > 0 || self.hyper[u] {
                return Some(u);
            }
            self.queue.pop_front();
            self.in_queue[u] = false;
        }
        None
    }

    fn activate(&mut self, v: usize) {
        if self.excess[v] > 0 && !self.in_queue[v] {
            self.in_queue[v] = true;
            self.queue.push_back(v);
        }
    }

    fn push(&mut self, a: usize, amount: i64) {
        if amount <= 0 {
            return;
        }
        self.store.push(a, amount);
        self.excess[self.store.tail(a)] -= amount;
        let v = self.store.head(a);
        self.excess[v] += amount;
        self.stats.pushes += 1;
        self.activate(v);
    }

    /// Next admissible arc at `u` starting from its current arc.
    fn find_admissible(&mut self, u: usize) -> Option<usize> {
        let end = self.store.out_arcs(u).end;
        let mut a = self.cur[u];
        while a < end {
            if self.admissible(a) {
                self.cur[u] = a;
                return Some(a);
            }
            a += 1;
        }
        self.cur[u] = end;
        None
    }

    /// Lowers `pi[u]` as far as ε-optimality allows. `extra` is one more arc
    /// to include in the minimum even without residual capacity.
    fn relabel(&mut self, u: usize, extra: Option<usize>) -> Result<()> {
        let mut min_rc = i64::MAX;
        for a in self.store.out_arcs(u) {
            if self.store.residual(a) > 0 {
                min_rc = min_rc.min(self.rc(a));
            }
        }
        if let Some(a) = extra {
            min_rc = min_rc.min(self.rc(a));
        }
        if min_rc == i64::MAX {
            return if self.excess[u] > 0 { Err(McfError::Infeasible) } else { Ok(()) };
        }
        let drop = min_rc + self.eps;
        if drop <= 0 {
            // Only reachable for look-ahead nodes that still have admissible arcs.
            return Ok(());
        }
        self.pi[u] -= drop;
        self.cur[u] = self.store.first_out(u);
        self.stats.relabels += 1;
        self.relabels_since_update += 1;
        Ok(())
    }

    /// Cap on what `node` can absorb: its deficit plus the residual capacity
    /// of its admissible arcs. Stops adding once `enough` is reached.
    pub fn push_look_ahead_limit(&self, node: usize, enough: i64) -> i64 {
        let mut ahead = -self.excess[node];
        let end = self.store.out_arcs(node).end;
        for a in self.cur[node]..end {
            if ahead >= enough {
                break;
            }
            if self.admissible(a) {
                ahead += self.store.residual(a);
            }
        }
        ahead.max(0)
    }

    /// Push-relabel: relabel `u` until it has an admissible arc, then push once.
    fn push_step(&mut self, u: usize) -> Result<()> {
        loop {
            if self.excess[u] <= 0 {
                self.relabel(u, None)?;
                self.hyper[u] = false;
                return Ok(());
            }
            let Some(a) = self.find_admissible(u) else {
                self.relabel(u, None)?;
                self.hyper[u] = false;
                continue;
            };
            let t = self.store.head(a);
            let delta = self.excess[u].min(self.store.residual(a));
            if self.look_ahead && !self.hyper[t] {
                let limit = self.push_look_ahead_limit(t, delta);
                // A node with no residual way out cannot be relabeled to
                // absorb more, so cutting the push would only repeat.
                if limit < delta && self.store.out_arcs(t).any(|b| self.store.residual(b) > 0) {
                    self.push(a, limit);
                    self.hyper[t] = true;
                    self.front.push(t);
                    self.stats.look_ahead_cuts += 1;
                    return Ok(());
                }
            }
            self.push(a, delta);
            return Ok(());
        }
    }

    /// Builds an admissible path from `start` of at most `path_limit` arcs,
    /// ending early at a deficit node, then pushes along it.
    fn path_step(&mut self, start: usize) -> Result<()> {
        let mut path = std::mem::take(&mut self.path);
        path.clear();
        let mut tip = start;
        self.on_path[start] = true;
        while path.len() < self.path_limit && self.excess[tip] >= 0 {
            if let Some(a) = self.find_admissible(tip) {
                path.push(a);
                let v = self.store.head(a);
                if self.on_path[v] {
                    break;
                }
                self.on_path[v] = true;
                tip = v;
                continue;
            }
            let back = path.last().map(|&a| self.store.sister(a));
            self.relabel(tip, back)?;
            if let Some(a) = path.pop() {
                self.on_path[tip] = false;
                tip = self.store.tail(a);
            }
            // Let the main loop run the global update; it is also what
            // notices excess that can never reach a deficit. Relabels at the
            // start node alone always end, as in push-relabel.
            if back.is_some() && self.global_update && self.relabels_since_update >= self.update_every {
                break;
            }
        }
        self.on_path[start] = false;
        for &a in &path {
            self.on_path[self.store.head(a)] = false;
            let u = self.store.tail(a);
            let delta = self.excess[u].min(self.store.residual(a));
            self.push(a, delta);
        }
        self.path = path;
        Ok(())
    }

    /// Set-relabel from all deficit nodes at once: every node's potential
    /// drops by ε times its distance to a deficit, with arc lengths
    /// `floor(rc/ε) + 1` (0 for admissible arcs), capped at the distance of
    /// the farthest active node.
    fn global_update(&mut self) -> Result<()> {
        let n = self.node_count();
        self.stats.global_updates += 1;
        let mut remaining = self.excess.iter().filter(|&&e| e > 0).count();
        if remaining == 0 {
            return Ok(());
        }
        self.labels.fill(i64::MAX);
        self.done.fill(false);
        self.heap.clear();
        for v in 0..n {
            if self.excess[v] < 0 {
                self.labels[v] = 0;
                self.heap.push_or_decrease(v, 0);
            }
        }
        let mut cap = 0i64;
        while let Some((v, dv)) = self.heap.pop() {
            self.done[v] = true;
            if self.excess[v] > 0 {
                remaining -= 1;
                if remaining == 0 {
                    cap = dv;
                    break;
                }
            }
            for b in self.store.out_arcs(v) {
                let a = self.store.sister(b);
                if self.store.residual(a) <= 0 {
                    continue;
                }
                let u = self.store.tail(a);
                if self.done[u] {
                    continue;
                }
                let len = (self.rc(a).div_euclid(self.eps) + 1).max(0);
                let du = dv + len;
                if du < self.labels[u] {
                    self.labels[u] = du;
                    self.heap.push_or_decrease(u, du);
                }
            }
        }
        if remaining > 0 {
            return Err(McfError::Infeasible);
        }
        for v in 0..n {
            let k = if self.done[v] { self.labels[v] } else { cap };
            self.pi[v] -= self.eps * k;
        }
        self.reset_current_arcs();
        Ok(())
    }

    /// Tries to make the current flow ε-optimal by moving potentials only:
    /// shortest paths with arc lengths `floor(rc/ε) + 1`. Succeeds when those
    /// lengths have no negative cycle.
    fn price_refine(&mut self) -> bool {
        let eps = self.eps;
        let mut relax = Relaxation::new(self.node_count());
        let store = &self.store;
        let pi = &self.pi;
        let search =
            bellman::search_with_checkpoints(store, &mut relax, |a| store.reduced_cost(a, pi).div_euclid(eps) + 1);
        match search {
            Search::Converged => {
                for (p, d) in self.pi.iter_mut().zip(&relax.dist) {
                    *p += eps * d;
                }
                self.reset_current_arcs();
                true
            }
            Search::Cycle(_) => false,
        }
    }

    /// Whether every positive-residual arc has reduced cost at least `-eps`.
    #[cfg(test)]
    fn is_eps_optimal(&self, eps: i64) -> bool {
        (0..self.store.arc_count()).all(|a| self.store.residual(a) <= 0 || self.rc(a) >= -eps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::fixtures::{t1, t1_infeasible, zero_supply};
    use crate::network::NetworkBuilder;
    use crate::solver::Heuristics;
    use crate::verify::verify_optimality;
    use std::time::Duration;

    fn variants() -> Vec<CosParams> {
        let mut out = Vec::new();
        for v in [CosVariant::PushRelabel, CosVariant::AugmentRelabel, CosVariant::PartialAugmentRelabel] {
            out.push(CosParams::variant(v));
            out.push(CosParams { heuristics: Heuristics::none(), ..CosParams::variant(v) });
        }
        out
    }

    #[test]
    fn initial_epsilon_example() {
        assert_eq!(initial_epsilon(4, 3, 16).unwrap(), 256);
        assert_eq!(phase_count(4, 3, 16).unwrap(), 2);
    }

    #[test]
    fn t1_all_variants() {
        for p in variants() {
            let s = solve_cos(&t1(), &p, &Deadline::none()).unwrap();
            assert_eq!(s.report.objective, Some(12), "{p:?}");
            assert!(verify_optimality(&t1(), &s.flow).unwrap().optimal);
        }
    }

    #[test]
    fn zero_supply_phases_are_empty() {
        for p in variants() {
            let s = solve_cos(&zero_supply(), &p, &Deadline::none()).unwrap();
            assert_eq!(s.report.objective, Some(0));
            assert!(s.report.phases.iter().all(|ph| ph.pushes == 0 && ph.relabels == 0));
        }
    }

    #[test]
    fn infeasible_all_variants() {
        for p in variants() {
            assert_eq!(solve_cos(&t1_infeasible(), &p, &Deadline::none()).unwrap_err(), McfError::Infeasible);
        }
    }

    #[test]
    fn bad_parameters() {
        let p = CosParams { alpha: 1, ..Default::default() };
        assert!(matches!(solve_cos(&t1(), &p, &Deadline::none()), Err(McfError::InvalidParameter(_))));
        let p = CosParams { k: 0, ..Default::default() };
        assert!(matches!(solve_cos(&t1(), &p, &Deadline::none()), Err(McfError::InvalidParameter(_))));
    }

    fn two_node_state() -> CosState {
        let net = NetworkBuilder::new(2).supply(0, 1).supply(1, -1).arc(0, 1, 1, 0).build().unwrap();
        let mut st = CosState::new(&net, &CosParams::default(), 1);
        st.eps = 4;
        st
    }

    #[test]
    fn global_update_two_nodes() {
        let mut st = two_node_state();
        let before = st.rc(st.store.forward_arc(0));
        assert_eq!(before, 0);
        st.global_update().unwrap();
        // One ε step separates the active node from the deficit.
        assert_eq!(st.pi[0] - st.pi[1], -4);
        assert_eq!(st.rc(st.store.forward_arc(0)), -4);
        assert!(st.is_eps_optimal(4));
    }

    #[test]
    fn global_update_keeps_reachable_state() {
        let mut st = two_node_state();
        st.pi[0] = -4;
        st.global_update().unwrap();
        assert_eq!(st.pi, vec![-4, 0]);
    }

    #[test]
    fn look_ahead_limits() {
        // Pure deficit node without admissible arcs.
        let mut st = two_node_state();
        assert_eq!(st.push_look_ahead_limit(1, 10), 1);
        // Balanced node with one admissible arc of capacity 5.
        let net = NetworkBuilder::new(3).arc(0, 1, 5, 1).arc(1, 2, 5, -1).arc(2, 0, 5, 1).build().unwrap();
        st = CosState::new(&net, &CosParams::default(), 1);
        st.eps = 1;
        assert_eq!(st.push_look_ahead_limit(1, 10), 5);
    }

    #[test]
    fn look_ahead_into_a_dead_end_still_pushes() {
        // Node 4 only has incoming arcs, so nothing leaves it before a push.
        let net = NetworkBuilder::new(6)
            .supplies(&[2, -3, -1, 2, 0, 0])
            .arc(0, 1, 3, 4)
            .arc(1, 2, 3, 3)
            .arc(3, 1, 2, 1)
            .arc(0, 4, 2, 0)
            .arc(5, 4, 1, 3)
            .arc(5, 1, 0, 2)
            .arc(2, 1, 0, 5)
            .arc(2, 5, 0, 4)
            .build()
            .unwrap();
        let sol = solve_cos(&net, &CosParams::variant(CosVariant::PushRelabel), &Deadline::after(Duration::from_secs(5))).unwrap();
        assert_eq!(sol.report.objective, Some(13));
    }

    #[test]
    fn trapped_excess_is_infeasible_for_path_variants() {
        // Supply circles between 0 and 1 with no way to the deficit at 2.
        let net = NetworkBuilder::new(3)
            .supplies(&[2, 0, -2])
            .arc(0, 1, 5, 1)
            .arc(1, 0, 5, 1)
            .arc(2, 0, 5, 1)
            .build()
            .unwrap();
        for p in variants() {
            let r = solve_cos(&net, &p, &Deadline::after(Duration::from_secs(5)));
            assert_eq!(r.unwrap_err(), McfError::Infeasible, "{p:?}");
        }
    }

    #[test]
    fn price_refine_on_optimal_flow() {
        let mut st = two_node_state();
        let a = st.store.forward_arc(0);
        st.store.push(a, 1);
        st.excess = vec![0, 0];
        st.eps = 8;
        assert!(st.price_refine());
        assert!(st.is_eps_optimal(8));
    }
}
