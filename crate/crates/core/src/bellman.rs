//! Pass-based Bellman–Ford over positive-residual arcs.
//!
//! Every node starts at distance 0, as if an artificial source had a
//! zero-cost arc to each of them. Only nodes whose label changed in the
//! previous pass are scanned, in index order.

use crate::residual::ResidualStore;

pub(crate) const NO_ARC: usize = usize::MAX;

#[derive(Debug, Clone)]
pub(crate) struct Relaxation {
    pub dist: Vec<i64>,
    pub pred: Vec<usize>,
    active: Vec<bool>,
    next: Vec<bool>,
    first_changed: Option<usize>,
    pub passes: usize,
    pub relaxations: u64,
}

impl Relaxation {
    pub fn new(n: usize) -> Self {
        Relaxation {
            dist: vec![0; n],
            pred: vec![NO_ARC; n],
            active: vec![true; n],
            next: vec![false; n],
            first_changed: None,
            passes: 0,
            relaxations: 0,
        }
    }

    /// Back to the all-zero start; counters keep accumulating.
    pub fn restart(&mut self) {
        self.dist.fill(0);
        self.pred.fill(NO_ARC);
        self.active.fill(true);
        self.first_changed = None;
        self.passes = 0;
    }

    /// One pass. Returns true if some label decreased.
    pub fn pass(&mut self, store: &ResidualStore, len: impl Fn(usize) -> i64) -> bool {
        let n = self.dist.len();
        self.next.fill(false);
        let mut changed = false;
        let mut first = usize::MAX;
        for u in 0..n {
            if !self.active[u] {
                continue;
            }
            let du = self.dist[u];
            for a in store.out_arcs(u) {
                if store.residual(a) <= 0 {
                    continue;
                }
                self.relaxations += 1;
                let v = store.head(a);
                let d = du + len(a);
                if d < self.dist[v] {
                    self.dist[v] = d;
                    self.pred[v] = a;
                    self.next[v] = true;
                    changed = true;
                    first = first.min(v);
                }
            }
        }
        std::mem::swap(&mut self.active, &mut self.next);
        self.passes += 1;
        self.first_changed = changed.then_some(first);
        changed
    }

    /// Lowest-index node whose label changed in the last pass.
    pub fn first_changed(&self) -> Option<usize> {
        self.first_changed
    }

    /// Node-disjoint cycles of the predecessor graph, discovered by walking
    /// from each node in index order. Each cycle is a list of residual arcs in
    /// traversal order. With `all == false` only the first one is returned.
    pub fn pred_cycles(&self, store: &ResidualStore, all: bool) -> Vec<Vec<usize>> {
        let n = self.dist.len();
        let mut stamp = vec![0usize; n];
        let mut cycles = Vec::new();
        for v in 0..n {
            if stamp[v] != 0 {
                continue;
            }
            let mut u = v;
            while stamp[u] == 0 {
                stamp[u] = v + 1;
                if self.pred[u] == NO_ARC {
                    break;
                }
                u = store.tail(self.pred[u]);
            }
            if stamp[u] == v + 1 && self.pred[u] != NO_ARC && self.on_cycle(store, u) {
                cycles.push(self.collect_cycle(store, u));
                if !all {
                    break;
                }
            }
        }
        cycles
    }

    fn on_cycle(&self, store: &ResidualStore, start: usize) -> bool {
        let mut u = start;
        for _ in 0..self.dist.len() {
            if self.pred[u] == NO_ARC {
                return false;
            }
            u = store.tail(self.pred[u]);
            if u == start {
                return true;
            }
        }
        false
    }

    fn collect_cycle(&self, store: &ResidualStore, start: usize) -> Vec<usize> {
        let mut arcs = Vec::new();
        let mut u = start;
        loop {
            let a = self.pred[u];
            arcs.push(a);
            u = store.tail(a);
            if u == start {
                break;
            }
        }
        arcs.reverse();
        arcs
    }

    /// Walks `n` predecessor steps back from `v` and returns the cycle reached,
    /// if the walk does not run off a root.
    pub fn cycle_through(&self, store: &ResidualStore, v: usize) -> Option<Vec<usize>> {
        let mut u = v;
        for _ in 0..self.dist.len() {
            if self.pred[u] == NO_ARC {
                return None;
            }
            u = store.tail(self.pred[u]);
        }
        self.on_cycle(store, u).then(|| self.collect_cycle(store, u))
    }
}

/// Result of a full negative-cycle search.
pub(crate) enum Search {
    Converged,
    Cycle(Vec<usize>),
}

/// Plain Bellman–Ford: up to `n` passes, then a predecessor walk from the
/// first node relaxed in pass `n`.
pub(crate) fn search(store: &ResidualStore, relax: &mut Relaxation, len: impl Fn(usize) -> i64) -> Search {
    let n = store.node_count();
    for _ in 0..n {
        if !relax.pass(store, &len) {
            return Search::Converged;
        }
    }
    match relax.first_changed() {
        None => Search::Converged,
        Some(v) => Search::Cycle(
            relax
                .cycle_through(store, v)
                .expect("label decreased in pass n but no predecessor cycle"),
        ),
    }
}

/// Bellman–Ford that also looks for predecessor cycles at growing pass
/// counts, so long negative searches stop early.
pub(crate) fn search_with_checkpoints(
    store: &ResidualStore,
    relax: &mut Relaxation,
    len: impl Fn(usize) -> i64,
) -> Search {
    let n = store.node_count();
    let mut checkpoints = Checkpoints::new(n);
    loop {
        if !relax.pass(store, &len) {
            return Search::Converged;
        }
        if checkpoints.hit(relax.passes) {
            if let Some(c) = relax.pred_cycles(store, false).pop() {
                return Search::Cycle(c);
            }
        }
        if relax.passes >= n {
            if let Some(v) = relax.first_changed() {
                if let Some(c) = relax.cycle_through(store, v) {
                    return Search::Cycle(c);
                }
            }
        }
    }
}

/// Pause schedule `floor(2 * 1.5^k)` capped at `n`; every pass after `n`.
#[derive(Debug, Clone)]
pub(crate) struct Checkpoints {
    next: f64,
    cap: usize,
}

impl Checkpoints {
    pub fn new(n: usize) -> Self {
        Checkpoints { next: 2.0, cap: n.max(1) }
    }

    pub fn reset(&mut self) {
        self.next = 2.0;
    }

    pub fn hit(&mut self, passes: usize) -> bool {
        if passes >= self.cap {
            return true;
        }
        let target = (self.next.floor() as usize).min(self.cap);
        if passes >= target {
            while (self.next.floor() as usize).min(self.cap) <= passes {
                self.next *= 1.5;
            }
            true
        } else {
            false
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::NetworkBuilder;

    #[test]
    fn checkpoint_schedule() {
        let mut c = Checkpoints::new(20);
        let hits: Vec<usize> = (1..=22).filter(|&p| c.hit(p)).collect();
        assert_eq!(hits, vec![2, 3, 4, 6, 10, 15, 20, 21, 22]);
    }

    #[test]
    fn finds_triangle() {
        let mut b = NetworkBuilder::new(3);
        b.push_arc(0, 1, 1, -1);
        b.push_arc(1, 2, 1, 2);
        b.push_arc(2, 0, 1, -4);
        let net = b.build().unwrap();
        let store = ResidualStore::new(&net, &[0, 0, 0]);
        let mut relax = Relaxation::new(3);
        match search(&store, &mut relax, |a| store.cost(a)) {
            Search::Cycle(c) => {
                let total: i64 = c.iter().map(|&a| store.cost(a)).sum();
                assert_eq!(total, -3);
                assert_eq!(c.len(), 3);
            }
            Search::Converged => panic!("missed the cycle"),
        }
    }
}
