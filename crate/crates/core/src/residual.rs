//! Residual network with paired forward/backward arcs.
//!
//! Every original arc `(i, j)` owns two residual arcs: a forward arc at `i`
//! with capacity `u - x` and cost `c`, and a backward arc at `j` with
//! capacity `x` and cost `-c`. The two are sisters of each other. Arcs are
//! grouped by tail so the outgoing arcs of node `v` are the index range
//! `first[v]..first[v + 1]`. Arcs with zero residual capacity stay in place
//! and are skipped by the algorithms.

use std::ops::Range;

use crate::network::Network;

#[derive(Debug, Clone)]
pub struct ResidualStore {
    first: Vec<usize>,
    tail: Vec<usize>,
    head: Vec<usize>,
    sister: Vec<usize>,
    residual: Vec<i64>,
    cost: Vec<i64>,
    original: Vec<usize>,
    forward: Vec<bool>,
    /// Original arc -> index of its forward residual arc.
    forward_of: Vec<usize>,
}

impl ResidualStore {
    /// Residual network of `flow` (which must satisfy `0 <= x <= u`).
    pub fn new(network: &Network, flow: &[i64]) -> Self {
        debug_assert_eq!(flow.len(), network.arc_count());
        Self::from_parts(
            network.node_count(),
            network.tails(),
            network.heads(),
            network.capacities(),
            network.costs(),
            flow,
        )
    }

    /// Builds a residual store from raw arc arrays without validating them as
    /// a balanced network.
    pub fn from_parts(
        n: usize,
        tails: &[usize],
        heads: &[usize],
        capacities: &[i64],
        costs: &[i64],
        flow: &[i64],
    ) -> Self {
        let m = tails.len();
        let mut first = vec![0usize; n + 1];
        for a in 0..m {
            first[tails[a] + 1] += 1;
            first[heads[a] + 1] += 1;
        }
        for v in 0..n {
            first[v + 1] += first[v];
        }
        let mut next = first.clone();
        let total = 2 * m;
        let mut store = ResidualStore {
            first,
            tail: vec![0; total],
            head: vec![0; total],
            sister: vec![0; total],
            residual: vec![0; total],
            cost: vec![0; total],
            original: vec![0; total],
            forward: vec![false; total],
            forward_of: vec![0; m],
        };
        for a in 0..m {
            let (s, t) = (tails[a], heads[a]);
            let (u, x, c) = (capacities[a], flow[a], costs[a]);
            debug_assert!(0 <= x && x <= u, "flow out of bounds on arc {a}");
            let fwd = next[s];
            next[s] += 1;
            let bwd = next[t];
            next[t] += 1;
            store.set(fwd, s, t, bwd, u - x, c, a, true);
            store.set(bwd, t, s, fwd, x, -c, a, false);
            store.forward_of[a] = fwd;
        }
        store
    }

    #[allow(clippy::too_many_arguments)]
    fn set(&mut self, r: usize, tail: usize, head: usize, sister: usize, cap: i64, cost: i64, orig: usize, fwd: bool) {
        self.tail[r] = tail;
        self.head[r] = head;
        self.sister[r] = sister;
        self.residual[r] = cap;
        self.cost[r] = cost;
        self.original[r] = orig;
        self.forward[r] = fwd;
    }

    pub fn node_count(&self) -> usize {
        self.first.len() - 1
    }

    /// Number of residual arcs (twice the original arc count).
    pub fn arc_count(&self) -> usize {
        self.head.len()
    }

    #[inline]
    pub fn out_arcs(&self, node: usize) -> Range<usize> {
        self.first[node]..self.first[node + 1]
    }

    #[inline]
    pub fn first_out(&self, node: usize) -> usize {
        self.first[node]
    }

    #[inline]
    pub fn tail(&self, arc: usize) -> usize {
        self.tail[arc]
    }

    #[inline]
    pub fn head(&self, arc: usize) -> usize {
        self.head[arc]
    }

    #[inline]
    pub fn sister(&self, arc: usize) -> usize {
        self.sister[arc]
    }

    #[inline]
    pub fn residual(&self, arc: usize) -> i64 {
        self.residual[arc]
    }

    #[inline]
    pub fn cost(&self, arc: usize) -> i64 {
        self.cost[arc]
    }

    pub fn original_arc(&self, arc: usize) -> usize {
        self.original[arc]
    }

    pub fn is_forward(&self, arc: usize) -> bool {
        self.forward[arc]
    }

    pub fn forward_arc(&self, original: usize) -> usize {
        self.forward_of[original]
    }

    /// `cost + pi_tail - pi_head`.
    #[inline]
    pub fn reduced_cost(&self, arc: usize, potentials: &[i64]) -> i64 {
        self.cost[arc] + potentials[self.tail[arc]] - potentials[self.head[arc]]
    }

    /// Sends `amount` along `arc`, moving residual capacity to its sister.
    #[inline]
    pub fn push(&mut self, arc: usize, amount: i64) {
        debug_assert!(amount <= self.residual[arc]);
        self.residual[arc] -= amount;
        self.residual[self.sister[arc]] += amount;
    }

    /// Multiplies every residual cost by `factor`.
    pub fn scale_costs(&mut self, factor: i64) {
        for c in &mut self.cost {
            *c *= factor;
        }
    }

    /// Current flow on an original arc.
    pub fn flow(&self, original: usize) -> i64 {
        self.residual[self.sister[self.forward_of[original]]]
    }

    /// Flow on every original arc.
    pub fn flows(&self) -> Vec<i64> {
        (0..self.forward_of.len()).map(|a| self.flow(a)).collect()
    }

    /// Positive-residual arcs as `(tail, head, cost, residual arc id)`.
    pub fn positive_arcs(&self) -> impl Iterator<Item = (usize, usize, i64, usize)> + '_ {
        (0..self.arc_count())
            .filter(|&a| self.residual[a] > 0)
            .map(|a| (self.tail[a], self.head[a], self.cost[a], a))
    }
}
