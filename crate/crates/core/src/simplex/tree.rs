//! Spanning tree basis stored with parent, predecessor arc, thread, reverse
//! thread, successor count and last successor per node.
//!
//! Node `n` is an artificial root joined to every node by an artificial arc
//! (indices `m..m+n`). The root potential is fixed at zero; after a pivot only
//! the subtree cut off from the root gets new potentials.

use crate::error::{McfError, Result};
use crate::network::Network;

pub(crate) const NONE: usize = usize::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArcState {
    Tree,
    Lower,
    Upper,
}

impl ArcState {
    /// +1 at the lower bound, -1 at the upper bound, 0 in the tree.
    #[inline]
    pub(crate) fn sign(self) -> i64 {
        match self {
            ArcState::Lower => 1,
            ArcState::Upper => -1,
            ArcState::Tree => 0,
        }
    }
}

/// Predecessor arc points from the node up to its parent.
const UP: i64 = 1;
/// Predecessor arc points from the parent down to the node.
const DOWN: i64 = -1;

#[derive(Debug, Clone)]
pub struct SpanningTree {
    node_count: usize,
    arc_count: usize,
    root: usize,
    source: Vec<usize>,
    target: Vec<usize>,
    cap: Vec<i64>,
    cost: Vec<i64>,
    supply: Vec<i64>,
    pub(crate) flow: Vec<i64>,
    pub(crate) state: Vec<ArcState>,
    pub(crate) pi: Vec<i64>,
    parent: Vec<usize>,
    pred: Vec<usize>,
    pred_dir: Vec<i64>,
    thread: Vec<usize>,
    rev_thread: Vec<usize>,
    succ_num: Vec<usize>,
    last_succ: Vec<usize>,
    dirty_revs: Vec<usize>,
    // Pivot scratch.
    in_arc: usize,
    join: usize,
    u_in: usize,
    v_in: usize,
    u_out: usize,
    delta: i64,
}

/// Outcome of one pivot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PivotResult {
    /// Amount of flow sent around the cycle.
    pub delta: i64,
    /// The tree changed; false when the entering arc just switched bounds.
    pub basis_changed: bool,
}

impl SpanningTree {
    /// Artificial starting basis: node `i` hangs off the root by an arc toward
    /// the root if `b_i >= 0` and away from it otherwise, carrying `|b_i|`.
    pub fn artificial(network: &Network) -> Result<Self> {
        let n = network.node_count();
        let m = network.arc_count();
        let mags = network.magnitudes();
        let big_u = (n as i64)
            .checked_mul(mags.max_capacity.max(1))
            .ok_or(McfError::OverflowRisk("artificial arc capacity"))?;
        let art_cost = (n as i64)
            .checked_mul(mags.max_cost.max(1))
            .ok_or(McfError::OverflowRisk("artificial arc cost"))?;
        // Potentials reach about n * art_cost in magnitude.
        if (n as i128 + 1) * art_cost as i128 * 4 > i64::MAX as i128 {
            return Err(McfError::OverflowRisk("simplex potentials"));
        }
        let all = m + n;
        let root = n;
        let mut t = SpanningTree {
            node_count: n,
            arc_count: m,
            root,
            source: Vec::with_capacity(all),
            target: Vec::with_capacity(all),
            cap: Vec::with_capacity(all),
            cost: Vec::with_capacity(all),
            supply: network.supplies().to_vec(),
            flow: vec![0; all],
            state: vec![ArcState::Lower; all],
            pi: vec![0; n + 1],
            parent: vec![NONE; n + 1],
            pred: vec![NONE; n + 1],
            pred_dir: vec![0; n + 1],
            thread: vec![0; n + 1],
            rev_thread: vec![0; n + 1],
            succ_num: vec![1; n + 1],
            last_succ: vec![0; n + 1],
            dirty_revs: Vec::new(),
            in_arc: NONE,
            join: NONE,
            u_in: NONE,
            v_in: NONE,
            u_out: NONE,
            delta: 0,
        };
        t.source.extend_from_slice(network.tails());
        t.target.extend_from_slice(network.heads());
        t.cap.extend_from_slice(network.capacities());
        t.cost.extend_from_slice(network.costs());

        t.thread[root] = 0;
        t.rev_thread[0] = root;
        t.succ_num[root] = n + 1;
        t.last_succ[root] = root - 1;
        for u in 0..n {
            let e = m + u;
            t.parent[u] = root;
            t.pred[u] = e;
            t.thread[u] = u + 1;
            t.rev_thread[u + 1] = u;
            t.last_succ[u] = u;
            t.state[e] = ArcState::Tree;
            t.cap.push(big_u);
            t.cost.push(art_cost);
            let b = network.supply(u);
            if b >= 0 {
                t.pred_dir[u] = UP;
                t.source.push(u);
                t.target.push(root);
                t.flow[e] = b;
                t.pi[u] = -art_cost;
            } else {
                t.pred_dir[u] = DOWN;
                t.source.push(root);
                t.target.push(u);
                t.flow[e] = -b;
                t.pi[u] = art_cost;
            }
        }
        Ok(t)
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    /// Number of original arcs; artificial arcs follow them.
    pub fn arc_count(&self) -> usize {
        self.arc_count
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn state(&self, arc: usize) -> ArcState {
        self.state[arc]
    }

    pub fn flow(&self, arc: usize) -> i64 {
        self.flow[arc]
    }

    pub fn potentials(&self) -> &[i64] {
        &self.pi
    }

    pub fn parent(&self, node: usize) -> Option<usize> {
        (self.parent[node] != NONE).then_some(self.parent[node])
    }

    /// Arc joining `node` to its parent.
    pub fn pred_arc(&self, node: usize) -> Option<usize> {
        (self.pred[node] != NONE).then_some(self.pred[node])
    }

    /// `(tail, head)` of any arc, artificial ones included.
    pub fn ends(&self, arc: usize) -> (usize, usize) {
        (self.source[arc], self.target[arc])
    }

    pub fn capacity(&self, arc: usize) -> i64 {
        self.cap[arc]
    }

    pub fn cost(&self, arc: usize) -> i64 {
        self.cost[arc]
    }

    pub fn thread(&self, node: usize) -> usize {
        self.thread[node]
    }

    pub fn rev_thread(&self, node: usize) -> usize {
        self.rev_thread[node]
    }

    pub fn succ_num(&self, node: usize) -> usize {
        self.succ_num[node]
    }

    pub fn last_succ(&self, node: usize) -> usize {
        self.last_succ[node]
    }

    #[inline]
    pub fn reduced_cost(&self, arc: usize) -> i64 {
        self.cost[arc] + self.pi[self.source[arc]] - self.pi[self.target[arc]]
    }

    /// Positive amount by which the arc violates optimality, or 0.
    #[inline]
    pub fn violation(&self, arc: usize) -> i64 {
        (-(self.state[arc].sign() * self.reduced_cost(arc))).max(0)
    }

    /// Cost of the current flow including artificial arcs.
    pub fn total_cost(&self) -> i128 {
        self.flow.iter().zip(&self.cost).map(|(&x, &c)| x as i128 * c as i128).sum()
    }

    pub fn original_flow(&self) -> Vec<i64> {
        self.flow[..self.arc_count].to_vec()
    }

    pub fn artificial_flow_positive(&self) -> bool {
        self.flow[self.arc_count..].iter().any(|&x| x != 0)
    }

    /// Pivots `arc` into the basis. The arc must be eligible.
    pub fn pivot(&mut self, arc: usize) -> Result<PivotResult> {
        self.in_arc = arc;
        self.find_join_node();
        let change = self.find_leaving_arc();
        if self.delta == i64::MAX {
            return Err(McfError::UnboundedCycle);
        }
        self.change_flow(change);
        if change {
            self.update_tree_structure();
            self.update_potential();
        }
        Ok(PivotResult { delta: self.delta, basis_changed: change })
    }

    fn find_join_node(&mut self) {
        let mut u = self.source[self.in_arc];
        let mut v = self.target[self.in_arc];
        while u != v {
            if self.succ_num[u] < self.succ_num[v] {
                u = self.parent[u];
            } else {
                v = self.parent[v];
            }
        }
        self.join = u;
    }

    /// Cunningham's rule: walking the cycle in flow direction from the join
    /// node, the last arc with the smallest residual leaves. This keeps the
    /// tree strongly feasible.
    fn find_leaving_arc(&mut self) -> bool {
        let (first, second) = if self.state[self.in_arc] == ArcState::Lower {
            (self.source[self.in_arc], self.target[self.in_arc])
        } else {
            (self.target[self.in_arc], self.source[self.in_arc])
        };
        self.delta = self.cap[self.in_arc];
        let mut result = 0;
        let mut u = first;
        while u != self.join {
            let e = self.pred[u];
            let d = if self.pred_dir[u] == DOWN { self.cap[e] - self.flow[e] } else { self.flow[e] };
            if d < self.delta {
                self.delta = d;
                self.u_out = u;
                result = 1;
            }
            u = self.parent[u];
        }
        u = second;
        while u != self.join {
            let e = self.pred[u];
            let d = if self.pred_dir[u] == UP { self.cap[e] - self.flow[e] } else { self.flow[e] };
            if d <= self.delta {
                self.delta = d;
                self.u_out = u;
                result = 2;
            }
            u = self.parent[u];
        }
        if result == 1 {
            self.u_in = first;
            self.v_in = second;
        } else {
            self.u_in = second;
            self.v_in = first;
        }
        result != 0
    }

    fn change_flow(&mut self, change: bool) {
        if self.delta > 0 {
            let val = self.state[self.in_arc].sign() * self.delta;
            self.flow[self.in_arc] += val;
            let mut u = self.source[self.in_arc];
            while u != self.join {
                self.flow[self.pred[u]] -= self.pred_dir[u] * val;
                u = self.parent[u];
            }
            u = self.target[self.in_arc];
            while u != self.join {
                self.flow[self.pred[u]] += self.pred_dir[u] * val;
                u = self.parent[u];
            }
        }
        if change {
            self.state[self.in_arc] = ArcState::Tree;
            let out = self.pred[self.u_out];
            self.state[out] = if self.flow[out] == 0 { ArcState::Lower } else { ArcState::Upper };
        } else {
            self.state[self.in_arc] = match self.state[self.in_arc] {
                ArcState::Lower => ArcState::Upper,
                ArcState::Upper => ArcState::Lower,
                ArcState::Tree => ArcState::Tree,
            };
        }
    }

    /// Re-hangs the subtree of `u_out` below `v_in` through the entering arc,
    /// reversing the stem from `u_in` to `u_out`, and splices the thread.
    fn update_tree_structure(&mut self) {
        let (u_in, v_in, u_out, join) = (self.u_in, self.v_in, self.u_out, self.join);
        let old_rev_thread = self.rev_thread[u_out];
        let old_succ_num = self.succ_num[u_out];
        let old_last_succ = self.last_succ[u_out];
        let v_out = self.parent[u_out];

        if u_in == u_out {
            self.parent[u_in] = v_in;
            self.pred[u_in] = self.in_arc;
            self.pred_dir[u_in] = if u_in == self.source[self.in_arc] { UP } else { DOWN };
            if self.thread[v_in] != u_out {
                let mut after = self.thread[old_last_succ];
                self.thread[old_rev_thread] = after;
                self.rev_thread[after] = old_rev_thread;
                after = self.thread[v_in];
                self.thread[v_in] = u_out;
                self.rev_thread[u_out] = v_in;
                self.thread[old_last_succ] = after;
                self.rev_thread[after] = old_last_succ;
            }
        } else {
            let thread_continue =
                if old_rev_thread == v_in { self.thread[old_last_succ] } else { self.thread[v_in] };

            let mut stem = u_in;
            let mut par_stem = v_in;
            let mut last = self.last_succ[u_in];
            let mut after = self.thread[last];
            self.thread[v_in] = u_in;
            self.dirty_revs.clear();
            self.dirty_revs.push(v_in);
            while stem != u_out {
                let next_stem = self.parent[stem];
                self.thread[last] = next_stem;
                self.dirty_revs.push(last);

                let before = self.rev_thread[stem];
                self.thread[before] = after;
                self.rev_thread[after] = before;

                self.parent[stem] = par_stem;
                par_stem = stem;
                stem = next_stem;

                last = if self.last_succ[stem] == self.last_succ[par_stem] {
                    self.rev_thread[par_stem]
                } else {
                    self.last_succ[stem]
                };
                after = self.thread[last];
            }
            self.parent[u_out] = par_stem;
            self.thread[last] = thread_continue;
            self.rev_thread[thread_continue] = last;
            self.last_succ[u_out] = last;

            if old_rev_thread != v_in {
                self.thread[old_rev_thread] = after;
                self.rev_thread[after] = old_rev_thread;
            }

            for i in 0..self.dirty_revs.len() {
                let u = self.dirty_revs[i];
                let t = self.thread[u];
                self.rev_thread[t] = u;
            }

            let mut tmp_sc = 0usize;
            let tmp_ls = self.last_succ[u_out];
            let mut u = u_out;
            while u != u_in {
                let p = self.parent[u];
                self.pred[u] = self.pred[p];
                self.pred_dir[u] = -self.pred_dir[p];
                // succ_num[u] - succ_num[p] is negative along the old stem.
                tmp_sc = (tmp_sc + self.succ_num[u]).wrapping_sub(self.succ_num[p]);
                self.succ_num[u] = tmp_sc;
                self.last_succ[p] = tmp_ls;
                u = p;
            }
            self.pred[u_in] = self.in_arc;
            self.pred_dir[u_in] = if u_in == self.source[self.in_arc] { UP } else { DOWN };
            self.succ_num[u_in] = old_succ_num;
        }

        let up_limit_out = if self.last_succ[join] == v_in { join } else { NONE };
        let last_succ_out = self.last_succ[u_out];
        let mut u = v_in;
        while u != NONE && self.last_succ[u] == v_in {
            self.last_succ[u] = last_succ_out;
            u = self.parent[u];
        }

        if join != old_rev_thread && v_in != old_rev_thread {
            let mut u = v_out;
            while u != up_limit_out && self.last_succ[u] == old_last_succ {
                self.last_succ[u] = old_rev_thread;
                u = self.parent[u];
            }
        } else if last_succ_out != old_last_succ {
            let mut u = v_out;
            while u != up_limit_out && self.last_succ[u] == old_last_succ {
                self.last_succ[u] = last_succ_out;
                u = self.parent[u];
            }
        }

        let mut u = v_in;
        while u != join {
            self.succ_num[u] += old_succ_num;
            u = self.parent[u];
        }
        let mut u = v_out;
        while u != join {
            self.succ_num[u] -= old_succ_num;
            u = self.parent[u];
        }
    }

    /// Shifts the potentials of the re-hung subtree so the entering arc has
    /// zero reduced cost.
    fn update_potential(&mut self) {
        let sigma = self.pi[self.v_in] - self.pi[self.u_in] - self.pred_dir[self.u_in] * self.cost[self.in_arc];
        let end = self.thread[self.last_succ[self.u_in]];
        let mut u = self.u_in;
        while u != end {
            self.pi[u] += sigma;
            u = self.thread[u];
        }
    }

    /// Full structural audit; returns the first broken property.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let total = self.node_count + 1;
        let root = self.root;
        // Thread is one cycle through all nodes, inverse to rev_thread.
        let mut seen = vec![false; total];
        let mut order = Vec::with_capacity(total);
        let mut u = root;
        for _ in 0..total {
            if seen[u] {
                return Err(format!("thread revisits node {u}"));
            }
            seen[u] = true;
            order.push(u);
            if self.rev_thread[self.thread[u]] != u {
                return Err(format!("rev_thread(thread({u})) != {u}"));
            }
            u = self.thread[u];
        }
        if u != root {
            return Err("thread does not return to the root".into());
        }
        // Subtree sizes and last successors from parent pointers.
        let mut size = vec![1usize; total];
        let mut pos = vec![0usize; total];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        for &v in order.iter().rev() {
            if v != root {
                let p = self.parent[v];
                if p == NONE {
                    return Err(format!("node {v} has no parent"));
                }
                if pos[p] >= pos[v] {
                    return Err(format!("thread is not a preorder at node {v}"));
                }
                size[p] += size[v];
            }
        }
        for v in 0..total {
            if self.succ_num[v] != size[v] {
                return Err(format!("succ_num({v}) = {}, subtree has {}", self.succ_num[v], size[v]));
            }
            let last = order[pos[v] + size[v] - 1];
            if self.last_succ[v] != last {
                return Err(format!("last_succ({v}) = {}, expected {last}", self.last_succ[v]));
            }
        }
        // Arc states, bounds and zero reduced cost on tree arcs.
        let mut tree_arcs = 0;
        for e in 0..self.flow.len() {
            let (x, u) = (self.flow[e], self.cap[e]);
            if x < 0 || x > u {
                return Err(format!("arc {e} flow {x} outside [0, {u}]"));
            }
            match self.state[e] {
                ArcState::Tree => {
                    tree_arcs += 1;
                    if self.reduced_cost(e) != 0 {
                        return Err(format!("tree arc {e} has reduced cost {}", self.reduced_cost(e)));
                    }
                }
                ArcState::Lower if x != 0 => return Err(format!("arc {e} at lower bound carries {x}")),
                ArcState::Upper if x != u => return Err(format!("arc {e} at upper bound carries {x} of {u}")),
                _ => {}
            }
        }
        if tree_arcs != self.node_count {
            return Err(format!("{tree_arcs} tree arcs for {} non-root nodes", self.node_count));
        }
        for v in 0..total {
            if v == root {
                continue;
            }
            let e = self.pred[v];
            if self.state[e] != ArcState::Tree {
                return Err(format!("pred arc {e} of node {v} is not in the tree"));
            }
            let p = self.parent[v];
            let ok = match self.pred_dir[v] {
                UP => self.source[e] == v && self.target[e] == p,
                DOWN => self.source[e] == p && self.target[e] == v,
                _ => false,
            };
            if !ok {
                return Err(format!("pred arc {e} does not join {v} and its parent {p}"));
            }
        }
        if self.pi[root] != 0 {
            return Err("root potential moved".into());
        }
        // Conservation including artificial arcs.
        let mut excess = self.supply.clone();
        excess.push(0);
        for e in 0..self.flow.len() {
            excess[self.source[e]] -= self.flow[e];
            excess[self.target[e]] += self.flow[e];
        }
        if let Some(v) = excess.iter().position(|&x| x != 0) {
            return Err(format!("conservation broken at node {v}"));
        }
        // Strong feasibility: every node can push a unit toward the root.
        for v in 0..total {
            let mut u = v;
            while u != root {
                let e = self.pred[u];
                let room = if self.pred_dir[u] == UP { self.cap[e] - self.flow[e] } else { self.flow[e] };
                if room <= 0 {
                    return Err(format!("node {v} cannot send flow to the root through arc {e}"));
                }
                u = self.parent[u];
            }
        }
        Ok(())
    }
}
