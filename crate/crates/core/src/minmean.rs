//! Minimum-mean directed cycles: Karp, Hartmann–Orlin, Howard and a
//! combined strategy (Howard with a round limit, then Hartmann–Orlin).
//!
//! Graphs need not be strongly connected. Each strongly connected component
//! is solved separately and the smallest mean wins; ties go to the component
//! holding the lowest node index. All arithmetic is exact.

use std::cmp::Ordering;
use std::fmt;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use crate::residual::ResidualStore;

/// Exact cycle mean `total_cost / length`.
#[derive(Debug, Clone, Copy)]
pub struct MeanValue {
    pub total_cost: i64,
    pub length: usize,
}

impl MeanValue {
    pub fn new(total_cost: i64, length: usize) -> Self {
        assert!(length > 0, "cycle mean needs a positive length");
        MeanValue { total_cost, length }
    }

    pub fn zero() -> Self {
        MeanValue { total_cost: 0, length: 1 }
    }

    pub fn is_negative(&self) -> bool {
        self.total_cost < 0
    }

    pub fn negated(self) -> Self {
        MeanValue { total_cost: -self.total_cost, length: self.length }
    }

    /// Same value with the fraction reduced.
    pub fn reduced(self) -> Self {
        let g = gcd(self.total_cost.unsigned_abs(), self.length as u64).max(1);
        MeanValue { total_cost: self.total_cost / g as i64, length: self.length / g as usize }
    }

    /// Smallest integer not below the value.
    pub fn ceil(&self) -> i64 {
        let l = self.length as i64;
        self.total_cost.div_euclid(l) + i64::from(self.total_cost.rem_euclid(l) != 0)
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl PartialEq for MeanValue {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for MeanValue {}

impl PartialOrd for MeanValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MeanValue {
    fn cmp(&self, other: &Self) -> Ordering {
        let a = self.total_cost as i128 * other.length as i128;
        let b = other.total_cost as i128 * self.length as i128;
        a.cmp(&b)
    }
}

impl fmt::Display for MeanValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.total_cost, self.length)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Karp,
    HartmannOrlin,
    /// Policy iteration stopped after `limit` improvement rounds. When the
    /// limit is hit the best policy cycle seen so far is returned.
    Howard { limit: usize },
    /// Howard limited to `n` rounds, then Hartmann–Orlin if that was not enough.
    Combined,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeanCycle {
    /// Arc indices into the input list, in traversal order.
    pub arcs: Vec<usize>,
    pub mean: MeanValue,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MinMeanStats {
    pub relaxations: u64,
    pub howard_rounds: u64,
    /// Howard hit its round limit somewhere.
    pub limit_hit: bool,
    /// Hartmann–Orlin stopped before the full Karp table.
    pub early_exits: u64,
}

/// Minimum-mean cycle of the digraph on nodes `0..n` with arcs
/// `(tail, head, cost)`, or `None` if it is acyclic.
pub fn min_mean_cycle(n: usize, arcs: &[(usize, usize, i64)], method: Method) -> Option<MeanCycle> {
    min_mean_cycle_with_stats(n, arcs, method).0
}

pub fn min_mean_cycle_with_stats(
    n: usize,
    arcs: &[(usize, usize, i64)],
    method: Method,
) -> (Option<MeanCycle>, MinMeanStats) {
    let mut stats = MinMeanStats::default();
    let mut best: Option<MeanCycle> = None;
    for comp in components(n, arcs) {
        let found = match method {
            Method::Karp => karp(&comp, false, &mut stats),
            Method::HartmannOrlin => karp(&comp, true, &mut stats),
            Method::Howard { limit } => howard(&comp, limit, &mut stats).0,
            Method::Combined => {
                let (c, converged) = howard(&comp, comp.n, &mut stats);
                if converged {
                    c
                } else {
                    karp(&comp, true, &mut stats)
                }
            }
        };
        if let Some(local) = found {
            let arcs: Vec<usize> = local.iter().map(|&a| comp.orig[a]).collect();
            let total: i64 = local.iter().map(|&a| comp.cost[a]).sum();
            let mean = MeanValue::new(total, arcs.len());
            if best.as_ref().is_none_or(|b| mean < b.mean) {
                best = Some(MeanCycle { arcs, mean });
            }
        }
    }
    (best, stats)
}

/// Minimum-mean cycle over the positive-residual arcs of `store`, using the
/// store's costs. Returned arcs are residual arc ids.
pub fn residual_min_mean(store: &ResidualStore, method: Method) -> (Option<MeanCycle>, MinMeanStats) {
    let ids: Vec<usize> = (0..store.arc_count()).filter(|&a| store.residual(a) > 0).collect();
    let arcs: Vec<(usize, usize, i64)> = ids.iter().map(|&a| (store.tail(a), store.head(a), store.cost(a))).collect();
    let (found, stats) = min_mean_cycle_with_stats(store.node_count(), &arcs, method);
    let found = found.map(|c| MeanCycle { arcs: c.arcs.iter().map(|&i| ids[i]).collect(), mean: c.mean });
    (found, stats)
}

/// One strongly connected component with local node ids and out/in CSR.
struct Component {
    n: usize,
    tail: Vec<usize>,
    head: Vec<usize>,
    cost: Vec<i64>,
    orig: Vec<usize>,
    out_first: Vec<usize>,
    out_arcs: Vec<usize>,
    in_first: Vec<usize>,
    in_arcs: Vec<usize>,
}

impl Component {
    fn out(&self, v: usize) -> &[usize] {
        &self.out_arcs[self.out_first[v]..self.out_first[v + 1]]
    }

    fn inc(&self, v: usize) -> &[usize] {
        &self.in_arcs[self.in_first[v]..self.in_first[v + 1]]
    }
}

fn csr(n: usize, key: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let mut first = vec![0usize; n + 1];
    for &k in key {
        first[k + 1] += 1;
    }
    for v in 0..n {
        first[v + 1] += first[v];
    }
    let mut next = first.clone();
    let mut list = vec![0; key.len()];
    for (a, &k) in key.iter().enumerate() {
        list[next[k]] = a;
        next[k] += 1;
    }
    (first, list)
}

/// Components that contain at least one cycle, ordered by their lowest node.
fn components(n: usize, arcs: &[(usize, usize, i64)]) -> Vec<Component> {
    let mut g: DiGraph<(), ()> = DiGraph::with_capacity(n, arcs.len());
    for _ in 0..n {
        g.add_node(());
    }
    for &(s, t, _) in arcs {
        g.add_edge(NodeIndex::new(s), NodeIndex::new(t), ());
    }
    let mut sccs: Vec<Vec<usize>> = tarjan_scc(&g)
        .into_iter()
        .map(|c| {
            let mut c: Vec<usize> = c.into_iter().map(|v| v.index()).collect();
            c.sort_unstable();
            c
        })
        .collect();
    sccs.sort_unstable_by_key(|c| c[0]);

    let mut comp_of = vec![usize::MAX; n];
    let mut local = vec![0usize; n];
    for (ci, c) in sccs.iter().enumerate() {
        for (i, &v) in c.iter().enumerate() {
            comp_of[v] = ci;
            local[v] = i;
        }
    }
    let mut parts: Vec<Component> = sccs
        .iter()
        .map(|c| Component {
            n: c.len(),
            tail: Vec::new(),
            head: Vec::new(),
            cost: Vec::new(),
            orig: Vec::new(),
            out_first: Vec::new(),
            out_arcs: Vec::new(),
            in_first: Vec::new(),
            in_arcs: Vec::new(),
        })
        .collect();
    for (a, &(s, t, c)) in arcs.iter().enumerate() {
        if comp_of[s] == comp_of[t] {
            let p = &mut parts[comp_of[s]];
            p.tail.push(local[s]);
            p.head.push(local[t]);
            p.cost.push(c);
            p.orig.push(a);
        }
    }
    parts.retain(|p| !p.tail.is_empty());
    for p in &mut parts {
        (p.out_first, p.out_arcs) = csr(p.n, &p.tail);
        (p.in_first, p.in_arcs) = csr(p.n, &p.head);
    }
    parts
}

const INF: i64 = i64::MAX;
const NONE: u32 = u32::MAX;

/// Karp's table of shortest `j`-arc walks from node 0. With `early` set,
/// Hartmann–Orlin checkpoints may stop before the table is complete.
fn karp(comp: &Component, early: bool, stats: &mut MinMeanStats) -> Option<Vec<usize>> {
    let k = comp.n;
    let m = comp.tail.len();
    let mut d = vec![INF; (k + 1) * k];
    let mut p = vec![NONE; (k + 1) * k];
    d[0] = 0;
    let mut next_check = 2usize;
    for j in 1..=k {
        let (prev, cur) = d.split_at_mut(j * k);
        let prev = &prev[(j - 1) * k..];
        let cur = &mut cur[..k];
        let pcur = &mut p[j * k..(j + 1) * k];
        for a in 0..m {
            let du = prev[comp.tail[a]];
            if du == INF {
                continue;
            }
            let v = comp.head[a];
            let val = du + comp.cost[a];
            if val < cur[v] {
                cur[v] = val;
                pcur[v] = a as u32;
            }
        }
        stats.relaxations += m as u64;
        if early && j < k && j == next_check {
            next_check *= 2;
            if let Some(c) = early_exit(comp, &d, &p, j) {
                stats.early_exits += 1;
                return Some(c);
            }
        }
    }

    // min over v of max over j of (D_k(v) - D_j(v)) / (k - j)
    let mut best: Option<MeanValue> = None;
    for v in 0..k {
        let dk = d[k * k + v];
        if dk == INF {
            continue;
        }
        let mut worst: Option<MeanValue> = None;
        for j in 0..k {
            let dj = d[j * k + v];
            if dj == INF {
                continue;
            }
            let val = MeanValue::new(dk - dj, k - j);
            if worst.is_none_or(|w| val > w) {
                worst = Some(val);
            }
        }
        if let Some(w) = worst {
            if best.is_none_or(|b| w < b) {
                best = Some(w);
            }
        }
    }
    let lambda = best?;
    let pot = walk_potentials(comp, &d, k, lambda)?;
    tight_cycle(comp, &pot, lambda)
}

/// `min_j D_j(v)·len - j·total` over the first `upto` levels: shortest
/// walk lengths under costs shifted by the mean.
fn walk_potentials(comp: &Component, d: &[i64], upto: usize, lambda: MeanValue) -> Option<Vec<i128>> {
    let k = comp.n;
    let (num, den) = (lambda.total_cost as i128, lambda.length as i128);
    let mut pot = vec![i128::MAX; k];
    for j in 0..=upto {
        for v in 0..k {
            let dj = d[j * k + v];
            if dj != INF {
                let val = dj as i128 * den - j as i128 * num;
                if val < pot[v] {
                    pot[v] = val;
                }
            }
        }
    }
    pot.iter().all(|&x| x != i128::MAX).then_some(pot)
}

fn is_feasible_potential(comp: &Component, pot: &[i128], lambda: MeanValue) -> bool {
    let (num, den) = (lambda.total_cost as i128, lambda.length as i128);
    (0..comp.tail.len()).all(|a| pot[comp.tail[a]] + comp.cost[a] as i128 * den - num >= pot[comp.head[a]])
}

/// Hartmann–Orlin test at level `j`: take the best cycle on the current
/// predecessor walks and check whether the partial table already certifies
/// that no cycle has a smaller mean.
fn early_exit(comp: &Component, d: &[i64], p: &[u32], j: usize) -> Option<Vec<usize>> {
    let k = comp.n;
    let mut seen = vec![usize::MAX; k];
    let mut best: Option<(MeanValue, Vec<usize>)> = None;
    for v in 0..k {
        if d[j * k + v] == INF {
            continue;
        }
        // seen[x] holds the level at which x was visited on this walk.
        let mut visited = Vec::new();
        let mut x = v;
        let mut level = j;
        loop {
            if seen[x] != usize::MAX {
                let top = seen[x];
                let mut arcs = Vec::with_capacity(top - level);
                let mut y = x;
                for l in (level + 1..=top).rev() {
                    let a = p[l * k + y] as usize;
                    arcs.push(a);
                    y = comp.tail[a];
                }
                arcs.reverse();
                let total: i64 = arcs.iter().map(|&a| comp.cost[a]).sum();
                let mean = MeanValue::new(total, arcs.len());
                if best.as_ref().is_none_or(|(b, _)| mean < *b) {
                    best = Some((mean, arcs));
                }
                break;
            }
            seen[x] = level;
            visited.push(x);
            if level == 0 {
                break;
            }
            let a = p[level * k + x];
            x = comp.tail[a as usize];
            level -= 1;
        }
        for x in visited {
            seen[x] = usize::MAX;
        }
    }
    let (lambda, cycle) = best?;
    let pot = walk_potentials(comp, d, j, lambda)?;
    is_feasible_potential(comp, &pot, lambda).then_some(cycle)
}

/// A cycle made of arcs that are tight under `pot` for costs shifted by
/// `lambda`. Such a cycle has mean exactly `lambda`.
fn tight_cycle(comp: &Component, pot: &[i128], lambda: MeanValue) -> Option<Vec<usize>> {
    let (num, den) = (lambda.total_cost as i128, lambda.length as i128);
    let tight = |a: usize| pot[comp.tail[a]] + comp.cost[a] as i128 * den - num == pot[comp.head[a]];
    let k = comp.n;
    let mut color = vec![0u8; k];
    let mut pos = vec![0usize; k];
    let mut stack: Vec<usize> = Vec::new();
    let mut via: Vec<usize> = Vec::new();
    for root in 0..k {
        if color[root] != 0 {
            continue;
        }
        color[root] = 1;
        stack.push(root);
        while let Some(&u) = stack.last() {
            let out = comp.out(u);
            if pos[u] < out.len() {
                let a = out[pos[u]];
                pos[u] += 1;
                if !tight(a) {
                    continue;
                }
                let v = comp.head[a];
                match color[v] {
                    0 => {
                        color[v] = 1;
                        stack.push(v);
                        via.push(a);
                    }
                    1 => {
                        let start = stack.iter().position(|&x| x == v).unwrap();
                        let mut cycle: Vec<usize> = via[start..].to_vec();
                        cycle.push(a);
                        return Some(cycle);
                    }
                    _ => {}
                }
            } else {
                color[u] = 2;
                stack.pop();
                via.pop();
            }
        }
    }
    None
}

/// Howard's policy iteration. Returns the cycle of the final policy and
/// whether the iteration converged within `limit` rounds.
fn howard(comp: &Component, limit: usize, stats: &mut MinMeanStats) -> (Option<Vec<usize>>, bool) {
    let k = comp.n;
    // Start from the cheapest out-arc of every node.
    let mut policy: Vec<usize> = (0..k)
        .map(|v| {
            let out = comp.out(v);
            *out.iter().min_by_key(|&&a| (comp.cost[a], a)).expect("node without out-arc in a component")
        })
        .collect();
    let mut level = vec![usize::MAX; k];
    let mut dist = vec![0i128; k];
    let mut reached = vec![false; k];
    let mut queue = vec![0usize; k];
    let mut rounds = 0usize;
    loop {
        // Best cycle of the current policy graph.
        level.fill(usize::MAX);
        let mut cur: Option<(i64, usize, usize)> = None;
        for (i, start) in (0..k).enumerate() {
            let mut u = start;
            if level[u] != usize::MAX {
                continue;
            }
            while level[u] == usize::MAX {
                level[u] = i;
                u = comp.head[policy[u]];
            }
            if level[u] == i {
                let (mut total, mut size) = (0i64, 0usize);
                let mut v = u;
                loop {
                    total += comp.cost[policy[v]];
                    size += 1;
                    v = comp.head[policy[v]];
                    if v == u {
                        break;
                    }
                }
                let better = match cur {
                    None => true,
                    Some((ct, cs, _)) => (total as i128) * (cs as i128) < (ct as i128) * (size as i128),
                };
                if better {
                    cur = Some((total, size, u));
                }
            }
        }
        let (cur_total, cur_size, cur_node) = cur.expect("policy graph without a cycle");
        let shift = |a: usize| comp.cost[a] as i128 * cur_size as i128 - cur_total as i128;

        if rounds >= limit {
            stats.limit_hit = true;
            return (Some(policy_cycle(comp, &policy, cur_node)), false);
        }
        rounds += 1;
        stats.howard_rounds += 1;

        // Distances toward the best cycle: first along the policy, then
        // attach every other node by a reverse search.
        reached.fill(false);
        reached[cur_node] = true;
        dist[cur_node] = 0;
        queue[0] = cur_node;
        let (mut front, mut back) = (0usize, 1usize);
        while front < back {
            let v = queue[front];
            front += 1;
            for &a in comp.inc(v) {
                let u = comp.tail[a];
                if policy[u] == a && !reached[u] {
                    reached[u] = true;
                    dist[u] = dist[v] + shift(a);
                    queue[back] = u;
                    back += 1;
                }
            }
        }
        front = 0;
        while back < k {
            let v = queue[front];
            front += 1;
            for &a in comp.inc(v) {
                let u = comp.tail[a];
                if !reached[u] {
                    reached[u] = true;
                    policy[u] = a;
                    dist[u] = dist[v] + shift(a);
                    queue[back] = u;
                    back += 1;
                }
            }
        }

        let mut improved = false;
        for u in 0..k {
            for &a in comp.out(u) {
                stats.relaxations += 1;
                let val = dist[comp.head[a]] + shift(a);
                if val < dist[u] {
                    dist[u] = val;
                    policy[u] = a;
                    improved = true;
                }
            }
        }
        if !improved {
            return (Some(policy_cycle(comp, &policy, cur_node)), true);
        }
    }
}

fn policy_cycle(comp: &Component, policy: &[usize], start: usize) -> Vec<usize> {
    let mut cycle = Vec::new();
    let mut v = start;
    loop {
        cycle.push(policy[v]);
        v = comp.head[policy[v]];
        if v == start {
            break;
        }
    }
    cycle
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const METHODS: [Method; 4] = [Method::Karp, Method::HartmannOrlin, Method::Howard { limit: usize::MAX }, Method::Combined];

    fn cycle_mean(arcs: &[(usize, usize, i64)], c: &MeanCycle) -> MeanValue {
        for w in 0..c.arcs.len() {
            let a = arcs[c.arcs[w]];
            let b = arcs[c.arcs[(w + 1) % c.arcs.len()]];
            assert_eq!(a.1, b.0, "returned arcs do not form a cycle");
        }
        MeanValue::new(c.arcs.iter().map(|&a| arcs[a].2).sum(), c.arcs.len())
    }

    #[test]
    fn triangle() {
        let arcs = [(0, 1, -1), (1, 2, 2), (2, 0, -4)];
        for m in METHODS {
            let c = min_mean_cycle(3, &arcs, m).unwrap();
            assert_eq!(c.mean, MeanValue::new(-1, 1));
            assert_eq!(cycle_mean(&arcs, &c), c.mean);
        }
    }

    #[test]
    fn two_disjoint_two_cycles() {
        let arcs = [(0, 1, 2), (1, 0, 3), (2, 3, 1), (3, 2, 2)];
        for m in METHODS {
            let c = min_mean_cycle(4, &arcs, m).unwrap();
            assert_eq!(c.mean, MeanValue::new(3, 2));
        }
    }

    #[test]
    fn dag_has_none() {
        let arcs = [(0, 1, 1), (1, 2, -5), (0, 2, 3)];
        for m in METHODS {
            assert!(min_mean_cycle(3, &arcs, m).is_none());
        }
    }

    #[test]
    fn mean_ordering_is_exact() {
        assert_eq!(MeanValue::new(1, 2), MeanValue::new(2, 4));
        assert!(MeanValue::new(-1, 3) < MeanValue::new(-1, 4));
        assert_eq!(MeanValue::new(7, 2).ceil(), 4);
        assert_eq!(MeanValue::new(-7, 2).ceil(), -3);
        assert_eq!(MeanValue::new(-6, 2).ceil(), -3);
    }

    fn digraph() -> impl Strategy<Value = (usize, Vec<(usize, usize, i64)>)> {
        (1usize..14).prop_flat_map(|n| {
            let arcs = proptest::collection::vec((0..n, 0..n, -20i64..20), 0..40)
                .prop_map(|v| v.into_iter().filter(|(s, t, _)| s != t).collect::<Vec<_>>());
            (Just(n), arcs)
        })
    }

    proptest! {
        #[test]
        fn methods_agree((n, arcs) in digraph()) {
            let karp = min_mean_cycle(n, &arcs, Method::Karp);
            for m in METHODS {
                let (c, stats) = min_mean_cycle_with_stats(n, &arcs, m);
                prop_assert_eq!(c.as_ref().map(|c| c.mean), karp.as_ref().map(|c| c.mean));
                if let Some(c) = &c {
                    prop_assert_eq!(cycle_mean(&arcs, c), c.mean);
                }
                if matches!(m, Method::Karp | Method::HartmannOrlin) {
                    prop_assert!(stats.relaxations <= (n * arcs.len().max(1)) as u64);
                }
            }
        }
    }
}
