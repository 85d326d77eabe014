//! Instance builders and brute-force oracles shared by the integration tests.
//! Nothing here calls into the solvers.
#![allow(dead_code, clippy::needless_range_loop)]

use mcf_core::Network;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub nodes: (usize, usize),
    pub arcs: (usize, usize),
    pub cap: i64,
    pub cost: (i64, i64),
}

/// Random arcs without self-loops, weakly connected: the first `n - 1` join
/// each node to an earlier one in a random direction. At least `n - 1` arcs.
pub fn random_arcs(rng: &mut ChaCha8Rng, n: usize, m: usize, cap: i64, cost: (i64, i64)) -> (Vec<(usize, usize)>, Vec<i64>, Vec<i64>) {
    let m = m.max(n - 1);
    let mut ends = Vec::with_capacity(m);
    let mut caps = Vec::with_capacity(m);
    let mut costs = Vec::with_capacity(m);
    for k in 0..m {
        let (t, h) = if k + 1 < n {
            let (v, w) = (k + 1, rng.random_range(0..=k));
            if rng.random_bool(0.5) { (v, w) } else { (w, v) }
        } else {
            let t = rng.random_range(0..n);
            let mut h = rng.random_range(0..n - 1);
            if h >= t {
                h += 1;
            }
            (t, h)
        };
        ends.push((t, h));
        caps.push(rng.random_range(0..=cap));
        costs.push(rng.random_range(cost.0..=cost.1));
    }
    (ends, caps, costs)
}

/// A feasible instance: supplies are the imbalances of a random flow.
/// Returns the network and that flow.
pub fn feasible_instance(rng: &mut ChaCha8Rng, shape: Shape) -> (Network, Vec<i64>) {
    let n = rng.random_range(shape.nodes.0..=shape.nodes.1);
    let m = rng.random_range(shape.arcs.0..=shape.arcs.1);
    let (ends, caps, costs) = random_arcs(rng, n, m, shape.cap, shape.cost);
    let flow: Vec<i64> = caps.iter().map(|&u| rng.random_range(0..=u)).collect();
    let mut b = vec![0i64; n];
    for (a, &(t, h)) in ends.iter().enumerate() {
        b[t] += flow[a];
        b[h] -= flow[a];
    }
    (Network::new(n, &ends, &caps, &costs, &b).unwrap(), flow)
}

/// Infeasible by construction: nodes split into a source side holding all
/// supply and a sink side holding all demand, and the arcs from the source
/// side to the sink side carry less than the total supply.
pub fn infeasible_instance(rng: &mut ChaCha8Rng) -> Network {
    let n = rng.random_range(4..=16usize);
    let split = rng.random_range(2..=n - 2);
    let supply = rng.random_range(5..=20i64);
    let mut ends = Vec::new();
    let mut caps = Vec::new();
    let mut costs = Vec::new();
    let push = |ends: &mut Vec<_>, caps: &mut Vec<_>, costs: &mut Vec<_>, t: usize, h: usize, u: i64, c: i64| {
        ends.push((t, h));
        caps.push(u);
        costs.push(c);
    };
    for v in (1..split).chain(split + 1..n) {
        push(&mut ends, &mut caps, &mut costs, v - 1, v, 100, rng.random_range(0..=10));
    }
    // Dense arcs inside each side and back from the sink side.
    for _ in 0..3 * n {
        let (t, h) = if rng.random_bool(0.5) {
            (rng.random_range(0..split), rng.random_range(0..split))
        } else {
            (rng.random_range(split..n), rng.random_range(split..n))
        };
        if t != h {
            push(&mut ends, &mut caps, &mut costs, t, h, 100, rng.random_range(0..=10));
        }
        let back = (rng.random_range(split..n), rng.random_range(0..split));
        push(&mut ends, &mut caps, &mut costs, back.0, back.1, 100, rng.random_range(0..=10));
    }
    // Crossing arcs with total capacity below the supply.
    let mut left = supply - 1;
    while left > 0 {
        let u = rng.random_range(1..=left);
        left -= u;
        let t = rng.random_range(0..split);
        let h = rng.random_range(split..n);
        push(&mut ends, &mut caps, &mut costs, t, h, u, rng.random_range(0..=10));
    }
    let mut b = vec![0i64; n];
    for _ in 0..supply {
        b[rng.random_range(0..split)] += 1;
        b[rng.random_range(split..n)] -= 1;
    }
    Network::new(n, &ends, &caps, &costs, &b).unwrap()
}

/// Optimal objective by trying every integer flow, or `None` if there is no
/// feasible flow. Nodes are checked as soon as their last arc is fixed.
pub fn exhaustive_optimum(net: &Network) -> Option<i64> {
    let n = net.node_count();
    let m = net.arc_count();
    let mut last = vec![None; n];
    for a in 0..m {
        last[net.tail(a)] = Some(a);
        last[net.head(a)] = Some(a);
    }
    if (0..n).any(|v| last[v].is_none() && net.supply(v) != 0) {
        return None;
    }
    let mut closes: Vec<Vec<usize>> = vec![Vec::new(); m];
    for v in 0..n {
        if let Some(a) = last[v] {
            closes[a].push(v);
        }
    }
    let mut balance: Vec<i64> = net.supplies().to_vec();
    let mut best = None;
    fn go(net: &Network, a: usize, cost: i64, balance: &mut [i64], closes: &[Vec<usize>], best: &mut Option<i64>) {
        if a == net.arc_count() {
            if best.is_none_or(|b| cost < b) {
                *best = Some(cost);
            }
            return;
        }
        let (t, h) = (net.tail(a), net.head(a));
        for x in 0..=net.capacity(a) {
            balance[t] -= x;
            balance[h] += x;
            if closes[a].iter().all(|&v| balance[v] == 0) {
                go(net, a + 1, cost + x * net.cost(a), balance, closes, best);
            }
            balance[t] += x;
            balance[h] -= x;
        }
    }
    go(net, 0, 0, &mut balance, &closes, &mut best);
    best
}

/// Exact rational `(total, length)` of the minimum-mean simple cycle, found by
/// listing every simple cycle. Only for tiny graphs.
pub fn brute_min_mean(n: usize, arcs: &[(usize, usize, i64)]) -> Option<(i64, usize)> {
    let mut out: Vec<Vec<(usize, i64)>> = vec![Vec::new(); n];
    for &(t, h, c) in arcs {
        out[t].push((h, c));
    }
    let mut best: Option<(i64, usize)> = None;
    fn dfs(
        out: &[Vec<(usize, i64)>],
        start: usize,
        u: usize,
        cost: i64,
        len: usize,
        on: &mut [bool],
        best: &mut Option<(i64, usize)>,
    ) {
        for &(v, c) in &out[u] {
            if v == start {
                let cand = (cost + c, len + 1);
                if best.is_none_or(|b| less(cand, b)) {
                    *best = Some(cand);
                }
            } else if v > start && !on[v] {
                on[v] = true;
                dfs(out, start, v, cost + c, len + 1, on, best);
                on[v] = false;
            }
        }
    }
    let mut on = vec![false; n];
    for s in 0..n {
        on[s] = true;
        dfs(&out, s, s, 0, 0, &mut on, &mut best);
        on[s] = false;
    }
    best
}

/// `a.0 / a.1 < b.0 / b.1` for positive denominators.
pub fn less(a: (i64, usize), b: (i64, usize)) -> bool {
    (a.0 as i128) * (b.1 as i128) < (b.0 as i128) * (a.1 as i128)
}

pub fn same_ratio(a: (i64, usize), b: (i64, usize)) -> bool {
    (a.0 as i128) * (b.1 as i128) == (b.0 as i128) * (a.1 as i128)
}

/// Residual arcs of `flow` as `(tail, head, cost)`, built from the network
/// directly.
pub fn residual_arcs(net: &Network, flow: &[i64]) -> Vec<(usize, usize, i64)> {
    let mut arcs = Vec::new();
    for a in 0..net.arc_count() {
        if flow[a] < net.capacity(a) {
            arcs.push((net.tail(a), net.head(a), net.cost(a)));
        }
        if flow[a] > 0 {
            arcs.push((net.head(a), net.tail(a), -net.cost(a)));
        }
    }
    arcs
}

/// Objective of `flow`, recomputed here.
pub fn cost_of(net: &Network, flow: &[i64]) -> i64 {
    (0..net.arc_count()).map(|a| flow[a] * net.cost(a)).sum()
}

/// Random digraph with integer costs in `cost`, self-loops allowed.
pub fn random_digraph(rng: &mut ChaCha8Rng, n: usize, m: usize, cost: (i64, i64)) -> Vec<(usize, usize, i64)> {
    (0..m)
        .map(|_| (rng.random_range(0..n), rng.random_range(0..n), rng.random_range(cost.0..=cost.1)))
        .collect()
}
