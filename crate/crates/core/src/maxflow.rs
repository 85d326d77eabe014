//! Dinic max-flow on a residual store. Used to find feasible starting flows
//! and to detect infeasible supplies up front.

use std::collections::VecDeque;

use crate::error::{McfError, Result};
use crate::network::Network;
use crate::residual::ResidualStore;
use crate::solver::Deadline;

/// Pushes as much flow as possible from `s` to `t` and returns its value.
pub(crate) fn max_flow(store: &mut ResidualStore, s: usize, t: usize, deadline: &Deadline) -> Result<i64> {
    let n = store.node_count();
    let mut level = vec![u32::MAX; n];
    let mut current = vec![0usize; n];
    let mut queue = VecDeque::new();
    let mut total = 0i64;
    loop {
        deadline.check()?;
        level.fill(u32::MAX);
        level[s] = 0;
        queue.clear();
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            for a in store.out_arcs(u) {
                let v = store.head(a);
                if store.residual(a) > 0 && level[v] == u32::MAX {
                    level[v] = level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        if level[t] == u32::MAX {
            return Ok(total);
        }
        for (v, c) in current.iter_mut().enumerate() {
            *c = store.first_out(v);
        }
        loop {
            let pushed = blocking_path(store, s, t, &level, &mut current);
            if pushed == 0 {
                break;
            }
            total += pushed;
        }
    }
}

/// Finds one augmenting path in the level graph with an explicit stack and
/// pushes its bottleneck. Dead ends advance the current-arc pointer.
fn blocking_path(store: &mut ResidualStore, s: usize, t: usize, level: &[u32], current: &mut [usize]) -> i64 {
    let mut path: Vec<usize> = Vec::new();
    let mut u = s;
    loop {
        if u == t {
            let delta = path.iter().map(|&a| store.residual(a)).min().unwrap_or(0);
            for &a in &path {
                store.push(a, delta);
            }
            return delta;
        }
        let end = store.out_arcs(u).end;
        let mut advanced = false;
        while current[u] < end {
            let a = current[u];
            let v = store.head(a);
            if store.residual(a) > 0 && level[v] == level[u] + 1 {
                path.push(a);
                u = v;
                advanced = true;
                break;
            }
            current[u] += 1;
        }
        if !advanced {
            match path.pop() {
                None => return 0,
                Some(a) => {
                    u = store.tail(a);
                    current[u] += 1;
                }
            }
        }
    }
}

/// A flow meeting every supply and demand, found by routing from a super
/// source to a super sink.
pub(crate) fn feasible_flow(network: &Network, deadline: &Deadline) -> Result<Vec<i64>> {
    let n = network.node_count();
    let m = network.arc_count();
    let (s, t) = (n, n + 1);
    let mut tails = network.tails().to_vec();
    let mut heads = network.heads().to_vec();
    let mut caps = network.capacities().to_vec();
    let mut required = 0i64;
    for v in 0..n {
        let b = network.supply(v);
        if b > 0 {
            tails.push(s);
            heads.push(v);
            caps.push(b);
            required += b;
        } else if b < 0 {
            tails.push(v);
            heads.push(t);
            caps.push(-b);
        }
    }
    let costs = vec![0; tails.len()];
    let zero = vec![0; tails.len()];
    let mut store = ResidualStore::from_parts(n + 2, &tails, &heads, &caps, &costs, &zero);
    let value = max_flow(&mut store, s, t, deadline)?;
    if value < required {
        return Err(McfError::Infeasible);
    }
    Ok((0..m).map(|a| store.flow(a)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::fixtures::{t1, t1_infeasible};

    #[test]
    fn t1_feasible() {
        let net = t1();
        let flow = feasible_flow(&net, &Deadline::none()).unwrap();
        assert!(net.excesses(&flow).iter().all(|&e| e == 0));
    }

    #[test]
    fn t1_cut_is_infeasible() {
        assert_eq!(feasible_flow(&t1_infeasible(), &Deadline::none()), Err(McfError::Infeasible));
    }
}
