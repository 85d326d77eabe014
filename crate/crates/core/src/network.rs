//! Problem instances and the arithmetic shared by every solver.
//!
//! Nodes are `0..n`. Arc `a` runs from `tail(a)` to `head(a)` with capacity
//! `u_a >= 0` and integer cost `c_a`; node `i` has signed supply `b_i`
//! (positive for supply, negative for demand) and the supplies sum to zero.

use crate::error::{McfError, Result};

/// Largest cost-scaling factor any solver accepts. Build-time overflow checks
/// are sized against it.
pub const ALPHA_MAX: i64 = 64;

/// An immutable, validated minimum-cost flow instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    supply: Vec<i64>,
    tail: Vec<usize>,
    head: Vec<usize>,
    capacity: Vec<i64>,
    cost: Vec<i64>,
}

/// Largest supply-or-capacity (`U`) and largest absolute arc cost (`C`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Magnitudes {
    pub max_capacity: i64,
    pub max_cost: i64,
}

impl Network {
    /// Validates and builds a network from parallel arrays.
    pub fn new(
        n: usize,
        arcs: &[(usize, usize)],
        capacities: &[i64],
        costs: &[i64],
        supplies: &[i64],
    ) -> Result<Network> {
        if n == 0 {
            return Err(McfError::EmptyNetwork);
        }
        if capacities.len() != arcs.len() || costs.len() != arcs.len() || supplies.len() != n {
            return Err(McfError::LengthMismatch);
        }
        for (a, &(s, t)) in arcs.iter().enumerate() {
            if s >= n {
                return Err(McfError::NodeOutOfRange { arc: a, node: s });
            }
            if t >= n {
                return Err(McfError::NodeOutOfRange { arc: a, node: t });
            }
            if s == t {
                return Err(McfError::SelfLoop(a));
            }
        }
        if let Some((a, &u)) = capacities.iter().enumerate().find(|(_, &u)| u < 0) {
            return Err(McfError::NegativeCapacity { arc: a, capacity: u });
        }
        let total: i128 = supplies.iter().map(|&b| b as i128).sum();
        if total != 0 {
            return Err(McfError::UnbalancedSupply(total));
        }

        let network = Network {
            supply: supplies.to_vec(),
            tail: arcs.iter().map(|&(s, _)| s).collect(),
            head: arcs.iter().map(|&(_, t)| t).collect(),
            capacity: capacities.to_vec(),
            cost: costs.to_vec(),
        };
        network.check_connected()?;
        network.check_headroom()?;
        Ok(network)
    }

    fn check_connected(&self) -> Result<()> {
        let n = self.node_count();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut components = n;
        for a in 0..self.arc_count() {
            let (ra, rb) = (find(&mut parent, self.tail[a]), find(&mut parent, self.head[a]));
            if ra != rb {
                parent[ra] = rb;
                components -= 1;
            }
        }
        if components == 1 {
            Ok(())
        } else {
            Err(McfError::Disconnected)
        }
    }

    fn check_headroom(&self) -> Result<()> {
        let Magnitudes { max_capacity: u, max_cost: c } = self.magnitudes();
        let n = self.node_count() as i128;
        let (u, c) = (u as i128, c.max(1) as i128);
        let limit = i64::MAX as i128;
        if 2 * ALPHA_MAX as i128 * (n + 1) * c > limit {
            return Err(McfError::OverflowRisk("2*alpha*n*C"));
        }
        if (n + 1) * u.max(1) * c > limit {
            return Err(McfError::OverflowRisk("n*U*C"));
        }
        let total: i128 = (0..self.arc_count())
            .map(|a| self.capacity[a] as i128 * (self.cost[a] as i128).abs())
            .sum();
        if total > limit {
            return Err(McfError::OverflowRisk("sum of |c|*u"));
        }
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.supply.len()
    }

    pub fn arc_count(&self) -> usize {
        self.tail.len()
    }

    pub fn tail(&self, arc: usize) -> usize {
        self.tail[arc]
    }

    pub fn head(&self, arc: usize) -> usize {
        self.head[arc]
    }

    pub fn capacity(&self, arc: usize) -> i64 {
        self.capacity[arc]
    }

    pub fn cost(&self, arc: usize) -> i64 {
        self.cost[arc]
    }

    pub fn supply(&self, node: usize) -> i64 {
        self.supply[node]
    }

    pub fn supplies(&self) -> &[i64] {
        &self.supply
    }

    pub fn tails(&self) -> &[usize] {
        &self.tail
    }

    pub fn heads(&self) -> &[usize] {
        &self.head
    }

    pub fn capacities(&self) -> &[i64] {
        &self.capacity
    }

    pub fn costs(&self) -> &[i64] {
        &self.cost
    }

    /// Arc list as `(tail, head)` pairs.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.tail.iter().copied().zip(self.head.iter().copied())
    }

    pub fn has_negative_costs(&self) -> bool {
        self.cost.iter().any(|&c| c < 0)
    }

    /// Total supply over supply nodes.
    pub fn total_supply(&self) -> i64 {
        self.supply.iter().filter(|&&b| b > 0).sum()
    }

    /// `U = max(|b_i|, u_ij)` and `C = max |c_ij|`.
    pub fn magnitudes(&self) -> Magnitudes {
        let max_supply = self.supply.iter().map(|b| b.abs()).max().unwrap_or(0);
        let max_cap = self.capacity.iter().copied().max().unwrap_or(0);
        let max_cost = self.cost.iter().map(|c| c.abs()).max().unwrap_or(0);
        Magnitudes {
            max_capacity: max_supply.max(max_cap),
            max_cost,
        }
    }

    /// `c_a + pi_tail - pi_head`.
    pub fn reduced_cost(&self, arc: usize, potentials: &[i64]) -> i64 {
        reduced_cost(self.cost[arc], potentials[self.tail[arc]], potentials[self.head[arc]])
    }

    /// Total cost of a flow vector.
    pub fn objective(&self, flow: &[i64]) -> i64 {
        flow.iter().zip(&self.cost).map(|(&x, &c)| x * c).sum()
    }

    /// `b_i + inflow(i) - outflow(i)` for every node.
    pub fn excesses(&self, flow: &[i64]) -> Vec<i64> {
        let mut excess = self.supply.clone();
        for (a, &x) in flow.iter().enumerate() {
            excess[self.tail[a]] -= x;
            excess[self.head[a]] += x;
        }
        excess
    }
}

/// Reduced cost `c + pi_i - pi_j` of an arc `(i, j)`.
#[inline]
pub fn reduced_cost(cost: i64, tail_potential: i64, head_potential: i64) -> i64 {
    cost + tail_potential - head_potential
}

/// Signed excess of a single node under `flow`.
pub fn node_excess(network: &Network, flow: &[i64], node: usize) -> i64 {
    let mut e = network.supply(node);
    for (a, &x) in flow.iter().enumerate() {
        if network.head(a) == node {
            e += x;
        }
        if network.tail(a) == node {
            e -= x;
        }
    }
    e
}

/// Incremental construction helper.
#[derive(Debug, Clone, Default)]
pub struct NetworkBuilder {
    supply: Vec<i64>,
    arcs: Vec<(usize, usize)>,
    capacity: Vec<i64>,
    cost: Vec<i64>,
}

impl NetworkBuilder {
    pub fn new(node_count: usize) -> Self {
        NetworkBuilder {
            supply: vec![0; node_count],
            ..Default::default()
        }
    }

    pub fn supply(mut self, node: usize, amount: i64) -> Self {
        self.supply[node] = amount;
        self
    }

    pub fn supplies(mut self, supplies: &[i64]) -> Self {
        self.supply = supplies.to_vec();
        self
    }

    pub fn arc(mut self, tail: usize, head: usize, capacity: i64, cost: i64) -> Self {
        self.push_arc(tail, head, capacity, cost);
        self
    }

    pub fn push_arc(&mut self, tail: usize, head: usize, capacity: i64, cost: i64) -> usize {
        self.arcs.push((tail, head));
        self.capacity.push(capacity);
        self.cost.push(cost);
        self.arcs.len() - 1
    }

    pub fn build(self) -> Result<Network> {
        Network::new(
            self.supply.len(),
            &self.arcs,
            &self.capacity,
            &self.cost,
            &self.supply,
        )
    }
}

/// Mutable solver state: a flow per arc, a potential and an excess per node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowState {
    pub flow: Vec<i64>,
    pub potential: Vec<i64>,
    pub excess: Vec<i64>,
}

impl FlowState {
    /// Zero flow, zero potentials; excesses equal the supplies.
    pub fn zero(network: &Network) -> Self {
        FlowState {
            flow: vec![0; network.arc_count()],
            potential: vec![0; network.node_count()],
            excess: network.supplies().to_vec(),
        }
    }

    pub fn from_flow(network: &Network, flow: Vec<i64>) -> Self {
        let excess = network.excesses(&flow);
        FlowState {
            flow,
            potential: vec![0; network.node_count()],
            excess,
        }
    }

    /// True when every arc respects its bounds and the stored excesses match
    /// the flow.
    pub fn is_consistent(&self, network: &Network) -> bool {
        self.flow.len() == network.arc_count()
            && self
                .flow
                .iter()
                .enumerate()
                .all(|(a, &x)| 0 <= x && x <= network.capacity(a))
            && network.excesses(&self.flow) == self.excess
    }
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn minimal_instance_is_valid() {
        let net = Network::new(2, &[(0, 1)], &[1], &[5], &[1, -1]).unwrap();
        assert_eq!(net.node_count(), 2);
        assert_eq!(net.arc_count(), 1);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(
            Network::new(2, &[(0, 1)], &[1], &[5], &[1, 0]),
            Err(McfError::UnbalancedSupply(1))
        );
        assert_eq!(
            Network::new(2, &[(0, 1)], &[-1], &[5], &[0, 0]),
            Err(McfError::NegativeCapacity { arc: 0, capacity: -1 })
        );
        assert_eq!(
            Network::new(3, &[(0, 1)], &[1], &[5], &[0, 0, 0]),
            Err(McfError::Disconnected)
        );
        assert_eq!(
            Network::new(2, &[(1, 1)], &[1], &[5], &[0, 0]),
            Err(McfError::SelfLoop(0))
        );
        assert_eq!(
            Network::new(2, &[(0, 2)], &[1], &[5], &[0, 0]),
            Err(McfError::NodeOutOfRange { arc: 0, node: 2 })
        );
        assert_eq!(Network::new(0, &[], &[], &[], &[]), Err(McfError::EmptyNetwork));
        assert_eq!(
            Network::new(2, &[(0, 1)], &[i64::MAX / 2], &[i64::MAX / 2], &[0, 0]),
            Err(McfError::OverflowRisk("2*alpha*n*C"))
        );
    }

    #[test]
    fn parallel_arcs_and_zero_capacity_are_accepted() {
        let net = NetworkBuilder::new(2)
            .arc(0, 1, 0, 1)
            .arc(0, 1, 4, 2)
            .build()
            .unwrap();
        assert_eq!(net.capacity(0), 0);
    }

    #[test]
    fn t1_is_valid() {
        let net = t1();
        assert_eq!(net.node_count(), 4);
        assert_eq!(net.arc_count(), 5);
        assert_eq!(net.total_supply(), 4);
    }

    #[test]
    fn reduced_cost_examples() {
        assert_eq!(reduced_cost(5, 0, 0), 5);
        assert_eq!(reduced_cost(5, 2, 7), 0);
    }

    #[test]
    fn excess_examples() {
        let net = t1();
        let zero = vec![0; 5];
        assert_eq!(net.excesses(&zero), vec![4, 0, 0, -4]);
        let mut flow = zero.clone();
        flow[0] = 3;
        assert_eq!(node_excess(&net, &flow, 0), 1);
        assert_eq!(node_excess(&net, &flow, 1), 3);
        assert_eq!(net.excesses(&flow).iter().sum::<i64>(), 0);
    }

    #[test]
    fn magnitude_examples() {
        assert_eq!(
            t1().magnitudes(),
            Magnitudes { max_capacity: 4, max_cost: 3 }
        );
        let single = Network::new(2, &[(0, 1)], &[1], &[5], &[1, -1]).unwrap();
        assert_eq!(
            single.magnitudes(),
            Magnitudes { max_capacity: 1, max_cost: 5 }
        );
        assert_eq!(zero_cost().magnitudes().max_cost, 0);
    }

    fn zero_cost() -> Network {
        NetworkBuilder::new(2).arc(0, 1, 3, 0).build().unwrap()
    }

    #[test]
    fn flow_state_tracks_excess() {
        let net = t1();
        let state = FlowState::from_flow(&net, vec![2, 2, 2, 0, 4]);
        assert_eq!(state.excess, vec![0, 0, 0, 0]);
        assert!(state.is_consistent(&net));
        assert_eq!(net.objective(&state.flow), 12);
    }
}
