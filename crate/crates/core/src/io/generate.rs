//! Seeded instance generators.
//!
//! The random families follow NETGEN's statistics (uniform endpoints,
//! capacities and costs, about sqrt(n) supply and demand nodes) but not its
//! code. `grid-torus` only approximates GOTO: a wrapped grid with a single
//! source and sink. Randomness comes from ChaCha8 so a seed gives the same
//! instance on every platform.

use crate::network::Network;
use crate::residual::ResidualStore;
use crate::solver::Deadline;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid generator spec: {0}")]
pub struct InvalidSpec(pub String);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    RandomSparse,
    RandomDense,
    GridOnTorus,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::RandomSparse, Family::RandomDense, Family::GridOnTorus];

    pub fn name(self) -> &'static str {
        match self {
            Family::RandomSparse => "random-sparse",
            Family::RandomDense => "random-dense",
            Family::GridOnTorus => "grid-torus",
        }
    }

    /// Arcs per node: 8 for the sparse families, `ceil(sqrt(n))` for dense.
    pub fn default_degree(self, n: usize) -> usize {
        match self {
            Family::RandomDense => ceil_sqrt(n),
            _ => 8,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = InvalidSpec;

    fn from_str(s: &str) -> Result<Self, InvalidSpec> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| InvalidSpec(format!("unknown family '{s}'")))
    }
}

fn ceil_sqrt(n: usize) -> usize {
    let mut r = (n as f64).sqrt() as usize;
    while r * r < n {
        r += 1;
    }
    while r > 0 && (r - 1) * (r - 1) >= n {
        r -= 1;
    }
    r
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenSpec {
    pub family: Family,
    pub n: usize,
    /// Average outdegree; `m = degree * n`.
    pub degree: usize,
    pub capacity: (i64, i64),
    pub cost: (i64, i64),
    /// Supply nodes, and as many demand nodes. Ignored by `grid-torus`.
    pub supply_nodes: usize,
    /// Total supply. `grid-torus` picks its own from the max flow.
    pub total_supply: i64,
    pub seed: u64,
}

impl GenSpec {
    /// Ranges `[1, 1000]` and `[1, 10000]`, `ceil(sqrt(n))` supply nodes with
    /// 1000 units each.
    pub fn new(family: Family, n: usize, seed: u64) -> Self {
        let k = ceil_sqrt(n).min(n / 2).max(1);
        GenSpec {
            family,
            n,
            degree: family.default_degree(n),
            capacity: (1, 1000),
            cost: (1, 10_000),
            supply_nodes: k,
            total_supply: 1000 * k as i64,
            seed,
        }
    }

    pub fn degree(mut self, degree: usize) -> Self {
        self.degree = degree;
        self
    }

    pub fn arc_count(&self) -> usize {
        self.degree * self.n
    }

    fn validate(&self) -> Result<(), InvalidSpec> {
        let bad = |msg: String| Err(InvalidSpec(msg));
        if self.n < 2 {
            return bad(format!("need at least 2 nodes, got {}", self.n));
        }
        if self.degree == 0 {
            return bad("degree must be positive".into());
        }
        if self.capacity.0 < 1 || self.capacity.0 > self.capacity.1 {
            return bad(format!("bad capacity range {:?}", self.capacity));
        }
        if self.cost.0 > self.cost.1 {
            return bad(format!("bad cost range {:?}", self.cost));
        }
        if self.family != Family::GridOnTorus {
            if self.supply_nodes == 0 || 2 * self.supply_nodes > self.n {
                return bad(format!("{} supply nodes do not fit in {} nodes", self.supply_nodes, self.n));
            }
            if self.total_supply < self.supply_nodes as i64 {
                return bad(format!("total supply {} is below the supply node count", self.total_supply));
            }
            // Each supply/demand pair may need a three-arc path.
            if 6 * self.supply_nodes > self.arc_count() {
                return bad(format!("{} arcs cannot carry the feasibility paths", self.arc_count()));
            }
        }
        Ok(())
    }
}

/// Splits `total` into `parts` near-equal positive amounts.
fn split(total: i64, parts: usize) -> Vec<i64> {
    let base = total / parts as i64;
    let extra = (total % parts as i64) as usize;
    (0..parts).map(|i| base + i64::from(i < extra)).collect()
}

struct Arcs {
    ends: Vec<(usize, usize)>,
    caps: Vec<i64>,
    costs: Vec<i64>,
}

impl Arcs {
    fn with_capacity(m: usize) -> Self {
        Arcs { ends: Vec::with_capacity(m), caps: Vec::with_capacity(m), costs: Vec::with_capacity(m) }
    }

    fn push(&mut self, spec: &GenSpec, rng: &mut ChaCha8Rng, t: usize, h: usize, min_cap: i64) {
        self.ends.push((t, h));
        self.caps.push(rng.random_range(spec.capacity.0..=spec.capacity.1).max(min_cap));
        self.costs.push(rng.random_range(spec.cost.0..=spec.cost.1));
    }
}

pub fn generate(spec: &GenSpec) -> Result<Network, InvalidSpec> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    match spec.family {
        Family::RandomSparse | Family::RandomDense => random(spec, &mut rng),
        Family::GridOnTorus => torus(spec, &mut rng),
    }
}

fn random_other(rng: &mut ChaCha8Rng, n: usize, not: usize) -> usize {
    let v = rng.random_range(0..n - 1);
    if v >= not {
        v + 1
    } else {
        v
    }
}

fn random(spec: &GenSpec, rng: &mut ChaCha8Rng) -> Result<Network, InvalidSpec> {
    let n = spec.n;
    let k = spec.supply_nodes;
    let m = spec.arc_count();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let sources = &order[..k];
    let sinks = &order[k..2 * k];
    let give = split(spec.total_supply, k);
    let take = split(spec.total_supply, k);
    let mut supplies = vec![0i64; n];
    for (&v, &b) in sources.iter().zip(&give) {
        supplies[v] = b;
    }
    for (&v, &b) in sinks.iter().zip(&take) {
        supplies[v] = -b;
    }

    // Pair supplies with demands in order and lay a path for each pair, wide
    // enough to carry the pair's amount on its own.
    let mut arcs = Arcs::with_capacity(m);
    let (mut i, mut j) = (0, 0);
    let (mut left, mut need) = (give[0], take[0]);
    while i < k && j < k {
        let amount = left.min(need);
        let (s, t) = (sources[i], sinks[j]);
        let hops = rng.random_range(0..=2usize);
        let mut at = s;
        for _ in 0..hops {
            let mut next = random_other(rng, n, at);
            if next == t {
                next = s;
            }
            if next != at {
                arcs.push(spec, rng, at, next, amount);
                at = next;
            }
        }
        arcs.push(spec, rng, at, t, amount);
        left -= amount;
        need -= amount;
        if left == 0 {
            i += 1;
            left = give.get(i).copied().unwrap_or(0);
        }
        if need == 0 {
            j += 1;
            need = take.get(j).copied().unwrap_or(0);
        }
    }
    while arcs.ends.len() < m {
        let t = rng.random_range(0..n);
        let h = random_other(rng, n, t);
        arcs.push(spec, rng, t, h, 0);
    }
    build_shuffled(n, arcs, &supplies, rng)
}

fn build_shuffled(n: usize, arcs: Arcs, supplies: &[i64], rng: &mut ChaCha8Rng) -> Result<Network, InvalidSpec> {
    let mut perm: Vec<usize> = (0..arcs.ends.len()).collect();
    perm.shuffle(rng);
    let ends: Vec<_> = perm.iter().map(|&a| arcs.ends[a]).collect();
    let caps: Vec<_> = perm.iter().map(|&a| arcs.caps[a]).collect();
    let costs: Vec<_> = perm.iter().map(|&a| arcs.costs[a]).collect();
    Network::new(n, &ends, &caps, &costs, supplies).map_err(|e| InvalidSpec(e.to_string()))
}

/// Largest divisor of `n` not above `sqrt(n)`.
fn grid_rows(n: usize) -> usize {
    (1..=ceil_sqrt(n)).rev().find(|&r| n.is_multiple_of(r) && r * r <= n).unwrap_or(1)
}

fn torus(spec: &GenSpec, rng: &mut ChaCha8Rng) -> Result<Network, InvalidSpec> {
    let n = spec.n;
    let rows = grid_rows(n);
    let cols = n / rows;
    let m = spec.arc_count();
    let id = |r: usize, c: usize| r * cols + c;
    let mut arcs = Arcs::with_capacity(m);
    let mut steps: Vec<(isize, isize)> = vec![(0, 1), (1, 0)];
    if spec.degree >= 4 {
        steps.extend([(0, -1), (-1, 0)]);
    }
    'grid: for r in 0..rows {
        for c in 0..cols {
            for &(dr, dc) in &steps {
                if arcs.ends.len() == m {
                    break 'grid;
                }
                let r2 = (r as isize + dr).rem_euclid(rows as isize) as usize;
                let c2 = (c as isize + dc).rem_euclid(cols as isize) as usize;
                if (r2, c2) != (r, c) {
                    arcs.push(spec, rng, id(r, c), id(r2, c2), 0);
                }
            }
        }
    }
    while arcs.ends.len() < m {
        let t = rng.random_range(0..n);
        let h = random_other(rng, n, t);
        arcs.push(spec, rng, t, h, 0);
    }
    // Source in one corner, sink half way round the torus in both directions.
    let source = 0;
    let sink = id(rows / 2, cols / 2).max(1);
    let cut = max_flow_value(n, &arcs, source, sink);
    if cut == 0 {
        return Err(InvalidSpec("sink is unreachable from the source".into()));
    }
    let mut supplies = vec![0i64; n];
    supplies[source] = (cut / 2).max(1);
    supplies[sink] = -supplies[source];
    build_shuffled(n, arcs, &supplies, rng)
}

fn max_flow_value(n: usize, arcs: &Arcs, s: usize, t: usize) -> i64 {
    let tails: Vec<usize> = arcs.ends.iter().map(|e| e.0).collect();
    let heads: Vec<usize> = arcs.ends.iter().map(|e| e.1).collect();
    let costs = vec![0; tails.len()];
    let flow = vec![0; tails.len()];
    let mut store = ResidualStore::from_parts(n, &tails, &heads, &arcs.caps, &costs, &flow);
    crate::maxflow::max_flow(&mut store, s, t, &Deadline::none()).unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::dimacs::write_dimacs;

    #[test]
    fn sparse_shape() {
        let net = generate(&GenSpec::new(Family::RandomSparse, 1 << 10, 7)).unwrap();
        assert_eq!(net.arc_count(), 8 << 10);
        assert_eq!(net.supplies().iter().sum::<i64>(), 0);
        assert_eq!(net.total_supply(), 32_000);
        assert_eq!(net.supplies().iter().filter(|&&b| b > 0).count(), 32);
        assert!(net.supplies().iter().all(|&b| b.abs() <= 1000));
    }

    #[test]
    fn deterministic() {
        for family in Family::ALL {
            let spec = GenSpec::new(family, 50, 3);
            assert_eq!(write_dimacs(&generate(&spec).unwrap()), write_dimacs(&generate(&spec).unwrap()));
        }
        let a = generate(&GenSpec::new(Family::RandomSparse, 50, 3)).unwrap();
        let b = generate(&GenSpec::new(Family::RandomSparse, 50, 4)).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn torus_shape() {
        let net = generate(&GenSpec::new(Family::GridOnTorus, 64, 1)).unwrap();
        assert_eq!(net.arc_count(), 512);
        assert_eq!(net.supplies().iter().filter(|&&b| b != 0).count(), 2);
        assert_eq!(grid_rows(64), 8);
        assert_eq!(grid_rows(12), 3);
        assert_eq!(grid_rows(13), 1);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(generate(&GenSpec::new(Family::RandomSparse, 1, 0)).is_err());
        assert!(generate(&GenSpec::new(Family::RandomSparse, 10, 0).degree(0)).is_err());
        let mut s = GenSpec::new(Family::RandomSparse, 10, 0);
        s.supply_nodes = 6;
        assert!(generate(&s).is_err());
        assert!("goto".parse::<Family>().is_err());
        assert_eq!("grid-torus".parse::<Family>().unwrap(), Family::GridOnTorus);
    }

    #[test]
    fn helpers() {
        assert_eq!(ceil_sqrt(16), 4);
        assert_eq!(ceil_sqrt(17), 5);
        assert_eq!(ceil_sqrt(1), 1);
        assert_eq!(split(10, 3), vec![4, 3, 3]);
    }
}
