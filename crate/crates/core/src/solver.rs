//! Common solver front end: algorithm selection, deadlines and reports.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::cost_scaling::PhaseStats;
use crate::error::{McfError, Result};
use crate::network::Network;

/// Wall-clock limit checked by solvers at loop boundaries.
#[derive(Debug, Clone, Copy, Default)]
pub struct Deadline(Option<Instant>);

impl Deadline {
    pub fn none() -> Self {
        Deadline(None)
    }

    pub fn after(limit: Duration) -> Self {
        Deadline(Instant::now().checked_add(limit))
    }

    pub fn from_timeout(timeout: Option<Duration>) -> Self {
        timeout.map_or(Deadline::none(), Deadline::after)
    }

    pub fn expired(&self) -> bool {
        self.0.is_some_and(|t| Instant::now() >= t)
    }

    pub fn check(&self) -> Result<()> {
        if self.expired() {
            Err(McfError::Timeout)
        } else {
            Ok(())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Optimal,
    Infeasible,
    /// A pivot cycle without a finite bottleneck, which finite capacities rule out.
    UnboundedGuard,
    Timeout,
}

impl Status {
    /// Status for errors that describe the instance or the run rather than bad input.
    pub fn from_error(err: &McfError) -> Option<Status> {
        match err {
            McfError::Infeasible => Some(Status::Infeasible),
            McfError::Timeout => Some(Status::Timeout),
            McfError::UnboundedCycle => Some(Status::UnboundedGuard),
            _ => None,
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Optimal => "optimal",
            Status::Infeasible => "infeasible",
            Status::UnboundedGuard => "unbounded",
            Status::Timeout => "timeout",
        })
    }
}

#[derive(Debug, Clone)]
pub struct SolverReport {
    pub status: Status,
    pub objective: Option<i64>,
    /// Main-loop count: cancellations, augmentations, phases or pivots.
    pub iterations: u64,
    pub counters: Vec<(&'static str, u64)>,
    /// Per-phase counters, filled by cost scaling only.
    pub phases: Vec<PhaseStats>,
    pub wall_time: Duration,
}

impl SolverReport {
    pub(crate) fn optimal(network: &Network, flow: &[i64], iterations: u64) -> Self {
        SolverReport {
            status: Status::Optimal,
            objective: Some(network.objective(flow)),
            iterations,
            counters: Vec::new(),
            phases: Vec::new(),
            wall_time: Duration::ZERO,
        }
    }

    pub(crate) fn with_counters(mut self, counters: Vec<(&'static str, u64)>) -> Self {
        self.counters = counters;
        self
    }

    pub fn counter(&self, name: &str) -> Option<u64> {
        self.counters.iter().find(|(k, _)| *k == name).map(|&(_, v)| v)
    }

    fn failed(status: Status, wall_time: Duration) -> Self {
        SolverReport {
            status,
            objective: None,
            iterations: 0,
            counters: Vec::new(),
            phases: Vec::new(),
            wall_time,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub flow: Vec<i64>,
    pub report: SolverReport,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CasParams {
    pub alpha: i64,
    /// Adds an artificial hub node connected both ways to every node.
    pub extend_graph: bool,
}

impl Default for CasParams {
    fn default() -> Self {
        CasParams { alpha: 4, extend_graph: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CosVariant {
    PushRelabel,
    AugmentRelabel,
    PartialAugmentRelabel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Heuristics {
    pub price_refinement: bool,
    pub global_update: bool,
    /// Ignored by augment-relabel.
    pub push_look_ahead: bool,
}

impl Default for Heuristics {
    fn default() -> Self {
        Heuristics { price_refinement: true, global_update: true, push_look_ahead: true }
    }
}

impl Heuristics {
    pub fn none() -> Self {
        Heuristics { price_refinement: false, global_update: false, push_look_ahead: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CosParams {
    pub variant: CosVariant,
    pub alpha: i64,
    /// Path length limit for partial augment-relabel.
    pub k: usize,
    pub heuristics: Heuristics,
}

impl Default for CosParams {
    fn default() -> Self {
        CosParams {
            variant: CosVariant::PartialAugmentRelabel,
            alpha: 16,
            k: 4,
            heuristics: Heuristics::default(),
        }
    }
}

impl CosParams {
    pub fn variant(variant: CosVariant) -> Self {
        CosParams { variant, ..Default::default() }
    }
}

/// Pricing strategy for the network simplex. `None` sizes are derived from
/// the arc count when the solver starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PivotRule {
    BestEligible,
    FirstEligible,
    BlockSearch { block: Option<usize> },
    CandidateList { list: Option<usize>, minor: Option<usize> },
    AlteringList { block: Option<usize>, head: Option<usize> },
}

impl PivotRule {
    pub const ALL: [PivotRule; 5] = [
        PivotRule::BestEligible,
        PivotRule::FirstEligible,
        PivotRule::BlockSearch { block: None },
        PivotRule::CandidateList { list: None, minor: None },
        PivotRule::AlteringList { block: None, head: None },
    ];

    pub fn short_name(&self) -> &'static str {
        match self {
            PivotRule::BestEligible => "be",
            PivotRule::FirstEligible => "fe",
            PivotRule::BlockSearch { .. } => "bs",
            PivotRule::CandidateList { .. } => "cl",
            PivotRule::AlteringList { .. } => "al",
        }
    }
}

impl Default for PivotRule {
    fn default() -> Self {
        PivotRule::BlockSearch { block: None }
    }
}

impl FromStr for PivotRule {
    type Err = McfError;

    fn from_str(s: &str) -> Result<Self> {
        PivotRule::ALL
            .into_iter()
            .find(|r| r.short_name() == s)
            .ok_or_else(|| McfError::InvalidParameter(format!("unknown pivot rule '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NsParams {
    pub rule: PivotRule,
    /// Seeds the first pivots with arcs found by a reverse search from demand nodes.
    pub startup_heuristic: bool,
}

impl Default for NsParams {
    fn default() -> Self {
        NsParams { rule: PivotRule::default(), startup_heuristic: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    /// Cycle canceling with Bellman–Ford.
    Scc,
    /// Minimum-mean cycle canceling.
    Mmcc,
    /// Cancel-and-tighten.
    Cat,
    /// Successive shortest paths.
    Ssp,
    /// Capacity scaling.
    Cas(CasParams),
    /// Cost scaling.
    Cos(CosParams),
    /// Primal network simplex.
    Ns(NsParams),
}

impl Algorithm {
    /// Every solver, with all cost-scaling variants and pivot rules at defaults.
    pub fn all_configurations() -> Vec<Algorithm> {
        let mut all = vec![Algorithm::Scc, Algorithm::Mmcc, Algorithm::Cat, Algorithm::Ssp, Algorithm::Cas(CasParams::default())];
        for v in [CosVariant::PushRelabel, CosVariant::AugmentRelabel, CosVariant::PartialAugmentRelabel] {
            all.push(Algorithm::Cos(CosParams::variant(v)));
        }
        for rule in PivotRule::ALL {
            all.push(Algorithm::Ns(NsParams { rule, ..Default::default() }));
        }
        all
    }

    /// Whether the solver rejects negative arc costs.
    pub fn requires_nonnegative_costs(&self) -> bool {
        matches!(self, Algorithm::Ssp | Algorithm::Cas(_))
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Algorithm::Scc => f.write_str("scc"),
            Algorithm::Mmcc => f.write_str("mmcc"),
            Algorithm::Cat => f.write_str("cat"),
            Algorithm::Ssp => f.write_str("ssp"),
            Algorithm::Cas(_) => f.write_str("cas"),
            Algorithm::Cos(p) => f.write_str(match p.variant {
                CosVariant::PushRelabel => "cos-pr",
                CosVariant::AugmentRelabel => "cos-ar",
                CosVariant::PartialAugmentRelabel => "cos-par",
            }),
            Algorithm::Ns(p) => write!(f, "ns-{}", p.rule.short_name()),
        }
    }
}

impl FromStr for Algorithm {
    type Err = McfError;

    /// Accepts `scc`, `mmcc`, `cat`, `ssp`, `cas`, `cos`, `cos-pr`, `cos-ar`,
    /// `cos-par`, `ns` and `ns-<rule>`.
    fn from_str(s: &str) -> Result<Self> {
        let alg = match s {
            "scc" => Algorithm::Scc,
            "mmcc" => Algorithm::Mmcc,
            "cat" => Algorithm::Cat,
            "ssp" => Algorithm::Ssp,
            "cas" => Algorithm::Cas(CasParams::default()),
            "cos" | "cos-par" => Algorithm::Cos(CosParams::default()),
            "cos-pr" => Algorithm::Cos(CosParams::variant(CosVariant::PushRelabel)),
            "cos-ar" => Algorithm::Cos(CosParams::variant(CosVariant::AugmentRelabel)),
            "ns" => Algorithm::Ns(NsParams::default()),
            other => match other.strip_prefix("ns-") {
                Some(rule) => Algorithm::Ns(NsParams { rule: rule.parse()?, ..Default::default() }),
                None => return Err(McfError::InvalidParameter(format!("unknown algorithm '{s}'"))),
            },
        };
        Ok(alg)
    }
}

/// Runs `algorithm` on `network`. Infeasibility and timeouts come back as errors.
pub fn solve(network: &Network, algorithm: &Algorithm, timeout: Option<Duration>) -> Result<Solution> {
    let deadline = Deadline::from_timeout(timeout);
    let start = Instant::now();
    let mut solution = match algorithm {
        Algorithm::Scc => crate::cycle_cancel::solve_scc(network, &deadline),
        Algorithm::Mmcc => crate::cycle_cancel::solve_mmcc(network, &deadline),
        Algorithm::Cat => crate::cycle_cancel::solve_cat(network, &deadline),
        Algorithm::Ssp => crate::aug_path::solve_ssp(network, &deadline),
        Algorithm::Cas(p) => crate::aug_path::solve_cas(network, p, &deadline),
        Algorithm::Cos(p) => crate::cost_scaling::solve_cos(network, p, &deadline),
        Algorithm::Ns(p) => crate::simplex::solve_ns(network, p, &deadline),
    }?;
    solution.report.wall_time = start.elapsed();
    Ok(solution)
}

/// Like [`solve`], but folds infeasibility, timeouts and the unbounded guard
/// into the report status. Other errors (bad parameters, rejected costs,
/// overflow risk) are still returned.
pub fn run(network: &Network, algorithm: &Algorithm, timeout: Option<Duration>) -> Result<(SolverReport, Option<Vec<i64>>)> {
    let start = Instant::now();
    match solve(network, algorithm, timeout) {
        Ok(s) => Ok((s.report, Some(s.flow))),
        Err(e) => match Status::from_error(&e) {
            Some(status) => Ok((SolverReport::failed(status, start.elapsed()), None)),
            None => Err(e),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for alg in Algorithm::all_configurations() {
            let parsed: Algorithm = alg.to_string().parse().unwrap();
            assert_eq!(parsed, alg);
        }
        assert!("nope".parse::<Algorithm>().is_err());
        assert!("ns-xx".parse::<Algorithm>().is_err());
    }

    #[test]
    fn expired_deadline_times_out() {
        let d = Deadline::after(Duration::ZERO);
        assert_eq!(d.check(), Err(McfError::Timeout));
        assert!(Deadline::none().check().is_ok());
    }
}
