use thiserror::Error;

/// Errors raised while building networks or running solvers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum McfError {
    #[error("a network needs at least one node")]
    EmptyNetwork,
    #[error("input arrays have inconsistent lengths")]
    LengthMismatch,
    #[error("arc {arc} references node {node}, which is out of range")]
    NodeOutOfRange { arc: usize, node: usize },
    #[error("arc {0} is a self-loop")]
    SelfLoop(usize),
    #[error("node supplies sum to {0}, expected 0")]
    UnbalancedSupply(i128),
    #[error("arc {arc} has negative capacity {capacity}")]
    NegativeCapacity { arc: usize, capacity: i64 },
    #[error("network is not weakly connected")]
    Disconnected,
    #[error("numeric range too large for 64-bit arithmetic: {0}")]
    OverflowRisk(&'static str),
    #[error("arc {0} has a negative cost, which this solver does not accept")]
    NegativeCost(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("problem is infeasible")]
    Infeasible,
    #[error("time limit exceeded")]
    Timeout,
    #[error("flow is not feasible")]
    InfeasibleFlow,
    #[error("residual network contains a negative cycle")]
    NegativeCycle,
    #[error("pivot cycle has unbounded capacity")]
    UnboundedCycle,
    #[error("optimality criteria disagree: {0}")]
    InternalInconsistency(String),
}

pub type Result<T, E = McfError> = std::result::Result<T, E>;
