//! C interface to the solvers in `mcf-core`.
//!
//! Networks and solutions are opaque handles created and freed through this
//! API. Every fallible call returns an [`McfCode`]; on failure a message is
//! kept per thread and can be read with [`mcf_last_error`].

use mcf_core::io::dimacs::parse_dimacs;
use mcf_core::{run, Algorithm, CasParams, CosParams, CosVariant, McfError, Network, NsParams, PivotRule, Status};
use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::time::Duration;

/// Result codes. Zero is success.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum McfCode {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidNetwork = 3,
    ParseError = 4,
    /// The solver could not run on this input, e.g. negative costs for a
    /// solver that needs nonnegative ones.
    Unsupported = 5,
    Internal = 6,
    BufferTooSmall = 7,
}

/// Outcome of a solve, read from a solution handle.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum McfStatus {
    Optimal = 0,
    Infeasible = 1,
    Unbounded = 2,
    Timeout = 3,
}

/// Solver selection. Cost scaling uses partial augment-relabel and network
/// simplex uses block search unless another entry is chosen.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum McfAlgorithm {
    CycleCancel = 0,
    MinMeanCycleCancel = 1,
    CancelAndTighten = 2,
    SuccessiveShortestPath = 3,
    CapacityScaling = 4,
    CostScalingPushRelabel = 5,
    CostScalingAugmentRelabel = 6,
    CostScalingPartialAugmentRelabel = 7,
    SimplexBestEligible = 8,
    SimplexFirstEligible = 9,
    SimplexBlockSearch = 10,
    SimplexCandidateList = 11,
    SimplexAlteringList = 12,
}

/// Opaque network handle.
pub struct McfNetwork(Network);

/// Opaque solution handle.
pub struct McfSolution {
    status: McfStatus,
    objective: i64,
    iterations: u64,
    flow: Vec<i64>,
}

thread_local! {
    static LAST_ERROR: RefCell<Vec<u8>> = const { RefCell::new(Vec::new()) };
}

fn fail(code: McfCode, message: impl ToString) -> McfCode {
    LAST_ERROR.with(|e| *e.borrow_mut() = message.to_string().into_bytes());
    code
}

fn guarded(f: impl FnOnce() -> McfCode) -> McfCode {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(McfCode::Internal, "panic inside mcf"))
}

fn network_error(e: McfError) -> McfCode {
    fail(McfCode::InvalidNetwork, e)
}

fn algorithm(alg: McfAlgorithm) -> Algorithm {
    let ns = |rule| Algorithm::Ns(NsParams { rule, ..Default::default() });
    match alg {
        McfAlgorithm::CycleCancel => Algorithm::Scc,
        McfAlgorithm::MinMeanCycleCancel => Algorithm::Mmcc,
        McfAlgorithm::CancelAndTighten => Algorithm::Cat,
        McfAlgorithm::SuccessiveShortestPath => Algorithm::Ssp,
        McfAlgorithm::CapacityScaling => Algorithm::Cas(CasParams::default()),
        McfAlgorithm::CostScalingPushRelabel => Algorithm::Cos(CosParams::variant(CosVariant::PushRelabel)),
        McfAlgorithm::CostScalingAugmentRelabel => Algorithm::Cos(CosParams::variant(CosVariant::AugmentRelabel)),
        McfAlgorithm::CostScalingPartialAugmentRelabel => {
            Algorithm::Cos(CosParams::variant(CosVariant::PartialAugmentRelabel))
        }
        McfAlgorithm::SimplexBestEligible => ns(PivotRule::BestEligible),
        McfAlgorithm::SimplexFirstEligible => ns(PivotRule::FirstEligible),
        McfAlgorithm::SimplexBlockSearch => ns(PivotRule::BlockSearch { block: None }),
        McfAlgorithm::SimplexCandidateList => ns(PivotRule::CandidateList { list: None, minor: None }),
        McfAlgorithm::SimplexAlteringList => ns(PivotRule::AlteringList { block: None, head: None }),
    }
}

unsafe fn slice<'a, T>(p: *const T, len: usize) -> Option<&'a [T]> {
    if len == 0 {
        Some(&[])
    } else if p.is_null() {
        None
    } else {
        Some(std::slice::from_raw_parts(p, len))
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn mcf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the last error message of this thread into `buf` with a trailing
/// NUL and returns the message length without it. Pass a null `buf` to query
/// the length. Returns 0 when there is no message.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn mcf_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Builds a network with `nodes` nodes (numbered from 0) and `arcs` arcs.
/// `supplies` has one entry per node; the arc arrays have one per arc.
///
/// # Safety
/// Each array must be valid for its stated length and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mcf_network_new(
    nodes: usize,
    arcs: usize,
    tails: *const u32,
    heads: *const u32,
    capacities: *const i64,
    costs: *const i64,
    supplies: *const i64,
    out: *mut *mut McfNetwork,
) -> McfCode {
    guarded(|| {
        if out.is_null() {
            return fail(McfCode::NullPointer, "out is null");
        }
        *out = ptr::null_mut();
        let (Some(t), Some(h), Some(u), Some(c), Some(b)) = (
            slice(tails, arcs),
            slice(heads, arcs),
            slice(capacities, arcs),
            slice(costs, arcs),
            slice(supplies, nodes),
        ) else {
            return fail(McfCode::NullPointer, "an input array is null");
        };
        let ends: Vec<(usize, usize)> = t.iter().zip(h).map(|(&t, &h)| (t as usize, h as usize)).collect();
        match Network::new(nodes, &ends, u, c, b) {
            Ok(net) => {
                *out = Box::into_raw(Box::new(McfNetwork(net)));
                McfCode::Ok
            }
            Err(e) => network_error(e),
        }
    })
}

/// Parses a DIMACS min-cost flow instance. Lower bounds are rejected here
/// since a handle carries no offset.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mcf_network_from_dimacs(text: *const c_char, out: *mut *mut McfNetwork) -> McfCode {
    guarded(|| {
        if text.is_null() || out.is_null() {
            return fail(McfCode::NullPointer, "text or out is null");
        }
        *out = ptr::null_mut();
        let Ok(text) = CStr::from_ptr(text).to_str() else {
            return fail(McfCode::ParseError, "input is not UTF-8");
        };
        match parse_dimacs(text) {
            Ok(p) if p.lower_bounds.iter().any(|&l| l != 0) => {
                fail(McfCode::Unsupported, "instances with lower bounds are not supported here")
            }
            Ok(p) => {
                *out = Box::into_raw(Box::new(McfNetwork(p.network)));
                McfCode::Ok
            }
            Err(e) => fail(McfCode::ParseError, e),
        }
    })
}

/// # Safety
/// `net` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mcf_network_free(net: *mut McfNetwork) {
    if !net.is_null() {
        drop(Box::from_raw(net));
    }
}

/// # Safety
/// `net` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn mcf_network_node_count(net: *const McfNetwork) -> usize {
    net.as_ref().map_or(0, |n| n.0.node_count())
}

/// # Safety
/// `net` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn mcf_network_arc_count(net: *const McfNetwork) -> usize {
    net.as_ref().map_or(0, |n| n.0.arc_count())
}

/// Runs a solver. Infeasible instances and timeouts still return `Ok` with a
/// solution whose status says so. A nonpositive `timeout_secs` means no limit.
///
/// # Safety
/// `net` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mcf_solve(
    net: *const McfNetwork,
    alg: McfAlgorithm,
    timeout_secs: f64,
    out: *mut *mut McfSolution,
) -> McfCode {
    guarded(|| {
        if out.is_null() {
            return fail(McfCode::NullPointer, "out is null");
        }
        *out = ptr::null_mut();
        let Some(net) = net.as_ref() else {
            return fail(McfCode::NullPointer, "network is null");
        };
        let timeout = (timeout_secs > 0.0 && timeout_secs.is_finite()).then(|| Duration::from_secs_f64(timeout_secs));
        let (report, flow) = match run(&net.0, &algorithm(alg), timeout) {
            Ok(r) => r,
            Err(e @ (McfError::NegativeCost(_) | McfError::OverflowRisk(_))) => return fail(McfCode::Unsupported, e),
            Err(e @ McfError::InvalidParameter(_)) => return fail(McfCode::InvalidArgument, e),
            Err(e) => return fail(McfCode::Internal, e),
        };
        let status = match report.status {
            Status::Optimal => McfStatus::Optimal,
            Status::Infeasible => McfStatus::Infeasible,
            Status::UnboundedGuard => McfStatus::Unbounded,
            Status::Timeout => McfStatus::Timeout,
        };
        *out = Box::into_raw(Box::new(McfSolution {
            status,
            objective: report.objective.unwrap_or(0),
            iterations: report.iterations,
            flow: flow.unwrap_or_default(),
        }));
        McfCode::Ok
    })
}

/// # Safety
/// `sol` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mcf_solution_free(sol: *mut McfSolution) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}

/// # Safety
/// `sol` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn mcf_solution_status(sol: *const McfSolution) -> McfStatus {
    (*sol).status
}

/// Objective value; 0 unless the status is optimal.
///
/// # Safety
/// `sol` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn mcf_solution_objective(sol: *const McfSolution) -> i64 {
    (*sol).objective
}

/// # Safety
/// `sol` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn mcf_solution_iterations(sol: *const McfSolution) -> u64 {
    (*sol).iterations
}

/// Copies the arc flows into `flow`, which must hold one entry per arc.
/// Fails unless the status is optimal.
///
/// # Safety
/// `sol` must be a live handle and `flow` valid for `len` entries.
#[no_mangle]
pub unsafe extern "C" fn mcf_solution_flow(sol: *const McfSolution, flow: *mut i64, len: usize) -> McfCode {
    guarded(|| {
        let Some(sol) = sol.as_ref() else {
            return fail(McfCode::NullPointer, "solution is null");
        };
        if sol.status != McfStatus::Optimal {
            return fail(McfCode::InvalidArgument, "solution has no flow");
        }
        if len < sol.flow.len() {
            return fail(McfCode::BufferTooSmall, format!("need {} entries", sol.flow.len()));
        }
        if flow.is_null() && !sol.flow.is_empty() {
            return fail(McfCode::NullPointer, "flow is null");
        }
        ptr::copy_nonoverlapping(sol.flow.as_ptr(), flow, sol.flow.len());
        McfCode::Ok
    })
}
