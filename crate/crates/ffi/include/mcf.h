#ifndef MCF_H
#define MCF_H

#include <stddef.h>
#include <stdint.h>

// Result codes. Zero is success.
typedef enum McfCode {
  MCF_CODE_OK = 0,
  MCF_CODE_NULL_POINTER = 1,
  MCF_CODE_INVALID_ARGUMENT = 2,
  MCF_CODE_INVALID_NETWORK = 3,
  MCF_CODE_PARSE_ERROR = 4,
  // The solver could not run on this input, e.g. negative costs for a
  // solver that needs nonnegative ones.
  MCF_CODE_UNSUPPORTED = 5,
  MCF_CODE_INTERNAL = 6,
  MCF_CODE_BUFFER_TOO_SMALL = 7,
} McfCode;

// Solver selection. Cost scaling uses partial augment-relabel and network
// simplex uses block search unless another entry is chosen.
typedef enum McfAlgorithm {
  MCF_ALGORITHM_CYCLE_CANCEL = 0,
  MCF_ALGORITHM_MIN_MEAN_CYCLE_CANCEL = 1,
  MCF_ALGORITHM_CANCEL_AND_TIGHTEN = 2,
  MCF_ALGORITHM_SUCCESSIVE_SHORTEST_PATH = 3,
  MCF_ALGORITHM_CAPACITY_SCALING = 4,
  MCF_ALGORITHM_COST_SCALING_PUSH_RELABEL = 5,
  MCF_ALGORITHM_COST_SCALING_AUGMENT_RELABEL = 6,
  MCF_ALGORITHM_COST_SCALING_PARTIAL_AUGMENT_RELABEL = 7,
  MCF_ALGORITHM_SIMPLEX_BEST_ELIGIBLE = 8,
  MCF_ALGORITHM_SIMPLEX_FIRST_ELIGIBLE = 9,
  MCF_ALGORITHM_SIMPLEX_BLOCK_SEARCH = 10,
  MCF_ALGORITHM_SIMPLEX_CANDIDATE_LIST = 11,
  MCF_ALGORITHM_SIMPLEX_ALTERING_LIST = 12,
} McfAlgorithm;

// Outcome of a solve, read from a solution handle.
typedef enum McfStatus {
  MCF_STATUS_OPTIMAL = 0,
  MCF_STATUS_INFEASIBLE = 1,
  MCF_STATUS_UNBOUNDED = 2,
  MCF_STATUS_TIMEOUT = 3,
} McfStatus;

// Opaque network handle.
typedef struct McfNetwork McfNetwork;

// Opaque solution handle.
typedef struct McfSolution McfSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *mcf_version(void);

// Copies the last error message of this thread into `buf` with a trailing
// NUL and returns the message length without it. Pass a null `buf` to query
// the length. Returns 0 when there is no message.
//
// # Safety
// `buf` must be null or valid for `len` bytes.
uintptr_t mcf_last_error(char *buf, uintptr_t len);

// Builds a network with `nodes` nodes (numbered from 0) and `arcs` arcs.
// `supplies` has one entry per node; the arc arrays have one per arc.
//
// # Safety
// Each array must be valid for its stated length and `out` must be writable.
enum McfCode mcf_network_new(uintptr_t nodes,
                             uintptr_t arcs,
                             const uint32_t *tails,
                             const uint32_t *heads,
                             const int64_t *capacities,
                             const int64_t *costs,
                             const int64_t *supplies,
                             struct McfNetwork **out);

// Parses a DIMACS min-cost flow instance. Lower bounds are rejected here
// since a handle carries no offset.
//
// # Safety
// `text` must be a NUL-terminated string and `out` writable.
enum McfCode mcf_network_from_dimacs(const char *text, struct McfNetwork **out);

// # Safety
// `net` must be null or a handle from this library not yet freed.
void mcf_network_free(struct McfNetwork *net);

// # Safety
// `net` must be a live handle.
uintptr_t mcf_network_node_count(const struct McfNetwork *net);

// # Safety
// `net` must be a live handle.
uintptr_t mcf_network_arc_count(const struct McfNetwork *net);

// Runs a solver. Infeasible instances and timeouts still return `Ok` with a
// solution whose status says so. A nonpositive `timeout_secs` means no limit.
//
// # Safety
// `net` must be a live handle and `out` writable.
enum McfCode mcf_solve(const struct McfNetwork *net,
                       enum McfAlgorithm alg,
                       double timeout_secs,
                       struct McfSolution **out);

// # Safety
// `sol` must be null or a handle from this library not yet freed.
void mcf_solution_free(struct McfSolution *sol);

// # Safety
// `sol` must be a live handle.
enum McfStatus mcf_solution_status(const struct McfSolution *sol);

// Objective value; 0 unless the status is optimal.
//
// # Safety
// `sol` must be a live handle.
int64_t mcf_solution_objective(const struct McfSolution *sol);

// # Safety
// `sol` must be a live handle.
uint64_t mcf_solution_iterations(const struct McfSolution *sol);

// Copies the arc flows into `flow`, which must hold one entry per arc.
// Fails unless the status is optimal.
//
// # Safety
// `sol` must be a live handle and `flow` valid for `len` entries.
enum McfCode mcf_solution_flow(const struct McfSolution *sol, int64_t *flow, uintptr_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MCF_H */
