#ifndef MCFSEL_SOLVERS_HPP
#define MCFSEL_SOLVERS_HPP

#include <chrono>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mcfsel/instance.hpp"
#include "mcfsel/rational.hpp"

namespace mcfsel {

// Stable codes 0..6; serialized everywhere by these values/names.
enum class AlgorithmId : int {
  SCC = 0,   // simple cycle canceling
  MMCC = 1,  // minimum mean cycle canceling
  CAT = 2,   // cancel and tighten
  SSP = 3,   // successive shortest paths
  CAS = 4,   // capacity scaling
  NS = 5,    // network simplex
  CS2 = 6,   // cost scaling push-relabel
};

inline constexpr int kNumAlgorithms = 7;

const std::vector<AlgorithmId>& all_algorithms();
std::string algorithm_name(AlgorithmId id);
std::optional<AlgorithmId> algorithm_from_name(const std::string& name);

enum class SolveStatus { Optimal, Infeasible };

struct SolveResult {
  SolveStatus status = SolveStatus::Infeasible;
  Flow flow;                  // present iff Optimal
  std::int64_t cost = 0;      // present iff Optimal
  std::int64_t iterations = 0;  // main-loop passes, algorithm-specific
};

struct SpanningTreeBasis;

struct SolveOptions {
  // Hard cap on main-loop iterations; exceeding it throws SolverLimitError
  // (a bug indicator, not a legitimate long run).
  std::int64_t max_iterations = 1'000'000'000;
  // Cooperative deadline; exceeded solves throw SolverTimeout.
  std::optional<std::chrono::steady_clock::time_point> deadline;
  // Expensive internal invariant checks (epsilon-optimality per CS2 phase,
  // basis partition per NS pivot, ...); violations throw std::logic_error.
  bool check_invariants = false;
  // When set, solve_ns records the basis after every pivot.
  std::vector<SpanningTreeBasis>* ns_basis_trace = nullptr;
};

class SolverLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SolverTimeout : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// --- shared subroutines ---------------------------------------------------

// Some strictly negative simple cycle as consecutive residual-arc indices, or
// nullopt. Bellman-Ford with all-zero initial labels, arcs relaxed in index
// order; fully deterministic.
std::optional<std::vector<std::int32_t>> bellman_ford_negative_cycle(
    const ResidualNetwork& network);

struct MinMeanCycle {
  std::vector<std::int32_t> arcs;
  Rational mean;
};

// Minimum-mean directed cycle via Karp's dynamic program, run from a virtual
// source connected to every vertex. nullopt iff the network is acyclic.
std::optional<MinMeanCycle> min_mean_cycle(const ResidualNetwork& network);

inline constexpr std::int64_t kInfDistance = std::numeric_limits<std::int64_t>::max();

struct ShortestPaths {
  std::vector<std::int64_t> distance;   // kInfDistance where unreachable
  std::vector<std::int32_t> pred_arc;   // residual-arc index into the path tree, -1 at source/unreached
};

// Dijkstra over reduced costs; throws std::logic_error if a residual arc with
// negative reduced cost is encountered (broken caller invariant). Ties are
// resolved toward the lowest vertex index.
ShortestPaths dijkstra_with_potentials(const ResidualNetwork& network,
                                       const Potentials& potentials, Vertex source);

// Feasible flow via a super-source/super-sink max-flow construction (Dinic),
// or nullopt when none exists.
std::optional<Flow> max_flow_feasibility(const Instance& instance);

// --- solvers ----------------------------------------------------------------

SolveResult solve_scc(const Instance& instance, const SolveOptions& options = {});
SolveResult solve_mmcc(const Instance& instance, const SolveOptions& options = {});
SolveResult solve_cat(const Instance& instance, const SolveOptions& options = {});
SolveResult solve_ssp(const Instance& instance, const SolveOptions& options = {});
SolveResult solve_cas(const Instance& instance, const SolveOptions& options = {});
SolveResult solve_ns(const Instance& instance, const SolveOptions& options = {});
SolveResult solve_cs2(const Instance& instance, const SolveOptions& options = {});

SolveResult solve(AlgorithmId algorithm, const Instance& instance,
                  const SolveOptions& options = {});

// True iff the residual network of this feasible flow has no negative cycle.
// Throws std::invalid_argument on an infeasible flow.
bool certify_optimal(const Instance& instance, const Flow& flow);

// --- internal state exposed for tests/diagnostics ---------------------------

// Scaling knobs: CS2 works on costs scaled by n with integer epsilon; CAS
// phases use a power-of-two delta.
struct ScalingState {
  std::int64_t epsilon = 0;  // CS2, in the cost-scaled-by-n space
  std::int64_t alpha = 8;    // CS2 divisor
  std::int64_t delta = 0;    // CAS phase
};

// Spanning-tree basis of the network simplex: arc ids partitioned into the
// tree T and the lower/upper non-tree sets, plus traversal indices.
struct SpanningTreeBasis {
  std::vector<std::int64_t> tree_arcs;
  std::vector<std::int64_t> lower_set;
  std::vector<std::int64_t> upper_set;
  std::vector<Vertex> parent;
  std::vector<std::int32_t> depth;
  std::vector<Vertex> thread;  // preorder successor, cyclic
};

}  // namespace mcfsel

#endif
