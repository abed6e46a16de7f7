#include <algorithm>

#include "mcfsel/solvers.hpp"
#include "solver_internal.hpp"

namespace mcfsel {

const std::vector<AlgorithmId>& all_algorithms() {
  static const std::vector<AlgorithmId> algorithms = {
      AlgorithmId::SCC, AlgorithmId::MMCC, AlgorithmId::CAT, AlgorithmId::SSP,
      AlgorithmId::CAS, AlgorithmId::NS,   AlgorithmId::CS2};
  return algorithms;
}

std::string algorithm_name(AlgorithmId id) {
  switch (id) {
    case AlgorithmId::SCC: return "SCC";
    case AlgorithmId::MMCC: return "MMCC";
    case AlgorithmId::CAT: return "CAT";
    case AlgorithmId::SSP: return "SSP";
    case AlgorithmId::CAS: return "CAS";
    case AlgorithmId::NS: return "NS";
    case AlgorithmId::CS2: return "CS2";
  }
  return "?";
}

std::optional<AlgorithmId> algorithm_from_name(const std::string& name) {
  for (AlgorithmId id : all_algorithms()) {
    if (algorithm_name(id) == name) return id;
  }
  return std::nullopt;
}

SolveResult solve(AlgorithmId algorithm, const Instance& instance,
                  const SolveOptions& options) {
  switch (algorithm) {
    case AlgorithmId::SCC: return solve_scc(instance, options);
    case AlgorithmId::MMCC: return solve_mmcc(instance, options);
    case AlgorithmId::CAT: return solve_cat(instance, options);
    case AlgorithmId::SSP: return solve_ssp(instance, options);
    case AlgorithmId::CAS: return solve_cas(instance, options);
    case AlgorithmId::NS: return solve_ns(instance, options);
    case AlgorithmId::CS2: return solve_cs2(instance, options);
  }
  throw std::invalid_argument("unknown algorithm id");
}

bool certify_optimal(const Instance& instance, const Flow& flow) {
  if (!validate_flow(instance, flow).is_feasible_flow) {
    throw std::invalid_argument("certify_optimal requires a feasible flow");
  }
  return !bellman_ford_negative_cycle(residual_network(instance, flow)).has_value();
}

namespace detail {

void LoopGuard::on_iteration() {
  if (++iterations > options->max_iterations) {
    throw SolverLimitError("iteration cap exceeded (" + std::to_string(options->max_iterations) +
                           "); this indicates a solver bug");
  }
  if (options->deadline && (iterations & 0x3f) == 1 &&
      std::chrono::steady_clock::now() > *options->deadline) {
    throw SolverTimeout("solver deadline exceeded");
  }
}

void LoopGuard::check_deadline_now() const {
  if (options->deadline && std::chrono::steady_clock::now() > *options->deadline) {
    throw SolverTimeout("solver deadline exceeded");
  }
}

std::int64_t augment_cycle(const ResidualNetwork& net, const std::vector<std::int32_t>& cycle,
                           Flow& flow) {
  std::int64_t delta = kInfDistance;
  for (std::int32_t a : cycle) {
    delta = std::min(delta, net.arcs[static_cast<std::size_t>(a)].capacity);
  }
  for (std::int32_t a : cycle) {
    const ResidualArc& arc = net.arcs[static_cast<std::size_t>(a)];
    flow[static_cast<std::size_t>(arc.orig_arc)] += arc.backward ? -delta : delta;
  }
  return delta;
}

SolveResult optimal_result(const Instance& instance, Flow flow, std::int64_t iterations) {
  SolveResult result;
  result.status = SolveStatus::Optimal;
  result.cost = flow_cost(instance, flow);
  result.flow = std::move(flow);
  result.iterations = iterations;
  return result;
}

SolveResult infeasible_result(std::int64_t iterations) {
  SolveResult result;
  result.status = SolveStatus::Infeasible;
  result.iterations = iterations;
  return result;
}

}  // namespace detail

}  // namespace mcfsel
