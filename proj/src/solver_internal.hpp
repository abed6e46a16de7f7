#ifndef MCFSEL_SOLVER_INTERNAL_HPP
#define MCFSEL_SOLVER_INTERNAL_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "mcfsel/solvers.hpp"

namespace mcfsel::detail {

// Shared per-solve bookkeeping: iteration cap and cooperative deadline.
struct LoopGuard {
  const SolveOptions* options;
  std::int64_t iterations = 0;

  explicit LoopGuard(const SolveOptions& opts) : options(&opts) {}
  void on_iteration();
  void check_deadline_now() const;
};

// Saturate/relax the flow along a residual cycle by its bottleneck capacity;
// returns the amount pushed.
std::int64_t augment_cycle(const ResidualNetwork& net, const std::vector<std::int32_t>& cycle,
                           Flow& flow);

SolveResult optimal_result(const Instance& instance, Flow flow, std::int64_t iterations);
SolveResult infeasible_result(std::int64_t iterations);

// Max-flow value between a single vertex pair, ignoring supplies and costs.
// Used by the goto generator to size its supply.
std::int64_t single_pair_max_flow(const Instance& instance, Vertex source, Vertex sink);

}  // namespace mcfsel::detail

#endif
