// Cost scaling push-relabel. Costs are multiplied by n so epsilon and the
// vertex prices stay integral: 1-optimality in the scaled space equals
// (1/n)-optimality on the original costs, which certifies optimality.

#include <algorithm>
#include <queue>

#include "mcfsel/solvers.hpp"
#include "solver_internal.hpp"

namespace mcfsel {

namespace {

struct PushRelabel {
  // Paired residual arcs: slot 2a is the forward copy of original arc a,
  // slot 2a+1 the backward copy; res[2a+1] is the current flow on a.
  std::vector<Vertex> head;
  std::vector<std::int64_t> res;
  std::vector<std::int64_t> scaled_cost;
  std::vector<std::int32_t> first_out;
  std::vector<std::int32_t> next_out;
  std::vector<std::int32_t> current;
  Potentials price;
  std::vector<std::int64_t> excess;
  std::int64_t n;

  PushRelabel(const Instance& instance, const Flow& start)
      : n(instance.num_vertices()) {
    const std::size_t num_arcs = instance.arcs().size();
    head.resize(2 * num_arcs);
    res.resize(2 * num_arcs);
    scaled_cost.resize(2 * num_arcs);
    first_out.assign(static_cast<std::size_t>(n), -1);
    next_out.assign(2 * num_arcs, -1);
    for (std::size_t a = 0; a < num_arcs; ++a) {
      const Arc& arc = instance.arcs()[a];
      head[2 * a] = arc.head;
      head[2 * a + 1] = arc.tail;
      scaled_cost[2 * a] = arc.cost * n;
      scaled_cost[2 * a + 1] = -arc.cost * n;
      res[2 * a] = arc.capacity - start[a];
      res[2 * a + 1] = start[a];
      next_out[2 * a] = first_out[static_cast<std::size_t>(arc.tail)];
      first_out[static_cast<std::size_t>(arc.tail)] = static_cast<std::int32_t>(2 * a);
      next_out[2 * a + 1] = first_out[static_cast<std::size_t>(arc.head)];
      first_out[static_cast<std::size_t>(arc.head)] = static_cast<std::int32_t>(2 * a + 1);
    }
    current.assign(static_cast<std::size_t>(n), -1);
    price.assign(static_cast<std::size_t>(n), 0);
    excess.assign(static_cast<std::size_t>(n), 0);
  }

  Vertex tail_of(std::int32_t arc) const { return head[static_cast<std::size_t>(arc ^ 1)]; }

  std::int64_t reduced(std::int32_t arc) const {
    return scaled_cost[static_cast<std::size_t>(arc)] +
           price[static_cast<std::size_t>(tail_of(arc))] -
           price[static_cast<std::size_t>(head[static_cast<std::size_t>(arc)])];
  }

  // Make the pseudoflow 0-optimal for the current prices by saturating every
  // residual arc with negative reduced cost, then recompute excesses.
  void saturate_negative_arcs(const Instance& instance) {
    for (std::size_t a = 0; a < head.size(); ++a) {
      if (res[a] > 0 && reduced(static_cast<std::int32_t>(a)) < 0) {
        res[a ^ 1] += res[a];
        res[a] = 0;
      }
    }
    for (std::size_t v = 0; v < excess.size(); ++v) {
      excess[v] = instance.supply(static_cast<Vertex>(v));
    }
    for (std::size_t a = 0; a < head.size(); a += 2) {
      const std::int64_t f = res[a + 1];
      excess[static_cast<std::size_t>(head[a])] += f;
      excess[static_cast<std::size_t>(tail_of(static_cast<std::int32_t>(a)))] -= f;
    }
  }

  // One refine phase: restore feasibility while keeping epsilon-optimality.
  void refine(const Instance& instance, std::int64_t epsilon, detail::LoopGuard& guard) {
    saturate_negative_arcs(instance);
    for (std::size_t v = 0; v < current.size(); ++v) current[v] = first_out[v];

    std::queue<Vertex> active;
    for (std::size_t v = 0; v < excess.size(); ++v) {
      if (excess[v] > 0) active.push(static_cast<Vertex>(v));
    }

    while (!active.empty()) {
      const Vertex v = active.front();
      active.pop();
      // Discharge: push on admissible arcs, relabel when none remain.
      while (excess[static_cast<std::size_t>(v)] > 0) {
        guard.on_iteration();
        std::int32_t& cur = current[static_cast<std::size_t>(v)];
        if (cur < 0) {
          relabel(v, epsilon);
          continue;
        }
        if (res[static_cast<std::size_t>(cur)] > 0 && reduced(cur) < 0) {
          const Vertex w = head[static_cast<std::size_t>(cur)];
          const std::int64_t amount =
              std::min(excess[static_cast<std::size_t>(v)], res[static_cast<std::size_t>(cur)]);
          res[static_cast<std::size_t>(cur)] -= amount;
          res[static_cast<std::size_t>(cur ^ 1)] += amount;
          excess[static_cast<std::size_t>(v)] -= amount;
          const std::int64_t before = excess[static_cast<std::size_t>(w)];
          excess[static_cast<std::size_t>(w)] += amount;
          if (before <= 0 && excess[static_cast<std::size_t>(w)] > 0) active.push(w);
        } else {
          cur = next_out[static_cast<std::size_t>(cur)];
        }
      }
    }
  }

  // Decrease the price of v by the largest amount that preserves
  // epsilon-optimality: just below the tightest outgoing residual constraint.
  void relabel(Vertex v, std::int64_t epsilon) {
    std::int64_t best = std::numeric_limits<std::int64_t>::min();
    for (std::int32_t a = first_out[static_cast<std::size_t>(v)]; a >= 0;
         a = next_out[static_cast<std::size_t>(a)]) {
      if (res[static_cast<std::size_t>(a)] <= 0) continue;
      best = std::max(best, price[static_cast<std::size_t>(head[static_cast<std::size_t>(a)])] -
                                scaled_cost[static_cast<std::size_t>(a)]);
    }
    if (best == std::numeric_limits<std::int64_t>::min()) {
      // An excess vertex with no outgoing residual arc contradicts the
      // feasibility established before the scaling loop.
      throw std::logic_error("cs2: active vertex with no residual arc");
    }
    price[static_cast<std::size_t>(v)] = best - epsilon;
    current[static_cast<std::size_t>(v)] = first_out[static_cast<std::size_t>(v)];
  }

  Flow extract_flow() const {
    Flow flow(head.size() / 2);
    for (std::size_t a = 0; a < flow.size(); ++a) flow[a] = res[2 * a + 1];
    return flow;
  }
};

}  // namespace

SolveResult solve_cs2(const Instance& instance, const SolveOptions& options) {
  if (instance.supply_imbalance() != 0) return detail::infeasible_result(0);
  auto start = max_flow_feasibility(instance);
  if (!start) return detail::infeasible_result(0);
  if (instance.num_arcs() == 0 || instance.max_cost() == 0) {
    // Any feasible flow is optimal when all costs are zero.
    return detail::optimal_result(instance, std::move(*start), 0);
  }

  PushRelabel pr(instance, *start);
  detail::LoopGuard guard(options);

  ScalingState scaling;
  scaling.alpha = 8;
  // The feasible start flow is epsilon-optimal for epsilon = n * max_cost
  // (zero prices), so scaling begins one division below that.
  scaling.epsilon = instance.num_vertices() * instance.max_cost();
  std::int64_t phases = 0;
  for (;;) {
    scaling.epsilon = std::max<std::int64_t>(1, scaling.epsilon / scaling.alpha);
    pr.refine(instance, scaling.epsilon, guard);
    ++phases;

    if (options.check_invariants) {
      std::vector<Arc> scaled_arcs = instance.arcs();
      for (Arc& a : scaled_arcs) a.cost *= instance.num_vertices();
      const Instance scaled(instance.num_vertices(), std::move(scaled_arcs),
                            instance.supplies());
      const Flow current = pr.extract_flow();
      if (!validate_flow(scaled, current).is_feasible_flow ||
          !check_epsilon_optimality(scaled, current, pr.price,
                                    Rational(scaling.epsilon, 1))) {
        throw std::logic_error("cs2 invariant: phase result is not epsilon-optimal");
      }
    }
    if (scaling.epsilon == 1) break;
  }

  return detail::optimal_result(instance, pr.extract_flow(), phases);
}

}  // namespace mcfsel
