// Successive shortest paths and its capacity-scaling refinement. Both are dual
// methods: they keep reduced costs non-negative via vertex potentials and work
// toward conservation by routing excesses to deficits along shortest paths.

#include <algorithm>
#include <cassert>

#include "mcfsel/solvers.hpp"
#include "solver_internal.hpp"

namespace mcfsel {

namespace {

std::vector<std::int64_t> initial_excesses(const Instance& instance) {
  return std::vector<std::int64_t>(instance.supplies().begin(), instance.supplies().end());
}

// Walk the Dijkstra tree from target back to the source, applying +-amount.
void augment_path(const ResidualNetwork& net, const ShortestPaths& paths, Vertex target,
                  std::int64_t amount, Flow& flow) {
  Vertex v = target;
  while (paths.pred_arc[static_cast<std::size_t>(v)] >= 0) {
    const ResidualArc& arc =
        net.arcs[static_cast<std::size_t>(paths.pred_arc[static_cast<std::size_t>(v)])];
    flow[static_cast<std::size_t>(arc.orig_arc)] += arc.backward ? -amount : amount;
    v = arc.tail;
  }
}

std::int64_t path_bottleneck(const ResidualNetwork& net, const ShortestPaths& paths,
                             Vertex target) {
  std::int64_t bottleneck = kInfDistance;
  Vertex v = target;
  while (paths.pred_arc[static_cast<std::size_t>(v)] >= 0) {
    const ResidualArc& arc =
        net.arcs[static_cast<std::size_t>(paths.pred_arc[static_cast<std::size_t>(v)])];
    bottleneck = std::min(bottleneck, arc.capacity);
    v = arc.tail;
  }
  return bottleneck;
}

// After a Dijkstra pass that permanently labeled `target`, shift potentials by
// min(d_v, d_target); this keeps every residual reduced cost non-negative,
// including the arcs reversed by the upcoming augmentation.
void raise_potentials(const ShortestPaths& paths, std::int64_t target_distance,
                      Potentials& potentials) {
  for (std::size_t v = 0; v < potentials.size(); ++v) {
    potentials[v] += std::min(paths.distance[v], target_distance);
  }
}

}  // namespace

SolveResult solve_ssp(const Instance& instance, const SolveOptions& options) {
  if (instance.supply_imbalance() != 0) return detail::infeasible_result(0);
  const std::size_t n = static_cast<std::size_t>(instance.num_vertices());
  Flow flow(instance.arcs().size(), 0);
  Potentials potentials(n, 0);
  std::vector<std::int64_t> excess = initial_excesses(instance);

  detail::LoopGuard guard(options);
  for (;;) {
    // Lowest-index vertex with positive excess.
    Vertex source = -1;
    for (std::size_t v = 0; v < n; ++v) {
      if (excess[v] > 0) {
        source = static_cast<Vertex>(v);
        break;
      }
    }
    if (source < 0) break;  // conservation holds everywhere: feasible and optimal

    guard.on_iteration();
    const ResidualNetwork net = residual_network(instance, flow);
    const ShortestPaths paths = dijkstra_with_potentials(net, potentials, source);

    // Nearest reachable deficit vertex; lowest index on distance ties.
    Vertex target = -1;
    for (std::size_t v = 0; v < n; ++v) {
      if (excess[v] < 0 && paths.distance[v] != kInfDistance &&
          (target < 0 || paths.distance[v] < paths.distance[static_cast<std::size_t>(target)])) {
        target = static_cast<Vertex>(v);
      }
    }
    if (target < 0) {
      // Excess that cannot reach any deficit: no feasible flow exists.
      return detail::infeasible_result(guard.iterations);
    }

    const std::int64_t amount =
        std::min({excess[static_cast<std::size_t>(source)],
                  -excess[static_cast<std::size_t>(target)], path_bottleneck(net, paths, target)});
    raise_potentials(paths, paths.distance[static_cast<std::size_t>(target)], potentials);
    augment_path(net, paths, target, amount, flow);
    excess[static_cast<std::size_t>(source)] -= amount;
    excess[static_cast<std::size_t>(target)] += amount;
  }
  return detail::optimal_result(instance, std::move(flow), guard.iterations);
}

SolveResult solve_cas(const Instance& instance, const SolveOptions& options) {
  if (instance.supply_imbalance() != 0) return detail::infeasible_result(0);
  const std::size_t n = static_cast<std::size_t>(instance.num_vertices());
  const auto& arcs = instance.arcs();
  Flow flow(arcs.size(), 0);
  Potentials potentials(n, 0);
  std::vector<std::int64_t> excess = initial_excesses(instance);

  std::int64_t max_excess = 0;
  for (std::int64_t e : excess) max_excess = std::max(max_excess, e);
  if (max_excess == 0) {
    // Zero supplies: the zero flow is optimal (all costs are non-negative).
    return detail::optimal_result(instance, std::move(flow), 0);
  }

  ScalingState scaling;
  scaling.delta = 1;
  while (scaling.delta * 2 <= max_excess) scaling.delta *= 2;

  detail::LoopGuard guard(options);
  for (;; scaling.delta /= 2) {
    assert((scaling.delta & (scaling.delta - 1)) == 0);
    const std::int64_t delta = scaling.delta;

    // Restore the invariant for this phase: arcs in the delta-residual
    // network must have non-negative reduced cost, so saturate the offenders
    // (only arcs whose residual capacity crossed the delta threshold can
    // violate it).
    for (std::size_t a = 0; a < arcs.size(); ++a) {
      const std::int64_t rc = arcs[a].cost + potentials[static_cast<std::size_t>(arcs[a].tail)] -
                              potentials[static_cast<std::size_t>(arcs[a].head)];
      const std::int64_t forward_residual = arcs[a].capacity - flow[a];
      if (rc < 0 && forward_residual >= delta) {
        excess[static_cast<std::size_t>(arcs[a].tail)] -= forward_residual;
        excess[static_cast<std::size_t>(arcs[a].head)] += forward_residual;
        flow[a] = arcs[a].capacity;
      } else if (rc > 0 && flow[a] >= delta) {
        excess[static_cast<std::size_t>(arcs[a].tail)] += flow[a];
        excess[static_cast<std::size_t>(arcs[a].head)] -= flow[a];
        flow[a] = 0;
      }
    }

    // Route delta units at a time between large-excess pairs.
    std::vector<char> stranded(n, 0);  // positive-excess vertices with no reachable deficit
    for (;;) {
      Vertex source = -1;
      for (std::size_t v = 0; v < n; ++v) {
        if (excess[v] >= delta && !stranded[v]) {
          source = static_cast<Vertex>(v);
          break;
        }
      }
      if (source < 0) break;
      bool deficit_exists = false;
      for (std::size_t v = 0; v < n; ++v) {
        if (excess[v] <= -delta) {
          deficit_exists = true;
          break;
        }
      }
      if (!deficit_exists) break;

      guard.on_iteration();
      const ResidualNetwork net = residual_network(instance, flow, delta);
      const ShortestPaths paths = dijkstra_with_potentials(net, potentials, source);

      Vertex target = -1;
      for (std::size_t v = 0; v < n; ++v) {
        if (excess[v] <= -delta && paths.distance[v] != kInfDistance &&
            (target < 0 ||
             paths.distance[v] < paths.distance[static_cast<std::size_t>(target)])) {
          target = static_cast<Vertex>(v);
        }
      }
      if (target < 0) {
        if (delta == 1) {
          // In the final phase the residual network is unrestricted, so an
          // unreachable deficit certifies infeasibility.
          return detail::infeasible_result(guard.iterations);
        }
        stranded[static_cast<std::size_t>(source)] = 1;
        continue;
      }

      raise_potentials(paths, paths.distance[static_cast<std::size_t>(target)], potentials);
      augment_path(net, paths, target, delta, flow);
      excess[static_cast<std::size_t>(source)] -= delta;
      excess[static_cast<std::size_t>(target)] += delta;
    }

    if (scaling.delta == 1) break;
  }

  // All excesses are zero after the delta = 1 phase.
  return detail::optimal_result(instance, std::move(flow), guard.iterations);
}

}  // namespace mcfsel
