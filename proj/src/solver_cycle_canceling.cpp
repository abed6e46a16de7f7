// The three cycle-canceling variants: start from a max-flow feasible flow and
// repeatedly cancel negative residual cycles until none remain. They differ
// only in how the cycle is selected (arbitrary via Bellman-Ford, minimum mean,
// or admissible-graph batches with potential tightening).

#include <algorithm>
#include <cassert>

#include "mcfsel/solvers.hpp"
#include "solver_internal.hpp"

namespace mcfsel {

namespace {

bool trivially_infeasible(const Instance& instance) {
  return instance.supply_imbalance() != 0;
}

}  // namespace

SolveResult solve_scc(const Instance& instance, const SolveOptions& options) {
  if (trivially_infeasible(instance)) return detail::infeasible_result(0);
  auto start = max_flow_feasibility(instance);
  if (!start) return detail::infeasible_result(0);
  Flow flow = std::move(*start);

  detail::LoopGuard guard(options);
  for (;;) {
    guard.on_iteration();
    const ResidualNetwork net = residual_network(instance, flow);
    const auto cycle = bellman_ford_negative_cycle(net);
    if (!cycle) break;
    detail::augment_cycle(net, *cycle, flow);
  }
  return detail::optimal_result(instance, std::move(flow), guard.iterations);
}

SolveResult solve_mmcc(const Instance& instance, const SolveOptions& options) {
  if (trivially_infeasible(instance)) return detail::infeasible_result(0);
  auto start = max_flow_feasibility(instance);
  if (!start) return detail::infeasible_result(0);
  Flow flow = std::move(*start);

  detail::LoopGuard guard(options);
  for (;;) {
    guard.on_iteration();
    const ResidualNetwork net = residual_network(instance, flow);
    const auto cycle = min_mean_cycle(net);
    if (!cycle || cycle->mean.num >= 0) break;
    detail::augment_cycle(net, cycle->arcs, flow);
  }
  return detail::optimal_result(instance, std::move(flow), guard.iterations);
}

namespace {

// DFS for a cycle in the admissible subgraph (residual arcs with negative
// reduced cost). Returns residual-arc indices, or empty if acyclic.
std::vector<std::int32_t> find_admissible_cycle(const ResidualNetwork& net,
                                                const std::vector<char>& admissible) {
  const std::size_t n = static_cast<std::size_t>(net.num_vertices);
  // 0 = unvisited, 1 = on stack, 2 = done
  std::vector<char> color(n, 0);
  std::vector<std::int32_t> entered_by(n, -1);
  std::vector<std::int32_t> stack;
  std::vector<std::int32_t> arc_cursor(n, 0);

  for (Vertex root = 0; root < net.num_vertices; ++root) {
    if (color[static_cast<std::size_t>(root)] != 0) continue;
    stack.clear();
    stack.push_back(root);
    color[static_cast<std::size_t>(root)] = 1;
    arc_cursor[static_cast<std::size_t>(root)] = net.out_begin[static_cast<std::size_t>(root)];
    while (!stack.empty()) {
      const Vertex v = static_cast<Vertex>(stack.back());
      std::int32_t& cursor = arc_cursor[static_cast<std::size_t>(v)];
      bool descended = false;
      while (cursor < net.out_begin[static_cast<std::size_t>(v) + 1]) {
        const std::int32_t a = net.out_arcs[static_cast<std::size_t>(cursor)];
        ++cursor;
        if (!admissible[static_cast<std::size_t>(a)]) continue;
        const Vertex w = net.arcs[static_cast<std::size_t>(a)].head;
        if (color[static_cast<std::size_t>(w)] == 1) {
          // Found a cycle: w .. v plus arc a back to w.
          std::vector<std::int32_t> cycle;
          cycle.push_back(a);
          for (std::size_t i = stack.size(); i-- > 0;) {
            if (stack[i] == w) break;
            cycle.push_back(entered_by[static_cast<std::size_t>(stack[i])]);
          }
          std::reverse(cycle.begin(), cycle.end());
          return cycle;
        }
        if (color[static_cast<std::size_t>(w)] == 0) {
          color[static_cast<std::size_t>(w)] = 1;
          entered_by[static_cast<std::size_t>(w)] = a;
          arc_cursor[static_cast<std::size_t>(w)] = net.out_begin[static_cast<std::size_t>(w)];
          stack.push_back(w);
          descended = true;
          break;
        }
      }
      if (!descended && cursor >= net.out_begin[static_cast<std::size_t>(v) + 1]) {
        color[static_cast<std::size_t>(v)] = 2;
        stack.pop_back();
      }
    }
  }
  return {};
}

// Epsilon-optimality certificate used by cancel-and-tighten, kept integral by
// scaling costs with the denominator of the exact cycle mean: the flow is
// (p/q)-optimal and every residual arc satisfies q*c + pi_tail - pi_head >= -p.
struct TightState {
  std::int64_t p = 0;  // epsilon numerator
  std::int64_t q = 1;  // epsilon denominator == cost scale of the potentials
  Potentials potentials;
};

// Shortest walk distances from a virtual source under weights q*c + p. Those
// weights carry no negative cycle (every cycle mean is >= -p/q), so plain
// Bellman-Ford converges and the result certifies (p/q)-optimality. The
// minimum-mean cycle itself ends up fully admissible, which guarantees the
// next cancel step strictly improves the flow.
void tighten(const ResidualNetwork& net, const Rational& min_mean, TightState& state) {
  state.p = -min_mean.num;
  state.q = min_mean.den;
  const std::size_t n = static_cast<std::size_t>(net.num_vertices);
  state.potentials.assign(n, 0);
  for (std::size_t pass = 0; pass + 1 < n; ++pass) {
    bool relaxed = false;
    for (const ResidualArc& arc : net.arcs) {
      const std::int64_t w = arc.cost * state.q + state.p;
      if (state.potentials[static_cast<std::size_t>(arc.tail)] + w <
          state.potentials[static_cast<std::size_t>(arc.head)]) {
        state.potentials[static_cast<std::size_t>(arc.head)] =
            state.potentials[static_cast<std::size_t>(arc.tail)] + w;
        relaxed = true;
      }
    }
    if (!relaxed) break;
  }
}

}  // namespace

SolveResult solve_cat(const Instance& instance, const SolveOptions& options) {
  if (trivially_infeasible(instance)) return detail::infeasible_result(0);
  auto start = max_flow_feasibility(instance);
  if (!start) return detail::infeasible_result(0);
  Flow flow = std::move(*start);

  // Initial certificate: zero potentials make the flow max_cost-optimal.
  TightState state;
  state.p = instance.max_cost();
  state.q = 1;
  state.potentials.assign(static_cast<std::size_t>(instance.num_vertices()), 0);

  detail::LoopGuard guard(options);
  for (;;) {
    guard.on_iteration();

    // Cancel: saturate admissible-graph cycles until it is acyclic.
    for (;;) {
      const ResidualNetwork net = residual_network(instance, flow);
      std::vector<char> admissible(net.arcs.size(), 0);
      for (std::size_t a = 0; a < net.arcs.size(); ++a) {
        const std::int64_t scaled_rc =
            net.arcs[a].cost * state.q +
            state.potentials[static_cast<std::size_t>(net.arcs[a].tail)] -
            state.potentials[static_cast<std::size_t>(net.arcs[a].head)];
        admissible[a] = scaled_rc < 0 ? 1 : 0;
      }
      const auto cycle = find_admissible_cycle(net, admissible);
      if (cycle.empty()) break;
      detail::augment_cycle(net, cycle, flow);
      guard.on_iteration();
    }

    // Tighten: the exact minimum cycle mean is the smallest epsilon any
    // potentials can certify; if it is non-negative the flow is optimal.
    const ResidualNetwork net = residual_network(instance, flow);
    const auto mean = min_mean_cycle(net);
    if (!mean || mean->mean.num >= 0) break;
    tighten(net, mean->mean, state);

    if (options.check_invariants) {
      std::vector<Arc> scaled_arcs = instance.arcs();
      for (Arc& a : scaled_arcs) a.cost *= state.q;
      const Instance scaled(instance.num_vertices(), std::move(scaled_arcs),
                            instance.supplies());
      if (!check_epsilon_optimality(scaled, flow, state.potentials, Rational(state.p, 1))) {
        throw std::logic_error("cat invariant: tightened potentials do not certify epsilon");
      }
    }
  }
  return detail::optimal_result(instance, std::move(flow), guard.iterations);
}

}  // namespace mcfsel
