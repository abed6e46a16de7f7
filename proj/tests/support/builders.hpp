#ifndef MCFSEL_TESTS_BUILDERS_HPP
#define MCFSEL_TESTS_BUILDERS_HPP

#include <vector>

#include "mcfsel/instance.hpp"
#include "mcfsel/rng.hpp"

namespace mcfsel::testing {

// Canonical instances used across the suites (vertex ids shifted to 0-based).

// Two vertices, one arc (0 -> 1, cost 3, capacity 10), supplies (5, -5);
// unique optimum cost 15.
inline Instance t1() {
  return Instance(2, {{0, 1, 3, 10}}, {5, -5});
}

// Three vertices; cheap two-hop route with capacity 4, expensive direct arc;
// optimum cost 13 with flow (4, 1, 4).
inline Instance t2() {
  return Instance(3, {{0, 1, 1, 4}, {0, 2, 5, 10}, {1, 2, 1, 4}}, {5, 0, -5});
}

// Two vertices, capacity 3 < supply 5: infeasible.
inline Instance t3() {
  return Instance(2, {{0, 1, 3, 3}}, {5, -5});
}

// Small random instance with balanced supplies; may or may not be feasible.
inline Instance random_small_instance(SplitMix64& rng, std::int64_t max_vertices = 5,
                                      std::int64_t max_arcs = 6, std::int64_t max_cost = 9,
                                      std::int64_t max_capacity = 3) {
  const std::int64_t n = 2 + static_cast<std::int64_t>(rng.next_below(
                                 static_cast<std::uint64_t>(max_vertices - 1)));
  const std::int64_t m = 1 + static_cast<std::int64_t>(
                                 rng.next_below(static_cast<std::uint64_t>(max_arcs)));
  std::vector<Arc> arcs;
  for (std::int64_t a = 0; a < m; ++a) {
    const Vertex tail = static_cast<Vertex>(rng.next_below(static_cast<std::uint64_t>(n)));
    const Vertex head = static_cast<Vertex>(rng.next_below(static_cast<std::uint64_t>(n)));
    arcs.push_back({tail, head, rng.next_in(0, max_cost), rng.next_in(0, max_capacity)});
  }
  std::vector<std::int64_t> supplies(static_cast<std::size_t>(n), 0);
  const std::int64_t moves = rng.next_in(0, 2 * n);
  for (std::int64_t i = 0; i < moves; ++i) {
    const std::size_t from = rng.next_below(static_cast<std::uint64_t>(n));
    const std::size_t to = rng.next_below(static_cast<std::uint64_t>(n));
    const std::int64_t amount = rng.next_in(1, 2);
    supplies[from] += amount;
    supplies[to] -= amount;
  }
  return Instance(static_cast<Vertex>(n), std::move(arcs), std::move(supplies));
}

}  // namespace mcfsel::testing

#endif
