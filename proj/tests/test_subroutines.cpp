#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mcfsel/solvers.hpp"
#include "support/builders.hpp"
#include "support/oracle.hpp"

using namespace mcfsel;
using namespace mcfsel::testing;

namespace {

std::int64_t cycle_cost(const ResidualNetwork& net, const std::vector<std::int32_t>& cycle) {
  std::int64_t total = 0;
  for (std::int32_t a : cycle) total += net.arcs[static_cast<std::size_t>(a)].cost;
  return total;
}

void check_closed_walk(const ResidualNetwork& net, const std::vector<std::int32_t>& cycle) {
  REQUIRE(!cycle.empty());
  for (std::size_t i = 0; i < cycle.size(); ++i) {
    const auto& cur = net.arcs[static_cast<std::size_t>(cycle[i])];
    const auto& nxt = net.arcs[static_cast<std::size_t>(cycle[(i + 1) % cycle.size()])];
    CHECK(cur.head == nxt.tail);
  }
}

}  // namespace

TEST_CASE("bellman-ford finds no cycle on a single arc") {
  const auto net = residual_network(t1(), {0});
  CHECK_FALSE(bellman_ford_negative_cycle(net).has_value());
}

TEST_CASE("bellman-ford finds the negative 2-cycle") {
  // arcs (0,1,c=3) forward and (1,0,c=-5) backward: cycle cost -2
  const Instance inst(2, {{0, 1, 3, 10}, {0, 1, 5, 10}}, {0, 0});
  const auto net = residual_network(inst, {0, 5});
  const auto cycle = bellman_ford_negative_cycle(net);
  REQUIRE(cycle.has_value());
  check_closed_walk(net, *cycle);
  CHECK(cycle_cost(net, *cycle) == -2);
}

TEST_CASE("bellman-ford on the optimal residual of t2 finds nothing") {
  const auto optimal = brute_force_optimal_flow(t2());
  REQUIRE(optimal.has_value());
  const auto net = residual_network(t2(), *optimal);
  CHECK_FALSE(bellman_ford_negative_cycle(net).has_value());
}

TEST_CASE("min mean cycle: lone triangle") {
  // residual arcs (0,1,2), (1,2,-5), (2,0,1) and nothing else
  const Instance inst(3, {{0, 1, 2, 5}, {2, 1, 5, 3}, {2, 0, 1, 5}}, {0, 0, 0});
  const auto net = residual_network(inst, {0, 3, 0});
  REQUIRE(net.arcs.size() == 3);
  const auto found = min_mean_cycle(net);
  REQUIRE(found.has_value());
  CHECK(found->mean == Rational(-2, 3));
  CHECK(found->arcs.size() == 3);
  check_closed_walk(net, found->arcs);
}

TEST_CASE("min mean cycle: acyclic network") {
  const auto net = residual_network(t2(), {0, 0, 0});
  CHECK_FALSE(min_mean_cycle(net).has_value());
}

TEST_CASE("min mean cycle prefers the 3-cycle with mean -4/3 over the 2-cycle with mean -1") {
  // five residual arcs: (0,1,3), (1,0,-5), (1,2,-5), (2,0,-2), (0,2,10)
  const Instance inst(3,
                      {{0, 1, 3, 9}, {0, 1, 5, 2}, {2, 1, 5, 1}, {0, 2, 2, 1}, {0, 2, 10, 4}},
                      {0, 0, 0});
  const auto net = residual_network(inst, {0, 2, 1, 1, 0});
  REQUIRE(net.arcs.size() == 5);
  const auto found = min_mean_cycle(net);
  REQUIRE(found.has_value());
  CHECK(found->mean == Rational(-4, 3));
  CHECK(found->arcs.size() == 3);
  check_closed_walk(net, found->arcs);
  CHECK(cycle_cost(net, found->arcs) == -4);
}

TEST_CASE("min mean cycle agrees with brute force enumeration on random pseudoflows") {
  SplitMix64 rng(31337);
  for (int trial = 0; trial < 40; ++trial) {
    const Instance inst = random_small_instance(rng, 5, 6, 9, 3);
    Flow flow(inst.arcs().size());
    for (std::size_t a = 0; a < flow.size(); ++a) flow[a] = rng.next_in(0, inst.arc(a).capacity);
    const auto net = residual_network(inst, flow);

    // enumerate simple cycles by DFS over residual arcs
    Rational best(0, 1);
    bool any = false;
    const std::size_t m = net.arcs.size();
    std::vector<std::int32_t> stack_arcs;
    auto dfs = [&](auto&& self, Vertex origin, Vertex at, std::vector<char>& on_path,
                   std::int64_t cost) -> void {
      for (std::size_t a = 0; a < m; ++a) {
        if (net.arcs[a].tail != at) continue;
        const Vertex to = net.arcs[a].head;
        if (to == origin) {
          const Rational mean(cost + net.arcs[a].cost,
                              static_cast<std::int64_t>(stack_arcs.size()) + 1);
          if (!any || mean < best) best = mean;
          any = true;
        } else if (to > origin && !on_path[static_cast<std::size_t>(to)]) {
          on_path[static_cast<std::size_t>(to)] = 1;
          stack_arcs.push_back(static_cast<std::int32_t>(a));
          self(self, origin, to, on_path, cost + net.arcs[a].cost);
          stack_arcs.pop_back();
          on_path[static_cast<std::size_t>(to)] = 0;
        }
      }
    };
    for (Vertex origin = 0; origin < inst.num_vertices(); ++origin) {
      std::vector<char> on_path(static_cast<std::size_t>(inst.num_vertices()), 0);
      on_path[static_cast<std::size_t>(origin)] = 1;
      dfs(dfs, origin, origin, on_path, 0);
    }

    const auto found = min_mean_cycle(net);
    if (!any) {
      CHECK_FALSE(found.has_value());
    } else {
      REQUIRE(found.has_value());
      CHECK(found->mean == best);
      check_closed_walk(net, found->arcs);
      const std::int64_t cost = cycle_cost(net, found->arcs);
      CHECK(Rational(cost, static_cast<std::int64_t>(found->arcs.size())) == best);
    }
  }
}

TEST_CASE("dijkstra with potentials: distances and errors") {
  const auto net1 = residual_network(t1(), {0});
  const auto paths1 = dijkstra_with_potentials(net1, {0, 0}, 0);
  CHECK(paths1.distance == std::vector<std::int64_t>{0, 3});

  // vertex 1 of t1 has no outgoing residual arcs at zero flow
  const auto stranded = dijkstra_with_potentials(net1, {0, 0}, 1);
  CHECK(stranded.distance[0] == kInfDistance);
  CHECK(stranded.distance[1] == 0);

  const auto net2 = residual_network(t2(), {0, 0, 0});
  const auto paths2 = dijkstra_with_potentials(net2, {0, 0, 0}, 0);
  CHECK(paths2.distance == std::vector<std::int64_t>{0, 1, 2});

  // potentials creating a negative reduced cost must be rejected
  CHECK_THROWS_AS(dijkstra_with_potentials(net2, {0, 5, 0}, 0), std::logic_error);
}

TEST_CASE("max flow feasibility start flows") {
  const auto t1_flow = max_flow_feasibility(t1());
  REQUIRE(t1_flow.has_value());
  CHECK(*t1_flow == Flow{5});

  CHECK_FALSE(max_flow_feasibility(t3()).has_value());

  const Instance balanced(3, {{0, 1, 2, 4}, {1, 2, 1, 4}}, {0, 0, 0});
  const auto circulation = max_flow_feasibility(balanced);
  REQUIRE(circulation.has_value());
  CHECK(validate_flow(balanced, *circulation).is_feasible_flow);

  // imbalanced supplies can never be conserved
  const Instance imbalanced(2, {{0, 1, 1, 9}}, {5, -4});
  CHECK_FALSE(max_flow_feasibility(imbalanced).has_value());
}

TEST_CASE("max flow feasibility agrees with brute force on random instances") {
  SplitMix64 rng(808);
  for (int trial = 0; trial < 60; ++trial) {
    const Instance inst = random_small_instance(rng);
    const auto flow = max_flow_feasibility(inst);
    const auto oracle = brute_force_min_cost(inst);
    CHECK(flow.has_value() == oracle.has_value());
    if (flow) CHECK(validate_flow(inst, *flow).is_feasible_flow);
  }
}
