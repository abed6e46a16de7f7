#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mcfsel/generators.hpp"
#include "mcfsel/instance.hpp"
#include "mcfsel/rng.hpp"
#include "support/builders.hpp"
#include "support/oracle.hpp"

using namespace mcfsel;
using namespace mcfsel::testing;

TEST_CASE("instance construction validates inputs") {
  CHECK_THROWS_AS(Instance(2, {{0, 5, 1, 1}}, {0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(Instance(2, {{0, 1, -1, 1}}, {0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(Instance(2, {{0, 1, 1, -1}}, {0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(Instance(0, {}, {}), std::invalid_argument);
  CHECK_THROWS_AS(Instance(2, {{0, 1, 1, 1}}, {0}), std::invalid_argument);
  // arithmetic bound: n * max_cost * max_capacity must fit int64
  CHECK_THROWS_AS(Instance(2, {{0, 1, std::int64_t{1} << 40, std::int64_t{1} << 40}}, {0, 0}),
                  std::invalid_argument);
  // parallel arcs and self-loops are data-model legal
  const Instance multi(2, {{0, 1, 1, 1}, {0, 1, 2, 2}, {0, 0, 3, 3}}, {0, 0});
  CHECK(multi.num_arcs() == 3);
}

TEST_CASE("excess matches its definition") {
  const Instance inst = t1();
  CHECK(excess(inst, {0}, 0) == 5);
  CHECK(excess(inst, {0}, 1) == -5);
  CHECK(excess(inst, {5}, 0) == 0);
  CHECK(excess(inst, {5}, 1) == 0);
  CHECK_THROWS_AS(excess(inst, {0}, 7), std::out_of_range);
}

TEST_CASE("total excess telescopes to total supply") {
  SplitMix64 rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    const Instance inst = random_small_instance(rng);
    Flow flow(inst.arcs().size());
    for (std::size_t a = 0; a < flow.size(); ++a) {
      flow[a] = rng.next_in(0, inst.arc(a).capacity);
    }
    std::int64_t excess_sum = 0;
    std::int64_t supply_sum = 0;
    for (Vertex v = 0; v < inst.num_vertices(); ++v) {
      excess_sum += excess(inst, flow, v);
      supply_sum += inst.supply(v);
    }
    CHECK(excess_sum == supply_sum);
  }
}

TEST_CASE("flow_cost is the exact dot product") {
  CHECK(flow_cost(t1(), {5}) == 15);
  CHECK(flow_cost(t1(), {0}) == 0);
  CHECK(flow_cost(t2(), {4, 1, 4}) == 13);
  CHECK(flow_cost(t2(), {0, 0, 0}) == 0);
}

TEST_CASE("validate_flow reports violations as data") {
  const Instance inst = t1();
  CHECK(validate_flow(inst, {5}).is_feasible_flow);

  const auto conservation = validate_flow(inst, {3});
  CHECK_FALSE(conservation.is_feasible_flow);
  REQUIRE(conservation.conservation_violations.size() == 2);
  CHECK(conservation.conservation_violations[0].vertex == 0);
  CHECK(conservation.conservation_violations[0].excess == 2);
  CHECK(conservation.conservation_violations[1].vertex == 1);
  CHECK(conservation.conservation_violations[1].excess == -2);
  CHECK(conservation.capacity_violations.empty());

  const auto capacity = validate_flow(inst, {11});
  REQUIRE(capacity.capacity_violations.size() == 1);
  CHECK(capacity.capacity_violations[0].arc == 0);
  CHECK(capacity.capacity_violations[0].amount == 1);
}

TEST_CASE("validate_flow agrees with per-vertex excess") {
  SplitMix64 rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    const Instance inst = random_small_instance(rng);
    Flow flow(inst.arcs().size());
    for (std::size_t a = 0; a < flow.size(); ++a) {
      flow[a] = rng.next_in(0, inst.arc(a).capacity);
    }
    const auto report = validate_flow(inst, flow);
    bool all_zero = true;
    for (Vertex v = 0; v < inst.num_vertices(); ++v) {
      if (excess(inst, flow, v) != 0) all_zero = false;
    }
    CHECK(report.is_feasible_flow == all_zero);
  }
}

TEST_CASE("residual network arc-presence rules") {
  const Instance inst = t1();

  const auto zero = residual_network(inst, {0});
  REQUIRE(zero.arcs.size() == 1);
  CHECK(zero.arcs[0].tail == 0);
  CHECK(zero.arcs[0].head == 1);
  CHECK(zero.arcs[0].capacity == 10);
  CHECK(zero.arcs[0].cost == 3);
  CHECK_FALSE(zero.arcs[0].backward);

  const auto full = residual_network(inst, {10});
  REQUIRE(full.arcs.size() == 1);
  CHECK(full.arcs[0].tail == 1);
  CHECK(full.arcs[0].head == 0);
  CHECK(full.arcs[0].capacity == 10);
  CHECK(full.arcs[0].cost == -3);
  CHECK(full.arcs[0].backward);

  const auto half = residual_network(inst, {5});
  REQUIRE(half.arcs.size() == 2);
  CHECK(half.arcs[0].capacity == 5);
  CHECK(half.arcs[1].capacity == 5);

  CHECK_THROWS_AS(residual_network(inst, {11}), std::invalid_argument);
}

TEST_CASE("residual capacities of both copies sum to the capacity") {
  SplitMix64 rng(555);
  for (int trial = 0; trial < 30; ++trial) {
    const Instance inst = random_small_instance(rng);
    Flow flow(inst.arcs().size());
    for (std::size_t a = 0; a < flow.size(); ++a) {
      flow[a] = rng.next_in(0, inst.arc(a).capacity);
    }
    const auto net = residual_network(inst, flow);
    CHECK(net.arcs.size() <= 2 * inst.arcs().size());
    std::vector<std::int64_t> per_arc(inst.arcs().size(), 0);
    for (const auto& ra : net.arcs) per_arc[static_cast<std::size_t>(ra.orig_arc)] += ra.capacity;
    for (std::size_t a = 0; a < per_arc.size(); ++a) {
      CHECK(per_arc[a] == inst.arc(a).capacity);
    }
  }
}

TEST_CASE("reduced cost formula and sign convention") {
  const Instance inst = t1();
  const auto net = residual_network(inst, {5});  // forward arc 0, backward arc 1
  CHECK(reduced_cost(net.arcs[0], {0, 0}) == 3);
  CHECK(reduced_cost(net.arcs[0], {0, 3}) == 0);
  // backward arc: base cost -3, tail is the original head
  CHECK(reduced_cost(net.arcs[1], {2, 0}) == -3 + 0 - 2);
}

TEST_CASE("epsilon optimality checks") {
  const Instance inst = t1();
  // optimal flow with tight potentials
  CHECK(check_epsilon_optimality(inst, {5}, {0, 3}, Rational(0, 1)));
  // zero flow: only the forward arc, reduced cost 3 >= 0
  CHECK(check_epsilon_optimality(inst, {0}, {0, 0}, Rational(0, 1)));
  // saturated flow with zero potentials: backward arc has c^pi = -3 < -1
  CHECK_FALSE(check_epsilon_optimality(inst, {10}, {0, 0}, Rational(1, 1)));
  // ... but passes with epsilon = 3
  CHECK(check_epsilon_optimality(inst, {10}, {0, 0}, Rational(3, 1)));
  CHECK_THROWS_AS(check_epsilon_optimality(inst, {0}, {0, 0}, Rational(-1, 1)),
                  std::invalid_argument);
}

TEST_CASE("zero-epsilon certificate implies brute-force optimality") {
  // A feasible flow passing the epsilon=0 check must have minimal cost
  // among all integral feasible assignments.
  SplitMix64 rng(4242);
  int certified = 0;
  for (int trial = 0; trial < 200 && certified < 20; ++trial) {
    const Instance inst = random_small_instance(rng);
    const auto optimal = brute_force_optimal_flow(inst);
    if (!optimal) continue;
    // Tight potentials exist for the optimum; Bellman-Ford over the residual
    // network (virtual source) provides them.
    const auto net = residual_network(inst, *optimal);
    Potentials pi(static_cast<std::size_t>(inst.num_vertices()), 0);
    for (int pass = 0; pass < inst.num_vertices(); ++pass) {
      for (const auto& arc : net.arcs) {
        pi[static_cast<std::size_t>(arc.head)] =
            std::min(pi[static_cast<std::size_t>(arc.head)],
                     pi[static_cast<std::size_t>(arc.tail)] + arc.cost);
      }
    }
    if (check_epsilon_optimality(inst, *optimal, pi, Rational(0, 1))) {
      const auto cost = brute_force_min_cost(inst);
      CHECK(flow_cost(inst, *optimal) == *cost);
      ++certified;
    }
  }
  CHECK(certified >= 20);
}
