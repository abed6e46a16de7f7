#include "mcfsel/instance.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace mcfsel {

namespace {

// n * max_cost * max_capacity must fit int64 so objective values and the
// potential magnitudes of every solver stay representable.
bool product_fits_int64(std::int64_t a, std::int64_t b, std::int64_t c) {
  const __int128 p = static_cast<__int128>(a) * b * c;
  return p <= std::numeric_limits<std::int64_t>::max();
}

}  // namespace

Instance::Instance(Vertex num_vertices, std::vector<Arc> arcs,
                   std::vector<std::int64_t> supplies)
    : num_vertices_(num_vertices), arcs_(std::move(arcs)), supplies_(std::move(supplies)) {
  if (num_vertices_ <= 0) {
    throw std::invalid_argument("instance must have at least one vertex");
  }
  if (supplies_.size() != static_cast<std::size_t>(num_vertices_)) {
    throw std::invalid_argument("supply vector size does not match vertex count");
  }
  for (std::size_t a = 0; a < arcs_.size(); ++a) {
    const Arc& arc = arcs_[a];
    if (arc.tail < 0 || arc.tail >= num_vertices_ || arc.head < 0 ||
        arc.head >= num_vertices_) {
      throw std::invalid_argument("arc " + std::to_string(a) + " has an endpoint out of range");
    }
    if (arc.cost < 0) {
      throw std::invalid_argument("arc " + std::to_string(a) + " has negative cost");
    }
    if (arc.capacity < 0) {
      throw std::invalid_argument("arc " + std::to_string(a) + " has negative capacity");
    }
    max_cost_ = std::max(max_cost_, arc.cost);
    max_capacity_ = std::max(max_capacity_, arc.capacity);
  }
  for (std::int64_t b : supplies_) {
    if (b > 0) total_supply_ += b;
    supply_imbalance_ += b;
  }
  if (!product_fits_int64(num_vertices_, std::max<std::int64_t>(max_cost_, 1),
                          std::max<std::int64_t>(std::max(max_capacity_, total_supply_), 1))) {
    throw std::invalid_argument(
        "instance exceeds the arithmetic bound: n * max_cost * max_capacity must fit int64");
  }
}

std::int64_t excess(const Instance& instance, const Flow& flow, Vertex v) {
  if (v < 0 || v >= instance.num_vertices()) {
    throw std::out_of_range("vertex out of range");
  }
  std::int64_t e = instance.supply(v);
  const auto& arcs = instance.arcs();
  for (std::size_t a = 0; a < arcs.size(); ++a) {
    if (arcs[a].head == v) e += flow[a];
    if (arcs[a].tail == v) e -= flow[a];
  }
  return e;
}

std::int64_t flow_cost(const Instance& instance, const Flow& flow) {
  std::int64_t total = 0;
  const auto& arcs = instance.arcs();
  for (std::size_t a = 0; a < arcs.size(); ++a) {
    total += arcs[a].cost * flow[a];
  }
  return total;
}

FeasibilityReport validate_flow(const Instance& instance, const Flow& flow) {
  FeasibilityReport report;
  if (flow.size() != instance.arcs().size()) {
    throw std::invalid_argument("flow vector size does not match arc count");
  }
  const auto& arcs = instance.arcs();
  std::vector<std::int64_t> ex(instance.supplies().begin(), instance.supplies().end());
  for (std::size_t a = 0; a < arcs.size(); ++a) {
    if (flow[a] > arcs[a].capacity) {
      report.capacity_violations.push_back(
          {static_cast<std::int64_t>(a), flow[a] - arcs[a].capacity});
    } else if (flow[a] < 0) {
      report.capacity_violations.push_back({static_cast<std::int64_t>(a), flow[a]});
    }
    ex[static_cast<std::size_t>(arcs[a].head)] += flow[a];
    ex[static_cast<std::size_t>(arcs[a].tail)] -= flow[a];
  }
  for (Vertex v = 0; v < instance.num_vertices(); ++v) {
    if (ex[static_cast<std::size_t>(v)] != 0) {
      report.conservation_violations.push_back({v, ex[static_cast<std::size_t>(v)]});
    }
  }
  report.is_feasible_flow =
      report.conservation_violations.empty() && report.capacity_violations.empty();
  return report;
}

void ResidualNetwork::build_adjacency() {
  const std::size_t n = static_cast<std::size_t>(num_vertices);
  out_begin.assign(n + 1, 0);
  for (const ResidualArc& a : arcs) {
    ++out_begin[static_cast<std::size_t>(a.tail) + 1];
  }
  for (std::size_t v = 0; v < n; ++v) out_begin[v + 1] += out_begin[v];
  out_arcs.assign(arcs.size(), 0);
  std::vector<std::int32_t> cursor(out_begin.begin(), out_begin.end() - 1);
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    out_arcs[static_cast<std::size_t>(
        cursor[static_cast<std::size_t>(arcs[i].tail)]++)] = static_cast<std::int32_t>(i);
  }
}

ResidualNetwork residual_network(const Instance& instance, const Flow& flow,
                                 std::int64_t min_residual_capacity) {
  const auto& arcs = instance.arcs();
  if (flow.size() != arcs.size()) {
    throw std::invalid_argument("flow vector size does not match arc count");
  }
  ResidualNetwork net;
  net.num_vertices = instance.num_vertices();
  net.arcs.reserve(2 * arcs.size());
  for (std::size_t a = 0; a < arcs.size(); ++a) {
    if (flow[a] < 0 || flow[a] > arcs[a].capacity) {
      throw std::invalid_argument("flow violates capacity bounds on arc " + std::to_string(a));
    }
    const std::int64_t forward = arcs[a].capacity - flow[a];
    if (forward >= min_residual_capacity) {
      net.arcs.push_back({arcs[a].tail, arcs[a].head, arcs[a].cost, forward,
                          static_cast<std::int64_t>(a), false});
    }
    if (flow[a] >= min_residual_capacity) {
      net.arcs.push_back({arcs[a].head, arcs[a].tail, -arcs[a].cost, flow[a],
                          static_cast<std::int64_t>(a), true});
    }
  }
  net.build_adjacency();
  return net;
}

std::int64_t reduced_cost(const ResidualArc& arc, const Potentials& potentials) {
  return arc.cost + potentials[static_cast<std::size_t>(arc.tail)] -
         potentials[static_cast<std::size_t>(arc.head)];
}

bool check_epsilon_optimality(const Instance& instance, const Flow& flow,
                              const Potentials& potentials, const Rational& epsilon) {
  if (epsilon.num < 0) {
    throw std::invalid_argument("epsilon must be non-negative");
  }
  const ResidualNetwork net = residual_network(instance, flow);
  for (const ResidualArc& arc : net.arcs) {
    // c^pi >= -eps  <=>  den * c^pi >= -num
    const __int128 lhs = static_cast<__int128>(epsilon.den) * reduced_cost(arc, potentials);
    if (lhs < -static_cast<__int128>(epsilon.num)) return false;
  }
  return true;
}

}  // namespace mcfsel
