#ifndef MCFSEL_INSTANCE_HPP
#define MCFSEL_INSTANCE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "mcfsel/rational.hpp"

namespace mcfsel {

using Vertex = std::int32_t;  // 0-based internally; DIMACS I/O is 1-based

struct Arc {
  Vertex tail = 0;
  Vertex head = 0;
  std::int64_t cost = 0;      // c_ij >= 0
  std::int64_t capacity = 0;  // u_ij >= 0

  friend bool operator==(const Arc&, const Arc&) = default;
};

// A min-cost-flow instance: directed multigraph with arc costs/capacities and
// vertex supplies. Immutable after construction; parallel arcs and self-loops
// are allowed. Supplies need not balance (the validator reports that), but
// endpoints, sign constraints and the arithmetic safety bound are enforced
// here so downstream algorithms can use plain int64 arithmetic.
class Instance {
 public:
  Instance(Vertex num_vertices, std::vector<Arc> arcs,
           std::vector<std::int64_t> supplies);

  Vertex num_vertices() const { return num_vertices_; }
  std::int64_t num_arcs() const { return static_cast<std::int64_t>(arcs_.size()); }
  const std::vector<Arc>& arcs() const { return arcs_; }
  const Arc& arc(std::size_t a) const { return arcs_[a]; }
  const std::vector<std::int64_t>& supplies() const { return supplies_; }
  std::int64_t supply(Vertex v) const { return supplies_[static_cast<std::size_t>(v)]; }

  std::int64_t max_cost() const { return max_cost_; }
  std::int64_t max_capacity() const { return max_capacity_; }
  // Sum of positive supplies.
  std::int64_t total_supply() const { return total_supply_; }
  std::int64_t supply_imbalance() const { return supply_imbalance_; }

  friend bool operator==(const Instance&, const Instance&) = default;

 private:
  Vertex num_vertices_ = 0;
  std::vector<Arc> arcs_;
  std::vector<std::int64_t> supplies_;
  std::int64_t max_cost_ = 0;
  std::int64_t max_capacity_ = 0;
  std::int64_t total_supply_ = 0;
  std::int64_t supply_imbalance_ = 0;
};

// Arc flow values aligned with Instance::arcs() order.
using Flow = std::vector<std::int64_t>;

// Dual potential per vertex; reduced cost of arc (i,j) is c_ij + pi_i - pi_j.
using Potentials = std::vector<std::int64_t>;

struct FeasibilityReport {
  struct ConservationViolation {
    Vertex vertex;
    std::int64_t excess;
  };
  struct CapacityViolation {
    std::int64_t arc;
    std::int64_t amount;  // positive: above capacity; negative: below zero
  };
  std::vector<ConservationViolation> conservation_violations;
  std::vector<CapacityViolation> capacity_violations;
  bool is_feasible_flow = false;
};

// Residual network of (instance, flow): per original arc, a forward arc with
// capacity u - x and cost c (present iff u - x > 0) and a backward arc with
// capacity x and cost -c (present iff x > 0).
struct ResidualArc {
  Vertex tail = 0;
  Vertex head = 0;
  std::int64_t cost = 0;
  std::int64_t capacity = 0;
  std::int64_t orig_arc = 0;
  bool backward = false;
};

struct ResidualNetwork {
  Vertex num_vertices = 0;
  std::vector<ResidualArc> arcs;
  // CSR adjacency: out-arc indices of v are out_arcs[out_begin[v]..out_begin[v+1]).
  std::vector<std::int32_t> out_begin;
  std::vector<std::int32_t> out_arcs;

  void build_adjacency();
};

std::int64_t excess(const Instance& instance, const Flow& flow, Vertex v);
std::int64_t flow_cost(const Instance& instance, const Flow& flow);
FeasibilityReport validate_flow(const Instance& instance, const Flow& flow);

// min_residual_capacity: drop residual arcs thinner than this (capacity
// scaling uses it to build the delta-residual network).
ResidualNetwork residual_network(const Instance& instance, const Flow& flow,
                                 std::int64_t min_residual_capacity = 1);

std::int64_t reduced_cost(const ResidualArc& arc, const Potentials& potentials);

// True iff every residual arc has reduced cost >= -epsilon.
bool check_epsilon_optimality(const Instance& instance, const Flow& flow,
                              const Potentials& potentials, const Rational& epsilon);

}  // namespace mcfsel

#endif
