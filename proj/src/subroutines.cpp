#include <algorithm>
#include <queue>
#include <stdexcept>

#include "mcfsel/solvers.hpp"
#include "solver_internal.hpp"

namespace mcfsel {

namespace {

// Extract the simple cycle contained in a predecessor chain starting at a
// vertex known to lie on (or lead into) a cycle.
std::vector<std::int32_t> trace_cycle(const ResidualNetwork& net,
                                      const std::vector<std::int32_t>& pred_arc, Vertex start) {
  const std::size_t n = static_cast<std::size_t>(net.num_vertices);
  std::vector<bool> seen(n, false);
  Vertex v = start;
  while (!seen[static_cast<std::size_t>(v)]) {
    seen[static_cast<std::size_t>(v)] = true;
    v = net.arcs[static_cast<std::size_t>(pred_arc[static_cast<std::size_t>(v)])].tail;
  }
  // v is now on the cycle; walk it once more collecting arcs.
  std::vector<std::int32_t> cycle;
  Vertex w = v;
  do {
    const std::int32_t a = pred_arc[static_cast<std::size_t>(w)];
    cycle.push_back(a);
    w = net.arcs[static_cast<std::size_t>(a)].tail;
  } while (w != v);
  std::reverse(cycle.begin(), cycle.end());
  return cycle;
}

}  // namespace

std::optional<std::vector<std::int32_t>> bellman_ford_negative_cycle(
    const ResidualNetwork& network) {
  const std::size_t n = static_cast<std::size_t>(network.num_vertices);
  // All-zero start labels: equivalent to a virtual source into every vertex,
  // so cycles anywhere in the network are found.
  std::vector<std::int64_t> dist(n, 0);
  std::vector<std::int32_t> pred(n, -1);

  Vertex relaxed_in_last_pass = -1;
  for (std::size_t pass = 0; pass < n; ++pass) {
    relaxed_in_last_pass = -1;
    for (std::size_t a = 0; a < network.arcs.size(); ++a) {
      const ResidualArc& arc = network.arcs[a];
      const std::int64_t candidate = dist[static_cast<std::size_t>(arc.tail)] + arc.cost;
      if (candidate < dist[static_cast<std::size_t>(arc.head)]) {
        dist[static_cast<std::size_t>(arc.head)] = candidate;
        pred[static_cast<std::size_t>(arc.head)] = static_cast<std::int32_t>(a);
        if (relaxed_in_last_pass < 0 || arc.head < relaxed_in_last_pass) {
          relaxed_in_last_pass = arc.head;
        }
      }
    }
    if (relaxed_in_last_pass < 0) return std::nullopt;  // converged, no negative cycle
  }

  // A relaxation in pass n proves a negative cycle reachable backward from
  // that vertex. Walk n predecessor steps to guarantee landing on the cycle.
  Vertex v = relaxed_in_last_pass;
  for (std::size_t i = 0; i < n; ++i) {
    v = network.arcs[static_cast<std::size_t>(pred[static_cast<std::size_t>(v)])].tail;
  }
  return trace_cycle(network, pred, v);
}

std::optional<MinMeanCycle> min_mean_cycle(const ResidualNetwork& network) {
  const std::size_t n = static_cast<std::size_t>(network.num_vertices);
  const std::size_t m = network.arcs.size();
  if (m == 0) return std::nullopt;
  // the walk/predecessor tables below are quadratic in n
  if ((n + 1) * n > std::size_t{120'000'000}) {
    throw SolverLimitError("instance too large for the min-mean-cycle dynamic program");
  }

  // Karp's recurrence with a virtual source: walk[k][v] = min cost of a walk
  // of exactly k arcs ending at v, starting anywhere. The minimum cycle mean
  // is min_v max_k (walk[n][v] - walk[k][v]) / (n - k).
  std::vector<std::vector<std::int64_t>> walk(n + 1,
                                              std::vector<std::int64_t>(n, kInfDistance));
  std::vector<std::vector<std::int32_t>> from(n + 1, std::vector<std::int32_t>(n, -1));
  std::fill(walk[0].begin(), walk[0].end(), 0);

  for (std::size_t k = 1; k <= n; ++k) {
    for (std::size_t a = 0; a < m; ++a) {
      const ResidualArc& arc = network.arcs[a];
      const std::int64_t base = walk[k - 1][static_cast<std::size_t>(arc.tail)];
      if (base == kInfDistance) continue;
      const std::int64_t candidate = base + arc.cost;
      if (candidate < walk[k][static_cast<std::size_t>(arc.head)]) {
        walk[k][static_cast<std::size_t>(arc.head)] = candidate;
        from[k][static_cast<std::size_t>(arc.head)] = static_cast<std::int32_t>(a);
      }
    }
  }

  bool found = false;
  Rational best_mean;
  std::size_t best_vertex = 0;
  for (std::size_t v = 0; v < n; ++v) {
    if (walk[n][v] == kInfDistance) continue;
    // max over k of (walk[n][v] - walk[k][v]) / (n - k)
    bool have_inner = false;
    Rational inner;
    for (std::size_t k = 0; k < n; ++k) {
      if (walk[k][v] == kInfDistance) continue;
      const Rational term(walk[n][v] - walk[k][v], static_cast<std::int64_t>(n - k));
      if (!have_inner || inner < term) {
        inner = term;
        have_inner = true;
      }
    }
    if (!have_inner) continue;
    if (!found || inner < best_mean) {
      best_mean = inner;
      best_vertex = v;
      found = true;
    }
  }
  if (!found) return std::nullopt;  // acyclic

  // The critical n-arc walk ending at best_vertex contains only cycles whose
  // mean equals best_mean; extract the first one found walking backward.
  std::vector<std::int32_t> walk_arcs(n);
  {
    std::size_t v = best_vertex;
    for (std::size_t k = n; k >= 1; --k) {
      const std::int32_t a = from[k][v];
      walk_arcs[k - 1] = a;
      v = static_cast<std::size_t>(network.arcs[static_cast<std::size_t>(a)].tail);
    }
  }
  std::vector<std::int32_t> last_pos(n, -1);
  std::size_t cycle_begin = 0, cycle_end = 0;
  {
    Vertex v = network.arcs[static_cast<std::size_t>(walk_arcs[0])].tail;
    last_pos[static_cast<std::size_t>(v)] = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const Vertex head = network.arcs[static_cast<std::size_t>(walk_arcs[i])].head;
      if (last_pos[static_cast<std::size_t>(head)] >= 0) {
        cycle_begin = static_cast<std::size_t>(last_pos[static_cast<std::size_t>(head)]);
        cycle_end = i + 1;
        break;
      }
      last_pos[static_cast<std::size_t>(head)] = static_cast<std::int32_t>(i + 1);
    }
  }
  MinMeanCycle result;
  result.arcs.assign(walk_arcs.begin() + static_cast<std::ptrdiff_t>(cycle_begin),
                     walk_arcs.begin() + static_cast<std::ptrdiff_t>(cycle_end));
  result.mean = best_mean;
  return result;
}

ShortestPaths dijkstra_with_potentials(const ResidualNetwork& network,
                                       const Potentials& potentials, Vertex source) {
  const std::size_t n = static_cast<std::size_t>(network.num_vertices);
  ShortestPaths result;
  result.distance.assign(n, kInfDistance);
  result.pred_arc.assign(n, -1);
  result.distance[static_cast<std::size_t>(source)] = 0;

  // (distance, vertex) min-heap; vertex index breaks ties for determinism.
  using Item = std::pair<std::int64_t, Vertex>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  queue.push({0, source});
  std::vector<bool> finished(n, false);

  while (!queue.empty()) {
    const auto [d, v] = queue.top();
    queue.pop();
    if (finished[static_cast<std::size_t>(v)]) continue;
    finished[static_cast<std::size_t>(v)] = true;
    for (std::int32_t i = network.out_begin[static_cast<std::size_t>(v)];
         i < network.out_begin[static_cast<std::size_t>(v) + 1]; ++i) {
      const std::int32_t a = network.out_arcs[static_cast<std::size_t>(i)];
      const ResidualArc& arc = network.arcs[static_cast<std::size_t>(a)];
      const std::int64_t rc = reduced_cost(arc, potentials);
      if (rc < 0) {
        throw std::logic_error("negative reduced cost in Dijkstra: invariant broken upstream");
      }
      const std::int64_t candidate = d + rc;
      if (candidate < result.distance[static_cast<std::size_t>(arc.head)]) {
        result.distance[static_cast<std::size_t>(arc.head)] = candidate;
        result.pred_arc[static_cast<std::size_t>(arc.head)] = a;
        queue.push({candidate, arc.head});
      }
    }
  }
  return result;
}

namespace {

// Dinic max flow on a dedicated arc list (paired residual arcs).
class Dinic {
 public:
  explicit Dinic(std::size_t num_vertices)
      : first_out_(num_vertices, -1), level_(num_vertices), iter_(num_vertices) {}

  std::int32_t add_arc(Vertex tail, Vertex head, std::int64_t capacity) {
    const std::int32_t id = static_cast<std::int32_t>(head_.size());
    head_.push_back(head);
    cap_.push_back(capacity);
    next_out_.push_back(first_out_[static_cast<std::size_t>(tail)]);
    first_out_[static_cast<std::size_t>(tail)] = id;
    head_.push_back(tail);
    cap_.push_back(0);
    next_out_.push_back(first_out_[static_cast<std::size_t>(head)]);
    first_out_[static_cast<std::size_t>(head)] = id + 1;
    return id;
  }

  std::int64_t flow_on(std::int32_t arc_id) const {
    return cap_[static_cast<std::size_t>(arc_id) + 1];
  }

  std::int64_t max_flow(Vertex source, Vertex sink) {
    std::int64_t total = 0;
    while (build_levels(source, sink)) {
      std::fill(iter_.begin(), iter_.end(), 0);
      for (std::size_t v = 0; v < iter_.size(); ++v) iter_[v] = first_out_[v];
      std::int64_t pushed;
      while ((pushed = augment(source, sink, kInfDistance)) > 0) total += pushed;
    }
    return total;
  }

 private:
  bool build_levels(Vertex source, Vertex sink) {
    std::fill(level_.begin(), level_.end(), -1);
    std::queue<Vertex> queue;
    level_[static_cast<std::size_t>(source)] = 0;
    queue.push(source);
    while (!queue.empty()) {
      const Vertex v = queue.front();
      queue.pop();
      for (std::int32_t a = first_out_[static_cast<std::size_t>(v)]; a >= 0;
           a = next_out_[static_cast<std::size_t>(a)]) {
        if (cap_[static_cast<std::size_t>(a)] > 0 &&
            level_[static_cast<std::size_t>(head_[static_cast<std::size_t>(a)])] < 0) {
          level_[static_cast<std::size_t>(head_[static_cast<std::size_t>(a)])] =
              level_[static_cast<std::size_t>(v)] + 1;
          queue.push(head_[static_cast<std::size_t>(a)]);
        }
      }
    }
    return level_[static_cast<std::size_t>(sink)] >= 0;
  }

  std::int64_t augment(Vertex v, Vertex sink, std::int64_t limit) {
    if (v == sink) return limit;
    for (std::int32_t& a = iter_[static_cast<std::size_t>(v)]; a >= 0;
         a = next_out_[static_cast<std::size_t>(a)]) {
      const Vertex to = head_[static_cast<std::size_t>(a)];
      if (cap_[static_cast<std::size_t>(a)] > 0 &&
          level_[static_cast<std::size_t>(to)] == level_[static_cast<std::size_t>(v)] + 1) {
        const std::int64_t pushed =
            augment(to, sink, std::min(limit, cap_[static_cast<std::size_t>(a)]));
        if (pushed > 0) {
          cap_[static_cast<std::size_t>(a)] -= pushed;
          cap_[static_cast<std::size_t>(a ^ 1)] += pushed;
          return pushed;
        }
      }
    }
    return 0;
  }

  std::vector<Vertex> head_;
  std::vector<std::int64_t> cap_;
  std::vector<std::int32_t> next_out_;
  std::vector<std::int32_t> first_out_;
  std::vector<std::int32_t> level_;
  std::vector<std::int32_t> iter_;
};

}  // namespace

namespace detail {

std::int64_t single_pair_max_flow(const Instance& instance, Vertex source, Vertex sink) {
  Dinic dinic(static_cast<std::size_t>(instance.num_vertices()));
  for (const Arc& arc : instance.arcs()) {
    dinic.add_arc(arc.tail, arc.head, arc.capacity);
  }
  return dinic.max_flow(source, sink);
}

}  // namespace detail

std::optional<Flow> max_flow_feasibility(const Instance& instance) {
  if (instance.supply_imbalance() != 0) return std::nullopt;
  const std::size_t n = static_cast<std::size_t>(instance.num_vertices());
  const Vertex super_source = static_cast<Vertex>(n);
  const Vertex super_sink = static_cast<Vertex>(n + 1);
  Dinic dinic(n + 2);

  std::vector<std::int32_t> arc_ids;
  arc_ids.reserve(instance.arcs().size());
  for (const Arc& arc : instance.arcs()) {
    arc_ids.push_back(dinic.add_arc(arc.tail, arc.head, arc.capacity));
  }
  for (Vertex v = 0; v < instance.num_vertices(); ++v) {
    const std::int64_t b = instance.supply(v);
    if (b > 0) dinic.add_arc(super_source, v, b);
    if (b < 0) dinic.add_arc(v, super_sink, -b);
  }

  const std::int64_t value = dinic.max_flow(super_source, super_sink);
  if (value != instance.total_supply()) return std::nullopt;

  Flow flow(instance.arcs().size(), 0);
  for (std::size_t a = 0; a < arc_ids.size(); ++a) {
    flow[a] = dinic.flow_on(arc_ids[a]);
  }
  return flow;
}

}  // namespace mcfsel
