#include "mcfsel/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace mcfsel {

const std::array<std::string, kNumFeatures>& feature_names() {
  static const std::array<std::string, kNumFeatures> names = {
      "num_vertices",       "num_arcs",
      "cost_max",           "cost_min",
      "cost_mean_norm",     "cost_sum",
      "cost_std_norm",      "cap_max",
      "cap_min",            "cap_mean_norm",
      "cap_sum",            "cap_std_norm",
      "total_supply",       "num_supply_demand_vertices",
      "source_sink_distance",
      "mst_cost_mean_norm", "mst_cost_sum",
      "mst_cost_std_norm",  "mst_cap_mean_norm",
      "mst_cap_sum",        "mst_cap_std_norm"};
  return names;
}

namespace {

struct Stats {
  double max = 0, min = 0, mean = 0, sum = 0, std_dev = 0;
};

Stats population_stats(const std::vector<std::int64_t>& values) {
  Stats s;
  s.max = static_cast<double>(*std::max_element(values.begin(), values.end()));
  s.min = static_cast<double>(*std::min_element(values.begin(), values.end()));
  std::int64_t sum = 0;
  for (std::int64_t v : values) sum += v;
  s.sum = static_cast<double>(sum);
  s.mean = s.sum / static_cast<double>(values.size());
  double sq = 0;
  for (std::int64_t v : values) {
    const double d = static_cast<double>(v) - s.mean;
    sq += d * d;
  }
  s.std_dev = std::sqrt(sq / static_cast<double>(values.size()));
  return s;
}

double norm_by(double value, double denom) { return denom > 0 ? value / denom : 0.0; }

std::int64_t bfs_distance(const Instance& instance, Vertex from, Vertex to) {
  const std::size_t n = static_cast<std::size_t>(instance.num_vertices());
  std::vector<std::vector<Vertex>> out(n);
  for (const Arc& arc : instance.arcs()) {
    out[static_cast<std::size_t>(arc.tail)].push_back(arc.head);
  }
  std::vector<std::int64_t> dist(n, -1);
  std::queue<Vertex> queue;
  dist[static_cast<std::size_t>(from)] = 0;
  queue.push(from);
  while (!queue.empty()) {
    const Vertex v = queue.front();
    queue.pop();
    if (v == to) return dist[static_cast<std::size_t>(v)];
    for (Vertex w : out[static_cast<std::size_t>(v)]) {
      if (dist[static_cast<std::size_t>(w)] < 0) {
        dist[static_cast<std::size_t>(w)] = dist[static_cast<std::size_t>(v)] + 1;
        queue.push(w);
      }
    }
  }
  return instance.num_vertices();  // unreachable sentinel
}

struct DisjointSets {
  std::vector<Vertex> parent;
  explicit DisjointSets(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  Vertex find(Vertex v) {
    while (parent[static_cast<std::size_t>(v)] != v) {
      parent[static_cast<std::size_t>(v)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
      v = parent[static_cast<std::size_t>(v)];
    }
    return v;
  }
  bool unite(Vertex a, Vertex b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[static_cast<std::size_t>(a)] = b;
    return true;
  }
};

}  // namespace

std::int64_t source_sink_distance(const Instance& instance) {
  Vertex source = -1, sink = -1;
  for (Vertex v = 0; v < instance.num_vertices(); ++v) {
    if (source < 0 && instance.supply(v) > 0) source = v;
    if (sink < 0 && instance.supply(v) < 0) sink = v;
  }
  if (source < 0) throw std::invalid_argument("instance has no source vertex");
  if (sink < 0) throw std::invalid_argument("instance has no sink vertex");
  return bfs_distance(instance, source, sink);
}

MstFeatures mst_features(const Instance& instance) {
  if (instance.arcs().empty()) {
    throw std::invalid_argument("mst features require at least one arc");
  }
  // Collapse parallel arcs (and drop self-loops) on the undirected support
  // graph, keeping the cheapest representative, lowest arc index on ties.
  struct Edge {
    Vertex a, b;
    std::int64_t cost, capacity, index;
  };
  std::vector<Edge> edges;
  edges.reserve(instance.arcs().size());
  for (std::size_t i = 0; i < instance.arcs().size(); ++i) {
    const Arc& arc = instance.arc(i);
    if (arc.tail == arc.head) continue;
    edges.push_back({std::min(arc.tail, arc.head), std::max(arc.tail, arc.head), arc.cost,
                     arc.capacity, static_cast<std::int64_t>(i)});
  }
  if (edges.empty()) {
    throw std::invalid_argument("support graph has no edges besides self-loops");
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) {
    if (x.a != y.a) return x.a < y.a;
    if (x.b != y.b) return x.b < y.b;
    if (x.cost != y.cost) return x.cost < y.cost;
    return x.index < y.index;
  });
  std::size_t unique_count = 0;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (unique_count == 0 || edges[unique_count - 1].a != edges[i].a ||
        edges[unique_count - 1].b != edges[i].b) {
      edges[unique_count++] = edges[i];
    }
  }
  edges.resize(unique_count);

  // Kruskal, stable by (cost, original arc index).
  std::sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) {
    return x.cost != y.cost ? x.cost < y.cost : x.index < y.index;
  });
  DisjointSets sets(static_cast<std::size_t>(instance.num_vertices()));
  std::vector<std::int64_t> tree_costs, tree_caps;
  for (const Edge& e : edges) {
    if (sets.unite(e.a, e.b)) {
      tree_costs.push_back(e.cost);
      tree_caps.push_back(e.capacity);
    }
  }

  int components = 0;
  for (Vertex v = 0; v < instance.num_vertices(); ++v) {
    if (sets.find(v) == v) ++components;
  }

  const Stats cost_stats = population_stats(tree_costs);
  const Stats cap_stats = population_stats(tree_caps);
  MstFeatures out;
  out.cost_sum = cost_stats.sum;
  out.cost_mean_norm = norm_by(cost_stats.mean, static_cast<double>(instance.max_cost()));
  out.cost_std_norm = norm_by(cost_stats.std_dev, static_cast<double>(instance.max_cost()));
  out.cap_sum = cap_stats.sum;
  out.cap_mean_norm = norm_by(cap_stats.mean, static_cast<double>(instance.max_capacity()));
  out.cap_std_norm = norm_by(cap_stats.std_dev, static_cast<double>(instance.max_capacity()));
  out.components = components;
  return out;
}

FeatureVector extract_features(const Instance& instance) {
  if (instance.arcs().empty()) {
    throw std::invalid_argument("feature extraction requires at least one arc");
  }
  std::vector<std::int64_t> costs, caps;
  costs.reserve(instance.arcs().size());
  caps.reserve(instance.arcs().size());
  for (const Arc& arc : instance.arcs()) {
    costs.push_back(arc.cost);
    caps.push_back(arc.capacity);
  }
  const Stats cost_stats = population_stats(costs);
  const Stats cap_stats = population_stats(caps);

  std::int64_t supply_demand_count = 0;
  bool has_source = false, has_sink = false;
  for (Vertex v = 0; v < instance.num_vertices(); ++v) {
    if (instance.supply(v) != 0) ++supply_demand_count;
    has_source = has_source || instance.supply(v) > 0;
    has_sink = has_sink || instance.supply(v) < 0;
  }

  const MstFeatures mst = mst_features(instance);

  FeatureVector f{};
  f[kNumVerticesF] = static_cast<double>(instance.num_vertices());
  f[kNumArcsF] = static_cast<double>(instance.num_arcs());
  f[kCostMax] = cost_stats.max;
  f[kCostMin] = cost_stats.min;
  f[kCostMeanNorm] = norm_by(cost_stats.mean, cost_stats.max);
  f[kCostSum] = cost_stats.sum;
  f[kCostStdNorm] = norm_by(cost_stats.std_dev, cost_stats.max);
  f[kCapMax] = cap_stats.max;
  f[kCapMin] = cap_stats.min;
  f[kCapMeanNorm] = norm_by(cap_stats.mean, cap_stats.max);
  f[kCapSum] = cap_stats.sum;
  f[kCapStdNorm] = norm_by(cap_stats.std_dev, cap_stats.max);
  f[kTotalSupply] = static_cast<double>(instance.total_supply());
  f[kNumSupplyDemandVertices] = static_cast<double>(supply_demand_count);
  // Degenerate all-zero-supply instances never occur in solved corpora; keep
  // the sentinel instead of failing the whole pipeline on them.
  f[kSourceSinkDistance] = has_source && has_sink
                               ? static_cast<double>(source_sink_distance(instance))
                               : static_cast<double>(instance.num_vertices());
  f[kMstCostMeanNorm] = mst.cost_mean_norm;
  f[kMstCostSum] = mst.cost_sum;
  f[kMstCostStdNorm] = mst.cost_std_norm;
  f[kMstCapMeanNorm] = mst.cap_mean_norm;
  f[kMstCapSum] = mst.cap_sum;
  f[kMstCapStdNorm] = mst.cap_std_norm;
  return f;
}

std::string write_feature_table(
    const std::vector<std::pair<std::string, FeatureVector>>& rows) {
  std::string out = "id";
  for (const std::string& name : feature_names()) {
    out += ",";
    out += name;
  }
  out += "\n";
  char buffer[64];
  for (const auto& [id, features] : rows) {
    out += id;
    for (double value : features) {
      std::snprintf(buffer, sizeof buffer, ",%.12g", value);
      out += buffer;
    }
    out += "\n";
  }
  return out;
}

std::vector<std::pair<std::string, FeatureVector>> read_feature_table(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty feature table");
  std::vector<std::pair<std::string, FeatureVector>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string field;
    if (!std::getline(fields, field, ',')) continue;
    std::pair<std::string, FeatureVector> row;
    row.first = field;
    for (int i = 0; i < kNumFeatures; ++i) {
      if (!std::getline(fields, field, ',')) {
        throw std::runtime_error("feature row with fewer than 21 values: " + line);
      }
      row.second[static_cast<std::size_t>(i)] = std::stod(field);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace mcfsel
