#include "feature_oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace mcfsel::testing {

FeatureVector oracle_features(const Instance& inst) {
  const std::size_t n = static_cast<std::size_t>(inst.num_vertices());
  const auto& arcs = inst.arcs();
  FeatureVector f{};
  f[0] = static_cast<double>(inst.num_vertices());
  f[1] = static_cast<double>(arcs.size());

  const auto stats = [](const std::vector<double>& v) {
    double mx = v[0], mn = v[0], sum = 0;
    for (double x : v) {
      mx = std::max(mx, x);
      mn = std::min(mn, x);
      sum += x;
    }
    const double mean = sum / static_cast<double>(v.size());
    double sq = 0;
    for (double x : v) sq += (x - mean) * (x - mean);
    return std::array<double, 5>{mx, mn, mean, sum, std::sqrt(sq / static_cast<double>(v.size()))};
  };
  std::vector<double> costs, caps;
  for (const Arc& a : arcs) {
    costs.push_back(static_cast<double>(a.cost));
    caps.push_back(static_cast<double>(a.capacity));
  }
  const auto [cmax, cmin, cmean, csum, cstd] = stats(costs);
  const auto [umax, umin, umean, usum, ustd] = stats(caps);
  f[2] = cmax;
  f[3] = cmin;
  f[4] = cmax > 0 ? cmean / cmax : 0;
  f[5] = csum;
  f[6] = cmax > 0 ? cstd / cmax : 0;
  f[7] = umax;
  f[8] = umin;
  f[9] = umax > 0 ? umean / umax : 0;
  f[10] = usum;
  f[11] = umax > 0 ? ustd / umax : 0;

  double total_supply = 0, nonzero = 0;
  for (Vertex v = 0; v < inst.num_vertices(); ++v) {
    if (inst.supply(v) > 0) total_supply += static_cast<double>(inst.supply(v));
    if (inst.supply(v) != 0) nonzero += 1;
  }
  f[12] = total_supply;
  f[13] = nonzero;

  // BFS from lowest-index source to lowest-index sink
  Vertex source = -1, sink = -1;
  for (Vertex v = 0; v < inst.num_vertices(); ++v) {
    if (source < 0 && inst.supply(v) > 0) source = v;
    if (sink < 0 && inst.supply(v) < 0) sink = v;
  }
  double distance = static_cast<double>(inst.num_vertices());
  if (source >= 0 && sink >= 0) {
    std::vector<int> hops(n, -1);
    hops[static_cast<std::size_t>(source)] = 0;
    std::vector<Vertex> frontier = {source};
    while (!frontier.empty() && hops[static_cast<std::size_t>(sink)] < 0) {
      std::vector<Vertex> next;
      for (Vertex v : frontier) {
        for (const Arc& a : arcs) {
          if (a.tail == v && hops[static_cast<std::size_t>(a.head)] < 0) {
            hops[static_cast<std::size_t>(a.head)] = hops[static_cast<std::size_t>(v)] + 1;
            next.push_back(a.head);
          }
        }
      }
      frontier = std::move(next);
    }
    if (hops[static_cast<std::size_t>(sink)] >= 0) {
      distance = hops[static_cast<std::size_t>(sink)];
    }
  }
  f[14] = distance;

  // Prim's algorithm on a dense collapsed adjacency matrix (second MST route)
  // Equal-cost edges are ordered by original arc index, matching the
  // documented tie rule; under that strict total order the minimum spanning
  // tree is unique, so Prim here and Kruskal in production must agree.
  const double kInf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> weight(n, std::vector<double>(n, kInf));
  std::vector<std::vector<double>> capacity_of(n, std::vector<double>(n, 0));
  std::vector<std::vector<std::int64_t>> index_of(
      n, std::vector<std::int64_t>(n, std::numeric_limits<std::int64_t>::max()));
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    const Arc& a = arcs[i];
    if (a.tail == a.head) continue;
    const std::size_t x = static_cast<std::size_t>(std::min(a.tail, a.head));
    const std::size_t y = static_cast<std::size_t>(std::max(a.tail, a.head));
    if (static_cast<double>(a.cost) < weight[x][y]) {
      weight[x][y] = weight[y][x] = static_cast<double>(a.cost);
      capacity_of[x][y] = capacity_of[y][x] = static_cast<double>(a.capacity);
      index_of[x][y] = index_of[y][x] = static_cast<std::int64_t>(i);
    }
  }
  std::vector<double> tree_costs, tree_caps;
  std::vector<char> in_tree(n, 0);
  for (std::size_t root = 0; root < n; ++root) {
    if (in_tree[root]) continue;
    in_tree[root] = 1;
    for (;;) {
      double best = kInf;
      std::int64_t best_index = std::numeric_limits<std::int64_t>::max();
      std::size_t bu = 0, bv = 0;
      for (std::size_t u = 0; u < n; ++u) {
        if (!in_tree[u]) continue;
        for (std::size_t v = 0; v < n; ++v) {
          if (in_tree[v] || weight[u][v] == kInf) continue;
          if (weight[u][v] < best ||
              (weight[u][v] == best && index_of[u][v] < best_index)) {
            best = weight[u][v];
            best_index = index_of[u][v];
            bu = u;
            bv = v;
          }
        }
      }
      if (best == kInf) break;
      in_tree[bv] = 1;
      tree_costs.push_back(weight[bu][bv]);
      tree_caps.push_back(capacity_of[bu][bv]);
    }
  }
  const auto [tcmax, tcmin, tcmean, tcsum, tcstd] = stats(tree_costs);
  const auto [tumax, tumin, tumean, tusum, tustd] = stats(tree_caps);
  (void)tcmax;
  (void)tcmin;
  (void)tumax;
  (void)tumin;
  f[15] = cmax > 0 ? tcmean / cmax : 0;
  f[16] = tcsum;
  f[17] = cmax > 0 ? tcstd / cmax : 0;
  f[18] = umax > 0 ? tumean / umax : 0;
  f[19] = tusum;
  f[20] = umax > 0 ? tustd / umax : 0;
  return f;
}

}  // namespace mcfsel::testing
