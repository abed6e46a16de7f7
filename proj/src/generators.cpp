// Family-faithful reconstructions of the four classic DIMACS-era instance
// generators. The topologies follow each family's documented character
// (random network with a source-to-sink skeleton, rectangular grids, torus
// with distance-correlated arcs); they are not bit-compatible with the
// original C programs.

#include "mcfsel/generators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "mcfsel/dimacs.hpp"
#include "mcfsel/rng.hpp"
#include "mcfsel/solvers.hpp"
#include "solver_internal.hpp"

namespace mcfsel {

std::string generator_name(GeneratorId id) {
  switch (id) {
    case GeneratorId::Netgen: return "netgen";
    case GeneratorId::Gridgen: return "gridgen";
    case GeneratorId::Gridgraph: return "gridgraph";
    case GeneratorId::Goto: return "goto";
  }
  return "?";
}

std::optional<GeneratorId> generator_from_name(const std::string& name) {
  for (GeneratorId id : {GeneratorId::Netgen, GeneratorId::Gridgen, GeneratorId::Gridgraph,
                         GeneratorId::Goto}) {
    if (generator_name(id) == name) return id;
  }
  return std::nullopt;
}

namespace {

std::int64_t rounded(double x) { return std::llround(x); }

constexpr std::int64_t kGridSides[] = {5, 10, 20, 30, 50, 70, 100};
constexpr std::int64_t kVertexCounts[] = {64, 128, 256, 512, 1024};
constexpr std::int64_t kSupplyFactors[] = {1, 10, 100, 1000};
constexpr std::int64_t kNetgenCosts[] = {2, 10, 100, 1000, 10000};
constexpr std::int64_t kNetgenCaps[] = {1, 10, 100, 1000, 10000};
constexpr std::int64_t kGotoCosts[] = {10, 100, 1000, 10000};

std::vector<GeneratorParams> netgen_like_grid(GeneratorId family) {
  std::vector<GeneratorParams> grid;
  for (std::int64_t n : kVertexCounts) {
    const std::int64_t arc_options[] = {8 * n, rounded(n * std::pow(n, 0.25)),
                                        rounded(n * std::sqrt(n))};
    const std::int64_t sv_options[] = {1, rounded(std::pow(n, 0.25)), rounded(std::sqrt(n))};
    for (std::int64_t m : arc_options) {
      for (std::int64_t supply_factor : kSupplyFactors) {
        for (std::int64_t sv : sv_options) {
          for (std::int64_t cost : kNetgenCosts) {
            for (std::int64_t cap : kNetgenCaps) {
              GeneratorParams p;
              p.generator = family;
              p.num_vertices = n;
              p.num_arcs = m;
              p.total_supply = rounded(supply_factor * std::sqrt(n));
              p.num_supply_vertices = sv;
              p.num_demand_vertices = sv;
              p.max_cost = cost;
              p.max_capacity = cap;
              if (family == GeneratorId::Gridgen) {
                for (std::int64_t width :
                     {rounded(std::sqrt(n)), rounded(std::sqrt(n / 2.0))}) {
                  for (bool two_way : {false, true}) {
                    GeneratorParams q = p;
                    q.grid_width = width;
                    q.two_way_arcs = two_way;
                    grid.push_back(q);
                  }
                }
              } else {
                grid.push_back(p);
              }
            }
          }
        }
      }
    }
  }
  return grid;
}

std::vector<GeneratorParams> gridgraph_grid() {
  std::vector<GeneratorParams> grid;
  for (std::int64_t width : kGridSides) {
    for (std::int64_t length : kGridSides) {
      for (std::int64_t supply_factor : kSupplyFactors) {
        for (std::int64_t cost : kNetgenCosts) {
          for (std::int64_t cap : kNetgenCaps) {
            GeneratorParams p;
            p.generator = GeneratorId::Gridgraph;
            p.grid_width = width;
            p.grid_length = length;
            p.num_vertices = width * length;
            p.total_supply = rounded(supply_factor * std::sqrt(width * length));
            p.num_supply_vertices = 1;
            p.num_demand_vertices = 1;
            p.max_cost = cost;
            p.max_capacity = cap;
            grid.push_back(p);
          }
        }
      }
    }
  }
  return grid;
}

std::vector<GeneratorParams> goto_grid() {
  std::vector<GeneratorParams> grid;
  for (std::int64_t n : kVertexCounts) {
    for (std::int64_t m : {8 * n, rounded(n * std::sqrt(n))}) {
      for (std::int64_t cost : kGotoCosts) {
        for (std::int64_t cap : kGotoCosts) {
          GeneratorParams p;
          p.generator = GeneratorId::Goto;
          p.num_vertices = n;
          p.num_arcs = m;
          p.num_supply_vertices = 1;
          p.num_demand_vertices = 1;
          p.max_cost = cost;
          p.max_capacity = cap;
          grid.push_back(p);
        }
      }
    }
  }
  return grid;
}

void require(bool condition, const std::string& message) {
  if (!condition) throw std::invalid_argument("generator parameters: " + message);
}

std::vector<Vertex> shuffled_vertices(std::int64_t n, SplitMix64& rng) {
  std::vector<Vertex> order(static_cast<std::size_t>(n));
  for (std::int64_t v = 0; v < n; ++v) order[static_cast<std::size_t>(v)] = static_cast<Vertex>(v);
  for (std::int64_t i = n - 1; i > 0; --i) {
    const std::int64_t j = static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(i + 1)));
    std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
  }
  return order;
}

// Split `total` across `count` vertices, remainder on the first ones.
void assign_supplies(std::vector<std::int64_t>& supplies, const std::vector<Vertex>& vertices,
                     std::int64_t total, int sign) {
  const std::int64_t count = static_cast<std::int64_t>(vertices.size());
  const std::int64_t base = total / count;
  const std::int64_t extra = total % count;
  for (std::int64_t i = 0; i < count; ++i) {
    supplies[static_cast<std::size_t>(vertices[static_cast<std::size_t>(i)])] =
        sign * (base + (i < extra ? 1 : 0));
  }
}

Arc random_arc(std::int64_t n, std::int64_t max_cost, std::int64_t max_capacity,
               SplitMix64& rng) {
  const Vertex tail = static_cast<Vertex>(rng.next_below(static_cast<std::uint64_t>(n)));
  Vertex head = static_cast<Vertex>(rng.next_below(static_cast<std::uint64_t>(n - 1)));
  if (head >= tail) ++head;
  return {tail, head, rng.next_in(1, max_cost), rng.next_in(1, max_capacity)};
}

Instance generate_netgen(const GeneratorParams& p) {
  const std::int64_t n = p.num_vertices;
  require(n >= 2, "need at least two vertices");
  require(p.num_supply_vertices >= 1 && p.num_demand_vertices >= 1,
          "need at least one supply and one demand vertex");
  require(p.num_supply_vertices + p.num_demand_vertices <= n,
          "supply plus demand vertices exceed the vertex count");
  require(p.max_cost >= 1 && p.max_capacity >= 1, "max cost/capacity must be positive");
  SplitMix64 rng(p.seed);

  const auto order = shuffled_vertices(n, rng);
  const std::vector<Vertex> sources(order.begin(), order.begin() + p.num_supply_vertices);
  const std::vector<Vertex> sinks(order.begin() + p.num_supply_vertices,
                                  order.begin() + p.num_supply_vertices + p.num_demand_vertices);
  std::vector<std::int64_t> supplies(static_cast<std::size_t>(n), 0);
  assign_supplies(supplies, sources, p.total_supply, +1);
  assign_supplies(supplies, sinks, p.total_supply, -1);

  // Skeleton: a short random transshipment path from every source to a sink,
  // so each source can in principle reach a demand vertex.
  std::vector<Arc> arcs;
  const std::size_t trans_count = static_cast<std::size_t>(n - p.num_supply_vertices -
                                                           p.num_demand_vertices);
  for (std::size_t s = 0; s < sources.size(); ++s) {
    const Vertex sink = sinks[s % sinks.size()];
    std::int64_t hops = trans_count == 0 ? 0 : static_cast<std::int64_t>(rng.next_below(4));
    Vertex prev = sources[s];
    for (std::int64_t h = 0; h < hops; ++h) {
      const Vertex mid = order[p.num_supply_vertices + p.num_demand_vertices +
                               static_cast<std::int64_t>(rng.next_below(trans_count))];
      if (mid == prev) continue;
      arcs.push_back({prev, mid, rng.next_in(1, p.max_cost), rng.next_in(1, p.max_capacity)});
      prev = mid;
    }
    arcs.push_back({prev, sink, rng.next_in(1, p.max_cost), rng.next_in(1, p.max_capacity)});
  }
  require(static_cast<std::int64_t>(arcs.size()) <= p.num_arcs,
          "arc budget too small for the source-sink skeleton");

  while (static_cast<std::int64_t>(arcs.size()) < p.num_arcs) {
    arcs.push_back(random_arc(n, p.max_cost, p.max_capacity, rng));
  }
  return Instance(static_cast<Vertex>(n), std::move(arcs), std::move(supplies));
}

// Directed pairs between grid-adjacent cells; one-way mode alternates the
// direction checkerboard-style, two-way emits both.
std::vector<std::pair<Vertex, Vertex>> grid_adjacent_pairs(std::int64_t width,
                                                           std::int64_t length, bool two_way) {
  std::vector<std::pair<Vertex, Vertex>> pairs;
  const auto id = [width](std::int64_t row, std::int64_t col) {
    return static_cast<Vertex>(row * width + col);
  };
  for (std::int64_t row = 0; row < length; ++row) {
    for (std::int64_t col = 0; col < width; ++col) {
      if (col + 1 < width) {
        const Vertex a = id(row, col), b = id(row, col + 1);
        if (two_way) {
          pairs.emplace_back(a, b);
          pairs.emplace_back(b, a);
        } else {
          ((row + col) % 2 == 0) ? pairs.emplace_back(a, b) : pairs.emplace_back(b, a);
        }
      }
      if (row + 1 < length) {
        const Vertex a = id(row, col), b = id(row + 1, col);
        if (two_way) {
          pairs.emplace_back(a, b);
          pairs.emplace_back(b, a);
        } else {
          ((row + col) % 2 == 0) ? pairs.emplace_back(a, b) : pairs.emplace_back(b, a);
        }
      }
    }
  }
  return pairs;
}

Instance generate_gridgen(const GeneratorParams& p) {
  require(p.grid_width >= 2, "grid width must be at least 2");
  require(p.num_vertices >= 2, "need at least two vertices");
  const std::int64_t width = p.grid_width;
  const std::int64_t length = (p.num_vertices + width - 1) / width;
  const std::int64_t n = width * length;
  require(p.num_supply_vertices >= 1 && p.num_demand_vertices >= 1,
          "need at least one supply and one demand vertex");
  require(p.num_supply_vertices + p.num_demand_vertices <= n,
          "supply plus demand vertices exceed the vertex count");
  require(p.max_cost >= 1 && p.max_capacity >= 1, "max cost/capacity must be positive");
  SplitMix64 rng(p.seed);

  const auto order = shuffled_vertices(n, rng);
  const std::vector<Vertex> sources(order.begin(), order.begin() + p.num_supply_vertices);
  const std::vector<Vertex> sinks(order.begin() + p.num_supply_vertices,
                                  order.begin() + p.num_supply_vertices + p.num_demand_vertices);
  std::vector<std::int64_t> supplies(static_cast<std::size_t>(n), 0);
  assign_supplies(supplies, sources, p.total_supply, +1);
  assign_supplies(supplies, sinks, p.total_supply, -1);

  auto pairs = grid_adjacent_pairs(width, length, p.two_way_arcs);
  // Deterministic shuffle so a small arc budget still spreads over the grid.
  for (std::size_t i = pairs.size(); i > 1; --i) {
    std::swap(pairs[i - 1], pairs[rng.next_below(i)]);
  }

  std::vector<Arc> arcs;
  arcs.reserve(static_cast<std::size_t>(p.num_arcs));
  const std::int64_t base = std::min<std::int64_t>(p.num_arcs,
                                                   static_cast<std::int64_t>(pairs.size()));
  for (std::int64_t i = 0; i < base; ++i) {
    const auto& [a, b] = pairs[static_cast<std::size_t>(i)];
    arcs.push_back({a, b, rng.next_in(1, p.max_cost), rng.next_in(1, p.max_capacity)});
  }
  while (static_cast<std::int64_t>(arcs.size()) < p.num_arcs) {
    const auto& [a, b] = pairs[rng.next_below(pairs.size())];
    arcs.push_back({a, b, rng.next_in(1, p.max_cost), rng.next_in(1, p.max_capacity)});
  }
  return Instance(static_cast<Vertex>(n), std::move(arcs), std::move(supplies));
}

Instance generate_gridgraph(const GeneratorParams& p) {
  require(p.grid_width >= 2 && p.grid_length >= 2, "grid sides must be at least 2");
  require(p.max_cost >= 1 && p.max_capacity >= 1, "max cost/capacity must be positive");
  const std::int64_t width = p.grid_width;
  const std::int64_t length = p.grid_length;
  const std::int64_t n = width * length;
  SplitMix64 rng(p.seed);

  // Pure rectangular grid: every rightward and downward adjacency exactly
  // once, flow entering at the top-left corner and leaving at bottom-right.
  std::vector<Arc> arcs;
  const auto id = [width](std::int64_t row, std::int64_t col) {
    return static_cast<Vertex>(row * width + col);
  };
  for (std::int64_t row = 0; row < length; ++row) {
    for (std::int64_t col = 0; col < width; ++col) {
      if (col + 1 < width) {
        arcs.push_back({id(row, col), id(row, col + 1), rng.next_in(1, p.max_cost),
                        rng.next_in(1, p.max_capacity)});
      }
      if (row + 1 < length) {
        arcs.push_back({id(row, col), id(row + 1, col), rng.next_in(1, p.max_cost),
                        rng.next_in(1, p.max_capacity)});
      }
    }
  }
  std::vector<std::int64_t> supplies(static_cast<std::size_t>(n), 0);
  supplies.front() = p.total_supply;
  supplies.back() = -p.total_supply;
  return Instance(static_cast<Vertex>(n), std::move(arcs), std::move(supplies));
}

Instance generate_goto(const GeneratorParams& p) {
  require(p.num_vertices >= 4, "need at least four vertices");
  require(p.max_cost >= 1 && p.max_capacity >= 1, "max cost/capacity must be positive");
  SplitMix64 rng(p.seed);

  // Grid-on-torus: ring arcs plus long-range arcs whose cost grows and whose
  // capacity shrinks with torus distance, the hard-instance trademark of this
  // family. Supply is set afterwards from the max-flow value so nearly every
  // instance is feasible.
  const std::int64_t width = std::max<std::int64_t>(2, rounded(std::sqrt(p.num_vertices)));
  const std::int64_t height = (p.num_vertices + width - 1) / width;
  const std::int64_t n = width * height;
  const auto id = [width](std::int64_t row, std::int64_t col) {
    return static_cast<Vertex>(row * width + col);
  };

  std::vector<Arc> arcs;
  for (std::int64_t row = 0; row < height; ++row) {
    for (std::int64_t col = 0; col < width; ++col) {
      const std::int64_t half = std::max<std::int64_t>(1, p.max_capacity / 2);
      arcs.push_back({id(row, col), id(row, (col + 1) % width), rng.next_in(1, p.max_cost),
                      rng.next_in(half, p.max_capacity)});
      arcs.push_back({id(row, col), id((row + 1) % height, col), rng.next_in(1, p.max_cost),
                      rng.next_in(half, p.max_capacity)});
    }
  }
  require(static_cast<std::int64_t>(arcs.size()) <= p.num_arcs,
          "arc budget below the torus ring size");

  const std::int64_t max_distance = width / 2 + height / 2;
  while (static_cast<std::int64_t>(arcs.size()) < p.num_arcs) {
    const Vertex tail = static_cast<Vertex>(rng.next_below(static_cast<std::uint64_t>(n)));
    Vertex head = static_cast<Vertex>(rng.next_below(static_cast<std::uint64_t>(n - 1)));
    if (head >= tail) ++head;
    const std::int64_t dr = std::abs(tail / width - head / width);
    const std::int64_t dc = std::abs(tail % width - head % width);
    const std::int64_t dist = std::min(dr, height - dr) + std::min(dc, width - dc);
    // Correlated draws: expensive arcs are thin, cheap arcs are wide.
    const std::int64_t cost_floor =
        1 + (p.max_cost - 1) * dist / std::max<std::int64_t>(1, max_distance);
    const std::int64_t cap_ceiling = std::max<std::int64_t>(
        1, p.max_capacity - (p.max_capacity - 1) * dist / std::max<std::int64_t>(1, max_distance));
    arcs.push_back({tail, head, rng.next_in(std::min(cost_floor, p.max_cost), p.max_cost),
                    rng.next_in(1, cap_ceiling)});
  }

  std::vector<std::int64_t> supplies(static_cast<std::size_t>(n), 0);
  Instance balanced(static_cast<Vertex>(n), std::move(arcs), supplies);

  const std::int64_t max_flow_value =
      detail::single_pair_max_flow(balanced, 0, static_cast<Vertex>(n - 1));
  const std::int64_t supply = max_flow_value == 0
                                  ? 0
                                  : std::max<std::int64_t>(1, 9 * max_flow_value / 10);
  std::vector<std::int64_t> final_supplies(static_cast<std::size_t>(n), 0);
  final_supplies.front() = supply;
  final_supplies.back() = -supply;
  return Instance(static_cast<Vertex>(n), balanced.arcs(), std::move(final_supplies));
}

}  // namespace

std::vector<GeneratorParams> parameter_grid(GeneratorId generator) {
  switch (generator) {
    case GeneratorId::Netgen: return netgen_like_grid(GeneratorId::Netgen);
    case GeneratorId::Gridgen: return netgen_like_grid(GeneratorId::Gridgen);
    case GeneratorId::Gridgraph: return gridgraph_grid();
    case GeneratorId::Goto: return goto_grid();
  }
  throw std::invalid_argument("unknown generator");
}

Instance generate(const GeneratorParams& params) {
  switch (params.generator) {
    case GeneratorId::Netgen: return generate_netgen(params);
    case GeneratorId::Gridgen: return generate_gridgen(params);
    case GeneratorId::Gridgraph: return generate_gridgraph(params);
    case GeneratorId::Goto: return generate_goto(params);
  }
  throw std::invalid_argument("unknown generator");
}

namespace {

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string param_signature(const GeneratorParams& p) {
  std::ostringstream out;
  out << generator_name(p.generator) << '|' << p.num_vertices << '|' << p.num_arcs << '|'
      << p.total_supply << '|' << p.num_supply_vertices << '|' << p.num_demand_vertices << '|'
      << p.max_cost << '|' << p.max_capacity << '|' << p.grid_width << '|' << p.grid_length
      << '|' << (p.two_way_arcs ? 1 : 0);
  return out.str();
}

}  // namespace

std::string manifest_header() {
  return "instance_id\tgenerator\tnum_vertices\tnum_arcs\ttotal_supply\tnum_supply_vertices\t"
         "num_demand_vertices\tmax_cost\tmax_capacity\tgrid_width\tgrid_length\ttwo_way_arcs\t"
         "seed";
}

std::string manifest_line(const CorpusEntry& entry) {
  const GeneratorParams& p = entry.params;
  std::ostringstream out;
  out << entry.instance_id << '\t' << generator_name(p.generator) << '\t' << p.num_vertices
      << '\t' << p.num_arcs << '\t' << p.total_supply << '\t' << p.num_supply_vertices << '\t'
      << p.num_demand_vertices << '\t' << p.max_cost << '\t' << p.max_capacity << '\t'
      << p.grid_width << '\t' << p.grid_length << '\t' << (p.two_way_arcs ? 1 : 0) << '\t'
      << p.seed;
  return out.str();
}

std::string instance_path(const std::string& corpus_dir, const std::string& instance_id) {
  return corpus_dir + "/" + instance_id + ".min";
}

std::vector<CorpusEntry> generate_corpus(const std::vector<GeneratorParams>& grid,
                                         int instances_per_combination, std::uint64_t seed,
                                         const std::string& corpus_dir) {
  if (instances_per_combination < 1) {
    throw std::invalid_argument("instances_per_combination must be at least 1");
  }
  namespace fs = std::filesystem;
  fs::create_directories(corpus_dir);

  const SplitMix64 master(seed);
  std::vector<CorpusEntry> entries;
  entries.reserve(grid.size() * static_cast<std::size_t>(instances_per_combination));
  for (std::size_t param_index = 0; param_index < grid.size(); ++param_index) {
    const std::string signature = param_signature(grid[param_index]);
    char hash_hex[17];
    std::snprintf(hash_hex, sizeof hash_hex, "%016llx",
                  static_cast<unsigned long long>(fnv1a(signature)));
    const std::string family = generator_name(grid[param_index].generator);
    fs::create_directories(fs::path(corpus_dir) / family);
    for (int replicate = 0; replicate < instances_per_combination; ++replicate) {
      CorpusEntry entry;
      entry.params = grid[param_index];
      entry.params.seed =
          master.split(param_index * 1000003ULL + static_cast<std::uint64_t>(replicate)).next();
      std::ostringstream id;
      id << family << "/" << std::setw(5) << std::setfill('0') << param_index << "-"
         << std::string(hash_hex).substr(0, 8) << "-" << replicate;
      entry.instance_id = id.str();
      const Instance instance = generate(entry.params);
      write_dimacs_file(instance, instance_path(corpus_dir, entry.instance_id));
      entries.push_back(std::move(entry));
    }
  }

  std::ofstream manifest(fs::path(corpus_dir) / "manifest.tsv", std::ios::binary);
  if (!manifest) throw std::runtime_error("cannot write manifest.tsv");
  manifest << manifest_header() << '\n';
  for (const CorpusEntry& entry : entries) manifest << manifest_line(entry) << '\n';
  return entries;
}

std::vector<CorpusEntry> read_manifest(const std::string& corpus_dir) {
  std::ifstream in(std::filesystem::path(corpus_dir) / "manifest.tsv");
  if (!in) throw std::runtime_error("cannot open manifest.tsv in " + corpus_dir);
  std::string line;
  if (!std::getline(in, line) || line != manifest_header()) {
    throw std::runtime_error("manifest.tsv has an unexpected header");
  }
  std::vector<CorpusEntry> entries;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    CorpusEntry entry;
    std::string field;
    auto next = [&row, &field, &line]() -> std::string {
      if (!std::getline(row, field, '\t')) {
        throw std::runtime_error("short manifest row: " + line);
      }
      return field;
    };
    entry.instance_id = next();
    const auto family = generator_from_name(next());
    if (!family) throw std::runtime_error("unknown generator in manifest row: " + line);
    entry.params.generator = *family;
    entry.params.num_vertices = std::stoll(next());
    entry.params.num_arcs = std::stoll(next());
    entry.params.total_supply = std::stoll(next());
    entry.params.num_supply_vertices = std::stoll(next());
    entry.params.num_demand_vertices = std::stoll(next());
    entry.params.max_cost = std::stoll(next());
    entry.params.max_capacity = std::stoll(next());
    entry.params.grid_width = std::stoll(next());
    entry.params.grid_length = std::stoll(next());
    entry.params.two_way_arcs = next() == "1";
    entry.params.seed = std::stoull(next());
    entries.push_back(std::move(entry));
  }
  return entries;
}

}  // namespace mcfsel
