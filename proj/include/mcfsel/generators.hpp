#ifndef MCFSEL_GENERATORS_HPP
#define MCFSEL_GENERATORS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mcfsel/instance.hpp"

namespace mcfsel {

enum class GeneratorId : int { Netgen = 0, Gridgen = 1, Gridgraph = 2, Goto = 3 };

std::string generator_name(GeneratorId id);
std::optional<GeneratorId> generator_from_name(const std::string& name);

// One parameter combination. Which fields apply depends on the family:
//   Netgen    n, m, supply, supply/demand vertex counts, max cost/capacity
//   Gridgen   the Netgen set plus grid_width and two_way_arcs
//   Gridgraph grid_width x grid_length (n implied), supply, max cost/capacity;
//             one supply and one demand vertex
//   Goto      n, m, max cost/capacity; supply chosen by the generator
struct GeneratorParams {
  GeneratorId generator = GeneratorId::Netgen;
  std::int64_t num_vertices = 0;
  std::int64_t num_arcs = 0;
  std::int64_t total_supply = 0;
  std::int64_t num_supply_vertices = 0;
  std::int64_t num_demand_vertices = 0;
  std::int64_t max_cost = 0;
  std::int64_t max_capacity = 0;
  std::int64_t grid_width = 0;
  std::int64_t grid_length = 0;
  bool two_way_arcs = false;
  std::uint64_t seed = 0;

  friend bool operator==(const GeneratorParams&, const GeneratorParams&) = default;
};

// The full parameter grid of each family (seeds unset):
//   Netgen    5 * 3 * 4 * 3 * 5 * 5 = 4500 combinations
//   Gridgen   Netgen x width{sqrt(n), sqrt(n/2)} x arc mode = 18000
//   Gridgraph 7 * 7 * 4 * 5 * 5 = 4900 (1225 before the supply values)
//   Goto      5 * 2 * 4 * 4 = 160
std::vector<GeneratorParams> parameter_grid(GeneratorId generator);

// Deterministic function of params (seed included). The instance may be
// infeasible; feasibility filtering happens after solving.
Instance generate(const GeneratorParams& params);

struct CorpusEntry {
  std::string instance_id;
  GeneratorParams params;
};

// Writes <dir>/<generator>/<param-hash>-<replicate>.min plus manifest.tsv.
// Instance seeds derive from (seed, parameter index, replicate), so the same
// call regenerates byte-identical files.
std::vector<CorpusEntry> generate_corpus(const std::vector<GeneratorParams>& grid,
                                         int instances_per_combination, std::uint64_t seed,
                                         const std::string& corpus_dir);

std::string manifest_header();
std::string manifest_line(const CorpusEntry& entry);
std::vector<CorpusEntry> read_manifest(const std::string& corpus_dir);

// <corpus_dir>/<instance_id>.min
std::string instance_path(const std::string& corpus_dir, const std::string& instance_id);

}  // namespace mcfsel

#endif
