#ifndef MCFSEL_FEATURES_HPP
#define MCFSEL_FEATURES_HPP

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "mcfsel/instance.hpp"

namespace mcfsel {

inline constexpr int kNumFeatures = 21;

// Fixed feature order; the CSV header and the models reference features by
// these indices and names.
enum Feature : int {
  kNumVerticesF = 0,
  kNumArcsF = 1,
  kCostMax = 2,
  kCostMin = 3,
  kCostMeanNorm = 4,   // mean / cost_max
  kCostSum = 5,
  kCostStdNorm = 6,    // population std / cost_max
  kCapMax = 7,
  kCapMin = 8,
  kCapMeanNorm = 9,
  kCapSum = 10,
  kCapStdNorm = 11,
  kTotalSupply = 12,
  kNumSupplyDemandVertices = 13,
  kSourceSinkDistance = 14,
  kMstCostMeanNorm = 15,
  kMstCostSum = 16,
  kMstCostStdNorm = 17,
  kMstCapMeanNorm = 18,
  kMstCapSum = 19,
  kMstCapStdNorm = 20,
};

using FeatureVector = std::array<double, kNumFeatures>;

const std::array<std::string, kNumFeatures>& feature_names();

// All 21 features; requires at least one arc. Instances without any source or
// sink vertex get the unreachable sentinel (n) as their distance feature.
FeatureVector extract_features(const Instance& instance);

// BFS hop count over directed arcs from the lowest-index source to the
// lowest-index sink; n when unreachable. Throws if there is no source or no
// sink.
std::int64_t source_sink_distance(const Instance& instance);

struct MstFeatures {
  double cost_mean_norm = 0;
  double cost_sum = 0;
  double cost_std_norm = 0;
  double cap_mean_norm = 0;
  double cap_sum = 0;
  double cap_std_norm = 0;
  // > 1 when the undirected support graph is disconnected and the values
  // describe a spanning forest instead.
  int components = 1;
};

// Minimum spanning tree of the undirected support graph, weighted by arc
// cost; parallel arcs collapse to the cheapest (lowest index on ties).
MstFeatures mst_features(const Instance& instance);

// CSV with a fixed 22-column header (id + 21 features), 12 significant
// digits for the feature values.
std::string write_feature_table(
    const std::vector<std::pair<std::string, FeatureVector>>& rows);
std::vector<std::pair<std::string, FeatureVector>> read_feature_table(const std::string& csv);

}  // namespace mcfsel

#endif
