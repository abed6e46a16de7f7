#ifndef MCFSEL_LEARN_HPP
#define MCFSEL_LEARN_HPP

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mcfsel/features.hpp"
#include "mcfsel/solvers.hpp"

namespace mcfsel {

struct LabeledSample {
  std::string instance_id;
  FeatureVector features{};
  AlgorithmId label = AlgorithmId::SCC;
  // median ns per algorithm, carried for reporting
  std::optional<std::array<std::int64_t, kNumAlgorithms>> timings_ns;
};

using Dataset = std::vector<LabeledSample>;

enum class ModelFamily : int { KNN = 0, DecisionTree = 1, RandomForest = 2, AdaBoost = 3 };

std::string family_name(ModelFamily family);
std::optional<ModelFamily> family_from_name(const std::string& name);

// Ordered hyperparameter dimensions; grid cells enumerate row-major with the
// first dimension outermost, and all tie-breaking follows that order.
struct HyperparameterGrid {
  ModelFamily family = ModelFamily::KNN;
  std::vector<std::pair<std::string, std::vector<std::string>>> dimensions;

  std::size_t num_cells() const;
  std::map<std::string, std::string> cell(std::size_t index) const;
};

// The grids searched for each family (kNN 12 cells, tree 32, forest 64,
// AdaBoost 30).
HyperparameterGrid default_grid(ModelFamily family);

// --- models ------------------------------------------------------------------

struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  double threshold = 0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::array<double, kNumAlgorithms> class_weights{};
  std::int32_t prediction = 0;
};

struct DecisionTreeModel {
  std::vector<TreeNode> nodes;  // node 0 is the root
};

struct KnnData {
  int neighbors = 1;
  bool distance_weighted = false;
  FeatureVector scaler_mean{};
  FeatureVector scaler_std{};
  std::vector<FeatureVector> points;  // standardized training features
  std::vector<std::int32_t> labels;
};

struct ModelArtifact {
  int version = 1;
  ModelFamily family = ModelFamily::KNN;
  std::map<std::string, std::string> hyperparameters;
  std::vector<std::string> feature_names;
  std::uint64_t seed = 0;
  std::uint64_t dataset_hash = 0;

  KnnData knn;                             // KNN only
  std::vector<DecisionTreeModel> trees;    // tree: 1, forest/adaboost: many
  std::vector<double> estimator_weights;   // AdaBoost only
};

// --- dataset mechanics --------------------------------------------------------

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> train_test_split_indices(
    std::size_t n, double test_fraction, std::uint64_t seed);
std::pair<Dataset, Dataset> train_test_split(const Dataset& dataset, double test_fraction,
                                             std::uint64_t seed);

// k disjoint validation index sets partitioning 0..n-1, sizes within 1.
std::vector<std::vector<std::size_t>> kfold_indices(std::size_t n, std::size_t k,
                                                    std::uint64_t seed);

double accuracy(const std::vector<AlgorithmId>& predictions,
                const std::vector<AlgorithmId>& labels);

std::uint64_t dataset_hash(const Dataset& dataset);

// --- training ------------------------------------------------------------------

enum class KnnWeights { Uniform, Distance };
enum class SplitCriterion { Gini, Entropy };
enum class Splitter { Best, Random };

inline constexpr int kUnlimitedDepth = -1;

ModelArtifact fit_knn(const Dataset& train, int neighbors, KnnWeights weights);
ModelArtifact fit_decision_tree(const Dataset& train, SplitCriterion criterion,
                                Splitter splitter, int max_depth, bool balanced_class_weight,
                                std::uint64_t seed);
ModelArtifact fit_random_forest(const Dataset& train, int num_trees, SplitCriterion criterion,
                                int max_depth, bool balanced_class_weight, std::uint64_t seed);
ModelArtifact fit_adaboost(const Dataset& train, int num_estimators, double learning_rate,
                           std::uint64_t seed);

// Hyperparameters by name, as they appear in grids and artifacts.
ModelArtifact fit(ModelFamily family, const Dataset& train,
                  const std::map<std::string, std::string>& hyperparameters,
                  std::uint64_t seed);

AlgorithmId predict(const ModelArtifact& model, const FeatureVector& features);
AlgorithmId predict_tree(const DecisionTreeModel& tree, const FeatureVector& features);

struct GridSearchCell {
  std::size_t cell_index = 0;
  std::map<std::string, std::string> hyperparameters;
  std::vector<double> fold_accuracies;
  double mean_accuracy = 0;
};

struct GridSearchResult {
  std::map<std::string, std::string> best_hyperparameters;
  std::size_t best_cell = 0;
  double best_mean_accuracy = 0;
  std::vector<GridSearchCell> cells;
};

// Exhaustive k-fold cross-validated search over the grid; the winner is the
// first cell attaining the maximal mean validation accuracy.
GridSearchResult grid_search(const Dataset& train, ModelFamily family,
                             const HyperparameterGrid& grid, std::size_t k, std::uint64_t seed);

// --- serialization ---------------------------------------------------------------

std::string serialize_model(const ModelArtifact& model);
ModelArtifact deserialize_model(const std::string& text);
void save_model(const ModelArtifact& model, const std::string& path);
ModelArtifact load_model(const std::string& path);

}  // namespace mcfsel

#endif
