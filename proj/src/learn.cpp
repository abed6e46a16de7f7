#include "mcfsel/learn.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "mcfsel/rng.hpp"

namespace mcfsel {

std::string family_name(ModelFamily family) {
  switch (family) {
    case ModelFamily::KNN: return "knn";
    case ModelFamily::DecisionTree: return "decision_tree";
    case ModelFamily::RandomForest: return "random_forest";
    case ModelFamily::AdaBoost: return "adaboost";
  }
  return "?";
}

std::optional<ModelFamily> family_from_name(const std::string& name) {
  for (ModelFamily f : {ModelFamily::KNN, ModelFamily::DecisionTree, ModelFamily::RandomForest,
                        ModelFamily::AdaBoost}) {
    if (family_name(f) == name) return f;
  }
  return std::nullopt;
}

std::size_t HyperparameterGrid::num_cells() const {
  std::size_t cells = 1;
  for (const auto& [name, values] : dimensions) cells *= values.size();
  return cells;
}

std::map<std::string, std::string> HyperparameterGrid::cell(std::size_t index) const {
  std::map<std::string, std::string> params;
  // row-major: first dimension outermost
  std::size_t stride = num_cells();
  for (const auto& [name, values] : dimensions) {
    stride /= values.size();
    params[name] = values[(index / stride) % values.size()];
  }
  return params;
}

HyperparameterGrid default_grid(ModelFamily family) {
  HyperparameterGrid grid;
  grid.family = family;
  switch (family) {
    case ModelFamily::KNN:
      grid.dimensions = {{"neighbors", {"8", "10", "20", "50", "70", "90"}},
                         {"weights", {"uniform", "distance"}}};
      break;
    case ModelFamily::DecisionTree:
      grid.dimensions = {{"max_depth", {"inf", "3", "5", "8"}},
                         {"criterion", {"gini", "entropy"}},
                         {"splitter", {"best", "random"}},
                         {"class_weight", {"none", "balanced"}}};
      break;
    case ModelFamily::RandomForest:
      grid.dimensions = {{"estimators", {"10", "50", "100", "200"}},
                         {"max_depth", {"inf", "3", "5", "8"}},
                         {"criterion", {"gini", "entropy"}},
                         {"class_weight", {"none", "balanced"}}};
      break;
    case ModelFamily::AdaBoost:
      grid.dimensions = {{"estimators", {"5", "7", "9", "11", "13", "50"}},
                         {"learning_rate", {"0.8", "0.85", "1", "1.15", "1.3"}}};
      break;
  }
  return grid;
}

// --- dataset mechanics -------------------------------------------------------

namespace {

std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> indices(n);
  std::iota(indices.begin(), indices.end(), 0);
  SplitMix64 rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    std::swap(indices[i - 1], indices[rng.next_below(i)]);
  }
  return indices;
}

}  // namespace

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> train_test_split_indices(
    std::size_t n, double test_fraction, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("cannot split an empty dataset");
  if (!(test_fraction > 0.0) || !(test_fraction < 1.0)) {
    throw std::invalid_argument("test_fraction must lie strictly between 0 and 1");
  }
  const auto indices = shuffled_indices(n, seed);
  const std::size_t test_size = static_cast<std::size_t>(
      std::llround(static_cast<double>(n) * test_fraction));
  std::vector<std::size_t> test(indices.begin(),
                                indices.begin() + static_cast<std::ptrdiff_t>(test_size));
  std::vector<std::size_t> train(indices.begin() + static_cast<std::ptrdiff_t>(test_size),
                                 indices.end());
  return {std::move(train), std::move(test)};
}

std::pair<Dataset, Dataset> train_test_split(const Dataset& dataset, double test_fraction,
                                             std::uint64_t seed) {
  const auto [train_idx, test_idx] =
      train_test_split_indices(dataset.size(), test_fraction, seed);
  Dataset train, test;
  train.reserve(train_idx.size());
  test.reserve(test_idx.size());
  for (std::size_t i : train_idx) train.push_back(dataset[i]);
  for (std::size_t i : test_idx) test.push_back(dataset[i]);
  return {std::move(train), std::move(test)};
}

std::vector<std::vector<std::size_t>> kfold_indices(std::size_t n, std::size_t k,
                                                    std::uint64_t seed) {
  if (k == 0 || k > n) throw std::invalid_argument("need 1 <= k <= n for k-fold indices");
  const auto indices = shuffled_indices(n, seed);
  std::vector<std::vector<std::size_t>> folds(k);
  const std::size_t base = n / k;
  const std::size_t extra = n % k;
  std::size_t cursor = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t size = base + (f < extra ? 1 : 0);
    folds[f].assign(indices.begin() + static_cast<std::ptrdiff_t>(cursor),
                    indices.begin() + static_cast<std::ptrdiff_t>(cursor + size));
    cursor += size;
  }
  return folds;
}

double accuracy(const std::vector<AlgorithmId>& predictions,
                const std::vector<AlgorithmId>& labels) {
  if (predictions.size() != labels.size()) {
    throw std::invalid_argument("prediction/label length mismatch");
  }
  if (predictions.empty()) throw std::invalid_argument("accuracy of an empty set is undefined");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (predictions[i] == labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(predictions.size());
}

std::uint64_t dataset_hash(const Dataset& dataset) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  const auto mix = [&hash](std::uint64_t value) {
    for (int byte = 0; byte < 8; ++byte) {
      hash ^= (value >> (8 * byte)) & 0xff;
      hash *= 0x100000001b3ULL;
    }
  };
  for (const LabeledSample& sample : dataset) {
    for (double f : sample.features) {
      std::uint64_t bits;
      static_assert(sizeof bits == sizeof f);
      std::memcpy(&bits, &f, sizeof bits);
      mix(bits);
    }
    mix(static_cast<std::uint64_t>(sample.label));
  }
  return hash;
}

// --- decision trees -----------------------------------------------------------

namespace {

constexpr int kNumClasses = kNumAlgorithms;
using ClassWeights = std::array<double, kNumClasses>;

double impurity(const ClassWeights& weights, double total, SplitCriterion criterion) {
  if (total <= 0) return 0;
  double value = criterion == SplitCriterion::Gini ? 1.0 : 0.0;
  for (double w : weights) {
    if (w <= 0) continue;
    const double p = w / total;
    if (criterion == SplitCriterion::Gini) {
      value -= p * p;
    } else {
      value -= p * std::log2(p);
    }
  }
  return value;
}

int argmax_class(const ClassWeights& weights) {
  int best = 0;
  for (int c = 1; c < kNumClasses; ++c) {
    if (weights[static_cast<std::size_t>(c)] > weights[static_cast<std::size_t>(best)]) best = c;
  }
  return best;
}

struct TreeFitter {
  const Dataset& data;
  const std::vector<double>& sample_weights;
  SplitCriterion criterion;
  Splitter splitter;
  int max_depth;           // kUnlimitedDepth for none
  int features_per_split;  // 0: consider all
  SplitMix64 rng;
  DecisionTreeModel tree;

  std::int32_t build(std::vector<std::size_t>& samples, int depth) {
    TreeNode node;
    double total = 0;
    for (std::size_t i : samples) {
      node.class_weights[static_cast<std::size_t>(data[i].label)] += sample_weights[i];
      total += sample_weights[i];
    }
    node.prediction = argmax_class(node.class_weights);

    const double node_impurity = impurity(node.class_weights, total, criterion);
    const bool depth_reached = max_depth != kUnlimitedDepth && depth >= max_depth;
    if (samples.size() < 2 || node_impurity <= 0 || depth_reached) {
      return push_leaf(node);
    }

    std::array<std::int32_t, kNumFeatures> candidates;
    int num_candidates = 0;
    if (features_per_split <= 0 || features_per_split >= kNumFeatures) {
      for (int f = 0; f < kNumFeatures; ++f) {
        candidates[static_cast<std::size_t>(num_candidates++)] = f;
      }
    } else {
      // sample features without replacement, then sort for a stable scan order
      std::array<std::int32_t, kNumFeatures> pool;
      for (int f = 0; f < kNumFeatures; ++f) pool[static_cast<std::size_t>(f)] = f;
      for (int i = 0; i < features_per_split; ++i) {
        const std::size_t j = static_cast<std::size_t>(i) +
                              rng.next_below(static_cast<std::uint64_t>(kNumFeatures - i));
        std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
        candidates[static_cast<std::size_t>(num_candidates++)] = pool[static_cast<std::size_t>(i)];
      }
      std::sort(candidates.begin(), candidates.begin() + num_candidates);
    }

    // Any valid split is acceptable, zero-gain ones included (both children
    // shrink the node, so recursion still terminates); this lets depth-2
    // trees solve XOR-style data the way CART does.
    int best_feature = -1;
    double best_threshold = 0;
    double best_child_impurity = std::numeric_limits<double>::infinity();
    for (int c = 0; c < num_candidates; ++c) {
      const int feature = candidates[static_cast<std::size_t>(c)];
      if (splitter == Splitter::Best) {
        scan_best_threshold(samples, feature, total, best_feature, best_threshold,
                            best_child_impurity);
      } else {
        try_random_threshold(samples, feature, total, best_feature, best_threshold,
                             best_child_impurity);
      }
    }
    if (best_feature < 0) return push_leaf(node);

    std::vector<std::size_t> left, right;
    for (std::size_t i : samples) {
      (data[i].features[static_cast<std::size_t>(best_feature)] <= best_threshold ? left : right)
          .push_back(i);
    }
    if (left.empty() || right.empty()) return push_leaf(node);

    node.feature = best_feature;
    node.threshold = best_threshold;
    samples.clear();
    samples.shrink_to_fit();
    const std::int32_t id = static_cast<std::int32_t>(tree.nodes.size());
    tree.nodes.push_back(node);
    const std::int32_t left_id = build(left, depth + 1);
    tree.nodes[static_cast<std::size_t>(id)].left = left_id;
    const std::int32_t right_id = build(right, depth + 1);
    tree.nodes[static_cast<std::size_t>(id)].right = right_id;
    return id;
  }

  std::int32_t push_leaf(TreeNode node) {
    node.feature = -1;
    tree.nodes.push_back(node);
    return static_cast<std::int32_t>(tree.nodes.size() - 1);
  }

  void scan_best_threshold(const std::vector<std::size_t>& samples, int feature, double total,
                           int& best_feature, double& best_threshold,
                           double& best_child_impurity) {
    std::vector<std::size_t> order(samples);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const double fa = data[a].features[static_cast<std::size_t>(feature)];
      const double fb = data[b].features[static_cast<std::size_t>(feature)];
      return fa != fb ? fa < fb : a < b;
    });
    ClassWeights left_weights{};
    ClassWeights right_weights{};
    double left_total = 0;
    double right_total = total;
    for (std::size_t i : samples) {
      right_weights[static_cast<std::size_t>(data[i].label)] += sample_weights[i];
    }
    for (std::size_t pos = 0; pos + 1 < order.size(); ++pos) {
      const std::size_t i = order[pos];
      const double w = sample_weights[i];
      left_weights[static_cast<std::size_t>(data[i].label)] += w;
      left_total += w;
      right_weights[static_cast<std::size_t>(data[i].label)] -= w;
      right_total -= w;
      const double value = data[i].features[static_cast<std::size_t>(feature)];
      const double next = data[order[pos + 1]].features[static_cast<std::size_t>(feature)];
      if (next <= value) continue;  // not at a boundary between distinct values
      const double child =
          (left_total * impurity(left_weights, left_total, criterion) +
           right_total * impurity(right_weights, right_total, criterion)) /
          total;
      if (child + 1e-12 < best_child_impurity) {
        best_child_impurity = child;
        best_feature = feature;
        best_threshold = value + (next - value) / 2;
      }
    }
  }

  void try_random_threshold(const std::vector<std::size_t>& samples, int feature, double total,
                            int& best_feature, double& best_threshold,
                            double& best_child_impurity) {
    double lo = data[samples.front()].features[static_cast<std::size_t>(feature)];
    double hi = lo;
    for (std::size_t i : samples) {
      lo = std::min(lo, data[i].features[static_cast<std::size_t>(feature)]);
      hi = std::max(hi, data[i].features[static_cast<std::size_t>(feature)]);
    }
    if (!(hi > lo)) return;
    // uniform draw in (lo, hi) from the top 53 bits
    const double unit =
        static_cast<double>(rng.next() >> 11) / static_cast<double>(std::uint64_t{1} << 53);
    const double threshold = lo + (hi - lo) * unit;
    ClassWeights left_weights{};
    ClassWeights right_weights{};
    double left_total = 0;
    double right_total = 0;
    for (std::size_t i : samples) {
      if (data[i].features[static_cast<std::size_t>(feature)] <= threshold) {
        left_weights[static_cast<std::size_t>(data[i].label)] += sample_weights[i];
        left_total += sample_weights[i];
      } else {
        right_weights[static_cast<std::size_t>(data[i].label)] += sample_weights[i];
        right_total += sample_weights[i];
      }
    }
    if (left_total <= 0 || right_total <= 0) return;
    const double child = (left_total * impurity(left_weights, left_total, criterion) +
                          right_total * impurity(right_weights, right_total, criterion)) /
                         total;
    if (child + 1e-12 < best_child_impurity) {
      best_child_impurity = child;
      best_feature = feature;
      best_threshold = threshold;
    }
  }
};

std::vector<double> class_balanced_weights(const Dataset& data) {
  std::array<double, kNumClasses> counts{};
  for (const LabeledSample& s : data) counts[static_cast<std::size_t>(s.label)] += 1;
  int present = 0;
  for (double c : counts) present += c > 0 ? 1 : 0;
  std::vector<double> weights(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    // n_samples / (n_classes * class_count)
    weights[i] = static_cast<double>(data.size()) /
                 (static_cast<double>(present) * counts[static_cast<std::size_t>(data[i].label)]);
  }
  return weights;
}

DecisionTreeModel fit_tree_weighted(const Dataset& train, const std::vector<double>& weights,
                                    SplitCriterion criterion, Splitter splitter, int max_depth,
                                    int features_per_split, SplitMix64 rng) {
  TreeFitter fitter{train, weights, criterion, splitter, max_depth, features_per_split, rng, {}};
  std::vector<std::size_t> all(train.size());
  std::iota(all.begin(), all.end(), 0);
  fitter.build(all, 0);
  return std::move(fitter.tree);
}

int parse_max_depth(const std::string& text) {
  return text == "inf" ? kUnlimitedDepth : std::stoi(text);
}

}  // namespace

AlgorithmId predict_tree(const DecisionTreeModel& tree, const FeatureVector& features) {
  std::int32_t node = 0;
  while (tree.nodes[static_cast<std::size_t>(node)].feature >= 0) {
    const TreeNode& n = tree.nodes[static_cast<std::size_t>(node)];
    node = features[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
  }
  return static_cast<AlgorithmId>(tree.nodes[static_cast<std::size_t>(node)].prediction);
}

ModelArtifact fit_decision_tree(const Dataset& train, SplitCriterion criterion,
                                Splitter splitter, int max_depth, bool balanced_class_weight,
                                std::uint64_t seed) {
  if (train.empty()) throw std::invalid_argument("cannot fit a tree on an empty dataset");
  ModelArtifact model;
  model.family = ModelFamily::DecisionTree;
  model.hyperparameters = {
      {"criterion", criterion == SplitCriterion::Gini ? "gini" : "entropy"},
      {"splitter", splitter == Splitter::Best ? "best" : "random"},
      {"max_depth", max_depth == kUnlimitedDepth ? "inf" : std::to_string(max_depth)},
      {"class_weight", balanced_class_weight ? "balanced" : "none"}};
  model.feature_names.assign(feature_names().begin(), feature_names().end());
  model.seed = seed;
  model.dataset_hash = dataset_hash(train);
  const std::vector<double> weights = balanced_class_weight
                                          ? class_balanced_weights(train)
                                          : std::vector<double>(train.size(), 1.0);
  model.trees.push_back(
      fit_tree_weighted(train, weights, criterion, splitter, max_depth, 0, SplitMix64(seed)));
  return model;
}

ModelArtifact fit_random_forest(const Dataset& train, int num_trees, SplitCriterion criterion,
                                int max_depth, bool balanced_class_weight, std::uint64_t seed) {
  if (train.empty()) throw std::invalid_argument("cannot fit a forest on an empty dataset");
  if (num_trees < 1) throw std::invalid_argument("forest needs at least one tree");
  ModelArtifact model;
  model.family = ModelFamily::RandomForest;
  model.hyperparameters = {
      {"estimators", std::to_string(num_trees)},
      {"criterion", criterion == SplitCriterion::Gini ? "gini" : "entropy"},
      {"max_depth", max_depth == kUnlimitedDepth ? "inf" : std::to_string(max_depth)},
      {"class_weight", balanced_class_weight ? "balanced" : "none"}};
  model.feature_names.assign(feature_names().begin(), feature_names().end());
  model.seed = seed;
  model.dataset_hash = dataset_hash(train);

  const std::vector<double> base_weights = balanced_class_weight
                                               ? class_balanced_weights(train)
                                               : std::vector<double>(train.size(), 1.0);
  const SplitMix64 master(seed);
  const int features_per_split = static_cast<int>(std::sqrt(static_cast<double>(kNumFeatures)));
  for (int t = 0; t < num_trees; ++t) {
    SplitMix64 tree_rng = master.split(static_cast<std::uint64_t>(t));
    // bootstrap draw expressed as multiplicity weights
    std::vector<double> weights(train.size(), 0.0);
    for (std::size_t draw = 0; draw < train.size(); ++draw) {
      weights[tree_rng.next_below(train.size())] += 1.0;
    }
    for (std::size_t i = 0; i < weights.size(); ++i) weights[i] *= base_weights[i];
    model.trees.push_back(fit_tree_weighted(train, weights, criterion, Splitter::Best, max_depth,
                                            features_per_split, tree_rng));
  }
  return model;
}

ModelArtifact fit_adaboost(const Dataset& train, int num_estimators, double learning_rate,
                           std::uint64_t seed) {
  if (train.empty()) throw std::invalid_argument("cannot boost on an empty dataset");
  if (num_estimators < 1) throw std::invalid_argument("need at least one estimator");
  std::array<bool, kNumClasses> present{};
  for (const LabeledSample& s : train) present[static_cast<std::size_t>(s.label)] = true;
  const int num_classes = static_cast<int>(std::count(present.begin(), present.end(), true));
  if (num_classes < 2) {
    throw std::invalid_argument("adaboost requires at least two classes in the training set");
  }

  ModelArtifact model;
  model.family = ModelFamily::AdaBoost;
  model.hyperparameters = {{"estimators", std::to_string(num_estimators)},
                           {"learning_rate", std::to_string(learning_rate)}};
  model.feature_names.assign(feature_names().begin(), feature_names().end());
  model.seed = seed;
  model.dataset_hash = dataset_hash(train);

  // SAMME over depth-1 stumps.
  std::vector<double> weights(train.size(), 1.0 / static_cast<double>(train.size()));
  const SplitMix64 master(seed);
  for (int round = 0; round < num_estimators; ++round) {
    DecisionTreeModel stump =
        fit_tree_weighted(train, weights, SplitCriterion::Gini, Splitter::Best, 1, 0,
                          master.split(static_cast<std::uint64_t>(round)));
    double error = 0;
    std::vector<char> wrong(train.size(), 0);
    for (std::size_t i = 0; i < train.size(); ++i) {
      if (predict_tree(stump, train[i].features) != train[i].label) {
        wrong[i] = 1;
        error += weights[i];
      }
    }
    if (error <= 0) {
      // a perfect stump dominates every weighted vote: keep it alone
      model.trees.clear();
      model.estimator_weights.clear();
      model.trees.push_back(std::move(stump));
      model.estimator_weights.push_back(1.0);
      break;
    }
    if (error >= 1.0 - 1.0 / static_cast<double>(num_classes)) {
      if (model.trees.empty()) {
        // keep something usable rather than an empty ensemble
        model.trees.push_back(std::move(stump));
        model.estimator_weights.push_back(1.0);
      }
      break;
    }
    const double alpha = learning_rate * (std::log((1.0 - error) / error) +
                                          std::log(static_cast<double>(num_classes) - 1.0));
    model.trees.push_back(std::move(stump));
    model.estimator_weights.push_back(alpha);

    double total = 0;
    for (std::size_t i = 0; i < train.size(); ++i) {
      if (wrong[i]) weights[i] *= std::exp(alpha);
      total += weights[i];
    }
    double check = 0;
    for (double& w : weights) {
      w /= total;
      check += w;
    }
    if (std::abs(check - 1.0) > 1e-12) {
      throw std::logic_error("adaboost sample weights drifted away from 1");
    }
  }
  return model;
}

// --- knn ------------------------------------------------------------------------

ModelArtifact fit_knn(const Dataset& train, int neighbors, KnnWeights weights) {
  if (train.empty()) throw std::invalid_argument("cannot fit knn on an empty dataset");
  if (neighbors < 1 || static_cast<std::size_t>(neighbors) > train.size()) {
    throw std::invalid_argument("neighbor count must lie in 1..|train|");
  }
  ModelArtifact model;
  model.family = ModelFamily::KNN;
  model.hyperparameters = {{"neighbors", std::to_string(neighbors)},
                           {"weights", weights == KnnWeights::Uniform ? "uniform" : "distance"}};
  model.feature_names.assign(feature_names().begin(), feature_names().end());
  model.dataset_hash = dataset_hash(train);

  KnnData& knn = model.knn;
  knn.neighbors = neighbors;
  knn.distance_weighted = weights == KnnWeights::Distance;

  // z-score scaler fit on train only; constant dimensions pass through
  for (int f = 0; f < kNumFeatures; ++f) {
    double mean = 0;
    for (const LabeledSample& s : train) mean += s.features[static_cast<std::size_t>(f)];
    mean /= static_cast<double>(train.size());
    double var = 0;
    for (const LabeledSample& s : train) {
      const double d = s.features[static_cast<std::size_t>(f)] - mean;
      var += d * d;
    }
    const double std_dev = std::sqrt(var / static_cast<double>(train.size()));
    knn.scaler_mean[static_cast<std::size_t>(f)] = mean;
    knn.scaler_std[static_cast<std::size_t>(f)] = std_dev > 0 ? std_dev : 1.0;
  }
  knn.points.reserve(train.size());
  knn.labels.reserve(train.size());
  for (const LabeledSample& s : train) {
    FeatureVector z;
    for (int f = 0; f < kNumFeatures; ++f) {
      z[static_cast<std::size_t>(f)] = (s.features[static_cast<std::size_t>(f)] -
                                        knn.scaler_mean[static_cast<std::size_t>(f)]) /
                                       knn.scaler_std[static_cast<std::size_t>(f)];
    }
    knn.points.push_back(z);
    knn.labels.push_back(static_cast<std::int32_t>(s.label));
  }
  return model;
}

namespace {

AlgorithmId predict_knn(const KnnData& knn, const FeatureVector& features) {
  FeatureVector z;
  for (int f = 0; f < kNumFeatures; ++f) {
    z[static_cast<std::size_t>(f)] = (features[static_cast<std::size_t>(f)] -
                                      knn.scaler_mean[static_cast<std::size_t>(f)]) /
                                     knn.scaler_std[static_cast<std::size_t>(f)];
  }
  std::vector<std::pair<double, std::size_t>> distances(knn.points.size());
  for (std::size_t i = 0; i < knn.points.size(); ++i) {
    double sq = 0;
    for (int f = 0; f < kNumFeatures; ++f) {
      const double d =
          knn.points[i][static_cast<std::size_t>(f)] - z[static_cast<std::size_t>(f)];
      sq += d * d;
    }
    distances[i] = {sq, i};
  }
  const std::size_t k = static_cast<std::size_t>(knn.neighbors);
  std::partial_sort(distances.begin(), distances.begin() + static_cast<std::ptrdiff_t>(k),
                    distances.end());

  std::array<double, kNumClasses> votes{};
  bool exact_match = false;
  for (std::size_t i = 0; i < k; ++i) {
    if (distances[i].first <= 0) exact_match = true;
  }
  for (std::size_t i = 0; i < k; ++i) {
    const auto& [sq, index] = distances[i];
    const int label = knn.labels[index];
    if (knn.distance_weighted) {
      if (exact_match) {
        // zero-distance neighbors dominate, mirroring 1/d -> infinity
        if (sq <= 0) votes[static_cast<std::size_t>(label)] += 1.0;
      } else {
        votes[static_cast<std::size_t>(label)] += 1.0 / std::sqrt(sq);
      }
    } else {
      votes[static_cast<std::size_t>(label)] += 1.0;
    }
  }
  int best = 0;
  for (int c = 1; c < kNumClasses; ++c) {
    if (votes[static_cast<std::size_t>(c)] > votes[static_cast<std::size_t>(best)]) best = c;
  }
  return static_cast<AlgorithmId>(best);
}

}  // namespace

// --- prediction / fitting dispatch ------------------------------------------------

AlgorithmId predict(const ModelArtifact& model, const FeatureVector& features) {
  switch (model.family) {
    case ModelFamily::KNN:
      return predict_knn(model.knn, features);
    case ModelFamily::DecisionTree:
      return predict_tree(model.trees.front(), features);
    case ModelFamily::RandomForest: {
      std::array<int, kNumClasses> votes{};
      for (const DecisionTreeModel& tree : model.trees) {
        ++votes[static_cast<std::size_t>(predict_tree(tree, features))];
      }
      int best = 0;
      for (int c = 1; c < kNumClasses; ++c) {
        if (votes[static_cast<std::size_t>(c)] > votes[static_cast<std::size_t>(best)]) best = c;
      }
      return static_cast<AlgorithmId>(best);
    }
    case ModelFamily::AdaBoost: {
      std::array<double, kNumClasses> votes{};
      for (std::size_t t = 0; t < model.trees.size(); ++t) {
        votes[static_cast<std::size_t>(predict_tree(model.trees[t], features))] +=
            model.estimator_weights[t];
      }
      int best = 0;
      for (int c = 1; c < kNumClasses; ++c) {
        if (votes[static_cast<std::size_t>(c)] > votes[static_cast<std::size_t>(best)]) best = c;
      }
      return static_cast<AlgorithmId>(best);
    }
  }
  throw std::invalid_argument("unknown model family");
}

ModelArtifact fit(ModelFamily family, const Dataset& train,
                  const std::map<std::string, std::string>& hyperparameters,
                  std::uint64_t seed) {
  const auto get = [&hyperparameters](const std::string& name) {
    const auto it = hyperparameters.find(name);
    if (it == hyperparameters.end()) {
      throw std::invalid_argument("missing hyperparameter: " + name);
    }
    return it->second;
  };
  switch (family) {
    case ModelFamily::KNN:
      return fit_knn(train, std::stoi(get("neighbors")),
                     get("weights") == "distance" ? KnnWeights::Distance : KnnWeights::Uniform);
    case ModelFamily::DecisionTree:
      return fit_decision_tree(
          train, get("criterion") == "gini" ? SplitCriterion::Gini : SplitCriterion::Entropy,
          get("splitter") == "best" ? Splitter::Best : Splitter::Random,
          parse_max_depth(get("max_depth")), get("class_weight") == "balanced", seed);
    case ModelFamily::RandomForest:
      return fit_random_forest(
          train, std::stoi(get("estimators")),
          get("criterion") == "gini" ? SplitCriterion::Gini : SplitCriterion::Entropy,
          parse_max_depth(get("max_depth")), get("class_weight") == "balanced", seed);
    case ModelFamily::AdaBoost:
      return fit_adaboost(train, std::stoi(get("estimators")), std::stod(get("learning_rate")),
                          seed);
  }
  throw std::invalid_argument("unknown model family");
}

GridSearchResult grid_search(const Dataset& train, ModelFamily family,
                             const HyperparameterGrid& grid, std::size_t k, std::uint64_t seed) {
  if (train.size() < k || k == 0) {
    throw std::invalid_argument("grid search needs at least k samples");
  }
  const auto folds = kfold_indices(train.size(), k, seed);
  std::vector<char> in_fold(train.size(), 0);

  GridSearchResult result;
  const SplitMix64 master(seed);
  for (std::size_t cell = 0; cell < grid.num_cells(); ++cell) {
    GridSearchCell record;
    record.cell_index = cell;
    record.hyperparameters = grid.cell(cell);
    for (std::size_t f = 0; f < folds.size(); ++f) {
      std::fill(in_fold.begin(), in_fold.end(), 0);
      for (std::size_t i : folds[f]) in_fold[i] = 1;
      Dataset fit_set;
      fit_set.reserve(train.size() - folds[f].size());
      for (std::size_t i = 0; i < train.size(); ++i) {
        if (!in_fold[i]) fit_set.push_back(train[i]);
      }
      const ModelArtifact model =
          fit(family, fit_set, record.hyperparameters, master.split(cell * 101 + f).next());
      std::vector<AlgorithmId> predictions, labels;
      predictions.reserve(folds[f].size());
      labels.reserve(folds[f].size());
      for (std::size_t i : folds[f]) {
        predictions.push_back(predict(model, train[i].features));
        labels.push_back(train[i].label);
      }
      record.fold_accuracies.push_back(accuracy(predictions, labels));
    }
    record.mean_accuracy =
        std::accumulate(record.fold_accuracies.begin(), record.fold_accuracies.end(), 0.0) /
        static_cast<double>(record.fold_accuracies.size());
    result.cells.push_back(record);
    if (result.cells.size() == 1 || record.mean_accuracy > result.best_mean_accuracy) {
      result.best_mean_accuracy = record.mean_accuracy;
      result.best_cell = cell;
      result.best_hyperparameters = record.hyperparameters;
    }
  }
  return result;
}

// --- serialization ------------------------------------------------------------------

namespace {

using nlohmann::json;

json tree_to_json(const DecisionTreeModel& tree) {
  json nodes = json::array();
  for (const TreeNode& n : tree.nodes) {
    nodes.push_back({{"feature", n.feature},
                     {"threshold", n.threshold},
                     {"left", n.left},
                     {"right", n.right},
                     {"class_weights", n.class_weights},
                     {"prediction", n.prediction}});
  }
  return nodes;
}

DecisionTreeModel tree_from_json(const json& nodes) {
  DecisionTreeModel tree;
  for (const json& n : nodes) {
    TreeNode node;
    node.feature = n.at("feature").get<std::int32_t>();
    node.threshold = n.at("threshold").get<double>();
    node.left = n.at("left").get<std::int32_t>();
    node.right = n.at("right").get<std::int32_t>();
    const auto weights = n.at("class_weights").get<std::vector<double>>();
    std::copy(weights.begin(), weights.end(), node.class_weights.begin());
    node.prediction = n.at("prediction").get<std::int32_t>();
    tree.nodes.push_back(node);
  }
  return tree;
}

}  // namespace

std::string serialize_model(const ModelArtifact& model) {
  json doc;
  doc["format"] = "mcfsel-model";
  doc["version"] = model.version;
  doc["family"] = family_name(model.family);
  doc["hyperparameters"] = model.hyperparameters;
  doc["feature_names"] = model.feature_names;
  doc["seed"] = model.seed;
  doc["dataset_hash"] = model.dataset_hash;
  switch (model.family) {
    case ModelFamily::KNN: {
      json knn;
      knn["neighbors"] = model.knn.neighbors;
      knn["distance_weighted"] = model.knn.distance_weighted;
      knn["scaler_mean"] = model.knn.scaler_mean;
      knn["scaler_std"] = model.knn.scaler_std;
      knn["labels"] = model.knn.labels;
      json points = json::array();
      for (const FeatureVector& p : model.knn.points) points.push_back(p);
      knn["points"] = std::move(points);
      doc["knn"] = std::move(knn);
      break;
    }
    case ModelFamily::DecisionTree:
    case ModelFamily::RandomForest: {
      json trees = json::array();
      for (const DecisionTreeModel& t : model.trees) trees.push_back(tree_to_json(t));
      doc["trees"] = std::move(trees);
      break;
    }
    case ModelFamily::AdaBoost: {
      json trees = json::array();
      for (const DecisionTreeModel& t : model.trees) trees.push_back(tree_to_json(t));
      doc["trees"] = std::move(trees);
      doc["estimator_weights"] = model.estimator_weights;
      break;
    }
  }
  return doc.dump(1);
}

ModelArtifact deserialize_model(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("model artifact is not valid JSON: ") + e.what());
  }
  if (doc.value("format", "") != "mcfsel-model") {
    throw std::runtime_error("not a model artifact (missing format marker)");
  }
  if (doc.value("version", -1) != 1) {
    throw std::runtime_error("unsupported model artifact version");
  }
  ModelArtifact model;
  model.version = 1;
  const auto family = family_from_name(doc.at("family").get<std::string>());
  if (!family) throw std::runtime_error("unknown model family in artifact");
  model.family = *family;
  model.hyperparameters = doc.at("hyperparameters").get<std::map<std::string, std::string>>();
  model.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
  model.seed = doc.at("seed").get<std::uint64_t>();
  model.dataset_hash = doc.at("dataset_hash").get<std::uint64_t>();
  switch (model.family) {
    case ModelFamily::KNN: {
      const json& knn = doc.at("knn");
      model.knn.neighbors = knn.at("neighbors").get<int>();
      model.knn.distance_weighted = knn.at("distance_weighted").get<bool>();
      const auto mean = knn.at("scaler_mean").get<std::vector<double>>();
      const auto std_dev = knn.at("scaler_std").get<std::vector<double>>();
      std::copy(mean.begin(), mean.end(), model.knn.scaler_mean.begin());
      std::copy(std_dev.begin(), std_dev.end(), model.knn.scaler_std.begin());
      model.knn.labels = knn.at("labels").get<std::vector<std::int32_t>>();
      for (const json& p : knn.at("points")) {
        FeatureVector v;
        const auto values = p.get<std::vector<double>>();
        std::copy(values.begin(), values.end(), v.begin());
        model.knn.points.push_back(v);
      }
      break;
    }
    case ModelFamily::DecisionTree:
    case ModelFamily::RandomForest:
      for (const json& t : doc.at("trees")) model.trees.push_back(tree_from_json(t));
      break;
    case ModelFamily::AdaBoost:
      for (const json& t : doc.at("trees")) model.trees.push_back(tree_from_json(t));
      model.estimator_weights = doc.at("estimator_weights").get<std::vector<double>>();
      break;
  }
  return model;
}

void save_model(const ModelArtifact& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << serialize_model(model);
}

ModelArtifact load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_model(text);
}

}  // namespace mcfsel
