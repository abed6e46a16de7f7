#ifndef MCFSEL_HARNESS_HPP
#define MCFSEL_HARNESS_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mcfsel/generators.hpp"
#include "mcfsel/learn.hpp"
#include "mcfsel/solvers.hpp"

namespace mcfsel {

enum class RunStatus : int { Optimal = 0, Infeasible = 1, Timeout = 2, Error = 3 };

std::string run_status_name(RunStatus status);
std::optional<RunStatus> run_status_from_name(const std::string& name);

struct TimingRecord {
  std::string instance_id;
  AlgorithmId algorithm = AlgorithmId::SCC;
  int repetitions = 0;
  std::vector<std::int64_t> durations_ns;  // one per completed repetition
  std::int64_t median_ns = 0;
  RunStatus status = RunStatus::Error;
  std::int64_t cost = 0;  // meaningful only when Optimal
};

struct WinnerLabel {
  std::string instance_id;
  AlgorithmId winner = AlgorithmId::SCC;
  std::int64_t margin_ns = 0;  // runner-up median minus winner median, >= 0
  std::string generator;       // from the corpus manifest; may be empty
};

using SolveFn = std::function<SolveResult(const Instance&, const SolveOptions&)>;

// Median of `repetitions` runs on the monotonic clock after one untimed
// warm-up; results must agree across repetitions. A run past timeout_ns (or a
// SolverTimeout from the cooperative deadline) yields Timeout; solver faults
// yield Error.
TimingRecord time_solver(const SolveFn& solve_fn, const Instance& instance, int repetitions,
                         std::int64_t timeout_ns);
TimingRecord time_solver(AlgorithmId algorithm, const Instance& instance, int repetitions,
                         std::int64_t timeout_ns);

struct LabelingOutcome {
  std::vector<WinnerLabel> labels;
  std::vector<std::string> excluded;  // infeasible / timed out / errored instances
};

// Requires all seven records per instance. Instances with any non-Optimal
// record are excluded; mixed feasibility or cost disagreement between
// solvers is a consistency failure and throws.
LabelingOutcome label_winners(const std::vector<TimingRecord>& records,
                              const std::map<std::string, std::string>& instance_generator = {});

struct DistributionTable {
  std::vector<std::string> groups;  // per-generator columns plus "all"
  // counts[group][algorithm]
  std::vector<std::array<std::int64_t, kNumAlgorithms>> counts;
  std::vector<std::int64_t> totals;

  double percentage(std::size_t group, AlgorithmId id) const;
  std::string to_csv() const;
};

DistributionTable winner_distribution(const std::vector<WinnerLabel>& labels);

// --- timing / experiment files ------------------------------------------------

std::string timings_to_csv(const std::vector<TimingRecord>& records);
std::vector<TimingRecord> timings_from_csv(const std::string& csv);
std::string labels_to_csv(const std::vector<WinnerLabel>& labels);
std::vector<WinnerLabel> labels_from_csv(const std::string& csv);

// --- evaluation -----------------------------------------------------------------

struct EvaluationRow {
  std::string family;             // model family or "baseline_single_best"
  std::string hyperparameters;    // "k=v ..." rendering
  double accuracy = 0;
  double baseline_accuracy = 0;
};

// Test accuracy per model plus the constant-prediction baseline (most
// frequent training label).
std::vector<EvaluationRow> evaluate(const std::vector<ModelArtifact>& models,
                                    const Dataset& train, const Dataset& test);
std::string evaluation_to_csv(const std::vector<EvaluationRow>& rows);

// --- experiment orchestration ------------------------------------------------------

struct TimeoutPolicy {
  std::int64_t floor_ns = 10'000'000'000;  // 10 s
  // timeout = max(floor, multiplier * median NS time in the instance's
  // vertex-count bucket)
  std::int64_t ns_multiplier = 100;
};

struct GeneratorConfig {
  GeneratorId generator = GeneratorId::Netgen;
  std::vector<GeneratorParams> grid;  // explicit parameter combinations
  int replicates = 2;
};

struct ExperimentConfig {
  std::string output_dir;
  std::uint64_t seed = 1;
  int repetitions = 3;
  TimeoutPolicy timeout;
  double test_fraction = 0.2;
  std::size_t cv_folds = 5;
  std::vector<ModelFamily> families = {ModelFamily::KNN, ModelFamily::DecisionTree,
                                       ModelFamily::RandomForest, ModelFamily::AdaBoost};
  std::vector<GeneratorConfig> generators;
  std::optional<std::string> manifest_corpus;  // reuse an existing corpus instead
  bool force_overwrite = false;
};

ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::string& path);

struct ExperimentSummary {
  std::string output_dir;
  std::size_t corpus_size = 0;
  std::size_t labeled = 0;
  std::size_t excluded = 0;
  std::vector<EvaluationRow> evaluation;
};

class StageError : public std::runtime_error {
 public:
  StageError(const std::string& stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(stage) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

// generate -> time -> label -> featurize -> split -> train -> evaluate.
// Stages write corpus/, timings.csv, labels.csv, features.csv, split.csv,
// model_<family>.json, training_report.csv and report.csv under output_dir;
// partial outputs stay on disk when a stage fails.
ExperimentSummary run_experiment(const ExperimentConfig& config,
                                 std::ostream* progress = nullptr);

}  // namespace mcfsel

#endif
