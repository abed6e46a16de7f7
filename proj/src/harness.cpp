#include "mcfsel/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "mcfsel/dimacs.hpp"
#include "mcfsel/features.hpp"
#include "mcfsel/rng.hpp"

namespace mcfsel {

namespace fs = std::filesystem;
using nlohmann::json;

std::string run_status_name(RunStatus status) {
  switch (status) {
    case RunStatus::Optimal: return "Optimal";
    case RunStatus::Infeasible: return "Infeasible";
    case RunStatus::Timeout: return "Timeout";
    case RunStatus::Error: return "Error";
  }
  return "?";
}

std::optional<RunStatus> run_status_from_name(const std::string& name) {
  for (RunStatus s :
       {RunStatus::Optimal, RunStatus::Infeasible, RunStatus::Timeout, RunStatus::Error}) {
    if (run_status_name(s) == name) return s;
  }
  return std::nullopt;
}

// --- timing ---------------------------------------------------------------------

namespace {

std::int64_t median_of(std::vector<std::int64_t> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return (values[n / 2 - 1] + values[n / 2]) / 2;
}

}  // namespace

TimingRecord time_solver(const SolveFn& solve_fn, const Instance& instance, int repetitions,
                         std::int64_t timeout_ns) {
  if (repetitions < 1) throw std::invalid_argument("repetitions must be at least 1");
  TimingRecord record;
  record.repetitions = repetitions;

  const auto run_once = [&](bool timed) -> std::optional<SolveResult> {
    SolveOptions options;
    options.deadline = std::chrono::steady_clock::now() + std::chrono::nanoseconds(timeout_ns);
    const auto start = std::chrono::steady_clock::now();
    SolveResult result;
    try {
      result = solve_fn(instance, options);
    } catch (const SolverTimeout&) {
      record.status = RunStatus::Timeout;
      return std::nullopt;
    } catch (const std::exception&) {
      record.status = RunStatus::Error;
      return std::nullopt;
    }
    const std::int64_t elapsed = std::chrono::duration_cast<std::chrono::nanoseconds>(
                                     std::chrono::steady_clock::now() - start)
                                     .count();
    if (elapsed > timeout_ns) {
      record.status = RunStatus::Timeout;
      return std::nullopt;
    }
    if (timed) record.durations_ns.push_back(elapsed);
    return result;
  };

  // untimed warm-up
  const auto warm = run_once(false);
  if (!warm) return record;

  for (int rep = 0; rep < repetitions; ++rep) {
    const auto result = run_once(true);
    if (!result) return record;
    // a deterministic solver must reproduce the warm-up result exactly
    const bool same_status =
        (result->status == warm->status) &&
        (result->status != SolveStatus::Optimal || result->cost == warm->cost);
    if (!same_status) {
      record.status = RunStatus::Error;
      return record;
    }
  }
  record.median_ns = median_of(record.durations_ns);
  record.status = warm->status == SolveStatus::Optimal ? RunStatus::Optimal : RunStatus::Infeasible;
  if (warm->status == SolveStatus::Optimal) record.cost = warm->cost;
  return record;
}

TimingRecord time_solver(AlgorithmId algorithm, const Instance& instance, int repetitions,
                         std::int64_t timeout_ns) {
  TimingRecord record = time_solver(
      [algorithm](const Instance& inst, const SolveOptions& options) {
        return solve(algorithm, inst, options);
      },
      instance, repetitions, timeout_ns);
  record.algorithm = algorithm;
  return record;
}

// --- labeling --------------------------------------------------------------------

LabelingOutcome label_winners(const std::vector<TimingRecord>& records,
                              const std::map<std::string, std::string>& instance_generator) {
  std::map<std::string, std::array<const TimingRecord*, kNumAlgorithms>> by_instance;
  for (const TimingRecord& record : records) {
    auto& slots = by_instance[record.instance_id];
    const std::size_t code = static_cast<std::size_t>(record.algorithm);
    if (slots[code] != nullptr) {
      throw std::invalid_argument("duplicate timing record for " + record.instance_id + "/" +
                                  algorithm_name(record.algorithm));
    }
    slots[code] = &record;
  }

  LabelingOutcome outcome;
  for (const auto& [instance_id, slots] : by_instance) {
    for (int a = 0; a < kNumAlgorithms; ++a) {
      if (slots[static_cast<std::size_t>(a)] == nullptr) {
        throw std::invalid_argument("missing timing record for " + instance_id + "/" +
                                    algorithm_name(static_cast<AlgorithmId>(a)));
      }
    }
    int optimal = 0, infeasible = 0;
    for (const TimingRecord* r : slots) {
      optimal += r->status == RunStatus::Optimal ? 1 : 0;
      infeasible += r->status == RunStatus::Infeasible ? 1 : 0;
    }
    if (infeasible > 0 && optimal > 0) {
      throw std::logic_error("solvers disagree on feasibility of " + instance_id);
    }
    if (optimal < kNumAlgorithms) {
      // infeasible instances are filtered here; timeouts/errors are excluded
      // conservatively as well
      outcome.excluded.push_back(instance_id);
      continue;
    }
    const std::int64_t cost = slots[0]->cost;
    for (const TimingRecord* r : slots) {
      if (r->cost != cost) {
        throw std::logic_error("solvers disagree on the optimal cost of " + instance_id);
      }
    }

    WinnerLabel label;
    label.instance_id = instance_id;
    std::int64_t best = slots[0]->median_ns, runner_up = -1;
    std::size_t best_code = 0;
    for (std::size_t a = 1; a < kNumAlgorithms; ++a) {
      if (slots[a]->median_ns < best) {
        runner_up = best;
        best = slots[a]->median_ns;
        best_code = a;
      } else if (runner_up < 0 || slots[a]->median_ns < runner_up) {
        runner_up = slots[a]->median_ns;
      }
    }
    label.winner = static_cast<AlgorithmId>(best_code);
    label.margin_ns = runner_up - best;
    const auto gen = instance_generator.find(instance_id);
    if (gen != instance_generator.end()) label.generator = gen->second;
    outcome.labels.push_back(std::move(label));
  }
  return outcome;
}

// --- winner distribution ------------------------------------------------------------

double DistributionTable::percentage(std::size_t group, AlgorithmId id) const {
  if (totals[group] == 0) return 0;
  return 100.0 * static_cast<double>(counts[group][static_cast<std::size_t>(id)]) /
         static_cast<double>(totals[group]);
}

std::string DistributionTable::to_csv() const {
  std::ostringstream out;
  out << "algorithm";
  for (const std::string& g : groups) out << "," << g << "_count," << g << "_pct";
  out << "\n";
  char buffer[32];
  for (int a = 0; a < kNumAlgorithms; ++a) {
    out << algorithm_name(static_cast<AlgorithmId>(a));
    for (std::size_t g = 0; g < groups.size(); ++g) {
      std::snprintf(buffer, sizeof buffer, "%.4f", percentage(g, static_cast<AlgorithmId>(a)));
      out << "," << counts[g][static_cast<std::size_t>(a)] << "," << buffer;
    }
    out << "\n";
  }
  out << "total";
  for (std::size_t g = 0; g < groups.size(); ++g) out << "," << totals[g] << ",100.0000";
  out << "\n";
  return out.str();
}

DistributionTable winner_distribution(const std::vector<WinnerLabel>& labels) {
  std::map<std::string, std::array<std::int64_t, kNumAlgorithms>> per_group;
  std::array<std::int64_t, kNumAlgorithms> overall{};
  for (const WinnerLabel& label : labels) {
    const std::string group = label.generator.empty() ? "unknown" : label.generator;
    auto [it, inserted] = per_group.try_emplace(group);
    if (inserted) it->second.fill(0);
    ++it->second[static_cast<std::size_t>(label.winner)];
    ++overall[static_cast<std::size_t>(label.winner)];
  }

  DistributionTable table;
  for (const auto& [group, counts] : per_group) {
    table.groups.push_back(group);
    table.counts.push_back(counts);
    table.totals.push_back(std::accumulate(counts.begin(), counts.end(), std::int64_t{0}));
  }
  table.groups.push_back("all");
  table.counts.push_back(overall);
  table.totals.push_back(std::accumulate(overall.begin(), overall.end(), std::int64_t{0}));
  return table;
}

// --- CSV files -----------------------------------------------------------------------

std::string timings_to_csv(const std::vector<TimingRecord>& records) {
  std::ostringstream out;
  out << "instance_id,algorithm,status,median_ns,cost,repetitions\n";
  for (const TimingRecord& r : records) {
    out << r.instance_id << "," << algorithm_name(r.algorithm) << "," << run_status_name(r.status)
        << "," << r.median_ns << ",";
    if (r.status == RunStatus::Optimal) out << r.cost;
    out << "," << r.repetitions << "\n";
  }
  return out.str();
}

std::vector<TimingRecord> timings_from_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty timings csv");
  std::vector<TimingRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string id, alg, status, median, cost, reps;
    std::getline(fields, id, ',');
    std::getline(fields, alg, ',');
    std::getline(fields, status, ',');
    std::getline(fields, median, ',');
    std::getline(fields, cost, ',');
    std::getline(fields, reps, ',');
    TimingRecord r;
    r.instance_id = id;
    const auto algorithm = algorithm_from_name(alg);
    const auto run_status = run_status_from_name(status);
    if (!algorithm || !run_status) throw std::runtime_error("bad timings row: " + line);
    r.algorithm = *algorithm;
    r.status = *run_status;
    r.median_ns = std::stoll(median);
    r.cost = cost.empty() ? 0 : std::stoll(cost);
    r.repetitions = reps.empty() ? 0 : std::stoi(reps);
    records.push_back(std::move(r));
  }
  return records;
}

std::string labels_to_csv(const std::vector<WinnerLabel>& labels) {
  std::ostringstream out;
  out << "instance_id,winner,margin_ns,generator\n";
  for (const WinnerLabel& l : labels) {
    out << l.instance_id << "," << algorithm_name(l.winner) << "," << l.margin_ns << ","
        << l.generator << "\n";
  }
  return out.str();
}

std::vector<WinnerLabel> labels_from_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty labels csv");
  std::vector<WinnerLabel> labels;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    WinnerLabel l;
    std::string winner, margin;
    std::getline(fields, l.instance_id, ',');
    std::getline(fields, winner, ',');
    std::getline(fields, margin, ',');
    std::getline(fields, l.generator, ',');
    const auto algorithm = algorithm_from_name(winner);
    if (!algorithm) throw std::runtime_error("bad labels row: " + line);
    l.winner = *algorithm;
    l.margin_ns = std::stoll(margin);
    labels.push_back(std::move(l));
  }
  return labels;
}

// --- evaluation ------------------------------------------------------------------------

namespace {

std::string render_hyperparameters(const std::map<std::string, std::string>& params) {
  std::string out;
  for (const auto& [k, v] : params) {
    if (!out.empty()) out += " ";
    out += k + "=" + v;
  }
  return out;
}

AlgorithmId most_frequent_label(const Dataset& data) {
  std::array<std::int64_t, kNumAlgorithms> counts{};
  for (const LabeledSample& s : data) ++counts[static_cast<std::size_t>(s.label)];
  std::size_t best = 0;
  for (std::size_t c = 1; c < kNumAlgorithms; ++c) {
    if (counts[c] > counts[best]) best = c;
  }
  return static_cast<AlgorithmId>(best);
}

}  // namespace

std::vector<EvaluationRow> evaluate(const std::vector<ModelArtifact>& models,
                                    const Dataset& train, const Dataset& test) {
  if (test.empty()) throw std::invalid_argument("evaluation needs a non-empty test set");
  std::vector<AlgorithmId> labels;
  labels.reserve(test.size());
  for (const LabeledSample& s : test) labels.push_back(s.label);

  const AlgorithmId baseline_label = most_frequent_label(train);
  const std::vector<AlgorithmId> baseline_predictions(test.size(), baseline_label);
  const double baseline = accuracy(baseline_predictions, labels);

  std::vector<EvaluationRow> rows;
  for (const ModelArtifact& model : models) {
    std::vector<AlgorithmId> predictions;
    predictions.reserve(test.size());
    for (const LabeledSample& s : test) predictions.push_back(predict(model, s.features));
    EvaluationRow row;
    row.family = family_name(model.family);
    row.hyperparameters = render_hyperparameters(model.hyperparameters);
    row.accuracy = accuracy(predictions, labels);
    row.baseline_accuracy = baseline;
    rows.push_back(std::move(row));
  }
  EvaluationRow baseline_row;
  baseline_row.family = "baseline_single_best";
  baseline_row.hyperparameters = "label=" + algorithm_name(baseline_label);
  baseline_row.accuracy = baseline;
  baseline_row.baseline_accuracy = baseline;
  rows.push_back(std::move(baseline_row));
  return rows;
}

std::string evaluation_to_csv(const std::vector<EvaluationRow>& rows) {
  std::ostringstream out;
  out << "family,hyperparameters,accuracy,baseline_accuracy\n";
  char buffer[64];
  for (const EvaluationRow& row : rows) {
    std::snprintf(buffer, sizeof buffer, "%.6f,%.6f", row.accuracy, row.baseline_accuracy);
    out << row.family << "," << row.hyperparameters << "," << buffer << "\n";
  }
  return out.str();
}

// --- experiment config ---------------------------------------------------------------------

namespace {

std::int64_t arcs_from_rule(const std::string& rule, std::int64_t n) {
  if (rule == "8n") return 8 * n;
  if (rule == "n^1.25") return std::llround(static_cast<double>(n) * std::pow(n, 0.25));
  if (rule == "n^1.5") return std::llround(static_cast<double>(n) * std::sqrt(n));
  throw std::invalid_argument("unknown arc rule: " + rule);
}

std::int64_t vertices_from_rule(const std::string& rule, std::int64_t n) {
  if (rule == "1") return 1;
  if (rule == "n^0.25") return std::llround(std::pow(n, 0.25));
  if (rule == "n^0.5") return std::llround(std::sqrt(n));
  throw std::invalid_argument("unknown supply-vertex rule: " + rule);
}

std::vector<GeneratorParams> expand_generator_config(const json& section, GeneratorId family) {
  std::vector<GeneratorParams> grid;
  if (section.value("full_grid", false)) {
    grid = parameter_grid(family);
    const std::int64_t max_vertices =
        section.value("max_vertices", std::int64_t{1024});
    std::erase_if(grid, [max_vertices](const GeneratorParams& p) {
      return p.num_vertices > max_vertices;
    });
    const std::size_t stride = section.value("stride", std::size_t{1});
    if (stride > 1) {
      std::vector<GeneratorParams> thinned;
      for (std::size_t i = 0; i < grid.size(); i += stride) thinned.push_back(grid[i]);
      grid = std::move(thinned);
    }
    return grid;
  }

  const auto supply_factors = section.value("supply_factors", std::vector<std::int64_t>{1});
  const auto max_costs = section.value("max_costs", std::vector<std::int64_t>{100});
  const auto max_caps = section.value("max_capacities", std::vector<std::int64_t>{100});

  if (family == GeneratorId::Gridgraph) {
    const auto widths = section.at("widths").get<std::vector<std::int64_t>>();
    const auto lengths = section.at("lengths").get<std::vector<std::int64_t>>();
    for (std::int64_t w : widths) {
      for (std::int64_t l : lengths) {
        for (std::int64_t sf : supply_factors) {
          for (std::int64_t cost : max_costs) {
            for (std::int64_t cap : max_caps) {
              GeneratorParams p;
              p.generator = family;
              p.grid_width = w;
              p.grid_length = l;
              p.num_vertices = w * l;
              p.total_supply = std::llround(static_cast<double>(sf) * std::sqrt(w * l));
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

  const auto vertex_counts = section.at("num_vertices").get<std::vector<std::int64_t>>();
  const auto arc_rules = section.value("arc_rules", std::vector<std::string>{"8n"});
  for (std::int64_t n : vertex_counts) {
    for (const std::string& rule : arc_rules) {
      const std::int64_t m = arcs_from_rule(rule, n);
      if (family == GeneratorId::Goto) {
        for (std::int64_t cost : max_costs) {
          for (std::int64_t cap : max_caps) {
            GeneratorParams p;
            p.generator = family;
            p.num_vertices = n;
            p.num_arcs = m;
            p.num_supply_vertices = 1;
            p.num_demand_vertices = 1;
            p.max_cost = cost;
            p.max_capacity = cap;
            grid.push_back(p);
          }
        }
        continue;
      }
      const auto sv_rules =
          section.value("supply_vertex_rules", std::vector<std::string>{"1"});
      for (std::int64_t sf : supply_factors) {
        for (const std::string& sv_rule : sv_rules) {
          for (std::int64_t cost : max_costs) {
            for (std::int64_t cap : max_caps) {
              GeneratorParams p;
              p.generator = family;
              p.num_vertices = n;
              p.num_arcs = m;
              p.total_supply = std::llround(static_cast<double>(sf) * std::sqrt(n));
              p.num_supply_vertices = vertices_from_rule(sv_rule, n);
              p.num_demand_vertices = p.num_supply_vertices;
              p.max_cost = cost;
              p.max_capacity = cap;
              if (family == GeneratorId::Gridgen) {
                const auto widths =
                    section.value("widths", std::vector<std::string>{"sqrt"});
                const auto modes =
                    section.value("arc_modes", std::vector<std::string>{"one_way", "two_way"});
                for (const std::string& width_rule : widths) {
                  for (const std::string& mode : modes) {
                    GeneratorParams q = p;
                    q.grid_width = width_rule == "sqrt_half"
                                       ? std::llround(std::sqrt(n / 2.0))
                                       : std::llround(std::sqrt(n));
                    q.two_way_arcs = mode == "two_way";
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

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
  }
  ExperimentConfig config;
  if (!doc.contains("output_dir")) {
    throw std::invalid_argument("config is missing output_dir");
  }
  config.output_dir = doc.at("output_dir").get<std::string>();
  config.seed = doc.value("seed", std::uint64_t{1});
  config.repetitions = doc.value("repetitions", 3);
  if (config.repetitions < 1) {
    throw std::invalid_argument("repetitions must be at least 1");
  }
  if (doc.contains("timeout")) {
    config.timeout.floor_ns = doc["timeout"].value("floor_ms", std::int64_t{10000}) * 1'000'000;
    config.timeout.ns_multiplier = doc["timeout"].value("ns_multiplier", std::int64_t{100});
  }
  config.test_fraction = doc.value("test_fraction", 0.2);
  config.cv_folds = doc.value("cv_folds", std::size_t{5});
  if (doc.contains("families")) {
    config.families.clear();
    for (const json& name : doc["families"]) {
      const auto family = family_from_name(name.get<std::string>());
      if (!family) throw std::invalid_argument("unknown classifier family: " + name.dump());
      config.families.push_back(*family);
    }
  }
  config.force_overwrite = doc.value("force", false);
  if (doc.contains("corpus_manifest")) {
    config.manifest_corpus = doc.at("corpus_manifest").get<std::string>();
  }
  if (doc.contains("generators")) {
    for (const json& section : doc["generators"]) {
      const auto family = generator_from_name(section.at("family").get<std::string>());
      if (!family) {
        throw std::invalid_argument("unknown generator family: " + section.dump());
      }
      GeneratorConfig gc;
      gc.generator = *family;
      gc.replicates = section.value("replicates", 2);
      if (gc.replicates < 1) throw std::invalid_argument("replicates must be at least 1");
      gc.grid = expand_generator_config(section, *family);
      config.generators.push_back(std::move(gc));
    }
  }
  if (!config.manifest_corpus && config.generators.empty()) {
    throw std::invalid_argument("config needs either generators or corpus_manifest");
  }
  return config;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_experiment_config(text);
}

// --- experiment ------------------------------------------------------------------------------

namespace {

std::uint64_t fnv1a_str(const std::string& text) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

int size_bucket(std::int64_t num_vertices) {
  int bucket = 0;
  while ((std::int64_t{1} << (bucket + 1)) < num_vertices) ++bucket;
  return bucket;
}

}  // namespace

ExperimentSummary run_experiment(const ExperimentConfig& config, std::ostream* progress) {
  const auto note = [progress](const std::string& message) {
    if (progress) (*progress) << message << "\n" << std::flush;
  };

  // -- validate
  if (config.output_dir.empty()) throw StageError("validate", "output_dir is empty");
  const fs::path out_dir(config.output_dir);
  if (fs::exists(out_dir) && !fs::is_empty(out_dir) && !config.force_overwrite) {
    throw StageError("validate",
                     "output directory exists and is not empty (use force to overwrite)");
  }
  fs::create_directories(out_dir);

  // -- generate
  std::string corpus_dir;
  std::vector<CorpusEntry> entries;
  try {
    if (config.manifest_corpus) {
      corpus_dir = *config.manifest_corpus;
      entries = read_manifest(corpus_dir);
    } else {
      corpus_dir = (out_dir / "corpus").string();
      fs::create_directories(corpus_dir);
      const SplitMix64 master(config.seed);
      for (const GeneratorConfig& gc : config.generators) {
        std::vector<CorpusEntry> family_entries;
        for (std::size_t param_index = 0; param_index < gc.grid.size(); ++param_index) {
          const GeneratorParams& base = gc.grid[param_index];
          std::ostringstream signature;
          signature << generator_name(base.generator) << '|' << base.num_vertices << '|'
                    << base.num_arcs << '|' << base.total_supply << '|'
                    << base.num_supply_vertices << '|' << base.max_cost << '|'
                    << base.max_capacity << '|' << base.grid_width << '|' << base.grid_length
                    << '|' << base.two_way_arcs;
          const std::uint64_t sig_hash = fnv1a_str(signature.str());
          char hash_hex[17];
          std::snprintf(hash_hex, sizeof hash_hex, "%016llx",
                        static_cast<unsigned long long>(sig_hash));
          fs::create_directories(fs::path(corpus_dir) / generator_name(base.generator));
          for (int replicate = 0; replicate < gc.replicates; ++replicate) {
            CorpusEntry entry;
            entry.params = base;
            entry.params.seed =
                master.split(sig_hash + static_cast<std::uint64_t>(replicate)).next();
            std::ostringstream id;
            id << generator_name(base.generator) << "/" << std::setw(5) << std::setfill('0')
               << param_index << "-" << std::string(hash_hex).substr(0, 8) << "-" << replicate;
            entry.instance_id = id.str();
            write_dimacs_file(generate(entry.params),
                              instance_path(corpus_dir, entry.instance_id));
            family_entries.push_back(std::move(entry));
          }
        }
        note("generate: " + generator_name(gc.generator) + " -> " +
             std::to_string(family_entries.size()) + " instances");
        entries.insert(entries.end(), family_entries.begin(), family_entries.end());
      }
      std::ostringstream manifest;
      manifest << manifest_header() << "\n";
      for (const CorpusEntry& entry : entries) manifest << manifest_line(entry) << "\n";
      write_text_file(fs::path(corpus_dir) / "manifest.tsv", manifest.str());
    }
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError("generate", e.what());
  }
  if (entries.empty()) throw StageError("generate", "corpus is empty");

  // -- time
  std::vector<TimingRecord> records;
  try {
    std::sort(entries.begin(), entries.end(),
              [](const CorpusEntry& a, const CorpusEntry& b) {
                return a.instance_id < b.instance_id;
              });
    std::ofstream timings_file(out_dir / "timings.csv", std::ios::binary);
    timings_file << "instance_id,algorithm,status,median_ns,cost,repetitions\n";
    const auto append_record = [&timings_file](const TimingRecord& r) {
      timings_file << r.instance_id << "," << algorithm_name(r.algorithm) << ","
                   << run_status_name(r.status) << "," << r.median_ns << ",";
      if (r.status == RunStatus::Optimal) timings_file << r.cost;
      timings_file << "," << r.repetitions << "\n" << std::flush;
    };

    // pass 1: network simplex everywhere, to calibrate per-bucket timeouts
    std::map<int, std::vector<std::int64_t>> ns_times;
    for (const CorpusEntry& entry : entries) {
      const Instance instance = read_dimacs_file(instance_path(corpus_dir, entry.instance_id));
      TimingRecord record = time_solver(AlgorithmId::NS, instance, config.repetitions,
                                        config.timeout.floor_ns);
      record.instance_id = entry.instance_id;
      if (record.status == RunStatus::Optimal || record.status == RunStatus::Infeasible) {
        ns_times[size_bucket(instance.num_vertices())].push_back(record.median_ns);
      }
      append_record(record);
      records.push_back(std::move(record));
    }
    note("time: NS pass complete (" + std::to_string(entries.size()) + " instances)");

    std::map<int, std::int64_t> bucket_timeout;
    for (auto& [bucket, times] : ns_times) {
      bucket_timeout[bucket] =
          std::max(config.timeout.floor_ns, config.timeout.ns_multiplier * median_of(times));
    }

    // pass 2: the remaining six algorithms
    std::size_t done = 0;
    for (const CorpusEntry& entry : entries) {
      const Instance instance = read_dimacs_file(instance_path(corpus_dir, entry.instance_id));
      const int bucket = size_bucket(instance.num_vertices());
      const std::int64_t timeout = bucket_timeout.count(bucket)
                                       ? bucket_timeout.at(bucket)
                                       : config.timeout.floor_ns;
      for (AlgorithmId id : all_algorithms()) {
        if (id == AlgorithmId::NS) continue;
        TimingRecord record = time_solver(id, instance, config.repetitions, timeout);
        record.instance_id = entry.instance_id;
        append_record(record);
        records.push_back(std::move(record));
      }
      if (++done % 500 == 0) {
        note("time: " + std::to_string(done) + "/" + std::to_string(entries.size()) +
             " instances");
      }
    }
  } catch (const std::exception& e) {
    throw StageError("time", e.what());
  }

  // -- label
  LabelingOutcome labeling;
  try {
    std::map<std::string, std::string> generators_by_id;
    for (const CorpusEntry& entry : entries) {
      generators_by_id[entry.instance_id] = generator_name(entry.params.generator);
    }
    labeling = label_winners(records, generators_by_id);
    write_text_file(out_dir / "labels.csv", labels_to_csv(labeling.labels));
    std::string excluded_text;
    for (const std::string& id : labeling.excluded) excluded_text += id + "\n";
    write_text_file(out_dir / "excluded.txt", excluded_text);
    write_text_file(out_dir / "winner_distribution.csv",
                    winner_distribution(labeling.labels).to_csv());
    note("label: " + std::to_string(labeling.labels.size()) + " labeled, " +
         std::to_string(labeling.excluded.size()) + " excluded");
  } catch (const std::exception& e) {
    throw StageError("label", e.what());
  }
  if (labeling.labels.empty()) throw StageError("label", "no feasible labeled instances");

  // -- featurize
  std::vector<std::pair<std::string, FeatureVector>> feature_rows;
  try {
    for (const WinnerLabel& label : labeling.labels) {
      const Instance instance = read_dimacs_file(instance_path(corpus_dir, label.instance_id));
      feature_rows.emplace_back(label.instance_id, extract_features(instance));
    }
    write_text_file(out_dir / "features.csv", write_feature_table(feature_rows));
  } catch (const std::exception& e) {
    throw StageError("featurize", e.what());
  }

  // -- split
  Dataset train, test;
  try {
    Dataset dataset;
    std::map<std::string, const WinnerLabel*> label_by_id;
    for (const WinnerLabel& label : labeling.labels) label_by_id[label.instance_id] = &label;
    std::map<std::string, std::array<std::int64_t, kNumAlgorithms>> timings_by_id;
    for (const TimingRecord& record : records) {
      timings_by_id[record.instance_id][static_cast<std::size_t>(record.algorithm)] =
          record.median_ns;
    }
    for (const auto& [id, features] : feature_rows) {
      LabeledSample sample;
      sample.instance_id = id;
      sample.features = features;
      sample.label = label_by_id.at(id)->winner;
      sample.timings_ns = timings_by_id.at(id);
      dataset.push_back(std::move(sample));
    }
    const auto [train_idx, test_idx] =
        train_test_split_indices(dataset.size(), config.test_fraction, config.seed);
    // index bookkeeping: the two sides must never overlap
    std::vector<char> seen(dataset.size(), 0);
    for (std::size_t i : train_idx) seen[i] = 1;
    for (std::size_t i : test_idx) {
      if (seen[i]) throw std::logic_error("train/test index overlap");
    }
    std::string split_csv = "instance_id,role\n";
    for (std::size_t i : train_idx) {
      split_csv += dataset[i].instance_id + ",train\n";
      train.push_back(dataset[i]);
    }
    for (std::size_t i : test_idx) {
      split_csv += dataset[i].instance_id + ",test\n";
      test.push_back(dataset[i]);
    }
    write_text_file(out_dir / "split.csv", split_csv);
    note("split: " + std::to_string(train.size()) + " train / " + std::to_string(test.size()) +
         " test");
  } catch (const std::exception& e) {
    throw StageError("split", e.what());
  }
  if (train.empty() || test.empty()) throw StageError("split", "degenerate train/test split");

  // -- train
  std::vector<ModelArtifact> models;
  try {
    std::ostringstream report;
    report << "family,cell,hyperparameters,fold_accuracies,mean_accuracy\n";
    for (ModelFamily family : config.families) {
      const HyperparameterGrid grid = default_grid(family);
      const std::uint64_t family_seed =
          SplitMix64(config.seed).split(1000 + static_cast<std::uint64_t>(family)).next();
      const GridSearchResult search =
          grid_search(train, family, grid, config.cv_folds, family_seed);
      for (const GridSearchCell& cell : search.cells) {
        report << family_name(family) << "," << cell.cell_index << ","
               << render_hyperparameters(cell.hyperparameters) << ",";
        for (std::size_t f = 0; f < cell.fold_accuracies.size(); ++f) {
          report << (f ? ";" : "") << cell.fold_accuracies[f];
        }
        report << "," << cell.mean_accuracy << "\n";
      }
      ModelArtifact model = fit(family, train, search.best_hyperparameters, family_seed);
      save_model(model, (out_dir / ("model_" + family_name(family) + ".json")).string());
      note("train: " + family_name(family) + " best " +
           render_hyperparameters(search.best_hyperparameters) + " (cv " +
           std::to_string(search.best_mean_accuracy) + ")");
      models.push_back(std::move(model));
    }
    write_text_file(out_dir / "training_report.csv", report.str());
  } catch (const std::exception& e) {
    throw StageError("train", e.what());
  }

  // -- evaluate
  ExperimentSummary summary;
  try {
    summary.evaluation = evaluate(models, train, test);
    write_text_file(out_dir / "report.csv", evaluation_to_csv(summary.evaluation));
  } catch (const std::exception& e) {
    throw StageError("evaluate", e.what());
  }

  summary.output_dir = config.output_dir;
  summary.corpus_size = entries.size();
  summary.labeled = labeling.labels.size();
  summary.excluded = labeling.excluded.size();
  return summary;
}

}  // namespace mcfsel
