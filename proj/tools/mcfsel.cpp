// Command-line front end over the library: generate corpora, solve and time
// instances, build features/labels, train and evaluate selectors, and run the
// whole experiment pipeline from a config file.
//
// Exit codes: 0 success, 1 user error (bad input/arguments), 2 internal or
// consistency error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "mcfsel/dimacs.hpp"
#include "mcfsel/features.hpp"
#include "mcfsel/generators.hpp"
#include "mcfsel/harness.hpp"
#include "mcfsel/learn.hpp"
#include "mcfsel/rng.hpp"
#include "mcfsel/solvers.hpp"

namespace {

using namespace mcfsel;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitUserError = 1;
constexpr int kExitInternalError = 2;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CLI::ValidationError("cannot open " + path);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

Instance load_instance(const std::string& path) {
  if (!fs::exists(path)) throw CLI::ValidationError("cannot open " + path);
  try {
    return read_dimacs_file(path);
  } catch (const ParseError& e) {
    throw CLI::ValidationError(path + ": " + e.what());
  }
}

AlgorithmId parse_algorithm(const std::string& name) {
  const auto id = algorithm_from_name(name);
  if (!id) throw CLI::ValidationError("unknown algorithm '" + name + "' (SCC..CS2)");
  return *id;
}

// Join features.csv + labels.csv (+ optional split role filter) into samples.
Dataset join_dataset(const std::string& features_path, const std::string& labels_path,
                     const std::string& split_path, const std::string& role) {
  const auto features = read_feature_table(slurp(features_path));
  const auto labels = labels_from_csv(slurp(labels_path));
  std::map<std::string, AlgorithmId> label_by_id;
  for (const WinnerLabel& l : labels) label_by_id[l.instance_id] = l.winner;

  std::map<std::string, std::string> role_by_id;
  if (!split_path.empty()) {
    std::istringstream in(slurp(split_path));
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto comma = line.find(',');
      if (comma == std::string::npos) throw std::runtime_error("bad split row: " + line);
      role_by_id[line.substr(0, comma)] = line.substr(comma + 1);
    }
  }

  Dataset dataset;
  for (const auto& [id, vector] : features) {
    const auto label = label_by_id.find(id);
    if (label == label_by_id.end()) continue;
    if (!split_path.empty()) {
      const auto r = role_by_id.find(id);
      if (r == role_by_id.end() || r->second != role) continue;
    }
    LabeledSample sample;
    sample.instance_id = id;
    sample.features = vector;
    sample.label = label->second;
    dataset.push_back(std::move(sample));
  }
  return dataset;
}

void print_solve_result(const std::string& prefix, const SolveResult& result, bool pretty) {
  if (pretty) {
    std::cout << prefix << (result.status == SolveStatus::Optimal
                                ? "optimal, cost " + std::to_string(result.cost)
                                : "infeasible")
              << " (" << result.iterations << " iterations)\n";
    return;
  }
  std::cout << prefix << "status="
            << (result.status == SolveStatus::Optimal ? "Optimal" : "Infeasible");
  if (result.status == SolveStatus::Optimal) std::cout << " cost=" << result.cost;
  std::cout << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"minimum-cost-flow solver portfolio with learned algorithm selection"};
  app.require_subcommand(1);

  // --- generate ---------------------------------------------------------------
  auto* cmd_generate = app.add_subcommand("generate", "generate a DIMACS corpus from a config");
  std::string gen_config, gen_out;
  std::uint64_t gen_seed = 1;
  cmd_generate->add_option("config", gen_config, "experiment config with a generators section")
      ->required();
  cmd_generate->add_option("--out", gen_out, "corpus directory")->required();
  cmd_generate->add_option("--seed", gen_seed, "master seed (default 1)");

  // --- solve ------------------------------------------------------------------
  auto* cmd_solve = app.add_subcommand("solve", "solve one instance");
  std::string solve_path, solve_algorithm = "all";
  bool solve_certify = false, solve_pretty = false;
  cmd_solve->add_option("instance", solve_path, "DIMACS min file")->required();
  cmd_solve->add_option("--algorithm", solve_algorithm, "SCC|MMCC|CAT|SSP|CAS|NS|CS2|all");
  cmd_solve->add_flag("--certify", solve_certify, "verify optimality of the returned flow");
  cmd_solve->add_flag("--pretty", solve_pretty, "human-readable output");

  // --- time -------------------------------------------------------------------
  auto* cmd_time = app.add_subcommand("time", "time one solver on one instance");
  std::string time_path, time_algorithm = "NS";
  int time_reps = 3;
  std::int64_t time_timeout_ms = 10000;
  cmd_time->add_option("instance", time_path)->required();
  cmd_time->add_option("--algorithm", time_algorithm, "solver to time");
  cmd_time->add_option("--repetitions", time_reps, "timed repetitions (default 3)");
  cmd_time->add_option("--timeout-ms", time_timeout_ms, "per-run timeout (default 10000)");

  // --- featurize --------------------------------------------------------------
  auto* cmd_featurize = app.add_subcommand("featurize", "compute the 21-feature vectors");
  std::vector<std::string> feat_files;
  std::string feat_corpus, feat_out;
  cmd_featurize->add_option("instances", feat_files, "DIMACS files (feature CSV to stdout)");
  cmd_featurize->add_option("--corpus", feat_corpus, "corpus directory with manifest.tsv");
  cmd_featurize->add_option("--out", feat_out, "output CSV (required with --corpus)");

  // --- label ------------------------------------------------------------------
  auto* cmd_label = app.add_subcommand("label", "pick winners from a timings file");
  std::string label_timings, label_manifest, label_out, label_excluded;
  cmd_label->add_option("--timings", label_timings, "timings.csv")->required();
  cmd_label->add_option("--corpus", label_manifest, "corpus directory (generator column)");
  cmd_label->add_option("--out", label_out, "labels.csv")->required();
  cmd_label->add_option("--excluded", label_excluded, "optional file for excluded ids");

  // --- split ------------------------------------------------------------------
  auto* cmd_split = app.add_subcommand("split", "deterministic train/test split");
  std::string split_features, split_out;
  double split_fraction = 0.2;
  std::uint64_t split_seed = 1;
  cmd_split->add_option("--features", split_features, "features.csv (ids)")->required();
  cmd_split->add_option("--test-fraction", split_fraction, "default 0.2");
  cmd_split->add_option("--seed", split_seed, "default 1");
  cmd_split->add_option("--out", split_out, "split.csv")->required();

  // --- train ------------------------------------------------------------------
  auto* cmd_train = app.add_subcommand("train", "grid search + fit one classifier family");
  std::string train_features, train_labels, train_split, train_family, train_out,
      train_report;
  std::size_t train_folds = 5;
  std::uint64_t train_seed = 1;
  cmd_train->add_option("--features", train_features)->required();
  cmd_train->add_option("--labels", train_labels)->required();
  cmd_train->add_option("--split", train_split, "split.csv (trains on role=train)");
  cmd_train->add_option("--family", train_family, "knn|decision_tree|random_forest|adaboost")
      ->required();
  cmd_train->add_option("--folds", train_folds, "cross-validation folds (default 5)");
  cmd_train->add_option("--seed", train_seed, "default 1");
  cmd_train->add_option("--out", train_out, "model artifact path")->required();
  cmd_train->add_option("--report", train_report, "optional per-cell CV report CSV");

  // --- evaluate ---------------------------------------------------------------
  auto* cmd_evaluate = app.add_subcommand("evaluate", "held-out accuracy vs the baseline");
  std::vector<std::string> eval_models;
  std::string eval_features, eval_labels, eval_split, eval_out;
  cmd_evaluate->add_option("--model", eval_models, "model artifact (repeatable)")->required();
  cmd_evaluate->add_option("--features", eval_features)->required();
  cmd_evaluate->add_option("--labels", eval_labels)->required();
  cmd_evaluate->add_option("--split", eval_split, "split.csv")->required();
  cmd_evaluate->add_option("--out", eval_out, "report.csv (stdout if omitted)");

  // --- predict ----------------------------------------------------------------
  auto* cmd_predict = app.add_subcommand("predict", "recommend a solver for an instance");
  std::string predict_path, predict_model;
  bool predict_run = false;
  cmd_predict->add_option("instance", predict_path)->required();
  cmd_predict->add_option("--model", predict_model, "model artifact")->required();
  cmd_predict->add_flag("--run", predict_run, "also solve with the predicted algorithm");

  // --- report -----------------------------------------------------------------
  auto* cmd_report = app.add_subcommand("report", "winner distribution table from labels");
  std::string report_labels, report_out;
  cmd_report->add_option("--labels", report_labels, "labels.csv")->required();
  cmd_report->add_option("--out", report_out, "output CSV (stdout if omitted)");

  // --- run --------------------------------------------------------------------
  auto* cmd_run = app.add_subcommand("run", "run the full experiment pipeline");
  std::string run_config;
  bool run_force = false;
  cmd_run->add_option("config", run_config, "experiment config JSON")->required();
  cmd_run->add_flag("--force", run_force, "allow writing into a non-empty output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*cmd_generate) {
      const ExperimentConfig config = parse_experiment_config(slurp(gen_config));
      if (config.generators.empty()) {
        throw CLI::ValidationError("config has no generators section");
      }
      std::size_t total = 0;
      std::vector<CorpusEntry> all_entries;
      for (const GeneratorConfig& gc : config.generators) {
        const auto entries =
            generate_corpus(gc.grid, gc.replicates,
                            SplitMix64(gen_seed)
                                .split(static_cast<std::uint64_t>(gc.generator))
                                .next(),
                            gen_out);
        // generate_corpus rewrites manifest.tsv each call; merge below
        all_entries.insert(all_entries.end(), entries.begin(), entries.end());
        total += entries.size();
      }
      std::ofstream manifest(fs::path(gen_out) / "manifest.tsv", std::ios::binary);
      manifest << manifest_header() << "\n";
      for (const CorpusEntry& entry : all_entries) manifest << manifest_line(entry) << "\n";
      std::cout << "corpus=" << gen_out << " instances=" << total << "\n";
      return kExitOk;
    }

    if (*cmd_solve) {
      const Instance instance = load_instance(solve_path);
      const std::vector<AlgorithmId> algorithms =
          solve_algorithm == "all" ? all_algorithms()
                                   : std::vector<AlgorithmId>{parse_algorithm(solve_algorithm)};
      bool certified_failure = false;
      for (AlgorithmId id : algorithms) {
        const SolveResult result = solve(id, instance);
        const std::string prefix =
            algorithms.size() > 1 || solve_pretty ? "algorithm=" + algorithm_name(id) + " " : "";
        print_solve_result(prefix, result, solve_pretty);
        if (solve_certify && result.status == SolveStatus::Optimal) {
          const bool ok = certify_optimal(instance, result.flow);
          std::cout << (prefix.empty() ? "" : prefix) << "certified=" << (ok ? "true" : "false")
                    << "\n";
          certified_failure = certified_failure || !ok;
        }
      }
      return certified_failure ? kExitInternalError : kExitOk;
    }

    if (*cmd_time) {
      const Instance instance = load_instance(time_path);
      if (time_reps < 1) throw CLI::ValidationError("--repetitions must be at least 1");
      const TimingRecord record = time_solver(parse_algorithm(time_algorithm), instance,
                                              time_reps, time_timeout_ms * 1'000'000);
      std::cout << "algorithm=" << algorithm_name(record.algorithm)
                << " status=" << run_status_name(record.status)
                << " median_ns=" << record.median_ns << " repetitions=" << record.repetitions;
      if (record.status == RunStatus::Optimal) std::cout << " cost=" << record.cost;
      std::cout << "\n";
      return kExitOk;
    }

    if (*cmd_featurize) {
      std::vector<std::pair<std::string, FeatureVector>> rows;
      if (!feat_corpus.empty()) {
        if (feat_out.empty()) throw CLI::ValidationError("--corpus requires --out");
        for (const CorpusEntry& entry : read_manifest(feat_corpus)) {
          rows.emplace_back(entry.instance_id,
                            extract_features(load_instance(
                                instance_path(feat_corpus, entry.instance_id))));
        }
        write_file(feat_out, write_feature_table(rows));
        std::cout << "features=" << feat_out << " rows=" << rows.size() << "\n";
        return kExitOk;
      }
      if (feat_files.empty()) {
        throw CLI::ValidationError("give instance files or --corpus");
      }
      for (const std::string& path : feat_files) {
        rows.emplace_back(path, extract_features(load_instance(path)));
      }
      std::cout << write_feature_table(rows);
      return kExitOk;
    }

    if (*cmd_label) {
      const auto records = timings_from_csv(slurp(label_timings));
      std::map<std::string, std::string> generators_by_id;
      if (!label_manifest.empty()) {
        for (const CorpusEntry& entry : read_manifest(label_manifest)) {
          generators_by_id[entry.instance_id] = generator_name(entry.params.generator);
        }
      }
      const LabelingOutcome outcome = label_winners(records, generators_by_id);
      write_file(label_out, labels_to_csv(outcome.labels));
      if (!label_excluded.empty()) {
        std::string text;
        for (const std::string& id : outcome.excluded) text += id + "\n";
        write_file(label_excluded, text);
      }
      std::cout << "labels=" << label_out << " labeled=" << outcome.labels.size()
                << " excluded=" << outcome.excluded.size() << "\n";
      return kExitOk;
    }

    if (*cmd_split) {
      const auto rows = read_feature_table(slurp(split_features));
      if (rows.empty()) throw CLI::ValidationError("feature table has no rows");
      const auto [train_idx, test_idx] =
          train_test_split_indices(rows.size(), split_fraction, split_seed);
      std::string csv = "instance_id,role\n";
      for (std::size_t i : train_idx) csv += rows[i].first + ",train\n";
      for (std::size_t i : test_idx) csv += rows[i].first + ",test\n";
      write_file(split_out, csv);
      std::cout << "split=" << split_out << " train=" << train_idx.size()
                << " test=" << test_idx.size() << "\n";
      return kExitOk;
    }

    if (*cmd_train) {
      const auto family = family_from_name(train_family);
      if (!family) throw CLI::ValidationError("unknown family '" + train_family + "'");
      const Dataset train =
          join_dataset(train_features, train_labels, train_split, "train");
      if (train.empty()) throw CLI::ValidationError("no training samples after joining inputs");
      const GridSearchResult search =
          grid_search(train, *family, default_grid(*family), train_folds, train_seed);
      const ModelArtifact model = fit(*family, train, search.best_hyperparameters, train_seed);
      save_model(model, train_out);
      if (!train_report.empty()) {
        std::ostringstream report;
        report << "family,cell,hyperparameters,fold_accuracies,mean_accuracy\n";
        for (const GridSearchCell& cell : search.cells) {
          report << family_name(*family) << "," << cell.cell_index << ",";
          bool first = true;
          for (const auto& [k, v] : cell.hyperparameters) {
            report << (first ? "" : " ") << k << "=" << v;
            first = false;
          }
          report << ",";
          for (std::size_t f = 0; f < cell.fold_accuracies.size(); ++f) {
            report << (f ? ";" : "") << cell.fold_accuracies[f];
          }
          report << "," << cell.mean_accuracy << "\n";
        }
        write_file(train_report, report.str());
      }
      std::cout << "model=" << train_out << " family=" << family_name(*family)
                << " cv_accuracy=" << search.best_mean_accuracy << " best=\"";
      bool first = true;
      for (const auto& [k, v] : search.best_hyperparameters) {
        std::cout << (first ? "" : " ") << k << "=" << v;
        first = false;
      }
      std::cout << "\"\n";
      return kExitOk;
    }

    if (*cmd_evaluate) {
      const Dataset train = join_dataset(eval_features, eval_labels, eval_split, "train");
      const Dataset test = join_dataset(eval_features, eval_labels, eval_split, "test");
      if (test.empty()) throw CLI::ValidationError("no test samples after joining inputs");
      std::vector<ModelArtifact> models;
      for (const std::string& path : eval_models) models.push_back(load_model(path));
      const auto rows = evaluate(models, train, test);
      const std::string csv = evaluation_to_csv(rows);
      if (eval_out.empty()) {
        std::cout << csv;
      } else {
        write_file(eval_out, csv);
        for (const EvaluationRow& row : rows) {
          std::cout << "family=" << row.family << " accuracy=" << row.accuracy << "\n";
        }
      }
      return kExitOk;
    }

    if (*cmd_predict) {
      ModelArtifact model;
      try {
        model = load_model(predict_model);
      } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUserError;
      }
      const Instance instance = load_instance(predict_path);
      const AlgorithmId choice = predict(model, extract_features(instance));
      std::cout << algorithm_name(choice) << "\n";
      if (predict_run) {
        print_solve_result("", solve(choice, instance), false);
      }
      return kExitOk;
    }

    if (*cmd_report) {
      const auto labels = labels_from_csv(slurp(report_labels));
      const std::string csv = winner_distribution(labels).to_csv();
      if (report_out.empty()) {
        std::cout << csv;
      } else {
        write_file(report_out, csv);
        std::cout << "report=" << report_out << "\n";
      }
      return kExitOk;
    }

    if (*cmd_run) {
      ExperimentConfig config = load_experiment_config(run_config);
      config.force_overwrite = config.force_overwrite || run_force;
      ExperimentSummary summary;
      try {
        summary = run_experiment(config, &std::cerr);
      } catch (const StageError& e) {
        std::cerr << "stage failure: " << e.what() << "\n";
        return e.stage() == "validate" ? kExitUserError : kExitInternalError;
      }
      std::cout << "report=" << (fs::path(summary.output_dir) / "report.csv").string() << "\n";
      std::cout << "corpus=" << summary.corpus_size << " labeled=" << summary.labeled
                << " excluded=" << summary.excluded << "\n";
      for (const EvaluationRow& row : summary.evaluation) {
        std::cout << "family=" << row.family << " accuracy=" << row.accuracy << "\n";
      }
      return kExitOk;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUserError;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUserError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUserError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternalError;
  }
  return kExitUserError;
}
