#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <thread>

#include "mcfsel/harness.hpp"
#include "support/builders.hpp"

using namespace mcfsel;
using namespace mcfsel::testing;

namespace {

SolveFn fake_solver(std::chrono::milliseconds delay, std::int64_t cost = 15) {
  return [delay, cost](const Instance&, const SolveOptions&) {
    std::this_thread::sleep_for(delay);
    SolveResult result;
    result.status = SolveStatus::Optimal;
    result.cost = cost;
    return result;
  };
}

TimingRecord record_of(const std::string& id, AlgorithmId alg, RunStatus status,
                       std::int64_t median, std::int64_t cost = 0) {
  TimingRecord r;
  r.instance_id = id;
  r.algorithm = alg;
  r.status = status;
  r.median_ns = median;
  r.cost = cost;
  r.repetitions = 3;
  return r;
}

std::vector<TimingRecord> full_instance(const std::string& id,
                                        const std::array<std::int64_t, 7>& medians,
                                        std::int64_t cost = 10) {
  std::vector<TimingRecord> records;
  for (int a = 0; a < kNumAlgorithms; ++a) {
    records.push_back(record_of(id, static_cast<AlgorithmId>(a), RunStatus::Optimal,
                                medians[static_cast<std::size_t>(a)], cost));
  }
  return records;
}

}  // namespace

TEST_CASE("time_solver measures around the solve call") {
  const Instance inst = t1();
  const TimingRecord slow =
      time_solver(fake_solver(std::chrono::milliseconds(20)), inst, 3, 5'000'000'000);
  const TimingRecord fast =
      time_solver(fake_solver(std::chrono::milliseconds(10)), inst, 3, 5'000'000'000);
  CHECK(fast.status == RunStatus::Optimal);
  CHECK(slow.status == RunStatus::Optimal);
  CHECK(fast.durations_ns.size() == 3);
  CHECK(fast.median_ns >= 10'000'000);
  CHECK(fast.median_ns < 20'000'000);  // scheduling slack stays below the gap
  CHECK(slow.median_ns >= 20'000'000);
  CHECK(slow.median_ns > fast.median_ns);
}

TEST_CASE("time_solver with one repetition uses that single duration") {
  const TimingRecord r = time_solver(AlgorithmId::NS, t1(), 1, 5'000'000'000);
  CHECK(r.status == RunStatus::Optimal);
  CHECK(r.cost == 15);
  REQUIRE(r.durations_ns.size() == 1);
  CHECK(r.median_ns == r.durations_ns.front());
}

TEST_CASE("infeasible instances still get timed") {
  for (AlgorithmId id : all_algorithms()) {
    const TimingRecord r = time_solver(id, t3(), 2, 5'000'000'000);
    CHECK(r.status == RunStatus::Infeasible);
    CHECK(r.durations_ns.size() == 2);
  }
}

TEST_CASE("median of three resists an injected outlier") {
  int call = 0;
  const SolveFn outlier = [&call](const Instance&, const SolveOptions&) {
    // warm-up, then 10ms, 60ms, 10ms
    const int delays[] = {1, 10, 60, 10};
    std::this_thread::sleep_for(std::chrono::milliseconds(delays[std::min(call, 3)]));
    ++call;
    SolveResult result;
    result.status = SolveStatus::Optimal;
    result.cost = 1;
    return result;
  };
  const TimingRecord r = time_solver(outlier, t1(), 3, 5'000'000'000);
  CHECK(r.median_ns >= 10'000'000);
  CHECK(r.median_ns < 60'000'000);
}

TEST_CASE("timeouts and errors are reported as statuses") {
  const TimingRecord timeout =
      time_solver(fake_solver(std::chrono::milliseconds(50)), t1(), 3, 1'000'000);
  CHECK(timeout.status == RunStatus::Timeout);

  const SolveFn broken = [](const Instance&, const SolveOptions&) -> SolveResult {
    throw std::runtime_error("injected fault");
  };
  CHECK(time_solver(broken, t1(), 3, 1'000'000'000).status == RunStatus::Error);

  // the cooperative deadline inside real solvers also yields Timeout
  const TimingRecord real = time_solver(AlgorithmId::MMCC, t2(), 1, 1);
  CHECK(real.status == RunStatus::Timeout);

  CHECK_THROWS_AS(time_solver(AlgorithmId::NS, t1(), 0, 1), std::invalid_argument);
}

TEST_CASE("label_winners picks the fastest and computes margins") {
  auto records = full_instance("a", {70, 60, 50, 40, 30, 20, 25});
  const auto outcome = label_winners(records);
  REQUIRE(outcome.labels.size() == 1);
  CHECK(outcome.labels[0].winner == AlgorithmId::NS);
  CHECK(outcome.labels[0].margin_ns == 5);  // CS2 at 25 is the runner-up
  CHECK(outcome.excluded.empty());
}

TEST_CASE("label ties break toward the lower algorithm code") {
  // SSP (code 3) and NS (code 5) tie exactly
  auto records = full_instance("a", {90, 90, 90, 10, 90, 10, 90});
  const auto outcome = label_winners(records);
  CHECK(outcome.labels[0].winner == AlgorithmId::SSP);
  CHECK(outcome.labels[0].margin_ns == 0);
}

TEST_CASE("instances with any non-optimal record are excluded") {
  auto infeasible = full_instance("gone", {1, 1, 1, 1, 1, 1, 1});
  for (auto& r : infeasible) r.status = RunStatus::Infeasible;
  auto good = full_instance("kept", {5, 4, 3, 2, 6, 1, 7});
  auto with_timeout = full_instance("slow", {5, 4, 3, 2, 6, 1, 7});
  with_timeout[0].status = RunStatus::Timeout;

  std::vector<TimingRecord> records;
  records.insert(records.end(), infeasible.begin(), infeasible.end());
  records.insert(records.end(), good.begin(), good.end());
  records.insert(records.end(), with_timeout.begin(), with_timeout.end());
  const auto outcome = label_winners(records);
  REQUIRE(outcome.labels.size() == 1);
  CHECK(outcome.labels[0].instance_id == "kept");
  CHECK(outcome.excluded == std::vector<std::string>{"gone", "slow"});
}

TEST_CASE("consistency failures are fatal") {
  // cost disagreement
  auto records = full_instance("a", {1, 2, 3, 4, 5, 6, 7});
  records[3].cost = 11;
  CHECK_THROWS_AS(label_winners(records), std::logic_error);

  // feasibility disagreement
  auto mixed = full_instance("b", {1, 2, 3, 4, 5, 6, 7});
  mixed[2].status = RunStatus::Infeasible;
  CHECK_THROWS_AS(label_winners(mixed), std::logic_error);

  // missing record
  auto missing = full_instance("c", {1, 2, 3, 4, 5, 6, 7});
  missing.pop_back();
  CHECK_THROWS_AS(label_winners(missing), std::invalid_argument);

  // duplicate record
  auto duplicated = full_instance("d", {1, 2, 3, 4, 5, 6, 7});
  duplicated.push_back(duplicated.front());
  CHECK_THROWS_AS(label_winners(duplicated), std::invalid_argument);
}

TEST_CASE("fake 10ms vs 20ms solvers: the fast one always wins") {
  // harness-level check; the acceptance suite runs the full 100 trials
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<TimingRecord> records;
    for (int a = 0; a < kNumAlgorithms; ++a) {
      const auto delay =
          a == static_cast<int>(AlgorithmId::SSP) ? std::chrono::milliseconds(10)
                                                  : std::chrono::milliseconds(20);
      TimingRecord r = time_solver(fake_solver(delay), t1(), 3, 5'000'000'000);
      r.instance_id = "trial";
      r.algorithm = static_cast<AlgorithmId>(a);
      records.push_back(std::move(r));
    }
    const auto outcome = label_winners(records);
    REQUIRE(outcome.labels.size() == 1);
    CHECK(outcome.labels[0].winner == AlgorithmId::SSP);
  }
}

TEST_CASE("winner distribution reproduces the published overall percentages") {
  std::vector<WinnerLabel> labels;
  const auto add = [&labels](const std::string& generator, AlgorithmId id, int count) {
    for (int i = 0; i < count; ++i) {
      WinnerLabel l;
      l.instance_id = generator + std::to_string(labels.size());
      l.winner = id;
      l.generator = generator;
      labels.push_back(std::move(l));
    }
  };
  // per-generator winner counts of the 73130 feasible instances
  add("netgen", AlgorithmId::SSP, 2122);
  add("netgen", AlgorithmId::CAS, 113);
  add("netgen", AlgorithmId::NS, 12250);
  add("netgen", AlgorithmId::CS2, 783);
  add("gridgen", AlgorithmId::SCC, 1);
  add("gridgen", AlgorithmId::SSP, 3477);
  add("gridgen", AlgorithmId::CAS, 200);
  add("gridgen", AlgorithmId::NS, 14100);
  add("gridgen", AlgorithmId::CS2, 202);
  add("gridgraph", AlgorithmId::SCC, 5);
  add("gridgraph", AlgorithmId::MMCC, 2);
  add("gridgraph", AlgorithmId::CAT, 84);
  add("gridgraph", AlgorithmId::SSP, 9836);
  add("gridgraph", AlgorithmId::CAS, 1212);
  add("gridgraph", AlgorithmId::NS, 10743);
  add("gridgraph", AlgorithmId::CS2, 80);
  add("goto", AlgorithmId::NS, 17913);
  add("goto", AlgorithmId::CS2, 7);
  REQUIRE(labels.size() == 73130);

  const DistributionTable table = winner_distribution(labels);
  REQUIRE(table.groups.back() == "all");
  const std::size_t all = table.groups.size() - 1;
  CHECK(table.totals[all] == 73130);
  CHECK(table.counts[all][static_cast<std::size_t>(AlgorithmId::SCC)] == 6);
  CHECK(table.counts[all][static_cast<std::size_t>(AlgorithmId::MMCC)] == 2);
  CHECK(table.counts[all][static_cast<std::size_t>(AlgorithmId::CAT)] == 84);
  CHECK(table.counts[all][static_cast<std::size_t>(AlgorithmId::SSP)] == 15435);
  CHECK(table.counts[all][static_cast<std::size_t>(AlgorithmId::CAS)] == 1525);
  CHECK(table.counts[all][static_cast<std::size_t>(AlgorithmId::NS)] == 55006);
  CHECK(table.counts[all][static_cast<std::size_t>(AlgorithmId::CS2)] == 1072);

  // quoted headline shares
  CHECK(table.percentage(all, AlgorithmId::NS) == doctest::Approx(75.0).epsilon(0.01));
  CHECK(table.percentage(all, AlgorithmId::SSP) > 20.0);
  CHECK(table.percentage(all, AlgorithmId::CAS) == doctest::Approx(2.0).epsilon(0.05));
  CHECK(table.percentage(all, AlgorithmId::CS2) == doctest::Approx(1.5).epsilon(0.05));

  // goto column
  const auto goto_col =
      static_cast<std::size_t>(std::find(table.groups.begin(), table.groups.end(), "goto") -
                               table.groups.begin());
  CHECK(table.counts[goto_col][static_cast<std::size_t>(AlgorithmId::NS)] == 17913);
  CHECK(table.counts[goto_col][static_cast<std::size_t>(AlgorithmId::CS2)] == 7);
  CHECK(table.totals[goto_col] == 17920);

  // percentages per group sum to 100
  for (std::size_t g = 0; g < table.groups.size(); ++g) {
    double sum = 0;
    for (int a = 0; a < kNumAlgorithms; ++a) {
      sum += table.percentage(g, static_cast<AlgorithmId>(a));
    }
    CHECK(sum == doctest::Approx(100.0).epsilon(1e-9));
  }

  const std::string csv = table.to_csv();
  CHECK(csv.find("NS") != std::string::npos);
  CHECK(csv.find("75.2") != std::string::npos);
}

TEST_CASE("empty label list gives an all-zero table") {
  const DistributionTable table = winner_distribution({});
  REQUIRE(table.groups.size() == 1);  // just "all"
  CHECK(table.totals[0] == 0);
  for (int a = 0; a < kNumAlgorithms; ++a) {
    CHECK(table.counts[0][static_cast<std::size_t>(a)] == 0);
  }
}

TEST_CASE("timing and label CSV round trips") {
  auto records = full_instance("x/00001-abc-0", {70, 60, 50, 40, 30, 20, 25}, 42);
  records[1].status = RunStatus::Timeout;
  records[1].cost = 0;
  const auto parsed = timings_from_csv(timings_to_csv(records));
  REQUIRE(parsed.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(parsed[i].instance_id == records[i].instance_id);
    CHECK(parsed[i].algorithm == records[i].algorithm);
    CHECK(parsed[i].status == records[i].status);
    CHECK(parsed[i].median_ns == records[i].median_ns);
  }

  std::vector<WinnerLabel> labels;
  WinnerLabel l;
  l.instance_id = "x/00001-abc-0";
  l.winner = AlgorithmId::NS;
  l.margin_ns = 5;
  l.generator = "netgen";
  labels.push_back(l);
  const auto parsed_labels = labels_from_csv(labels_to_csv(labels));
  REQUIRE(parsed_labels.size() == 1);
  CHECK(parsed_labels[0].winner == AlgorithmId::NS);
  CHECK(parsed_labels[0].margin_ns == 5);
  CHECK(parsed_labels[0].generator == "netgen");
}

TEST_CASE("evaluate reports per-model rows plus the single-best baseline") {
  SplitMix64 rng(9);
  Dataset train, test;
  for (int i = 0; i < 40; ++i) {
    LabeledSample s;
    for (int f = 0; f < kNumFeatures; ++f) {
      s.features[static_cast<std::size_t>(f)] = static_cast<double>(rng.next_in(0, 100));
    }
    // NS-heavy labels make NS the single best
    s.label = i % 4 == 0 ? AlgorithmId::SSP : AlgorithmId::NS;
    (i % 5 == 0 ? test : train).push_back(s);
  }
  const ModelArtifact model = fit_knn(train, 3, KnnWeights::Uniform);
  const auto rows = evaluate({model}, train, test);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].family == "knn");
  CHECK(rows[1].family == "baseline_single_best");
  CHECK(rows[1].hyperparameters == "label=NS");
  const double expected_baseline = [&test] {
    int ns = 0;
    for (const LabeledSample& s : test) ns += s.label == AlgorithmId::NS ? 1 : 0;
    return static_cast<double>(ns) / static_cast<double>(test.size());
  }();
  CHECK(rows[1].accuracy == doctest::Approx(expected_baseline));
  CHECK(rows[0].baseline_accuracy == doctest::Approx(expected_baseline));

  const std::string csv = evaluation_to_csv(rows);
  CHECK(csv.find("baseline_single_best") != std::string::npos);

  // a model that simply echoes the labels scores 1.0: use a 1-NN trained on test
  const ModelArtifact oracle = fit_knn(test, 1, KnnWeights::Uniform);
  const auto oracle_rows = evaluate({oracle}, train, test);
  CHECK(oracle_rows[0].accuracy == 1.0);
}

TEST_CASE("experiment config parsing and validation") {
  const std::string good = R"({
    "output_dir": "out",
    "seed": 7,
    "repetitions": 3,
    "timeout": {"floor_ms": 2000, "ns_multiplier": 50},
    "test_fraction": 0.25,
    "cv_folds": 4,
    "families": ["random_forest", "knn"],
    "generators": [
      {"family": "netgen", "replicates": 2, "num_vertices": [16, 32],
       "arc_rules": ["8n"], "supply_factors": [1, 10],
       "supply_vertex_rules": ["1"], "max_costs": [10], "max_capacities": [10]},
      {"family": "gridgraph", "replicates": 1, "widths": [3], "lengths": [4],
       "supply_factors": [1], "max_costs": [10], "max_capacities": [10]}
    ]
  })";
  const ExperimentConfig config = parse_experiment_config(good);
  CHECK(config.seed == 7);
  CHECK(config.timeout.floor_ns == 2'000'000'000);
  CHECK(config.timeout.ns_multiplier == 50);
  CHECK(config.test_fraction == 0.25);
  CHECK(config.families.size() == 2);
  REQUIRE(config.generators.size() == 2);
  CHECK(config.generators[0].grid.size() == 4);  // 2 n * 1 rule * 2 supply
  CHECK(config.generators[0].replicates == 2);
  CHECK(config.generators[1].grid.size() == 1);
  CHECK(config.generators[1].grid[0].num_vertices == 12);

  CHECK_THROWS_AS(parse_experiment_config("{}"), std::invalid_argument);
  CHECK_THROWS_AS(parse_experiment_config("{\"output_dir\": \"x\"}"), std::invalid_argument);
  CHECK_THROWS_AS(parse_experiment_config("{\"output_dir\": \"x\", \"repetitions\": 0, "
                                          "\"corpus_manifest\": \"m\"}"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_experiment_config("not json"), std::invalid_argument);
}

TEST_CASE("full grid filtering in configs") {
  const std::string text = R"({
    "output_dir": "out",
    "generators": [
      {"family": "goto", "full_grid": true, "max_vertices": 128, "stride": 2, "replicates": 1}
    ]
  })";
  const ExperimentConfig config = parse_experiment_config(text);
  // the full goto grid has 2*2*4*4 = 64 cells at n <= 128; stride 2 halves that
  CHECK(config.generators[0].grid.size() == 32);
  for (const GeneratorParams& p : config.generators[0].grid) {
    CHECK(p.num_vertices <= 128);
  }
}
