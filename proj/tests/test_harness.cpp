#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "hopp/harness.hpp"
#include "test_util.hpp"

using namespace hopp;
namespace fs = std::filesystem;

namespace {

const std::string kData = std::string(HOPP_SOURCE_DIR) + "/data/wdbc.data";

const std::vector<BiopsyRecord>& records() {
  static const auto r = load_wdbc(kData);
  return r;
}

ProcedureSpec small_spec() {
  ProcedureSpec spec;
  spec.name = "small";
  spec.feature_view = "worst";
  spec.max_orders = {1, 2};
  spec.weight_grid = {5, 15};
  spec.ensemble_size = 4;
  spec.training.epochs_pre_cull = 15;
  spec.training.epochs_post_cull = 15;
  spec.training.init_active_weights = 60;
  return spec;
}

fs::path temp_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("hopp_test_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("procedure documents") {
  const auto spec = nlohmann::json::parse(R"({
      "name": "demo", "feature_view": "means", "max_order": [1, 2], "weights": 20,
      "bits": 3, "ensemble_size": 5, "cull_criterion": "nth-root-magnitude",
      "split": {"train_fraction": 0.8, "stratified": true},
      "training": {"epsilon": 0.02, "epochs_pre_cull": 7},
      "checks": [{"set": "train", "measure": "MCC", "stat": "std", "max": 0.1,
                  "max_order": 2}]})")
                        .get<ProcedureSpec>();
  CHECK(spec.max_orders == std::vector<std::size_t>{1, 2});
  CHECK(spec.weight_grid == std::vector<std::size_t>{20});
  CHECK(spec.bits == 3u);
  CHECK(spec.split.stratified);
  CHECK(spec.training.epsilon == 0.02);
  CHECK(spec.training.epochs_pre_cull == 7);
  CHECK(spec.training.epochs_post_cull == 500);
  CHECK(spec.training.cull_criterion == CullCriterion::NthRootMagnitude);
  REQUIRE(spec.checks.size() == 1);
  CHECK(spec.checks[0].measure == Measure::Mcc);
  CHECK(spec.checks[0].max_order == 2u);

  const auto again = nlohmann::json(spec).get<ProcedureSpec>();
  CHECK(nlohmann::json(again) == nlohmann::json(spec));

  CHECK(kind_of([] {
          nlohmann::json::parse(R"({"checks": [{"measure": "AUC"}]})").get<ProcedureSpec>();
        }) == ErrorKind::InvalidInput);
  CHECK(kind_of([] { nlohmann::json::parse(R"({"max_order": "x"})").get<ProcedureSpec>(); }) ==
        ErrorKind::Parse);
}

TEST_CASE("shipped procedure files load") {
  for (const char* name : {"p1", "p2", "p3", "p3a", "p3b", "p4", "p5", "p6"}) {
    const auto spec =
        load_procedure(fs::path(HOPP_SOURCE_DIR) / "procedures" / (std::string(name) + ".json"));
    CHECK(fs::exists(spec.data_path));
    CHECK_FALSE(spec.checks.empty());
  }
}

TEST_CASE("procedure validation") {
  auto spec = small_spec();
  CHECK_NOTHROW(spec.validate());
  spec.ensemble_size = 0;
  CHECK(kind_of([&] { spec.validate(); }) == ErrorKind::InvalidInput);
  spec = small_spec();
  spec.weight_grid = {0};
  CHECK(kind_of([&] { spec.validate(); }) == ErrorKind::InvalidInput);
  spec = small_spec();
  spec.threshold = 1.0;
  CHECK(kind_of([&] { spec.validate(); }) == ErrorKind::InvalidInput);
  spec = small_spec();
  spec.max_orders = {11};
  CHECK(kind_of([&] { run_procedure(spec, records(), 1); }) == ErrorKind::InvalidDimension);
}

TEST_CASE("untrained networks put every probability at one half") {
  HoppNetwork net(2, 2, 1);
  FeatureMatrix m;
  m.rows = 7;
  m.cols = 2;
  m.values.assign(14, 0.3);
  const auto h = probability_histogram(net, m, 10);
  CHECK(h[5] == 7);
  CHECK(std::accumulate(h.begin(), h.end(), std::size_t{0}) == 7);
  CHECK(kind_of([&] { probability_histogram(net, m, 1); }) == ErrorKind::InvalidInput);
}

TEST_CASE("probability one lands in the closed last bin") {
  HoppNetwork net(1, 2, 1);
  net.set_weight({0, TermKey::bias()}, 800.0);
  FeatureMatrix m;
  m.rows = 1;
  m.cols = 1;
  m.values = {0.0};
  CHECK(probability_histogram(net, m, 4)[3] == 1);
}

TEST_CASE("feature histograms") {
  const auto hists = feature_histograms(records(), FeatureView::all30(), 20);
  REQUIRE(hists.size() == 30);
  for (const auto& h : hists) {
    CHECK(std::abs(std::accumulate(h.weights.begin(), h.weights.end(), 0.0) - 1.0) < 1e-12);
  }
  // Mean radius at the default 10 bins: one peak, no empty bin inside the
  // occupied range.
  const auto radius = feature_histograms(records(), FeatureView::parse("mean_radius"), 10)[0];
  CHECK(radius.name == "mean_radius");
  for (double w : radius.weights) CHECK(w > 0);
  const auto peak = static_cast<std::size_t>(
      std::max_element(radius.weights.begin(), radius.weights.end()) - radius.weights.begin());
  for (std::size_t b = 1; b <= peak; ++b) CHECK(radius.weights[b] >= radius.weights[b - 1]);
  for (std::size_t b = peak + 1; b < radius.weights.size(); ++b) {
    CHECK(radius.weights[b] <= radius.weights[b - 1]);
  }

  std::vector<BiopsyRecord> same(3, records()[0]);
  const auto flat = feature_histograms(same, FeatureView::parse("mean_area"), 5);
  CHECK(flat[0].weights == std::vector<double>{1, 0, 0, 0, 0});
}

TEST_CASE("appearance counts") {
  const std::vector<std::vector<TermKey>> survivors = {
      {TermKey{1}, TermKey{0, 2}}, {TermKey{1}}, {TermKey{1}, TermKey{3}, TermKey{0, 2}}};
  const auto counts = appearance_counts(survivors);
  REQUIRE(counts.size() == 3);
  CHECK(counts[0].factor == TermKey{1});
  CHECK(counts[0].count == 3);
  CHECK(counts[1].factor == TermKey{0, 2});
  CHECK(counts[1].count == 2);
  CHECK(counts[2].factor == TermKey{3});
  for (const auto& c : counts) CHECK(c.count <= survivors.size());

  const std::vector<std::string> names = {"a", "b", "c", "d"};
  CHECK(factor_name(TermKey{0, 2}, names) == "a*c");
}

TEST_CASE("ensemble run structure") {
  const auto spec = small_spec();
  const auto report = run_procedure(spec, records(), 3);
  CHECK(report.input_names.size() == 10);
  REQUIRE(report.grid.size() == 4);
  CHECK(report.grid[1].max_order == 1);
  CHECK(report.grid[1].max_weights == 15);
  CHECK(report.grid[2].max_order == 2);
  for (const auto& entry : report.grid) {
    CHECK(entry.members.size() == spec.ensemble_size);
    CHECK(entry.failed == 0);
    REQUIRE(entry.test.has_value());
    CHECK((*entry.test)[Measure::Acc].count == spec.ensemble_size);
    for (const auto& m : entry.members) {
      CHECK(m.test_counts.total() == 57);
      CHECK(m.train_counts.total() == 512);
      CHECK(m.net->active_non_bias_count() <= entry.max_weights);
      CHECK(m.seed == derive_seed(3, m.index));
    }
    for (const auto& a : entry.appearance) CHECK(a.count <= spec.ensemble_size);
  }
  REQUIRE(report.best_entry.has_value());
  CHECK(report.best_probabilities.size() == 569);
  CHECK(std::accumulate(report.probability_histogram.begin(), report.probability_histogram.end(),
                        std::size_t{0}) == 569);
}

TEST_CASE("members with the same seed share the split across the grid") {
  const auto report = run_procedure(small_spec(), records(), 5);
  for (std::size_t m = 0; m < 4; ++m) {
    CHECK(report.grid[0].members[m].scaler.min == report.grid[3].members[m].scaler.min);
  }
}

TEST_CASE("parallel and serial schedules give identical reports") {
  auto spec = small_spec();
  spec.ensemble_size = 6;
  RunOptions serial, parallel;
  serial.threads = 1;
  parallel.threads = 4;
  const auto a = run_procedure(spec, records(), 9, serial);
  const auto b = run_procedure(spec, records(), 9, parallel);
  CHECK(summary_json(a).dump() == summary_json(b).dump());
  for (std::size_t g = 0; g < a.grid.size(); ++g) {
    for (std::size_t m = 0; m < spec.ensemble_size; ++m) {
      CHECK(*a.grid[g].members[m].net == *b.grid[g].members[m].net);
    }
  }
}

TEST_CASE("untrained single-member smoke run") {
  ProcedureSpec spec;
  spec.name = "smoke";
  spec.feature_view = "means";
  spec.ensemble_size = 1;
  spec.training.epochs_pre_cull = 0;
  spec.training.epochs_post_cull = 0;
  spec.weight_grid = {1000};
  const auto report = run_procedure(spec, records(), 4);
  const auto& member = report.grid[0].members[0];

  Rng rng(derive_seed(4, 0));
  const auto parts = split(records(), spec.split, rng);
  const auto init = initialize(10, 2, 1, spec.training, rng);
  CHECK(*member.net == init.net);

  const auto full = project(records(), FeatureView::parse("means"));
  const auto test = member.scaler.apply(select_rows(full.x, parts.test));
  std::vector<char> pred, truth;
  for (std::size_t r = 0; r < test.rows; ++r) {
    pred.push_back(predict(init.net, test.row(r), 0.5).positive);
    truth.push_back(full.malignant[parts.test[r]]);
  }
  const auto counts = confusion(std::span(reinterpret_cast<const bool*>(pred.data()), pred.size()),
                                std::span(reinterpret_cast<const bool*>(truth.data()), truth.size()));
  CHECK(counts == member.test_counts);
}

TEST_CASE("diverged members are excluded and counted") {
  auto spec = small_spec();
  spec.max_orders = {1};
  spec.weight_grid = {5};
  spec.training.epsilon = 1e308;
  const auto report = run_procedure(spec, records(), 1);
  CHECK(report.grid[0].failed == spec.ensemble_size);
  CHECK_FALSE(report.grid[0].test.has_value());
  CHECK_FALSE(report.best_entry.has_value());
  for (const auto& m : report.grid[0].members) {
    CHECK(m.failed);
    CHECK(m.failure.find("epsilon") != std::string::npos);
  }
  const auto checks = evaluate_checks(report);
  CHECK(checks.empty());
  CHECK(summary_json(report)["grid"][0]["failed"] == spec.ensemble_size);
}

TEST_CASE("dropping one member moves the means by O(1/n)") {
  auto spec = small_spec();
  spec.ensemble_size = 8;
  const auto report = run_procedure(spec, records(), 12);
  const auto& entry = report.grid[0];
  std::vector<Measures> rest;
  for (std::size_t m = 1; m < entry.members.size(); ++m) rest.push_back(entry.members[m].test);
  const auto reduced = summarize(rest);
  const double full_mean = (*entry.test)[Measure::Acc].mean;
  const double dropped = entry.members[0].test.acc;
  CHECK(reduced[Measure::Acc].mean ==
        doctest::Approx((full_mean * 8 - dropped) / 7).epsilon(1e-12));
  CHECK(std::abs(reduced[Measure::Acc].mean - full_mean) <= 1.0 / 7);
}

TEST_CASE("checks evaluate against the requested grid entry") {
  auto spec = small_spec();
  ReportCheck pass;
  pass.min = 0.5;
  pass.max_order = 2;
  pass.max_weights = 15;
  ReportCheck fail;
  fail.measure = Measure::Mcc;
  fail.min = 1.01;
  ReportCheck missing;
  missing.min = 0.0;
  missing.max_order = 7;
  spec.checks = {pass, fail, missing};
  const auto results = evaluate_checks(run_procedure(spec, records(), 2));
  REQUIRE(results.size() == 3);
  CHECK(results[0].passed);
  CHECK(results[0].description.find("N=2, W=15") != std::string::npos);
  CHECK_FALSE(results[1].passed);
  CHECK_FALSE(results[2].passed);
  CHECK_FALSE(results[2].value.has_value());
}

TEST_CASE("binarized inputs") {
  auto spec = small_spec();
  spec.bits = 2;
  spec.max_orders = {1};
  spec.weight_grid = {10};
  const auto report = run_procedure(spec, records(), 6);
  CHECK(report.input_names.size() == 20);
  CHECK(report.input_names[1] == "worst_radius.b1");
}

TEST_CASE("reports are written and re-aggregated") {
  auto spec = small_spec();
  spec.max_orders = {1};
  spec.weight_grid = {5};
  const auto a = run_procedure(spec, records(), 1);
  const auto b = run_procedure(spec, records(), 2);
  const auto dir_a = temp_dir("a"), dir_b = temp_dir("b");
  write_report(a, records(), dir_a);
  write_report(b, records(), dir_b);
  for (const char* file : {"summary.json", "members.csv", "appearance.csv", "prob_hist.csv",
                           "best_network.json", "feature_hist/worst_area.csv"}) {
    CHECK(fs::exists(dir_a / file));
  }
  std::ifstream net_file(dir_a / "best_network.json");
  const auto best = read_network(net_file);
  const auto& entry = a.grid[*a.best_entry];
  CHECK(best == *entry.members[*entry.best_member].net);

  const std::vector<fs::path> dirs = {dir_a, dir_b};
  const auto merged = reaggregate_appearance(dirs);
  std::size_t total = 0;
  for (const auto& s : merged) {
    CHECK(s.count <= 8);
    total += s.count;
  }
  std::size_t expected = 0;
  for (const auto* r : {&a, &b}) {
    for (const auto& c : r->grid[0].appearance) expected += c.count;
  }
  CHECK(total == expected);
  for (std::size_t i = 1; i < merged.size(); ++i) CHECK(merged[i - 1].count >= merged[i].count);

  CHECK(kind_of([&] { reaggregate_appearance(std::vector<fs::path>{temp_dir("none")}); }) ==
        ErrorKind::InvalidInput);
}

TEST_CASE("report output is deterministic") {
  auto spec = small_spec();
  spec.max_orders = {2};
  spec.weight_grid = {10};
  const auto dir_a = temp_dir("det_a"), dir_b = temp_dir("det_b");
  write_report(run_procedure(spec, records(), 77), records(), dir_a);
  write_report(run_procedure(spec, records(), 77), records(), dir_b);
  for (const char* file : {"summary.json", "members.csv", "appearance.csv", "prob_hist.csv"}) {
    std::ifstream x(dir_a / file), y(dir_b / file);
    const std::string sx((std::istreambuf_iterator<char>(x)), {});
    const std::string sy((std::istreambuf_iterator<char>(y)), {});
    CHECK(sx == sy);
  }
}

TEST_CASE("shortest round-trip number text") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}
