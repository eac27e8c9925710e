#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "hopp/dataset.hpp"
#include "hopp/metrics.hpp"
#include "hopp/training.hpp"

namespace hopp {

// Threshold on one aggregate of a finished run, e.g. mean test ACC >= 0.94.
struct ReportCheck {
  std::string set = "test";   // "train" or "test"
  Measure measure = Measure::Acc;
  std::string stat = "mean";  // "mean" or "std"
  std::optional<double> min;
  std::optional<double> max;
  std::optional<std::size_t> max_order;    // grid entry; first entry when unset
  std::optional<std::size_t> max_weights;
};

struct ProcedureSpec {
  std::string name;
  std::string data_path;  // relative paths resolve against the spec file
  std::string feature_view = "all30";
  std::vector<std::size_t> max_orders{1};
  std::vector<std::size_t> weight_grid{30};
  std::optional<unsigned> bits;
  std::size_t ensemble_size = 30;
  SplitSpec split;
  TrainingConfig training;
  double threshold = 0.5;
  std::size_t histogram_bins = 10;
  std::vector<ReportCheck> checks;

  void validate() const;
};

ProcedureSpec load_procedure(const std::filesystem::path& path);
void from_json(const nlohmann::json& j, ProcedureSpec& spec);
void to_json(nlohmann::json& j, const ProcedureSpec& spec);

struct MemberResult {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  bool failed = false;
  std::string failure;
  ConfusionCounts train_counts;
  ConfusionCounts test_counts;
  Measures train;
  Measures test;
  std::vector<TermKey> factors;
  std::optional<HoppNetwork> net;
  Scaler scaler;
};

struct AppearanceCount {
  TermKey factor;
  std::size_t count = 0;
};

struct GridResult {
  std::size_t max_order = 0;
  std::size_t max_weights = 0;
  std::vector<MemberResult> members;
  std::size_t failed = 0;
  std::optional<MetricSummary> train;  // empty when every member failed
  std::optional<MetricSummary> test;
  std::vector<AppearanceCount> appearance;
  std::optional<std::size_t> best_member;
};

struct EnsembleReport {
  ProcedureSpec spec;
  std::uint64_t master_seed = 0;
  std::size_t record_count = 0;
  std::vector<std::string> input_names;  // network inputs, after binarization
  std::vector<GridResult> grid;
  std::optional<std::size_t> best_entry;
  std::vector<std::size_t> probability_histogram;  // best network over all records
  std::vector<double> best_probabilities;          // per record, file order
};

struct RunOptions {
  std::size_t threads = 0;  // 0: hardware concurrency
  // When set, receives (epoch, cost) for member 0 of the first grid entry.
  EpochObserver training_log;
};

// Every member: derived seed -> split -> project, scale (+ binarize) ->
// initialize and pre-cull training once per order -> per budget, cull and
// retrain on a copy of the RNG state -> evaluate train and test sets.
EnsembleReport run_procedure(const ProcedureSpec& spec, std::span<const BiopsyRecord> records,
                             std::uint64_t master_seed, const RunOptions& options = {});

// Members in which each non-bias factor survived (any output), sorted by
// descending count then term order.
std::vector<AppearanceCount> appearance_counts(std::span<const std::vector<TermKey>> survivors);

// Counts of the positive-output probability over `inputs` rows; bins are
// half-open except the last, which includes 1.
std::vector<std::size_t> probability_histogram(const HoppNetwork& net, const FeatureMatrix& inputs,
                                               std::size_t n_bins, std::size_t positive_output = 0);

struct FeatureHistogram {
  std::string name;
  double low = 0.0;
  double high = 0.0;
  std::vector<double> weights;  // sums to 1
};

std::vector<FeatureHistogram> feature_histograms(std::span<const BiopsyRecord> records,
                                                 const FeatureView& view, std::size_t n_bins);

// "mean_texture*worst_area" style label for a factor.
std::string factor_name(const TermKey& key, std::span<const std::string> input_names);

struct CheckResult {
  std::string description;
  std::optional<double> value;
  bool passed = false;
};
std::vector<CheckResult> evaluate_checks(const EnsembleReport& report);

nlohmann::json summary_json(const EnsembleReport& report);

// Writes summary.json, members.csv, appearance.csv, prob_hist.csv,
// feature_hist/*.csv and best_network.json into `dir`.
void write_report(const EnsembleReport& report, std::span<const BiopsyRecord> records,
                  const std::filesystem::path& dir);

struct SavedAppearance {
  std::size_t max_order = 0;
  std::size_t max_weights = 0;
  std::string factor;
  std::size_t count = 0;
};
// Re-aggregates factor survival from the members.csv files of saved reports.
std::vector<SavedAppearance> reaggregate_appearance(
    std::span<const std::filesystem::path> report_dirs);

// Shortest round-trip decimal text.
std::string format_double(double v);

}  // namespace hopp
