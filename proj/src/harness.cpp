#include "hopp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "hopp/error.hpp"

namespace hopp {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, ptr};
}

void ProcedureSpec::validate() const {
  if (ensemble_size < 1) throw Error(ErrorKind::InvalidInput, "ensemble_size must be at least 1");
  if (max_orders.empty()) throw Error(ErrorKind::InvalidInput, "no maximum order given");
  if (weight_grid.empty()) throw Error(ErrorKind::InvalidInput, "empty weight grid");
  for (auto w : weight_grid) {
    if (w < 1) throw Error(ErrorKind::InvalidInput, "weight budgets must be at least 1");
  }
  if (bits && (*bits < 1 || *bits > 8)) throw Error(ErrorKind::InvalidInput, "bits must be 1..8");
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw Error(ErrorKind::InvalidInput, "threshold must lie in (0, 1)");
  }
  if (histogram_bins < 2) throw Error(ErrorKind::InvalidInput, "histogram_bins must be >= 2");
  training.validate();
}

namespace {

Measure parse_measure(const std::string& name) {
  for (Measure m : kAllMeasures) {
    if (name == to_string(m)) return m;
  }
  throw Error(ErrorKind::InvalidInput, "unknown measure '" + name + "'");
}

template <typename T>
std::vector<T> scalar_or_list(const nlohmann::json& j) {
  if (j.is_array()) return j.get<std::vector<T>>();
  return {j.get<T>()};
}

}  // namespace

void from_json(const nlohmann::json& j, ProcedureSpec& spec) {
  try {
    spec.name = j.value("name", spec.name);
    spec.data_path = j.value("data", spec.data_path);
    spec.feature_view = j.value("feature_view", spec.feature_view);
    if (j.contains("max_order")) spec.max_orders = scalar_or_list<std::size_t>(j.at("max_order"));
    if (j.contains("weights")) spec.weight_grid = scalar_or_list<std::size_t>(j.at("weights"));
    if (j.contains("bits") && !j.at("bits").is_null()) spec.bits = j.at("bits").get<unsigned>();
    spec.ensemble_size = j.value("ensemble_size", spec.ensemble_size);
    if (j.contains("split")) {
      spec.split.train_fraction = j.at("split").value("train_fraction", spec.split.train_fraction);
      spec.split.stratified = j.at("split").value("stratified", spec.split.stratified);
    }
    if (j.contains("training")) from_json(j.at("training"), spec.training);
    if (j.contains("cull_criterion")) {
      spec.training.cull_criterion = parse_cull_criterion(j.at("cull_criterion").get<std::string>());
    }
    spec.threshold = j.value("threshold", spec.threshold);
    spec.histogram_bins = j.value("histogram_bins", spec.histogram_bins);
    spec.checks.clear();
    if (j.contains("checks")) {
      for (const auto& c : j.at("checks")) {
        ReportCheck check;
        check.set = c.value("set", check.set);
        check.measure = parse_measure(c.value("measure", std::string("ACC")));
        check.stat = c.value("stat", check.stat);
        if (c.contains("min")) check.min = c.at("min").get<double>();
        if (c.contains("max")) check.max = c.at("max").get<double>();
        if (c.contains("max_order")) check.max_order = c.at("max_order").get<std::size_t>();
        if (c.contains("max_weights")) check.max_weights = c.at("max_weights").get<std::size_t>();
        if (check.set != "train" && check.set != "test") {
          throw Error(ErrorKind::InvalidInput, "check set must be train or test");
        }
        if (check.stat != "mean" && check.stat != "std") {
          throw Error(ErrorKind::InvalidInput, "check stat must be mean or std");
        }
        spec.checks.push_back(check);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("procedure spec: ") + e.what());
  }
}

void to_json(nlohmann::json& j, const ProcedureSpec& spec) {
  j = {{"name", spec.name},
       {"feature_view", spec.feature_view},
       {"max_order", spec.max_orders},
       {"weights", spec.weight_grid},
       {"bits", spec.bits ? nlohmann::json(*spec.bits) : nlohmann::json(nullptr)},
       {"ensemble_size", spec.ensemble_size},
       {"split", {{"train_fraction", spec.split.train_fraction},
                  {"stratified", spec.split.stratified}}},
       {"training", spec.training},
       {"threshold", spec.threshold},
       {"histogram_bins", spec.histogram_bins}};
  auto& checks = j["checks"] = nlohmann::json::array();
  for (const auto& c : spec.checks) {
    nlohmann::json item = {{"set", c.set}, {"measure", to_string(c.measure)}, {"stat", c.stat}};
    if (c.min) item["min"] = *c.min;
    if (c.max) item["max"] = *c.max;
    if (c.max_order) item["max_order"] = *c.max_order;
    if (c.max_weights) item["max_weights"] = *c.max_weights;
    checks.push_back(item);
  }
}

ProcedureSpec load_procedure(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidInput, "cannot open procedure spec " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, path.string() + ": " + e.what());
  }
  ProcedureSpec spec = j.get<ProcedureSpec>();
  if (!spec.data_path.empty() && fs::path(spec.data_path).is_relative()) {
    spec.data_path = (path.parent_path() / spec.data_path).lexically_normal().string();
  }
  spec.validate();
  return spec;
}

namespace {

constexpr std::size_t kPositiveOutput = 0;  // malignant

struct PreparedMember {
  TrainingSet train_set;
  FeatureMatrix train_x;
  FeatureMatrix test_x;
  std::vector<bool> train_truth;
  std::vector<bool> test_truth;
  Scaler scaler;
};

ConfusionCounts evaluate(const HoppNetwork& net, const FeatureMatrix& x,
                         const std::vector<bool>& truth, double threshold) {
  std::vector<char> predicted(x.rows);
  for (std::size_t r = 0; r < x.rows; ++r) {
    predicted[r] = predict(net, x.row(r), threshold, kPositiveOutput).positive;
  }
  std::vector<char> truth_bytes(truth.begin(), truth.end());
  return confusion(std::span<const bool>(reinterpret_cast<const bool*>(predicted.data()), x.rows),
                   std::span<const bool>(reinterpret_cast<const bool*>(truth_bytes.data()),
                                         truth_bytes.size()));
}

FeatureMatrix network_inputs(const FeatureMatrix& scaled, const std::optional<unsigned>& bits) {
  return bits ? binarize(scaled, *bits) : scaled;
}

double rank_value(const std::optional<double>& v) { return v ? *v : -2.0; }

}  // namespace

EnsembleReport run_procedure(const ProcedureSpec& spec, std::span<const BiopsyRecord> records,
                             std::uint64_t master_seed, const RunOptions& options) {
  spec.validate();
  const FeatureView view = FeatureView::parse(spec.feature_view);
  const LabeledMatrix full = project(records, view);

  EnsembleReport report;
  report.spec = spec;
  report.master_seed = master_seed;
  report.record_count = records.size();
  {
    FeatureMatrix header;
    header.cols = full.x.cols;
    header.column_names = full.x.column_names;
    report.input_names = network_inputs(header, spec.bits).column_names;
  }
  const std::size_t inputs = report.input_names.size();
  for (auto n : spec.max_orders) {
    if (n > inputs) throw Error(ErrorKind::InvalidDimension, "maximum order exceeds input count");
    for (auto w : spec.weight_grid) {
      GridResult entry;
      entry.max_order = n;
      entry.max_weights = w;
      entry.members.resize(spec.ensemble_size);
      report.grid.push_back(std::move(entry));
    }
  }

  auto run_member = [&](std::size_t m) {
    const std::uint64_t seed = derive_seed(master_seed, m);
    Rng rng(seed);
    const SplitIndices parts = split(records, spec.split, rng);

    PreparedMember prep;
    auto train_raw = select_rows(full.x, parts.train);
    auto test_raw = select_rows(full.x, parts.test);
    auto scaled = fit_apply_scaler(train_raw, test_raw);
    prep.scaler = scaled.scaler;
    prep.train_x = network_inputs(scaled.train, spec.bits);
    prep.test_x = network_inputs(scaled.test, spec.bits);
    for (auto i : parts.train) prep.train_truth.push_back(full.malignant[i]);
    for (auto i : parts.test) prep.test_truth.push_back(full.malignant[i]);
    prep.train_set.classes = 2;
    for (std::size_t r = 0; r < prep.train_x.rows; ++r) {
      const auto row = prep.train_x.row(r);
      prep.train_set.inputs.emplace_back(row.begin(), row.end());
      prep.train_set.labels.push_back(prep.train_truth[r] ? kPositiveOutput : 1 - kPositiveOutput);
    }

    TrainingConfig config = spec.training;
    config.seed = seed;
    std::size_t entry_index = 0;
    for (std::size_t ni = 0; ni < spec.max_orders.size(); ++ni) {
      Rng order_rng = rng;
      const bool log_this = options.training_log && m == 0 && ni == 0;
      std::optional<HoppNetwork> pretrained;
      std::string failure;
      try {
        auto init = initialize(inputs, 2, spec.max_orders[ni], config, order_rng);
        train_epochs(init.net, init.momentum, prep.train_set, config.epochs_pre_cull, config,
                     order_rng, log_this ? options.training_log : EpochObserver{});
        pretrained = std::move(init.net);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::Divergence) throw;
        failure = e.what();
      }
      for (std::size_t wi = 0; wi < spec.weight_grid.size(); ++wi, ++entry_index) {
        MemberResult& result = report.grid[entry_index].members[m];
        result.index = m;
        result.seed = seed;
        result.scaler = prep.scaler;
        if (!pretrained) {
          result.failed = true;
          result.failure = failure;
          continue;
        }
        Rng budget_rng = order_rng;
        try {
          const bool log_budget = log_this && wi == 0;
          auto trained = cull_and_retrain(*pretrained, prep.train_set, spec.weight_grid[wi],
                                          config, budget_rng,
                                          log_budget ? options.training_log : EpochObserver{});
          result.train_counts =
              evaluate(trained.net, prep.train_x, prep.train_truth, spec.threshold);
          result.test_counts = evaluate(trained.net, prep.test_x, prep.test_truth, spec.threshold);
          result.train = measures(result.train_counts);
          result.test = measures(result.test_counts);
          result.factors = std::move(trained.surviving_factors);
          result.net = std::move(trained.net);
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::Divergence) throw;
          result.failed = true;
          result.failure = e.what();
        }
      }
    }
  };

  std::size_t threads = options.threads ? options.threads : std::thread::hardware_concurrency();
  threads = std::clamp<std::size_t>(threads, 1, spec.ensemble_size);
  if (options.training_log) threads = 1;  // the observer is not required to be thread-safe
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (std::size_t m = next++; m < spec.ensemble_size; m = next++) run_member(m);
        } catch (...) {
          errors[t] = std::current_exception();
          next = spec.ensemble_size;
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  // Aggregation, in member order.
  double best_acc = -1.0, best_mcc = -3.0;
  for (std::size_t gi = 0; gi < report.grid.size(); ++gi) {
    auto& entry = report.grid[gi];
    std::vector<Measures> train, test;
    std::vector<std::vector<TermKey>> survivors;
    for (const auto& member : entry.members) {
      if (member.failed) {
        ++entry.failed;
        continue;
      }
      train.push_back(member.train);
      test.push_back(member.test);
      survivors.push_back(member.factors);
      if (!entry.best_member) {
        entry.best_member = member.index;
      } else {
        const auto& best = entry.members[*entry.best_member].test;
        if (member.test.acc > best.acc ||
            (member.test.acc == best.acc && rank_value(member.test.mcc) > rank_value(best.mcc))) {
          entry.best_member = member.index;
        }
      }
    }
    if (train.empty()) continue;
    entry.train = summarize(train);
    entry.test = summarize(test);
    entry.appearance = appearance_counts(survivors);
    const double acc = (*entry.test)[Measure::Acc].mean;
    const double mcc = (*entry.test)[Measure::Mcc].mean;
    if (acc > best_acc || (acc == best_acc && mcc > best_mcc)) {
      best_acc = acc;
      best_mcc = mcc;
      report.best_entry = gi;
    }
  }

  if (report.best_entry) {
    const auto& entry = report.grid[*report.best_entry];
    const auto& member = entry.members[*entry.best_member];
    const auto all = network_inputs(member.scaler.apply(full.x), spec.bits);
    report.probability_histogram =
        probability_histogram(*member.net, all, spec.histogram_bins, kPositiveOutput);
    for (std::size_t r = 0; r < all.rows; ++r) {
      report.best_probabilities.push_back(outputs(*member.net, all.row(r))[kPositiveOutput]);
    }
  }
  return report;
}

std::vector<AppearanceCount> appearance_counts(std::span<const std::vector<TermKey>> survivors) {
  std::map<TermKey, std::size_t> counts;
  for (const auto& member : survivors) {
    std::vector<TermKey> keys = member;
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    for (const auto& k : keys) {
      if (!k.is_bias()) ++counts[k];
    }
  }
  std::vector<AppearanceCount> out;
  for (auto& [key, count] : counts) out.push_back({key, count});
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.count > b.count; });
  return out;
}

std::vector<std::size_t> probability_histogram(const HoppNetwork& net, const FeatureMatrix& inputs,
                                               std::size_t n_bins, std::size_t positive_output) {
  if (n_bins < 2) throw Error(ErrorKind::InvalidInput, "need at least 2 histogram bins");
  std::vector<std::size_t> bins(n_bins, 0);
  for (std::size_t r = 0; r < inputs.rows; ++r) {
    const double p = outputs(net, inputs.row(r)).at(positive_output);
    const auto b = static_cast<std::size_t>(std::floor(p * static_cast<double>(n_bins)));
    ++bins[std::min(b, n_bins - 1)];
  }
  return bins;
}

std::vector<FeatureHistogram> feature_histograms(std::span<const BiopsyRecord> records,
                                                 const FeatureView& view, std::size_t n_bins) {
  if (n_bins < 2) throw Error(ErrorKind::InvalidInput, "need at least 2 histogram bins");
  const auto m = project(records, view);
  std::vector<FeatureHistogram> out;
  for (std::size_t c = 0; c < m.x.cols; ++c) {
    FeatureHistogram h;
    h.name = m.x.column_names[c];
    h.weights.assign(n_bins, 0.0);
    if (m.x.rows == 0) {
      out.push_back(std::move(h));
      continue;
    }
    h.low = INFINITY;
    h.high = -INFINITY;
    for (std::size_t r = 0; r < m.x.rows; ++r) {
      h.low = std::min(h.low, m.x.at(r, c));
      h.high = std::max(h.high, m.x.at(r, c));
    }
    const double width = h.high - h.low;
    for (std::size_t r = 0; r < m.x.rows; ++r) {
      std::size_t b = 0;
      if (width > 0.0) {
        b = static_cast<std::size_t>(
            std::floor((m.x.at(r, c) - h.low) / width * static_cast<double>(n_bins)));
        b = std::min(b, n_bins - 1);
      }
      h.weights[b] += 1.0;
    }
    for (double& w : h.weights) w /= static_cast<double>(m.x.rows);
    out.push_back(std::move(h));
  }
  return out;
}

std::string factor_name(const TermKey& key, std::span<const std::string> input_names) {
  std::string out;
  for (auto i : key.indices()) {
    if (!out.empty()) out += '*';
    out += i < input_names.size() ? input_names[i] : "x" + std::to_string(i);
  }
  return out;
}

namespace {

const GridResult* find_entry(const EnsembleReport& report, const ReportCheck& check) {
  for (const auto& entry : report.grid) {
    if (check.max_order && entry.max_order != *check.max_order) continue;
    if (check.max_weights && entry.max_weights != *check.max_weights) continue;
    return &entry;
  }
  return nullptr;
}

}  // namespace

std::vector<CheckResult> evaluate_checks(const EnsembleReport& report) {
  std::vector<CheckResult> out;
  for (const auto& check : report.spec.checks) {
    CheckResult r;
    std::ostringstream desc;
    desc << check.set << ' ' << to_string(check.measure) << ' ' << check.stat;
    if (check.min) desc << " >= " << *check.min;
    if (check.max) desc << (check.min ? " and" : "") << " <= " << *check.max;
    if (const auto* entry = find_entry(report, check)) {
      desc << " (N=" << entry->max_order << ", W=" << entry->max_weights << ")";
      const auto& summary = check.set == "train" ? entry->train : entry->test;
      if (summary) {
        const auto& st = (*summary)[check.measure];
        r.value = check.stat == "mean" ? st.mean : st.stddev;
        r.passed = (!check.min || *r.value >= *check.min) && (!check.max || *r.value <= *check.max);
      }
    }
    r.description = desc.str();
    out.push_back(std::move(r));
  }
  return out;
}

nlohmann::json summary_json(const EnsembleReport& report) {
  nlohmann::json j;
  j["name"] = report.spec.name;
  j["master_seed"] = report.master_seed;
  j["records"] = report.record_count;
  j["inputs"] = report.input_names;
  j["spec"] = report.spec;
  auto& grid = j["grid"] = nlohmann::json::array();
  for (const auto& entry : report.grid) {
    nlohmann::json e = {{"max_order", entry.max_order},
                        {"max_weights", entry.max_weights},
                        {"members", entry.members.size()},
                        {"failed", entry.failed}};
    e["train"] = entry.train ? nlohmann::json(*entry.train) : nlohmann::json(nullptr);
    e["test"] = entry.test ? nlohmann::json(*entry.test) : nlohmann::json(nullptr);
    if (entry.best_member) {
      const auto& best = entry.members[*entry.best_member];
      e["best_member"] = {{"index", best.index}, {"test", best.test}, {"train", best.train}};
    }
    auto& top = e["top_factors"] = nlohmann::json::array();
    for (std::size_t i = 0; i < std::min<std::size_t>(10, entry.appearance.size()); ++i) {
      top.push_back({{"factor", factor_name(entry.appearance[i].factor, report.input_names)},
                     {"count", entry.appearance[i].count}});
    }
    grid.push_back(std::move(e));
  }
  if (report.best_entry) {
    const auto& entry = report.grid[*report.best_entry];
    j["best"] = {{"max_order", entry.max_order},
                 {"max_weights", entry.max_weights},
                 {"member", *entry.best_member}};
  }
  j["probability_histogram"] = report.probability_histogram;
  auto& checks = j["checks"] = nlohmann::json::array();
  for (const auto& c : evaluate_checks(report)) {
    checks.push_back({{"check", c.description},
                      {"value", c.value ? nlohmann::json(*c.value) : nlohmann::json(nullptr)},
                      {"passed", c.passed}});
  }
  return j;
}

namespace {

void write_measures(std::ostream& os, const Measures& m) {
  for (Measure k : kAllMeasures) {
    auto v = m.get(k);
    os << ',' << (v ? format_double(*v) : "");
  }
}

void write_counts(std::ostream& os, const ConfusionCounts& c) {
  os << ',' << c.true_pos << ',' << c.false_pos << ',' << c.true_neg << ',' << c.false_neg;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::InvalidInput, "cannot write " + path.string());
  return out;
}

}  // namespace

void write_report(const EnsembleReport& report, std::span<const BiopsyRecord> records,
                  const fs::path& dir) {
  fs::create_directories(dir / "feature_hist");
  open_out(dir / "summary.json") << summary_json(report).dump(2) << '\n';

  {
    auto out = open_out(dir / "members.csv");
    out << "max_order,max_weights,member,seed,split,status,ACC,SENS,SPEC,PPV,MCC,tp,fp,tn,fn,"
           "factors\n";
    for (const auto& entry : report.grid) {
      for (const auto& m : entry.members) {
        std::string factors;
        for (const auto& f : m.factors) {
          if (!factors.empty()) factors += ';';
          factors += factor_name(f, report.input_names);
        }
        for (const char* part : {"train", "test"}) {
          const bool train = part[1] == 'r';
          out << entry.max_order << ',' << entry.max_weights << ',' << m.index << ',' << m.seed
              << ',' << part << ',' << (m.failed ? "failed" : "ok");
          write_measures(out, train ? m.train : m.test);
          write_counts(out, train ? m.train_counts : m.test_counts);
          out << ',' << factors << '\n';
        }
      }
    }
  }

  {
    auto out = open_out(dir / "appearance.csv");
    out << "max_order,max_weights,factor,order,count\n";
    for (const auto& entry : report.grid) {
      for (const auto& a : entry.appearance) {
        out << entry.max_order << ',' << entry.max_weights << ','
            << factor_name(a.factor, report.input_names) << ',' << a.factor.order() << ','
            << a.count << '\n';
      }
    }
  }

  {
    auto out = open_out(dir / "prob_hist.csv");
    out << "bin_low,bin_high,count\n";
    const auto n = report.probability_histogram.size();
    for (std::size_t b = 0; b < n; ++b) {
      out << format_double(static_cast<double>(b) / static_cast<double>(n)) << ','
          << format_double(static_cast<double>(b + 1) / static_cast<double>(n)) << ','
          << report.probability_histogram[b] << '\n';
    }
  }

  for (const auto& h : feature_histograms(records, FeatureView::parse(report.spec.feature_view),
                                          report.spec.histogram_bins)) {
    auto out = open_out(dir / "feature_hist" / (h.name + ".csv"));
    out << "bin_low,bin_high,weight\n";
    const auto n = h.weights.size();
    const double width = (h.high - h.low) / static_cast<double>(n);
    for (std::size_t b = 0; b < n; ++b) {
      out << format_double(h.low + width * static_cast<double>(b)) << ','
          << format_double(h.low + width * static_cast<double>(b + 1)) << ','
          << format_double(h.weights[b]) << '\n';
    }
  }

  if (report.best_entry) {
    const auto& entry = report.grid[*report.best_entry];
    auto out = open_out(dir / "best_network.json");
    write_network(out, *entry.members[*entry.best_member].net);
  }
}

std::vector<SavedAppearance> reaggregate_appearance(std::span<const fs::path> report_dirs) {
  std::map<std::tuple<std::size_t, std::size_t, std::string>, std::size_t> counts;
  for (const auto& dir : report_dirs) {
    std::ifstream in(dir / "members.csv");
    if (!in) throw Error(ErrorKind::InvalidInput, "no members.csv in " + dir.string());
    std::string line;
    std::getline(in, line);  // header
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      std::vector<std::string> fields;
      std::stringstream ss(line);
      std::string field;
      while (std::getline(ss, field, ',')) fields.push_back(field);
      if (!line.empty() && line.back() == ',') fields.emplace_back();
      if (fields.size() != 16) {
        throw Error(ErrorKind::Parse, (dir / "members.csv").string() + " line " +
                                          std::to_string(line_no) + ": expected 16 fields");
      }
      if (fields[4] != "train" || fields[5] != "ok") continue;
      const auto order = std::stoul(fields[0]);
      const auto budget = std::stoul(fields[1]);
      std::stringstream fs_(fields[15]);
      std::string factor;
      while (std::getline(fs_, factor, ';')) {
        if (!factor.empty()) ++counts[{order, budget, factor}];
      }
    }
  }
  std::vector<SavedAppearance> out;
  for (const auto& [key, count] : counts) {
    out.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), count});
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.max_order != b.max_order) return a.max_order < b.max_order;
    if (a.max_weights != b.max_weights) return a.max_weights < b.max_weights;
    return a.count > b.count;
  });
  return out;
}

}  // namespace hopp
