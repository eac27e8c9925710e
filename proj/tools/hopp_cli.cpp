#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hopp/bayes_oracle.hpp"
#include "hopp/dataset.hpp"
#include "hopp/error.hpp"
#include "hopp/features.hpp"
#include "hopp/harness.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;
namespace hf = hopp::features;

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw hopp::Error(hopp::ErrorKind::InvalidInput, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw hopp::Error(hopp::ErrorKind::Parse, path + ": " + e.what());
  }
}

// Optional TrainingConfig overrides, applied on top of the spec or config file.
struct TrainingOverrides {
  std::string config_file;
  std::optional<double> epsilon, mu, init_low, init_high;
  std::optional<std::size_t> epochs_pre, epochs_post, init_weights, max_weights;
  std::optional<std::string> cull, init_sampling, output_mode;
  std::optional<std::uint64_t> seed;

  void add_to(CLI::App* app) {
    app->add_option("--training-config", config_file, "TrainingConfig JSON file")
        ->check(CLI::ExistingFile);
    app->add_option("--epsilon", epsilon, "learning rate");
    app->add_option("--mu", mu, "momentum coefficient");
    app->add_option("--epochs-pre-cull", epochs_pre);
    app->add_option("--epochs-post-cull", epochs_post);
    app->add_option("--init-active-weights", init_weights);
    app->add_option("--init-low", init_low);
    app->add_option("--init-high", init_high);
    app->add_option("--max-weights", max_weights, "weight budget W (replaces the spec grid)");
    app->add_option("--cull-criterion", cull)
        ->check(CLI::IsMember({"magnitude", "nth-root-magnitude"}));
    app->add_option("--init-sampling", init_sampling)
        ->check(CLI::IsMember({"slots", "shared-keys"}));
    app->add_option("--output-mode", output_mode)
        ->check(CLI::IsMember({"independent", "reduced"}));
    app->add_option("--training-seed", seed, "seed used by single training runs");
  }

  hopp::TrainingConfig apply(hopp::TrainingConfig c) const {
    json j = c;
    if (!config_file.empty()) j.update(read_json(config_file));
    if (epsilon) j["epsilon"] = *epsilon;
    if (mu) j["mu"] = *mu;
    if (epochs_pre) j["epochs_pre_cull"] = *epochs_pre;
    if (epochs_post) j["epochs_post_cull"] = *epochs_post;
    if (init_weights) j["init_active_weights"] = *init_weights;
    if (init_low) j["init_range"][0] = *init_low;
    if (init_high) j["init_range"][1] = *init_high;
    if (max_weights) j["max_weights"] = *max_weights;
    if (cull) j["cull_criterion"] = *cull;
    if (init_sampling) j["init_sampling"] = *init_sampling;
    if (output_mode) j["output_mode"] = *output_mode;
    if (seed) j["seed"] = *seed;
    hopp::TrainingConfig out;
    from_json(j, out);
    out.validate();
    return out;
  }
};

std::string fmt(const std::optional<double>& v) {
  if (!v) return "n/a";
  std::ostringstream os;
  os << std::fixed << std::setprecision(4) << *v;
  return os.str();
}

void print_report(const hopp::EnsembleReport& report) {
  std::cout << report.spec.name << ": " << report.record_count << " records, "
            << report.input_names.size() << " inputs, " << report.spec.ensemble_size
            << " members, seed " << report.master_seed << "\n";
  std::cout << "  N    W  failed  test ACC (std)     test MCC (std)     train ACC\n";
  for (const auto& e : report.grid) {
    std::cout << std::setw(3) << e.max_order << std::setw(5) << e.max_weights << std::setw(8)
              << e.failed;
    if (e.test) {
      const auto& acc = (*e.test)[hopp::Measure::Acc];
      const auto& mcc = (*e.test)[hopp::Measure::Mcc];
      std::cout << "  " << fmt(acc.mean) << " (" << fmt(acc.stddev) << ")   " << fmt(mcc.mean)
                << " (" << fmt(mcc.stddev) << ")   " << fmt((*e.train)[hopp::Measure::Acc].mean);
    } else {
      std::cout << "  all members failed";
    }
    std::cout << "\n";
  }
}

int cmd_run(const std::string& spec_path, const std::string& out_dir,
            std::optional<std::string> data, std::uint64_t seed, std::size_t threads,
            std::optional<std::size_t> ensemble_size, const std::string& training_log,
            const TrainingOverrides& overrides, bool check) {
  auto spec = hopp::load_procedure(spec_path);
  if (data) spec.data_path = *data;
  if (ensemble_size) spec.ensemble_size = *ensemble_size;
  spec.training = overrides.apply(spec.training);
  if (overrides.max_weights) spec.weight_grid = {*overrides.max_weights};
  spec.validate();
  if (spec.data_path.empty()) {
    throw hopp::Error(hopp::ErrorKind::InvalidInput, "no data file: set \"data\" or --data");
  }
  const auto records = hopp::load_wdbc(spec.data_path);

  hopp::RunOptions options;
  options.threads = threads;
  std::ofstream log;
  if (!training_log.empty()) {
    log.open(training_log);
    if (!log) throw hopp::Error(hopp::ErrorKind::InvalidInput, "cannot write " + training_log);
    log << "epoch,cost\n";
    options.training_log = [&log](std::size_t epoch, double cost) {
      log << epoch << ',' << hopp::format_double(cost) << '\n';
    };
  }
  const auto report = hopp::run_procedure(spec, records, seed, options);
  hopp::write_report(report, records, out_dir);
  print_report(report);

  bool all_passed = true;
  for (const auto& c : hopp::evaluate_checks(report)) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.description << ": " << fmt(c.value) << "\n";
    all_passed = all_passed && c.passed;
  }
  return check && !all_passed ? 1 : 0;
}

int cmd_oracle(std::uint64_t seed, std::size_t tables, std::size_t max_inputs,
               const std::string& table_path, double tolerance) {
  double deviation = 0.0;
  if (!table_path.empty()) {
    const auto table = read_json(table_path).get<hopp::ClassConditionalTable>();
    table.validate(true);
    deviation = hopp::max_posterior_deviation(hopp::embed(table), table);
    std::cout << "table " << table_path << ": K=" << table.inputs << ", " << table.classes()
              << " classes, " << table.patterns() << " patterns\n";
  } else {
    const auto r = hopp::run_oracle_check(seed, tables, max_inputs);
    deviation = r.max_deviation;
    std::cout << r.tables << " tables, " << r.patterns_checked << " patterns checked\n";
  }
  std::cout << "max deviation " << std::scientific << std::setprecision(3) << deviation << "\n";
  return deviation < tolerance ? 0 : 1;
}

int cmd_extract(const std::string& path, const std::string& format,
                std::optional<std::size_t> chord_span, std::size_t symmetry_intervals) {
  const auto doc = hf::boundary_from_json(read_json(path));
  hf::ExtractionParams params;
  params.chord_span = chord_span;
  params.symmetry_intervals = symmetry_intervals;
  const auto f = hf::extract_all(doc.boundary, doc.grid ? &*doc.grid : nullptr, params);
  if (format == "json") {
    std::cout << json(f).dump(2) << "\n";
    return 0;
  }
  std::cout << "radius,texture,perimeter,area,smoothness,compactness,concavity,"
               "concave_points,symmetry,fractal_dimension\n";
  using hopp::format_double;
  std::cout << format_double(f.radius) << ',' << (f.texture ? format_double(*f.texture) : "")
            << ',' << format_double(f.perimeter) << ',' << format_double(f.area) << ','
            << format_double(f.smoothness) << ',' << format_double(f.compactness) << ','
            << format_double(f.concavity) << ',' << format_double(f.concave_points) << ','
            << format_double(f.symmetry) << ',' << format_double(f.fractal_dimension) << "\n";
  return 0;
}

int cmd_histograms(const std::string& data, const std::string& view, std::size_t bins,
                   const std::string& out_dir) {
  const auto records = hopp::load_wdbc(data);
  fs::create_directories(out_dir);
  for (const auto& h : hopp::feature_histograms(records, hopp::FeatureView::parse(view), bins)) {
    std::ofstream out(fs::path(out_dir) / (h.name + ".csv"));
    out << "bin_low,bin_high,weight\n";
    const double width = (h.high - h.low) / static_cast<double>(h.weights.size());
    for (std::size_t b = 0; b < h.weights.size(); ++b) {
      out << hopp::format_double(h.low + width * static_cast<double>(b)) << ','
          << hopp::format_double(h.low + width * static_cast<double>(b + 1)) << ','
          << hopp::format_double(h.weights[b]) << '\n';
    }
  }
  std::cout << "wrote histograms to " << out_dir << "\n";
  return 0;
}

int cmd_appearance(const std::vector<std::string>& dirs) {
  std::vector<fs::path> paths(dirs.begin(), dirs.end());
  std::cout << "max_order,max_weights,factor,count\n";
  for (const auto& a : hopp::reaggregate_appearance(paths)) {
    std::cout << a.max_order << ',' << a.max_weights << ',' << a.factor << ',' << a.count << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Higher-order probabilistic perceptron toolkit"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run a procedure spec and write a report directory");
  std::string spec_path, out_dir, training_log;
  std::optional<std::string> data;
  std::uint64_t seed = 1;
  std::size_t threads = 0;
  std::optional<std::size_t> ensemble_size;
  bool check = false;
  TrainingOverrides overrides;
  run->add_option("spec", spec_path, "procedure spec JSON")->required()->check(CLI::ExistingFile);
  run->add_option("-o,--out", out_dir, "report directory")->required();
  run->add_option("--data", data, "wdbc.data path (overrides the spec)");
  run->add_option("-s,--seed", seed, "master seed");
  run->add_option("-j,--threads", threads, "worker threads, 0 for all cores");
  run->add_option("-n,--ensemble-size", ensemble_size);
  run->add_option("--training-log", training_log, "CSV of (epoch, cost) for member 0");
  run->add_flag("--check", check, "exit 1 if any spec check fails");
  overrides.add_to(run);

  auto* oracle = app.add_subcommand("oracle-check", "exact Bayes embedding equivalence suite");
  std::uint64_t oracle_seed = 1;
  std::size_t tables = 20, max_inputs = 4;
  std::string table_path;
  double tolerance = 1e-10;
  oracle->add_option("-s,--seed", oracle_seed);
  oracle->add_option("--tables-per-size", tables);
  oracle->add_option("--max-inputs", max_inputs)->check(CLI::Range(1, 12));
  oracle->add_option("--table", table_path, "check one table document instead")
      ->check(CLI::ExistingFile);
  oracle->add_option("--tolerance", tolerance);

  auto* extract = app.add_subcommand("extract-features", "features of a boundary document");
  std::string boundary_path, format = "json";
  std::optional<std::size_t> chord_span;
  std::size_t symmetry_intervals = 16;
  extract->add_option("boundary", boundary_path)->required()->check(CLI::ExistingFile);
  extract->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));
  extract->add_option("--chord-span", chord_span);
  extract->add_option("--symmetry-intervals", symmetry_intervals);

  auto* hist = app.add_subcommand("histograms", "per-feature frequency histograms");
  std::string hist_data, view = "all30", hist_out;
  std::size_t bins = 20;
  hist->add_option("--data", hist_data)->required()->check(CLI::ExistingFile);
  hist->add_option("--view", view);
  hist->add_option("--bins", bins);
  hist->add_option("-o,--out", hist_out)->required();

  auto* appearance = app.add_subcommand("appearance", "re-aggregate factor survival counts");
  std::vector<std::string> dirs;
  appearance->add_option("reports", dirs)->required()->check(CLI::ExistingDirectory);

  auto* fixture = app.add_subcommand("fixture", "write a synthetic boundary document");
  std::string shape, fixture_out;
  double size = 10.0, depth = 3.0;
  std::size_t points = 256, notch = 5;
  unsigned iterations = 4;
  fixture->add_option("shape", shape)
      ->required()
      ->check(CLI::IsMember({"circle", "square", "notched-square", "koch"}));
  fixture->add_option("--size", size, "radius, side or snowflake side");
  fixture->add_option("--points", points, "points in total (circle) or per side");
  fixture->add_option("--notch-points", notch);
  fixture->add_option("--depth", depth);
  fixture->add_option("--iterations", iterations);
  fixture->add_option("-o,--out", fixture_out);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      return cmd_run(spec_path, out_dir, data, seed, threads, ensemble_size, training_log,
                     overrides, check);
    }
    if (*oracle) return cmd_oracle(oracle_seed, tables, max_inputs, table_path, tolerance);
    if (*extract) return cmd_extract(boundary_path, format, chord_span, symmetry_intervals);
    if (*hist) return cmd_histograms(hist_data, view, bins, hist_out);
    if (*appearance) return cmd_appearance(dirs);
    if (*fixture) {
      std::optional<hf::Boundary> b;
      if (shape == "circle") b = hf::fixtures::circle(size, points);
      if (shape == "square") b = hf::fixtures::square(size, points);
      if (shape == "notched-square") b = hf::fixtures::notched_square(points, notch, depth);
      if (shape == "koch") b = hf::fixtures::koch_snowflake(iterations, size);
      const auto text = hf::boundary_to_json(*b).dump(2);
      if (fixture_out.empty()) {
        std::cout << text << "\n";
      } else {
        std::ofstream(fixture_out) << text << "\n";
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
