#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "hopp/rng.hpp"

namespace hopp {

enum class Diagnosis { Malignant, Benign };

inline constexpr std::size_t kNuclearFeatures = 10;
inline constexpr std::size_t kRecordFeatures = 30;

// Nuclear features in the column order of wdbc.data.
inline constexpr std::array<const char*, kNuclearFeatures> kFeatureNames = {
    "radius",    "texture",        "perimeter", "area",     "smoothness",
    "compactness", "concavity", "concave_points", "symmetry", "fractal_dimension"};

// Per-biopsy statistic blocks, in file order.
enum class Statistic { Mean, StdDev, Worst };
inline constexpr std::array<const char*, 3> kStatisticNames = {"mean", "sd", "worst"};

struct BiopsyRecord {
  std::string id;
  Diagnosis diagnosis = Diagnosis::Benign;
  std::array<double, kRecordFeatures> features{};  // means, std-devs, worst

  bool malignant() const noexcept { return diagnosis == Diagnosis::Malignant; }
  bool operator==(const BiopsyRecord&) const = default;
};

// Reads the comma-separated layout: id, M|B, 30 decimals. Blank lines are
// ignored. Throws Parse naming the 1-based line number.
std::vector<BiopsyRecord> parse_wdbc(std::istream& is);
std::vector<BiopsyRecord> load_wdbc(const std::string& path);
void write_wdbc(std::ostream& os, std::span<const BiopsyRecord> records);

// Column name such as "mean_texture" or "worst_area".
std::string column_name(Statistic stat, std::size_t feature);
// Index into BiopsyRecord::features; throws InvalidView for unknown names.
std::size_t column_index(const std::string& name);

class FeatureView {
 public:
  static FeatureView all30();
  static FeatureView block(Statistic stat);
  // Throws InvalidView on unknown or repeated names.
  static FeatureView named(const std::vector<std::string>& names);
  // "all30", "means", "worst", "stddev", or a comma-separated name list.
  static FeatureView parse(const std::string& selector);

  std::span<const std::size_t> columns() const noexcept { return columns_; }
  const std::vector<std::string>& names() const noexcept { return names_; }
  std::size_t size() const noexcept { return columns_.size(); }
  const std::string& selector() const noexcept { return selector_; }

 private:
  std::string selector_;
  std::vector<std::size_t> columns_;
  std::vector<std::string> names_;
};

// Dense row-major matrix with named columns.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;
  std::vector<std::string> column_names;

  std::span<const double> row(std::size_t r) const { return {values.data() + r * cols, cols}; }
  std::span<double> row(std::size_t r) { return {values.data() + r * cols, cols}; }
  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

struct LabeledMatrix {
  FeatureMatrix x;
  std::vector<bool> malignant;
};

LabeledMatrix project(std::span<const BiopsyRecord> records, const FeatureView& view);

// Per-column min-max map fitted on a training matrix.
struct Scaler {
  std::vector<double> min;
  std::vector<double> max;

  static Scaler fit(const FeatureMatrix& train);
  // (v - min) / (max - min), not clipped; constant columns map to 0.
  FeatureMatrix apply(const FeatureMatrix& m) const;
};

struct ScaledPair {
  FeatureMatrix train;
  FeatureMatrix test;
  Scaler scaler;
};

ScaledPair fit_apply_scaler(const FeatureMatrix& train, const FeatureMatrix& test);

struct SplitSpec {
  double train_fraction = 0.9;
  bool stratified = false;
};

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Uniform random permutation; the first floor(fraction * n) rows train. In
// stratified mode each class is permuted and split separately. Throws
// InvalidInput when either side would be empty.
SplitIndices split(std::span<const BiopsyRecord> records, const SplitSpec& spec, Rng& rng);

// Rows `indices` of `m`, in that order.
FeatureMatrix select_rows(const FeatureMatrix& m, std::span<const std::size_t> indices);

// Quantization level of v (clipped to [0,1]) on 2^bits levels.
std::uint32_t quantize_level(double v, unsigned bits);
// Bits of `level`, most significant first, as 0.0/1.0.
std::vector<double> level_bits(std::uint32_t level, unsigned bits);
std::uint32_t bits_level(std::span<const double> bits);

// Each column becomes `bits` binary columns; 1 <= bits <= 8.
FeatureMatrix binarize(const FeatureMatrix& scaled, unsigned bits);

}  // namespace hopp
