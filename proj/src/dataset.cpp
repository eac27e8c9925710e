#include "hopp/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <string_view>

#include "hopp/error.hpp"

namespace hopp {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

[[noreturn]] void parse_fail(std::size_t line, const std::string& what) {
  throw Error(ErrorKind::Parse, "line " + std::to_string(line) + ": " + what);
}

}  // namespace

std::vector<BiopsyRecord> parse_wdbc(std::istream& is) {
  std::vector<BiopsyRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_commas(line);
    if (fields.size() != 2 + kRecordFeatures) {
      parse_fail(line_no, "expected " + std::to_string(2 + kRecordFeatures) + " fields, found " +
                              std::to_string(fields.size()));
    }
    BiopsyRecord rec;
    rec.id = std::string(fields[0]);
    if (fields[1] == "M") {
      rec.diagnosis = Diagnosis::Malignant;
    } else if (fields[1] == "B") {
      rec.diagnosis = Diagnosis::Benign;
    } else {
      parse_fail(line_no, "unknown diagnosis code '" + std::string(fields[1]) + "'");
    }
    for (std::size_t f = 0; f < kRecordFeatures; ++f) {
      const auto text = fields[2 + f];
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
      if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v)) {
        parse_fail(line_no, "field " + std::to_string(3 + f) + " is not a number: '" +
                                std::string(text) + "'");
      }
      rec.features[f] = v;
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<BiopsyRecord> load_wdbc(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidInput, "cannot open data file " + path);
  return parse_wdbc(in);
}

void write_wdbc(std::ostream& os, std::span<const BiopsyRecord> records) {
  char buf[64];
  for (const auto& rec : records) {
    os << rec.id << ',' << (rec.malignant() ? 'M' : 'B');
    for (double v : rec.features) {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
      os << ',' << std::string_view(buf, static_cast<std::size_t>(ptr - buf));
    }
    os << '\n';
  }
}

std::string column_name(Statistic stat, std::size_t feature) {
  return std::string(kStatisticNames[static_cast<std::size_t>(stat)]) + "_" +
         kFeatureNames.at(feature);
}

std::size_t column_index(const std::string& name) {
  for (std::size_t s = 0; s < kStatisticNames.size(); ++s) {
    for (std::size_t f = 0; f < kNuclearFeatures; ++f) {
      if (name == column_name(static_cast<Statistic>(s), f)) return s * kNuclearFeatures + f;
    }
  }
  throw Error(ErrorKind::InvalidView, "unknown column '" + name + "'");
}

FeatureView FeatureView::all30() {
  FeatureView v;
  v.selector_ = "all30";
  for (std::size_t c = 0; c < kRecordFeatures; ++c) {
    v.columns_.push_back(c);
    v.names_.push_back(column_name(static_cast<Statistic>(c / kNuclearFeatures),
                                   c % kNuclearFeatures));
  }
  return v;
}

FeatureView FeatureView::block(Statistic stat) {
  FeatureView v;
  v.selector_ = stat == Statistic::Mean ? "means" : stat == Statistic::Worst ? "worst" : "stddev";
  for (std::size_t f = 0; f < kNuclearFeatures; ++f) {
    v.columns_.push_back(static_cast<std::size_t>(stat) * kNuclearFeatures + f);
    v.names_.push_back(column_name(stat, f));
  }
  return v;
}

FeatureView FeatureView::named(const std::vector<std::string>& names) {
  if (names.empty()) throw Error(ErrorKind::InvalidView, "empty column list");
  FeatureView v;
  std::set<std::size_t> seen;
  for (const auto& name : names) {
    const auto c = column_index(name);
    if (!seen.insert(c).second) throw Error(ErrorKind::InvalidView, "repeated column " + name);
    v.columns_.push_back(c);
    v.names_.push_back(name);
    if (!v.selector_.empty()) v.selector_ += ',';
    v.selector_ += name;
  }
  return v;
}

FeatureView FeatureView::parse(const std::string& selector) {
  if (selector == "all30") return all30();
  if (selector == "means") return block(Statistic::Mean);
  if (selector == "worst") return block(Statistic::Worst);
  if (selector == "stddev") return block(Statistic::StdDev);
  std::vector<std::string> names;
  for (auto field : split_commas(selector)) names.emplace_back(field);
  return named(names);
}

LabeledMatrix project(std::span<const BiopsyRecord> records, const FeatureView& view) {
  LabeledMatrix out;
  out.x.rows = records.size();
  out.x.cols = view.size();
  out.x.column_names = view.names();
  out.x.values.reserve(out.x.rows * out.x.cols);
  for (const auto& rec : records) {
    for (auto c : view.columns()) out.x.values.push_back(rec.features[c]);
    out.malignant.push_back(rec.malignant());
  }
  return out;
}

Scaler Scaler::fit(const FeatureMatrix& train) {
  Scaler s;
  s.min.assign(train.cols, INFINITY);
  s.max.assign(train.cols, -INFINITY);
  for (std::size_t r = 0; r < train.rows; ++r) {
    for (std::size_t c = 0; c < train.cols; ++c) {
      s.min[c] = std::min(s.min[c], train.at(r, c));
      s.max[c] = std::max(s.max[c], train.at(r, c));
    }
  }
  if (train.rows == 0) {
    s.min.assign(train.cols, 0.0);
    s.max.assign(train.cols, 0.0);
  }
  return s;
}

FeatureMatrix Scaler::apply(const FeatureMatrix& m) const {
  if (m.cols != min.size()) {
    throw Error(ErrorKind::InvalidDimension, "scaler fitted on a different column count");
  }
  FeatureMatrix out = m;
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (std::size_t c = 0; c < m.cols; ++c) {
      const double span = max[c] - min[c];
      out.values[r * m.cols + c] = span > 0.0 ? (m.at(r, c) - min[c]) / span : 0.0;
    }
  }
  return out;
}

ScaledPair fit_apply_scaler(const FeatureMatrix& train, const FeatureMatrix& test) {
  if (train.cols != test.cols) {
    throw Error(ErrorKind::InvalidDimension, "train and test matrices differ in column count");
  }
  auto scaler = Scaler::fit(train);
  return {scaler.apply(train), scaler.apply(test), std::move(scaler)};
}

SplitIndices split(std::span<const BiopsyRecord> records, const SplitSpec& spec, Rng& rng) {
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
    throw Error(ErrorKind::InvalidInput, "train fraction must lie in (0, 1)");
  }
  SplitIndices out;
  auto take = [&](std::vector<std::size_t> idx) {
    rng.shuffle(std::span<std::size_t>(idx));
    const auto n_train = static_cast<std::size_t>(
        std::floor(spec.train_fraction * static_cast<double>(idx.size())));
    out.train.insert(out.train.end(), idx.begin(), idx.begin() + n_train);
    out.test.insert(out.test.end(), idx.begin() + n_train, idx.end());
  };
  if (spec.stratified) {
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < records.size(); ++i) {
      (records[i].malignant() ? pos : neg).push_back(i);
    }
    take(std::move(pos));
    take(std::move(neg));
  } else {
    std::vector<std::size_t> all(records.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    take(std::move(all));
  }
  if (out.train.empty() || out.test.empty()) {
    throw Error(ErrorKind::InvalidInput, "split leaves an empty train or test set");
  }
  return out;
}

FeatureMatrix select_rows(const FeatureMatrix& m, std::span<const std::size_t> indices) {
  FeatureMatrix out;
  out.rows = indices.size();
  out.cols = m.cols;
  out.column_names = m.column_names;
  out.values.reserve(out.rows * out.cols);
  for (auto r : indices) {
    const auto row = m.row(r);
    out.values.insert(out.values.end(), row.begin(), row.end());
  }
  return out;
}

std::uint32_t quantize_level(double v, unsigned bits) {
  const double levels = std::ldexp(1.0, static_cast<int>(bits));
  const double clipped = std::clamp(v, 0.0, 1.0);
  const auto q = static_cast<std::uint32_t>(std::floor(clipped * levels));
  return std::min(q, static_cast<std::uint32_t>(levels) - 1);
}

std::vector<double> level_bits(std::uint32_t level, unsigned bits) {
  std::vector<double> out(bits);
  for (unsigned b = 0; b < bits; ++b) out[b] = (level >> (bits - 1 - b)) & 1u ? 1.0 : 0.0;
  return out;
}

std::uint32_t bits_level(std::span<const double> bits) {
  std::uint32_t level = 0;
  for (double b : bits) level = (level << 1) | (b != 0.0 ? 1u : 0u);
  return level;
}

FeatureMatrix binarize(const FeatureMatrix& scaled, unsigned bits) {
  if (bits < 1 || bits > 8) throw Error(ErrorKind::InvalidInput, "bits must lie in [1, 8]");
  FeatureMatrix out;
  out.rows = scaled.rows;
  out.cols = scaled.cols * bits;
  for (std::size_t c = 0; c < scaled.cols; ++c) {
    const std::string base = c < scaled.column_names.size() ? scaled.column_names[c]
                                                            : "x" + std::to_string(c);
    for (unsigned b = 0; b < bits; ++b) out.column_names.push_back(base + ".b" + std::to_string(b));
  }
  out.values.reserve(out.rows * out.cols);
  for (std::size_t r = 0; r < scaled.rows; ++r) {
    for (std::size_t c = 0; c < scaled.cols; ++c) {
      const auto b = level_bits(quantize_level(scaled.at(r, c), bits), bits);
      out.values.insert(out.values.end(), b.begin(), b.end());
    }
  }
  return out;
}

}  // namespace hopp
