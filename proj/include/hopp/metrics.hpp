#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace hopp {

// Tallies with "positive" meaning the malignant class.
struct ConfusionCounts {
  std::size_t true_pos = 0;
  std::size_t false_pos = 0;
  std::size_t true_neg = 0;
  std::size_t false_neg = 0;

  std::size_t total() const noexcept { return true_pos + false_pos + true_neg + false_neg; }
  bool operator==(const ConfusionCounts&) const = default;
};

ConfusionCounts confusion(std::span<const bool> predicted_positive,
                          std::span<const bool> truly_positive);

enum class Measure { Acc, Sens, Spec, Ppv, Mcc };
inline constexpr std::array<Measure, 5> kAllMeasures = {Measure::Acc, Measure::Sens,
                                                        Measure::Spec, Measure::Ppv,
                                                        Measure::Mcc};
std::string_view to_string(Measure m);

// A ratio whose denominator vanished is left empty rather than set to zero.
struct Measures {
  double acc = 0.0;
  std::optional<double> sens;
  std::optional<double> spec;
  std::optional<double> ppv;
  std::optional<double> mcc;

  std::optional<double> get(Measure m) const;
};

// Throws InvalidInput when the table is empty.
Measures measures(const ConfusionCounts& c);

struct MeasureStats {
  double mean = 0.0;
  double stddev = 0.0;     // population form
  std::size_t count = 0;   // samples that had the measure defined
  std::size_t excluded = 0;
};

struct MetricSummary {
  std::array<MeasureStats, 5> stats{};

  const MeasureStats& operator[](Measure m) const { return stats[static_cast<std::size_t>(m)]; }
};

// Mean and population standard deviation per measure over the defined
// entries. Throws InvalidInput on an empty sample list.
MetricSummary summarize(std::span<const Measures> samples);

void to_json(nlohmann::json& j, const Measures& m);
void to_json(nlohmann::json& j, const MetricSummary& s);

}  // namespace hopp
