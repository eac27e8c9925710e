#include "hopp/metrics.hpp"

#include <cmath>

#include "hopp/error.hpp"

namespace hopp {

ConfusionCounts confusion(std::span<const bool> predicted_positive,
                          std::span<const bool> truly_positive) {
  if (predicted_positive.size() != truly_positive.size()) {
    throw Error(ErrorKind::InvalidInput, "prediction and truth sequences differ in length");
  }
  ConfusionCounts c;
  for (std::size_t i = 0; i < predicted_positive.size(); ++i) {
    if (predicted_positive[i]) {
      ++(truly_positive[i] ? c.true_pos : c.false_pos);
    } else {
      ++(truly_positive[i] ? c.false_neg : c.true_neg);
    }
  }
  return c;
}

std::string_view to_string(Measure m) {
  switch (m) {
    case Measure::Acc: return "ACC";
    case Measure::Sens: return "SENS";
    case Measure::Spec: return "SPEC";
    case Measure::Ppv: return "PPV";
    case Measure::Mcc: return "MCC";
  }
  return "?";
}

std::optional<double> Measures::get(Measure m) const {
  switch (m) {
    case Measure::Acc: return acc;
    case Measure::Sens: return sens;
    case Measure::Spec: return spec;
    case Measure::Ppv: return ppv;
    case Measure::Mcc: return mcc;
  }
  return std::nullopt;
}

namespace {
std::optional<double> ratio(double num, double den) {
  if (den == 0.0) return std::nullopt;
  return num / den;
}
}  // namespace

Measures measures(const ConfusionCounts& c) {
  if (c.total() == 0) throw Error(ErrorKind::InvalidInput, "no evaluated patterns");
  const double tp = static_cast<double>(c.true_pos);
  const double fp = static_cast<double>(c.false_pos);
  const double tn = static_cast<double>(c.true_neg);
  const double fn = static_cast<double>(c.false_neg);

  Measures m;
  m.acc = (tp + tn) / static_cast<double>(c.total());
  m.sens = ratio(tp, tp + fn);
  m.spec = ratio(tn, tn + fp);
  m.ppv = ratio(tp, tp + fp);
  const double den = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
  if (den > 0.0) m.mcc = (tp * tn - fp * fn) / std::sqrt(den);
  return m;
}

MetricSummary summarize(std::span<const Measures> samples) {
  if (samples.empty()) throw Error(ErrorKind::InvalidInput, "cannot summarize zero samples");
  MetricSummary out;
  for (Measure m : kAllMeasures) {
    auto& s = out.stats[static_cast<std::size_t>(m)];
    double sum = 0.0;
    for (const auto& sample : samples) {
      if (auto v = sample.get(m)) {
        sum += *v;
        ++s.count;
      }
    }
    s.excluded = samples.size() - s.count;
    if (s.count == 0) continue;
    s.mean = sum / static_cast<double>(s.count);
    double sq = 0.0;
    for (const auto& sample : samples) {
      if (auto v = sample.get(m)) sq += (*v - s.mean) * (*v - s.mean);
    }
    s.stddev = std::sqrt(sq / static_cast<double>(s.count));
  }
  return out;
}

void to_json(nlohmann::json& j, const Measures& m) {
  j = nlohmann::json::object();
  for (Measure k : kAllMeasures) {
    auto v = m.get(k);
    j[std::string(to_string(k))] = v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  }
}

void to_json(nlohmann::json& j, const MetricSummary& s) {
  j = nlohmann::json::object();
  for (Measure k : kAllMeasures) {
    const auto& st = s[k];
    j[std::string(to_string(k))] = {
        {"mean", st.mean}, {"std", st.stddev}, {"count", st.count}, {"excluded", st.excluded}};
  }
}

}  // namespace hopp
