#include "hopp/network.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "hopp/error.hpp"

namespace hopp {

HoppNetwork::HoppNetwork(std::size_t inputs, std::size_t outputs, std::size_t max_order,
                         OutputMode mode)
    : inputs_(inputs), outputs_(outputs), max_order_(max_order), mode_(mode) {
  if (inputs == 0) throw Error(ErrorKind::InvalidDimension, "network needs at least one input");
  if (outputs < 2) throw Error(ErrorKind::InvalidDimension, "network needs at least two outputs");
  if (max_order > inputs) {
    throw Error(ErrorKind::InvalidDimension, "maximum order exceeds input count");
  }
  if (mode == OutputMode::Reduced && outputs != 2) {
    throw Error(ErrorKind::InvalidDimension, "reduced output mode requires exactly two outputs");
  }
  for (std::size_t l = 0; l < trainable_outputs(); ++l) weights_.emplace(WeightSlot{l, {}}, 0.0);
}

void HoppNetwork::validate(const WeightSlot& slot) const {
  if (slot.output >= trainable_outputs()) {
    throw Error(ErrorKind::InvalidIndex,
                "output " + std::to_string(slot.output) + " cannot hold weights");
  }
  if (slot.key.order() > max_order_) {
    throw Error(ErrorKind::InvalidDimension,
                "term order " + std::to_string(slot.key.order()) + " exceeds network maximum " +
                    std::to_string(max_order_));
  }
  if (!slot.key.is_bias() && slot.key.indices().back() >= inputs_) {
    throw Error(ErrorKind::InvalidIndex, "term index out of range: " + slot.key.to_string());
  }
}

double HoppNetwork::weight(const WeightSlot& slot) const {
  auto it = weights_.find(slot);
  return it == weights_.end() ? 0.0 : it->second;
}

void HoppNetwork::set_weight(const WeightSlot& slot, double value) {
  validate(slot);
  weights_[slot] = value;
}

void HoppNetwork::erase(const WeightSlot& slot) {
  if (slot.key.is_bias()) throw Error(ErrorKind::InvalidInput, "biases cannot be removed");
  weights_.erase(slot);
}

std::size_t HoppNetwork::active_non_bias_count() const noexcept {
  return static_cast<std::size_t>(std::count_if(
      weights_.begin(), weights_.end(), [](const auto& e) { return !e.first.key.is_bias(); }));
}

std::vector<double> stimulus(const HoppNetwork& net, std::span<const double> x) {
  if (x.size() != net.inputs()) {
    throw Error(ErrorKind::InvalidDimension, "input has " + std::to_string(x.size()) +
                                                 " components, network expects " +
                                                 std::to_string(net.inputs()));
  }
  std::vector<double> u(net.outputs(), 0.0);
  for (const auto& [slot, w] : net.weights()) u[slot.output] += w * term_value(slot.key, x);
  return u;
}

std::vector<double> softmax(std::span<const double> stimuli) {
  double top = -INFINITY;
  for (double u : stimuli) {
    if (!std::isfinite(u)) throw Error(ErrorKind::NumericOverflow, "non-finite stimulus");
    top = std::max(top, u);
  }
  std::vector<double> y(stimuli.size());
  double total = 0.0;
  for (std::size_t i = 0; i < stimuli.size(); ++i) {
    y[i] = std::exp(stimuli[i] - top);
    total += y[i];
  }
  for (double& v : y) v /= total;
  return y;
}

std::vector<double> outputs(const HoppNetwork& net, std::span<const double> x) {
  return softmax(stimulus(net, x));
}

Prediction predict(const HoppNetwork& net, std::span<const double> x, double threshold,
                   std::size_t positive_output) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw Error(ErrorKind::InvalidInput, "threshold must lie in (0, 1)");
  }
  if (positive_output >= net.outputs()) {
    throw Error(ErrorKind::InvalidIndex, "positive output index out of range");
  }
  const auto y = outputs(net, x);
  return {y[positive_output] >= threshold, y[positive_output]};
}

void write_network(std::ostream& os, const HoppNetwork& net) {
  nlohmann::json doc;
  doc["inputs"] = net.inputs();
  doc["outputs"] = net.outputs();
  doc["max_order"] = net.max_order();
  doc["mode"] = net.mode() == OutputMode::Reduced ? "reduced" : "independent";
  doc["index_base"] = 0;
  auto& entries = doc["weights"] = nlohmann::json::array();
  for (const auto& [slot, w] : net.weights()) {
    entries.push_back({{"output", slot.output},
                       {"indices", std::vector<std::uint32_t>(slot.key.indices().begin(),
                                                              slot.key.indices().end())},
                       {"weight", w}});
  }
  os << doc.dump(1) << '\n';
}

HoppNetwork read_network(std::istream& is) {
  nlohmann::json doc;
  try {
    is >> doc;
    const auto mode_name = doc.value("mode", std::string("independent"));
    OutputMode mode = OutputMode::Independent;
    if (mode_name == "reduced") {
      mode = OutputMode::Reduced;
    } else if (mode_name != "independent") {
      throw Error(ErrorKind::Parse, "unknown output mode '" + mode_name + "'");
    }
    HoppNetwork net(doc.at("inputs").get<std::size_t>(), doc.at("outputs").get<std::size_t>(),
                    doc.at("max_order").get<std::size_t>(), mode);
    for (const auto& e : doc.at("weights")) {
      net.set_weight({e.at("output").get<std::size_t>(),
                      TermKey(e.at("indices").get<std::vector<std::uint32_t>>())},
                     e.at("weight").get<double>());
    }
    return net;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("network document: ") + e.what());
  }
}

}  // namespace hopp
