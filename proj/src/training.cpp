#include "hopp/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "hopp/error.hpp"

namespace hopp {

void TrainingConfig::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw Error(ErrorKind::InvalidInput, "learning rate epsilon must be positive");
  }
  if (!std::isfinite(mu)) throw Error(ErrorKind::InvalidInput, "momentum mu must be finite");
  if (!(init_low < init_high)) {
    throw Error(ErrorKind::InvalidInput, "initialization range must have low < high");
  }
  if (max_weights < 1) throw Error(ErrorKind::InvalidInput, "weight budget must be at least 1");
}

std::string to_string(CullCriterion c) {
  return c == CullCriterion::Magnitude ? "magnitude" : "nth-root-magnitude";
}

CullCriterion parse_cull_criterion(const std::string& name) {
  if (name == "magnitude") return CullCriterion::Magnitude;
  if (name == "nth-root-magnitude" || name == "nth-root") return CullCriterion::NthRootMagnitude;
  throw Error(ErrorKind::InvalidInput, "unknown cull criterion '" + name + "'");
}

void to_json(nlohmann::json& j, const TrainingConfig& c) {
  j = {{"epsilon", c.epsilon},
       {"mu", c.mu},
       {"epochs_pre_cull", c.epochs_pre_cull},
       {"epochs_post_cull", c.epochs_post_cull},
       {"init_active_weights", c.init_active_weights},
       {"init_range", {c.init_low, c.init_high}},
       {"max_weights", c.max_weights},
       {"cull_criterion", to_string(c.cull_criterion)},
       {"init_sampling", c.init_sampling == InitSampling::Slots ? "slots" : "shared-keys"},
       {"output_mode", c.output_mode == OutputMode::Reduced ? "reduced" : "independent"},
       {"seed", c.seed}};
}

void from_json(const nlohmann::json& j, TrainingConfig& c) {
  try {
    c.epsilon = j.value("epsilon", c.epsilon);
    c.mu = j.value("mu", c.mu);
    c.epochs_pre_cull = j.value("epochs_pre_cull", c.epochs_pre_cull);
    c.epochs_post_cull = j.value("epochs_post_cull", c.epochs_post_cull);
    c.init_active_weights = j.value("init_active_weights", c.init_active_weights);
    if (j.contains("init_range")) {
      const auto& r = j.at("init_range");
      c.init_low = r.at(0).get<double>();
      c.init_high = r.at(1).get<double>();
    }
    c.max_weights = j.value("max_weights", c.max_weights);
    if (j.contains("cull_criterion")) {
      c.cull_criterion = parse_cull_criterion(j.at("cull_criterion").get<std::string>());
    }
    if (j.contains("init_sampling")) {
      const auto s = j.at("init_sampling").get<std::string>();
      if (s == "slots") {
        c.init_sampling = InitSampling::Slots;
      } else if (s == "shared-keys") {
        c.init_sampling = InitSampling::SharedKeys;
      } else {
        throw Error(ErrorKind::InvalidInput, "unknown init_sampling '" + s + "'");
      }
    }
    if (j.contains("output_mode")) {
      const auto s = j.at("output_mode").get<std::string>();
      if (s == "independent") {
        c.output_mode = OutputMode::Independent;
      } else if (s == "reduced") {
        c.output_mode = OutputMode::Reduced;
      } else {
        throw Error(ErrorKind::InvalidInput, "unknown output_mode '" + s + "'");
      }
    }
    c.seed = j.value("seed", c.seed);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("training config: ") + e.what());
  }
}

void TrainingSet::validate(std::size_t input_count) const {
  if (inputs.size() != labels.size()) {
    throw Error(ErrorKind::InvalidInput, "training inputs and labels differ in length");
  }
  for (std::size_t p = 0; p < inputs.size(); ++p) {
    if (inputs[p].size() != input_count) {
      throw Error(ErrorKind::InvalidDimension,
                  "training pattern " + std::to_string(p) + " has wrong dimension");
    }
    if (labels[p] >= classes) {
      throw Error(ErrorKind::InvalidInput, "training label out of range at pattern " +
                                               std::to_string(p));
    }
  }
}

namespace {

// k distinct values from [0, n), returned sorted (Floyd's algorithm).
std::vector<std::uint64_t> sample_without_replacement(std::uint64_t n, std::uint64_t k,
                                                      Rng& rng) {
  std::set<std::uint64_t> chosen;
  if (k >= n) {
    std::vector<std::uint64_t> all(n);
    std::iota(all.begin(), all.end(), std::uint64_t{0});
    return all;
  }
  for (std::uint64_t j = n - k; j < n; ++j) {
    const std::uint64_t t = rng.below(j + 1);
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  return {chosen.begin(), chosen.end()};
}

[[noreturn]] void diverged(const TrainingConfig& config) {
  std::ostringstream msg;
  msg << "weights became non-finite; reduce learning rate epsilon (currently " << config.epsilon
      << ")";
  throw Error(ErrorKind::Divergence, msg.str());
}

// Flat copy of the active weights for the inner training loop. Slot order
// matches the network's map order so sums accumulate identically to
// stimulus().
class FlatModel {
 public:
  FlatModel(const HoppNetwork& net, const MomentumState& momentum) : outputs_(net.outputs()) {
    for (const auto& [slot, w] : net.weights()) {
      slots_.push_back(slot);
      output_.push_back(slot.output);
      offset_.push_back(indices_.size());
      order_.push_back(slot.key.order());
      indices_.insert(indices_.end(), slot.key.indices().begin(), slot.key.indices().end());
      weight_.push_back(w);
      auto it = momentum.find(slot);
      prev_.push_back(it == momentum.end() ? 0.0 : it->second);
    }
    term_.resize(slots_.size());
    u_.resize(outputs_);
  }

  void step(std::span<const double> x, std::size_t label, const TrainingConfig& config) {
    std::fill(u_.begin(), u_.end(), 0.0);
    for (std::size_t s = 0; s < slots_.size(); ++s) {
      double t = 1.0;
      const auto* idx = indices_.data() + offset_[s];
      for (std::size_t k = 0; k < order_[s]; ++k) t *= x[idx[k]];
      term_[s] = t;
      u_[output_[s]] += weight_[s] * t;
    }
    std::vector<double> y;
    try {
      y = softmax(u_);
    } catch (const Error&) {
      diverged(config);
    }
    bool finite = true;
    for (std::size_t s = 0; s < slots_.size(); ++s) {
      const double target = output_[s] == label ? 1.0 : 0.0;
      const double delta =
          config.epsilon * (target - y[output_[s]]) * term_[s] + config.mu * prev_[s];
      weight_[s] += delta;
      prev_[s] = delta;
      finite = finite && std::isfinite(weight_[s]);
    }
    if (!finite) diverged(config);
  }

  void write_back(HoppNetwork& net, MomentumState& momentum) const {
    for (std::size_t s = 0; s < slots_.size(); ++s) {
      net.set_weight(slots_[s], weight_[s]);
      momentum[slots_[s]] = prev_[s];
    }
  }

 private:
  std::size_t outputs_;
  std::vector<WeightSlot> slots_;
  std::vector<std::size_t> output_;
  std::vector<std::size_t> offset_;
  std::vector<std::size_t> order_;
  std::vector<std::uint32_t> indices_;
  std::vector<double> weight_;
  std::vector<double> prev_;
  std::vector<double> term_;
  std::vector<double> u_;
};

}  // namespace

InitializedModel initialize(std::size_t inputs, std::size_t outputs, std::size_t max_order,
                            const TrainingConfig& config, Rng& rng) {
  config.validate();
  HoppNetwork net(inputs, outputs, max_order, config.output_mode);
  const std::size_t trainable = net.trainable_outputs();
  const std::uint64_t non_bias_terms = count_terms(inputs, max_order) - 1;

  for (std::size_t l = 0; l < trainable; ++l) {
    net.set_weight({l, TermKey::bias()}, rng.uniform(config.init_low, config.init_high));
  }

  std::vector<WeightSlot> chosen;
  if (config.init_sampling == InitSampling::Slots) {
    const std::uint64_t eligible = non_bias_terms * trainable;
    for (std::uint64_t r : sample_without_replacement(eligible, config.init_active_weights, rng)) {
      chosen.push_back({static_cast<std::size_t>(r / non_bias_terms),
                        unrank_term(inputs, max_order, 1 + r % non_bias_terms)});
    }
  } else {
    for (std::uint64_t r :
         sample_without_replacement(non_bias_terms, config.init_active_weights, rng)) {
      const TermKey key = unrank_term(inputs, max_order, 1 + r);
      for (std::size_t l = 0; l < trainable; ++l) chosen.push_back({l, key});
    }
    std::sort(chosen.begin(), chosen.end());
  }
  for (const auto& slot : chosen) {
    net.set_weight(slot, rng.uniform(config.init_low, config.init_high));
  }

  MomentumState momentum;
  for (const auto& [slot, w] : net.weights()) momentum.emplace(slot, 0.0);
  return {std::move(net), std::move(momentum)};
}

std::map<WeightSlot, double> update_step(HoppNetwork& net, MomentumState& momentum,
                                         std::span<const double> x, std::size_t label,
                                         const TrainingConfig& config) {
  std::vector<double> y;
  try {
    y = outputs(net, x);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::NumericOverflow) diverged(config);
    throw;
  }
  if (label >= net.outputs()) throw Error(ErrorKind::InvalidInput, "target label out of range");

  std::map<WeightSlot, double> applied;
  for (const auto& [slot, w] : net.weights()) {
    const double target = slot.output == label ? 1.0 : 0.0;
    auto it = momentum.find(slot);
    const double prev = it == momentum.end() ? 0.0 : it->second;
    applied.emplace(slot, config.epsilon * (target - y[slot.output]) * term_value(slot.key, x) +
                              config.mu * prev);
  }
  for (const auto& [slot, delta] : applied) {
    const double updated = net.weight(slot) + delta;
    if (!std::isfinite(updated)) diverged(config);
    net.set_weight(slot, updated);
    momentum[slot] = delta;
  }
  return applied;
}

void train_epochs(HoppNetwork& net, MomentumState& momentum, const TrainingSet& set,
                  std::size_t epochs, const TrainingConfig& config, Rng& rng,
                  const EpochObserver& observer) {
  if (epochs == 0) return;
  set.validate(net.inputs());
  FlatModel flat(net, momentum);
  std::vector<std::size_t> order(set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t epoch = 1; epoch <= epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t p : order) flat.step(set.inputs[p], set.labels[p], config);
    if (observer) {
      flat.write_back(net, momentum);
      observer(epoch, squared_error_cost(net, set));
    }
  }
  flat.write_back(net, momentum);
}

HoppNetwork cull(const HoppNetwork& net, std::size_t max_weights, CullCriterion criterion,
                 MomentumState* momentum) {
  struct Candidate {
    WeightSlot slot;
    double score;
  };
  std::vector<Candidate> candidates;
  for (const auto& [slot, w] : net.weights()) {
    if (slot.key.is_bias()) continue;
    double score = std::abs(w);
    if (criterion == CullCriterion::NthRootMagnitude && slot.key.order() > 1) {
      score = std::pow(score, 1.0 / static_cast<double>(slot.key.order()));
    }
    candidates.push_back({slot, score});
  }
  if (candidates.size() <= max_weights) return net;

  // Candidates are already in slot order, so a stable sort keeps ties ordered.
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) { return a.score > b.score; });
  HoppNetwork pruned = net;
  for (std::size_t i = max_weights; i < candidates.size(); ++i) {
    pruned.erase(candidates[i].slot);
    if (momentum) momentum->erase(candidates[i].slot);
  }
  return pruned;
}

double squared_error_cost(const HoppNetwork& net, const TrainingSet& set) {
  if (set.size() == 0) return 0.0;
  double total = 0.0;
  for (std::size_t p = 0; p < set.size(); ++p) {
    const auto y = outputs(net, set.inputs[p]);
    for (std::size_t l = 0; l < y.size(); ++l) {
      const double a = l == set.labels[p] ? 1.0 : 0.0;
      total += (y[l] - a) * (y[l] - a);
    }
  }
  return total / static_cast<double>(set.size());
}

std::vector<TermKey> surviving_factors(const HoppNetwork& net) {
  std::set<TermKey> keys;
  for (const auto& [slot, w] : net.weights()) {
    if (!slot.key.is_bias()) keys.insert(slot.key);
  }
  return {keys.begin(), keys.end()};
}

TrainedModel cull_and_retrain(HoppNetwork pretrained, const TrainingSet& set,
                              std::size_t max_weights, const TrainingConfig& config, Rng& rng,
                              const EpochObserver& observer) {
  HoppNetwork net = cull(pretrained, max_weights, config.cull_criterion);
  MomentumState momentum;
  for (const auto& [slot, w] : net.weights()) momentum.emplace(slot, 0.0);
  if (observer) {
    train_epochs(net, momentum, set, config.epochs_post_cull, config, rng,
                 [&](std::size_t epoch, double cost) {
                   observer(config.epochs_pre_cull + epoch, cost);
                 });
  } else {
    train_epochs(net, momentum, set, config.epochs_post_cull, config, rng);
  }
  auto factors = surviving_factors(net);
  return {std::move(net), std::move(factors)};
}

TrainedModel train_protocol(const TrainingSet& set, std::size_t inputs, std::size_t outputs,
                            std::size_t max_order, const TrainingConfig& config, Rng& rng,
                            const EpochObserver& observer) {
  auto [net, momentum] = initialize(inputs, outputs, max_order, config, rng);
  train_epochs(net, momentum, set, config.epochs_pre_cull, config, rng, observer);
  return cull_and_retrain(std::move(net), set, config.max_weights, config, rng, observer);
}

}  // namespace hopp
