#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "hopp/network.hpp"
#include "hopp/rng.hpp"

namespace hopp {

enum class CullCriterion { Magnitude, NthRootMagnitude };

// How init_active_weights is counted: individual (output, term) slots, or
// term keys activated on every output at once.
enum class InitSampling { Slots, SharedKeys };

struct TrainingConfig {
  double epsilon = 0.05;
  double mu = 0.5;
  std::size_t epochs_pre_cull = 500;
  std::size_t epochs_post_cull = 500;
  std::size_t init_active_weights = 500;
  double init_low = -1.5;
  double init_high = 1.5;
  std::size_t max_weights = 30;
  CullCriterion cull_criterion = CullCriterion::Magnitude;
  InitSampling init_sampling = InitSampling::Slots;
  OutputMode output_mode = OutputMode::Independent;
  std::uint64_t seed = 1;

  // Throws InvalidInput on epsilon <= 0, empty init range, or max_weights == 0.
  void validate() const;
};

void to_json(nlohmann::json& j, const TrainingConfig& c);
// Missing fields keep their defaults.
void from_json(const nlohmann::json& j, TrainingConfig& c);

std::string to_string(CullCriterion c);
CullCriterion parse_cull_criterion(const std::string& name);

// Patterns with class labels; the one-hot target for pattern p has a 1 at
// labels[p].
struct TrainingSet {
  std::vector<std::vector<double>> inputs;
  std::vector<std::size_t> labels;
  std::size_t classes = 2;

  std::size_t size() const noexcept { return inputs.size(); }
  void validate(std::size_t input_count) const;
};

// Previous weight correction per active slot.
using MomentumState = std::map<WeightSlot, double>;

struct InitializedModel {
  HoppNetwork net;
  MomentumState momentum;
};

InitializedModel initialize(std::size_t inputs, std::size_t outputs, std::size_t max_order,
                            const TrainingConfig& config, Rng& rng);

// One application of the incremental rule to every active weight:
//   dw = epsilon * (a - y) * term_value(key, x) + mu * dw_prev
// using outputs computed before the step. Returns the applied corrections.
std::map<WeightSlot, double> update_step(HoppNetwork& net, MomentumState& momentum,
                                         std::span<const double> x, std::size_t label,
                                         const TrainingConfig& config);

// Called after each epoch with (epoch number starting at 1, mean training cost).
using EpochObserver = std::function<void(std::size_t, double)>;

// Each epoch shuffles the pattern order with `rng` and applies update_step
// once per pattern.
void train_epochs(HoppNetwork& net, MomentumState& momentum, const TrainingSet& set,
                  std::size_t epochs, const TrainingConfig& config, Rng& rng,
                  const EpochObserver& observer = {});

// Keeps the biases plus the `max_weights` highest-priority other weights.
// Ties go to the earlier slot in (output, term) order. When `momentum` is
// given, entries of removed weights are dropped from it.
HoppNetwork cull(const HoppNetwork& net, std::size_t max_weights, CullCriterion criterion,
                 MomentumState* momentum = nullptr);

// Mean over patterns of sum_lambda (y_lambda - a_lambda)^2.
double squared_error_cost(const HoppNetwork& net, const TrainingSet& set);

struct TrainedModel {
  HoppNetwork net;
  std::vector<TermKey> surviving_factors;  // distinct non-bias keys, sorted
};

// initialize -> train_epochs(pre) -> cull -> reset momentum -> train_epochs(post).
TrainedModel train_protocol(const TrainingSet& set, std::size_t inputs, std::size_t outputs,
                            std::size_t max_order, const TrainingConfig& config, Rng& rng,
                            const EpochObserver& observer = {});

// Second half of train_protocol, for callers that share one pre-cull network
// across several budgets.
TrainedModel cull_and_retrain(HoppNetwork pretrained, const TrainingSet& set,
                              std::size_t max_weights, const TrainingConfig& config, Rng& rng,
                              const EpochObserver& observer = {});

std::vector<TermKey> surviving_factors(const HoppNetwork& net);

}  // namespace hopp
