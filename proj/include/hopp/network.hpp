#pragma once

#include <compare>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <vector>

#include "hopp/term_key.hpp"

namespace hopp {

// One weight position: output unit plus product term.
struct WeightSlot {
  std::size_t output = 0;
  TermKey key;

  auto operator<=>(const WeightSlot&) const = default;
};

// Two output units with independent weights (as trained in the experiments),
// or a reduced form where the second output's stimulus is pinned to zero.
enum class OutputMode { Independent, Reduced };

// Sparse higher-order perceptron. Absent weights are zero; every trainable
// output always carries a bias entry.
class HoppNetwork {
 public:
  using WeightMap = std::map<WeightSlot, double>;

  HoppNetwork(std::size_t inputs, std::size_t outputs, std::size_t max_order,
              OutputMode mode = OutputMode::Independent);

  std::size_t inputs() const noexcept { return inputs_; }
  std::size_t outputs() const noexcept { return outputs_; }
  std::size_t max_order() const noexcept { return max_order_; }
  OutputMode mode() const noexcept { return mode_; }

  // Outputs that hold weights: all of them, or just the first in Reduced mode.
  std::size_t trainable_outputs() const noexcept {
    return mode_ == OutputMode::Reduced ? 1 : outputs_;
  }

  const WeightMap& weights() const noexcept { return weights_; }

  double weight(const WeightSlot& slot) const;
  // Stores `value` (zero included) after validating slot against dimensions.
  void set_weight(const WeightSlot& slot, double value);
  // Removes a non-bias weight; biases cannot be removed.
  void erase(const WeightSlot& slot);
  bool is_active(const WeightSlot& slot) const { return weights_.contains(slot); }

  std::size_t active_count() const noexcept { return weights_.size(); }
  std::size_t active_non_bias_count() const noexcept;

  bool operator==(const HoppNetwork&) const = default;

 private:
  void validate(const WeightSlot& slot) const;

  std::size_t inputs_;
  std::size_t outputs_;
  std::size_t max_order_;
  OutputMode mode_;
  WeightMap weights_;
};

// u_lambda(x) for each output.
std::vector<double> stimulus(const HoppNetwork& net, std::span<const double> x);

// Soft-max of the stimuli, max-shifted. Throws NumericOverflow on non-finite input.
std::vector<double> softmax(std::span<const double> stimuli);

std::vector<double> outputs(const HoppNetwork& net, std::span<const double> x);

struct Prediction {
  bool positive = false;
  double probability = 0.0;  // output of the positive unit
};

Prediction predict(const HoppNetwork& net, std::span<const double> x, double threshold,
                   std::size_t positive_output = 0);

// Lossless text form: JSON with inputs/outputs/max_order/mode and a list of
// {output, indices, weight} entries.
void write_network(std::ostream& os, const HoppNetwork& net);
HoppNetwork read_network(std::istream& is);

}  // namespace hopp
