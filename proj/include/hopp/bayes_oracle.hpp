#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include <json.hpp>

#include "hopp/network.hpp"
#include "hopp/rng.hpp"

namespace hopp {

// Priors P(lambda) and class-conditional tables p(x | lambda) over binary
// patterns. Pattern x is encoded as a mask whose bit i is x_i.
struct ClassConditionalTable {
  std::size_t inputs = 0;
  std::vector<double> priors;
  std::vector<std::vector<double>> likelihoods;  // [class][mask]

  std::size_t classes() const noexcept { return priors.size(); }
  std::size_t patterns() const noexcept { return std::size_t{1} << inputs; }

  // Shape and normalization checks; with `strictly_positive` every entry
  // must be > 0 (LogDomain otherwise).
  void validate(bool strictly_positive = false) const;
};

void to_json(nlohmann::json& j, const ClassConditionalTable& t);
void from_json(const nlohmann::json& j, ClassConditionalTable& t);

std::uint32_t pattern_mask(std::span<const double> bits);
std::vector<double> pattern_bits(std::uint32_t mask, std::size_t inputs);

// p(lambda | x) = p(x | lambda) P(lambda) / sum_nu p(x | nu) P(nu).
std::vector<double> exact_posterior(const ClassConditionalTable& table, std::uint32_t mask);

// Coefficients c[S] of the multilinear polynomial agreeing with f on {0,1}^K:
//   c[S] = sum_{T subset S} (-1)^{|S \ T|} f(T).
std::vector<double> mobius_transform(std::vector<double> f, std::size_t inputs);
// Inverse: f(S) = sum_{T subset S} c[T].
std::vector<double> subset_sum(std::vector<double> c, std::size_t inputs);

// Full-order network whose stimulus for class lambda is ln[p(x|lambda) P(lambda)]
// at every binary pattern, so its soft-max outputs are the exact posterior.
// Requires strictly positive tables.
HoppNetwork embed(const ClassConditionalTable& table);

// Drops weights of order above `max_order`.
HoppNetwork truncate_embedding(const HoppNetwork& net, std::size_t max_order);

// Adds `alpha` to every likelihood entry and renormalizes each class.
ClassConditionalTable laplace_smooth(const ClassConditionalTable& table, double alpha);

// Random strictly positive table; entries drawn uniformly in [0.05, 1) before
// normalization.
ClassConditionalTable random_table(std::size_t inputs, std::size_t classes, Rng& rng);

// Independent (product-form) table from per-class marginals P(x_i = 1 | lambda).
ClassConditionalTable product_table(const std::vector<std::vector<double>>& marginals,
                                    const std::vector<double>& priors);

// max over patterns and classes of |network output - exact posterior|.
double max_posterior_deviation(const HoppNetwork& net, const ClassConditionalTable& table);

struct OracleCheckReport {
  std::size_t tables = 0;
  std::size_t patterns_checked = 0;
  double max_deviation = 0.0;
};

// Exhaustive check for K = 1..max_exhaustive_inputs (`tables_per_size` random
// tables each), plus `tables_per_size` tables at K = 6.
OracleCheckReport run_oracle_check(std::uint64_t seed, std::size_t tables_per_size,
                                   std::size_t max_exhaustive_inputs = 4);

}  // namespace hopp
