#include "hopp/bayes_oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "hopp/error.hpp"

namespace hopp {

void ClassConditionalTable::validate(bool strictly_positive) const {
  if (inputs == 0 || inputs > 20) {
    throw Error(ErrorKind::InvalidDimension, "table inputs must lie in [1, 20]");
  }
  if (priors.size() < 2) throw Error(ErrorKind::InvalidDimension, "need at least two classes");
  if (likelihoods.size() != priors.size()) {
    throw Error(ErrorKind::InvalidDimension, "one likelihood table per class required");
  }
  auto check_sum = [](double sum, const std::string& what) {
    if (std::abs(sum - 1.0) > 1e-9) throw Error(ErrorKind::InvalidInput, what + " must sum to 1");
  };
  double prior_sum = 0.0;
  for (double p : priors) {
    if (!(p >= 0.0)) throw Error(ErrorKind::InvalidInput, "priors must be non-negative");
    if (strictly_positive && p <= 0.0) {
      throw Error(ErrorKind::LogDomain, "zero prior cannot be embedded");
    }
    prior_sum += p;
  }
  check_sum(prior_sum, "priors");
  for (std::size_t l = 0; l < likelihoods.size(); ++l) {
    const auto& t = likelihoods[l];
    if (t.size() != patterns()) {
      throw Error(ErrorKind::InvalidDimension, "class table must have 2^K entries");
    }
    double sum = 0.0;
    for (double p : t) {
      if (!(p >= 0.0)) throw Error(ErrorKind::InvalidInput, "likelihoods must be non-negative");
      if (strictly_positive && p <= 0.0) {
        throw Error(ErrorKind::LogDomain,
                    "zero likelihood in class " + std::to_string(l) + " cannot be embedded");
      }
      sum += p;
    }
    check_sum(sum, "class table " + std::to_string(l));
  }
}

void to_json(nlohmann::json& j, const ClassConditionalTable& t) {
  j = {{"inputs", t.inputs}, {"priors", t.priors}, {"likelihoods", t.likelihoods}};
}

void from_json(const nlohmann::json& j, ClassConditionalTable& t) {
  try {
    t.inputs = j.at("inputs").get<std::size_t>();
    t.priors = j.at("priors").get<std::vector<double>>();
    t.likelihoods = j.at("likelihoods").get<std::vector<std::vector<double>>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("probability table: ") + e.what());
  }
}

std::uint32_t pattern_mask(std::span<const double> bits) {
  std::uint32_t mask = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] != 0.0) mask |= 1u << i;
  }
  return mask;
}

std::vector<double> pattern_bits(std::uint32_t mask, std::size_t inputs) {
  std::vector<double> x(inputs);
  for (std::size_t i = 0; i < inputs; ++i) x[i] = (mask >> i) & 1u ? 1.0 : 0.0;
  return x;
}

std::vector<double> exact_posterior(const ClassConditionalTable& table, std::uint32_t mask) {
  if (mask >= table.patterns()) throw Error(ErrorKind::InvalidIndex, "pattern out of range");
  std::vector<double> joint(table.classes());
  double evidence = 0.0;
  for (std::size_t l = 0; l < table.classes(); ++l) {
    joint[l] = table.likelihoods[l][mask] * table.priors[l];
    evidence += joint[l];
  }
  if (!(evidence > 0.0)) {
    throw Error(ErrorKind::InvalidInput, "pattern has zero evidence p(x)");
  }
  for (double& v : joint) v /= evidence;
  return joint;
}

std::vector<double> mobius_transform(std::vector<double> f, std::size_t inputs) {
  if (f.size() != (std::size_t{1} << inputs)) {
    throw Error(ErrorKind::InvalidDimension, "function table must have 2^K entries");
  }
  for (std::size_t i = 0; i < inputs; ++i) {
    const std::size_t bit = std::size_t{1} << i;
    for (std::size_t s = 0; s < f.size(); ++s) {
      if (s & bit) f[s] -= f[s ^ bit];
    }
  }
  return f;
}

std::vector<double> subset_sum(std::vector<double> c, std::size_t inputs) {
  if (c.size() != (std::size_t{1} << inputs)) {
    throw Error(ErrorKind::InvalidDimension, "coefficient table must have 2^K entries");
  }
  for (std::size_t i = 0; i < inputs; ++i) {
    const std::size_t bit = std::size_t{1} << i;
    for (std::size_t s = 0; s < c.size(); ++s) {
      if (s & bit) c[s] += c[s ^ bit];
    }
  }
  return c;
}

namespace {
TermKey key_of_mask(std::size_t mask) {
  std::vector<std::uint32_t> idx;
  for (std::uint32_t i = 0; mask; ++i, mask >>= 1) {
    if (mask & 1u) idx.push_back(i);
  }
  return TermKey(std::move(idx));
}
}  // namespace

HoppNetwork embed(const ClassConditionalTable& table) {
  table.validate(true);
  HoppNetwork net(table.inputs, table.classes(), table.inputs);
  for (std::size_t l = 0; l < table.classes(); ++l) {
    std::vector<double> log_joint(table.patterns());
    for (std::size_t m = 0; m < table.patterns(); ++m) {
      log_joint[m] = std::log(table.likelihoods[l][m] * table.priors[l]);
    }
    const auto coeffs = mobius_transform(std::move(log_joint), table.inputs);
    for (std::size_t m = 0; m < coeffs.size(); ++m) net.set_weight({l, key_of_mask(m)}, coeffs[m]);
  }
  return net;
}

HoppNetwork truncate_embedding(const HoppNetwork& net, std::size_t max_order) {
  if (max_order > net.inputs()) {
    throw Error(ErrorKind::InvalidDimension, "truncation order exceeds input count");
  }
  HoppNetwork out(net.inputs(), net.outputs(), max_order, net.mode());
  for (const auto& [slot, w] : net.weights()) {
    if (slot.key.order() <= max_order) out.set_weight(slot, w);
  }
  return out;
}

ClassConditionalTable laplace_smooth(const ClassConditionalTable& table, double alpha) {
  if (!(alpha >= 0.0)) throw Error(ErrorKind::InvalidInput, "smoothing must be non-negative");
  ClassConditionalTable out = table;
  for (auto& t : out.likelihoods) {
    double sum = 0.0;
    for (double& p : t) sum += (p += alpha);
    for (double& p : t) p /= sum;
  }
  return out;
}

ClassConditionalTable random_table(std::size_t inputs, std::size_t classes, Rng& rng) {
  ClassConditionalTable t;
  t.inputs = inputs;
  auto normalized = [&](std::size_t n) {
    std::vector<double> v(n);
    double sum = 0.0;
    for (double& p : v) sum += (p = rng.uniform(0.05, 1.0));
    for (double& p : v) p /= sum;
    return v;
  };
  t.priors = normalized(classes);
  for (std::size_t l = 0; l < classes; ++l) t.likelihoods.push_back(normalized(t.patterns()));
  return t;
}

ClassConditionalTable product_table(const std::vector<std::vector<double>>& marginals,
                                    const std::vector<double>& priors) {
  if (marginals.size() != priors.size() || marginals.empty()) {
    throw Error(ErrorKind::InvalidDimension, "one marginal vector per class required");
  }
  ClassConditionalTable t;
  t.inputs = marginals.front().size();
  t.priors = priors;
  for (const auto& q : marginals) {
    if (q.size() != t.inputs) throw Error(ErrorKind::InvalidDimension, "marginal length mismatch");
    std::vector<double> table(t.patterns());
    for (std::size_t m = 0; m < table.size(); ++m) {
      double p = 1.0;
      for (std::size_t i = 0; i < t.inputs; ++i) p *= (m >> i) & 1u ? q[i] : 1.0 - q[i];
      table[m] = p;
    }
    t.likelihoods.push_back(std::move(table));
  }
  return t;
}

double max_posterior_deviation(const HoppNetwork& net, const ClassConditionalTable& table) {
  double worst = 0.0;
  for (std::uint32_t m = 0; m < table.patterns(); ++m) {
    const auto y = outputs(net, pattern_bits(m, table.inputs));
    const auto p = exact_posterior(table, m);
    for (std::size_t l = 0; l < y.size(); ++l) worst = std::max(worst, std::abs(y[l] - p[l]));
  }
  return worst;
}

OracleCheckReport run_oracle_check(std::uint64_t seed, std::size_t tables_per_size,
                                   std::size_t max_exhaustive_inputs) {
  OracleCheckReport report;
  Rng rng(seed);
  auto check = [&](std::size_t k) {
    for (std::size_t t = 0; t < tables_per_size; ++t) {
      const auto classes = 2 + static_cast<std::size_t>(rng.below(2));
      const auto table = random_table(k, classes, rng);
      report.max_deviation =
          std::max(report.max_deviation, max_posterior_deviation(embed(table), table));
      ++report.tables;
      report.patterns_checked += table.patterns();
    }
  };
  for (std::size_t k = 1; k <= max_exhaustive_inputs; ++k) check(k);
  check(6);
  return report;
}

}  // namespace hopp
