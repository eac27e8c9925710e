#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "hopp/error.hpp"
#include "hopp/network.hpp"
#include "hopp/rng.hpp"
#include "hopp/term_key.hpp"
#include "test_util.hpp"

using namespace hopp;

namespace {

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

HoppNetwork random_network(std::size_t k, std::size_t n, Rng& rng) {
  HoppNetwork net(k, 2, n);
  for (const auto& key : enumerate_terms(k, n)) {
    for (std::size_t out = 0; out < 2; ++out) {
      if (key.is_bias() || rng.uniform01() < 0.6) net.set_weight({out, key}, rng.uniform(-2, 2));
    }
  }
  return net;
}

}  // namespace

TEST_CASE("term keys reject repeated or unordered indices") {
  CHECK(kind_of([] { TermKey{2, 1}; }) == ErrorKind::InvalidIndex);
  CHECK(kind_of([] { TermKey{1, 1}; }) == ErrorKind::InvalidIndex);
  CHECK(TermKey{0, 3, 7}.order() == 3);
  CHECK(TermKey{}.is_bias());
  CHECK(TermKey{3, 7, 12}.to_string() == "3-7-12");
}

TEST_CASE("term ordering is bias, then order, then lexicographic") {
  CHECK(TermKey::bias() < TermKey{5});
  CHECK(TermKey{9} < TermKey{0, 1});
  CHECK(TermKey{0, 2} < TermKey{1, 2});
  CHECK(TermKey{0, 1, 9} < TermKey{0, 2, 3});
}

TEST_CASE("enumerate_terms small case") {
  const auto keys = enumerate_terms(3, 1);
  REQUIRE(keys.size() == 4);
  CHECK(keys[0].is_bias());
  CHECK(keys[1] == TermKey{0});
  CHECK(keys[2] == TermKey{1});
  CHECK(keys[3] == TermKey{2});
}

TEST_CASE("term counts") {
  CHECK(enumerate_terms(30, 2).size() == 466);
  CHECK(enumerate_terms(10, 4).size() == 386);
  CHECK(count_terms(30, 3) == 4526);
  CHECK(count_terms(30, 4) == 31931);
  CHECK(count_terms(5, 5) == 32);
  CHECK(count_terms(4, 0) == 1);
}

TEST_CASE("term count errors") {
  CHECK(kind_of([] { count_terms(3, 4); }) == ErrorKind::InvalidDimension);
  CHECK(kind_of([] { count_terms(0, 0); }) == ErrorKind::InvalidDimension);
  CHECK(kind_of([] { enumerate_terms(2, 3); }) == ErrorKind::InvalidDimension);
  CHECK(kind_of([] { count_terms(200, 100); }) == ErrorKind::NumericOverflow);
}

TEST_CASE("enumeration matches count and the closed form for all N <= K <= 20") {
  for (std::size_t k = 1; k <= 20; ++k) {
    for (std::size_t n = 0; n <= k; ++n) {
      std::uint64_t closed = 1;
      for (std::size_t j = 1; j <= n; ++j) closed += binomial(k, j);
      CHECK(count_terms(k, n) == closed);
      if (k <= 14) CHECK(enumerate_terms(k, n).size() == closed);
    }
  }
}

TEST_CASE("enumeration is sorted, unique and free of repeated indices") {
  const auto keys = enumerate_terms(8, 4);
  for (std::size_t i = 1; i < keys.size(); ++i) CHECK(keys[i - 1] < keys[i]);
  for (const auto& k : keys) {
    std::set<std::uint32_t> distinct(k.indices().begin(), k.indices().end());
    CHECK(distinct.size() == k.order());
  }
}

TEST_CASE("unranking agrees with enumeration") {
  for (auto [k, n] : {std::pair{6u, 3u}, {9u, 4u}, {5u, 5u}}) {
    const auto keys = enumerate_terms(k, n);
    for (std::size_t r = 0; r < keys.size(); ++r) CHECK(unrank_term(k, n, r) == keys[r]);
  }
  CHECK(unrank_term(30, 4, count_terms(30, 4) - 1) == TermKey{26, 27, 28, 29});
  CHECK(kind_of([] { unrank_term(4, 2, 11); }) == ErrorKind::InvalidIndex);
}

TEST_CASE("term_value") {
  const std::vector<double> x{0.5, 0.4, 3.0};
  CHECK(term_value(TermKey::bias(), x) == 1.0);
  CHECK(term_value(TermKey{0, 1}, x) == doctest::Approx(0.2));
  CHECK(term_value(TermKey{0, 1, 2}, std::vector<double>{1.0, 0.0, 2.0}) == 0.0);
  CHECK(kind_of([&] { term_value(TermKey{3}, x); }) == ErrorKind::InvalidIndex);
}

TEST_CASE("network construction and weight bookkeeping") {
  HoppNetwork net(3, 2, 2);
  CHECK(net.active_count() == 2);
  CHECK(net.is_active({0, TermKey::bias()}));
  CHECK(net.is_active({1, TermKey::bias()}));
  net.set_weight({0, TermKey{0, 2}}, 1.5);
  CHECK(net.weight({0, TermKey{0, 2}}) == 1.5);
  CHECK(net.weight({1, TermKey{0, 2}}) == 0.0);
  CHECK(net.active_non_bias_count() == 1);
  net.erase({0, TermKey{0, 2}});
  CHECK(net.active_non_bias_count() == 0);
  CHECK(kind_of([&] { net.erase({0, TermKey::bias()}); }) == ErrorKind::InvalidInput);
  CHECK(kind_of([&] { net.set_weight({0, TermKey{0, 1, 2}}, 1.0); }) ==
        ErrorKind::InvalidDimension);
  CHECK(kind_of([&] { net.set_weight({2, TermKey{0}}, 1.0); }) == ErrorKind::InvalidIndex);
  CHECK(kind_of([&] { net.set_weight({0, TermKey{3}}, 1.0); }) == ErrorKind::InvalidIndex);
  CHECK(kind_of([] { HoppNetwork(3, 1, 1); }) == ErrorKind::InvalidDimension);
}

TEST_CASE("reduced mode pins the second stimulus to zero") {
  HoppNetwork net(2, 2, 1, OutputMode::Reduced);
  CHECK(net.trainable_outputs() == 1);
  CHECK(net.active_count() == 1);
  net.set_weight({0, TermKey::bias()}, std::log(3.0));
  const auto y = outputs(net, std::vector<double>{0.2, 0.9});
  CHECK(y[0] == doctest::Approx(0.75));
  CHECK(kind_of([&] { net.set_weight({1, TermKey{0}}, 1.0); }) == ErrorKind::InvalidIndex);
}

TEST_CASE("stimulus examples") {
  HoppNetwork net(2, 2, 2);
  net.set_weight({0, TermKey::bias()}, 0.3);
  net.set_weight({1, TermKey::bias()}, -0.7);
  auto u = stimulus(net, std::vector<double>{0.5, 0.5});
  CHECK(u[0] == 0.3);
  CHECK(u[1] == -0.7);

  HoppNetwork single(2, 2, 2);
  single.set_weight({0, TermKey{0, 1}}, 2.0);
  CHECK(stimulus(single, std::vector<double>{0.5, 0.5})[0] == 0.5);
  CHECK(kind_of([&] { stimulus(single, std::vector<double>{0.5}); }) ==
        ErrorKind::InvalidDimension);
}

TEST_CASE("dense K=2 N=2 stimulus equals the written-out polynomial") {
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    HoppNetwork net(2, 2, 2);
    double w[2][4];
    for (std::size_t out = 0; out < 2; ++out) {
      const TermKey keys[4] = {TermKey::bias(), TermKey{0}, TermKey{1}, TermKey{0, 1}};
      for (int t = 0; t < 4; ++t) {
        w[out][t] = rng.uniform(-3, 3);
        net.set_weight({out, keys[t]}, w[out][t]);
      }
    }
    const double x1 = rng.uniform(-1, 1), x2 = rng.uniform(-1, 1);
    const auto u = stimulus(net, std::vector<double>{x1, x2});
    for (int out = 0; out < 2; ++out) {
      const double direct = w[out][0] + w[out][1] * x1 + w[out][2] * x2 + w[out][3] * x1 * x2;
      CHECK(std::abs(u[out] - direct) < 1e-12);
    }
  }
}

TEST_CASE("stimulus is linear in each weight") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    auto net = random_network(4, 3, rng);
    std::vector<double> x(4);
    for (auto& v : x) v = rng.uniform(-1, 1);
    const auto keys = enumerate_terms(4, 3);
    const WeightSlot slot{rng.below(2), keys[rng.below(keys.size())]};
    const double delta = rng.uniform(-1, 1);
    const auto before = stimulus(net, x);
    net.set_weight(slot, net.weight(slot) + delta);
    const auto after = stimulus(net, x);
    CHECK(after[slot.output] - before[slot.output] ==
          doctest::Approx(delta * term_value(slot.key, x)).epsilon(1e-12));
    CHECK(after[1 - slot.output] == before[1 - slot.output]);
  }
}

TEST_CASE("full-order network on binary inputs equals its multilinear extension") {
  Rng rng(5);
  for (std::size_t k = 1; k <= 4; ++k) {
    auto net = random_network(k, k, rng);
    for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
      std::vector<double> x(k);
      for (std::size_t i = 0; i < k; ++i) x[i] = (mask >> i) & 1u;
      // Brute force: sum the weights of every subset contained in the pattern.
      double brute = 0.0;
      for (std::uint32_t sub = 0; sub < (1u << k); ++sub) {
        if ((sub & mask) != sub) continue;
        std::vector<std::uint32_t> idx;
        for (std::uint32_t i = 0; i < k; ++i) {
          if ((sub >> i) & 1u) idx.push_back(i);
        }
        brute += net.weight({0, TermKey(idx)});
      }
      CHECK(stimulus(net, x)[0] == doctest::Approx(brute).epsilon(1e-12));
    }
  }
}

TEST_CASE("softmax examples") {
  for (double c : {-50.0, 0.0, 3.0, 700.0}) {
    const auto y = softmax(std::vector<double>{c, c});
    CHECK(y[0] == 0.5);
    CHECK(y[1] == 0.5);
  }
  const auto y = softmax(std::vector<double>{std::log(3.0), 0.0});
  CHECK(y[0] == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(y[1] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(kind_of([] { softmax(std::vector<double>{INFINITY, 0.0}); }) ==
        ErrorKind::NumericOverflow);
  CHECK(kind_of([] { softmax(std::vector<double>{NAN, 0.0}); }) == ErrorKind::NumericOverflow);
}

TEST_CASE("outputs are a probability distribution") {
  Rng rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    auto net = random_network(5, 3, rng);
    std::vector<double> x(5);
    for (auto& v : x) v = rng.uniform(-1, 2);
    const auto y = outputs(net, x);
    CHECK(std::abs(y[0] + y[1] - 1.0) < 1e-12);
    const auto u = stimulus(net, x);
    for (double p : y) {
      CHECK(p >= 0.0);
      CHECK(p <= 1.0);
      // Strictly inside while the larger output is still representable below 1.
      if (std::abs(u[0] - u[1]) < 30.0) CHECK((p > 0.0 && p < 1.0));
    }
  }
}

TEST_CASE("predict threshold is inclusive") {
  auto with_probability = [](double p) {
    HoppNetwork net(1, 2, 1);
    net.set_weight({0, TermKey::bias()}, std::log(p / (1 - p)));
    return net;
  };
  const std::vector<double> x{0.0};
  CHECK(predict(with_probability(0.5), x, 0.5).positive);
  CHECK_FALSE(predict(with_probability(0.49), x, 0.5).positive);
  const auto p = predict(with_probability(0.7), x, 0.9);
  CHECK_FALSE(p.positive);
  CHECK(p.probability == doctest::Approx(0.7));
  CHECK(predict(with_probability(0.3), x, 0.5, 1).positive);
  CHECK(kind_of([&] { predict(with_probability(0.5), x, 1.0); }) == ErrorKind::InvalidInput);
}

TEST_CASE("network serialization round-trips exactly") {
  Rng rng(21);
  auto net = random_network(6, 3, rng);
  net.set_weight({1, TermKey{2}}, 0.1 + 0.2);
  net.set_weight({0, TermKey{0, 4, 5}}, -1e-300);
  std::stringstream ss;
  write_network(ss, net);
  const auto back = read_network(ss);
  CHECK(back == net);

  std::stringstream bad(R"({"inputs": 2, "outputs": 2, "max_order": 1, "mode": "independent",
      "index_base": 0, "weights": [{"output": 0, "indices": [1, 0], "weight": 1.0}]})");
  CHECK(kind_of([&] { read_network(bad); }) == ErrorKind::InvalidIndex);
  std::stringstream garbage("{not json");
  CHECK(kind_of([&] { read_network(garbage); }) == ErrorKind::Parse);
}
