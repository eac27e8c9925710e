#include "hopp/term_key.hpp"

#include <algorithm>
#include <limits>

#include "hopp/error.hpp"

namespace hopp {

TermKey::TermKey(std::vector<std::uint32_t> indices) : indices_(std::move(indices)) {
  for (std::size_t i = 1; i < indices_.size(); ++i) {
    if (indices_[i] <= indices_[i - 1]) {
      throw Error(ErrorKind::InvalidIndex,
                  "term indices must be strictly increasing (repeated or unsorted index " +
                      std::to_string(indices_[i]) + ")");
    }
  }
}

std::strong_ordering TermKey::operator<=>(const TermKey& other) const {
  if (auto c = indices_.size() <=> other.indices_.size(); c != 0) return c;
  return std::lexicographical_compare_three_way(indices_.begin(), indices_.end(),
                                                other.indices_.begin(), other.indices_.end());
}

std::string TermKey::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    if (i) out += '-';
    out += std::to_string(indices_[i]);
  }
  return out;
}

namespace {

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

// C(n, k), saturating at kSaturated.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    result = result * (n - k + i) / i;
    if (result > kSaturated) return kSaturated;
  }
  return static_cast<std::uint64_t>(result);
}

void check_dimensions(std::size_t inputs, std::size_t max_order) {
  if (inputs == 0) throw Error(ErrorKind::InvalidDimension, "input count must be positive");
  if (max_order > inputs) {
    throw Error(ErrorKind::InvalidDimension,
                "maximum order " + std::to_string(max_order) + " exceeds input count " +
                    std::to_string(inputs));
  }
}

}  // namespace

std::uint64_t count_terms(std::size_t inputs, std::size_t max_order) {
  check_dimensions(inputs, max_order);
  std::uint64_t total = 1;
  for (std::size_t n = 1; n <= max_order; ++n) {
    const std::uint64_t c = binomial(inputs, n);
    if (c == kSaturated || total > kSaturated - c) {
      throw Error(ErrorKind::NumericOverflow, "term count exceeds 64 bits");
    }
    total += c;
  }
  return total;
}

std::vector<TermKey> enumerate_terms(std::size_t inputs, std::size_t max_order) {
  const std::uint64_t total = count_terms(inputs, max_order);
  std::vector<TermKey> keys;
  keys.reserve(static_cast<std::size_t>(total));
  keys.emplace_back();
  std::vector<std::uint32_t> combo;
  for (std::size_t n = 1; n <= max_order; ++n) {
    combo.resize(n);
    for (std::size_t i = 0; i < n; ++i) combo[i] = static_cast<std::uint32_t>(i);
    while (true) {
      keys.emplace_back(combo);
      // Advance to the next n-combination in lexicographic order.
      std::size_t pos = n;
      while (pos > 0 && combo[pos - 1] == inputs - n + pos - 1) --pos;
      if (pos == 0) break;
      ++combo[pos - 1];
      for (std::size_t j = pos; j < n; ++j) combo[j] = combo[j - 1] + 1;
    }
  }
  return keys;
}

TermKey unrank_term(std::size_t inputs, std::size_t max_order, std::uint64_t rank) {
  const std::uint64_t total = count_terms(inputs, max_order);
  if (rank >= total) {
    throw Error(ErrorKind::InvalidIndex, "term rank " + std::to_string(rank) + " out of range");
  }
  if (rank == 0) return TermKey::bias();
  --rank;
  std::size_t order = 1;
  for (;; ++order) {
    const std::uint64_t c = binomial(inputs, order);
    if (rank < c) break;
    rank -= c;
  }
  // Lexicographic unranking of an `order`-combination of [0, inputs).
  std::vector<std::uint32_t> combo;
  combo.reserve(order);
  std::uint32_t next = 0;
  for (std::size_t slot = 0; slot < order; ++slot) {
    const std::size_t remaining = order - slot - 1;
    while (true) {
      const std::uint64_t block = binomial(inputs - next - 1, remaining);
      if (rank < block) break;
      rank -= block;
      ++next;
    }
    combo.push_back(next);
    ++next;
  }
  return TermKey(std::move(combo));
}

double term_value(const TermKey& key, std::span<const double> x) {
  double product = 1.0;
  for (auto index : key.indices()) {
    if (index >= x.size()) {
      throw Error(ErrorKind::InvalidIndex, "term index " + std::to_string(index) +
                                               " out of range for " + std::to_string(x.size()) +
                                               " inputs");
    }
    product *= x[index];
  }
  return product;
}

}  // namespace hopp
