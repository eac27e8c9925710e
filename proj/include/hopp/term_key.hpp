#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace hopp {

// A product term of the stimulus expansion: a strictly increasing set of
// zero-based input indices. The empty key is the bias (constant input 1).
class TermKey {
 public:
  TermKey() = default;

  // Throws InvalidIndex unless `indices` is strictly increasing.
  explicit TermKey(std::vector<std::uint32_t> indices);
  TermKey(std::initializer_list<std::uint32_t> indices)
      : TermKey(std::vector<std::uint32_t>(indices)) {}

  static TermKey bias() { return TermKey{}; }

  std::size_t order() const noexcept { return indices_.size(); }
  bool is_bias() const noexcept { return indices_.empty(); }
  std::span<const std::uint32_t> indices() const noexcept { return indices_; }

  // Order first, then lexicographic: bias < singletons < pairs < ...
  std::strong_ordering operator<=>(const TermKey& other) const;
  bool operator==(const TermKey& other) const = default;

  // "3-7-12"; "" for the bias.
  std::string to_string() const;

 private:
  std::vector<std::uint32_t> indices_;
};

// Number of keys of order 0..max_order over `inputs` inputs:
// 1 + sum_{n=1..N} C(K, n). Throws InvalidDimension for N > K or K == 0,
// NumericOverflow if the count does not fit in 64 bits.
std::uint64_t count_terms(std::size_t inputs, std::size_t max_order);

// All keys of order 0..max_order in TermKey ordering.
std::vector<TermKey> enumerate_terms(std::size_t inputs, std::size_t max_order);

// The key at position `rank` of enumerate_terms(inputs, max_order), computed
// without enumerating.
TermKey unrank_term(std::size_t inputs, std::size_t max_order, std::uint64_t rank);

// Product of the selected components; 1 for the bias.
double term_value(const TermKey& key, std::span<const double> x);

}  // namespace hopp
