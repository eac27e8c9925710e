#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace hopp {

// Engine plus the few draws the library needs. The std distributions are
// implementation-defined, so the draws are written out here to keep seeded
// runs byte-identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double low, double high) { return low + (high - low) * uniform01(); }

  // Uniform integer in [0, bound); rejection sampling, no modulo bias.
  std::uint64_t below(std::uint64_t bound);

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// Independent stream seed for ensemble member `index` under `master`.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

}  // namespace hopp
