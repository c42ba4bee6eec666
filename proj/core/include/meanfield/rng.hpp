#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace mf {

/// Master seed plus a hierarchical stream label such as "goe/0".
///
/// Every random object in the library is a pure function of (master, label,
/// index), so generation order and thread count never affect the output.
struct Seed {
  std::uint64_t master = 0;
  std::string label;

  Seed child(std::string_view sub) const;
  Seed child(std::uint64_t index) const;
};

/// Stateless counter-based generator keyed by a Seed.
///
/// bits(i) is the SplitMix64 output at position i of the stream whose state
/// is derived from the key; uniform/normal draws are functions of the counter.
class CounterRng {
 public:
  explicit CounterRng(const Seed& seed);

  std::uint64_t key() const noexcept { return key_; }

  std::uint64_t bits(std::uint64_t counter) const noexcept;
  /// Uniform on the open interval (0, 1).
  double uniform(std::uint64_t counter) const noexcept;
  /// Standard normal via Box-Muller on counters 2c and 2c+1.
  double normal(std::uint64_t counter) const noexcept;
  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t counter, std::uint64_t bound) const noexcept;

 private:
  std::uint64_t key_;
};

/// Sequential convenience wrapper over CounterRng for code that draws an
/// a-priori unknown number of variates (rejection loops, restarts).
class RngStream {
 public:
  explicit RngStream(const Seed& seed) : rng_(seed) {}

  double uniform() noexcept { return rng_.uniform(next_++); }
  double normal() noexcept { return rng_.normal(next_++); }
  std::uint64_t below(std::uint64_t bound) noexcept { return rng_.below(next_++, bound); }

 private:
  CounterRng rng_;
  std::uint64_t next_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;
std::uint64_t fnv1a64(std::string_view text) noexcept;

}  // namespace mf
