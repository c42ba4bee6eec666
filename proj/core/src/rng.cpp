#include "meanfield/rng.hpp"

#include <cmath>
#include <numbers>

namespace mf {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view text) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

Seed Seed::child(std::string_view sub) const {
  Seed s{master, label};
  if (!s.label.empty()) s.label += '/';
  s.label += sub;
  return s;
}

Seed Seed::child(std::uint64_t index) const { return child(std::to_string(index)); }

CounterRng::CounterRng(const Seed& seed)
    : key_(splitmix64(seed.master ^ splitmix64(fnv1a64(seed.label)))) {}

std::uint64_t CounterRng::bits(std::uint64_t counter) const noexcept {
  // SplitMix64 state after (counter + 1) increments from the key.
  return splitmix64(key_ + counter * kGolden);
}

double CounterRng::uniform(std::uint64_t counter) const noexcept {
  return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal(std::uint64_t counter) const noexcept {
  const double u1 = uniform(2 * counter);
  const double u2 = uniform(2 * counter + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t CounterRng::below(std::uint64_t counter, std::uint64_t bound) const noexcept {
  // Lemire's multiply-shift reduction via 32-bit halves.
  const std::uint64_t x = bits(counter);
  const std::uint64_t xh = x >> 32, xl = x & 0xFFFFFFFFULL;
  const std::uint64_t bh = bound >> 32, bl = bound & 0xFFFFFFFFULL;
  const std::uint64_t mid = xh * bl + ((xl * bl) >> 32);
  const std::uint64_t mid2 = xl * bh + (mid & 0xFFFFFFFFULL);
  return xh * bh + (mid >> 32) + (mid2 >> 32);
}

}  // namespace mf
