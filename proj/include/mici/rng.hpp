#pragma once

#include <cstdint>
#include <random>

namespace mici {

/// SplitMix64 finalizer; used only to derive independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Named random streams within one simulation run.
enum class Stream : std::uint64_t { kMobility = 0, kSolver = 1 };

/// Seed for stream `stream` of run `run_index`:
///   splitmix64(splitmix64(root + run_index) + stream).
/// Runs are independent of each other and of execution order.
constexpr std::uint64_t derive_seed(std::uint64_t root, std::uint64_t run_index,
                                    Stream stream) noexcept {
  return splitmix64(splitmix64(root + run_index) + static_cast<std::uint64_t>(stream));
}

/// Deterministic generator. The bounded and unit draws are written out here
/// rather than using <random> distributions, whose output is not specified
/// by the standard and differs between library vendors.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t uniform_index(std::uint64_t bound) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % bound;
  }

  /// Uniform real in [0, 1) with 53 random bits.
  double uniform_unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mici
