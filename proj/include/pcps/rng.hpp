#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace pcps {

// Seed-splitting rule used everywhere randomness fans out (trials, X samples,
// plan construction): position `index` of the splitmix64 stream started at
// `master`. Distinct indices give statistically independent seeds.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

// Deterministic double-precision random source. All distributions are
// generated from raw 64-bit draws in-library, so a fixed seed reproduces
// the exact same values on any platform.
class Rng {
  public:
    explicit Rng(std::uint64_t seed);

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform();

    // Standard normal (Box-Muller, pair-cached).
    double normal();

    // Draws an index from the distribution with cumulative weights `cdf`
    // (non-decreasing, cdf.back() = total mass). Indices whose weight
    // increment is zero are never returned.
    std::size_t categorical(const std::vector<double>& cdf);

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace pcps
