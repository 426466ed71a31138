#pragma once

#include <cstdint>
#include <random>

namespace citeground {

// mt19937_64 is fully specified by the standard; the std distributions are
// not, so draws are derived from raw engine output to stay reproducible
// across standard libraries.
class seeded_rng {
public:
  explicit seeded_rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, n). Modulo bias is below 2^-50 for the small n used here.
  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : engine_() % n; }

  // Uniform in [lo, hi].
  std::int64_t between(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
  std::mt19937_64 engine_;
};

} // namespace citeground
