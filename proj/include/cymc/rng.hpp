#pragma once

#include <cstdint>
#include <cmath>
#include <random>

namespace cymc {

/// Seedable random stream with a fixed, documented algorithm so runs are
/// bit-reproducible across platforms: mt19937_64 for the raw bits, 53-bit
/// uniforms, and the Marsaglia polar transform for normals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Per-replica substream: seed XOR replica index.
  static Rng substream(std::uint64_t seed, std::uint64_t replica) {
    return Rng(seed ^ replica);
  }

  /// Uniform draw on [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via the polar method (deterministic transform of
  /// uniform pairs; does not depend on library distribution internals).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    double scale = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * scale;
    has_spare_ = true;
    return u * scale;
  }

  static constexpr const char* algorithm_name = "mt19937_64+polar";

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

} // namespace cymc
