#pragma once

// Counter-based random numbers.
//
// Every variate is a pure function of (master seed, stream id, counter), so a
// trajectory's noise does not depend on which worker ran it or in what order.
// The bit generator is Philox4x32-10 (Salmon et al., SC'11).

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace qfilter {

class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;

  explicit constexpr Philox4x32(std::uint64_t key)
      : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)} {}

  constexpr Block operator()(Block ctr) const {
    std::array<std::uint32_t, 2> k = key_;
    for (int round = 0; round < 10; ++round) {
      ctr = round_once(ctr, k);
      k[0] += kWeyl0;
      k[1] += kWeyl1;
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static constexpr Block round_once(const Block& c, const std::array<std::uint32_t, 2>& k) {
    const std::uint64_t p0 = std::uint64_t{kMul0} * c[0];
    const std::uint64_t p1 = std::uint64_t{kMul1} * c[2];
    return {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0], static_cast<std::uint32_t>(p1),
            static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1], static_cast<std::uint32_t>(p0)};
  }

  std::array<std::uint32_t, 2> key_;
};

// SplitMix64 finalizer; used to derive keys from (seed, purpose) pairs.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Deterministic stream of standard variates addressed by a 64-bit counter.
class CounterRng {
 public:
  constexpr CounterRng(std::uint64_t seed, std::uint64_t stream) : gen_(mix64(seed)), stream_(stream) {}

  // Uniform in the open interval (0, 1), 53 bits.
  double uniform() {
    const auto b = block(counter_++);
    return to_unit(b[0], b[1]);
  }

  // Box-Muller on one Philox block; both outputs are used before advancing.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const auto b = block(counter_++);
    const double u1 = to_unit(b[0], b[1]);
    const double u2 = to_unit(b[2], b[3]);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(angle);
    has_spare_ = true;
    return r * std::cos(angle);
  }

  std::uint64_t counter() const { return counter_; }

 private:
  Philox4x32::Block block(std::uint64_t ctr) const {
    return gen_({static_cast<std::uint32_t>(ctr), static_cast<std::uint32_t>(ctr >> 32),
                 static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)});
  }

  static double to_unit(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits = ((std::uint64_t{hi} << 32) | lo) >> 11;  // 53 bits
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  }

  Philox4x32 gen_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Wiener increments dW ~ N(0, dt) for one trajectory. Step k of trajectory j
// under master seed s always yields the same increment.
class WienerStream {
 public:
  WienerStream(std::uint64_t seed, std::uint64_t trajectory) : seed_(seed), trajectory_(trajectory), rng_(seed, trajectory) {}

  double next(double dt) {
    ++steps_;
    return std::sqrt(dt) * rng_.normal();
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t trajectory() const { return trajectory_; }
  std::uint64_t steps_taken() const { return steps_; }

 private:
  std::uint64_t seed_;
  std::uint64_t trajectory_;
  CounterRng rng_;
  std::uint64_t steps_ = 0;
};

}  // namespace qfilter
