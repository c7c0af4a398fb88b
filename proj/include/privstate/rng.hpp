#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace privstate {

/// Addresses one Monte Carlo trial. The same (master_seed, trial_index)
/// reproduces identical sample streams bit-exactly, independent of the
/// order in which trials are run.
struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t trial_index = 0;
};

/// Philox4x32-10 counter-based generator (Salmon et al., "Parallel Random
/// Numbers: As Easy as 1, 2, 3"). The key carries the master seed, the
/// high counter words carry the trial index, and the low counter words
/// advance per block, so streams for distinct trials never overlap.
class PhiloxRng {
 public:
  explicit PhiloxRng(SeedSpec seed) {
    key_[0] = static_cast<std::uint32_t>(seed.master_seed);
    key_[1] = static_cast<std::uint32_t>(seed.master_seed >> 32);
    ctr_hi_[0] = static_cast<std::uint32_t>(seed.trial_index);
    ctr_hi_[1] = static_cast<std::uint32_t>(seed.trial_index >> 32);
  }

  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                            std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += 0x9E3779B9u;
        key[1] += 0xBB67AE85u;
      }
      const std::uint64_t p0 = static_cast<std::uint64_t>(0xD2511F53u) * ctr[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(0xCD9E8D57u) * ctr[2];
      const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
      const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }

  std::uint32_t next_u32() {
    if (buffer_pos_ == 4) refill();
    return buffer_[buffer_pos_++];
  }

  std::uint64_t next_u64() {
    const std::uint64_t lo = next_u32();
    const std::uint64_t hi = next_u32();
    return (hi << 32) | lo;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller (pairs cached).
  double gaussian() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = uniform();
    const double u2 = uniform();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    cached_ = r * std::sin(t);
    have_cached_ = true;
    return r * std::cos(t);
  }

  /// Complex with independent standard normal real/imaginary parts.
  std::complex<double> complex_gaussian() {
    const double re = gaussian();
    const double im = gaussian();
    return {re, im};
  }

 private:
  void refill() {
    buffer_ = block({static_cast<std::uint32_t>(block_index_),
                     static_cast<std::uint32_t>(block_index_ >> 32), ctr_hi_[0], ctr_hi_[1]},
                    key_);
    ++block_index_;
    buffer_pos_ = 0;
  }

  std::array<std::uint32_t, 2> key_{};
  std::array<std::uint32_t, 2> ctr_hi_{};
  std::uint64_t block_index_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int buffer_pos_ = 4;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace privstate
