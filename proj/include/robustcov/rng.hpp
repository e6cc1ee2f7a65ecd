#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace robustcov {

// Identifier recorded in report files so a reader can reproduce streams.
inline constexpr const char* kRngAlgorithm = "philox4x32-10";

// Counter-based generator (Philox 4x32, 10 rounds).  The state is a 128-bit
// counter and a 64-bit key derived from the seed; each invocation of the
// round function produces a 128-bit block.  Because the output is a pure
// function of (seed, stream, counter), streams are reproducible across
// platforms and trivially splittable: distinct `stream` values give
// non-overlapping counter ranges regardless of how much either stream is
// consumed.
class Philox {
 public:
  explicit Philox(std::uint64_t seed, std::uint64_t stream = 0)
      : key_{static_cast<std::uint32_t>(seed & 0xffffffffu),
             static_cast<std::uint32_t>(seed >> 32)},
        counter_{0, 0, static_cast<std::uint32_t>(stream & 0xffffffffu),
                 static_cast<std::uint32_t>(stream >> 32)} {}

  std::uint32_t next_u32() {
    if (block_pos_ == 4) {
      block_ = generate_block(counter_, key_);
      advance_counter();
      block_pos_ = 0;
    }
    return block_[block_pos_++];
  }

  std::uint64_t next_u64() {
    const std::uint64_t lo = next_u32();
    const std::uint64_t hi = next_u32();
    return (hi << 32) | lo;
  }

  // Uniform on [0, 1) with 53 random mantissa bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1]; safe as a logarithm argument.
  double uniform_pos() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; the second value of each pair is cached.
  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    const double u1 = uniform_pos();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    cached_ = radius * std::sin(angle);
    have_cached_ = true;
    return radius * std::cos(angle);
  }

  // Gamma(shape, 1) for shape >= 1 (Marsaglia-Tsang squeeze).
  double gamma(double shape) {
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = normal();
      double v = 1.0 + c * x;
      if (v <= 0.0) continue;
      v = v * v * v;
      const double u = uniform_pos();
      if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) {
        return d * v;
      }
    }
  }

  double chi_square(double dof) { return 2.0 * gamma(0.5 * dof); }

  // Pareto with survival P(R > r) = r^{-tail_index}, support [1, inf).
  double pareto(double tail_index) {
    return std::pow(uniform_pos(), -1.0 / tail_index);
  }

  double rademacher() { return (next_u32() & 1u) ? 1.0 : -1.0; }

  // One raw 128-bit block; exposed for known-answer tests.
  static std::array<std::uint32_t, 4> generate_block(
      std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
             static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
             static_cast<std::uint32_t>(p0)};
      key[0] += 0x9E3779B9u;
      key[1] += 0xBB67AE85u;
    }
    return ctr;
  }

 private:
  void advance_counter() {
    if (++counter_[0] == 0) ++counter_[1];  // stream words stay untouched
  }

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_;
  std::array<std::uint32_t, 4> block_{};
  int block_pos_ = 4;
  bool have_cached_ = false;
  double cached_ = 0.0;
};

}  // namespace robustcov
