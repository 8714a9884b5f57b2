#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace momentest {

/// Address of a reproducible random stream: identical (seed, stream) pairs
/// always produce identical output.
struct RngSpec {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  friend bool operator==(const RngSpec&, const RngSpec&) = default;
};

/// Philox4x32-10 counter-based generator. The seed is the 64-bit key, the
/// stream index occupies the upper half of the 128-bit counter, and the lower
/// half counts blocks. Satisfies UniformRandomBitGenerator.
class Philox4x32 {
 public:
  using result_type = std::uint64_t;
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  explicit Philox4x32(RngSpec spec) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept;

  /// The raw ten-round bijection, exposed for known-answer tests.
  static Block encrypt(Block counter, Key key) noexcept;

 private:
  void refill() noexcept;

  Key key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  Block buffer_{};
  unsigned used_ = 4;
};

/// Mixes a master seed with an ordinal into a fresh 64-bit seed (SplitMix64
/// finalizer), used to give sweep cells independent keys.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t ordinal) noexcept;

/// Uniform, normal, and gamma variates drawn from one Philox stream.
class RandomStream {
 public:
  explicit RandomStream(RngSpec spec) noexcept : engine_(spec) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Uniform on the open interval (0, 1).
  double uniform_open() noexcept;
  /// Standard normal (Box-Muller; the second variate of each pair is cached).
  double normal() noexcept;
  /// Gamma(shape, 1) variate by Marsaglia-Tsang, with the U^(1/shape) boost
  /// for shape < 1.
  double gamma(double shape) noexcept;
  /// log of a Gamma(shape, 1) variate; stays finite for shapes where the
  /// variate itself would underflow.
  double log_gamma(double shape) noexcept;

  Philox4x32& engine() noexcept { return engine_; }

 private:
  double marsaglia_tsang(double shape) noexcept;

  Philox4x32 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace momentest
