#include "momentest/rng.hpp"

#include <cmath>
#include <numbers>

namespace momentest {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
constexpr int kRounds = 10;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) noexcept {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

constexpr double kTwoPow53Inv = 1.0 / 9007199254740992.0;

}  // namespace

Philox4x32::Philox4x32(RngSpec spec) noexcept
    : key_{static_cast<std::uint32_t>(spec.seed),
           static_cast<std::uint32_t>(spec.seed >> 32)},
      stream_(spec.stream) {}

Philox4x32::Block Philox4x32::encrypt(Block ctr, Key key) noexcept {
  for (int r = 0; r < kRounds; ++r) {
    if (r > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

void Philox4x32::refill() noexcept {
  const Block ctr = {static_cast<std::uint32_t>(block_),
                     static_cast<std::uint32_t>(block_ >> 32),
                     static_cast<std::uint32_t>(stream_),
                     static_cast<std::uint32_t>(stream_ >> 32)};
  buffer_ = encrypt(ctr, key_);
  ++block_;
  used_ = 0;
}

Philox4x32::result_type Philox4x32::operator()() noexcept {
  if (used_ >= 4) refill();
  const result_type v = (static_cast<result_type>(buffer_[used_ + 1]) << 32) |
                        buffer_[used_];
  used_ += 2;
  return v;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t ordinal) noexcept {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ull * (ordinal + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double RandomStream::uniform() noexcept {
  return static_cast<double>(engine_() >> 11) * kTwoPow53Inv;
}

double RandomStream::uniform_open() noexcept {
  return (static_cast<double>(engine_() >> 11) + 0.5) * kTwoPow53Inv;
}

double RandomStream::normal() noexcept {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  const double u1 = uniform_open();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  cached_normal_ = radius * std::sin(angle);
  has_cached_normal_ = true;
  return radius * std::cos(angle);
}

double RandomStream::marsaglia_tsang(double shape) noexcept {
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform_open();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double RandomStream::gamma(double shape) noexcept {
  if (shape >= 1.0) return marsaglia_tsang(shape);
  const double g = marsaglia_tsang(shape + 1.0);
  return g * std::pow(uniform_open(), 1.0 / shape);
}

double RandomStream::log_gamma(double shape) noexcept {
  if (shape >= 1.0) return std::log(marsaglia_tsang(shape));
  const double g = marsaglia_tsang(shape + 1.0);
  return std::log(g) + std::log(uniform_open()) / shape;
}

}  // namespace momentest
