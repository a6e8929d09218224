#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

namespace sigjoin {

/// A field element of GF(2^8) or GF(2^16). GF(2^8) elements occupy the low byte.
using GfElement = std::uint16_t;

class GfError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Log/antilog tables for GF(2^f), f in {8, 16}.
///
/// The field is built over a fixed primitive polynomial (0x11D for f=8,
/// 0x1100B for f=16) with alpha = x = 2 as the primitive element. Tables are
/// filled eagerly in the constructor; the object is immutable afterwards and
/// may be shared freely between threads.
class GfContext {
 public:
  static constexpr std::uint32_t kPoly8 = 0x11D;
  static constexpr std::uint32_t kPoly16 = 0x1100B;
  static constexpr GfElement kAlpha = 2;
  /// Extra antilog entries past 2*(2^f-1). Lets callers defer exponent
  /// reduction for a while.
  static constexpr std::uint32_t kExpSlack = 1024;

  explicit GfContext(unsigned width);

  /// Process-wide shared context for the given width.
  static std::shared_ptr<const GfContext> shared(unsigned width);

  unsigned width() const noexcept { return width_; }
  std::uint32_t primitive_poly() const noexcept { return poly_; }
  /// 2^f
  std::uint32_t size() const noexcept { return 1u << width_; }
  /// Order of the multiplicative group, 2^f - 1.
  std::uint32_t order() const noexcept { return order_; }

  /// log_table[x] for non-zero x; the entry for 0 is unused.
  std::span<const std::uint16_t> log_table() const noexcept { return log_; }
  /// antilog_table[k] = alpha^k for k in [0, 2^f - 2].
  std::span<const GfElement> antilog_table() const noexcept {
    return std::span<const GfElement>(antilog_).first(order_);
  }

  std::uint16_t log(GfElement x) const { return log_[x]; }

  /// alpha^e for any e in [0, 2*(2^f-1) + kExpSlack); the table repeats with
  /// period 2^f-1 so a sum of two logarithms never needs reduction.
  GfElement exp(std::uint32_t e) const { return antilog_[e]; }

  static GfElement add(GfElement a, GfElement b) noexcept { return a ^ b; }

  GfElement mul(GfElement a, GfElement b) const noexcept {
    if (a == 0 || b == 0) return 0;
    return antilog_[static_cast<std::uint32_t>(log_[a]) + log_[b]];
  }

  /// a^k through exponent arithmetic. pow(0, 0) == 1.
  GfElement pow(GfElement a, std::uint64_t k) const noexcept;

  bool contains(std::uint32_t x) const noexcept { return x < size(); }

 private:
  unsigned width_;
  std::uint32_t poly_;
  std::uint32_t order_;
  std::vector<std::uint16_t> log_;
  std::vector<GfElement> antilog_;
};

inline GfElement gf_add(GfElement a, GfElement b) noexcept { return a ^ b; }

inline GfElement gf_mul(const GfContext& ctx, GfElement a, GfElement b) noexcept {
  return ctx.mul(a, b);
}

inline GfElement gf_pow(const GfContext& ctx, GfElement a, std::uint64_t k) noexcept {
  return ctx.pow(a, k);
}

}  // namespace sigjoin
