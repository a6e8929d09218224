#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sigjoin/gf.hpp"

namespace sigjoin {

class StringTooLong : public std::length_error {
 public:
  using std::length_error::length_error;
};

class BaseMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Field width and symbol count of a signature scheme.
struct SigConfig {
  unsigned f = 16;
  unsigned n_sig = 2;

  friend bool operator==(const SigConfig&, const SigConfig&) = default;
};

/// Largest supported symbol count; keeps AlgebraicSignature a fixed-size value.
inline constexpr unsigned kMaxSignatureSymbols = 8;

/// Symbols of the byte string: one per byte for f=8, little-endian byte pairs
/// for f=16 (a trailing odd byte gets a zero high byte).
/// Throws StringTooLong when the symbol count reaches 2^f - 1.
std::vector<GfElement> symbolize(std::string_view bytes, unsigned f);

/// Number of symbols `symbolize` would produce.
constexpr std::size_t symbol_count(std::size_t byte_len, unsigned f) noexcept {
  return f == 16 ? (byte_len + 1) / 2 : byte_len;
}

/// An n-symbol signature plus the length of the signed string.
///
/// Equal strings always produce equal signatures. Unequal strings of the same
/// length that differ in at most n_sig symbol positions never do; other pairs
/// collide with probability about 2^-(n_sig*f).
class AlgebraicSignature {
 public:
  AlgebraicSignature() = default;
  AlgebraicSignature(SigConfig config, std::span<const GfElement> symbols, std::uint32_t byte_len);

  std::span<const GfElement> symbols() const noexcept { return {symbols_.data(), n_sig_}; }
  GfElement operator[](std::size_t j) const noexcept { return symbols_[j]; }
  std::uint32_t byte_len() const noexcept { return byte_len_; }
  SigConfig config() const noexcept { return {f_, n_sig_}; }

  /// Identifies the base that produced the signature.
  std::uint16_t base_tag() const noexcept { return static_cast<std::uint16_t>(f_ << 8 | n_sig_); }

  /// Bytes an entry of this signature costs in a build table: n_sig*f/8
  /// symbol bytes plus a 4-byte length field.
  std::size_t stored_bytes() const noexcept { return n_sig_ * f_ / 8 + sizeof(std::uint32_t); }

  /// Lowercase hex of the concatenated symbols, highest component first, each
  /// symbol as f/4 digits.
  std::string to_hex() const;

  /// Raw comparison; unused slots are always zero so whole-array equality holds.
  friend bool operator==(const AlgebraicSignature&, const AlgebraicSignature&) = default;

 private:
  friend class SignatureBase;

  std::array<GfElement, kMaxSignatureSymbols> symbols_{};
  std::uint32_t byte_len_ = 0;
  std::uint8_t f_ = 0;
  std::uint8_t n_sig_ = 0;
};

/// The vector (alpha^1, ..., alpha^n_sig) over a shared field context.
class SignatureBase {
 public:
  explicit SignatureBase(SigConfig config = {});
  SignatureBase(std::shared_ptr<const GfContext> ctx, unsigned n_sig);

  const GfContext& context() const noexcept { return *ctx_; }
  SigConfig config() const noexcept { return {ctx_->width(), n_sig_}; }
  unsigned n_sig() const noexcept { return n_sig_; }
  std::span<const GfElement> elements() const noexcept { return {elements_.data(), n_sig_}; }

  /// Component j (1-based) is the sum over i = 1..l of p_i * (alpha^j)^i.
  /// One pass over the string; positional powers are tracked as running
  /// exponents.
  AlgebraicSignature compute(std::string_view bytes) const { return kernel_(*this, bytes); }

  using Kernel = AlgebraicSignature (*)(const SignatureBase&, std::string_view);
  template <unsigned N, unsigned F>
  static AlgebraicSignature compute_fixed(const SignatureBase& base, std::string_view bytes);

 private:
  static Kernel pick_kernel(unsigned f, unsigned n_sig);

  std::shared_ptr<const GfContext> ctx_;
  unsigned n_sig_;
  std::array<GfElement, kMaxSignatureSymbols> elements_{};
  Kernel kernel_ = nullptr;
};

inline AlgebraicSignature compute_signature(const SignatureBase& base, std::string_view bytes) {
  return base.compute(bytes);
}

/// Equality of signatures from the same base; BaseMismatch otherwise.
bool signatures_equal(const AlgebraicSignature& a, const AlgebraicSignature& b);

}  // namespace sigjoin
