#include "sigjoin/signature.hpp"

#include <algorithm>
#include <cstring>
#include <type_traits>
#include <utility>

namespace sigjoin {

namespace {

void check_length(std::size_t byte_len, unsigned f) {
  const std::size_t symbols = symbol_count(byte_len, f);
  const std::size_t limit = (std::size_t{1} << f) - 1;
  if (symbols >= limit) {
    throw StringTooLong("string of " + std::to_string(byte_len) + " bytes needs " + std::to_string(symbols) +
                        " symbols; GF(2^" + std::to_string(f) + ") signatures allow fewer than " +
                        std::to_string(limit));
  }
}

// Term i of component j is alpha^(log p_i + i*j). Exponents run unreduced for
// a block (the antilog table has kExpSlack spare entries) and are folded back
// once per block. Symbols go four at a time into two accumulators so the
// table lookups stay independent of each other.
//
// A zero symbol has no logarithm. The group loop looks up log[0] anyway; when
// the string holds a zero byte at all, groups with a zero lane XOR that bogus
// term out again.
template <unsigned N, unsigned F, bool kMayHoldZero>
void accumulate(const GfContext& ctx, std::string_view bytes, std::array<GfElement, kMaxSignatureSymbols>& acc) {
  using Word = std::conditional_t<F == 16, std::uint64_t, std::uint32_t>;
  constexpr unsigned kLane = F;
  constexpr Word kLow = static_cast<Word>(F == 16 ? 0x0001000100010001ull : 0x01010101ull);
  constexpr Word kHigh = static_cast<Word>(kLow << (kLane - 1));
  constexpr Word kLaneMask = static_cast<Word>((Word{1} << kLane) - 1);
  constexpr std::size_t kBlock = (GfContext::kExpSlack / (4 * N)) * 4;

  const std::uint32_t order = ctx.order();
  const std::uint16_t* log = ctx.log_table().data();
  const GfElement* antilog = &ctx.antilog_table()[0];
  const auto* data = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::size_t count = F == 16 ? bytes.size() / 2 : bytes.size();

  std::uint32_t exponent[N];
  std::uint32_t even[N], odd[N];
  for (unsigned j = 0; j < N; ++j) {
    exponent[j] = j + 1;
    even[j] = odd[j] = 0;
  }

  std::size_t i = 0;
  const std::size_t grouped = count & ~std::size_t{3};
  while (i < grouped) {
    const std::size_t end = std::min(grouped, i + kBlock);
    for (; i < end; i += 4) {
      Word w;
      std::memcpy(&w, data + i * (F / 8), sizeof w);  // little-endian host assumed
      std::uint32_t l[4];
      for (unsigned k = 0; k < 4; ++k) l[k] = log[(w >> (k * kLane)) & kLaneMask];
      for (unsigned j = 0; j < N; ++j) {
        const std::uint32_t x = exponent[j], step = j + 1;
        even[j] ^= antilog[l[0] + x] ^ antilog[l[1] + x + step];
        odd[j] ^= antilog[l[2] + x + 2 * step] ^ antilog[l[3] + x + 3 * step];
        exponent[j] += 4 * step;
      }
      if (kMayHoldZero && ((w - kLow) & ~w & kHigh)) {
        for (unsigned k = 0; k < 4; ++k) {
          if ((w >> (k * kLane)) & kLaneMask) continue;
          for (unsigned j = 0; j < N; ++j) even[j] ^= antilog[l[k] + exponent[j] - (4 - k) * (j + 1)];
        }
      }
    }
    for (unsigned j = 0; j < N; ++j) {
      while (exponent[j] >= order) exponent[j] -= order;
    }
  }
  auto single = [&](std::uint32_t p) {
    if (p != 0) {
      for (unsigned j = 0; j < N; ++j) even[j] ^= antilog[log[p] + exponent[j]];
    }
    for (unsigned j = 0; j < N; ++j) exponent[j] += j + 1;
  };
  for (; i < count; ++i) {
    single(F == 16 ? static_cast<std::uint32_t>(data[2 * i] | (data[2 * i + 1] << 8)) : data[i]);
  }
  if (F == 16 && (bytes.size() & 1)) single(data[bytes.size() - 1]);

  for (unsigned j = 0; j < N; ++j) acc[j] = static_cast<GfElement>(even[j] ^ odd[j]);
}

}  // namespace

std::vector<GfElement> symbolize(std::string_view bytes, unsigned f) {
  if (f != 8 && f != 16) throw GfError("unsupported field width " + std::to_string(f));
  check_length(bytes.size(), f);
  const auto* data = reinterpret_cast<const unsigned char*>(bytes.data());
  std::vector<GfElement> out;
  if (f == 8) {
    out.assign(data, data + bytes.size());
    return out;
  }
  out.reserve(symbol_count(bytes.size(), f));
  for (std::size_t i = 0; i + 1 < bytes.size(); i += 2) {
    out.push_back(static_cast<GfElement>(data[i] | (data[i + 1] << 8)));
  }
  if (bytes.size() & 1) out.push_back(data[bytes.size() - 1]);
  return out;
}

AlgebraicSignature::AlgebraicSignature(SigConfig config, std::span<const GfElement> symbols, std::uint32_t byte_len)
    : byte_len_(byte_len), f_(static_cast<std::uint8_t>(config.f)), n_sig_(static_cast<std::uint8_t>(config.n_sig)) {
  if (symbols.size() != config.n_sig || config.n_sig > kMaxSignatureSymbols) {
    throw std::invalid_argument("signature needs exactly n_sig symbols");
  }
  std::copy(symbols.begin(), symbols.end(), symbols_.begin());
}

std::string AlgebraicSignature::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  const unsigned digits = f_ / 4;
  std::string out;
  out.reserve(n_sig_ * digits);
  for (unsigned j = n_sig_; j-- > 0;) {
    for (unsigned d = digits; d-- > 0;) out.push_back(kDigits[(symbols_[j] >> (4 * d)) & 0xF]);
  }
  return out;
}

SignatureBase::SignatureBase(SigConfig config) : SignatureBase(GfContext::shared(config.f), config.n_sig) {}

SignatureBase::SignatureBase(std::shared_ptr<const GfContext> ctx, unsigned n_sig)
    : ctx_(std::move(ctx)), n_sig_(n_sig) {
  if (!ctx_) throw std::invalid_argument("signature base needs a field context");
  if (n_sig_ < 1 || n_sig_ >= ctx_->order()) {
    throw std::invalid_argument("n_sig must be in [1, 2^f - 2], got " + std::to_string(n_sig_));
  }
  if (n_sig_ > kMaxSignatureSymbols) {
    throw std::invalid_argument("n_sig above " + std::to_string(kMaxSignatureSymbols) + " is not supported");
  }
  for (unsigned j = 1; j <= n_sig_; ++j) elements_[j - 1] = ctx_->pow(GfContext::kAlpha, j);
  kernel_ = pick_kernel(ctx_->width(), n_sig_);
}

template <unsigned N, unsigned F>
AlgebraicSignature SignatureBase::compute_fixed(const SignatureBase& base, std::string_view bytes) {
  check_length(bytes.size(), F);
  AlgebraicSignature sig;
  sig.f_ = static_cast<std::uint8_t>(F);
  sig.n_sig_ = static_cast<std::uint8_t>(N);
  sig.byte_len_ = static_cast<std::uint32_t>(bytes.size());
  // No zero byte means no zero symbol in either width.
  if (std::memchr(bytes.data(), 0, bytes.size()) == nullptr) {
    accumulate<N, F, false>(*base.ctx_, bytes, sig.symbols_);
  } else {
    accumulate<N, F, true>(*base.ctx_, bytes, sig.symbols_);
  }
  return sig;
}

namespace {

template <unsigned F, std::size_t... I>
constexpr auto kernel_table(std::index_sequence<I...>) {
  return std::array<SignatureBase::Kernel, sizeof...(I)>{&SignatureBase::compute_fixed<I + 1, F>...};
}

}  // namespace

SignatureBase::Kernel SignatureBase::pick_kernel(unsigned f, unsigned n_sig) {
  static constexpr auto k8 = kernel_table<8>(std::make_index_sequence<kMaxSignatureSymbols>{});
  static constexpr auto k16 = kernel_table<16>(std::make_index_sequence<kMaxSignatureSymbols>{});
  return (f == 16 ? k16 : k8)[n_sig - 1];
}

bool signatures_equal(const AlgebraicSignature& a, const AlgebraicSignature& b) {
  if (a.base_tag() != b.base_tag()) {
    throw BaseMismatch("signatures come from different bases (GF(2^" + std::to_string(a.config().f) + ")/" +
                       std::to_string(a.config().n_sig) + " vs GF(2^" + std::to_string(b.config().f) + ")/" +
                       std::to_string(b.config().n_sig) + ")");
  }
  return a == b;
}

}  // namespace sigjoin
